// UI session state: a pure mirror of server responses. Messages are
// append-only; every transition returns a new state object.

import type { CreateSessionResponse, PlanData, UtteranceResponse } from "./api";

export interface ChatMessage {
  sender: "user" | "system";
  text: string;
  source?: "Rule" | "Llm";
}

export interface UiSessionState {
  sessionId: string | null;
  messages: ChatMessage[];
  phase: string | null;
  ended: boolean;
  plan: PlanData | null;
  busy: boolean;
  error: string | null;
  notice: string | null;
}

export const initialState: UiSessionState = {
  sessionId: null,
  messages: [],
  phase: null,
  ended: false,
  plan: null,
  busy: false,
  error: null,
  notice: null,
};

export function requestStarted(state: UiSessionState): UiSessionState {
  return { ...state, busy: true, error: null, notice: null };
}

export function sessionStarted(
  state: UiSessionState,
  response: CreateSessionResponse,
): UiSessionState {
  return {
    ...state,
    sessionId: response.session_id,
    messages: [...state.messages, { sender: "system", text: response.system_utterance }],
    phase: response.phase,
    busy: false,
  };
}

export function utteranceSent(state: UiSessionState, text: string): UiSessionState {
  return {
    ...state,
    messages: [...state.messages, { sender: "user", text }],
    busy: true,
    error: null,
    notice: null,
  };
}

export function replyReceived(
  state: UiSessionState,
  response: UtteranceResponse,
): UiSessionState {
  return {
    ...state,
    messages: [
      ...state.messages,
      { sender: "system", text: response.system_utterance, source: response.response_source },
    ],
    phase: response.phase,
    ended: response.ended,
    plan: response.plan ?? state.plan,
    busy: false,
  };
}

export function requestFailed(state: UiSessionState, message: string): UiSessionState {
  return { ...state, busy: false, error: message };
}

export function conversationFinished(state: UiSessionState): UiSessionState {
  return { ...state, busy: false, ended: true, notice: "This conversation has finished." };
}

export function inputEnabled(state: UiSessionState): boolean {
  return state.sessionId !== null && !state.busy && !state.ended;
}
