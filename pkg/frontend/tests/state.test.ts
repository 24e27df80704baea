import { describe, expect, it } from "vitest";

import type { UtteranceResponse } from "../src/api";
import {
  conversationFinished,
  initialState,
  inputEnabled,
  replyReceived,
  requestFailed,
  requestStarted,
  sessionStarted,
  utteranceSent,
} from "../src/state";

const OPENING = { session_id: "s1", system_utterance: "Hello! How are you?", phase: "Icebreaker" };

function reply(text: string, extra: Partial<UtteranceResponse> = {}): UtteranceResponse {
  return {
    system_utterance: text,
    phase: "Icebreaker",
    ended: false,
    response_source: "Rule",
    plan: null,
    ...extra,
  };
}

describe("session state", () => {
  it("starts empty with input disabled", () => {
    expect(initialState.messages).toEqual([]);
    expect(inputEnabled(initialState)).toBe(false);
  });

  it("mirrors the opening utterance verbatim", () => {
    const state = sessionStarted(requestStarted(initialState), OPENING);
    expect(state.sessionId).toBe("s1");
    expect(state.phase).toBe("Icebreaker");
    expect(state.messages).toEqual([{ sender: "system", text: "Hello! How are you?" }]);
    expect(inputEnabled(state)).toBe(true);
  });

  it("appends user and system messages in order, never rewriting", () => {
    let state = sessionStarted(requestStarted(initialState), OPENING);
    const snapshots = [state.messages];
    state = utteranceSent(state, "I'm great!");
    snapshots.push(state.messages);
    state = replyReceived(state, reply("Wonderful!", { response_source: "Llm" }));
    snapshots.push(state.messages);
    state = utteranceSent(state, "yes");
    snapshots.push(state.messages);

    for (let i = 1; i < snapshots.length; i += 1) {
      expect(snapshots[i].length).toBe(snapshots[i - 1].length + 1);
      // append-only: every earlier message survives unchanged at its index
      snapshots[i - 1].forEach((message, index) => {
        expect(snapshots[i][index]).toEqual(message);
      });
    }
    expect(snapshots[3].map((m) => m.sender)).toEqual(["system", "user", "system", "user"]);
  });

  it("disables input while a request is in flight", () => {
    let state = sessionStarted(requestStarted(initialState), OPENING);
    state = utteranceSent(state, "hello");
    expect(state.busy).toBe(true);
    expect(inputEnabled(state)).toBe(false);
    state = replyReceived(state, reply("hi again"));
    expect(inputEnabled(state)).toBe(true);
  });

  it("keeps the plan and permanently disables input once ended", () => {
    let state = sessionStarted(requestStarted(initialState), OPENING);
    state = utteranceSent(state, "no questions");
    const plan = {
      spots: [
        { id: "a", name: "Kinkaku-ji", reason_source: "DesiredOverride" },
        { id: "b", name: "Ryoan-ji", reason_source: "YesAnswer" },
      ],
      rationale_text: "Because you asked.",
    };
    state = replyReceived(state, reply("Goodbye!", { ended: true, plan, phase: "PlanProposal" }));
    expect(state.ended).toBe(true);
    expect(state.plan).toEqual(plan);
    expect(inputEnabled(state)).toBe(false);
  });

  it("records errors and notices without touching messages", () => {
    let state = sessionStarted(requestStarted(initialState), OPENING);
    const before = state.messages;
    state = requestFailed(state, "cannot reach the service");
    expect(state.error).toMatch(/cannot reach/);
    expect(state.messages).toBe(before);
    state = conversationFinished(state);
    expect(state.notice).toMatch(/finished/);
    expect(state.ended).toBe(true);
  });

  it("carries the response source through untouched", () => {
    let state = sessionStarted(requestStarted(initialState), OPENING);
    state = replyReceived(state, reply("generated text", { response_source: "Llm" }));
    expect(state.messages.at(-1)).toEqual({
      sender: "system",
      text: "generated text",
      source: "Llm",
    });
  });
});
