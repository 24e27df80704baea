import { ApiError, TourbotClient } from "./api";
import {
  conversationFinished,
  initialState,
  replyReceived,
  requestFailed,
  requestStarted,
  sessionStarted,
  utteranceSent,
} from "./state";
import type { UiSessionState } from "./state";
import { collectRefs, render } from "./ui";

const API_BASE: string =
  (import.meta.env && import.meta.env.VITE_API_BASE) || "http://127.0.0.1:8723";

const client = new TourbotClient(API_BASE);
const refs = collectRefs(document);
let state: UiSessionState = initialState;

function update(next: UiSessionState): void {
  state = next;
  render(state, refs);
  refs.messages.scrollTop = refs.messages.scrollHeight;
}

const ageInput = document.querySelector<HTMLInputElement>("#age-input")!;
const ageError = document.querySelector<HTMLElement>("#age-error")!;
const startButton = document.querySelector<HTMLButtonElement>("#start-button")!;

async function startSession(): Promise<void> {
  const raw = ageInput.value.trim();
  const age = Number(raw);
  if (raw === "" || !Number.isInteger(age) || age < 0) {
    ageError.hidden = false; // inline validation, no request sent
    return;
  }
  ageError.hidden = true;
  startButton.disabled = true;
  update(requestStarted(state));
  try {
    const response = await client.createSession(age);
    update(sessionStarted(state, response));
    refs.input.focus();
  } catch (err) {
    update(requestFailed(state, err instanceof Error ? err.message : String(err)));
  } finally {
    startButton.disabled = false;
  }
}

async function sendUtterance(): Promise<void> {
  const text = refs.input.value.trim();
  if (!text || state.busy || state.ended || state.sessionId === null) {
    return;
  }
  refs.input.value = "";
  update(utteranceSent(state, text));
  try {
    const response = await client.sendUtterance(state.sessionId, text);
    update(replyReceived(state, response));
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      update(conversationFinished(state));
    } else {
      update(requestFailed(state, err instanceof Error ? err.message : String(err)));
    }
  }
  if (!state.ended) {
    refs.input.focus();
  }
}

startButton.addEventListener("click", () => void startSession());
ageInput.addEventListener("keydown", (event) => {
  if (event.key === "Enter") {
    event.preventDefault();
    void startSession();
  }
});
refs.sendButton.addEventListener("click", () => void sendUtterance());
refs.input.addEventListener("keydown", (event) => {
  if (event.key === "Enter" && !event.shiftKey) {
    event.preventDefault();
    void sendUtterance();
  }
});

render(state, refs);
