// DOM rendering. Message bubbles are appended in state order and never
// reordered or rewritten; the plan card appears once the dialogue ends.

import type { UiSessionState } from "./state";
import { inputEnabled } from "./state";

export interface UiRefs {
  messages: HTMLElement;
  phase: HTMLElement;
  banner: HTMLElement;
  notice: HTMLElement;
  planCard: HTMLElement;
  input: HTMLInputElement;
  sendButton: HTMLButtonElement;
  startForm: HTMLElement;
  chatForm: HTMLElement;
}

export function render(state: UiSessionState, refs: UiRefs): void {
  const existing = refs.messages.children.length;
  for (let index = existing; index < state.messages.length; index += 1) {
    const message = state.messages[index];
    const bubble = document.createElement("div");
    bubble.className = `msg ${message.sender}`;
    bubble.dataset.index = String(index);
    const text = document.createElement("span");
    text.textContent = message.text;
    bubble.appendChild(text);
    if (message.sender === "system" && message.source === "Llm") {
      const badge = document.createElement("span");
      badge.className = "badge llm";
      badge.textContent = "AI-generated";
      bubble.appendChild(badge);
    } else if (message.sender === "system" && message.source === "Rule") {
      const badge = document.createElement("span");
      badge.className = "badge rule";
      badge.textContent = "Scripted";
      bubble.appendChild(badge);
    }
    refs.messages.appendChild(bubble);
  }

  refs.phase.textContent = state.phase ?? "";
  refs.banner.textContent = state.error ?? "";
  refs.banner.hidden = state.error === null;
  refs.notice.textContent = state.notice ?? "";
  refs.notice.hidden = state.notice === null;

  refs.startForm.hidden = state.sessionId !== null;
  refs.chatForm.hidden = state.sessionId === null;

  const enabled = inputEnabled(state);
  refs.input.disabled = !enabled;
  refs.sendButton.disabled = !enabled;

  renderPlanCard(state, refs.planCard);
}

function renderPlanCard(state: UiSessionState, card: HTMLElement): void {
  if (!state.ended || state.plan === null) {
    card.hidden = true;
    return;
  }
  if (card.dataset.rendered === "true") {
    return; // plan is final; render once
  }
  card.hidden = false;
  card.dataset.rendered = "true";
  card.replaceChildren();

  const heading = document.createElement("h2");
  heading.textContent = "Your sightseeing plan";
  card.appendChild(heading);

  const list = document.createElement("ol");
  list.className = "plan-spots";
  for (const spot of state.plan.spots) {
    const item = document.createElement("li");
    item.textContent = spot.name;
    item.dataset.spotId = spot.id;
    list.appendChild(item);
  }
  card.appendChild(list);

  const rationale = document.createElement("p");
  rationale.className = "plan-rationale";
  rationale.textContent = state.plan.rationale_text;
  card.appendChild(rationale);
}

export function collectRefs(root: Document | HTMLElement): UiRefs {
  const get = <T extends HTMLElement>(id: string): T => {
    const node = root.querySelector<T>(`#${id}`);
    if (!node) {
      throw new Error(`missing #${id} in the page`);
    }
    return node;
  };
  return {
    messages: get("messages"),
    phase: get("phase"),
    banner: get("banner"),
    notice: get("notice"),
    planCard: get("plan-card"),
    input: get<HTMLInputElement>("utterance-input"),
    sendButton: get<HTMLButtonElement>("send-button"),
    startForm: get("start-form"),
    chatForm: get("chat-form"),
  };
}
