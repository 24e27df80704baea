// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from "vitest";

import type { UtteranceResponse } from "../src/api";
import { TourbotClient } from "../src/api";
import {
  initialState,
  replyReceived,
  requestStarted,
  sessionStarted,
  utteranceSent,
} from "../src/state";
import type { UiSessionState } from "../src/state";
import { collectRefs, render } from "../src/ui";

const PAGE = `
<span id="phase"></span>
<div id="banner" hidden></div>
<div id="notice" hidden></div>
<div id="messages"></div>
<div id="plan-card" hidden></div>
<div id="start-form"><input id="age-input"></div>
<div id="chat-form" hidden>
  <input id="utterance-input">
  <button id="send-button"></button>
</div>
`;

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

const PLAN = {
  spots: [
    { id: "kinkakuji", name: "Kinkaku-ji", reason_source: "DesiredOverride" },
    { id: "ryoanji", name: "Ryoan-ji", reason_source: "YesAnswer" },
  ],
  rationale_text: "You said you wanted the Golden Pavilion.",
};

describe("chat rendering", () => {
  beforeEach(() => {
    document.body.innerHTML = PAGE;
  });

  it("renders messages append-only and in server order", () => {
    const refs = collectRefs(document);
    let state = sessionStarted(requestStarted(initialState), {
      session_id: "s1",
      system_utterance: "Welcome!",
      phase: "Icebreaker",
    });
    render(state, refs);
    const first = refs.messages.children[0];

    state = utteranceSent(state, "hello there");
    render(state, refs);
    state = replyReceived(state, reply("How are you?", { response_source: "Llm" }));
    render(state, refs);

    const bubbles = Array.from(refs.messages.children);
    expect(bubbles).toHaveLength(3);
    expect(bubbles[0]).toBe(first); // earlier nodes untouched
    expect(bubbles.map((b) => b.className)).toEqual([
      "msg system",
      "msg user",
      "msg system",
    ]);
    expect(bubbles.map((b) => b.querySelector("span")!.textContent)).toEqual([
      "Welcome!",
      "hello there",
      "How are you?",
    ]);
    expect(bubbles.map((b) => (b as HTMLElement).dataset.index)).toEqual(["0", "1", "2"]);
  });

  it("marks LLM-sourced replies with an AI badge", () => {
    const refs = collectRefs(document);
    let state = sessionStarted(requestStarted(initialState), {
      session_id: "s1",
      system_utterance: "Welcome!",
      phase: "Icebreaker",
    });
    state = replyReceived(state, reply("free-form text", { response_source: "Llm" }));
    state = replyReceived(state, reply("scripted text", { response_source: "Rule" }));
    render(state, refs);
    const badges = Array.from(refs.messages.querySelectorAll(".badge")).map(
      (b) => b.textContent,
    );
    expect(badges).toContain("AI-generated");
    const llmBubble = refs.messages.children[1];
    expect(llmBubble.querySelector(".badge.llm")!.textContent).toBe("AI-generated");
  });

  it("shows the plan card with exactly two spots when ended", () => {
    const refs = collectRefs(document);
    let state = sessionStarted(requestStarted(initialState), {
      session_id: "s1",
      system_utterance: "Welcome!",
      phase: "Icebreaker",
    });
    state = replyReceived(
      state,
      reply("Goodbye!", { ended: true, plan: PLAN, phase: "PlanProposal" }),
    );
    render(state, refs);

    expect(refs.planCard.hidden).toBe(false);
    const items = Array.from(refs.planCard.querySelectorAll("li"));
    expect(items).toHaveLength(2);
    expect(items.map((i) => i.textContent)).toEqual(["Kinkaku-ji", "Ryoan-ji"]);
    expect(refs.planCard.textContent).toContain(PLAN.rationale_text);
    expect(refs.input.disabled).toBe(true);
    expect(refs.sendButton.disabled).toBe(true);

    render(state, refs); // re-render keeps a single card
    expect(refs.planCard.querySelectorAll("ol")).toHaveLength(1);
  });

  it("disables input while busy and shows error banners", () => {
    const refs = collectRefs(document);
    let state: UiSessionState = sessionStarted(requestStarted(initialState), {
      session_id: "s1",
      system_utterance: "Welcome!",
      phase: "Icebreaker",
    });
    state = utteranceSent(state, "hi");
    render(state, refs);
    expect(refs.input.disabled).toBe(true);
    state = { ...state, busy: false, error: "cannot reach the service" };
    render(state, refs);
    expect(refs.banner.hidden).toBe(false);
    expect(refs.banner.textContent).toMatch(/cannot reach/);
    expect(refs.input.disabled).toBe(false);
  });

  it("keeps every rendered text identical to the stubbed server payload", async () => {
    // zero dialogue logic: a full scripted exchange driven through the
    // client; nothing on screen differs from what the stub returned.
    const script: UtteranceResponse[] = [
      reply("Second question?"),
      reply("Third question?", { response_source: "Llm" }),
      reply("Farewell!", { ended: true, plan: PLAN, phase: "PlanProposal" }),
    ];
    let call = 0;
    const fetchImpl = vi.fn(async (url: string) => {
      const body = url.endsWith("/sessions")
        ? { session_id: "s1", system_utterance: "First question?", phase: "Icebreaker" }
        : script[call++];
      return new Response(JSON.stringify(body), { status: url.endsWith("/sessions") ? 201 : 200 });
    });
    const client = new TourbotClient("http://stub", fetchImpl);
    const refs = collectRefs(document);

    let state = sessionStarted(requestStarted(initialState), await client.createSession(30));
    render(state, refs);
    for (const text of ["answer one", "answer two", "answer three"]) {
      state = utteranceSent(state, text);
      render(state, refs);
      state = replyReceived(state, await client.sendUtterance("s1", text));
      render(state, refs);
    }

    const rendered = Array.from(refs.messages.children).map(
      (b) => b.querySelector("span")!.textContent,
    );
    expect(rendered).toEqual([
      "First question?",
      "answer one",
      "Second question?",
      "answer two",
      "Third question?",
      "answer three",
      "Farewell!",
    ]);
    expect(refs.planCard.querySelectorAll("li")).toHaveLength(2);
  });
});
