// Typed client for the dialogue service. The UI performs no dialogue
// logic of its own: everything rendered comes straight from these
// responses.

export interface CreateSessionResponse {
  session_id: string;
  system_utterance: string;
  phase: string;
}

export interface PlanSpot {
  id: string;
  name: string;
  reason_source: string;
}

export interface PlanData {
  spots: PlanSpot[];
  rationale_text: string;
}

export interface UtteranceResponse {
  system_utterance: string;
  phase: string;
  ended: boolean;
  response_source: "Rule" | "Llm";
  plan: PlanData | null;
}

export interface SessionSnapshot {
  phase: string;
  turn_count: number;
  introduced_spots: string[];
  theme: string | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class TourbotClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, `cannot reach the service: ${String(err)}`);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON error bodies keep the status-derived message below
    }
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  createSession(age: number, name?: string): Promise<CreateSessionResponse> {
    return this.request<CreateSessionResponse>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(name ? { age, name } : { age }),
    });
  }

  sendUtterance(sessionId: string, text: string): Promise<UtteranceResponse> {
    return this.request<UtteranceResponse>(
      `/sessions/${encodeURIComponent(sessionId)}/utterance`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text }),
      },
    );
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>(`/sessions/${encodeURIComponent(sessionId)}`);
  }
}
