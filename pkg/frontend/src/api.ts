import type {
  AnswerResponse,
  ConflictsResponse,
  ErrorBody,
  ExplanationResponse,
  FeedbackForm,
  FeedbackResponse,
  PendingResponse,
  Suggestion,
} from "./types.js";

export class ApiError extends Error {
  /** HTTP status; 0 means the API was unreachable. */
  readonly status: number;
  readonly body: ErrorBody | null;

  constructor(status: number, body: ErrorBody | null) {
    super(body?.message ?? (status === 0 ? "API unreachable" : `HTTP ${status}`));
    this.status = status;
    this.body = body;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the engine's HTTP API. */
export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch {
      throw new ApiError(0, null);
    }
    if (!response.ok) {
      let body: ErrorBody | null = null;
      try {
        body = (await response.json()) as ErrorBody;
      } catch {
        body = null;
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  getConflicts(): Promise<ConflictsResponse> {
    return this.request("/agenda/conflicts");
  }

  getSuggestion(conflictId: string): Promise<Suggestion> {
    return this.request(`/conflicts/${encodeURIComponent(conflictId)}/suggestion`);
  }

  getExplanation(decisionId: string, depth: 1 | 2 | 3): Promise<ExplanationResponse> {
    return this.request(
      `/decisions/${encodeURIComponent(decisionId)}/explanation?depth=${depth}`,
    );
  }

  postFeedback(decisionId: string, form: FeedbackForm): Promise<FeedbackResponse> {
    return this.post(`/decisions/${encodeURIComponent(decisionId)}/feedback`, form);
  }

  getPending(): Promise<PendingResponse> {
    return this.request("/elicitation/pending");
  }

  postAnswers(requestId: string, answers: Record<string, unknown>): Promise<AnswerResponse> {
    return this.post(`/elicitation/${encodeURIComponent(requestId)}/answers`, { answers });
  }
}
