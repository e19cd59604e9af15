// API response shapes, mirrored one-to-one from the engine's JSON.

export interface Conflict {
  conflict_id: string;
  meeting_ids: [string, string];
  overlap: [string, string];
}

export interface ConflictsResponse {
  conflicts: Conflict[];
}

export interface Suggestion {
  decision_id: string;
  suggestion_id: string;
  conflict_id: string;
  keep: string;
  reschedule: string;
  priorities: Record<string, number>;
  margin: number;
  low_confidence: boolean;
}

export interface ExplanationStatement {
  template: string;
  facts: Record<string, unknown>;
}

export interface ExplanationNode {
  level: string;
  statements: ExplanationStatement[];
  child: ExplanationNode | null;
}

export interface ExplanationResponse {
  decision_id: string;
  depth: number;
  explanation: ExplanationNode;
  rendered: string[];
}

export interface ElicitationRequest {
  request_id: string;
  situation_id: string;
  missing: string[];
  uncertainty: [string, number][];
}

export interface PendingResponse {
  pending: ElicitationRequest[];
}

export interface FeedbackResponse {
  recorded: boolean;
  verdict: string;
  refit: string[];
}

export interface AnswerResponse {
  closed: string;
  situation_id: string;
}

export interface ErrorBody {
  error_code: string;
  message: string;
  field?: string;
}

export interface FeedbackForm {
  verdict: "accept" | "reject";
  corrected_priority?: number;
  reason?: string;
}

/** One board card: a conflict joined with its suggestion. */
export interface ConflictCard {
  conflict: Conflict;
  suggestion: Suggestion;
}
