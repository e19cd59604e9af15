import type { ConflictCard, ElicitationRequest } from "./types.js";

export type BoardStatus = "loading" | "ready" | "empty" | "error";

export interface DrawerState {
  decisionId: string | null;
  depth: 0 | 1 | 2 | 3;
  /** Rendered lines shown so far; deeper levels only ever append. */
  lines: string[];
  notice: string | null;
}

export interface FeedbackDialogState {
  decisionId: string | null;
  fieldError: string | null;
  submitted: boolean;
}

export interface ViewState {
  board: { status: BoardStatus; cards: ConflictCard[]; error: string | null };
  queue: ElicitationRequest[];
  closedRequests: string[];
  queueErrors: Record<string, string>;
  drawer: DrawerState;
  feedback: FeedbackDialogState;
  /** True while a mutation is in flight; all mutations are disabled. */
  mutationPending: boolean;
}

export function initialState(): ViewState {
  return {
    board: { status: "loading", cards: [], error: null },
    queue: [],
    closedRequests: [],
    queueErrors: {},
    drawer: { decisionId: null, depth: 0, lines: [], notice: null },
    feedback: { decisionId: null, fieldError: null, submitted: false },
    mutationPending: false,
  };
}

type Listener = (state: ViewState) => void;

/** Minimal observable store; the UI holds no state outside of it. */
export class Store {
  private state: ViewState = initialState();
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}
