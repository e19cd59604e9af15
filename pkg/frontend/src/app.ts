import { ApiClient, ApiError } from "./api.js";
import { renderBoard } from "./board.js";
import { el } from "./dom.js";
import { renderDrawer } from "./drawer.js";
import { coerceAnswer, renderFeedbackDialog, renderQueue, validateAnswer, validateFeedback } from "./forms.js";
import { Store } from "./state.js";
import type { ConflictCard, ElicitationRequest, FeedbackForm } from "./types.js";

/**
 * Controller: the only place that talks to the API and mutates view
 * state. Rendering is a pure function of the store; every displayed fact
 * comes from an API response (the UI never computes engine facts).
 */
export class App {
  readonly store = new Store();

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {
    this.store.subscribe(() => this.render());
    this.render();
  }

  // ------------------------------------------------------------------
  // Conflict board
  // ------------------------------------------------------------------

  async loadBoard(): Promise<void> {
    this.store.update({ board: { status: "loading", cards: [], error: null } });
    try {
      const { conflicts } = await this.api.getConflicts();
      const cards: ConflictCard[] = [];
      for (const conflict of conflicts) {
        const suggestion = await this.api.getSuggestion(conflict.conflict_id);
        cards.push({ conflict, suggestion });
      }
      this.store.update({
        board: { status: cards.length ? "ready" : "empty", cards, error: null },
      });
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        this.store.update({ board: { status: "empty", cards: [], error: null } });
        return;
      }
      this.store.update({
        board: { status: "error", cards: [], error: "The agent API is unreachable." },
      });
    }
  }

  async loadQueue(): Promise<void> {
    try {
      const { pending } = await this.api.getPending();
      this.store.update({ queue: pending });
    } catch {
      this.store.update({ queue: [] });
    }
  }

  // ------------------------------------------------------------------
  // Explanation drawer (progressive disclosure, depth 1 -> 3)
  // ------------------------------------------------------------------

  async openExplanation(decisionId: string): Promise<void> {
    await this.fetchExplanation(decisionId, 1, []);
  }

  async expandExplanation(): Promise<void> {
    const { drawer } = this.store.get();
    if (drawer.decisionId === null || drawer.depth >= 3) return;
    await this.fetchExplanation(
      drawer.decisionId,
      (drawer.depth + 1) as 2 | 3,
      drawer.lines,
    );
  }

  private async fetchExplanation(
    decisionId: string,
    depth: 1 | 2 | 3,
    priorLines: string[],
  ): Promise<void> {
    try {
      const response = await this.api.getExplanation(decisionId, depth);
      // deeper responses extend shallower ones; keep what the user read
      // and append only the new suffix
      const lines = [...priorLines, ...response.rendered.slice(priorLines.length)];
      this.store.update({ drawer: { decisionId, depth, lines, notice: null } });
    } catch (error) {
      const notice =
        error instanceof ApiError && error.status === 404
          ? "That decision no longer exists."
          : "Could not load the explanation.";
      this.store.update({ drawer: { decisionId: null, depth: 0, lines: [], notice } });
    }
  }

  closeDrawer(): void {
    this.store.update({ drawer: { decisionId: null, depth: 0, lines: [], notice: null } });
  }

  // ------------------------------------------------------------------
  // Feedback
  // ------------------------------------------------------------------

  openFeedback(decisionId: string): void {
    this.store.update({ feedback: { decisionId, fieldError: null, submitted: false } });
  }

  closeFeedback(): void {
    this.store.update({ feedback: { decisionId: null, fieldError: null, submitted: false } });
  }

  async submitFeedback(form: FeedbackForm): Promise<void> {
    const state = this.store.get();
    const decisionId = state.feedback.decisionId;
    if (decisionId === null || state.mutationPending) return;
    const clientError = validateFeedback(form);
    if (clientError) {
      this.store.update({ feedback: { ...state.feedback, fieldError: clientError } });
      return;
    }
    this.store.update({ mutationPending: true });
    try {
      await this.api.postFeedback(decisionId, form);
      this.store.update({
        mutationPending: false,
        feedback: { decisionId: null, fieldError: null, submitted: true },
      });
      // refresh so the user sees the retrained predictions
      await this.loadBoard();
      await this.loadQueue();
    } catch (error) {
      const message =
        error instanceof ApiError && error.status === 400 && error.body
          ? error.body.message
          : "Feedback could not be recorded.";
      this.store.update({
        mutationPending: false,
        feedback: { decisionId, fieldError: message, submitted: false },
      });
    }
  }

  // ------------------------------------------------------------------
  // Elicitation queue
  // ------------------------------------------------------------------

  async answerElicitation(
    request: ElicitationRequest,
    rawAnswers: Record<string, unknown>,
  ): Promise<void> {
    const state = this.store.get();
    if (state.mutationPending || state.closedRequests.includes(request.request_id)) return;
    const entries = Object.entries(rawAnswers);
    if (entries.length === 0) {
      this.store.update({
        queueErrors: { ...state.queueErrors, [request.request_id]: "fill in at least one field" },
      });
      return;
    }
    const answers: Record<string, unknown> = {};
    for (const [path, raw] of entries) {
      const problem = validateAnswer(path, String(raw));
      if (problem) {
        this.store.update({
          queueErrors: { ...state.queueErrors, [request.request_id]: problem },
        });
        return;
      }
      answers[path] = coerceAnswer(path, String(raw));
    }
    this.store.update({ mutationPending: true });
    try {
      await this.api.postAnswers(request.request_id, answers);
      this.store.update({ mutationPending: false, queueErrors: {} });
      await this.loadQueue();
      await this.loadBoard();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.store.update({
          mutationPending: false,
          closedRequests: [...state.closedRequests, request.request_id],
        });
        return;
      }
      const message =
        error instanceof ApiError && error.body ? error.body.message : "Answer failed.";
      this.store.update({
        mutationPending: false,
        queueErrors: { ...state.queueErrors, [request.request_id]: message },
      });
    }
  }

  // ------------------------------------------------------------------
  // Rendering
  // ------------------------------------------------------------------

  private render(): void {
    const state = this.store.get();
    this.root.replaceChildren(
      el("h1", {}, ["Agenda assistant"]),
      renderBoard(state, {
        onRetry: () => void this.loadBoard(),
        onExplain: (id) => void this.openExplanation(id),
        onFeedback: (id) => this.openFeedback(id),
      }),
      renderDrawer(state, {
        onExpand: () => void this.expandExplanation(),
        onClose: () => this.closeDrawer(),
      }),
      renderFeedbackDialog(state, {
        onSubmit: (form) => void this.submitFeedback(form),
        onCancel: () => this.closeFeedback(),
      }),
      renderQueue(state, {
        onAnswer: (request, answers) => void this.answerElicitation(request, answers),
      }),
    );
  }
}

export function mount(rootId = "app", baseUrl = ""): App {
  const root = document.getElementById(rootId);
  if (!root) throw new Error(`no #${rootId} element`);
  const app = new App(new ApiClient(baseUrl), root);
  void app.loadBoard();
  void app.loadQueue();
  return app;
}
