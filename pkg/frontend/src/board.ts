import { button, el, fact } from "./dom.js";
import type { ViewState } from "./state.js";
import type { ConflictCard } from "./types.js";

export interface BoardHandlers {
  onRetry: () => void;
  onExplain: (decisionId: string) => void;
  onFeedback: (decisionId: string) => void;
}

function renderCard(card: ConflictCard, state: ViewState, handlers: BoardHandlers): HTMLElement {
  const { suggestion } = card;
  const keepPriority = suggestion.priorities[suggestion.keep];
  const reschedulePriority = suggestion.priorities[suggestion.reschedule];
  const header = el("div", { class: "card-header" }, [
    el("span", {}, ["Conflict "]),
    fact(card.conflict.conflict_id, "conflict-id"),
  ]);
  if (suggestion.low_confidence) {
    header.append(
      el("span", { class: "badge badge-low-confidence", title: "small priority margin" }, [
        "low confidence",
      ]),
    );
  }
  const body = el("div", { class: "card-body" }, [
    el("div", { class: "keep-line" }, [
      "Keep ",
      fact(suggestion.keep, "keep"),
      " (priority ",
      fact(keepPriority, "keep-priority"),
      ")",
    ]),
    el("div", { class: "reschedule-line" }, [
      "Reschedule ",
      fact(suggestion.reschedule, "reschedule"),
      " (priority ",
      fact(reschedulePriority, "reschedule-priority"),
      ")",
    ]),
  ]);
  const actions = el("div", { class: "card-actions" }, [
    button("Explain", () => handlers.onExplain(suggestion.decision_id), {
      "data-action": "explain",
    }),
    button("Give feedback", () => handlers.onFeedback(suggestion.decision_id), {
      "data-action": "feedback",
      ...(state.mutationPending ? { disabled: "" } : {}),
    }),
  ]);
  return el("section", { class: "card", "data-conflict": card.conflict.conflict_id }, [
    header,
    body,
    actions,
  ]);
}

export function renderBoard(state: ViewState, handlers: BoardHandlers): HTMLElement {
  const root = el("div", { id: "board" });
  const { board } = state;
  if (board.status === "loading") {
    root.append(el("p", { class: "loading" }, ["Loading conflicts…"]));
    return root;
  }
  if (board.status === "error") {
    const banner = el("div", { class: "banner banner-error", role: "alert" }, [
      el("span", {}, [board.error ?? "The agent API is unreachable."]),
      button("Retry", handlers.onRetry, { "data-action": "retry" }),
    ]);
    root.append(banner);
    return root;
  }
  if (board.status === "empty" || board.cards.length === 0) {
    root.append(el("p", { class: "empty-state" }, ["No overlapping meetings — nothing to resolve."]));
    return root;
  }
  for (const card of board.cards) {
    root.append(renderCard(card, state, handlers));
  }
  return root;
}
