import { button, el, fact } from "./dom.js";
import type { ViewState } from "./state.js";
import type { ElicitationRequest, FeedbackForm } from "./types.js";

// Client-side mirrors of the engine's bounds; invalid input never leaves
// the browser.
export const PRIORITY_RANGE: [number, number] = [1, 7];
export const PROFILE_RANGE: [number, number] = [1, 6];
export const ORDINAL_RANGE: [number, number] = [1, 7];

const ROLES = [
  "friend", "family", "colleague", "supervisor", "subordinate",
  "client", "romantic_partner", "acquaintance", "stranger",
];
const HIERARCHIES = ["higher", "equal", "lower"];

export function validateFeedback(form: FeedbackForm): string | null {
  if (form.corrected_priority !== undefined) {
    const [lo, hi] = PRIORITY_RANGE;
    if (Number.isNaN(form.corrected_priority) || form.corrected_priority < lo || form.corrected_priority > hi) {
      return `corrected priority must be between ${lo} and ${hi}`;
    }
  }
  if (form.verdict === "reject" && form.corrected_priority === undefined && !form.reason) {
    return "a rejection needs a corrected priority or a reason";
  }
  return null;
}

function fieldKind(path: string): "role" | "hierarchy" | "ordinal" | "years" | "dimension" {
  if (path.endsWith(".role")) return "role";
  if (path.endsWith(".hierarchy")) return "hierarchy";
  if (path.endsWith(".contact_frequency") || path.endsWith(".relationship_quality")) {
    return "ordinal";
  }
  if (path.endsWith(".years_known")) return "years";
  return "dimension";
}

export function validateAnswer(path: string, raw: string): string | null {
  const kind = fieldKind(path);
  if (kind === "role" || kind === "hierarchy") return null; // selects constrain input
  const value = Number(raw);
  if (Number.isNaN(value)) return `${path}: not a number`;
  if (kind === "ordinal") {
    const [lo, hi] = ORDINAL_RANGE;
    if (!Number.isInteger(value) || value < lo || value > hi) {
      return `${path}: must be an integer between ${lo} and ${hi}`;
    }
  }
  if (kind === "years" && value < 0) return `${path}: must be at least 0`;
  if (kind === "dimension") {
    const [lo, hi] = PROFILE_RANGE;
    if (value < lo || value > hi) return `${path}: must be between ${lo} and ${hi}`;
  }
  return null;
}

export function coerceAnswer(path: string, raw: string): unknown {
  const kind = fieldKind(path);
  if (kind === "role" || kind === "hierarchy") return raw;
  const value = Number(raw);
  return kind === "ordinal" ? Math.trunc(value) : value;
}

export interface FeedbackHandlers {
  onSubmit: (form: FeedbackForm) => void;
  onCancel: () => void;
}

export function renderFeedbackDialog(state: ViewState, handlers: FeedbackHandlers): HTMLElement {
  const root = el("div", { id: "feedback-dialog" });
  const { feedback } = state;
  if (feedback.decisionId === null) {
    root.setAttribute("data-open", "false");
    return root;
  }
  root.setAttribute("data-open", "true");
  const verdict = el("select", { id: "fb-verdict" }, [
    el("option", { value: "accept" }, ["accept"]),
    el("option", { value: "reject" }, ["reject"]),
  ]);
  const priority = el("input", {
    id: "fb-priority",
    type: "number",
    min: String(PRIORITY_RANGE[0]),
    max: String(PRIORITY_RANGE[1]),
    step: "0.1",
    placeholder: "corrected priority (1-7)",
  });
  const reason = el("input", { id: "fb-reason", type: "text", placeholder: "reason" });
  const error = el("p", { class: "field-error", id: "fb-error" }, [
    feedback.fieldError ?? "",
  ]);
  if (!feedback.fieldError) error.setAttribute("hidden", "");
  const submit = button(
    "Submit feedback",
    () => {
      const form: FeedbackForm = {
        verdict: (verdict as HTMLSelectElement).value as FeedbackForm["verdict"],
      };
      const rawPriority = (priority as HTMLInputElement).value.trim();
      if (rawPriority !== "") form.corrected_priority = Number(rawPriority);
      const rawReason = (reason as HTMLInputElement).value.trim();
      if (rawReason !== "") form.reason = rawReason;
      handlers.onSubmit(form);
    },
    { "data-action": "submit-feedback", ...(state.mutationPending ? { disabled: "" } : {}) },
  );
  root.append(
    el("header", {}, ["Feedback on ", fact(feedback.decisionId, "decision-id")]),
    verdict,
    priority,
    reason,
    error,
    submit,
    button("Cancel", handlers.onCancel, { "data-action": "cancel-feedback" }),
  );
  return root;
}

export interface QueueHandlers {
  onAnswer: (request: ElicitationRequest, answers: Record<string, unknown>) => void;
}

function renderField(path: string): HTMLElement {
  const kind = fieldKind(path);
  const label = el("label", {}, [fact(path, "field-path")]);
  if (kind === "role" || kind === "hierarchy") {
    const options = (kind === "role" ? ROLES : HIERARCHIES).map((v) =>
      el("option", { value: v }, [v]),
    );
    label.append(
      el("select", { "data-answer": path }, [el("option", { value: "" }, ["—"]), ...options]),
    );
  } else {
    label.append(el("input", { "data-answer": path, type: "number" }));
  }
  return label;
}

export function renderQueue(state: ViewState, handlers: QueueHandlers): HTMLElement {
  const root = el("div", { id: "queue" });
  root.append(el("h2", {}, ["Questions from your agent"]));
  if (state.queue.length === 0) {
    root.append(el("p", { class: "empty-state" }, ["No open questions."]));
    return root;
  }
  for (const request of state.queue) {
    const closed = state.closedRequests.includes(request.request_id);
    const form = el("form", {
      class: "elicitation",
      "data-request": request.request_id,
      ...(closed ? { "data-closed": "true" } : {}),
    });
    form.append(
      el("p", {}, [
        "About situation ",
        fact(request.situation_id, "situation-id"),
        closed ? el("span", { class: "badge" }, [" (already answered)"]) : "",
      ]),
    );
    for (const path of request.missing) {
      form.append(renderField(path));
    }
    for (const [dimension, value] of request.uncertainty) {
      form.append(
        el("p", { class: "uncertainty" }, [
          "Unsure about ",
          fact(dimension, "dimension"),
          " (spread ",
          fact(value, "uncertainty"),
          ")",
        ]),
        renderField(dimension),
      );
    }
    const errorText = state.queueErrors[request.request_id];
    const error = el("p", { class: "field-error" }, [errorText ?? ""]);
    if (!errorText) error.setAttribute("hidden", "");
    form.append(error);
    const submit = button(
      "Answer",
      () => {
        const answers: Record<string, unknown> = {};
        form.querySelectorAll<HTMLInputElement | HTMLSelectElement>("[data-answer]").forEach(
          (input) => {
            const raw = input.value.trim();
            if (raw !== "") answers[input.getAttribute("data-answer")!] = raw;
          },
        );
        handlers.onAnswer(request, answers);
      },
      {
        "data-action": "answer",
        ...(closed || state.mutationPending ? { disabled: "" } : {}),
      },
    );
    form.append(submit);
    form.addEventListener("submit", (event) => event.preventDefault());
    root.append(form);
  }
  return root;
}
