import { button, el, fact } from "./dom.js";
import type { ViewState } from "./state.js";

export interface DrawerHandlers {
  onExpand: () => void;
  onClose: () => void;
}

/**
 * Explanation drawer. Depth only ever grows (1 -> 2 -> 3) and rendered
 * lines strictly append, mirroring the engine's prefix guarantee, so
 * drilling down never rewrites what the user already read.
 */
export function renderDrawer(state: ViewState, handlers: DrawerHandlers): HTMLElement {
  const root = el("aside", { id: "drawer" });
  const { drawer } = state;
  if (drawer.notice) {
    root.append(el("div", { class: "banner banner-notice" }, [drawer.notice]));
  }
  if (drawer.decisionId === null) {
    root.setAttribute("data-open", "false");
    return root;
  }
  root.setAttribute("data-open", "true");
  root.append(
    el("header", {}, [
      el("span", {}, ["Why this suggestion? "]),
      fact(drawer.decisionId, "decision-id"),
      button("Close", handlers.onClose, { "data-action": "close-drawer" }),
    ]),
  );
  const list = el("ol", { class: "explanation-lines" });
  for (const line of drawer.lines) {
    list.append(el("li", { class: "explanation-line" }, [fact(line, "line")]));
  }
  root.append(list);
  if (drawer.depth < 3) {
    root.append(button("More detail", handlers.onExpand, { "data-action": "expand" }));
  }
  return root;
}
