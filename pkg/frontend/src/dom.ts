// Tiny DOM helpers. Every piece of dynamic content coming from the API
// is rendered through fact(), which tags the element with data-fact so
// the no-fabrication test can verify it verbatim against fixtures.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function fact(value: unknown, extraClass = ""): HTMLSpanElement {
  const span = el("span", { "data-fact": "", class: `fact ${extraClass}`.trim() });
  span.textContent = String(value);
  return span;
}

export function button(
  label: string,
  onClick: () => void,
  attrs: Record<string, string> = {},
): HTMLButtonElement {
  const node = el("button", attrs, [label]);
  node.addEventListener("click", onClick);
  return node;
}
