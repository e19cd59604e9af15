import { ApiClient, type FetchLike } from "../src/api.js";
import { App } from "../src/app.js";

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export type RouteValue =
  | unknown // 200 with this JSON body
  | { status: number; body: unknown }
  | Array<unknown | { status: number; body: unknown }>; // consumed in order

/**
 * Fixture-backed fetch: routes are "METHOD /path" keys mapping to
 * recorded engine responses. An array value is consumed call by call
 * (e.g. the pending queue before and after an answer). Throws on any
 * unrouted request so tests cannot silently hit the network.
 */
export function fixtureFetch(
  routes: Record<string, RouteValue>,
  calls: RecordedCall[] = [],
): FetchLike {
  const remaining = new Map<string, unknown[]>();
  for (const [key, value] of Object.entries(routes)) {
    remaining.set(key, Array.isArray(value) ? [...value] : [value]);
  }
  return async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    calls.push({
      method,
      path,
      body: init?.body ? JSON.parse(String(init.body)) : null,
    });
    const key = `${method} ${path}`;
    const queue = remaining.get(key);
    if (!queue || queue.length === 0) {
      throw new Error(`no fixture for ${key}`);
    }
    const entry = queue.length > 1 ? queue.shift() : queue[0];
    const { status, body } =
      entry !== null && typeof entry === "object" && "status" in (entry as object)
        ? (entry as { status: number; body: unknown })
        : { status: 200, body: entry };
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
}

export function failingFetch(): FetchLike {
  return async () => {
    throw new TypeError("network down");
  };
}

export function mountApp(fetchFn: FetchLike): App {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  return new App(new ApiClient("", fetchFn), root);
}

export function texts(selector: string): string[] {
  return Array.from(document.querySelectorAll(selector)).map(
    (node) => node.textContent ?? "",
  );
}
