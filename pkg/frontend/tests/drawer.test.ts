import { beforeEach, describe, expect, it } from "vitest";

import conflictsFx from "../fixtures/conflicts.json";
import suggestionFx from "../fixtures/suggestion.json";
import depth1Fx from "../fixtures/explanation_depth1.json";
import depth2Fx from "../fixtures/explanation_depth2.json";
import depth3Fx from "../fixtures/explanation_depth3.json";
import notFoundFx from "../fixtures/explanation_404.json";

import { fixtureFetch, mountApp, texts } from "./helpers.js";

const DECISION = suggestionFx.decision_id;
const CID = conflictsFx.conflicts[0].conflict_id;

function appWithExplanations() {
  return mountApp(
    fixtureFetch({
      "GET /agenda/conflicts": conflictsFx,
      [`GET /conflicts/${CID}/suggestion`]: suggestionFx,
      [`GET /decisions/${DECISION}/explanation?depth=1`]: depth1Fx,
      [`GET /decisions/${DECISION}/explanation?depth=2`]: depth2Fx,
      [`GET /decisions/${DECISION}/explanation?depth=3`]: depth3Fx,
      "GET /decisions/ghost/explanation?depth=1": { status: 404, body: notFoundFx },
    }),
  );
}

describe("explanation drawer", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("opens at depth 1 with the decision-level sentence only", async () => {
    const app = appWithExplanations();
    await app.openExplanation(DECISION);
    expect(document.querySelector("#drawer")!.getAttribute("data-open")).toBe("true");
    expect(texts(".explanation-line")).toEqual(depth1Fx.rendered);
  });

  it("each expansion strictly appends; prior content is unchanged", async () => {
    const app = appWithExplanations();
    await app.openExplanation(DECISION);
    const afterOpen = texts(".explanation-line");

    await app.expandExplanation();
    const afterSecond = texts(".explanation-line");
    expect(afterSecond.slice(0, afterOpen.length)).toEqual(afterOpen);
    expect(afterSecond.length).toBeGreaterThan(afterOpen.length);
    expect(afterSecond).toEqual(depth2Fx.rendered);

    await app.expandExplanation();
    const afterThird = texts(".explanation-line");
    expect(afterThird.slice(0, afterSecond.length)).toEqual(afterSecond);
    expect(afterThird).toEqual(depth3Fx.rendered);
  });

  it("hides the expand control at full depth", async () => {
    const app = appWithExplanations();
    await app.openExplanation(DECISION);
    expect(document.querySelector('[data-action="expand"]')).not.toBeNull();
    await app.expandExplanation();
    await app.expandExplanation();
    expect(document.querySelector('[data-action="expand"]')).toBeNull();
    await app.expandExplanation(); // no-op at depth 3
    expect(texts(".explanation-line")).toEqual(depth3Fx.rendered);
  });

  it("closes with a notice when the decision is unknown", async () => {
    const app = appWithExplanations();
    await app.openExplanation("ghost");
    const drawer = document.querySelector("#drawer")!;
    expect(drawer.getAttribute("data-open")).toBe("false");
    expect(document.querySelector(".banner-notice")!.textContent).toContain(
      "no longer exists",
    );
  });

  it("close button resets the drawer", async () => {
    const app = appWithExplanations();
    await app.openExplanation(DECISION);
    (document.querySelector('[data-action="close-drawer"]') as HTMLButtonElement).click();
    expect(document.querySelector("#drawer")!.getAttribute("data-open")).toBe("false");
  });
});
