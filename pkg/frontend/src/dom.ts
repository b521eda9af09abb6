/** Tiny DOM helpers rendering the view models; no framework. */

import type { AdaptationView, OutcomeRow, RetrievalRow, SubstituteRow, TreeRow } from "./views";

export function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = []
): HTMLElement {
  const element = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    element.setAttribute(key, value);
  }
  for (const child of children) {
    element.append(child);
  }
  return element;
}

export function renderRetrieval(
  rows: RetrievalRow[],
  onSelect: (caseId: string) => void
): HTMLElement {
  const list = el("div", { class: "retrieval" });
  for (const row of rows) {
    const button = el("button", { class: "case-row", "data-case": row.caseId }, [
      `${row.rank}. ${row.caseId}  ${row.score}`,
    ]);
    button.addEventListener("click", () => onSelect(row.caseId));
    const breakdown = el(
      "ul",
      { class: "breakdown" },
      row.breakdown.map((item) => el("li", {}, [`${item.feature}: ${item.score}`]))
    );
    list.append(el("div", { class: "case" }, [button, breakdown]));
  }
  return list;
}

export function renderSubstitutes(
  rows: SubstituteRow[],
  onApply: (candidate: string) => void
): HTMLElement {
  const list = el("div", { class: "substitutes" });
  for (const row of rows) {
    const apply = el("button", { class: "apply" }, [`${row.candidate}  ${row.score}`]);
    apply.addEventListener("click", () => onApply(row.candidate));
    const badges = el(
      "span",
      { class: "badges" },
      row.badges.map((badge) => el("em", { class: "warning-badge", title: badge }, ["!"]))
    );
    list.append(el("div", { class: "substitute" }, [apply, badges]));
  }
  return list;
}

export function renderAdaptation(view: AdaptationView): HTMLElement {
  return el("div", { class: "adaptation" }, [
    el("p", {}, [`base case: ${view.baseCase}`]),
    el(
      "ul",
      { class: "provenance" },
      view.provenance.map((line) => el("li", {}, [line]))
    ),
    el("p", {}, [
      view.residual.length
        ? `still unmet: ${view.residual.join(", ")}`
        : "all user questions are covered",
    ]),
  ]);
}

export function renderTree(
  rows: TreeRow[],
  onSelect: (path: number[]) => void
): HTMLElement {
  const container = el("div", { class: "tree" });
  for (const row of rows) {
    const node = el(
      "div",
      {
        class: `tree-node kind-${row.kind.toLowerCase()}`,
        style: `margin-left: ${row.depth}rem`,
      },
      [row.label]
    );
    node.addEventListener("click", () => onSelect(row.path));
    container.append(node);
  }
  return container;
}

export function renderOutcome(rows: OutcomeRow[], respondents: number): HTMLElement {
  return el("div", { class: "outcome" }, [
    el(
      "table",
      {},
      rows.map((row) =>
        el("tr", {}, [el("td", {}, [row.dimension]), el("td", {}, [row.mean])])
      )
    ),
    el("p", {}, [`${respondents} respondents`]),
  ]);
}
