/** View models: pure projections of service payloads into display rows.
 *
 * Numbers pass through verbatim (formatted, never recomputed), which is
 * what keeps the cockpit a thin client over the engine.
 */

import type {
  AdaptationPayload,
  OutcomePayload,
  RankedCase,
  RetrievalPayload,
  SubstitutionPayload,
  SubtreeSubstitutionPayload,
  TreeNode,
} from "./types";

export function formatScore(value: number): string {
  return value.toFixed(4);
}

export interface RetrievalRow {
  rank: number;
  caseId: string;
  score: string;
  breakdown: { feature: string; score: string }[];
}

export function retrievalView(payload: RetrievalPayload): RetrievalRow[] {
  return payload.ranked.map((entry: RankedCase, index: number) => ({
    rank: index + 1,
    caseId: entry.case_id,
    score: formatScore(entry.score),
    breakdown: Object.entries(entry.local_scores)
      .sort(([a], [b]) => (a < b ? -1 : 1))
      .map(([feature, score]) => ({ feature, score: formatScore(score) })),
  }));
}

export interface SubstituteRow {
  caseId?: string;
  candidate: string;
  score: string;
  badges: string[];
}

export function substitutionView(payload: SubstitutionPayload): SubstituteRow[] {
  return payload.ranked.map((entry) => ({
    candidate: entry.candidate_id,
    score: formatScore(entry.score),
    badges: entry.applicability ? entry.applicability.warnings.map((w) => w.detail) : [],
  }));
}

export function subtreeSubstitutionView(
  payload: SubtreeSubstitutionPayload
): SubstituteRow[] {
  return payload.ranked.map((entry) => ({
    caseId: entry.origin_case,
    candidate: entry.question,
    score: formatScore(entry.score),
    badges: [],
  }));
}

export interface AdaptationView {
  baseCase: string;
  unmet: string[];
  provenance: string[];
  residual: string[];
}

export function adaptationView(payload: AdaptationPayload): AdaptationView {
  return {
    baseCase: payload.base_case,
    unmet: payload.unmet,
    provenance: payload.matches.map((match) => match.provenance),
    residual: payload.residual_unmet,
  };
}

export interface OutcomeRow {
  dimension: string;
  mean: string;
}

export function outcomeView(payload: OutcomePayload): {
  rows: OutcomeRow[];
  respondents: number;
} {
  return {
    rows: Object.entries(payload.dimension_means)
      .sort(([a], [b]) => (a < b ? -1 : 1))
      .map(([dimension, mean]) => ({ dimension, mean: mean.toFixed(3) })),
    respondents: payload.respondent_count,
  };
}

export interface TreeRow {
  depth: number;
  label: string;
  kind: string;
  path: number[];
}

/** Flatten a strategy tree into indented rows for the collapsible view. */
export function treeView(tree: TreeNode): TreeRow[] {
  const rows: TreeRow[] = [];

  const visit = (node: TreeNode, depth: number, path: number[]) => {
    const label =
      node.kind === "Explainer"
        ? node.explainer ?? "?"
        : node.kind === "UserQuestion"
          ? node.question ?? "?"
          : node.kind;
    rows.push({ depth, label, kind: node.kind, path });
    (node.children ?? []).forEach((child, index) => visit(child, depth + 1, [...path, index]));
  };

  visit(tree, 0, []);
  return rows;
}
