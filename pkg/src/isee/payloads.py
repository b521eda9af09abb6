"""Wire payload builders shared by the HTTP service and the CLI.

Both surfaces serialize engine results through these functions and the
canonical JSON renderer, so equivalent requests produce byte-identical
bodies regardless of transport.
"""

from __future__ import annotations

from .adaptation import AdaptationPlan
from .bt import ValidationIssue
from .cases import Case, Outcome, case_to_doc
from .jsonutil import dumps_canonical
from .retention import CoverageReport
from .retrieval import RetrievalResult
from .revision import ApplicabilityReport, SubstitutionRanking, SubtreeRanking

__all__ = [
    "dumps_canonical",
    "retrieval_payload",
    "plan_payload",
    "validation_payload",
    "trace_payload",
    "applicability_payload",
    "explainer_ranking_payload",
    "subtree_ranking_payload",
    "outcome_payload",
    "coverage_payload",
    "case_payload",
    "error_payload",
]


def retrieval_payload(result: RetrievalResult) -> dict:
    return {
        "k": result.k,
        "ranked": [
            {
                "case_id": entry.case_id,
                "score": entry.score,
                "local_scores": dict(sorted(entry.local_scores.items())),
            }
            for entry in result.ranked
        ],
    }


def plan_payload(plan: AdaptationPlan) -> dict:
    return {
        "base_case": plan.base_case,
        "intent": plan.intent,
        "unmet": sorted(plan.unmet),
        "matches": [
            {
                "question": match.question,
                "origin_case": match.origin_case,
                "source_question": match.source_question,
                "provenance": match.provenance,
                "subtree": _node_doc(match.subtree),
            }
            for match in plan.matches
        ],
        "residual_unmet": sorted(plan.residual_unmet),
        "skipped_neighbours": list(plan.skipped_neighbours),
        "adapted": plan.adapted.to_doc(),
    }


def _node_doc(subtree) -> dict:
    from .bt import node_to_doc

    return {
        "question": subtree.question,
        "origin_case": subtree.origin_case,
        "tree": node_to_doc(subtree.tree),
    }


def validation_payload(issues: list[ValidationIssue]) -> dict:
    return {
        "valid": not issues,
        "issues": [
            {"kind": issue.kind, "path": issue.path, "detail": issue.detail}
            for issue in issues
        ],
    }


def trace_payload(trace: list[str]) -> dict:
    return {"trace": trace}


def applicability_payload(report: ApplicabilityReport) -> dict:
    return {
        "explainer_id": report.explainer_id,
        "applicable": report.applicable,
        "warnings": [
            {"kind": warning.kind, "detail": warning.detail} for warning in report.warnings
        ],
    }


def explainer_ranking_payload(ranking: SubstitutionRanking) -> dict:
    return {
        "target": ranking.target,
        "metric": ranking.metric,
        "ranked": [
            {
                "candidate_id": entry.candidate_id,
                "score": entry.score,
                "applicability": applicability_payload(entry.applicability)
                if entry.applicability
                else None,
            }
            for entry in ranking.ranked
        ],
    }


def subtree_ranking_payload(ranking: SubtreeRanking) -> dict:
    return {
        "target_question": ranking.target_question,
        "metric": ranking.metric,
        "ranked": [
            {
                "origin_case": entry.origin_case,
                "question": entry.question,
                "score": entry.score,
                "subtree": _node_doc(entry.subtree),
            }
            for entry in ranking.ranked
        ],
        "skipped": list(ranking.skipped),
    }


def outcome_payload(outcome: Outcome, case_id: str | None = None) -> dict:
    payload = {
        "dimension_means": dict(sorted(outcome.dimension_means.items())),
        "respondent_count": outcome.respondent_count,
    }
    if case_id is not None:
        payload["case_id"] = case_id
    return payload


def coverage_payload(report: CoverageReport) -> dict:
    return {
        "threshold": report.threshold,
        "neighbour_counts": dict(sorted(report.neighbour_counts.items())),
        "isolated": list(report.isolated),
        "strata": dict(sorted(report.strata.items())),
    }


def case_payload(case: Case) -> dict:
    return case_to_doc(case)


def error_payload(code: str, message: str, details: list[str] | None = None) -> dict:
    return {"error": {"code": code, "message": message, "details": details or []}}
