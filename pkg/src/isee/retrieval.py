"""Description similarity and top-k case retrieval.

Retrieval runs in two phases: a hard filter keeping only cases whose
dataset type exactly matches the query, then a ranking by the unweighted
mean of per-feature local similarities. Three local metrics cover the
description schema: taxonomy path similarity for single concepts, query
intersection for concept sets, exact match for everything else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .cases import Case, CaseDescription
from .errors import EmptyCaseBase, MetricTypeMismatch
from .taxonomy import TaxonomySet

WP = "WP"  # Wu & Palmer over a single taxonomy concept
QI = "QI"  # set intersection normalised by the query set size
EM = "EM"  # exact match


@dataclass(frozen=True)
class SchemaFeature:
    """One scored description feature: name, accessor and local metric."""

    name: str
    metric: str
    getter: Callable[[CaseDescription], object]
    tree: str | None = None  # taxonomy tree a WP feature resolves in


def default_schema() -> list[SchemaFeature]:
    """The scored features of a case description.

    The dataset type is deliberately absent: it is the hard filter, not a
    scored feature, and does not count towards the aggregation mean.
    """
    return [
        SchemaFeature("ai_task", WP, lambda d: d.ai_task, tree="AITask"),
        SchemaFeature("ai_method", WP, lambda d: d.ai_method, tree="AIMethod"),
        SchemaFeature("technical_facilities", QI, lambda d: d.technical_facilities),
        SchemaFeature("user_questions", QI, lambda d: d.all_user_questions()),
        SchemaFeature("model_framework", EM, lambda d: d.model_framework),
        SchemaFeature("model_access", EM, lambda d: d.model_access),
        SchemaFeature("has_training_data", EM, lambda d: d.has_training_data),
    ]


def local_similarity(
    feature: SchemaFeature, query_value, case_value, taxonomies: TaxonomySet
) -> float:
    """Score one feature pair with the feature's local metric."""
    if feature.metric == WP:
        if not isinstance(query_value, str) or not isinstance(case_value, str):
            raise MetricTypeMismatch(
                f"feature {feature.name!r}: WP needs single concept ids"
            )
        return taxonomies.wu_palmer(query_value, case_value)
    if feature.metric == QI:
        if isinstance(query_value, (str, bytes)) or isinstance(case_value, (str, bytes)):
            raise MetricTypeMismatch(f"feature {feature.name!r}: QI needs sets")
        try:
            query_set = frozenset(query_value)
            case_set = frozenset(case_value)
        except TypeError as exc:
            raise MetricTypeMismatch(f"feature {feature.name!r}: QI needs sets") from exc
        if not query_set:
            # An under-specified query never penalises candidates.
            return 1.0
        return len(query_set & case_set) / len(query_set)
    if feature.metric == EM:
        return 1.0 if query_value == case_value else 0.0
    raise MetricTypeMismatch(f"unknown metric {feature.metric!r}")


def feature_scores(
    query: CaseDescription,
    case: CaseDescription,
    schema: Sequence[SchemaFeature],
    taxonomies: TaxonomySet,
) -> dict[str, float]:
    return {
        feature.name: local_similarity(
            feature, feature.getter(query), feature.getter(case), taxonomies
        )
        for feature in schema
    }


def global_similarity(
    query: CaseDescription,
    case: CaseDescription,
    schema: Sequence[SchemaFeature],
    taxonomies: TaxonomySet,
    weights: Mapping[str, float] | None = None,
) -> float:
    """Aggregate the local scores; unweighted mean unless weights are given."""
    scores = feature_scores(query, case, schema, taxonomies)
    if weights is None:
        return sum(scores.values()) / len(scores)
    total = sum(weights.get(name, 1.0) for name in scores)
    return sum(scores[name] * weights.get(name, 1.0) for name in scores) / total


@dataclass(frozen=True)
class RankedCase:
    case_id: str
    score: float
    local_scores: Mapping[str, float]


@dataclass(frozen=True)
class RetrievalResult:
    ranked: tuple[RankedCase, ...]
    k: int

    @property
    def case_ids(self) -> list[str]:
        return [entry.case_id for entry in self.ranked]

    def top(self) -> RankedCase:
        return self.ranked[0]


def retrieve(
    query: Case,
    cases: Mapping[str, Case],
    k: int,
    taxonomies: TaxonomySet,
    schema: Sequence[SchemaFeature] | None = None,
    weights: Mapping[str, float] | None = None,
) -> RetrievalResult:
    """Filter on dataset type, rank by mean similarity, return the top k.

    Ties break by ascending case id so results are reproducible. Raises
    EmptyCaseBase when no stored case shares the query's dataset type -
    there is nothing to recommend from.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    schema = default_schema() if schema is None else schema
    candidates = [
        case
        for case in cases.values()
        if case.description.dataset_type == query.description.dataset_type
    ]
    if not candidates:
        raise EmptyCaseBase(
            f"no cases with dataset type {query.description.dataset_type!r}"
        )
    scored = []
    for case in candidates:
        locals_ = feature_scores(query.description, case.description, schema, taxonomies)
        if weights is None:
            score = sum(locals_.values()) / len(locals_)
        else:
            total = sum(weights.get(name, 1.0) for name in locals_)
            score = sum(locals_[n] * weights.get(n, 1.0) for n in locals_) / total
        scored.append(RankedCase(case_id=case.id, score=score, local_scores=locals_))
    scored.sort(key=lambda entry: (-entry.score, entry.case_id))
    return RetrievalResult(ranked=tuple(scored[:k]), k=k)
