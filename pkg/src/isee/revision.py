"""Collaborative revision support: applicability warnings, explainer
substitution ranking, and subtree substitution via graph edit distance.

Explainer substitution reuses the retrieval recipe over the explainer
library: a per-feature schema with taxonomy, set-overlap and exact-match
local metrics, aggregated by an unweighted mean. Sub-tree substitution
converts strategies to directed graphs and scores candidates by an exact
edit distance whose substitution cost is one minus the node similarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from . import config
from .bt import GraphNode, QuestionSubtree, StrategyGraph, extract_subtree, to_graph
from .cases import Case, CaseDescription, ExplainerSpec
from .errors import SizeCapExceeded, UnknownExplainer
from .taxonomy import ConceptId, TaxonomySet

NodeSimilarity = Callable[[GraphNode, GraphNode], float]


# --- applicability -----------------------------------------------------------

@dataclass(frozen=True)
class ApplicabilityWarning:
    kind: str  # FrameworkMismatch | ModelAccessMismatch | DataRequirementMismatch
    detail: str


@dataclass(frozen=True)
class ApplicabilityReport:
    explainer_id: str
    warnings: tuple[ApplicabilityWarning, ...]

    @property
    def applicable(self) -> bool:
        return not self.warnings


def applicability_check(description: CaseDescription, spec: ExplainerSpec) -> ApplicabilityReport:
    """Warn about implementation mismatches; warnings inform, never block."""
    warnings = []
    if description.model_framework not in spec.implementation_frameworks:
        warnings.append(
            ApplicabilityWarning(
                "FrameworkMismatch",
                f"{spec.id} supports {sorted(spec.implementation_frameworks)}, "
                f"model is {description.model_framework}",
            )
        )
    if spec.model_access_needed != "either" and spec.model_access_needed != description.model_access:
        warnings.append(
            ApplicabilityWarning(
                "ModelAccessMismatch",
                f"{spec.id} needs {spec.model_access_needed} access, "
                f"model offers {description.model_access}",
            )
        )
    if spec.needs_training_data and not description.has_training_data:
        warnings.append(
            ApplicabilityWarning(
                "DataRequirementMismatch",
                f"{spec.id} needs labelled training data, none is provided",
            )
        )
    return ApplicabilityReport(explainer_id=spec.id, warnings=tuple(warnings))


# --- explainer similarity ----------------------------------------------------

def _set_overlap(left: frozenset, right: frozenset) -> float:
    """Symmetric set similarity between explainer feature sets."""
    if not left and not right:
        return 1.0
    if config.EXPLAINER_SET_METRIC == "query":
        if not left:
            return 1.0
        return len(left & right) / len(left)
    union = left | right
    return len(left & right) / len(union)


def explainer_feature_scores(
    a: ExplainerSpec, b: ExplainerSpec, taxonomies: TaxonomySet
) -> dict[str, float]:
    """Per-feature local scores mirroring the explainer metadata schema.

    Taxonomy similarity for tasks, methods and presentation; set overlap
    for frameworks, technique and type; exact match for the rest.
    """
    return {
        "applicable_ai_tasks": taxonomies.wu_palmer_sets(
            set(a.applicable_ai_tasks), set(b.applicable_ai_tasks)
        ),
        "applicable_ai_methods": taxonomies.wu_palmer_sets(
            set(a.applicable_ai_methods), set(b.applicable_ai_methods)
        ),
        "presentation": taxonomies.wu_palmer(a.presentation, b.presentation),
        "implementation_frameworks": _set_overlap(
            a.implementation_frameworks, b.implementation_frameworks
        ),
        "explanation_technique": _set_overlap(a.explanation_technique, b.explanation_technique),
        "explanation_type": _set_overlap(a.explanation_type, b.explanation_type),
        "dataset_type": 1.0 if a.dataset_type == b.dataset_type else 0.0,
        "model_access_needed": 1.0 if a.model_access_needed == b.model_access_needed else 0.0,
        "needs_training_data": 1.0 if a.needs_training_data == b.needs_training_data else 0.0,
    }


def explainer_similarity(a: ExplainerSpec, b: ExplainerSpec, taxonomies: TaxonomySet) -> float:
    scores = explainer_feature_scores(a, b, taxonomies)
    return sum(scores.values()) / len(scores)


@dataclass(frozen=True)
class RankedSubstitute:
    candidate_id: str
    score: float
    applicability: ApplicabilityReport | None = None


@dataclass(frozen=True)
class SubstitutionRanking:
    target: str
    metric: str  # "e_sim" | "edit_distance"
    ranked: tuple[RankedSubstitute, ...]
    skipped: tuple[str, ...] = ()


def rank_substitutes(
    target: ExplainerSpec,
    library: Sequence[ExplainerSpec],
    description: CaseDescription,
    taxonomies: TaxonomySet,
) -> SubstitutionRanking:
    """Rank substitute explainers for a selected node, most similar first.

    Candidates with applicability warnings stay in the ranking but carry
    their report so the editor can badge them.
    """
    scored = []
    for spec in library:
        if spec.id == target.id:
            continue
        scored.append(
            RankedSubstitute(
                candidate_id=spec.id,
                score=explainer_similarity(target, spec, taxonomies),
                applicability=applicability_check(description, spec),
            )
        )
    scored.sort(key=lambda entry: (-entry.score, entry.candidate_id))
    return SubstitutionRanking(target=target.id, metric="e_sim", ranked=tuple(scored))


# --- node similarity and edit distance ---------------------------------------

def node_similarity(
    n1: GraphNode,
    n2: GraphNode,
    taxonomies: TaxonomySet,
    library: Mapping[str, ExplainerSpec],
) -> float:
    """Four-way node comparison used as the edit-distance substitution base."""
    if n1.kind != n2.kind:
        return 0.0
    if n1.kind == "Explainer":
        try:
            a = library[n1.explainer_id]
            b = library[n2.explainer_id]
        except KeyError as exc:
            raise UnknownExplainer(f"explainer {exc.args[0]!r} not in library") from exc
        return explainer_similarity(a, b, taxonomies)
    if n1.kind == "UserQuestion":
        return taxonomies.wu_palmer(n1.question, n2.question)
    return 1.0


def make_node_similarity(
    taxonomies: TaxonomySet, library: Mapping[str, ExplainerSpec]
) -> NodeSimilarity:
    return lambda n1, n2: node_similarity(n1, n2, taxonomies, library)


def mapping_cost(
    g1: StrategyGraph,
    g2: StrategyGraph,
    assignment: Mapping[int, int],
    node_sim: NodeSimilarity,
) -> float:
    """Edit cost induced by an injective partial node mapping.

    Unmapped nodes are deletions/insertions at unit cost, mapped pairs cost
    one minus their similarity, and every tree edge not preserved by the
    mapping costs one deletion or insertion.
    """
    cost = 0.0
    mapped_targets = set(assignment.values())
    cost += len(g1.nodes) - len(assignment)  # node deletions
    cost += len(g2.nodes) - len(mapped_targets)  # node insertions
    for i, j in assignment.items():
        cost += 1.0 - node_sim(g1.nodes[i], g2.nodes[j])
    preserved = 0
    for i, j in assignment.items():
        parent = g1.parent[i]
        if parent >= 0 and parent in assignment and g2.parent[j] == assignment[parent]:
            preserved += 1
    cost += (len(g1.edges) - preserved) + (len(g2.edges) - preserved)
    return cost


def tree_edit_distance(
    g1: StrategyGraph,
    g2: StrategyGraph,
    node_sim: NodeSimilarity,
    size_cap: int = config.GED_SIZE_CAP,
) -> float:
    """Exact minimum edit cost between two strategy graphs.

    Branch-and-bound over injective node mappings in preorder; admissible
    bounds keep the search exact. Graphs beyond the size cap are refused
    rather than approximated.
    """
    n1, n2 = len(g1.nodes), len(g2.nodes)
    if n1 > size_cap or n2 > size_cap:
        raise SizeCapExceeded(f"graphs of {n1} and {n2} nodes exceed cap {size_cap}")

    sub_cost = [[1.0 - node_sim(a, b) for b in g2.nodes] for a in g1.nodes]
    e1, e2 = len(g1.edges), len(g2.edges)
    best = float(n1 + n2 + e1 + e2)  # delete everything, insert everything

    # candidate order: cheapest substitutions first so good bounds come early
    order = [
        sorted(range(n2), key=lambda j: sub_cost[i][j]) for i in range(n1)
    ]

    def lower_bound(i: int, used_count: int, partial: float) -> float:
        # every surplus node on either side forces a unit deletion/insertion
        return partial + abs((n1 - i) - (n2 - used_count))

    assignment: dict[int, int] = {}
    used = [False] * n2

    def dfs(i: int, partial: float, preserved: int):
        nonlocal best
        if lower_bound(i, sum(used), partial) >= best:
            return
        if i == n1:
            inserts = n2 - sum(used)
            total = partial + inserts + (e1 - preserved) + (e2 - preserved)
            if total < best:
                best = total
            return
        parent = g1.parent[i]
        for j in order[i]:
            if used[j]:
                continue
            gain = 0
            if parent >= 0 and parent in assignment and g2.parent[j] == assignment[parent]:
                gain = 1
            assignment[i] = j
            used[j] = True
            dfs(i + 1, partial + sub_cost[i][j], preserved + gain)
            used[j] = False
            del assignment[i]
        # deletion of node i
        dfs(i + 1, partial + 1.0, preserved)

    dfs(0, 0.0, 0)
    return best


def edit_similarity(g1: StrategyGraph, g2: StrategyGraph, node_sim: NodeSimilarity,
                    size_cap: int = config.GED_SIZE_CAP) -> float:
    """Edit distance normalised to [0, 1] by the combined graph size."""
    distance = tree_edit_distance(g1, g2, node_sim, size_cap=size_cap)
    denominator = len(g1.nodes) + len(g1.edges) + len(g2.nodes) + len(g2.edges)
    if denominator == 0:
        return 1.0
    return max(0.0, min(1.0, 1.0 - distance / denominator))


def gather_question_subtrees(cases: Mapping[str, Case]) -> list[QuestionSubtree]:
    """All question subtrees found in stored case solutions."""
    found: list[QuestionSubtree] = []
    for case_id in sorted(cases):
        case = cases[case_id]
        if not case.solution:
            continue
        for intent_label in sorted(case.solution):
            tree = case.solution[intent_label]
            for question in sorted({
                node.question for node in tree.root.walk() if node.kind == "UserQuestion"
            }):
                subtree = extract_subtree(tree, question, origin_case=case.id)
                if subtree is not None:
                    found.append(subtree)
    return found


@dataclass(frozen=True)
class RankedSubtree:
    origin_case: str
    question: ConceptId
    score: float
    subtree: QuestionSubtree


@dataclass(frozen=True)
class SubtreeRanking:
    target_question: ConceptId
    metric: str
    ranked: tuple[RankedSubtree, ...]
    skipped: tuple[str, ...] = ()


def rank_subtree_substitutes(
    target: QuestionSubtree,
    cases: Mapping[str, Case],
    k: int,
    taxonomies: TaxonomySet,
    library: Mapping[str, ExplainerSpec],
    size_cap: int = config.GED_SIZE_CAP,
) -> SubtreeRanking:
    """Top-k most edit-similar question subtrees from stored solutions.

    The target itself (same origin case and question) is excluded; other
    structurally identical subtrees score 1.0. Oversized candidates are
    skipped and recorded instead of failing the whole ranking.
    """
    node_sim = make_node_similarity(taxonomies, library)
    target_graph = to_graph(target.tree)
    if len(target_graph.nodes) > size_cap:
        raise SizeCapExceeded(f"target subtree exceeds the {size_cap}-node cap")
    scored: list[RankedSubtree] = []
    skipped: list[str] = []
    for candidate in gather_question_subtrees(cases):
        if candidate.origin_case == target.origin_case and candidate.question == target.question:
            continue
        graph = to_graph(candidate.tree)
        if len(graph.nodes) > size_cap:
            skipped.append(f"{candidate.origin_case}:{candidate.question}")
            continue
        score = edit_similarity(target_graph, graph, node_sim, size_cap=size_cap)
        scored.append(
            RankedSubtree(
                origin_case=candidate.origin_case or "",
                question=candidate.question,
                score=score,
                subtree=candidate,
            )
        )
    scored.sort(key=lambda entry: (-entry.score, entry.origin_case, entry.question))
    return SubtreeRanking(
        target_question=target.question,
        metric="edit_distance",
        ranked=tuple(scored[:k]),
        skipped=tuple(skipped),
    )
