"""Failure-driven strategy adaptation.

When the best-matching case does not answer every user question in the
query, repair happens by importing question subtrees from the remaining
neighbours: candidate subtrees are extracted for each unmet question, a
stable matching pairs questions with subtrees, and the matched subtrees are
appended to the base strategy. A matched subtree is retargeted to the query
question it answers, so coverage of the adapted tree always grows by
exactly the matched questions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .bt import BehaviorTree, QuestionSubtree, compose, covered_questions, extract_subtree
from .cases import Case
from .config import QUESTION_COMPAT_THRESHOLD
from .errors import MissingSolution
from .retrieval import RetrievalResult
from .taxonomy import ConceptId, TaxonomySet


def unmet_questions(query: Case, case: Case, intent: ConceptId) -> set[ConceptId]:
    """Query questions for the intent that the case's strategy does not cover."""
    if not case.solution or intent not in case.solution:
        raise MissingSolution(f"case {case.id!r} has no strategy for intent {intent!r}")
    wanted = query.description.questions_for_intent(intent)
    return set(wanted) - covered_questions(case.solution[intent])


@dataclass(frozen=True)
class PreferenceTable:
    """Rank orders for both sides of the matching, best first.

    Incompatible pairs are simply absent from both lists; a question with an
    empty list can never be matched.
    """

    question_rankings: Mapping[ConceptId, tuple[int, ...]]
    candidate_rankings: Mapping[int, tuple[ConceptId, ...]]

    def compatible(self, question: ConceptId, candidate: int) -> bool:
        return candidate in self.question_rankings.get(question, ())


@dataclass(frozen=True)
class Matching:
    pairs: Mapping[ConceptId, int]
    unmatched_questions: frozenset[ConceptId]


def build_preference_table(
    questions: Sequence[ConceptId],
    candidates: Sequence[QuestionSubtree],
    taxonomies: TaxonomySet,
    origin_scores: Mapping[str, float] | None = None,
    threshold: float = QUESTION_COMPAT_THRESHOLD,
) -> PreferenceTable:
    """Similarity-driven preferences between questions and candidate subtrees.

    A question prefers candidates by question-concept similarity (an exact
    concept match always outranks a merely similar one), then by the origin
    case's retrieval score, then by origin case id. Candidates rank
    questions symmetrically by concept similarity. Pairs below the
    compatibility threshold are excluded outright.
    """
    origin_scores = origin_scores or {}
    sim: dict[tuple[ConceptId, int], float] = {}
    for index, candidate in enumerate(candidates):
        for question in questions:
            value = taxonomies.wu_palmer(question, candidate.question)
            if value >= threshold:
                sim[(question, index)] = value

    question_rankings = {}
    for question in questions:
        usable = [index for index in range(len(candidates)) if (question, index) in sim]
        usable.sort(
            key=lambda index: (
                -sim[(question, index)],
                -origin_scores.get(candidates[index].origin_case or "", 0.0),
                candidates[index].origin_case or "",
                index,
            )
        )
        question_rankings[question] = tuple(usable)

    candidate_rankings = {}
    for index in range(len(candidates)):
        usable = [question for question in questions if (question, index) in sim]
        usable.sort(key=lambda question: (-sim[(question, index)], question))
        candidate_rankings[index] = tuple(usable)

    return PreferenceTable(
        question_rankings=question_rankings, candidate_rankings=candidate_rankings
    )


def stable_match(
    questions: Sequence[ConceptId],
    candidates: Sequence[QuestionSubtree],
    prefs: PreferenceTable,
) -> Matching:
    """Gale-Shapley with questions proposing.

    The result has no blocking pair: no compatible (question, subtree) pair
    where both strictly prefer each other over their assignment. Questions
    that exhaust their preference list stay unmatched.
    """
    candidate_rank: dict[int, dict[ConceptId, int]] = {
        index: {question: rank for rank, question in enumerate(ranking)}
        for index, ranking in prefs.candidate_rankings.items()
    }
    engaged: dict[int, ConceptId] = {}
    next_proposal = {question: 0 for question in questions}
    free = [q for q in questions if prefs.question_rankings.get(q)]
    while free:
        question = free.pop()
        ranking = prefs.question_rankings[question]
        while next_proposal[question] < len(ranking):
            candidate = ranking[next_proposal[question]]
            next_proposal[question] += 1
            ranks = candidate_rank.get(candidate, {})
            if question not in ranks:
                continue
            holder = engaged.get(candidate)
            if holder is None:
                engaged[candidate] = question
                break
            if ranks[question] < ranks[holder]:
                engaged[candidate] = question
                if next_proposal[holder] < len(prefs.question_rankings[holder]):
                    free.append(holder)
                break
        # exhausted list: question stays unmatched
    pairs = {question: candidate for candidate, question in engaged.items()}
    unmatched = frozenset(q for q in questions if q not in pairs)
    return Matching(pairs=pairs, unmatched_questions=unmatched)


@dataclass(frozen=True)
class SubtreeMatch:
    question: ConceptId
    subtree: QuestionSubtree  # already retargeted to ``question``
    origin_case: str
    source_question: ConceptId

    @property
    def provenance(self) -> str:
        kind = self.source_question.rsplit("/", 1)[-1]
        return f"{kind}-subtree taken from case {self.origin_case}"


@dataclass(frozen=True)
class AdaptationPlan:
    base_case: str
    intent: ConceptId
    unmet: frozenset[ConceptId]
    matches: tuple[SubtreeMatch, ...]
    residual_unmet: frozenset[ConceptId]
    adapted: BehaviorTree
    skipped_neighbours: tuple[str, ...] = ()
    preferences: PreferenceTable | None = field(default=None, compare=False)


def adapt(
    query: Case,
    topk: RetrievalResult,
    cases: Mapping[str, Case],
    intent: ConceptId,
    taxonomies: TaxonomySet,
) -> AdaptationPlan:
    """Repair the top case's strategy with subtrees from neighbours 2..k.

    Neighbours lacking a strategy for the intent are skipped and recorded.
    Questions no neighbour can satisfy are reported as residual rather than
    failing the plan.
    """
    if not topk.ranked:
        raise MissingSolution("cannot adapt from an empty retrieval result")
    base_entry = topk.ranked[0]
    base_case = cases[base_entry.case_id]
    unmet = unmet_questions(query, base_case, intent)
    base_tree = base_case.solution[intent]
    if not unmet:
        return AdaptationPlan(
            base_case=base_case.id,
            intent=intent,
            unmet=frozenset(),
            matches=(),
            residual_unmet=frozenset(),
            adapted=base_tree,
        )

    candidates: list[QuestionSubtree] = []
    skipped: list[str] = []
    origin_scores = {entry.case_id: entry.score for entry in topk.ranked}
    for entry in topk.ranked[1:]:
        neighbour = cases[entry.case_id]
        if not neighbour.solution or intent not in neighbour.solution:
            skipped.append(neighbour.id)
            continue
        tree = neighbour.solution[intent]
        for question in sorted(unmet):
            subtree = extract_subtree(tree, question, origin_case=neighbour.id)
            if subtree is not None:
                candidates.append(subtree)

    ordered_unmet = sorted(unmet)
    prefs = build_preference_table(ordered_unmet, candidates, taxonomies, origin_scores)
    matching = stable_match(ordered_unmet, candidates, prefs)

    matches = []
    for question in ordered_unmet:
        if question not in matching.pairs:
            continue
        chosen = candidates[matching.pairs[question]]
        matches.append(
            SubtreeMatch(
                question=question,
                subtree=chosen.retargeted(question),
                origin_case=chosen.origin_case or "",
                source_question=chosen.question,
            )
        )
    adapted = compose(base_tree, [match.subtree for match in matches])
    return AdaptationPlan(
        base_case=base_case.id,
        intent=intent,
        unmet=frozenset(unmet),
        matches=tuple(matches),
        residual_unmet=frozenset(matching.unmatched_questions),
        adapted=adapted,
        skipped_neighbours=tuple(skipped),
        preferences=prefs,
    )
