"""Loaded-platform handle: taxonomy, explainer library and case base.

The service and the CLI both operate through an Engine so data loading,
validation and the wiring between modules lives in one place.
"""

from __future__ import annotations

from .adaptation import AdaptationPlan, adapt
from .bt import BehaviorTree, QuestionSubtree, ValidationIssue, simulate, validate_tree
from .cases import (
    Case,
    case_from_doc,
    load_explainer_library,
    validate_concept_references,
    validate_solution_trees,
)
from .config import Config
from .errors import SchemaViolation, UnknownExplainer
from .retention import CaseBase, CoverageReport, FeedbackResponse, aggregate_outcome, coverage_report
from .retrieval import RetrievalResult, global_similarity, retrieve
from .revision import (
    SubstitutionRanking,
    SubtreeRanking,
    rank_substitutes,
    rank_subtree_substitutes,
)
from .taxonomy import TaxonomySet, load_taxonomy_file


class Engine:
    def __init__(self, config: Config):
        self.config = config
        self.taxonomies: TaxonomySet = load_taxonomy_file(config.taxonomy_path)
        self.library = load_explainer_library(config.library_path)
        self.case_base = CaseBase.open(config.casebase_dir)

    # --- parsing with referential integrity ---------------------------------

    def parse_case(self, doc: dict) -> Case:
        case = case_from_doc(doc)
        validate_concept_references(case, self.taxonomies)
        validate_solution_trees(case, set(self.library))
        return case

    def parse_query(self, description_doc: dict) -> Case:
        return self.parse_case({"description": description_doc})

    # --- the four Rs ----------------------------------------------------------

    def retrieve(self, query: Case, k: int) -> RetrievalResult:
        return retrieve(query, self.case_base.snapshot(), k, self.taxonomies)

    def rescore(self, query: Case, case_ids: list[str]) -> RetrievalResult:
        """Build a retrieval result over explicitly chosen cases."""
        from .retrieval import RankedCase, default_schema, feature_scores

        snapshot = self.case_base.snapshot()
        schema = default_schema()
        entries = []
        for case_id in case_ids:
            if case_id not in snapshot:
                raise SchemaViolation(f"unknown case id {case_id!r}")
            locals_ = feature_scores(
                query.description, snapshot[case_id].description, schema, self.taxonomies
            )
            entries.append(
                RankedCase(
                    case_id=case_id,
                    score=sum(locals_.values()) / len(locals_),
                    local_scores=locals_,
                )
            )
        entries.sort(key=lambda entry: (-entry.score, entry.case_id))
        return RetrievalResult(ranked=tuple(entries), k=len(entries))

    def adapt(self, query: Case, topk: RetrievalResult, intent: str) -> AdaptationPlan:
        return adapt(query, topk, self.case_base.snapshot(), intent, self.taxonomies)

    def rank_explainer_substitutes(self, target_id: str, query: Case) -> SubstitutionRanking:
        if target_id not in self.library:
            raise UnknownExplainer(f"explainer {target_id!r} not in library")
        return rank_substitutes(
            self.library[target_id],
            sorted(self.library.values(), key=lambda spec: spec.id),
            query.description,
            self.taxonomies,
        )

    def rank_subtree_substitutes(self, target: QuestionSubtree, k: int) -> SubtreeRanking:
        return rank_subtree_substitutes(
            target, self.case_base.snapshot(), k, self.taxonomies, self.library
        )

    def validate_bt(self, tree: BehaviorTree) -> list[ValidationIssue]:
        return validate_tree(tree, set(self.library))

    def simulate_bt(self, tree: BehaviorTree, script: list[str]) -> list[str]:
        return simulate(tree, script)

    def aggregate_feedback(self, responses: list[FeedbackResponse]):
        return aggregate_outcome(responses)

    def retain(self, case: Case, consent: bool) -> str:
        return self.case_base.retain(case, consent, salt=self.config.anon_salt)

    def coverage(self, threshold: float) -> CoverageReport:
        return coverage_report(self.case_base, threshold, self.taxonomies)

    def similarity(self, query: Case, case: Case) -> float:
        from .retrieval import default_schema

        return global_similarity(
            query.description, case.description, default_schema(), self.taxonomies
        )
