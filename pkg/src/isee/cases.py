"""The explanation-experience case triplet and explainer metadata records.

A case bundles a description of an AI system and its stakeholder needs, a
solution mapping each persona intent to a strategy tree, and an outcome
aggregating stakeholder feedback. A query is simply a case whose solution
and outcome are absent. Values are immutable once constructed; the case
base replaces whole cases rather than mutating them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from . import config
from .bt import BehaviorTree, validate_tree
from .errors import InvalidTree, SchemaViolation
from .taxonomy import ConceptId, TaxonomySet


@dataclass(frozen=True)
class Intent:
    label: ConceptId
    user_questions: frozenset[ConceptId]

    def __post_init__(self):
        if not self.label:
            raise SchemaViolation("intent label must be non-empty")
        if not self.user_questions:
            raise SchemaViolation(f"intent {self.label!r} has no user questions")


@dataclass(frozen=True)
class Persona:
    name: str
    intents: tuple[Intent, ...]

    def __post_init__(self):
        if not self.name:
            raise SchemaViolation("persona name must be non-empty")
        if not self.intents:
            raise SchemaViolation(f"persona {self.name!r} has no intents")


@dataclass(frozen=True)
class CaseDescription:
    ai_task: ConceptId
    ai_method: ConceptId
    dataset_type: str
    model_framework: str
    model_access: str
    has_training_data: bool
    technical_facilities: frozenset[ConceptId]
    personas: tuple[Persona, ...]
    summary: str = ""
    model_access_descriptor: str = ""

    def __post_init__(self):
        if self.dataset_type not in config.DATASET_TYPES:
            raise SchemaViolation(f"unknown dataset_type {self.dataset_type!r}")
        if self.model_framework not in config.MODEL_FRAMEWORKS:
            raise SchemaViolation(f"unknown model_framework {self.model_framework!r}")
        if self.model_access not in config.MODEL_ACCESS:
            raise SchemaViolation(f"unknown model_access {self.model_access!r}")
        if not self.personas:
            raise SchemaViolation("a description needs at least one persona")

    def all_user_questions(self) -> frozenset[ConceptId]:
        """Union of user questions across every persona intent."""
        questions: set[ConceptId] = set()
        for persona in self.personas:
            for intent in persona.intents:
                questions |= intent.user_questions
        return frozenset(questions)

    def questions_for_intent(self, intent_label: ConceptId) -> frozenset[ConceptId]:
        """Union of user questions under one intent label, across personas."""
        questions: set[ConceptId] = set()
        for persona in self.personas:
            for intent in persona.intents:
                if intent.label == intent_label:
                    questions |= intent.user_questions
        return frozenset(questions)

    def intent_labels(self) -> list[ConceptId]:
        labels: list[ConceptId] = []
        for persona in self.personas:
            for intent in persona.intents:
                if intent.label not in labels:
                    labels.append(intent.label)
        return labels


@dataclass(frozen=True)
class Outcome:
    dimension_means: Mapping[str, float]
    respondent_count: int

    def __post_init__(self):
        if self.respondent_count < 0:
            raise SchemaViolation("respondent_count must be non-negative")
        if self.respondent_count > 0:
            missing = [d for d in config.DIMENSIONS if d not in self.dimension_means]
            if missing:
                raise SchemaViolation(f"outcome missing dimensions: {missing}")
        for dimension, mean in self.dimension_means.items():
            if dimension not in config.DIMENSIONS:
                raise SchemaViolation(f"unknown outcome dimension {dimension!r}")
            if not (config.SCORE_MIN <= mean <= config.SCORE_MAX):
                raise SchemaViolation(
                    f"mean for {dimension} out of scale range: {mean}"
                )


@dataclass(frozen=True)
class Case:
    id: str
    description: CaseDescription
    solution: Mapping[ConceptId, BehaviorTree] | None = None
    outcome: Outcome | None = None
    anonymised: bool = False

    def with_id(self, case_id: str) -> "Case":
        return replace(self, id=case_id)


def is_query(case: Case) -> bool:
    """True iff both solution and outcome are absent."""
    return case.solution is None and case.outcome is None


def is_complete(case: Case) -> bool:
    return case.solution is not None and case.outcome is not None


@dataclass(frozen=True)
class ExplainerSpec:
    """Semantic metadata describing one explainer in the library."""

    id: str
    applicable_ai_tasks: frozenset[ConceptId]
    applicable_ai_methods: frozenset[ConceptId]
    dataset_type: str
    explanation_technique: frozenset[ConceptId]
    explanation_type: frozenset[ConceptId]
    presentation: ConceptId
    implementation_frameworks: frozenset[str]
    model_access_needed: str
    needs_training_data: bool

    def __post_init__(self):
        if not self.id:
            raise SchemaViolation("explainer id must be non-empty")
        if not self.implementation_frameworks:
            raise SchemaViolation(f"explainer {self.id!r} supports no frameworks")
        if self.dataset_type not in config.DATASET_TYPES:
            raise SchemaViolation(f"explainer {self.id!r}: unknown dataset_type")
        if self.model_access_needed not in config.MODEL_ACCESS_NEEDED:
            raise SchemaViolation(f"explainer {self.id!r}: bad model_access_needed")


# --- parsing -----------------------------------------------------------------

def _require(doc: dict, key: str, path: str) -> Any:
    if key not in doc:
        raise SchemaViolation(f"{path}: missing field {key!r}")
    return doc[key]


def _string_set(value: Any, path: str) -> frozenset[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaViolation(f"{path}: expected a list of strings")
    return frozenset(value)


def intent_from_doc(doc: dict, path: str) -> Intent:
    label = _require(doc, "label", path)
    questions = _string_set(_require(doc, "user_questions", path), f"{path}.user_questions")
    if not questions:
        raise SchemaViolation(f"{path}: intent has no user questions")
    return Intent(label=label, user_questions=questions)


def persona_from_doc(doc: dict, path: str) -> Persona:
    name = _require(doc, "name", path)
    intent_docs = _require(doc, "intents", path)
    if not isinstance(intent_docs, list) or not intent_docs:
        raise SchemaViolation(f"{path}: persona needs a non-empty intents list")
    intents = tuple(
        intent_from_doc(d, f"{path}.intents[{i}]") for i, d in enumerate(intent_docs)
    )
    return Persona(name=name, intents=intents)


def description_from_doc(doc: dict, path: str = "description") -> CaseDescription:
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}: must be an object")
    persona_docs = _require(doc, "personas", path)
    if not isinstance(persona_docs, list) or not persona_docs:
        raise SchemaViolation(f"{path}: at least one persona is required")
    try:
        return CaseDescription(
            ai_task=_require(doc, "ai_task", path),
            ai_method=_require(doc, "ai_method", path),
            dataset_type=_require(doc, "dataset_type", path),
            model_framework=_require(doc, "model_framework", path),
            model_access=_require(doc, "model_access", path),
            has_training_data=bool(_require(doc, "has_training_data", path)),
            technical_facilities=_string_set(
                doc.get("technical_facilities", []), f"{path}.technical_facilities"
            ),
            personas=tuple(
                persona_from_doc(d, f"{path}.personas[{i}]")
                for i, d in enumerate(persona_docs)
            ),
            summary=doc.get("summary", ""),
            model_access_descriptor=doc.get("model_access_descriptor", ""),
        )
    except SchemaViolation:
        raise
    except (TypeError, ValueError) as exc:
        raise SchemaViolation(f"{path}: {exc}") from exc


def outcome_from_doc(doc: dict, path: str = "outcome") -> Outcome:
    means = _require(doc, "dimension_means", path)
    if not isinstance(means, dict):
        raise SchemaViolation(f"{path}.dimension_means: must be an object")
    count = _require(doc, "respondent_count", path)
    if not isinstance(count, int) or isinstance(count, bool):
        raise SchemaViolation(f"{path}.respondent_count: must be an integer")
    return Outcome(dimension_means=dict(means), respondent_count=count)


def solution_from_doc(doc: dict, path: str = "solution") -> dict[ConceptId, BehaviorTree]:
    if not isinstance(doc, dict) or not doc:
        raise SchemaViolation(f"{path}: must map intent labels to strategy trees")
    solution = {}
    for intent_label, tree_doc in doc.items():
        try:
            solution[intent_label] = BehaviorTree.from_doc(tree_doc)
        except InvalidTree as exc:
            raise InvalidTree(f"{path}[{intent_label!r}]: {exc.message}") from exc
    return solution


def case_from_doc(doc: dict) -> Case:
    if not isinstance(doc, dict):
        raise SchemaViolation("case document must be an object")
    description = description_from_doc(_require(doc, "description", "case"))
    solution_doc = doc.get("solution")
    outcome_doc = doc.get("outcome")
    return Case(
        id=doc.get("id", ""),
        description=description,
        solution=solution_from_doc(solution_doc) if solution_doc is not None else None,
        outcome=outcome_from_doc(outcome_doc) if outcome_doc is not None else None,
        anonymised=bool(doc.get("anonymised", False)),
    )


# --- serialization -----------------------------------------------------------

def description_to_doc(description: CaseDescription) -> dict:
    doc = {
        "ai_task": description.ai_task,
        "ai_method": description.ai_method,
        "dataset_type": description.dataset_type,
        "model_framework": description.model_framework,
        "model_access": description.model_access,
        "has_training_data": description.has_training_data,
        "technical_facilities": sorted(description.technical_facilities),
        "personas": [
            {
                "name": persona.name,
                "intents": [
                    {
                        "label": intent.label,
                        "user_questions": sorted(intent.user_questions),
                    }
                    for intent in persona.intents
                ],
            }
            for persona in description.personas
        ],
    }
    if description.summary:
        doc["summary"] = description.summary
    if description.model_access_descriptor:
        doc["model_access_descriptor"] = description.model_access_descriptor
    return doc


def case_to_doc(case: Case) -> dict:
    doc: dict = {
        "id": case.id,
        "anonymised": case.anonymised,
        "description": description_to_doc(case.description),
    }
    if case.solution is not None:
        doc["solution"] = {
            intent: tree.to_doc() for intent, tree in sorted(case.solution.items())
        }
    if case.outcome is not None:
        doc["outcome"] = {
            "dimension_means": dict(sorted(case.outcome.dimension_means.items())),
            "respondent_count": case.outcome.respondent_count,
        }
    return doc


def validate_concept_references(case: Case, taxonomies: TaxonomySet) -> None:
    """Referential integrity: every concept id in the case must resolve."""
    problems: list[str] = []

    def check(concept: ConceptId, where: str):
        if concept not in taxonomies:
            problems.append(f"{where}: unresolved concept {concept!r}")

    d = case.description
    check(d.ai_task, "description.ai_task")
    check(d.ai_method, "description.ai_method")
    for facility in sorted(d.technical_facilities):
        check(facility, "description.technical_facilities")
    for persona in d.personas:
        for intent in persona.intents:
            check(intent.label, f"persona {persona.name!r} intent")
            for question in sorted(intent.user_questions):
                check(question, f"intent {intent.label!r} question")
    if case.solution:
        for intent_label, tree in case.solution.items():
            for node in tree.root.walk():
                if node.kind == "UserQuestion":
                    check(node.question, f"solution[{intent_label!r}] question node")
    if problems:
        raise SchemaViolation("case references unknown concepts", details=problems)


# --- explainer library -------------------------------------------------------

def explainer_from_doc(doc: dict, path: str = "explainer") -> ExplainerSpec:
    return ExplainerSpec(
        id=_require(doc, "id", path),
        applicable_ai_tasks=_string_set(
            _require(doc, "applicable_ai_tasks", path), f"{path}.applicable_ai_tasks"
        ),
        applicable_ai_methods=_string_set(
            _require(doc, "applicable_ai_methods", path), f"{path}.applicable_ai_methods"
        ),
        dataset_type=_require(doc, "dataset_type", path),
        explanation_technique=_string_set(
            _require(doc, "explanation_technique", path), f"{path}.explanation_technique"
        ),
        explanation_type=_string_set(
            _require(doc, "explanation_type", path), f"{path}.explanation_type"
        ),
        presentation=_require(doc, "presentation", path),
        implementation_frameworks=_string_set(
            _require(doc, "implementation_frameworks", path),
            f"{path}.implementation_frameworks",
        ),
        model_access_needed=_require(doc, "model_access_needed", path),
        needs_training_data=bool(_require(doc, "needs_training_data", path)),
    )


def explainer_to_doc(spec: ExplainerSpec) -> dict:
    return {
        "id": spec.id,
        "applicable_ai_tasks": sorted(spec.applicable_ai_tasks),
        "applicable_ai_methods": sorted(spec.applicable_ai_methods),
        "dataset_type": spec.dataset_type,
        "explanation_technique": sorted(spec.explanation_technique),
        "explanation_type": sorted(spec.explanation_type),
        "presentation": spec.presentation,
        "implementation_frameworks": sorted(spec.implementation_frameworks),
        "model_access_needed": spec.model_access_needed,
        "needs_training_data": spec.needs_training_data,
    }


def load_explainer_library(path: str | Path) -> dict[str, ExplainerSpec]:
    with open(path, encoding="utf-8") as handle:
        docs = json.load(handle)
    if not isinstance(docs, list):
        raise SchemaViolation("explainer library must be a JSON list")
    library: dict[str, ExplainerSpec] = {}
    for i, doc in enumerate(docs):
        spec = explainer_from_doc(doc, f"explainers[{i}]")
        if spec.id in library:
            raise SchemaViolation(f"duplicate explainer id {spec.id!r}")
        library[spec.id] = spec
    return library


def validate_solution_trees(case: Case, explainer_ids: set[str]) -> None:
    """Raise InvalidTree if any solution tree fails validation."""
    if not case.solution:
        return
    for intent_label, tree in case.solution.items():
        issues = validate_tree(tree, explainer_ids)
        if issues:
            raise InvalidTree(
                f"solution[{intent_label!r}] is invalid",
                details=[f"{i.kind} at {i.path}: {i.detail}" for i in issues],
            )
