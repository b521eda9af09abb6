"""Feedback aggregation, anonymisation and durable case retention.

The case base persists as a directory of one JSON file per case plus an
index file. Writes are append-only with atomic renames, so a crash can at
worst leave an orphaned case file that the index never references.
Retention takes an exclusive write lease; retrievals run on immutable
snapshots and never block behind a writer for longer than a snapshot swap.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from . import config
from .cases import Case, Outcome, Persona, case_from_doc, case_to_doc, is_complete
from .errors import (
    ConsentWithheld,
    DuplicateId,
    EmptyFeedback,
    IncompleteCase,
    SchemaViolation,
    ScoreOutOfRange,
)
from .jsonutil import dumps_canonical
from .retrieval import SchemaFeature, default_schema, feature_scores
from .taxonomy import TaxonomySet


@dataclass(frozen=True)
class FeedbackResponse:
    """One stakeholder's filled-in experience questionnaire."""

    respondent: str
    item_scores: Mapping[str, int]
    item_dimension: Mapping[str, str]

    def __post_init__(self):
        for item, score in self.item_scores.items():
            if item not in self.item_dimension:
                raise SchemaViolation(f"item {item!r} has no dimension mapping")
            if not isinstance(score, int) or isinstance(score, bool):
                raise ScoreOutOfRange(f"item {item!r}: score must be an integer")
            if not (config.SCORE_MIN <= score <= config.SCORE_MAX):
                raise ScoreOutOfRange(
                    f"item {item!r}: score {score} outside "
                    f"{config.SCORE_MIN}..{config.SCORE_MAX}"
                )
        for item, dimension in self.item_dimension.items():
            if dimension not in config.DIMENSIONS:
                raise SchemaViolation(f"item {item!r}: unknown dimension {dimension!r}")


def feedback_from_doc(doc: dict, path: str = "response") -> FeedbackResponse:
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}: must be an object")
    try:
        return FeedbackResponse(
            respondent=doc.get("respondent", ""),
            item_scores=dict(doc["item_scores"]),
            item_dimension=dict(
                doc.get("item_dimension", config.DEFAULT_FEEDBACK_ITEMS)
            ),
        )
    except KeyError as exc:
        raise SchemaViolation(f"{path}: missing field {exc.args[0]!r}") from exc


def aggregate_outcome(responses: Sequence[FeedbackResponse]) -> Outcome:
    """Mean item score per dimension, pooled across all respondents."""
    if not responses:
        raise EmptyFeedback("no feedback responses to aggregate")
    totals = {dimension: 0.0 for dimension in config.DIMENSIONS}
    counts = {dimension: 0 for dimension in config.DIMENSIONS}
    for response in responses:
        for item, score in response.item_scores.items():
            dimension = response.item_dimension[item]
            totals[dimension] += score
            counts[dimension] += 1
    empty = [dimension for dimension in config.DIMENSIONS if counts[dimension] == 0]
    if empty:
        raise EmptyFeedback(f"no scored items for dimensions: {empty}")
    means = {dimension: totals[dimension] / counts[dimension] for dimension in config.DIMENSIONS}
    return Outcome(dimension_means=means, respondent_count=len(responses))


def _redact(value: str, prefix: str, salt: str) -> str:
    digest = hashlib.sha256(f"{salt}:{value}".encode("utf-8")).hexdigest()[:10]
    return f"{prefix}-{digest}"


def anonymize(case: Case, salt: str = config.DEFAULT_ANON_SALT) -> Case:
    """Replace identifying free text with stable salted hashes.

    Scored features (concepts, tree structure, outcome) are untouched, so
    retrieval behaves identically before and after. Idempotent: an already
    anonymised case is returned unchanged.
    """
    if not is_complete(case):
        raise IncompleteCase(f"case {case.id!r} lacks a solution or outcome")
    if case.anonymised:
        return case
    description = case.description
    personas = tuple(
        Persona(name=_redact(persona.name, "persona", salt), intents=persona.intents)
        for persona in description.personas
    )
    description = replace(
        description,
        personas=personas,
        summary=_redact(description.summary, "summary", salt) if description.summary else "",
        model_access_descriptor=(
            _redact(description.model_access_descriptor, "descriptor", salt)
            if description.model_access_descriptor
            else ""
        ),
    )
    return replace(case, description=description, anonymised=True)


class CaseBase:
    """Directory-backed collection of cases with a single-writer contract.

    Pass ``path=None`` for an in-memory base (tests, scratch work); all
    read operations behave identically, persistence is skipped.
    """

    def __init__(self, cases: dict[str, Case] | None = None, path: Path | None = None,
                 revision: int = 0):
        self._cases = dict(cases or {})
        self.path = Path(path) if path is not None else None
        self.revision = revision
        self._write_lease = threading.Lock()

    @classmethod
    def open(cls, path: str | Path) -> "CaseBase":
        """Load the index and every case file it references."""
        path = Path(path)
        index_file = path / "index.json"
        if not index_file.exists():
            return cls(cases={}, path=path, revision=0)
        with open(index_file, encoding="utf-8") as handle:
            index = json.load(handle)
        cases: dict[str, Case] = {}
        for case_id in index.get("cases", []):
            case_file = path / "cases" / f"{case_id}.json"
            try:
                with open(case_file, encoding="utf-8") as handle:
                    case = case_from_doc(json.load(handle))
            except FileNotFoundError as exc:
                raise SchemaViolation(f"index references missing case file {case_file}") from exc
            cases[case_id] = case.with_id(case_id)
        return cls(cases=cases, path=path, revision=int(index.get("revision", 0)))

    def __len__(self) -> int:
        return len(self._cases)

    def __contains__(self, case_id: str) -> bool:
        return case_id in self._cases

    def get(self, case_id: str) -> Case | None:
        return self._cases.get(case_id)

    def snapshot(self) -> dict[str, Case]:
        """Immutable-by-convention view for retrieval and scoring."""
        return dict(self._cases)

    def ids(self) -> list[str]:
        return sorted(self._cases)

    def _persist(self, case: Case) -> None:
        assert self.path is not None
        cases_dir = self.path / "cases"
        cases_dir.mkdir(parents=True, exist_ok=True)
        case_file = cases_dir / f"{case.id}.json"
        _atomic_write(case_file, dumps_canonical(case_to_doc(case)))
        index = {"revision": self.revision, "cases": sorted(self._cases)}
        _atomic_write(self.path / "index.json", dumps_canonical(index))

    def retain(self, case: Case, consent: bool, salt: str = config.DEFAULT_ANON_SALT) -> str:
        """Anonymise and insert a complete case; returns the fresh case id.

        The write is durable before the id is returned: a reopened case
        base sees the new case.
        """
        if not consent:
            raise ConsentWithheld("retention requires explicit consent")
        if not is_complete(case):
            raise IncompleteCase(f"case {case.id!r} lacks a solution or outcome")
        with self._write_lease:
            copy = anonymize(case, salt=salt)
            new_id = f"c-{uuid.uuid4().hex[:12]}"
            if new_id in self._cases:
                raise DuplicateId(f"generated case id {new_id!r} collides")
            copy = copy.with_id(new_id)
            self._cases[new_id] = copy
            self.revision += 1
            if self.path is not None:
                self._persist(copy)
        return new_id


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(content)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)


def retain(case_base: CaseBase, case: Case, consent: bool,
           salt: str = config.DEFAULT_ANON_SALT) -> str:
    return case_base.retain(case, consent, salt=salt)


@dataclass(frozen=True)
class CoverageReport:
    threshold: float
    neighbour_counts: Mapping[str, int]
    isolated: tuple[str, ...]
    strata: Mapping[str, int]  # dataset type -> case count


def coverage_report(
    case_base: CaseBase | Mapping[str, Case],
    threshold: float,
    taxonomies: TaxonomySet,
    schema: Sequence[SchemaFeature] | None = None,
) -> CoverageReport:
    """Count, per case, how many same-dataset-type cases sit within the
    similarity threshold; cases with none are isolated."""
    cases = case_base.snapshot() if isinstance(case_base, CaseBase) else dict(case_base)
    schema = default_schema() if schema is None else schema
    counts: dict[str, int] = {}
    strata: dict[str, int] = {}
    for case_id in sorted(cases):
        case = cases[case_id]
        strata[case.description.dataset_type] = strata.get(case.description.dataset_type, 0) + 1
        neighbours = 0
        for other_id in sorted(cases):
            if other_id == case_id:
                continue
            other = cases[other_id]
            if other.description.dataset_type != case.description.dataset_type:
                continue
            locals_ = feature_scores(case.description, other.description, schema, taxonomies)
            if sum(locals_.values()) / len(locals_) >= threshold:
                neighbours += 1
        counts[case_id] = neighbours
    isolated = tuple(case_id for case_id in sorted(cases) if counts[case_id] == 0)
    return CoverageReport(
        threshold=threshold,
        neighbour_counts=counts,
        isolated=isolated,
        strata=dict(sorted(strata.items())),
    )
