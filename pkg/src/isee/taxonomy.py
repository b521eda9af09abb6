"""Rooted concept taxonomies and the path-based similarity built on them.

A taxonomy document carries one or more named trees (AI tasks, AI methods,
user-question kinds, presentation formats, ...). Concept ids are opaque
strings namespaced by tree name (``"AITask/Classification"``) and must be
globally unique across the document so that any id found in a case resolves
in exactly one tree. Concepts are a closed world: an unknown id is an error,
never a silent zero score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    CycleDetected,
    DanglingParent,
    DuplicateConcept,
    MultipleRoots,
    SchemaViolation,
    UnknownConcept,
)

ConceptId = str


@dataclass(frozen=True)
class Taxonomy:
    """One rooted tree of concepts.

    ``parent_of`` maps every non-root concept to its single parent. Depths
    are memoised at load; the root has depth 1 so the similarity score is
    always strictly positive.
    """

    name: str
    root: ConceptId
    parent_of: Mapping[ConceptId, ConceptId]
    labels: Mapping[ConceptId, str] = field(default_factory=dict)

    def __post_init__(self):
        depths = {self.root: 1}
        order = _topological_children(self.root, self.parent_of)
        for concept in order:
            depths[concept] = depths[self.parent_of[concept]] + 1
        object.__setattr__(self, "_depths", depths)

    @property
    def concepts(self) -> set[ConceptId]:
        return set(self._depths)

    def __contains__(self, concept: ConceptId) -> bool:
        return concept in self._depths

    def depth(self, concept: ConceptId) -> int:
        try:
            return self._depths[concept]
        except KeyError:
            raise UnknownConcept(f"concept {concept!r} not in taxonomy {self.name!r}") from None

    def ancestors(self, concept: ConceptId) -> list[ConceptId]:
        """Path from ``concept`` up to the root, inclusive on both ends."""
        self.depth(concept)
        path = [concept]
        while path[-1] != self.root:
            path.append(self.parent_of[path[-1]])
        return path

    def lca(self, a: ConceptId, b: ConceptId) -> ConceptId:
        """Deepest concept that is an ancestor-or-self of both ``a`` and ``b``."""
        seen = set(self.ancestors(a))
        for concept in self.ancestors(b):
            if concept in seen:
                return concept
        return self.root  # unreachable: the root is a shared ancestor

    def wu_palmer(self, a: ConceptId, b: ConceptId) -> float:
        """Path similarity 2*depth(lca) / (depth(a) + depth(b)), in (0, 1]."""
        lca = self.lca(a, b)
        return 2.0 * self.depth(lca) / (self.depth(a) + self.depth(b))


def _topological_children(root: ConceptId, parent_of: Mapping[ConceptId, ConceptId]):
    """Non-root concepts ordered parent-before-child; validates reachability."""
    children: dict[ConceptId, list[ConceptId]] = {}
    for child, parent in parent_of.items():
        children.setdefault(parent, []).append(child)
    order: list[ConceptId] = []
    stack = [root]
    while stack:
        node = stack.pop()
        for child in sorted(children.get(node, []), reverse=True):
            order.append(child)
            stack.append(child)
    if len(order) != len(parent_of):
        unreachable = sorted(set(parent_of) - set(order))
        raise CycleDetected(f"concepts not reachable from root: {unreachable}")
    return order


def load_taxonomy(name: str, root: ConceptId, edges: Iterable[tuple[ConceptId, ConceptId]],
                  labels: Mapping[ConceptId, str] | None = None) -> Taxonomy:
    """Build and validate a single tree from (parent, child) edges."""
    if not root:
        raise SchemaViolation(f"tree {name!r}: empty root id")
    parent_of: dict[ConceptId, ConceptId] = {}
    for parent, child in edges:
        if not parent or not child:
            raise SchemaViolation(f"tree {name!r}: empty concept id in edge")
        if child == root:
            raise MultipleRoots(f"tree {name!r}: root {root!r} appears as a child")
        if child in parent_of:
            raise DuplicateConcept(f"tree {name!r}: concept {child!r} has two parents")
        if parent == child:
            raise CycleDetected(f"tree {name!r}: self-loop on {child!r}")
        parent_of[child] = parent
    known = set(parent_of) | {root}
    for child, parent in parent_of.items():
        if parent not in known:
            raise DanglingParent(f"tree {name!r}: parent {parent!r} of {child!r} is undefined")
    return Taxonomy(name=name, root=root, parent_of=parent_of, labels=dict(labels or {}))


class TaxonomySet:
    """Several named trees loaded from one document.

    Resolution is closed-world and unambiguous: every concept id belongs to
    exactly one tree (enforced at load). Immutable after construction.
    """

    def __init__(self, trees: Iterable[Taxonomy]):
        self.trees: dict[str, Taxonomy] = {}
        self._tree_of: dict[ConceptId, str] = {}
        for tree in trees:
            if tree.name in self.trees:
                raise DuplicateConcept(f"duplicate tree name {tree.name!r}")
            self.trees[tree.name] = tree
            for concept in tree.concepts:
                if concept in self._tree_of:
                    raise DuplicateConcept(
                        f"concept {concept!r} appears in trees "
                        f"{self._tree_of[concept]!r} and {tree.name!r}"
                    )
                self._tree_of[concept] = tree.name

    def __contains__(self, concept: ConceptId) -> bool:
        return concept in self._tree_of

    def tree(self, name: str) -> Taxonomy:
        try:
            return self.trees[name]
        except KeyError:
            raise UnknownConcept(f"no taxonomy tree named {name!r}") from None

    def resolve(self, concept: ConceptId) -> Taxonomy:
        """The unique tree containing ``concept``."""
        try:
            return self.trees[self._tree_of[concept]]
        except KeyError:
            raise UnknownConcept(f"concept {concept!r} not in any loaded taxonomy") from None

    def depth(self, concept: ConceptId) -> int:
        return self.resolve(concept).depth(concept)

    def wu_palmer(self, a: ConceptId, b: ConceptId) -> float:
        """Similarity of two concepts that must live in the same tree."""
        tree = self.resolve(a)
        if b not in tree:
            other = self.resolve(b)
            raise UnknownConcept(
                f"concepts {a!r} ({tree.name}) and {b!r} ({other.name}) "
                "are not comparable across trees"
            )
        return tree.wu_palmer(a, b)

    def wu_palmer_sets(self, left: set[ConceptId], right: set[ConceptId]) -> float:
        """Symmetric best-match average between two concept sets.

        Each concept is matched with its most similar counterpart on the
        other side; the two directional means are averaged. Empty-vs-empty
        scores 1.0, empty-vs-nonempty 0.0.
        """
        if not left and not right:
            return 1.0
        if not left or not right:
            return 0.0
        forward = sum(max(self.wu_palmer(a, b) for b in right) for a in left) / len(left)
        backward = sum(max(self.wu_palmer(a, b) for a in left) for b in right) / len(right)
        return (forward + backward) / 2.0


def parse_taxonomy_document(doc: dict) -> TaxonomySet:
    """Parse the taxonomy file schema: {"trees": [{name, root, edges, labels}]}."""
    if not isinstance(doc, dict) or "trees" not in doc:
        raise SchemaViolation("taxonomy document must be an object with a 'trees' list")
    trees = []
    for entry in doc["trees"]:
        try:
            name = entry["name"]
            root = entry["root"]
            edges = [tuple(edge) for edge in entry.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"malformed tree entry: {exc}") from exc
        for edge in edges:
            if len(edge) != 2:
                raise SchemaViolation(f"tree {name!r}: edge {edge!r} is not a [parent, child] pair")
        trees.append(load_taxonomy(name, root, edges, entry.get("labels")))
    return TaxonomySet(trees)


def load_taxonomy_file(path: str | Path) -> TaxonomySet:
    with open(path, encoding="utf-8") as handle:
        return parse_taxonomy_document(json.load(handle))
