"""Behavior trees encoding multi-shot explanation strategies.

A strategy tree is a rooted ordered tree with five node kinds: three
composites (Priority, Sequence, Variant), a condition node carrying a
user-question concept, and an explainer leaf referencing an entry of the
explainer library. All operations are pure functions over immutable trees.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .errors import DuplicateQuestion, InvalidSubtree, InvalidTree
from .taxonomy import ConceptId

COMPOSITE_KINDS = ("Priority", "Sequence", "Variant")
NODE_KINDS = COMPOSITE_KINDS + ("UserQuestion", "Explainer")

#: Script token that advances to the next alternative explainer.
VARIANT_TOKEN = "variant"

#: Trace marker for a script token that activated nothing.
NO_OP = "no-op"


@dataclass(frozen=True)
class BTNode:
    kind: str
    children: tuple["BTNode", ...] = ()
    question: ConceptId | None = None
    explainer_id: str | None = None

    def walk(self) -> Iterator["BTNode"]:
        """Depth-first, left-to-right traversal including self."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class BehaviorTree:
    root: BTNode

    @classmethod
    def from_doc(cls, doc: dict) -> "BehaviorTree":
        return cls(root=node_from_doc(doc))

    def to_doc(self) -> dict:
        return node_to_doc(self.root)


@dataclass(frozen=True)
class QuestionSubtree:
    """A UserQuestion node with its full descendant subtree.

    ``origin_case`` tracks provenance when the subtree was extracted from a
    stored case solution.
    """

    question: ConceptId
    tree: BTNode
    origin_case: str | None = None

    def __post_init__(self):
        if self.tree.kind != "UserQuestion" or self.tree.question != self.question:
            raise InvalidSubtree(
                f"subtree root must be a UserQuestion node for {self.question!r}"
            )

    def retargeted(self, question: ConceptId) -> "QuestionSubtree":
        """Copy answering a different question, keeping structure and provenance."""
        if question == self.question:
            return self
        root = BTNode(kind="UserQuestion", question=question, children=self.tree.children)
        return QuestionSubtree(question=question, tree=root, origin_case=self.origin_case)


def node_from_doc(doc: dict, path: str = "root") -> BTNode:
    """Parse the shared JSON node format, enforcing field shape only.

    Arity and reference invariants (composite has children, explainer id
    resolves, ...) are left to :func:`validate_tree` so that malformed drafts
    can be loaded and diagnosed instead of rejected wholesale.
    """
    if not isinstance(doc, dict):
        raise InvalidTree(f"{path}: node must be an object, got {type(doc).__name__}")
    kind = doc.get("kind")
    if kind not in NODE_KINDS:
        raise InvalidTree(f"{path}: unknown node kind {kind!r}")
    question = doc.get("question")
    explainer = doc.get("explainer")
    children_docs = doc.get("children", [])
    if not isinstance(children_docs, list):
        raise InvalidTree(f"{path}: children must be a list")
    if kind == "UserQuestion":
        if not question or not isinstance(question, str):
            raise InvalidTree(f"{path}: UserQuestion node needs a question concept")
    elif question is not None:
        raise InvalidTree(f"{path}: only UserQuestion nodes carry a question")
    if kind == "Explainer":
        if not explainer or not isinstance(explainer, str):
            raise InvalidTree(f"{path}: Explainer node needs an explainer id")
        if children_docs:
            raise InvalidTree(f"{path}: Explainer nodes are leaves")
    elif explainer is not None:
        raise InvalidTree(f"{path}: only Explainer nodes carry an explainer id")
    children = tuple(
        node_from_doc(child, f"{path}.children[{i}]") for i, child in enumerate(children_docs)
    )
    return BTNode(kind=kind, children=children, question=question, explainer_id=explainer)


def node_to_doc(node: BTNode) -> dict:
    doc: dict = {"kind": node.kind}
    if node.question is not None:
        doc["question"] = node.question
    if node.explainer_id is not None:
        doc["explainer"] = node.explainer_id
    if node.kind != "Explainer":
        doc["children"] = [node_to_doc(child) for child in node.children]
    return doc


@dataclass(frozen=True)
class ValidationIssue:
    kind: str  # UnknownExplainer | EmptyComposite | MalformedQuestionNode | RootNotPriority
    path: str
    detail: str


def validate_tree(bt: BehaviorTree | BTNode, explainer_ids: set[str]) -> list[ValidationIssue]:
    """Check node invariants and explainer references; empty list means valid."""
    root = bt.root if isinstance(bt, BehaviorTree) else bt
    issues: list[ValidationIssue] = []
    if isinstance(bt, BehaviorTree) and root.kind != "Priority":
        issues.append(
            ValidationIssue("RootNotPriority", "root", f"root is {root.kind}, expected Priority")
        )

    def visit(node: BTNode, path: str):
        if node.kind in COMPOSITE_KINDS and not node.children:
            issues.append(ValidationIssue("EmptyComposite", path, f"{node.kind} node has no children"))
        if node.kind == "UserQuestion" and len(node.children) != 1:
            issues.append(
                ValidationIssue(
                    "MalformedQuestionNode",
                    path,
                    f"UserQuestion must have exactly 1 child, has {len(node.children)}",
                )
            )
        if node.kind == "Explainer" and node.explainer_id not in explainer_ids:
            issues.append(
                ValidationIssue("UnknownExplainer", path, f"unknown explainer {node.explainer_id!r}")
            )
        for i, child in enumerate(node.children):
            visit(child, f"{path}.children[{i}]")

    visit(root, "root")
    return issues


def covered_questions(bt: BehaviorTree | BTNode) -> set[ConceptId]:
    """Question concepts appearing on UserQuestion nodes anywhere in the tree."""
    root = bt.root if isinstance(bt, BehaviorTree) else bt
    return {node.question for node in root.walk() if node.kind == "UserQuestion"}


def extract_subtree(
    bt: BehaviorTree | BTNode, question: ConceptId, origin_case: str | None = None
) -> QuestionSubtree | None:
    """Shallowest UserQuestion node matching ``question``, ties left-to-right."""
    root = bt.root if isinstance(bt, BehaviorTree) else bt
    queue: deque[BTNode] = deque([root])
    while queue:
        node = queue.popleft()
        if node.kind == "UserQuestion" and node.question == question:
            return QuestionSubtree(question=question, tree=node, origin_case=origin_case)
        queue.extend(node.children)
    return None


def compose(base: BehaviorTree, additions: list[QuestionSubtree]) -> BehaviorTree:
    """Append question subtrees as new children of the root Priority node.

    Additions must carry distinct questions that the base does not already
    cover; existing subtrees are preserved and additions keep input order.
    """
    if base.root.kind != "Priority":
        raise InvalidTree("compose target must have a Priority root")
    already = covered_questions(base)
    seen: set[ConceptId] = set()
    for addition in additions:
        if not isinstance(addition, QuestionSubtree):
            raise InvalidSubtree(f"expected a QuestionSubtree, got {type(addition).__name__}")
        if addition.question in already:
            raise DuplicateQuestion(f"question {addition.question!r} already covered by base")
        if addition.question in seen:
            raise DuplicateQuestion(f"question {addition.question!r} added twice")
        seen.add(addition.question)
    if not additions:
        return base
    new_root = BTNode(
        kind="Priority",
        children=base.root.children + tuple(addition.tree for addition in additions),
    )
    return BehaviorTree(root=new_root)


def _explainer_leaves(node: BTNode) -> list[str]:
    return [n.explainer_id for n in node.walk() if n.kind == "Explainer"]


def _first_variant(node: BTNode) -> BTNode | None:
    for n in node.walk():
        if n.kind == "Variant":
            return n
    return None


def simulate(bt: BehaviorTree, script: list[str]) -> list[str]:
    """Deterministic walk standing in for the interactive strategy execution.

    A question token activates the matching question subtree and emits its
    first explainer leaf (depth-first, left-to-right). The ``variant`` token
    steps to the next explainer inside the active subtree's Variant
    composite. Tokens that activate nothing are recorded as ``no-op``.
    """
    trace: list[str] = []
    variant_chain: list[str] = []
    variant_pos = -1
    for token in script:
        if token == VARIANT_TOKEN:
            if variant_chain and variant_pos + 1 < len(variant_chain):
                variant_pos += 1
                trace.append(variant_chain[variant_pos])
            else:
                trace.append(NO_OP)
            continue
        subtree = extract_subtree(bt, token)
        if subtree is None:
            trace.append(NO_OP)
            continue
        leaves = _explainer_leaves(subtree.tree)
        if not leaves:
            trace.append(NO_OP)
            continue
        trace.append(leaves[0])
        variant = _first_variant(subtree.tree)
        variant_chain = _explainer_leaves(variant) if variant else []
        variant_pos = variant_chain.index(leaves[0]) if leaves[0] in variant_chain else -1
    return trace


@dataclass(frozen=True)
class GraphNode:
    kind: str
    question: ConceptId | None = None
    explainer_id: str | None = None


@dataclass
class StrategyGraph:
    """Directed labelled graph view of a strategy tree.

    Nodes are indexed in preorder (0 is the root); each edge keeps the
    child's ordinal position under its parent.
    """

    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[tuple[int, int, int]] = field(default_factory=list)  # (parent, child, ordinal)
    parent: list[int] = field(default_factory=list)  # -1 for the root


def to_graph(bt: BehaviorTree | BTNode) -> StrategyGraph:
    root = bt.root if isinstance(bt, BehaviorTree) else bt
    graph = StrategyGraph()

    def visit(node: BTNode, parent_index: int):
        index = len(graph.nodes)
        graph.nodes.append(
            GraphNode(kind=node.kind, question=node.question, explainer_id=node.explainer_id)
        )
        graph.parent.append(parent_index)
        if parent_index >= 0:
            ordinal = sum(1 for p, _, _ in graph.edges if p == parent_index)
            graph.edges.append((parent_index, index, ordinal))
        for child in node.children:
            visit(child, index)

    visit(root, -1)
    return graph
