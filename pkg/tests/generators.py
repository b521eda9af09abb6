"""Seeded random builders for property-style tests and the acceptance suite."""

from __future__ import annotations

import random

from isee.bt import BTNode, BehaviorTree
from isee.cases import Case, CaseDescription, Intent, Persona
from isee.config import DATASET_TYPES, MODEL_ACCESS, MODEL_FRAMEWORKS
from isee.taxonomy import Taxonomy, TaxonomySet, load_taxonomy


def random_tree_edges(rng: random.Random, size: int, prefix: str = "n"):
    """Random rooted tree: each new node hangs off a uniformly chosen earlier one."""
    names = [f"{prefix}{i}" for i in range(size)]
    edges = [(names[rng.randrange(i)], names[i]) for i in range(1, size)]
    return names[0], edges, names


def random_taxonomy(rng: random.Random, size: int, name: str = "T") -> Taxonomy:
    root, edges, _ = random_tree_edges(rng, size, prefix=f"{name}-")
    return load_taxonomy(name, root, edges)


def random_question_taxonomies(rng: random.Random, size: int = 9) -> tuple[TaxonomySet, list[str]]:
    """A taxonomy set holding one random question tree, plus its concepts."""
    root, edges, names = random_tree_edges(rng, size, prefix="q")
    tree = load_taxonomy("UserQuestionIntent", root, edges)
    return TaxonomySet([tree]), names


TASKS = [
    "AITask/Classification",
    "AITask/ImageClassification",
    "AITask/TextClassification",
    "AITask/TabularClassification",
    "AITask/BinaryClassification",
    "AITask/MultiClassClassification",
    "AITask/Regression",
    "AITask/TimeSeriesForecasting",
    "AITask/RiskScoring",
    "AITask/Clustering",
    "AITask/AnomalyDetection",
]
METHODS = [
    "AIMethod/MachineLearning",
    "AIMethod/NeuralNetwork",
    "AIMethod/ConvolutionalNeuralNetwork",
    "AIMethod/RecurrentNeuralNetwork",
    "AIMethod/Transformer",
    "AIMethod/TreeEnsemble",
    "AIMethod/RandomForest",
    "AIMethod/GradientBoosting",
    "AIMethod/LinearModel",
    "AIMethod/LogisticRegression",
    "AIMethod/InstanceBased",
]
FACILITIES = [
    "TechnicalFacility/WebDashboard",
    "TechnicalFacility/ChatInterface",
    "TechnicalFacility/NotebookEnvironment",
    "TechnicalFacility/RestApi",
    "TechnicalFacility/PdfReport",
    "TechnicalFacility/MobileApp",
]
QUESTIONS = [
    "UserQuestionIntent/Why",
    "UserQuestionIntent/WhyNot",
    "UserQuestionIntent/What",
    "UserQuestionIntent/WhatIf",
    "UserQuestionIntent/How",
    "UserQuestionIntent/HowTo",
    "UserQuestionIntent/Contrast",
]
INTENTS = [
    "Intent/Transparency",
    "Intent/Performance",
    "Intent/Trust",
    "Intent/Compliance",
    "Intent/Debugging",
]


def random_description(rng: random.Random, dataset_type: str | None = None) -> CaseDescription:
    questions = rng.sample(QUESTIONS, rng.randint(1, 4))
    return CaseDescription(
        ai_task=rng.choice(TASKS),
        ai_method=rng.choice(METHODS),
        dataset_type=dataset_type or rng.choice(DATASET_TYPES),
        model_framework=rng.choice(MODEL_FRAMEWORKS),
        model_access=rng.choice(MODEL_ACCESS),
        has_training_data=rng.random() < 0.5,
        technical_facilities=frozenset(rng.sample(FACILITIES, rng.randint(0, 3))),
        personas=(
            Persona(
                name=f"persona-{rng.randrange(10 ** 6)}",
                intents=(
                    Intent(label=rng.choice(INTENTS), user_questions=frozenset(questions)),
                ),
            ),
        ),
        summary=f"generated case {rng.randrange(10 ** 6)}",
        model_access_descriptor=f"descriptor-{rng.randrange(10 ** 6)}",
    )


def random_query_case(rng: random.Random, dataset_type: str | None = None) -> Case:
    return Case(id=f"q-{rng.randrange(10 ** 9)}", description=random_description(rng, dataset_type))


def strategy_for(questions, explainer_ids, rng: random.Random) -> BehaviorTree:
    """Valid strategy covering exactly the given questions."""
    children = []
    for question in sorted(questions):
        leaf = BTNode(kind="Explainer", explainer_id=rng.choice(explainer_ids))
        if rng.random() < 0.4:
            alt = BTNode(kind="Explainer", explainer_id=rng.choice(explainer_ids))
            inner = BTNode(kind="Variant", children=(leaf, alt))
        else:
            inner = leaf
        children.append(BTNode(kind="UserQuestion", question=question, children=(inner,)))
    if not children:
        children = [BTNode(kind="Explainer", explainer_id=rng.choice(explainer_ids))]
    return BehaviorTree(root=BTNode(kind="Priority", children=tuple(children)))


def random_case_base(
    rng: random.Random, size: int, explainer_ids, with_solutions: bool = False
) -> dict[str, Case]:
    cases = {}
    for index in range(size):
        case_id = f"c-{index:04d}"
        description = random_description(rng)
        solution = None
        if with_solutions:
            intent = description.personas[0].intents[0]
            solution = {
                intent.label: strategy_for(intent.user_questions, explainer_ids, rng)
            }
        cases[case_id] = Case(id=case_id, description=description, solution=solution)
    return cases


def random_bt_node(rng: random.Random, size: int, questions, explainer_ids) -> BTNode:
    """Random structurally well-formed tree with exactly ``size`` nodes."""

    def leaf() -> BTNode:
        return BTNode(kind="Explainer", explainer_id=rng.choice(explainer_ids))

    def build(budget: int) -> tuple[BTNode, int]:
        if budget <= 1:
            return leaf(), 1
        kind = rng.choice(["Priority", "Sequence", "Variant", "UserQuestion"])
        if kind == "UserQuestion":
            child, used = build(budget - 1)
            node = BTNode(
                kind="UserQuestion", question=rng.choice(questions), children=(child,)
            )
            return node, used + 1
        children = []
        used = 1
        while used < budget:
            child, child_used = build(rng.randint(1, budget - used))
            children.append(child)
            used += child_used
        return BTNode(kind=kind, children=tuple(children)), used

    node, _ = build(size)
    return node
