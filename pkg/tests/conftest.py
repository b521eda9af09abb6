from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from isee.cases import load_explainer_library
from isee.config import Config
from isee.engine import Engine
from isee.taxonomy import load_taxonomy, load_taxonomy_file

PACKAGED_DATA = Path(__file__).resolve().parent.parent / "src" / "isee" / "data"

Q = "UserQuestionIntent"

#: (criterion number, description, elapsed seconds, status) rows collected by
#: the acceptance suite; printed after the test session so the per-criterion
#: lines are visible regardless of output capturing.
ACCEPTANCE_RESULTS: list[tuple[int, str, float, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number, description, elapsed, status in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(
            f"criterion {number}: {status}  ({elapsed:6.2f}s)  {description}"
        )


@pytest.fixture(scope="session")
def taxonomies():
    return load_taxonomy_file(PACKAGED_DATA / "taxonomy" / "isee.json")


@pytest.fixture(scope="session")
def library():
    return load_explainer_library(PACKAGED_DATA / "library" / "explainers.json")


@pytest.fixture(scope="session")
def fixture_tree():
    """Hand-built five-node task tree used for the worked similarity values."""
    return load_taxonomy(
        "AITask",
        "AITask",
        [
            ("AITask", "Classification"),
            ("AITask", "Regression"),
            ("Classification", "ImageClassification"),
            ("Classification", "BinaryClassification"),
        ],
    )


@pytest.fixture
def data_dir(tmp_path):
    """Writable copy of the packaged data directory."""
    dest = tmp_path / "data"
    shutil.copytree(PACKAGED_DATA, dest)
    return dest


@pytest.fixture
def engine(data_dir):
    return Engine(Config(data_dir=data_dir))


def question(name: str) -> str:
    return f"{Q}/{name}"


def make_description_doc(**overrides) -> dict:
    doc = {
        "ai_task": "AITask/ImageClassification",
        "ai_method": "AIMethod/ConvolutionalNeuralNetwork",
        "dataset_type": "image",
        "model_framework": "tensorflow",
        "model_access": "predict-api",
        "has_training_data": True,
        "technical_facilities": ["TechnicalFacility/WebDashboard"],
        "personas": [
            {
                "name": "Clinician",
                "intents": [
                    {
                        "label": "Intent/Transparency",
                        "user_questions": [question("Why"), question("What")],
                    }
                ],
            }
        ],
    }
    doc.update(overrides)
    return doc


def uq(name: str, child: dict) -> dict:
    return {"kind": "UserQuestion", "question": question(name), "children": [child]}


def ex(explainer: str) -> dict:
    return {"kind": "Explainer", "explainer": explainer}


def variant(*children: dict) -> dict:
    return {"kind": "Variant", "children": list(children)}


def seq(*children: dict) -> dict:
    return {"kind": "Sequence", "children": list(children)}


def priority(*children: dict) -> dict:
    return {"kind": "Priority", "children": list(children)}


def sample_strategy_doc() -> dict:
    """Priority over a why-variant (two explainers) and a what-leaf."""
    return priority(
        uq("Why", variant(ex("GradCAM"), ex("NearestNeighbours"))),
        uq("What", ex("IntegratedGradients")),
    )


@pytest.fixture
def sample_strategy():
    from isee.bt import BehaviorTree

    return BehaviorTree.from_doc(sample_strategy_doc())
