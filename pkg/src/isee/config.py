"""Runtime configuration and closed enumerations.

Dataset types and model frameworks are deliberately flat token
enumerations rather than taxonomy concepts: the retrieval filter and the
explainer applicability checks need exact membership tests, not graded
similarity.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path

DATASET_TYPES = ("image", "text", "tabular", "time-series")

MODEL_FRAMEWORKS = (
    "tensorflow",
    "pytorch",
    "sklearn",
    "xgboost",
    "lightgbm",
    "onnx",
)

MODEL_ACCESS = ("file", "predict-api")
MODEL_ACCESS_NEEDED = ("file", "predict-api", "either")

# Feedback scale: integer items 0..4, one of four experience dimensions each.
SCORE_MIN = 0
SCORE_MAX = 4
DIMENSIONS = ("Learning", "Utility", "Fulfilment", "Engagement")

# Default feedback form: four items per dimension. The inventory is
# configurable per deployment; responses carry their own item->dimension map.
DEFAULT_FEEDBACK_ITEMS: dict[str, str] = {
    f"{dim[0]}{i}": dim for dim in DIMENSIONS for i in range(1, 5)
}

# Salt for the stable redaction hashes used when anonymising retained cases.
DEFAULT_ANON_SALT = "isee-retention-salt"

# Set-overlap metric used between two explainers. Substitution ranking is
# symmetric, so the default normalises by the union; "query" switches to the
# query-side normalisation used by case retrieval.
EXPLAINER_SET_METRIC = "jaccard"

GED_SIZE_CAP = 25

# Compatibility floor for pairing a query question with a candidate subtree.
QUESTION_COMPAT_THRESHOLD = 0.5


def default_data_dir() -> Path:
    """Directory holding the shipped taxonomy, explainer library and seed
    case base. Overridable with ISEE_DATA_DIR."""
    env = os.environ.get("ISEE_DATA_DIR")
    if env:
        return Path(env)
    return Path(str(files("isee").joinpath("data")))


@dataclass
class Config:
    """Service/CLI configuration, resolved from env vars with code defaults."""

    data_dir: Path = field(default_factory=default_data_dir)
    token: str = field(default_factory=lambda: os.environ.get("ISEE_TOKEN", "isee-dev-token"))
    host: str = field(default_factory=lambda: os.environ.get("ISEE_HOST", "127.0.0.1"))
    port: int = field(default_factory=lambda: int(os.environ.get("ISEE_PORT", "8321")))
    cors_origin: str = field(
        default_factory=lambda: os.environ.get("ISEE_CORS_ORIGIN", "http://localhost:5173")
    )
    anon_salt: str = field(
        default_factory=lambda: os.environ.get("ISEE_ANON_SALT", DEFAULT_ANON_SALT)
    )

    @property
    def taxonomy_path(self) -> Path:
        return self.data_dir / "taxonomy" / "isee.json"

    @property
    def library_path(self) -> Path:
        return self.data_dir / "library" / "explainers.json"

    @property
    def casebase_dir(self) -> Path:
        return self.data_dir / "casebase"
