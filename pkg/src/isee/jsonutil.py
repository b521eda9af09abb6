"""Canonical JSON serialization shared by files, the service and the CLI.

One fixed rendering (sorted keys, two-space indent, trailing newline) keeps
case files reproducible and lets the CLI and HTTP service emit
byte-identical payloads for equivalent requests.
"""

from __future__ import annotations

import json
from typing import Any


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
