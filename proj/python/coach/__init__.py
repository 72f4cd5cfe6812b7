"""Spanish grammar coaching over typed feature structure unification."""

import json
import os
from pathlib import Path

_bundled = Path(__file__).resolve().parent / "data"
if _bundled.is_dir():
    os.environ.setdefault("COACH_DATA_DIR", str(_bundled))

from ._core import (  # noqa: E402
    Engine,
    GrammarError,
    InputError,
    InternalError,
    PreconditionError,
    bundled_supertag_model,
    data_dir,
    validate,
)


def profile(engine, suite, mode="strict", rule_filter=True, supertag_k=0, threads=1):
    """Profile a suite (bundled name or path) and return the profile as a dict."""
    return json.loads(engine.profile_json(suite, mode, rule_filter, supertag_k, threads))


__all__ = [
    "Engine",
    "GrammarError",
    "InputError",
    "InternalError",
    "PreconditionError",
    "bundled_supertag_model",
    "data_dir",
    "profile",
    "validate",
]
