"""Python access to the checker, goal generator and attack simulator."""

import os
from pathlib import Path

from ._bcsa import (
    BcsaError,
    attack_ids,
    check,
    compiled_data_dir,
    generate_goal,
    normalize,
    parse_term,
)
from ._bcsa import repro as _repro
from ._bcsa import simulate as _simulate


def data_dir() -> str:
    """Bundled data: $BCSA_DATA_DIR, then the copy installed with the package, then the source tree."""
    env = os.environ.get("BCSA_DATA_DIR")
    if env:
        return env
    packaged = Path(__file__).with_name("data")
    if packaged.is_dir():
        return str(packaged)
    return compiled_data_dir


def simulate(attack, hash, combine, eta, trials, seed, protocol="", data=None):
    return _simulate(attack, hash, combine, eta, trials, seed, protocol, data or data_dir())


def repro(seed=2024, trials=500, harness_trials=2000, hash="", data=None):
    return _repro(data or data_dir(), seed, trials, harness_trials, hash)


__all__ = [
    "BcsaError",
    "attack_ids",
    "check",
    "data_dir",
    "generate_goal",
    "normalize",
    "parse_term",
    "repro",
    "simulate",
]
