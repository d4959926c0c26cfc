"""Transmission, wind and storage co-planning by Benders dual decomposition."""

from ._coplan import (
    InputError,
    Representatives,
    System,
    crf,
    load_representatives,
    load_system,
    model_shape,
    parse_system,
    run_bdd,
    run_ctpc,
    run_plan,
    screen,
    solve_monolithic,
    stage_discount,
    synthetic_series,
)

__version__ = "0.1.0"

__all__ = [
    "InputError",
    "Representatives",
    "System",
    "crf",
    "load_representatives",
    "load_system",
    "model_shape",
    "parse_system",
    "run_bdd",
    "run_ctpc",
    "run_plan",
    "screen",
    "solve_monolithic",
    "stage_discount",
    "synthetic_series",
]
