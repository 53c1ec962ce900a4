"""Discrete varifold flow experiments."""

from ._core import (
    DiscreteVarifold,
    FlowTrajectory,
    Plane,
    a_q_squared,
    evolve,
    git_blob_hash,
    hex_disk,
    icosphere,
    load_dvar,
    make_fixture,
    mean_curvature,
    nucleate,
    run_suite,
    save_dvar,
    schedule,
    squash_normal,
    suite_names,
    tail_sum,
    verify_nucleation,
)

__all__ = [
    "DiscreteVarifold",
    "FlowTrajectory",
    "Plane",
    "a_q_squared",
    "evolve",
    "git_blob_hash",
    "hex_disk",
    "icosphere",
    "load_dvar",
    "make_fixture",
    "mean_curvature",
    "nucleate",
    "run_suite",
    "save_dvar",
    "schedule",
    "squash_normal",
    "suite_names",
    "tail_sum",
    "verify_nucleation",
]
