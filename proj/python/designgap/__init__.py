"""Spectral gaps, design-depth bounds and frame potentials of random circuits."""

import json

from ._core import (
    ConfigError,
    EngineError,
    h_exponent,
    haar_depth,
    haar_projector,
    haar_rank,
    moment_operator,
    parse_gate,
    patchwork_depth,
    phase_distance,
    radius_relation,
    run,
    spectral_gap,
    theorem1_depth,
)


def run_report(command, config):
    """Run a CLI command on a config dict and return the parsed JSON report."""
    out = run(command, json.dumps(config), "json")
    report = json.loads(out["report"])
    report["exit_status"] = out["exit_status"]
    return report


__all__ = [
    "ConfigError",
    "EngineError",
    "h_exponent",
    "haar_depth",
    "haar_projector",
    "haar_rank",
    "moment_operator",
    "parse_gate",
    "patchwork_depth",
    "phase_distance",
    "radius_relation",
    "run",
    "run_report",
    "spectral_gap",
    "theorem1_depth",
]
