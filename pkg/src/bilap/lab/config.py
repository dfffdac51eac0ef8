"""Experiment configuration files.

A config is a TOML (or JSON) document with one table per suite; every key
is optional and falls back to ``DEFAULTS``.  Exponent tuples of the
Leibniz suite are validated on load.
"""

from __future__ import annotations

import copy
import json
import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..function_norms import ExponentTuple

__all__ = ["DEFAULTS", "load_config", "merge", "exponent_tuple"]

DEFAULTS: dict = {
    "seed": 0,
    "refine": False,
    "identities": {
        "n": 128,
        "fields": 100,
        "pairs": 20,
        "calculus": [[0.3, 0.7], [0.5, 0.9]],
        "riesz_s": [0.5, 1.5],
        "paraproduct": [[2.0, 0.0], [1.0, 0.5], [1.5, 1.0]],
        "symbols": ["one", "ks_frac"],
        "tolerance": 1e-10,
        "aliased_probe": False,
    },
    "leibniz": {
        "count": 50,
        "lebesgue_n": 256,
        "mixed_n": 64,
        "ratio_bound": 100.0,
        "stability": 0.2,
        "enlarge": True,
        "tuples": [
            {"symbol": "one", "s": 2.0, "nu": 0.0, "p1": 2.0, "p2": 2.0},
            {"symbol": "one", "s": 0.5, "nu": 0.0, "p1": 1.5, "p2": 1.5},
            {"symbol": "ks_frac:0.5", "s": 1.0, "nu": 0.5, "p1": 2.0, "p2": 2.0},
            {"symbol": "ks_frac:0.5", "s": 1.5, "nu": 0.5, "p1": 4.0, "p2": 4.0},
            {"symbol": "cm_nu:0", "s": 1.0, "nu": 0.0, "p1": 3.0, "p2": 6.0},
            {"symbol": "ks_frac:1", "s": 1.5, "nu": 1.0, "p1": 1.5, "p2": 3.0},
            {"symbol": "cm_nu:0.5", "s": 1.0, "nu": 0.5, "p1": 1.5, "p2": 1.5},
            {"symbol": "one", "s": 2.0, "nu": 0.0, "p1": 2.0, "p2": 2.0, "q1": 1.5, "q2": 1.5, "mode": "mixed"},
            {"symbol": "ks_frac:0.5", "s": 1.0, "nu": 0.5, "p1": 2.0, "p2": 2.0, "q1": 1.5, "q2": 1.5,
             "mode": "mixed"},
        ],
        "dilation": {"symbol": "one", "s": 2.0, "nu": 0.0, "p1": 2.0, "p2": 2.0, "n": 1024,
                     "lambdas": [1, 2, 4, 8], "count": 10, "tolerance": 0.01},
        "gate_trend": {"symbol": "one", "p1": 1.2, "p2": 1.2, "margins": [0.05, 0.2, 0.5, 1.0], "count": 10},
        "pointwise": {"cases": [[1, 0.5], [1, 1.0], [2, 1.0], [2, 2.0], [2, 3.0]], "count": 20,
                      "points": 400, "extent": 12.0},
    },
    "loglemma": {
        "cases": [{"dim": 1, "p": 1.5}, {"dim": 1, "p": 4.0}, {"dim": 2, "p": 3.0, "q": 1.5},
                  {"dim": 1, "p": 2.0}],
        "n1": 256,
        "n2": 64,
        "period1": 32.0,
        "period2": 16.0,
        "max_log2_m": 10,
        "knee": 64,
        "c0": 64.0,
    },
    "decay": {"s": [0.5, 1.5], "m_max": 512, "c0": 64.0, "margin": 0.3,
              "curve": [16, 32, 64, 128, 256, 512], "test_points": 1000},
    "embedding": {
        "n": 64,
        "period": 8.0,
        "count": 50,
        "random": 50,
        "exponents": [[0.75, 2.0], [2.0, 0.75], [1.5, 3.0], [2.0, 2.0]],
        "ratio_bound": 100.0,
        "stability": 0.2,
        "frame_tol": 1e-8,
        "recon_tol": 1e-8,
    },
    "symbol": {
        "labels": ["ks_frac:0.5", "cm_nu:0.5", "cm_nu:0", "one"],
        "r": 1.0,
        "k_range": [-3, 3],
        "res": 128,
        "spread_tol": 1e-13,
        "scan_r": 2.0,
        "scan_res": [64, 128, 256, 512],
        "class_nu": 0.5,
        "class_order": 2,
        "domination": {"n": 512, "period": 64.0, "js": [-2, -1, 0, 1, 2, 3, 4], "l": 1.5, "r": 1.0,
                       "count": 6, "stability": 0.2},
        "algebra": {"pairs": 50, "r": 1.0, "res": [64, 128], "stability": 0.2},
    },
    "maximal": {"n": 64, "period": 16.0, "fields": 16, "p": 2.0, "q": 3.0, "r": 2.0, "stability": 0.2},
}


def merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def exponent_tuple(spec: dict) -> ExponentTuple:
    mode = spec.get("mode", "lebesgue")
    return ExponentTuple(
        p1=float(spec["p1"]),
        p2=float(spec["p2"]),
        s=float(spec["s"]),
        nu=float(spec.get("nu", 0.0)),
        q1=float(spec["q1"]) if "q1" in spec else None,
        q2=float(spec["q2"]) if "q2" in spec else None,
        mode=mode,
        dim=2 if mode == "mixed" else 1,
    )


def load_config(path=None) -> dict:
    """Read a TOML or JSON config merged over the defaults."""
    data = {}
    if path is not None:
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise OSError(f"cannot read config {path}: {exc}") from exc
        if path.suffix == ".json":
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode())
    cfg = merge(DEFAULTS, data)
    for i, spec in enumerate(cfg["leibniz"]["tuples"]):
        try:
            exponent_tuple(spec).validate()
        except (KeyError, ValueError) as exc:
            raise ValueError(f"leibniz.tuples[{i}]: {exc}") from exc
    return cfg
