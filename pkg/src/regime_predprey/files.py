"""Scenario files, CSV exports and machine-readable reports.

Scenario files are YAML::

    regimes:                 # one record per regime, in order 1..N
      - {a1: 1.0, b1: 1.0, c1: 1.0, a2: 0.5, b2: 1.0, c2: 2.0,
         m1: 1.0, m2: 1.0, m3: 1.0, alpha: 0.5, beta: 0.5}
    generator: [[-1.0, 1.0], [1.0, -1.0]]   # row-major switching rates
    x0: 1.0
    y0: 1.0
    initial_regime: 1        # 1-based, default 1
    rho: 0.0                 # correlation of the two noises, default 0
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import yaml

from .model import Scenario


def load_scenario(path) -> Scenario:
    """Read a YAML (or JSON) scenario file. Does not validate."""
    text = Path(path).read_text()
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: scenario must be a mapping")
    return Scenario.from_dict(data)


def dump_scenario(s: Scenario, path) -> None:
    Path(path).write_text(yaml.safe_dump(s.to_dict(), sort_keys=False))


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _clean(obj.item())
    return obj


def dumps_report(obj) -> str:
    """Deterministic JSON: stable key order, repr floats, non-finite as null."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(obj, path) -> None:
    Path(path).write_text(dumps_report(obj))


def write_histogram_csv(dist, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_low", "bin_high", "regime", "mass"])
        for lo, hi, i, m in dist.rows():
            w.writerow([format(lo, ".17g"), format(hi, ".17g"), i, format(m, ".17g")])


def write_rows_csv(header, rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else
                        ("" if v is None else v) for v in row])
