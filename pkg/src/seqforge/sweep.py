"""Parameter sweeps producing one plot-ready CSV table.

Every (axis value, seed) point runs an independent solver. Rows come out in
(value, seed) order whatever the completion order, followed by one ``best``
row per axis value (lowest ``mu_min``, lower seed on ties), and optionally
baseline rows.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .baselines import (
    ZcFamilySpec,
    largest_odd_prime_at_most,
    select_lowest_coherence_subset,
    zc_generate,
)
from .config import build_config, parse_float
from .errors import DomainError, ValidationError
from .model import build_papr_probes, evaluate
from .solver import run

CSV_MAGIC = "# seqforge-sweep v1"
COLUMNS = ("kind", "method", "axis", "value", "seed", "L", "N", "papr_threshold",
           "status", "mu_min", "max_papr", "welch_bound", "iterations",
           "termination", "wall_time_s")
AXES = {"papr_threshold": "papr_threshold", "sequence_length": "L", "sequence_count": "N"}
UNAVAILABLE_BASELINES = ("NOGBSS", "NCBGSS", "BGSSRMC", "ETF")
JOBS_ENV = "SEQFORGE_JOBS"


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    fixed: dict = field(default_factory=dict)
    seeds_per_point: int = 1
    seed_base: int = 0

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValidationError(f"axis must be one of {sorted(AXES)}, got {self.axis!r}")
        values = tuple(self.values)
        if not values:
            raise ValidationError("values must be non-empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValidationError(f"values must be strictly increasing, got {list(values)}")
        if self.seeds_per_point < 1:
            raise ValidationError(f"seeds_per_point must be >= 1, got {self.seeds_per_point}")
        if AXES[self.axis] in self.fixed:
            raise ValidationError(f"{AXES[self.axis]} is the sweep axis and cannot also be fixed")
        object.__setattr__(self, "values", values)

    def points(self):
        key = AXES[self.axis]
        for value in self.values:
            for k in range(self.seeds_per_point):
                params = dict(self.fixed)
                params[key] = value
                params["seed"] = self.seed_base + k
                yield value, params


def default_jobs():
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def run_point(params):
    """Solve one sweep point; returns a row dict (never raises on infeasibility)."""
    cfg = build_config(params)
    best, report = run(cfg)
    m = report.final_metrics
    return {
        "L": cfg.L,
        "N": cfg.N,
        "papr_threshold": cfg.papr_threshold,
        "status": "feasible" if best is not None else "no_feasible_solution",
        "mu_min": m["coherence"] if m else None,
        "max_papr": m["max_papr"] if m else None,
        "welch_bound": m["welch_bound"] if m else _welch_or_none(cfg.L, cfg.N),
        "iterations": report.iterations,
        "termination": report.termination_reason,
        "wall_time_s": report.wall_time_seconds,
    }


def _welch_or_none(length, n):
    return math.sqrt((n - length) / (length * (n - 1))) if n > length else None


def zc_baseline_row(params):
    """Best-effort ZC comparison at one sweep point (measured PAPR, not designed)."""
    cfg = build_config(params)
    row = {"L": cfg.L, "N": cfg.N, "papr_threshold": cfg.papr_threshold,
           "welch_bound": _welch_or_none(cfg.L, cfg.N)}
    try:
        zc_len = largest_odd_prime_at_most(cfg.L)
        n_roots = zc_len - 1
        shifts = min(zc_len, -(-cfg.N // n_roots))
        family = zc_generate(ZcFamilySpec.full(zc_len, shifts), cfg.L, cfg.assignment)
        if family.n_sequences < cfg.N:
            raise DomainError("family too small")
        chosen = select_lowest_coherence_subset(family, cfg.N)
    except DomainError:
        row["status"] = "unavailable"
        return row
    m = evaluate(chosen, build_papr_probes(cfg.assignment))
    row.update(status="measured", mu_min=m.coherence, max_papr=m.max_papr)
    return row


def run_sweep(spec, jobs=1, baselines=False, timing=True):
    """Run all points and return the CSV text."""
    points = list(spec.points())
    params = [p for _, p in points]
    if jobs > 1 and len(params) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_point, params))
    else:
        results = [run_point(p) for p in params]

    rows = []
    for (value, p), res in zip(points, results):
        rows.append({"kind": "run", "method": "loceda", "axis": spec.axis,
                     "value": value, "seed": p["seed"], **res})
    for value in spec.values:
        group = [r for r in rows if r["value"] == value]
        feasible = [r for r in group if r["mu_min"] is not None]
        if feasible:
            best = min(feasible, key=lambda r: (r["mu_min"], r["seed"]))
        else:
            best = min(group, key=lambda r: r["seed"])
        rows.append({**best, "kind": "best"})
    if baselines:
        key = AXES[spec.axis]
        for value in spec.values:
            params = dict(spec.fixed)
            params[key] = value
            zc = zc_baseline_row(params)
            rows.append({"kind": "baseline", "method": "ZC", "axis": spec.axis,
                         "value": value, **zc})
            for name in UNAVAILABLE_BASELINES:
                rows.append({"kind": "baseline", "method": name, "axis": spec.axis,
                             "value": value, "L": zc["L"], "N": zc["N"],
                             "papr_threshold": zc["papr_threshold"],
                             "status": "unavailable"})
    if not timing:
        for r in rows:
            r.pop("wall_time_s", None)
    return format_csv(rows)


def format_csv(rows):
    buf = io.StringIO()
    buf.write(CSV_MAGIC + "\n")
    buf.write(",".join(COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(r.get(c)) for c in COLUMNS) + "\n")
    return buf.getvalue()


def parse_csv(text):
    """Inverse of :func:`format_csv` (values stay strings)."""
    lines = text.splitlines()
    if not lines or lines[0] != CSV_MAGIC:
        raise ValidationError("not a seqforge sweep CSV (missing version line)")
    header = lines[1].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[2:] if line]


def parse_axis_values(axis, text):
    if axis not in AXES:
        raise ValidationError(f"axis must be one of {sorted(AXES)}, got {axis!r}")
    parts = [t for t in str(text).split(",") if t.strip()]
    try:
        if axis == "papr_threshold":
            return tuple(parse_float(t) for t in parts)
        return tuple(int(t) for t in parts)
    except ValueError:
        raise ValidationError(f"values: cannot parse {text!r}") from None
