"""Low-coherence sequence design by hypersphere collision resolution.

Each sequence is the centre of a small ball of radius ``r_seq`` on the unit
sphere in ``C^L``; each PAPR probe is the centre of a ball of radius
``r_papr``. Overlapping balls mark violated coherence or PAPR constraints and
are pushed apart. The coherence target ``gamma_mut = 1 - 2 r_seq**2`` is
tightened or relaxed from iteration to iteration depending on progress.

Typical use::

    cfg = SolverConfig(L=16, N=40, papr_threshold=2.0, rng_seed=1)
    best, report = run(cfg)
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import DimensionError, ValidationError
from .model import (
    SequenceSet,
    SubcarrierAssignment,
    build_papr_probes,
    coherence_of,
    evaluate,
    random_unit_rows,
)

# Separation below which a displacement direction is numerically meaningless.
DEGENERATE_DIST = 1e-7


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters. Omitted fields take the published simulation defaults."""

    L: int
    N: int
    papr_threshold: float = math.inf
    assignment: Optional[SubcarrierAssignment] = None
    K: int = 5
    K1: int = 20
    gamma: float = 1e-4
    rho: float = 0.05
    tau_seq: float = 0.05
    tau_papr: float = 0.05
    max_iterations: int = 10_000
    stall_limit: int = 500
    papr_inner_cap: int = 1000
    rng_seed: int = 0
    initial_sequences: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.assignment is None:
            object.__setattr__(self, "assignment", SubcarrierAssignment.contiguous(self.L))
        if self.L < 2 or self.N < 2:
            raise ValidationError(f"need L >= 2 and N >= 2, got L={self.L}, N={self.N}")
        if self.assignment.length != self.L:
            raise ValidationError(
                f"assignment: {self.assignment.length} subcarriers given for L={self.L}"
            )
        checks = [
            ("K", self.K >= 1, "must be >= 1"),
            ("K1", self.K1 >= 1, "must be >= 1"),
            ("gamma", self.gamma > 0, "must be > 0"),
            ("rho", 0 < self.rho < 1, "must lie in (0, 1)"),
            ("tau_seq", self.tau_seq > 0, "must be > 0"),
            ("tau_papr", self.tau_papr > 0, "must be > 0"),
            ("max_iterations", self.max_iterations >= 1, "must be >= 1"),
            ("stall_limit", self.stall_limit >= 1, "must be >= 1"),
            ("papr_inner_cap", self.papr_inner_cap >= 1, "must be >= 1"),
            ("papr_threshold", self.papr_threshold >= 1, "must be >= 1 (PAPR < 1 is infeasible)"),
        ]
        for name, ok, why in checks:
            if not ok:
                raise ValidationError(f"{name}={getattr(self, name)!r} {why}")
        if self.initial_sequences is not None:
            p0 = np.asarray(self.initial_sequences, dtype=np.complex128)
            if p0.shape != (self.N, self.L):
                raise DimensionError(
                    f"initial_sequences has shape {p0.shape}, expected ({self.N}, {self.L})"
                )

    @property
    def papr_constrained(self):
        return self.papr_threshold < self.L

    def echo(self):
        """Plain-dict view of every resolved parameter."""
        out = {k: v for k, v in asdict(self).items() if k not in ("assignment", "initial_sequences")}
        out["papr_threshold"] = _json_float(self.papr_threshold)
        out["subcarriers"] = [int(x) for x in self.assignment.indices]
        out["n_subcarriers"] = self.assignment.n_subcarriers
        out["n_samples"] = self.assignment.n_samples
        out["warm_start"] = self.initial_sequences is not None
        return out


def _json_float(x):
    return "inf" if math.isinf(x) else float(x)


@dataclass
class SolverState:
    config: SolverConfig
    rng: np.random.Generator
    probes: np.ndarray = field(repr=False)
    current: np.ndarray = field(repr=False)
    best: Optional[np.ndarray] = field(repr=False)
    gamma_bound: float
    gamma_mut: float
    r_seq: float
    r_papr: Optional[float]
    r_bound: float
    papr_reach: Optional[float]
    mu_min: float
    mu_min_prev_window: float
    tau_seq: float
    tau_papr: float
    iteration: int = 0
    stall_counter: int = 0
    last_iteration_feasible: bool = False

    @property
    def current_set(self):
        return SequenceSet(self.current.copy(), self.config.assignment)

    @property
    def best_set(self):
        if self.best is None:
            return None
        return SequenceSet(self.best.copy(), self.config.assignment)


@dataclass(frozen=True)
class IterationRecord:
    """What the progress callback receives once per outer iteration."""

    iteration: int
    mu: float
    mu_min: float
    r_seq: float
    tau_seq: float
    tau_papr: float
    gamma_mut: float
    r_papr: Optional[float]
    feasible: bool
    papr_rounds: int


@dataclass
class RunReport:
    config: dict
    trajectory: list
    termination_reason: str
    iterations: int
    wall_time_seconds: float
    papr_stage_skipped: bool
    final_metrics: Optional[dict] = None

    def to_dict(self):
        return {
            "config": self.config,
            "termination_reason": self.termination_reason,
            "iterations": self.iterations,
            "wall_time_seconds": self.wall_time_seconds,
            "papr_stage_skipped": self.papr_stage_skipped,
            "final_metrics": self.final_metrics,
            "coherence_trajectory": {
                "mu": [t[0] for t in self.trajectory],
                "mu_min": [t[1] for t in self.trajectory],
            },
        }


def papr_reach(threshold, length):
    """``r_seq + r_papr``: separation below which a probe collision occurs."""
    return math.sqrt(2.0 * (1.0 - math.sqrt(threshold / length)))


def _normalize_rows(p, rows):
    p[rows] /= np.linalg.norm(p[rows], axis=1, keepdims=True)


def initialize(config):
    """Fresh solver state: random start, coherence target at the Welch bound."""
    rng = np.random.default_rng(config.rng_seed)
    if config.initial_sequences is not None:
        p = np.array(config.initial_sequences, dtype=np.complex128)
        p /= np.linalg.norm(p, axis=1, keepdims=True)
    else:
        p = random_unit_rows(rng, config.N, config.L)
    if config.N > config.L:
        gamma_bound = math.sqrt((config.N - config.L) / (config.L * (config.N - 1)))
    else:
        gamma_bound = 0.0
    r_bound = math.sqrt(0.5 * (1.0 - gamma_bound))
    reach = papr_reach(config.papr_threshold, config.L) if config.papr_constrained else None
    return SolverState(
        config=config,
        rng=rng,
        probes=np.ascontiguousarray(build_papr_probes(config.assignment).probes),
        current=np.ascontiguousarray(p),
        best=None,
        gamma_bound=gamma_bound,
        gamma_mut=1.0 - 2.0 * r_bound**2,
        r_seq=r_bound,
        r_papr=None if reach is None else reach - r_bound,
        r_bound=r_bound,
        papr_reach=reach,
        mu_min=1.0,
        mu_min_prev_window=1.0,
        tau_seq=config.tau_seq,
        tau_papr=config.tau_papr,
    )


def sequence_collision_round(state):
    """One parallel round of sequence-sequence collision resolution."""
    p = state.current
    two_r = 2.0 * state.r_seq
    u, n_deg = kernels.sequence_displacement(p, two_r, DEGENERATE_DIST)
    for i in np.flatnonzero(n_deg):
        for _ in range(n_deg[i]):
            u[i] += two_r * random_unit_rows(state.rng, 1, p.shape[1])[0]
    moved = np.flatnonzero(np.any(u != 0, axis=1))
    if moved.size:
        p[moved] += state.tau_seq * u[moved]
        _normalize_rows(p, moved)
    return state


def papr_collision_round(state):
    """One parallel round of sequence-probe collision resolution.

    Returns the number of sequences that collided with at least one probe
    before the move; zero means the PAPR constraint already held.
    """
    p = state.current
    reach = state.papr_reach
    ubar, n_hits, n_deg = kernels.papr_displacement(p, state.probes, reach, DEGENERATE_DIST)
    colliding = np.flatnonzero(n_hits)
    for i in colliding:
        for _ in range(n_deg[i]):
            ubar[i] += reach * random_unit_rows(state.rng, 1, p.shape[1])[0]
        norm = np.linalg.norm(ubar[i])
        if norm == 0.0:
            direction = random_unit_rows(state.rng, 1, p.shape[1])[0]
        else:
            direction = ubar[i] / norm
        p[i] += state.tau_papr * direction
    if colliding.size:
        _normalize_rows(p, colliding)
    return colliding.size


def papr_collision_resolve(state):
    """Push sequences off the PAPR probes until none collide or the cap is hit.

    Returns
    -------
    feasible : bool
        True when the final check found no collisions.
    rounds : int
        Number of update rounds performed.
    """
    if not state.config.papr_constrained:
        return True, 0
    rounds = 0
    while True:
        if papr_collision_round(state) == 0:
            return True, rounds
        rounds += 1
        if rounds >= state.config.papr_inner_cap:
            # the cap-th move still needs a final check
            ok = _papr_clear(state)
            return ok, rounds


def _papr_clear(state):
    _, n_hits, _ = kernels.papr_displacement(
        state.current, state.probes, state.papr_reach, DEGENERATE_DIST
    )
    return not n_hits.any()


def update_radii(state, mu_current):
    """Grow, reset or shrink ``r_seq`` based on the coherence just measured.

    Reads ``state.mu_min`` as the best value *before* this iteration.
    """
    gamma = state.config.gamma
    if mu_current < state.mu_min:
        r = min(state.r_seq + gamma, state.r_bound)
    elif mu_current <= state.gamma_mut:
        r = state.r_bound
    else:
        r = state.r_seq - gamma
    state.r_seq = max(r, gamma)
    state.gamma_mut = 1.0 - 2.0 * state.r_seq**2
    if state.papr_reach is not None:
        state.r_papr = state.papr_reach - state.r_seq
    return state


def update_step_sizes(state, rho=None):
    """Scale both step sizes by ``1 + rho`` on progress, ``1 - rho`` otherwise."""
    rho = state.config.rho if rho is None else rho
    improved = state.mu_min < state.mu_min_prev_window
    factor = 1.0 - rho + 2.0 * rho * improved
    state.tau_seq *= factor
    state.tau_papr *= factor
    state.mu_min_prev_window = state.mu_min
    return state


def iterate(state):
    """Run one outer iteration in place and describe it."""
    cfg = state.config
    for _ in range(cfg.K):
        sequence_collision_round(state)
    feasible, rounds = papr_collision_resolve(state)
    state.last_iteration_feasible = feasible
    mu = coherence_of(state.current)
    update_radii(state, mu)
    state.iteration += 1
    if feasible and mu < state.mu_min:
        state.mu_min = mu
        state.best = state.current.copy()
        state.stall_counter = 0
    else:
        state.stall_counter += 1
    if state.iteration % cfg.K1 == 0:
        update_step_sizes(state)
    return IterationRecord(
        iteration=state.iteration,
        mu=mu,
        mu_min=state.mu_min,
        r_seq=state.r_seq,
        tau_seq=state.tau_seq,
        tau_papr=state.tau_papr,
        gamma_mut=state.gamma_mut,
        r_papr=state.r_papr,
        feasible=feasible,
        papr_rounds=rounds,
    )


def run(config, progress: Optional[Callable[[IterationRecord], None]] = None):
    """Design a low-coherence set under ``config``.

    Parameters
    ----------
    config : SolverConfig
    progress : callable, optional
        Called with an :class:`IterationRecord` after every outer iteration.

    Returns
    -------
    best : SequenceSet or None
        Lowest-coherence PAPR-feasible set seen, or None when no iteration
        ever produced a feasible set (``report.termination_reason`` is then
        ``"no_feasible_solution"``).
    report : RunReport
    """
    t0 = time.perf_counter()
    state = initialize(config)
    trajectory = []
    while True:
        rec = iterate(state)
        trajectory.append((rec.mu, rec.mu_min))
        if progress is not None:
            progress(rec)
        if state.iteration >= config.max_iterations:
            reason = "max_iterations"
            break
        if state.stall_counter > config.stall_limit:
            reason = "stalled"
            break
    best = state.best_set
    report = RunReport(
        config=config.echo(),
        trajectory=trajectory,
        termination_reason=reason if best is not None else "no_feasible_solution",
        iterations=state.iteration,
        wall_time_seconds=time.perf_counter() - t0,
        papr_stage_skipped=not config.papr_constrained,
    )
    if best is not None:
        report.final_metrics = evaluate(best).to_dict()
    return best, report
