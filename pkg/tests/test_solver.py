import math

import numpy as np
import pytest

from seqforge import SubcarrierAssignment, ValidationError, coherence, welch_bound
from seqforge.baselines import random_gaussian_set
from seqforge.model import build_papr_probes, papr_values, random_unit_rows
from seqforge.solver import (
    SolverConfig,
    initialize,
    iterate,
    papr_collision_resolve,
    papr_reach,
    run,
    sequence_collision_round,
    update_radii,
    update_step_sizes,
)


def small_config(**kw):
    base = dict(L=16, N=40, assignment=SubcarrierAssignment.contiguous(16, n_samples=256),
                rng_seed=1)
    base.update(kw)
    return SolverConfig(**base)


# --- config ----------------------------------------------------------------

def test_config_defaults_match_published_setup():
    cfg = SolverConfig(L=16, N=40)
    assert (cfg.K, cfg.K1, cfg.rho, cfg.gamma) == (5, 20, 0.05, 1e-4)
    assert cfg.tau_seq == cfg.tau_papr == 0.05
    assert (cfg.max_iterations, cfg.stall_limit) == (10_000, 500)
    assert cfg.assignment.n_samples == cfg.assignment.n_subcarriers == 1024
    assert list(cfg.assignment.indices) == list(range(1, 17))
    assert math.isinf(cfg.papr_threshold) and not cfg.papr_constrained


@pytest.mark.parametrize(
    "field,value",
    [("K", 0), ("K1", 0), ("gamma", 0.0), ("rho", 1.0), ("rho", 0.0), ("tau_seq", 0.0),
     ("papr_inner_cap", 0), ("papr_threshold", 0.5)],
)
def test_config_validation_names_field(field, value):
    with pytest.raises(ValidationError, match=field):
        SolverConfig(L=8, N=12, **{field: value})


def test_config_vacuous_threshold():
    assert not SolverConfig(L=8, N=12, papr_threshold=8.0).papr_constrained
    assert SolverConfig(L=8, N=12, papr_threshold=7.9).papr_constrained


# --- initialize --------------------------------------------------------------

def test_initialize_radii():
    st = initialize(SolverConfig(L=36, N=100, rng_seed=3))
    assert st.gamma_mut == pytest.approx(0.134005042034561610, abs=1e-12)
    assert st.r_seq == pytest.approx(0.658025439464705798, abs=1e-12)
    assert st.r_seq == st.r_bound
    assert st.mu_min == st.mu_min_prev_window == 1.0
    assert st.best is None


def test_initialize_deterministic_and_shared_with_baseline():
    a = initialize(small_config(rng_seed=7)).current
    b = initialize(small_config(rng_seed=7)).current
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, random_gaussian_set(16, 40, 7).sequences)
    assert np.allclose(np.linalg.norm(a, axis=1), 1, atol=1e-12)


def test_initialize_papr_radius():
    st = initialize(small_config(papr_threshold=2.0))
    assert st.r_seq + st.r_papr == pytest.approx(math.sqrt(2 * (1 - math.sqrt(2 / 16))), abs=1e-12)


# --- sequence collisions -----------------------------------------------------

def test_no_collision_leaves_orthonormal_set_unchanged():
    st = initialize(SolverConfig(L=4, N=4, rng_seed=0))
    st.current = np.eye(4, dtype=np.complex128)
    assert 2 * st.r_seq == pytest.approx(math.sqrt(2))
    sequence_collision_round(st)
    np.testing.assert_array_equal(st.current, np.eye(4))


def test_collision_detected_at_overlap():
    # Gamma_mut = 0.5 -> R_seq = 0.5; |<p1,p2>| = 0.6 -> |d| = sqrt(0.8) < 1
    assert math.sqrt(2 - 1.2) == pytest.approx(0.894427190999916, abs=1e-15)
    st = initialize(SolverConfig(L=2, N=2, rng_seed=0))
    st.r_seq = 0.5
    st.current = np.array([[1, 0], [0.6, 0.8]], dtype=np.complex128)
    before = st.current.copy()
    sequence_collision_round(st)
    assert not np.array_equal(st.current, before)


@pytest.mark.parametrize("tau", [1e-3, 1e-2, 0.05])
def test_single_collision_separation_grows(tau):
    st = initialize(SolverConfig(L=3, N=2, rng_seed=0, tau_seq=tau))
    st.r_seq = 0.5
    p = np.array([[1, 0, 0], [0.6, 0.8j, 0]], dtype=np.complex128)
    st.current = p.copy()

    def dist(q):
        z = np.vdot(q[0], q[1])
        return np.linalg.norm(q[1] - z / abs(z) * q[0])

    d0 = dist(st.current)
    sequence_collision_round(st)
    assert dist(st.current) > d0
    assert np.allclose(np.linalg.norm(st.current, axis=1), 1, atol=1e-12)


def test_coincident_pair_is_split():
    st = initialize(SolverConfig(L=4, N=2, rng_seed=5))
    p = np.full(4, 0.5, dtype=np.complex128)
    st.current = np.array([p, p])
    sequence_collision_round(st)
    assert coherence(st.current) < 1 - 1e-6
    assert np.allclose(np.linalg.norm(st.current, axis=1), 1, atol=1e-12)


def test_sequence_round_equivariant_under_relabeling(rng):
    cfg = small_config()
    a = initialize(cfg)
    b = initialize(cfg)
    perm = rng.permutation(cfg.N)
    b.current = a.current[perm].copy()
    sequence_collision_round(a)
    sequence_collision_round(b)
    np.testing.assert_allclose(b.current, a.current[perm], atol=1e-12)


# --- PAPR collisions ---------------------------------------------------------

def test_papr_reach_value():
    assert papr_reach(4, 36) == pytest.approx(1.1547005383792515, abs=1e-12)


def test_papr_stage_leaves_compliant_sequences():
    cfg = SolverConfig(L=36, N=40, papr_threshold=4.0,
                       assignment=SubcarrierAssignment.contiguous(36, n_samples=144))
    st = initialize(cfg)
    rows = np.zeros((40, 36), dtype=np.complex128)
    rows[np.arange(40), np.arange(40) % 36] = 1.0
    st.current = rows.copy()
    feasible, rounds = papr_collision_resolve(st)
    assert feasible and rounds == 0
    np.testing.assert_array_equal(st.current, rows)


def test_papr_stage_resolves_peaky_sequence():
    cfg = SolverConfig(L=8, N=10, papr_threshold=2.0,
                       assignment=SubcarrierAssignment.contiguous(8, n_samples=64))
    st = initialize(cfg)
    st.current[0] = np.full(8, 1 / math.sqrt(8))  # PAPR = L, collides with probe 0
    probes = build_papr_probes(cfg.assignment)
    assert papr_values(st.current[:1], probes)[0] == pytest.approx(8.0)
    feasible, rounds = papr_collision_resolve(st)
    assert feasible and rounds > 0
    assert papr_values(st.current, probes).max() <= 2.0 + 1e-9
    assert np.allclose(np.linalg.norm(st.current, axis=1), 1, atol=1e-12)


def test_papr_stage_skipped_when_vacuous():
    st = initialize(small_config(papr_threshold=16.0))
    before = st.current.copy()
    assert papr_collision_resolve(st) == (True, 0)
    np.testing.assert_array_equal(st.current, before)


def test_papr_stage_cap_reports_infeasible():
    cfg = small_config(papr_threshold=1.0 + 1e-6, papr_inner_cap=3)
    st = initialize(cfg)
    feasible, rounds = papr_collision_resolve(st)
    assert not feasible and rounds == 3


# --- parameter updates --------------------------------------------------------

def _radius_state(r_seq=0.6, mu_min=0.5, threshold=2.0):
    st = initialize(small_config(papr_threshold=threshold))
    st.r_seq = r_seq
    st.gamma_mut = 1 - 2 * r_seq**2
    st.mu_min = mu_min
    return st


def test_update_radii_shrinks_on_violation():
    st = _radius_state(mu_min=0.2)
    update_radii(st, mu_current=st.gamma_mut + 0.1)
    assert st.r_seq == pytest.approx(0.5999, abs=1e-15)
    assert st.gamma_mut == 1 - 2 * st.r_seq**2
    assert st.r_seq + st.r_papr == pytest.approx(st.papr_reach, abs=1e-12)


def test_update_radii_resets_when_stuck():
    st = _radius_state(mu_min=0.2)
    update_radii(st, mu_current=0.25)  # mu_min <= mu <= gamma_mut = 0.28
    assert st.r_seq == st.r_bound


def test_update_radii_grows_on_improvement_capped():
    st = _radius_state(mu_min=0.5)
    update_radii(st, mu_current=0.4)
    assert st.r_seq == pytest.approx(0.6001, abs=1e-15)
    st = _radius_state(r_seq=initialize(small_config()).r_bound, mu_min=0.5)
    update_radii(st, mu_current=0.4)
    assert st.r_seq == st.r_bound


def test_update_radii_floor():
    st = _radius_state(r_seq=1.5e-4, mu_min=0.5)
    update_radii(st, mu_current=1.0)
    assert st.r_seq == st.config.gamma
    update_radii(st, mu_current=1.0)
    assert st.r_seq == st.config.gamma


@pytest.mark.parametrize("improved,expected", [(True, 0.0525), (False, 0.0475)])
def test_update_step_sizes(improved, expected):
    st = initialize(small_config())
    st.mu_min_prev_window = 0.5
    st.mu_min = 0.4 if improved else 0.5
    update_step_sizes(st)
    assert st.tau_seq == pytest.approx(expected, abs=1e-15)
    assert st.tau_papr == pytest.approx(expected, abs=1e-15)
    assert st.mu_min_prev_window == st.mu_min


def test_update_step_sizes_zero_rate():
    st = initialize(small_config())
    st.mu_min = 0.1
    update_step_sizes(st, rho=0.0)
    assert st.tau_seq == st.tau_papr == 0.05


# --- full runs -----------------------------------------------------------------

def test_run_improves_on_start():
    cfg = small_config(max_iterations=300)
    best, report = run(cfg)
    start = coherence(random_gaussian_set(16, 40, cfg.rng_seed))
    assert best is not None
    assert report.final_metrics["coherence"] <= start
    assert len(report.trajectory) == report.iterations == 300
    assert report.termination_reason == "max_iterations"
    assert report.papr_stage_skipped


def test_run_is_deterministic():
    cfg = small_config(papr_threshold=2.0, max_iterations=120)
    a, _ = run(cfg)
    b, _ = run(cfg)
    np.testing.assert_array_equal(a.sequences, b.sequences)


def test_run_stalls():
    _, report = run(small_config(stall_limit=5, max_iterations=10_000))
    assert report.termination_reason == "stalled"
    mus = [m for _, m in report.trajectory]
    # last improvement is stall_limit + 1 iterations before the end
    assert mus[-1] == mus[-7] and mus[-7] < mus[-8]


def test_run_near_infeasible_returns_no_solution():
    cfg = small_config(papr_threshold=1.0 + 1e-6, papr_inner_cap=2, max_iterations=5)
    best, report = run(cfg)
    assert best is None
    assert report.termination_reason == "no_feasible_solution"
    assert report.final_metrics is None


def test_run_invariants_each_iteration():
    cfg = small_config(papr_threshold=2.0, max_iterations=150)
    st = initialize(cfg)
    probes = build_papr_probes(cfg.assignment)
    prev = 1.0
    for _ in range(150):
        rec = iterate(st)
        assert np.all(np.abs(np.linalg.norm(st.current, axis=1) - 1) <= 1e-9)
        assert st.gamma_mut == pytest.approx(1 - 2 * st.r_seq**2, abs=1e-12)
        assert st.r_seq + st.r_papr == pytest.approx(st.papr_reach, abs=1e-12)
        assert rec.mu_min <= prev
        prev = rec.mu_min
        if st.best is not None:
            assert coherence(st.best) == pytest.approx(st.mu_min, abs=1e-12)
            assert papr_values(st.best, probes).max() <= 2.0 + 1e-9


def test_warm_start_uses_given_set(rng):
    p0 = random_unit_rows(rng, 40, 16)
    st = initialize(small_config(initial_sequences=p0))
    np.testing.assert_allclose(st.current, p0, rtol=0, atol=1e-15)


def test_progress_callback_once_per_iteration():
    seen = []
    run(small_config(max_iterations=25), progress=seen.append)
    assert [r.iteration for r in seen] == list(range(1, 26))
    assert {"mu", "mu_min", "r_seq", "tau_seq", "tau_papr"} <= set(vars(seen[0]))


def test_small_n_below_length_runs():
    cfg = SolverConfig(L=8, N=6, max_iterations=50, rng_seed=0)
    with pytest.warns(UserWarning):
        best, _ = run(cfg)
    assert coherence(best) < 0.5
    with pytest.raises(Exception):
        welch_bound(8, 6)
