"""Descent flow, multipliers, sweeps, and verdict dispatch."""

import math

import numpy as np
import pytest

from critvar import (FieldPair, FlowParams, WeightProfile, descend,
                     dirichlet_field, discrete_sobolev_constant, el_residual,
                     energy, existence_verdict, lagrange_multipliers, lq_norm,
                     sign_normalize, sweep_minimize)
from critvar.errors import BadSpectrum
from conftest import smooth_dirichlet_field


def _normalized_pair(grid, rng):
    u = smooth_dirichlet_field(grid, rng)
    v = smooth_dirichlet_field(grid, rng)
    return FieldPair(u=u / lq_norm(u, grid), v=v / lq_norm(v, grid))


def test_multiplier_average_is_energy(grid5, quad_weight, rng):
    for _ in range(20):
        pair = _normalized_pair(grid5, rng)
        l1, l2 = lagrange_multipliers(pair, quad_weight, quad_weight, 3.0, grid5)
        rep = energy(pair, quad_weight, quad_weight, 3.0, grid5)
        assert (l1 + l2) / 2.0 == pytest.approx(rep.value, rel=1e-12)


def test_el_residual_zero_pair(grid5, unit_weight):
    zero = np.zeros_like(grid5.nodes)
    pair = FieldPair(u=zero, v=zero.copy())
    assert el_residual(pair, 0.0, 0.0, unit_weight, unit_weight, 1.0, grid5) == 0.0


def test_sign_normalize(grid5, rng):
    u = smooth_dirichlet_field(grid5, rng)
    pair = sign_normalize(FieldPair(u=u, v=-u))
    assert np.min(pair.u * pair.v) >= 0.0


def test_descend_converges_and_satisfies_system(grid5, quartic_weight, quick_flow):
    res = descend(quartic_weight, quartic_weight, 10.0, grid5, quick_flow)
    assert res.status == "converged"
    assert res.el_residual <= 10.0 * quick_flow.grad_tol
    assert lq_norm(res.pair.u, grid5) == pytest.approx(1.0, rel=1e-12)
    assert lq_norm(res.pair.v, grid5) == pytest.approx(1.0, rel=1e-12)
    # value consistent with direct evaluation
    rep = energy(res.pair, quartic_weight, quartic_weight, 10.0, grid5)
    assert res.q_lambda == pytest.approx(rep.value, rel=1e-12)


def test_symmetric_data_stays_symmetric(grid5, quad_weight, quick_flow):
    res = descend(quad_weight, quad_weight, 5.0, grid5, quick_flow)
    assert np.max(np.abs(res.pair.u - res.pair.v)) < 1e-12


def test_best_trace_nonincreasing(grid5, quad_weight, quick_flow):
    res = descend(quad_weight, quad_weight, 8.0, grid5, quick_flow)
    assert np.all(np.diff(res.best_trace) <= 0.0)


def test_random_init_beats_nothing(grid5, quartic_weight):
    params = FlowParams(max_iters=4000, grad_tol=1e-5, init="random", seed=7)
    res = descend(quartic_weight, quartic_weight, 10.0, grid5, params)
    assert res.status == "converged"


def test_eigenfunction_init(grid5, quad_weight):
    # coupling above the quadratic-regime threshold, where a minimizer exists
    params = FlowParams(max_iters=4000, grad_tol=1e-5, init="eigenfunction")
    res = descend(quad_weight, quad_weight, 8.0, grid5, params)
    assert res.status in ("converged", "stalled")
    assert res.q_lambda < 20.0


def test_custom_init(grid5, quad_weight):
    u = dirichlet_field(1.0 - grid5.nodes ** 2, grid5)
    params = FlowParams(max_iters=2000, grad_tol=1e-5, init="custom",
                        init_pair=FieldPair(u=u, v=u.copy()))
    res = descend(quad_weight, quad_weight, 5.0, grid5, params)
    assert res.iterations > 0


def test_discrete_sobolev_constant_close_to_continuum(grid5_fine):
    from critvar import bubble_constants

    s_grid = discrete_sobolev_constant(
        grid5_fine, FlowParams(max_iters=20000, grad_tol=1e-7))
    # the discrete minimum sits slightly below the continuum constant
    assert s_grid == pytest.approx(bubble_constants(5).s, rel=1e-2)
    assert s_grid < bubble_constants(5).s


def test_sweep_monotone_and_pooled(grid5, quad_weight, quick_flow):
    lams = [2.0, 5.0, 8.0, 11.0, 14.0]
    rows = sweep_minimize(lams, quad_weight, quad_weight, grid5, quick_flow)
    qs = [r.result.q_lambda for r in rows]
    assert all(b - a <= 1e-8 for a, b in zip(qs, qs[1:]))
    assert [r.lam for r in rows] == lams


def test_sweep_parallel_matches_order(grid5, quartic_weight):
    params = FlowParams(max_iters=3000, grad_tol=1e-5)
    lams = [4.0, 9.0]
    rows = sweep_minimize(lams, quartic_weight, quartic_weight, grid5,
                          params, jobs=2)
    assert [r.lam for r in rows] == lams
    qs = [r.result.q_lambda for r in rows]
    assert qs[1] <= qs[0] + 1e-8


# --- verdict dispatch -------------------------------------------------------


def test_verdict_supercritical_powers():
    v = existence_verdict(5, 4.0, 4.0, 1.0, 1.0, lam=5.0, lam_tilde=20.0)
    assert v.verdict == "achieved_by_theorem"
    assert v.case_id == "existence.supercritical-powers"


def test_verdict_quadratic_both_threshold():
    below = existence_verdict(5, 2.0, 2.0, 1.0, 1.0, lam=6.5, lam_tilde=30.0)
    above = existence_verdict(5, 2.0, 2.0, 1.0, 1.0, lam=6.6, lam_tilde=30.0)
    assert below.verdict == "outside_theory"
    assert above.verdict == "achieved_by_theorem"
    assert above.case_id == "existence.quadratic-both"
    assert above.thresholds_used["gap_threshold"] == pytest.approx(105.0 / 16.0)


def test_verdict_mixed_quadratic():
    v = existence_verdict(5, 2.0, 4.0, 1.0, 1.0, lam=4.0, lam_tilde=30.0)
    assert v.verdict == "achieved_by_theorem"
    assert v.case_id == "existence.quadratic-first"
    v2 = existence_verdict(5, 4.0, 2.0, 1.0, 1.0, lam=4.0, lam_tilde=30.0)
    assert v2.case_id == "existence.quadratic-second"


def test_verdict_gap_only_above_lambda_tilde():
    v = existence_verdict(5, 4.0, 4.0, 1.0, 1.0, lam=25.0, lam_tilde=20.0)
    assert v.verdict == "energy_gap_only"


def test_verdict_dim4_quadratic_is_gap_only():
    v = existence_verdict(4, 2.0, 2.0, 1.0, 1.0, lam=5.0, lam_tilde=30.0)
    assert v.verdict == "energy_gap_only"
    assert v.case_id == "gap.quadratic-both"


def test_verdict_nonexistence_from_certified_bound():
    v = existence_verdict(5, 2.0, 2.0, 1.0, 1.0, lam=2.0, lam_tilde=30.0,
                          omega_estimate=3.125)
    assert v.verdict == "no_minimizer_by_theorem"


def test_verdict_subquadratic_outside():
    v = existence_verdict(5, 1.5, 4.0, 1.0, 1.0, lam=5.0, lam_tilde=30.0)
    assert v.verdict == "outside_theory"


def test_verdict_bad_spectrum():
    with pytest.raises(BadSpectrum):
        existence_verdict(5, 2.0, 2.0, 1.0, 1.0, lam=1.0, lam_tilde=0.0)
