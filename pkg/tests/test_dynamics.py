from __future__ import annotations

import math

import numpy as np
import pytest
from oracles import gaussian_hermitian, naive_remainder_rhs, weights

from moyalsq.dynamics import (
    NumericalFailure,
    energy_convergence,
    energy_terms,
    exp_euler_step,
    nonlinear_terms,
    phi1,
    remainder_rhs,
    run_series,
    s_terms,
    simulate,
    w_rhs,
    y_step,
)
from moyalsq.field import NoiseSource, ou_path, sample_stationary, wick2, wick3
from moyalsq.params import ModelParams
from moyalsq.spectral import WeightTable, hermitian_defect, random_hermitian, semigroup_apply

W4 = WeightTable(4)


def fields(seed: int, size: int = 5):
    rng = np.random.default_rng(seed)
    a = weights(size - 1)
    z = gaussian_hermitian(rng, a, 1)[0]
    v = random_hermitian(size, rng, 0.3)
    return z, v


# right-hand sides


def test_nonlinear_terms_match_expansion():
    z, v = fields(1)
    z2 = wick2(z, W4)
    terms = nonlinear_terms(v, z, z2)
    assert len(terms) == 7
    np.testing.assert_allclose(terms[0], v @ v @ v, atol=1e-14)
    np.testing.assert_allclose(terms[4], z @ v @ z, atol=1e-14)
    # Hermitian combinations: v^3, zvz, vzv and the symmetric pairs
    for c in (terms[0], terms[2], terms[4], terms[1] + terms[3], terms[5] + terms[6]):
        assert hermitian_defect(c) < 1e-12


def test_remainder_rhs_matches_naive_loops():
    z, v = fields(2)
    c = 2 * math.pi * 0.3
    np.testing.assert_allclose(remainder_rhs(v, z, W4, c), naive_remainder_rhs(v, z, W4.a, c), atol=1e-12)


def test_remainder_rhs_special_cases():
    z, v = fields(3)
    assert np.all(remainder_rhs(v, z, W4, 0.0) == 0)
    c = 0.7
    np.testing.assert_allclose(remainder_rhs(np.zeros_like(v), z, W4, c), -c * wick3(z, W4, "adjacent"), atol=1e-13)


def test_remainder_rhs_is_sum_of_terms():
    z, v = fields(4)
    c = 1.3
    z2 = wick2(z, W4)
    total = sum(nonlinear_terms(v, z, z2)) + wick3(z, W4, "adjacent")
    np.testing.assert_allclose(remainder_rhs(v, z, W4, c), -c * total, atol=1e-12)


# exponential Euler


def test_phi1_values():
    x = np.array([0.0, 1e-6, 1e-3, 1.0, 50.0])
    np.testing.assert_allclose(phi1(x), [1.0, 1 - 5e-7, -np.expm1(-1e-3) / 1e-3, 1 - math.exp(-1), 1 / 50], rtol=1e-12)


def test_exp_euler_scalar():
    w = WeightTable(0)
    a = w.a[0, 0]
    dt = 0.1 / a
    out = exp_euler_step(np.ones((1, 1)), np.zeros((1, 1)), dt, w)
    assert out[0, 0] == pytest.approx(math.exp(-0.1), rel=1e-15)
    with pytest.raises(ValueError):
        exp_euler_step(np.ones((1, 1)), np.zeros((1, 1)), 0.0, w)


def test_exp_euler_exact_for_constant_forcing():
    # dv/dt = -A v + f with f constant is integrated exactly
    w = WeightTable(0)
    a = w.a[0, 0]
    f = 2.0
    t = 0.5 / a
    v = exp_euler_step(np.array([[1.0]]), np.array([[f]]), t, w)[0, 0]
    exact = math.exp(-a * t) + f / a * (1 - math.exp(-a * t))
    assert v == pytest.approx(exact, rel=1e-14)


def test_exp_euler_first_order_on_linear_problem():
    # dv/dt = -A v - b v with b frozen at the left end: global error O(dt)
    w = WeightTable(0)
    a = w.a[0, 0]
    b = 0.5 * a
    t_end = 1.0 / a
    errs = []
    for n in (50, 100, 200):
        v = np.array([[1.0]])
        for _ in range(n):
            v = exp_euler_step(v, -b * v, t_end / n, w)
        errs.append(abs(v[0, 0] - math.exp(-(a + b) * t_end)))
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.05)


def test_y_step_fixed_point():
    z, _ = fields(5)
    z3 = wick3(z, W4, "adjacent")
    c = 0.4
    y = -c * z3 / W4.a  # A y = -c z3
    np.testing.assert_allclose(y_step(y, z3, 1e-3, c, W4), y, atol=1e-14)


# split into y and w


def test_s_terms_expansion_identity():
    rng = np.random.default_rng(6)
    z, w = fields(6)
    y = random_hermitian(5, rng, 0.2)
    z2 = wick2(z, W4)
    s2, s1, s0 = s_terms(w, y, z, z2)
    v = y + w
    full = sum(nonlinear_terms(v, z, z2))
    np.testing.assert_allclose(w @ w @ w + s2 + s1 + s0, full, atol=1e-12)
    # the w-independent part is the remainder nonlinearity at v = y
    np.testing.assert_allclose(s0, sum(nonlinear_terms(y, z, z2)), atol=1e-12)


def test_w_rhs_is_shifted_remainder_rhs():
    rng = np.random.default_rng(7)
    z, w = fields(7)
    y = random_hermitian(5, rng, 0.2)
    c = 0.9
    z2 = wick2(z, W4)
    z3 = wick3(z, W4, "adjacent")
    np.testing.assert_allclose(w_rhs(w, y, z, z2, c), remainder_rhs(w + y, z, W4, c) + c * z3, atol=1e-10)


def test_energy_trace_is_real():
    rng = np.random.default_rng(8)
    z, w = fields(8)
    y = random_hermitian(5, rng, 0.2)
    z2 = wick2(z, W4)
    s2, s1, s0 = s_terms(w, y, z, z2)
    tr = np.einsum("mn,nm->", s2 + s1 + s0, w)
    assert abs(tr.imag) < 1e-10 * max(1.0, abs(tr.real))
    diss, term = energy_terms(w, y, z, z2, 0.5, W4)
    assert diss > 0 and np.isfinite(term)


# trajectories


def test_energy_residual_first_order():
    p = ModelParams(lam=0.5, cutoff=6, seed=42)
    (h0, r0), (h1, r1) = energy_convergence(p, 2.0 / p.a00, levels=2)
    assert h1 == pytest.approx(h0 / 2)
    assert r0 / r1 >= 1.8


def test_simulation_deterministic_and_hermitian():
    p = ModelParams(lam=0.5, cutoff=4, seed=3)
    a = list(simulate(p, 1.0 / p.a00, stride=5))
    b = list(simulate(p, 1.0 / p.a00, stride=5))
    assert [r.step for r in a] == [r.step for r in b]
    for ra, rb in zip(a, b):
        np.testing.assert_array_equal(ra.state.v, rb.state.v)
        assert hermitian_defect(ra.state.v) < 1e-10
        assert hermitian_defect(ra.state.phi) < 1e-10


def test_nan_raises_numerical_failure():
    p = ModelParams(lam=0.1, cutoff=2, seed=1)
    path = np.full((100, 3, 3), np.nan, dtype=complex)
    with pytest.raises(NumericalFailure):
        list(simulate(p, 10 * p.step, z_path=path))


def test_v_and_w_modes_agree():
    p = ModelParams(lam=0.5, cutoff=4, seed=9)
    wt = WeightTable.from_params(p)
    steps = 200
    path = ou_path(sample_stationary(p, w=wt), p.step, steps, wt)
    t = steps * p.step
    v = [r.state.v for r in simulate(p, t, z_path=path, stride=steps)][-1]
    w = [r.state.v for r in simulate(p, t, z_path=path, stride=steps, mode="w")][-1]
    np.testing.assert_allclose(v, w, atol=1e-10 * max(1.0, np.abs(v).max()))


def test_free_dynamics_is_exact_semigroup():
    # lambda = 0: v stays zero and phi = z follows the exact OU transition
    p = ModelParams(lam=0.0, cutoff=3, seed=5)
    recs = list(simulate(p, 20 * p.step, stride=20))
    assert all(np.all(r.state.v == 0) for r in recs)
    z0, z1 = recs[0].state.z, recs[-1].state.z
    # same noise key gives the same starting sample
    np.testing.assert_array_equal(z0, sample_stationary(p).z)
    assert not np.array_equal(z0, z1)
    wt = WeightTable.from_params(p)
    drift = semigroup_apply(z0, 20 * p.step, wt)
    # the deterministic part of the transition shrinks every entry
    assert np.all(np.abs(drift) <= np.abs(z0) + 1e-15)


def test_run_series_columns():
    p = ModelParams(lam=0.3, cutoff=3, seed=2)
    s = run_series(p, 10 * p.step, stride=2, energy=True)
    assert set(s) == {"t", "v_h0", "v_hreg", "w_h0sq", "residual", "tr_phi2"}
    assert len(s["t"]) == 6 and np.all(np.isfinite(s["v_h0"]))
    assert np.isnan(s["residual"][-1]) and np.all(np.isfinite(s["residual"][:-1]))


def test_simulate_rejects_bad_mode():
    with pytest.raises(ValueError):
        list(simulate(ModelParams(cutoff=1), 1e-3, mode="x"))


def test_noise_source_override():
    p = ModelParams(lam=0.2, cutoff=2, seed=1)
    a = list(simulate(p, 3 * p.step, noise=NoiseSource(77, 2)))[-1].state.v
    b = list(simulate(p, 3 * p.step))[-1].state.v
    assert not np.array_equal(a, b)
