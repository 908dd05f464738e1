import json

import numpy as np
import pytest
from scipy.linalg import expm

from prodexp.liealg import FourierVectorField, LoopAlgebraElement, sl2_chevalley
from prodexp.scale import (SobolevScale, check_basic_estimates,
                           check_exp_difference, check_exp_estimate,
                           check_gw_loop, check_gw_virasoro,
                           gw_virasoro_a_seminorm, gw_virasoro_seminorm,
                           reports_to_csv, sobolev_norm)

from conftest import safe_vector


def real_field(rng, modes, scale=1.0):
    coeffs = {}
    for n in modes:
        a = scale * complex(*rng.normal(size=2))
        coeffs[n] = a
        coeffs[-n] = a.conjugate()
    return FourierVectorField(coeffs)


def test_scale_diagonal(vir8):
    s = SobolevScale(vir8)
    assert s.diag.min() >= 1.0
    np.testing.assert_allclose(s.power(0.5) * s.power(1.5), s.power(2.0),
                               rtol=1e-13)
    np.testing.assert_allclose(s.diag, 1 + 1 / 16 + vir8.level_of())


def test_sobolev_norm_basics(vir8):
    omega = np.zeros(vir8.dim)
    omega[0] = 1.0
    a0 = 1 + 1 / 16
    for t in (0, 0.5, 1, 2, -1):
        assert sobolev_norm(vir8, omega, t) == pytest.approx(a0 ** t)
    rng = np.random.default_rng(1)
    v = rng.normal(size=vir8.dim)
    assert sobolev_norm(vir8, v, 0) == pytest.approx(np.linalg.norm(v))


def test_interpolation_inequality(vir8):
    rng = np.random.default_rng(2)
    s = SobolevScale(vir8)
    for _ in range(50):
        v = rng.normal(size=vir8.dim) + 1j * rng.normal(size=vir8.dim)
        assert s.norm(v, 0.5) ** 2 <= s.norm(v, 0) * s.norm(v, 1) * (1 + 1e-12)


def test_basic_estimates_e0(vir8):
    rng = np.random.default_rng(3)
    xi = safe_vector(rng, vir8, 1)
    reps = check_basic_estimates(vir8, FourierVectorField({0: 1.0}), xi, 1)
    comm = [r for r in reps if r.estimate == "commutator-bound"][0]
    assert comm.lhs < 1e-12      # [A, pi(e_0)] = 0


def test_basic_estimates_random(vir8):
    rng = np.random.default_rng(4)
    X = FourierVectorField({2: 1.0, -2: 1.0})
    for n in (0, 1, 2):
        for _ in range(30):
            xi = safe_vector(rng, vir8, 2)
            for r in check_basic_estimates(vir8, X, xi, n):
                assert r.holds, (n, r.estimate, r.lhs, r.rhs)


def test_basic_estimate_vs_dense_norm(vir8):
    # cross-check the pi-bound lhs against a dense operator-norm bound
    X = FourierVectorField({1: 0.7, -1: 0.7})
    s = SobolevScale(vir8)
    op = s.operator_norm(vir8.pi(X), 0, 1)
    rng = np.random.default_rng(5)
    for _ in range(20):
        xi = safe_vector(rng, vir8, 1)
        r = check_basic_estimates(vir8, X, xi, 0)[0]
        assert r.lhs <= op * s.norm(xi, 1) * (1 + 1e-10)
        assert op <= gw_virasoro_seminorm(X, 1, 0.5) * (1 + 1e-10)


def test_gw_virasoro(vir8):
    rng = np.random.default_rng(6)
    X = FourierVectorField({1: 1.0, -1: 1.0})
    for t in (0, 0.5, 1, 1.5, -1):
        for _ in range(100):
            xi = safe_vector(rng, vir8, 1)
            r = check_gw_virasoro(vir8, X, xi, t)
            assert r.holds, (t, r.lhs, r.rhs)
    z = check_gw_virasoro(vir8, FourierVectorField(), xi, 0)
    assert z.lhs == 0 and z.rhs == 0


def test_gw_virasoro_random_fields(vir12):
    rng = np.random.default_rng(7)
    for _ in range(60):
        X = real_field(rng, (1, 2, 3))
        xi = safe_vector(rng, vir12, 3)
        t = float(rng.choice([0, 0.5, 1, 1.5, -1]))
        assert check_gw_virasoro(vir12, X, xi, t).holds


def test_gw_loop(aff5, sug5):
    alg = sl2_chevalley()
    rng = np.random.default_rng(8)
    for _ in range(60):
        a = complex(*rng.normal(size=2))
        b = float(rng.normal())
        # real loop element: x_{-n} = -x_n^dagger (e <-> f, conjugate)
        X = LoopAlgebraElement(alg, {1: (a, b, 0.5 * a),
                                     -1: (-0.5 * a.conjugate(), -b,
                                          -a.conjugate())})
        f = real_field(rng, (1,), scale=0.5)
        xi = safe_vector(rng, aff5, 2)
        for t in (0, 0.5, 1):
            for r in check_gw_loop(aff5, sug5, X, f, xi, t):
                assert r.holds, (t, r.estimate, r.lhs, r.rhs)


def test_exp_estimate(vir8):
    r0 = check_exp_estimate(vir8, FourierVectorField({0: 1.0}), 1)
    assert r0.lhs == pytest.approx(1.0, abs=1e-10)
    X = FourierVectorField({2: 0.1, -2: 0.1})
    for n in (0, 1, 2):
        r = check_exp_estimate(vir8, X, n)
        assert r.holds, (n, r.lhs, r.rhs)
    assert check_exp_estimate(vir8, X, 0).lhs <= 1 + 1e-10  # unitarity


def test_exp_difference(vir8):
    rng = np.random.default_rng(9)
    X = FourierVectorField({2: 0.3, -2: 0.3})
    xi = safe_vector(rng, vir8, 2)
    same = check_exp_difference(vir8, X, X, xi, 1)
    assert same.lhs < 1e-13 and same.rhs == 0
    for delta in (1e-1, 1e-2, 1e-3, 1e-4):
        Y = X + FourierVectorField({1: delta, -1: delta})
        for n in (0, 1):
            r = check_exp_difference(vir8, X, Y, xi, n)
            assert r.holds
            assert r.lhs > 0


def test_unitarity_on_h0(vir8):
    rng = np.random.default_rng(10)
    X = real_field(rng, (1, 2))
    U = expm(vir8.pi(X))
    xi = safe_vector(rng, vir8, 0)
    assert abs(np.linalg.norm(U @ xi) - 1) < 1e-12


def test_a_seminorm_relation():
    X = FourierVectorField({3: 0.5, -2: 1.0})
    # |X|_{A,t} is the |.|_t seminorm of the mode-scaled field
    Xp = FourierVectorField({3: 1.5, -2: -2.0})
    assert gw_virasoro_a_seminorm(X, 2, 0.5) == pytest.approx(
        gw_virasoro_seminorm(Xp, 2, 0.5))


def test_report_serialization(vir8):
    rng = np.random.default_rng(11)
    xi = safe_vector(rng, vir8, 1)
    reps = check_basic_estimates(vir8, FourierVectorField({1: 1.0, -1: 1.0}),
                                 xi, 0)
    rows = [r.to_json() for r in reps]
    parsed = json.loads(json.dumps(rows))
    assert parsed[0]["estimate"] == "pi-bound"
    assert set(parsed[0]) == {"estimate", "params", "lhs", "rhs", "holds",
                              "leakage"}
    csv_text = reports_to_csv(reps)
    assert csv_text.splitlines()[0] == "estimate,params,lhs,rhs,holds,leakage"
    assert len(csv_text.splitlines()) == 3
