import numpy as np
import pytest
from scipy.linalg import expm

from prodexp.liealg import CentralElement, FourierVectorField
from prodexp.prodint import (GeneratorPath, MaxRefinementExceeded,
                             Propagator, StepSubdivision, TruncationOverflow,
                             change_of_variable_check, cumulative_simpson,
                             dyson_expansion, gateaux_derivative,
                             product_integral, solve_homogeneous,
                             solve_inhomogeneous, step_product)


def oscillating_path(scale=1.0, interval=(0.0, 1.0)):
    def f(t):
        a = scale * (np.cos(t) + 1j * np.sin(t))
        return CentralElement(FourierVectorField({1: a, -1: a.conjugate()}))
    return GeneratorPath(f, interval)


def test_subdivision_validation():
    with pytest.raises(ValueError):
        StepSubdivision([0.0, 0.5, 0.5, 1.0])
    with pytest.raises(ValueError):
        StepSubdivision([0.0, 1.0], rule="right")
    s = StepSubdivision.uniform((0, 1), 4, rule="midpoint")
    pts, widths = s.samples()
    np.testing.assert_allclose(pts, [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(widths, 0.25)


def test_cumulative_simpson_polynomial():
    # exact for cubics
    x = np.linspace(0, 2, 41)
    vals = x ** 3 - 2 * x + 1
    want = x ** 4 / 4 - x ** 2 + x
    got = cumulative_simpson(vals, x[1] - x[0])
    # composite Simpson is cubic-exact at even nodes; odd nodes are O(h^4)
    np.testing.assert_allclose(got[::2], want[::2], atol=1e-12)
    np.testing.assert_allclose(got, want, atol=1e-5)
    # fourth-order on smooth data
    errs = []
    for n in (16, 32):
        x = np.linspace(0, 1, n + 1)
        got = cumulative_simpson(np.exp(x), x[1] - x[0])[-1]
        errs.append(abs(got - (np.e - 1)))
    assert errs[0] / errs[1] > 12


def test_constant_path_exact(vir8):
    X = CentralElement(FourierVectorField({1: 0.3 + 0.2j, -1: 0.3 - 0.2j,
                                           2: 0.1, -2: 0.1}))
    P = product_integral(vir8, GeneratorPath.constant(X), tol=1e-9)
    assert np.abs(P.matrix - expm(vir8.pi(X))).max() < 1e-13


def test_diagonal_family(vir8):
    # path through multiples of e_0 only: exp of the integral
    path = GeneratorPath(lambda t: CentralElement(
        FourierVectorField({0: np.sin(t)})), (0, 1))
    P = product_integral(vir8, path, tol=1e-11, rule="midpoint",
                         record_bound=False)
    integral = 1 - np.cos(1.0)
    want = expm(integral * vir8.pi(FourierVectorField({0: 1.0})))
    assert np.abs(P.matrix - want).max() < 1e-9


def test_first_order_convergence(vir8):
    path = oscillating_path()
    ref = product_integral(vir8, path, tol=1e-9, rule="midpoint",
                           record_bound=False).matrix
    ns = np.array([8, 16, 32, 64, 128, 256])
    errs = [np.linalg.norm(step_product(vir8, path,
                                        StepSubdivision.uniform((0, 1), n)
                                        ).matrix - ref, 2)
            for n in ns]
    slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.1)


def test_refinement_within_bound(vir8):
    P = product_integral(vir8, oscillating_path(), tol=5e-3, r=1)
    assert len(P.refinement_error) >= 2
    for n, emp, bound in P.refinement_error:
        assert emp <= bound


def test_max_refinement(vir8):
    with pytest.raises(MaxRefinementExceeded):
        product_integral(vir8, oscillating_path(), tol=1e-14, n0=4,
                         max_steps=64, record_bound=False)


def test_unitarity_and_inversion(vir8):
    path = oscillating_path(scale=0.4)
    P = product_integral(vir8, path, tol=1e-9, rule="midpoint",
                         record_bound=False)
    assert P.unitarity_defect() < 1e-10
    Pinv = product_integral(vir8, path.reversed(), tol=1e-9, rule="midpoint",
                            record_bound=False)
    assert np.abs(Pinv.matrix @ P.matrix - np.eye(vir8.dim)).max() < 1e-9


def test_semigroup(vir8):
    f = oscillating_path(scale=0.4).func
    kw = dict(tol=1e-9, rule="midpoint", record_bound=False)
    P = product_integral(vir8, GeneratorPath(f, (0, 1)), **kw)
    Pa = product_integral(vir8, GeneratorPath(f, (0, 0.4)), **kw)
    Pb = product_integral(vir8, GeneratorPath(f, (0.4, 1)), **kw)
    assert np.abs(Pb.matrix @ Pa.matrix - P.matrix).max() < 1e-9


def test_homogeneous_diagonal_phase(vir8):
    path = GeneratorPath.constant(
        CentralElement(FourierVectorField({0: 1.0})), (0, 1))
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    traj = solve_homogeneous(vir8, path, xi0, np.linspace(0, 1, 5), tol=1e-10)
    # e_0 acts as i(h0 + k): the lowest vector picks up phase e^{i h0 t}
    want = np.exp(1j * (1 / 16))
    assert abs(traj[-1][0] - want) < 1e-9


def test_homogeneous_norm_and_reversal(vir8):
    rng = np.random.default_rng(12)
    path = oscillating_path(scale=0.5)
    xi0 = rng.normal(size=vir8.dim) + 1j * rng.normal(size=vir8.dim)
    xi0[vir8.safe_dim(4):] = 0
    xi0 /= np.linalg.norm(xi0)
    grid = np.linspace(0, 1, 17)
    traj = solve_homogeneous(vir8, path, xi0, grid, tol=1e-9, rule="midpoint",
                             overflow_threshold=None)
    assert np.abs(traj.norms() - 1).max() < 1e-9
    back = solve_homogeneous(vir8, path.reversed(), traj[-1],
                             grid, tol=1e-9, rule="midpoint",
                             overflow_threshold=None)
    assert np.linalg.norm(back[-1] - xi0) < 1e-9


def test_homogeneous_residual(vir8):
    path = oscillating_path(scale=0.3)
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    grid = np.linspace(0, 1, 129)
    traj = solve_homogeneous(vir8, path, xi0, grid, tol=1e-9, rule="midpoint",
                             overflow_threshold=None)
    h = grid[1] - grid[0]
    worst = 0.0
    for i in range(1, len(grid) - 1):
        lhs = (traj[i + 1] - traj[i - 1]) / (2 * h)
        rhs = vir8.pi(path(grid[i])) @ traj[i]
        worst = max(worst, np.linalg.norm(lhs - rhs))
    assert worst < 1e-4


def test_truncation_overflow(vir8):
    path = GeneratorPath.constant(
        CentralElement(FourierVectorField({1: 3.0, -1: 3.0})), (0, 1))
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    with pytest.raises(TruncationOverflow):
        solve_homogeneous(vir8, path, xi0, np.linspace(0, 1, 9), tol=1e-6,
                          rule="midpoint")


def test_inhomogeneous_zero_source(vir8):
    path = oscillating_path(scale=0.3)
    traj = solve_inhomogeneous(vir8, path,
                               lambda t: np.zeros(vir8.dim, dtype=complex),
                               np.linspace(0, 1, 17), tol=1e-8)
    assert np.abs(traj.vectors).max() == 0


def test_inhomogeneous_zero_generator(vir8):
    # X = 0: J(t) = int_0^t eta
    path = GeneratorPath(lambda t: CentralElement(FourierVectorField()), (0, 1))
    e0 = np.zeros(vir8.dim, dtype=complex)
    e0[0] = 1.0
    traj = solve_inhomogeneous(vir8, path, lambda t: np.sin(t) * e0,
                               np.linspace(0, 1, 33), tol=1e-8)
    # cumulative Simpson is only O(h^4) at odd nodes
    np.testing.assert_allclose(traj.vectors[:, 0],
                               1 - np.cos(traj.times), atol=1e-6)


def test_inhomogeneous_residual(vir8):
    rng = np.random.default_rng(13)
    path = oscillating_path(scale=0.3)
    d = vir8.safe_dim(3)
    w = np.zeros(vir8.dim, dtype=complex)
    w[:d] = rng.normal(size=d) + 1j * rng.normal(size=d)
    w /= np.linalg.norm(w)

    def eta(t):
        return np.cos(2 * t) * w

    grid = np.linspace(0, 1, 129)
    traj = solve_inhomogeneous(vir8, path, eta, grid, tol=1e-9)
    assert np.linalg.norm(traj[0]) == 0
    h = grid[1] - grid[0]
    worst = 0.0
    for i in range(1, len(grid) - 1, 4):
        lhs = (traj[i + 1] - traj[i - 1]) / (2 * h)
        rhs = vir8.pi(path(grid[i])) @ traj[i] + eta(grid[i])
        worst = max(worst, np.linalg.norm(lhs - rhs))
    assert worst < 1e-4


def test_gateaux_zero_direction(vir8):
    path = oscillating_path(scale=0.3)
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    zero = GeneratorPath(lambda t: CentralElement(FourierVectorField()), (0, 1))
    traj = gateaux_derivative(vir8, path, xi0, zero, np.linspace(0, 1, 17))
    assert np.abs(traj.vectors).max() < 1e-12


def test_gateaux_constant_selfdirection(vir8):
    # d/ds e^{t pi((1+s)X)}|_0 xi = t pi(X) e^{t pi(X)} xi
    X = CentralElement(FourierVectorField({1: 0.4, -1: 0.4}))
    path = GeneratorPath.constant(X, (0, 1))
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    grid = np.linspace(0, 1, 65)
    traj = gateaux_derivative(vir8, path, xi0, path, grid, tol=1e-9)
    P = vir8.pi(X)
    want = 1.0 * P @ (expm(1.0 * P) @ xi0)
    assert np.linalg.norm(traj[-1] - want) < 1e-6


def test_gateaux_matches_central_difference(vir8):
    path = oscillating_path(scale=0.3)
    delta = GeneratorPath(lambda t: CentralElement(
        FourierVectorField({2: 0.2 * np.sin(t), -2: 0.2 * np.sin(t)})), (0, 1))
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    grid = np.linspace(0, 1, 65)
    traj = gateaux_derivative(vir8, path, xi0, delta, grid, tol=1e-9)
    eps = 1e-4
    kw = dict(tol=1e-10, rule="midpoint", overflow_threshold=None)

    def shifted(s):
        return GeneratorPath(lambda t: path(t) + s * delta(t), (0, 1))

    plus = solve_homogeneous(vir8, shifted(eps), xi0, grid, **kw)
    minus = solve_homogeneous(vir8, shifted(-eps), xi0, grid, **kw)
    fd = (plus[-1] - minus[-1]) / (2 * eps)
    rel = np.linalg.norm(traj[-1] - fd) / np.linalg.norm(fd)
    assert rel < 1e-5


def test_dyson_low_orders(vir8):
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    path = oscillating_path()
    assert np.array_equal(dyson_expansion(vir8, path, xi0, 0, 0.3), xi0)
    X = CentralElement(FourierVectorField({1: 0.5, -1: 0.5}))
    cpath = GeneratorPath.constant(X, (0, 1))
    got = dyson_expansion(vir8, cpath, xi0, 1, 0.2)
    want = xi0 + 0.2 * vir8.pi(X) @ xi0
    assert np.linalg.norm(got - want) < 1e-10


def test_dyson_order_scaling(vir8):
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    path = oscillating_path()
    hs = np.array([0.2, 0.1, 0.05, 0.025])
    exact = {}
    from scipy.integrate import solve_ivp
    for h in hs:
        sol = solve_ivp(lambda t, y: h * (vir8.pi(path(t)) @ y), (0, 1), xi0,
                        rtol=1e-12, atol=1e-13)
        exact[h] = sol.y[:, -1]
    for k in (1, 2, 3):
        errs = [np.linalg.norm(dyson_expansion(vir8, path, xi0, k, h)
                               - exact[h]) for h in hs]
        slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        assert slope == pytest.approx(k + 1, abs=0.15), (k, slope)


def test_change_of_variable(vir8):
    path = oscillating_path(scale=0.4)
    d, _, _ = change_of_variable_check(vir8, path, lambda s: s, lambda s: 1.0,
                                       (0, 1), tol=1e-6)
    assert d < 1e-12
    d, _, _ = change_of_variable_check(vir8, path,
                                       lambda s: 0.2 + 0.6 * s,
                                       lambda s: 0.6, (0, 1), tol=1e-6)
    assert d < 1e-9
    d, _, _ = change_of_variable_check(vir8, path, lambda s: s ** 2,
                                       lambda s: 2 * s, (0, 1), tol=1e-7)
    assert d < 1e-6


def test_trajectory_csv(vir8):
    path = oscillating_path(scale=0.2)
    xi0 = np.zeros(vir8.dim, dtype=complex)
    xi0[0] = 1.0
    traj = solve_homogeneous(vir8, path, xi0, np.linspace(0, 1, 5), tol=1e-6,
                             overflow_threshold=None)
    text = traj.to_csv(vir8)
    lines = text.splitlines()
    assert lines[0].startswith("t,norm,level0")
    assert len(lines) == 6
