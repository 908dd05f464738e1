"""Product integrals (time-ordered exponentials) on truncated modules.

The propagator of a generator path X is approximated by ordered products
of matrix exponentials over a subdivision,

    Exp(D_n X_n) ... Exp(D_1 X_1),   rightmost factor first,

with dyadic refinement until successive approximants agree on a probe
basis in a Sobolev-weighted norm.  Also: homogeneous and inhomogeneous
ODE solvers, Gateaux derivatives of the propagator in the generator, and
Dyson expansions.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm


class MaxRefinementExceeded(Exception):
    pass


class TruncationOverflow(Exception):
    """Raised when too much trajectory mass reaches the top buffer levels."""

    def __init__(self, fraction, t=None):
        self.fraction = fraction
        self.t = t
        super().__init__(f"top-level mass fraction {fraction:.2e}"
                         + (f" at t={t:.4f}" if t is not None else ""))


class GeneratorPath:
    """Map t -> Lie-algebra element on [a, b].

    `func` must be pure; `deriv` is an optional closed-form derivative,
    `max_degree` the declared bound on mode support.
    """

    def __init__(self, func, interval=(0.0, 1.0), smooth=True,
                 deriv=None, max_degree=None):
        self.func = func
        self.interval = (float(interval[0]), float(interval[1]))
        self.smooth = smooth
        self.deriv = deriv
        self.max_degree = max_degree

    @classmethod
    def constant(cls, X, interval=(0.0, 1.0)):
        deg = X.max_degree() if hasattr(X, "max_degree") else None
        return cls(lambda t: X, interval, smooth=True,
                   deriv=lambda t: 0 * X, max_degree=deg)

    def __call__(self, t):
        return self.func(t)

    def reversed(self):
        """t -> -X(a + b - t), the generator of the inverse propagator."""
        a, b = self.interval
        return GeneratorPath(lambda t: -1 * self.func(a + b - t),
                             self.interval, smooth=self.smooth,
                             max_degree=self.max_degree)


class StepSubdivision:
    """Breakpoints a = tau_0 < ... < tau_n = b with a per-interval sample rule."""

    def __init__(self, breakpoints, rule="left"):
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or len(bp) < 2 or not np.all(np.diff(bp) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if rule not in ("left", "midpoint"):
            raise ValueError(f"unknown sample rule {rule!r}")
        self.breakpoints = bp
        self.rule = rule

    @classmethod
    def uniform(cls, interval, n, rule="left"):
        return cls(np.linspace(interval[0], interval[1], n + 1), rule)

    @property
    def steps(self):
        return len(self.breakpoints) - 1

    def samples(self):
        """(sample time, width) per interval."""
        bp = self.breakpoints
        widths = np.diff(bp)
        pts = bp[:-1] if self.rule == "left" else bp[:-1] + widths / 2
        return pts, widths


class Propagator:
    """Dense unitary (for real paths) matrix with its construction record."""

    def __init__(self, matrix, interval, steps, refinement_error=None):
        self.matrix = matrix
        self.interval = interval
        self.steps = steps
        # list of (steps, empirical difference, theoretical bound) triples
        self.refinement_error = refinement_error or []

    def __matmul__(self, other):
        if isinstance(other, Propagator):
            return self.matrix @ other.matrix
        return self.matrix @ other

    def unitarity_defect(self):
        U = self.matrix
        return float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max())


class Trajectory:
    """Vectors xi(t_i) along a time grid."""

    def __init__(self, times, vectors, path=None):
        self.times = np.asarray(times, dtype=float)
        self.vectors = np.asarray(vectors)
        self.path = path

    def norms(self):
        return np.linalg.norm(self.vectors, axis=1)

    def __getitem__(self, i):
        return self.vectors[i]

    def to_csv(self, rep=None):
        import csv, io
        buf = io.StringIO()
        w = csv.writer(buf)
        if rep is None:
            w.writerow(["t", "norm"])
            for t, v in zip(self.times, self.vectors):
                w.writerow([repr(t), repr(float(np.linalg.norm(v)))])
        else:
            lv = rep.level_of()
            levels = list(range(int(lv.max()) + 1))
            w.writerow(["t", "norm"] + [f"level{k}" for k in levels]
                       + ["leakage"])
            for t, v in zip(self.times, self.vectors):
                per = [float(np.linalg.norm(v[lv == k])) for k in levels]
                w.writerow([repr(t), repr(float(np.linalg.norm(v)))]
                           + [repr(x) for x in per]
                           + [repr(_top_fraction(rep, v))])
        return buf.getvalue()


def _top_fraction(rep, v):
    lv = rep.level_of()
    top = lv.max()
    total = np.linalg.norm(v)
    if total == 0:
        return 0.0
    return float(np.linalg.norm(v[lv >= top - 1]) / total)


def step_product(rep, path, subdivision):
    """Ordered product of exponentials over the subdivision."""
    pts, widths = subdivision.samples()
    U = np.eye(rep.dim, dtype=complex)
    for t, dt in zip(pts, widths):
        U = expm(dt * rep.pi(path(t))) @ U
    return Propagator(U, path.interval, subdivision.steps)


def _probe_difference(rep, U1, U2, r):
    """max_j ||(U1 - U2) e_j / ||e_j||_{r+1}||_r over the coordinate basis."""
    a = np.asarray(rep.a_diag(), dtype=float)
    W = (a ** r)[:, None] * (U1 - U2) * (a ** (-(r + 1)))[None, :]
    return float(np.max(np.linalg.norm(W, axis=0)))


def _difference_bound(rep, path, n_coarse, r):
    """The step-function difference estimate between the n and 2n schemes:
    (b-a) sup|X_n - X_2n|_{r+1} exp(2(r+1)(b-a) sup|X|_{A,r+1})."""
    a, b = path.interval
    fine = np.linspace(a, b, 2 * n_coarse + 1)[:-1]
    sup_diff = 0.0
    sup_a = 0.0
    for i, t in enumerate(fine):
        Xf = path(t)
        t_coarse = fine[i - (i % 2)]
        sup_a = max(sup_a, rep.a_seminorm(Xf, r + 1))
        if i % 2:
            d = Xf - path(t_coarse)
            sup_diff = max(sup_diff, rep.seminorm(d, r + 1))
    return (b - a) * sup_diff * np.exp(2 * (r + 1) * (b - a) * sup_a)


def product_integral(rep, path, tol=1e-8, r=0, n0=8, rule="left",
                     max_steps=2 ** 20, record_bound=True):
    """Dyadically refined product integral of a generator path.

    Successive refinements are compared on the coordinate probe basis in
    the ||A^r . A^{-r-1}|| weighted sense; the theoretical difference-
    estimate bound is recorded alongside each empirical difference.
    """
    n = n0
    U_prev = step_product(rep, path, StepSubdivision.uniform(
        path.interval, n, rule)).matrix
    record = []
    while True:
        n2 = 2 * n
        if n2 > max_steps:
            raise MaxRefinementExceeded(
                f"no convergence to {tol} within {max_steps} steps")
        U = step_product(rep, path, StepSubdivision.uniform(
            path.interval, n2, rule)).matrix
        diff = _probe_difference(rep, U_prev, U, r)
        bound = (_difference_bound(rep, path, n, r) if record_bound
                 else float("nan"))
        record.append((n2, diff, bound))
        if diff < tol:
            return Propagator(U, path.interval, n2, record)
        U_prev, n = U, n2


def solve_homogeneous(rep, path, xi0, grid, tol=1e-8, r=0,
                      overflow_threshold=1e-6, rule="left"):
    """xi(t) = product integral over [t_0, t] applied to xi0.

    Monitors the trajectory-mass fraction in the top two levels and raises
    TruncationOverflow beyond `overflow_threshold` (set None to disable).
    """
    grid = np.asarray(grid, dtype=float)
    vecs = [np.asarray(xi0, dtype=complex)]
    for t0, t1 in zip(grid[:-1], grid[1:]):
        seg = GeneratorPath(path.func, (t0, t1), smooth=path.smooth,
                            max_degree=path.max_degree)
        P = product_integral(rep, seg, tol=tol, r=r, n0=4, rule=rule,
                             record_bound=False)
        v = P @ vecs[-1]
        if overflow_threshold is not None:
            frac = _top_fraction(rep, v)
            if frac > overflow_threshold:
                raise TruncationOverflow(frac, t=float(t1))
        vecs.append(v)
    return Trajectory(grid, vecs, path)


def cumulative_simpson(values, h):
    """Cumulative integral of uniformly sampled values (axis 0), fourth order.

    Even nodes accumulate composite Simpson pairs; odd nodes use the
    quadratic through the three nearest samples.
    """
    values = np.asarray(values)
    out = np.zeros_like(values, dtype=complex if np.iscomplexobj(values)
                        else float)
    n = len(values)
    for i in range(1, n):
        if i == 1:
            # quadratic through nodes 0,1,2 integrated over [0, h]
            if n >= 3:
                out[1] = h / 12.0 * (5 * values[0] + 8 * values[1] - values[2])
            else:
                out[1] = h / 2.0 * (values[0] + values[1])
        elif i % 2 == 0:
            out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4 * values[i - 1]
                                             + values[i])
        else:
            out[i] = out[i - 1] + h / 12.0 * (5 * values[i] + 8 * values[i - 1]
                                              - values[i - 2])
    return out


def solve_inhomogeneous(rep, path, eta, grid, tol=1e-8, r=0, rule="midpoint"):
    """J(t) = int_0^t Prod_{t>=tau>=s} Exp(X dtau) eta(s) ds via Duhamel.

    Requires a uniform grid; J(t) = U(t) int_0^t U(s)^{-1} eta(s) ds with
    the integral by cumulative Simpson.
    """
    grid = np.asarray(grid, dtype=float)
    h = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), h):
        raise ValueError("uniform grid required")
    # propagators U(t_i) relative to grid[0]
    Us = [np.eye(rep.dim, dtype=complex)]
    for t0, t1 in zip(grid[:-1], grid[1:]):
        seg = GeneratorPath(path.func, (t0, t1), smooth=path.smooth)
        P = product_integral(rep, seg, tol=tol, r=r, n0=4, rule=rule,
                             record_bound=False)
        Us.append(P.matrix @ Us[-1])
    integrand = np.array([np.linalg.solve(U, np.asarray(eta(t), dtype=complex))
                          for U, t in zip(Us, grid)])
    I = cumulative_simpson(integrand, h)
    vecs = np.array([U @ v for U, v in zip(Us, I)])
    return Trajectory(grid, vecs, path)


def gateaux_derivative(rep, path, xi0, direction, grid, tol=1e-8,
                       rule="midpoint"):
    """Derivative of the solution map in the generator: the solution of
    the inhomogeneous equation with source pi(direction(t)) xi(t)."""
    base = solve_homogeneous(rep, path, xi0, grid, tol=tol, rule=rule,
                             overflow_threshold=None)
    interp = {float(t): v for t, v in zip(base.times, base.vectors)}

    def eta(t):
        return rep.pi(direction(t)) @ interp[float(t)]

    return solve_inhomogeneous(rep, path, eta, grid, tol=tol, rule=rule)


def dyson_expansion(rep, path, xi0, order, scaling, nodes=129):
    """Partial sum of the Dyson series for the path scaling*X at t = b.

    psi_0 = xi0; psi_j(t) = int_0^t pi(X(s)) psi_{j-1}(s) ds; returns
    sum_{j<=order} scaling^j psi_j(b).
    """
    a, b = path.interval
    grid = np.linspace(a, b, nodes)
    h = grid[1] - grid[0]
    mats = [rep.pi(path(t)) for t in grid]
    psi = np.tile(np.asarray(xi0, dtype=complex), (nodes, 1))
    total = np.asarray(xi0, dtype=complex).copy()
    for j in range(1, order + 1):
        integrand = np.array([M @ v for M, v in zip(mats, psi)])
        psi = cumulative_simpson(integrand, h)
        total = total + scaling ** j * psi[-1]
    return total


def change_of_variable_check(rep, path, phi, phi_prime, source_interval,
                             tol=1e-8, r=0, rule="midpoint"):
    """Compare the product integral of X over phi(source_interval) with
    that of phi' . (X o phi) over source_interval; returns the operator-
    norm difference and the two propagators."""
    a, b = source_interval
    c, d = phi(a), phi(b)
    direct = product_integral(
        rep, GeneratorPath(path.func, (c, d), smooth=path.smooth),
        tol=tol, r=r, rule=rule, record_bound=False)
    pulled = product_integral(
        rep, GeneratorPath(lambda s: phi_prime(s) * path.func(phi(s)), (a, b)),
        tol=tol, r=r, rule=rule, record_bound=False)
    diff = float(np.linalg.norm(direct.matrix - pulled.matrix, 2))
    return diff, direct, pulled
