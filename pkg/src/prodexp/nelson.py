"""Finite-dimensional exponentiation testbed on su(2).

Direct sums of spin-j irreducibles with the orthonormal basis X_1, X_2,
X_3 satisfying [X_i, X_j] = eps_{ijk} X_k (structure constants the
Levi-Civita symbol), pi(X_i) = -i J_i blockwise.  The Laplacian
Delta = sum pi(X_i)^2 is a negative constant per block, so the scale
A = 1 - Delta is block-scalar and the Sobolev machinery is exercised
nontrivially exactly when the sum is reducible.  Product integrals are
cross-validated against closed-form axis-angle exponentials and a
high-accuracy ODE reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from .prodint import GeneratorPath, product_integral


def spin_matrices(j):
    """(J_x, J_y, J_z) for spin j (j a nonnegative half-integer)."""
    d = int(round(2 * j)) + 1
    m = j - np.arange(d)               # j, j-1, ..., -j
    Jz = np.diag(m).astype(complex)
    # J_+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>
    up = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    Jp = np.zeros((d, d), dtype=complex)
    Jp[np.arange(d - 1), np.arange(1, d)] = up
    Jm = Jp.conj().T
    return (Jp + Jm) / 2, (Jp - Jm) / 2j, Jz


@dataclass(frozen=True)
class FinDimRep:
    """Direct sum of su(2) irreducibles, pi(X_i) = -i J_i per block."""

    spins: tuple

    def __post_init__(self):
        spins = tuple(Fraction(s) for s in self.spins)
        if not spins:
            raise ValueError("at least one spin is required")
        for s in spins:
            if s < 0 or (2 * s).denominator != 1:
                raise ValueError(f"spin {s} is not a nonnegative half-integer")
        object.__setattr__(self, "spins", spins)

    @property
    def dim(self):
        return sum(int(2 * s) + 1 for s in self.spins)

    def block_slices(self):
        out, off = [], 0
        for s in self.spins:
            d = int(2 * s) + 1
            out.append(slice(off, off + d))
            off += d
        return out

    def generators(self):
        """[pi(X_1), pi(X_2), pi(X_3)], block-diagonal skew-Hermitian."""
        mats = [np.zeros((self.dim, self.dim), dtype=complex)
                for _ in range(3)]
        for sl, s in zip(self.block_slices(), self.spins):
            for G, J in zip(mats, spin_matrices(float(s))):
                G[sl, sl] = -1j * J
        return mats

    def pi(self, x):
        """Matrix of the element with real coordinates x = (x1, x2, x3)."""
        G = self._gens()
        x = np.asarray(x, dtype=float)
        return x[0] * G[0] + x[1] * G[1] + x[2] * G[2]

    def _gens(self):
        cached = getattr(self, "_gen_cache", None)
        if cached is None:
            cached = self.generators()
            object.__setattr__(self, "_gen_cache", cached)
        return cached

    def a_diag(self):
        """Diagonal of A = 1 - Delta = (1 + j(j+1)) Id per block."""
        out = np.empty(self.dim)
        for sl, s in zip(self.block_slices(), self.spins):
            out[sl] = 1.0 + float(s * (s + 1))
        return out

    def level_of(self):
        """Block index per coordinate (plays the role of the grading)."""
        out = np.empty(self.dim, dtype=int)
        for i, sl in enumerate(self.block_slices()):
            out[sl] = i
        return out

    def seminorm(self, x, s):
        """Smallest C with ||pi(x) xi||_{s-1} <= C ||xi||_s (dense norm)."""
        a = self.a_diag()
        M = self.pi(x)
        return float(np.linalg.norm(
            (a ** (s - 1))[:, None] * M * (a ** (-s))[None, :], 2))

    def a_seminorm(self, x, s):
        """Dense-norm constant ||A^s pi(x) A^{-s}||."""
        a = self.a_diag()
        M = self.pi(x)
        return float(np.linalg.norm(
            (a ** s)[:, None] * M * (a ** (-s))[None, :], 2))

    def validate(self):
        """Max residual of the structure constants and skew-Hermiticity."""
        G = self._gens()
        worst = 0.0
        for i in range(3):
            worst = max(worst, float(np.abs(G[i] + G[i].conj().T).max()))
            j, k = (i + 1) % 3, (i + 2) % 3
            comm = G[i] @ G[j] - G[j] @ G[i]
            worst = max(worst, float(np.abs(comm - G[k]).max()))
        return worst


def laplacian(rep):
    """(Delta, A) with Delta = sum pi(X_i)^2 and A = 1 - Delta."""
    G = rep._gens()
    Delta = sum(M @ M for M in G)
    A = np.eye(rep.dim) - Delta
    return Delta, A


def verify_assumptions(rep, n_max=4):
    """Smallest dense-norm constants of the two scale estimates.

    For each basis element X_i and 0 <= n <= n_max reports
    * pi-bound constant:        ||A^n pi(X_i) A^{-(n+1)}||,
    * commutator-bound constant ||A^n [A, pi(X_i)] A^{-(n+1)}||,
    together with their finiteness.  For a single irreducible block A is
    scalar, so every commutator constant vanishes.
    """
    _, A = laplacian(rep)
    a = rep.a_diag()
    rows = []
    for i, G in enumerate(rep._gens()):
        comm = A @ G - G @ A
        for n in range(n_max + 1):
            wl, wr = a ** n, a ** (-(n + 1))
            c_pi = float(np.linalg.norm(wl[:, None] * G * wr[None, :], 2))
            c_comm = float(np.linalg.norm(wl[:, None] * comm * wr[None, :], 2))
            rows.append({"generator": i + 1, "n": n,
                         "pi_constant": c_pi,
                         "commutator_constant": c_comm,
                         "finite": bool(np.isfinite(c_pi)
                                        and np.isfinite(c_comm))})
    return rows


def axis_angle_oracle(rep, x):
    """Closed form of exp(pi(x)) from the exact spectrum of n . J.

    With x = theta * n (|n| = 1), each spin-j block has eigenvalues
    m = -j..j for n . J, so the block is V diag(e^{-i theta m}) V^*.
    """
    x = np.asarray(x, dtype=float)
    theta = float(np.linalg.norm(x))
    U = np.eye(rep.dim, dtype=complex)
    if theta == 0:
        return U
    n = x / theta
    for sl, s in zip(rep.block_slices(), rep.spins):
        Jx, Jy, Jz = spin_matrices(float(s))
        H = n[0] * Jx + n[1] * Jy + n[2] * Jz
        w, V = np.linalg.eigh(H)
        w = np.round(w * 2) / 2            # exact spectrum -j..j
        U[sl, sl] = (V * np.exp(-1j * theta * w)) @ V.conj().T
    return U


def su2_path(func, interval=(0.0, 1.0)):
    """GeneratorPath of coordinate 3-vectors t -> x(t)."""
    return GeneratorPath(func, interval, max_degree=0)


def exponentiate_vs_oracle(rep, path, tol=1e-9, split=0.5):
    """Cross-validation report for the product integral of an su(2) path.

    Keys: ``unitarity`` (defect of U), ``reference`` (operator distance
    to a high-accuracy ODE reference), ``homomorphism`` (concatenation
    residual across an interior split) and, when the path is constant,
    ``axis-angle`` (distance to the closed-form exponential).
    """
    from scipy.integrate import solve_ivp
    a, b = path.interval
    kw = dict(tol=tol, rule="midpoint", record_bound=False)
    P = product_integral(rep, path, **kw)
    out = {"unitarity": P.unitarity_defect()}

    probes = np.linspace(a, b, 7)
    x0 = np.asarray(path(a), dtype=float)
    if all(np.allclose(np.asarray(path(t), dtype=float), x0, atol=1e-14)
           for t in probes):
        oracle = axis_angle_oracle(rep, (b - a) * x0)
        out["axis-angle"] = float(np.abs(P.matrix - oracle).max())

    def rhs(t, y):
        return (rep.pi(path(t)) @ y.reshape(rep.dim, rep.dim)).ravel()

    sol = solve_ivp(rhs, (a, b), np.eye(rep.dim, dtype=complex).ravel(),
                    rtol=1e-12, atol=1e-13)
    ref = sol.y[:, -1].reshape(rep.dim, rep.dim)
    out["reference"] = float(np.abs(P.matrix - ref).max())

    s = a + split * (b - a)
    P1 = product_integral(rep, GeneratorPath(path.func, (a, s)), **kw)
    P2 = product_integral(rep, GeneratorPath(path.func, (s, b)), **kw)
    out["homomorphism"] = float(np.abs(P2.matrix @ P1.matrix
                                       - P.matrix).max())
    return out
