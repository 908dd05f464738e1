"""Sobolev scale of A = 1 + L0 and numerical verification of the
operator estimates.

`rep` arguments below are any object with `.dim`, `.a_diag()` and
`.pi(element) -> matrix` (a GradedModule, a SugawaraAction, or the su(2)
testbed representation); A is diagonal in the working basis throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import io
import json
import math

import numpy as np
from scipy.linalg import expm

from .liealg import FourierVectorField, LoopAlgebraElement, CentralElement, seminorm


class SobolevScale:
    """Powers of the diagonal operator A >= 1 and the norms they induce."""

    def __init__(self, rep):
        self.rep = rep
        self.diag = np.asarray(rep.a_diag(), dtype=float)
        if self.diag.min() < 1 - 1e-12:
            raise ValueError("scale operator must satisfy A >= 1")

    def power(self, t):
        return self.diag ** t

    def apply(self, v, t):
        """A^t v."""
        return self.power(t) * np.asarray(v)

    def norm(self, v, t=0.0):
        """The Sobolev norm ||v||_t = ||A^t v||."""
        return float(np.linalg.norm(self.apply(v, t)))

    def operator_norm(self, M, s, t):
        """||A^s M A^{-t}||, the norm of M as a map H^t -> H^s."""
        W = self.power(s)[:, None] * M * self.power(-t)[None, :]
        return float(np.linalg.norm(W, 2))


def sobolev_norm(rep, v, t):
    return SobolevScale(rep).norm(v, t)


# ---------------------------------------------------------------------------
# seminorms with explicit constants


def _fold_index(t):
    """The negative-index convention |X|_{-n} = |X|_{n+1}."""
    return 1 - t if t < 0.5 else t


def gw_virasoro_seminorm(X, t, c):
    """|X|_t = sqrt(2)||X||_{t-1} + M(||X||_t + ||X||_{t+1/2}), M=(c/12)^{1/2}."""
    t = _fold_index(t)
    M = math.sqrt(float(c) / 12.0)
    return (math.sqrt(2) * seminorm(X, t - 1)
            + M * (seminorm(X, t) + seminorm(X, t + 0.5)))


def gw_virasoro_a_seminorm(X, t, c):
    """|X|_{A,t}: the same recipe on the mode derivative [L_0, X]."""
    return gw_virasoro_seminorm(X.mode_derivative(), t, c)


def gw_loop_seminorm(X, f, t, ell, dim_g=3):
    """|X + f d/theta|_t = (ell+1)||X||_{t-1/2} + dim(G)||f||_{t+1/2}."""
    t = _fold_index(t)
    out = 0.0
    if X is not None:
        out += (ell + 1) * seminorm(X, t - 0.5)
    if f is not None:
        out += dim_g * seminorm(f, t + 0.5)
    return out


def gw_loop_a_seminorm(X, f, t, ell, dim_g=3):
    return gw_loop_seminorm(None if X is None else X.mode_derivative(),
                            None if f is None else f.mode_derivative(),
                            t, ell, dim_g)


def module_seminorms(rep, spec):
    """(|.|_t, |.|_{A,t}) pair appropriate for the module's algebra."""
    if spec.kind == "virasoro":
        c = float(spec.c)
        return (lambda X, t: gw_virasoro_seminorm(X, t, c),
                lambda X, t: gw_virasoro_a_seminorm(X, t, c))
    ell = spec.ell
    return (lambda X, t: gw_loop_seminorm(X, None, t, ell),
            lambda X, t: gw_loop_a_seminorm(X, None, t, ell))


# ---------------------------------------------------------------------------
# reports


@dataclass
class EstimateReport:
    estimate: str
    params: dict
    lhs: float
    rhs: float
    leakage: float = 0.0

    @property
    def holds(self):
        return self.lhs <= self.rhs * (1 + 1e-12) + 1e-14

    def to_json(self):
        return {"estimate": self.estimate, "params": self.params,
                "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds,
                "leakage": self.leakage}

    def csv_row(self):
        return [self.estimate, json.dumps(self.params, sort_keys=True),
                repr(self.lhs), repr(self.rhs), str(self.holds),
                repr(self.leakage)]


CSV_HEADER = ["estimate", "params", "lhs", "rhs", "holds", "leakage"]


def reports_to_csv(reports):
    import csv
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _leakage(rep, v):
    """Mass of v in the top two retained levels."""
    lv = rep.level_of()
    top = lv.max()
    mask = lv >= top - 1
    return float(np.linalg.norm(np.asarray(v)[mask]))


# ---------------------------------------------------------------------------
# the checks


def _base(X):
    return X.base if isinstance(X, CentralElement) else X


def check_basic_estimates(rep, X, xi, n, seminorm_fn=None, a_seminorm_fn=None):
    """Both sides of ||pi(X)xi||_n <= |X|_{n+1} ||xi||_{n+1} and
    ||[A, pi(X)]xi||_n <= |X|_{A,n+1} ||xi||_{n+1}."""
    spec = getattr(rep, "spec", None) or rep.module.spec
    if seminorm_fn is None:
        seminorm_fn, a_seminorm_fn = module_seminorms(rep, spec)
    scale = SobolevScale(rep)
    P = rep.pi(X)
    Xb = _base(X)
    w = P @ xi
    comm = scale.diag * w - P @ (scale.diag * xi)
    norm_next = scale.norm(xi, n + 1)
    return [
        EstimateReport("pi-bound", {"n": n},
                       scale.norm(w, n), seminorm_fn(Xb, n + 1) * norm_next,
                       leakage=_leakage(rep, w)),
        EstimateReport("commutator-bound", {"n": n},
                       scale.norm(comm, n),
                       a_seminorm_fn(Xb, n + 1) * norm_next,
                       leakage=_leakage(rep, comm)),
    ]


def check_gw_virasoro(rep, X, xi, t):
    """||pi(X)xi||_t <= sqrt2 ||X||_|t| ||xi||_{t+1}
    + M ||X||_{|t|+1} ||xi||_{t+1/2} + M ||X||_{|t|+3/2} ||xi||_t."""
    spec = getattr(rep, "spec", None) or rep.module.spec
    c = float(spec.c) if spec.kind == "virasoro" else \
        float(sugawara_central_charge(rep))
    M = math.sqrt(c / 12.0)
    scale = SobolevScale(rep)
    Xb = _base(X)
    w = rep.pi(X) @ xi
    a = abs(t)
    rhs = (math.sqrt(2) * seminorm(Xb, a) * scale.norm(xi, t + 1)
           + M * seminorm(Xb, a + 1) * scale.norm(xi, t + 0.5)
           + M * seminorm(Xb, a + 1.5) * scale.norm(xi, t))
    return EstimateReport("gw-virasoro", {"t": t}, scale.norm(w, t), rhs,
                          leakage=_leakage(rep, w))


def sugawara_central_charge(rep):
    from .hwmod import SugawaraAction
    if isinstance(rep, SugawaraAction):
        return rep.central_charge
    raise TypeError("no central charge available")


def check_gw_loop(module, sug, X, f, xi, t):
    """The two loop estimates, reported separately:
    ||pi(X)v||_t <= (ell+1)||X||_{|t|+1/2} ||v||_{t+1/2} and
    ||pi(f d/dtheta)xi||_t <= dim(G)||f||_{|t|+3/2} ||xi||_{t+1}."""
    ell = module.spec.ell
    scale = SobolevScale(module)
    out = []
    a = abs(t)
    if X is not None:
        w = module.pi(X) @ xi
        out.append(EstimateReport(
            "gw-loop-element", {"t": t}, scale.norm(w, t),
            (ell + 1) * seminorm(_base(X), a + 0.5) * scale.norm(xi, t + 0.5),
            leakage=_leakage(module, w)))
    if f is not None:
        w = sug.pi(f) @ xi
        out.append(EstimateReport(
            "gw-loop-field", {"t": t}, scale.norm(w, t),
            3 * seminorm(_base(f), a + 1.5) * scale.norm(xi, t + 1),
            leakage=_leakage(module, w)))
    return out


def check_exp_estimate(rep, X, n, a_seminorm_fn=None):
    """||A^n e^{pi(X)} A^{-n}|| <= e^{2n |X|_{A,n}} on the truncation."""
    spec = getattr(rep, "spec", None) or rep.module.spec
    if a_seminorm_fn is None:
        _, a_seminorm_fn = module_seminorms(rep, spec)
    scale = SobolevScale(rep)
    U = expm(rep.pi(X))
    lhs = scale.operator_norm(U, n, n)
    rhs = math.exp(2 * n * a_seminorm_fn(_base(X), n))
    return EstimateReport("exp-estimate", {"n": n}, lhs, rhs)


def check_exp_difference(rep, X, Y, xi, n,
                         seminorm_fn=None, a_seminorm_fn=None):
    """||(e^{pi(X)} - e^{pi(Y)}) xi||_n <= |X-Y|_{n+1}
    e^{2(n+1) max(|X|_{A,n+1}, |Y|_{A,n+1})} ||xi||_{n+1}."""
    spec = getattr(rep, "spec", None) or rep.module.spec
    if seminorm_fn is None:
        seminorm_fn, a_seminorm_fn = module_seminorms(rep, spec)
    scale = SobolevScale(rep)
    Xb, Yb = _base(X), _base(Y)
    w = (expm(rep.pi(X)) - expm(rep.pi(Y))) @ xi
    rhs = (seminorm_fn(Xb - Yb, n + 1)
           * math.exp(2 * (n + 1) * max(a_seminorm_fn(Xb, n + 1),
                                        a_seminorm_fn(Yb, n + 1)))
           * scale.norm(xi, n + 1))
    return EstimateReport("exp-difference", {"n": n}, scale.norm(w, n), rhs,
                          leakage=_leakage(rep, w))
