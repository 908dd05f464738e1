"""Coefficient-level arithmetic for circle vector fields, loop-algebra
elements and their central extensions.

Vector fields on the circle are stored by their Fourier data,

    X = sum_n a_n e_n,        e_n = e^{i n theta} d/dtheta,

with finitely many nonzero complex amplitudes a_n.  The basis of the
(centrally extended) Witt algebra used elsewhere is L_n = -i e_n, so that
e_n = i L_n; `from_l_basis`/`to_l_basis` convert between the two.

Coefficients may be ordinary complex numbers or exact Gaussian rationals
(`QC`), which the algebraic identity tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import json
import numbers


# ---------------------------------------------------------------------------
# exact complex rationals


class QC:
    """Complex number with Fraction real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(x):
        if isinstance(x, QC):
            return x
        if isinstance(x, (int, Fraction)):
            return QC(x)
        return NotImplemented

    def __add__(self, other):
        o = QC._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QC(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __sub__(self, other):
        o = QC._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QC(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = QC._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QC(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = QC._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QC(self.re * o.re - self.im * o.im,
                  self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QC._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        return QC((self.re * o.re + self.im * o.im) / d,
                  (self.im * o.re - self.re * o.im) / d)

    def conjugate(self):
        return QC(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, QC):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, numbers.Complex):
            return complex(self) == complex(other)
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"QC({self.re!r}, {self.im!r})"


QC_I = QC(0, 1)


def _conj(x):
    """Complex conjugate that works for QC, complex and real scalars."""
    if isinstance(x, QC):
        return x.conjugate()
    return x.conjugate() if isinstance(x, complex) else x


def _is_zero(x, tol=0.0):
    if isinstance(x, QC):
        return not bool(x)
    if tol:
        return abs(x) <= tol
    return x == 0


def _mul_i(x):
    """i * x without forcing exact coefficients to float."""
    if isinstance(x, QC):
        return QC_I * x
    if isinstance(x, (int, Fraction)):
        return QC(0, x)
    return 1j * x


# ---------------------------------------------------------------------------
# vector fields on the circle


class FourierVectorField:
    """Trigonometric-polynomial vector field sum_n a_n e^{in theta} d/dtheta."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for n, a in coeffs.items():
                if not _is_zero(a):
                    self.coeffs[int(n)] = a

    @classmethod
    def basis(cls, n, amplitude=1):
        return cls({n: amplitude})

    @classmethod
    def from_l_basis(cls, l_coeffs):
        """Field sum_n c_n L_n given the c_n (L_n = -i e_n)."""
        return cls({n: _mul_i(-1 * c) for n, c in l_coeffs.items()})

    def to_l_basis(self):
        """Coefficients in the L_n basis (e_n = i L_n)."""
        return {n: _mul_i(a) for n, a in self.coeffs.items()}

    def modes(self):
        return sorted(self.coeffs)

    def max_degree(self):
        return max((abs(n) for n in self.coeffs), default=0)

    def is_real(self, tol=0.0):
        """True iff the field is real on the circle: a_{-n} = conj(a_n)."""
        for n, a in self.coeffs.items():
            b = self.coeffs.get(-n, 0)
            d = b - _conj(a)
            if isinstance(d, QC):
                if d:
                    return False
            elif abs(d) > tol:
                return False
        return True

    def mode_derivative(self):
        """Field with Fourier data n*a_n (the bracket with L_0, up to i)."""
        return FourierVectorField({n: n * a for n, a in self.coeffs.items()})

    def __add__(self, other):
        if not isinstance(other, FourierVectorField):
            return NotImplemented
        out = dict(self.coeffs)
        for n, a in other.coeffs.items():
            out[n] = out.get(n, 0) + a
        return FourierVectorField(out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        return FourierVectorField({n: scalar * a for n, a in self.coeffs.items()})

    __mul__ = __rmul__

    def __neg__(self):
        return (-1) * self

    def __eq__(self, other):
        if not isinstance(other, FourierVectorField):
            return NotImplemented
        return (self - other).coeffs == {}

    def __repr__(self):
        return f"FourierVectorField({self.coeffs!r})"


def bracket_vect(f, g):
    """Lie bracket [f d/dtheta, g d/dtheta] = (f'g - fg') d/dtheta."""
    out = {}
    for m, a in f.coeffs.items():
        for n, b in g.coeffs.items():
            # (e^{im})' e^{in} - e^{im} (e^{in})' = i(m-n) e^{i(m+n)}
            c = _mul_i((m - n) * a * b)
            k = m + n
            out[k] = out.get(k, 0) + c
    return FourierVectorField(out)


def vect_cocycle_integral(f, g):
    """The Gelfand-Fuks integral (1/12) int_0^{2pi} (f''+f) g' dtheta/2pi.

    Mode sum: (i/12) sum_m a_m b_{-m} (m^3 - m).  Real-valued on pairs of
    real fields; this raw normalisation is the projective defect cocycle
    (up to the module's central charge).
    """
    total = 0
    for m, a in f.coeffs.items():
        b = g.coeffs.get(-m)
        if b is not None:
            w = Fraction(m ** 3 - m, 12)
            total = total + _mul_i(w * a * b)
    return total


def virasoro_cocycle(f, g):
    """Central kappa-coefficient of [f, g] in the Virasoro algebra.

    Normalised so that in the L_n basis the value on (L_m, L_{-m}) is
    (m^3 - m)/12; equals i times `vect_cocycle_integral`.
    """
    return _mul_i(vect_cocycle_integral(f, g))


def seminorm(x, s):
    """Goodman-Wallach weight sum_n (1+|n|)^s |a_n| (vect or loop element)."""
    if isinstance(x, LoopAlgebraElement):
        return sum((1 + abs(n)) ** s * x.algebra.coeff_norm(v)
                   for n, v in x.coeffs.items())
    return sum((1 + abs(n)) ** s * abs(a) for n, a in x.coeffs.items())


def dtheta_bracket_norm(x, s):
    """Seminorm of the mode-wise derivative: the |[L_0, X]| weight."""
    return seminorm(x.mode_derivative(), s)


# ---------------------------------------------------------------------------
# finite-dimensional Lie algebras and loop elements


class LieAlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteLieAlgebra:
    """Finite-dimensional Lie algebra given by structure constants.

    `struct[i][j][k]` is the coefficient of basis element k in [x_i, x_j];
    `ip[i][j]` is the invariant bilinear form (the basic inner product).
    """

    name: str
    labels: tuple
    struct: tuple
    ip: tuple

    @property
    def dim(self):
        return len(self.labels)

    def bracket(self, x, y):
        """Bracket of coefficient vectors."""
        d = self.dim
        out = [0] * d
        for i in range(d):
            if _is_zero(x[i]):
                continue
            for j in range(d):
                if _is_zero(y[j]):
                    continue
                for k in range(d):
                    c = self.struct[i][j][k]
                    if c:
                        out[k] = out[k] + c * x[i] * y[j]
        return tuple(out)

    def inner(self, x, y):
        """Invariant bilinear form of coefficient vectors."""
        total = 0
        for i in range(self.dim):
            for j in range(self.dim):
                c = self.ip[i][j]
                if c:
                    total = total + c * x[i] * y[j]
        return total

    def coeff_norm(self, x):
        """Hermitian norm of a coefficient vector (see `sl2_chevalley`)."""
        d = self.dim
        total = 0.0
        for i in range(d):
            for j in range(d):
                c = self._herm[i][j]
                if c:
                    total += (complex(_conj(x[i])) * c * complex(x[j])).real
        return total ** 0.5

    def validate(self):
        """Check antisymmetry, Jacobi and invariance of the inner product."""
        d = self.dim
        basis = [tuple(1 if t == i else 0 for t in range(d)) for i in range(d)]
        for i in range(d):
            for j in range(d):
                xij = self.bracket(basis[i], basis[j])
                xji = self.bracket(basis[j], basis[i])
                if any(a + b != 0 for a, b in zip(xij, xji)):
                    raise LieAlgebraError("structure constants not antisymmetric")
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    acc = [0] * d
                    for u, v, w in ((i, j, k), (j, k, i), (k, i, j)):
                        t = self.bracket(self.bracket(basis[u], basis[v]), basis[w])
                        acc = [a + b for a, b in zip(acc, t)]
                    if any(a != 0 for a in acc):
                        raise LieAlgebraError("Jacobi identity fails")
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    lhs = self.inner(self.bracket(basis[k], basis[i]), basis[j])
                    rhs = self.inner(basis[i], self.bracket(basis[k], basis[j]))
                    if lhs + rhs != 0:
                        raise LieAlgebraError("inner product not invariant")


def sl2_chevalley():
    """sl2 in the Chevalley basis (e, h, f).

    [h,e] = 2e, [h,f] = -2f, [e,f] = h.  The basic inner product is the
    trace form of the defining representation (so <h,h> = 2, <e,f> = 1),
    the normalisation in which the highest root has squared length 2.
    The Hermitian coefficient norm is tr(x x^dagger) in the defining rep.
    """
    z = Fraction(0)
    o = Fraction(1)
    t = Fraction(2)
    E, H, F = 0, 1, 2
    struct = [[[z] * 3 for _ in range(3)] for _ in range(3)]
    struct[H][E][E] = t      # [h, e] = 2e
    struct[E][H][E] = -t
    struct[H][F][F] = -t     # [h, f] = -2f
    struct[F][H][F] = t
    struct[E][F][H] = o      # [e, f] = h
    struct[F][E][H] = -o
    ip = [[z] * 3 for _ in range(3)]
    ip[E][F] = o
    ip[F][E] = o
    ip[H][H] = t
    alg = FiniteLieAlgebra(
        name="sl2",
        labels=("e", "h", "f"),
        struct=tuple(tuple(tuple(r) for r in m) for m in struct),
        ip=tuple(tuple(r) for r in ip),
    )
    # tr(x x^dagger) with e^dagger = f, h^dagger = h in the defining rep
    herm = [[0] * 3 for _ in range(3)]
    herm[E][E] = 1.0
    herm[F][F] = 1.0
    herm[H][H] = 2.0
    object.__setattr__(alg, "_herm", tuple(tuple(r) for r in herm))
    return alg


class LoopAlgebraElement:
    """Element sum_n x_n otimes e^{in theta} of a polynomial loop algebra."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs=None):
        self.algebra = algebra
        self.coeffs = {}
        if coeffs:
            d = algebra.dim
            for n, v in coeffs.items():
                v = tuple(v)
                if len(v) != d:
                    raise LieAlgebraError("coefficient dimension mismatch")
                if any(not _is_zero(a) for a in v):
                    self.coeffs[int(n)] = v

    @classmethod
    def single(cls, algebra, index, n, amplitude=1):
        """x_index(n): basis element index at mode n."""
        v = [0] * algebra.dim
        v[index] = amplitude
        return cls(algebra, {n: tuple(v)})

    def modes(self):
        return sorted(self.coeffs)

    def max_degree(self):
        return max((abs(n) for n in self.coeffs), default=0)

    def mode_derivative(self):
        return LoopAlgebraElement(
            self.algebra,
            {n: tuple(n * a for a in v) for n, v in self.coeffs.items()})

    def __add__(self, other):
        if not isinstance(other, LoopAlgebraElement):
            return NotImplemented
        if other.algebra is not self.algebra:
            raise LieAlgebraError("mismatched underlying algebras")
        out = dict(self.coeffs)
        for n, v in other.coeffs.items():
            if n in out:
                out[n] = tuple(a + b for a, b in zip(out[n], v))
            else:
                out[n] = v
        return LoopAlgebraElement(self.algebra, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        return LoopAlgebraElement(
            self.algebra,
            {n: tuple(scalar * a for a in v) for n, v in self.coeffs.items()})

    __mul__ = __rmul__

    def __neg__(self):
        return (-1) * self

    def __repr__(self):
        return f"LoopAlgebraElement({self.algebra.name}, {self.coeffs!r})"


def loop_bracket(x, y):
    """[x(m), y(n)] = [x,y](m+n) without the central term."""
    if x.algebra is not y.algebra:
        raise LieAlgebraError("mismatched underlying algebras")
    out = {}
    for m, v in x.coeffs.items():
        for n, w in y.coeffs.items():
            b = x.algebra.bracket(v, w)
            k = m + n
            if k in out:
                out[k] = tuple(a + c for a, c in zip(out[k], b))
            else:
                out[k] = b
    return LoopAlgebraElement(x.algebra, out)


def loop_cocycle(x, y):
    """int_0^{2pi} <X, Y'> dtheta/2pi = -i sum_m m <x_m, y_{-m}>."""
    if x.algebra is not y.algebra:
        raise LieAlgebraError("mismatched underlying algebras")
    total = 0
    for m, v in x.coeffs.items():
        w = y.coeffs.get(-m)
        if w is not None:
            total = total + _mul_i(-m * x.algebra.inner(v, w))
    return total


# ---------------------------------------------------------------------------
# central extensions


class CentralElement:
    """Element X oplus t c of a one-dimensional central extension."""

    __slots__ = ("base", "central")

    def __init__(self, base, central=0):
        self.base = base
        self.central = central

    @property
    def kind(self):
        return "loop" if isinstance(self.base, LoopAlgebraElement) else "vect"

    def max_degree(self):
        return self.base.max_degree()

    def is_real(self, tol=0.0):
        if isinstance(self.base, FourierVectorField):
            return self.base.is_real(tol)
        # loop reality: x_{-n} = -x_n^dagger in the matrix realisation;
        # only checked for sl2 (e,h,f) where conjugation swaps e and f.
        for n, v in self.base.coeffs.items():
            w = self.base.coeffs.get(-n, (0,) * self.base.algebra.dim)
            want = (-_conj(v[2]), -_conj(v[1]), -_conj(v[0]))
            if any(abs(complex(a - b)) > tol if not isinstance(a - b, QC)
                   else bool(a - b) for a, b in zip(w, want)):
                return False
        return True

    def __add__(self, other):
        if not isinstance(other, CentralElement):
            return NotImplemented
        return CentralElement(self.base + other.base, self.central + other.central)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        return CentralElement(scalar * self.base, scalar * self.central)

    __mul__ = __rmul__

    def __neg__(self):
        return (-1) * self

    def __repr__(self):
        return f"CentralElement({self.base!r}, central={self.central!r})"


def central_bracket(a, b):
    """Bracket on the central extension: [X+tc, Y+sc] = [X,Y] + omega(X,Y)c.

    The central coefficient is the kappa-normalised cocycle (so the value
    on (L_2, L_{-2}) is 1/2 and on (x(m), y(-m)) is m<x,y>); the central
    components of the inputs never contribute.
    """
    if not isinstance(a, CentralElement):
        a = CentralElement(a)
    if not isinstance(b, CentralElement):
        b = CentralElement(b)
    fa, fb = a.base, b.base
    if isinstance(fa, FourierVectorField) and isinstance(fb, FourierVectorField):
        return CentralElement(bracket_vect(fa, fb), virasoro_cocycle(fa, fb))
    if isinstance(fa, LoopAlgebraElement) and isinstance(fb, LoopAlgebraElement):
        return CentralElement(loop_bracket(fa, fb), _mul_i(loop_cocycle(fa, fb)))
    raise LieAlgebraError(
        f"incompatible element kinds: {a.kind} and {b.kind}")


# ---------------------------------------------------------------------------
# JSON serialization
#
# Schema: {"kind": "vect"|"loop", "modes": [...], "central": float}
#   vect mode entry: {"n": int, "re": float, "im": float}
#   loop mode entry: {"n": int, "coeffs": [[re, im], ...]}  (length = dim,
#   basis order as in the algebra's labels; only sl2 is supported).


def element_to_json(elem):
    if isinstance(elem, (FourierVectorField, LoopAlgebraElement)):
        elem = CentralElement(elem)
    base = elem.base
    if isinstance(base, FourierVectorField):
        modes = [{"n": n, "re": float(complex(a).real), "im": float(complex(a).imag)}
                 for n, a in sorted(base.coeffs.items())]
        kind = "vect"
    else:
        modes = [{"n": n,
                  "coeffs": [[float(complex(c).real), float(complex(c).imag)]
                             for c in v]}
                 for n, v in sorted(base.coeffs.items())]
        kind = "loop"
    return {"kind": kind, "modes": modes, "central": float(complex(elem.central).real)}


def element_from_json(data, algebra=None):
    kind = data["kind"]
    if kind == "vect":
        coeffs = {m["n"]: complex(m["re"], m["im"]) for m in data["modes"]}
        base = FourierVectorField(coeffs)
    elif kind == "loop":
        if algebra is None:
            algebra = sl2_chevalley()
        coeffs = {m["n"]: tuple(complex(re, im) for re, im in m["coeffs"])
                  for m in data["modes"]}
        base = LoopAlgebraElement(algebra, coeffs)
    else:
        raise LieAlgebraError(f"unknown element kind {kind!r}")
    return CentralElement(base, data.get("central", 0.0))


def element_dumps(elem):
    return json.dumps(element_to_json(elem))


def element_loads(s, algebra=None):
    return element_from_json(json.loads(s), algebra=algebra)
