import unittest
from fractions import Fraction

import numpy as np

from prodexp.liealg import (
    QC, QC_I, FourierVectorField, LoopAlgebraElement, CentralElement,
    LieAlgebraError, bracket_vect, virasoro_cocycle, vect_cocycle_integral,
    loop_bracket, loop_cocycle, central_bracket, seminorm,
    dtheta_bracket_norm, sl2_chevalley, element_dumps, element_loads,
)


def random_field(rng, max_mode=4, nterms=4):
    """Random field with Gaussian-rational coefficients (exact arithmetic)."""
    coeffs = {}
    for _ in range(nterms):
        n = int(rng.integers(-max_mode, max_mode + 1))
        coeffs[n] = QC(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))),
                       Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))))
    return FourierVectorField(coeffs)


class TestQC(unittest.TestCase):

    def test_field_axioms(self):
        a = QC(Fraction(1, 2), Fraction(-3, 4))
        b = QC(2, Fraction(1, 3))
        self.assertEqual(a * b - b * a, QC(0))
        self.assertEqual((a / b) * b, a)
        self.assertEqual(a * a.conjugate(),
                         QC(Fraction(1, 4) + Fraction(9, 16)))

    def test_complex_conversion(self):
        self.assertEqual(complex(QC(1, -2)), 1 - 2j)
        self.assertAlmostEqual(abs(QC(3, 4)), 5.0)


class TestBracket(unittest.TestCase):

    def test_e1_em1(self):
        # [e_1, e_-1] = 2i e_0
        f = FourierVectorField.basis(1, QC(1))
        g = FourierVectorField.basis(-1, QC(1))
        self.assertEqual(bracket_vect(f, g), FourierVectorField({0: QC(0, 2)}))

    def test_antisymmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            f, g = random_field(rng), random_field(rng)
            self.assertEqual(bracket_vect(f, g) + bracket_vect(g, f),
                             FourierVectorField())
            self.assertEqual(bracket_vect(f, f), FourierVectorField())

    def test_l_basis_commutator(self):
        # [L_2, L_-1] = 3 L_1
        L2 = FourierVectorField.from_l_basis({2: QC(1)})
        Lm1 = FourierVectorField.from_l_basis({-1: QC(1)})
        got = bracket_vect(L2, Lm1).to_l_basis()
        self.assertEqual(got, {1: QC(3)})

    def test_jacobi(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            f, g, h = (random_field(rng, nterms=3) for _ in range(3))
            total = (bracket_vect(bracket_vect(f, g), h)
                     + bracket_vect(bracket_vect(g, h), f)
                     + bracket_vect(bracket_vect(h, f), g))
            self.assertEqual(total, FourierVectorField())

    def test_against_symbolic_differentiation(self):
        # independent oracle: expand (f'g - fg') with sympy
        import sympy
        theta = sympy.symbols("theta", real=True)
        rng = np.random.default_rng(23)
        for _ in range(5):
            f = random_field(rng, max_mode=3, nterms=3)
            g = random_field(rng, max_mode=3, nterms=3)
            fs = sum(complex(a) * sympy.exp(sympy.I * n * theta)
                     for n, a in f.coeffs.items())
            gs = sum(complex(a) * sympy.exp(sympy.I * n * theta)
                     for n, a in g.coeffs.items())
            hs = sympy.diff(fs, theta) * gs - fs * sympy.diff(gs, theta)
            got = bracket_vect(f, g)
            for th in np.linspace(0.1, 6.0, 7):
                want = complex(hs.subs(theta, th).evalf())
                val = sum(complex(a) * np.exp(1j * n * th)
                          for n, a in got.coeffs.items())
                self.assertAlmostEqual(val, want, places=9)


class TestCocycles(unittest.TestCase):

    def test_virasoro_values(self):
        L = {n: FourierVectorField.from_l_basis({n: QC(1)}) for n in (-2, -1, 1, 2)}
        self.assertEqual(virasoro_cocycle(L[2], L[-2]), QC(Fraction(1, 2)))
        self.assertEqual(virasoro_cocycle(L[1], L[-1]), QC(0))

    def test_antisymmetry_and_reality(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            f, g = random_field(rng), random_field(rng)
            self.assertEqual(virasoro_cocycle(f, g) + virasoro_cocycle(g, f), QC(0))
            self.assertEqual(virasoro_cocycle(f, f), QC(0))
        # real on real fields (raw integral normalisation)
        u = FourierVectorField({2: QC(1), -2: QC(1)})
        v = FourierVectorField({2: QC(0, 1), -2: QC(0, -1)})
        w = vect_cocycle_integral(u, v)
        self.assertEqual(w.im, 0)
        self.assertNotEqual(w.re, 0)

    def test_two_cocycle_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            x, y, z = (random_field(rng, nterms=3) for _ in range(3))
            total = (virasoro_cocycle(bracket_vect(x, y), z)
                     + virasoro_cocycle(bracket_vect(y, z), x)
                     + virasoro_cocycle(bracket_vect(z, x), y))
            self.assertEqual(total, QC(0))

    def test_loop_cocycle_central_term(self):
        alg = sl2_chevalley()
        # i * B_raw(x(m), y(-m)) = m <x,y> for all |m| <= 8 and basis pairs
        for m in range(-8, 9):
            for i in range(3):
                for j in range(3):
                    x = LoopAlgebraElement.single(alg, i, m, QC(1))
                    y = LoopAlgebraElement.single(alg, j, -m, QC(1))
                    ei = [0, 0, 0]; ei[i] = 1
                    ej = [0, 0, 0]; ej[j] = 1
                    want = m * alg.inner(ei, ej)
                    self.assertEqual(QC_I * loop_cocycle(x, y), QC(want))

    def test_loop_cocycle_zero_cases(self):
        alg = sl2_chevalley()
        x0 = LoopAlgebraElement.single(alg, 1, 0, QC(1))  # h(0), real constant loop
        self.assertEqual(loop_cocycle(x0, x0), QC(0))
        x = LoopAlgebraElement.single(alg, 0, 1, QC(1))
        y = LoopAlgebraElement.single(alg, 2, 2, QC(1))
        self.assertEqual(loop_cocycle(x, y), QC(0))


class TestCentralBracket(unittest.TestCase):

    def test_virasoro_example(self):
        L2 = CentralElement(FourierVectorField.from_l_basis({2: QC(1)}))
        Lm2 = CentralElement(FourierVectorField.from_l_basis({-2: QC(1)}))
        out = central_bracket(L2, Lm2)
        self.assertEqual(out.base.to_l_basis(), {0: QC(4)})
        self.assertEqual(out.central, QC(Fraction(1, 2)))

    def test_center_is_central(self):
        z = CentralElement(FourierVectorField(), QC(7))
        y = CentralElement(FourierVectorField({1: QC(2), -3: QC(0, 1)}), QC(3))
        out = central_bracket(z, y)
        self.assertEqual(out.base, FourierVectorField())
        self.assertEqual(out.central, QC(0))

    def test_jacobi_with_center(self):
        rng = np.random.default_rng(13)
        for _ in range(8):
            a, b, c = (CentralElement(random_field(rng, nterms=3),
                                      QC(int(rng.integers(-3, 4))))
                       for _ in range(3))
            total = (central_bracket(central_bracket(a, b), c)
                     + central_bracket(central_bracket(b, c), a)
                     + central_bracket(central_bracket(c, a), b))
            self.assertEqual(total.base, FourierVectorField())
            self.assertEqual(total.central, QC(0))

    def test_affine_jacobi(self):
        alg = sl2_chevalley()
        rng = np.random.default_rng(17)
        for _ in range(6):
            elems = []
            for _ in range(3):
                coeffs = {}
                for _ in range(3):
                    n = int(rng.integers(-3, 4))
                    v = [QC(int(rng.integers(-3, 4))) for _ in range(3)]
                    coeffs[n] = tuple(v)
                elems.append(CentralElement(LoopAlgebraElement(alg, coeffs)))
            a, b, c = elems
            total = (central_bracket(central_bracket(a, b), c)
                     + central_bracket(central_bracket(b, c), a)
                     + central_bracket(central_bracket(c, a), b))
            self.assertEqual(total.base.coeffs, {})
            self.assertEqual(total.central, QC(0))

    def test_kind_mismatch(self):
        alg = sl2_chevalley()
        a = CentralElement(FourierVectorField({1: QC(1)}))
        b = CentralElement(LoopAlgebraElement.single(alg, 0, 1, QC(1)))
        with self.assertRaises(LieAlgebraError):
            central_bracket(a, b)


class TestSeminorms(unittest.TestCase):

    def test_spec_values(self):
        x = FourierVectorField({1: 1.0, -1: 1.0})
        self.assertAlmostEqual(seminorm(x, 0), 2.0)
        self.assertAlmostEqual(seminorm(x, 1), 4.0)
        self.assertEqual(seminorm(FourierVectorField(), 3), 0)

    def test_monotone_in_s(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            x = FourierVectorField(
                {int(rng.integers(-6, 7)): complex(*rng.normal(size=2))
                 for _ in range(5)})
            vals = [seminorm(x, s) for s in np.arange(0, 6.5, 0.5)]
            self.assertTrue(all(a <= b + 1e-12 for a, b in zip(vals, vals[1:])))

    def test_subadditive_homogeneous(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            x = FourierVectorField({int(rng.integers(-5, 6)): complex(*rng.normal(size=2))
                                    for _ in range(4)})
            y = FourierVectorField({int(rng.integers(-5, 6)): complex(*rng.normal(size=2))
                                    for _ in range(4)})
            s = float(rng.uniform(0, 3))
            self.assertLessEqual(seminorm(x + y, s),
                                 seminorm(x, s) + seminorm(y, s) + 1e-12)
            self.assertAlmostEqual(seminorm(2.5 * x, s), 2.5 * seminorm(x, s))

    def test_dtheta_bracket_norm(self):
        self.assertEqual(dtheta_bracket_norm(FourierVectorField.basis(0, 1.0), 2), 0)
        x = FourierVectorField.basis(1, 1.0)
        # derivative scales the single mode by n=1
        self.assertAlmostEqual(dtheta_bracket_norm(x, 2), seminorm(x, 2))
        y = FourierVectorField({3: 0.5, -2: 1.0})
        self.assertAlmostEqual(dtheta_bracket_norm(y, 1),
                               seminorm(FourierVectorField({3: 1.5, -2: -2.0}), 1))

    def test_loop_seminorm(self):
        alg = sl2_chevalley()
        # h(1): coefficient norm sqrt(tr(h h^dagger)) = sqrt(2)
        x = LoopAlgebraElement.single(alg, 1, 1, 1.0)
        self.assertAlmostEqual(seminorm(x, 1), 2 * np.sqrt(2))


class TestFiniteAlgebra(unittest.TestCase):

    def test_sl2_validates(self):
        alg = sl2_chevalley()
        alg.validate()
        self.assertEqual(alg.dim, 3)
        # <h,h> = 2, <e,f> = 1
        self.assertEqual(alg.inner((0, 1, 0), (0, 1, 0)), 2)
        self.assertEqual(alg.inner((1, 0, 0), (0, 0, 1)), 1)

    def test_brackets(self):
        alg = sl2_chevalley()
        e, h, f = (1, 0, 0), (0, 1, 0), (0, 0, 1)
        self.assertEqual(alg.bracket(h, e), (2, 0, 0))
        self.assertEqual(alg.bracket(h, f), (0, 0, -2))
        self.assertEqual(alg.bracket(e, f), (0, 1, 0))

    def test_loop_bracket_mode_addition(self):
        alg = sl2_chevalley()
        x = LoopAlgebraElement.single(alg, 0, 2, QC(1))   # e(2)
        y = LoopAlgebraElement.single(alg, 2, -1, QC(1))  # f(-1)
        out = loop_bracket(x, y)
        self.assertEqual(out.coeffs, {1: (QC(0), QC(1), QC(0))})  # h(1)


class TestRealityAndSerialization(unittest.TestCase):

    def test_real_flag(self):
        self.assertTrue(FourierVectorField({1: 1 + 2j, -1: 1 - 2j}).is_real())
        self.assertFalse(FourierVectorField({1: 1 + 2j, -1: 1 + 2j}).is_real())
        self.assertTrue(FourierVectorField({0: 1.0}).is_real())
        self.assertFalse(FourierVectorField({0: 1j}).is_real())

    def test_json_roundtrip_vect(self):
        x = CentralElement(FourierVectorField({2: 1 + 1j, -2: 1 - 1j}), 0.5)
        y = element_loads(element_dumps(x))
        self.assertEqual(y.base.coeffs, x.base.coeffs)
        self.assertEqual(y.central, 0.5)

    def test_json_roundtrip_loop(self):
        alg = sl2_chevalley()
        x = CentralElement(LoopAlgebraElement(
            alg, {1: (1.0, 0.5j, 0), -1: (-1.0, 0.5j, 0)}), 0.0)
        y = element_loads(element_dumps(x), algebra=alg)
        self.assertEqual(set(y.base.coeffs), {1, -1})
        np.testing.assert_allclose(
            np.array(y.base.coeffs[1], dtype=complex),
            np.array([1.0, 0.5j, 0.0]))


if __name__ == "__main__":
    unittest.main()
