from fractions import Fraction

import numpy as np
import pytest

from prodexp.hwmod import affine_spec, build_module, sugawara, virasoro_spec


@pytest.fixture(scope="session")
def vir8():
    """Virasoro (1/2, 1/16), N = 8."""
    return build_module(virasoro_spec(Fraction(1, 2), Fraction(1, 16), 8))


@pytest.fixture(scope="session")
def vir12():
    """Virasoro (1/2, 1/16), N = 12."""
    return build_module(virasoro_spec(Fraction(1, 2), Fraction(1, 16), 12))


@pytest.fixture(scope="session")
def aff5():
    """Affine sl2, ell = 1, lam = 0, N = 5."""
    return build_module(affine_spec(1, 0, 5))


@pytest.fixture(scope="session")
def sug5(aff5):
    return sugawara(aff5)


def safe_vector(rng, module, depth, unit=True):
    """Random vector supported on levels <= N - depth."""
    v = np.zeros(module.dim, dtype=complex)
    d = module.safe_dim(depth)
    v[:d] = rng.normal(size=d) + 1j * rng.normal(size=d)
    if unit:
        v /= np.linalg.norm(v)
    return v
