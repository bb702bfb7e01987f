"""Independent oracles used by the unit tests.

Everything here deliberately avoids the code paths it checks: moments come
from 2-D tensor quadrature over the area (the library integrates over the
boundary), and derivatives come from Richardson-extrapolated central
differences (the library uses exact formulas or implicit differentiation).
"""

import mpmath as mp

from bergman_lab.acceptance import tensor_moment  # noqa: F401  (re-export)
from bergman_lab.precision import bits


def fd_derivative(f, z, prec_bits=256):
    """Richardson-extrapolated central difference of f at z."""
    with bits(prec_bits + 32):
        h1 = mp.mpf(2) ** (-prec_bits // 4)
        h2 = h1 / 2
        d1 = (f(z + h1) - f(z - h1)) / (2 * h1)
        d2 = (f(z + h2) - f(z - h2)) / (2 * h2)
        return (4 * d2 - d1) / 3
