"""Arbitrary-precision arithmetic helpers.

All numerical work in this package runs on mpmath binary floats with a
configurable significand.  Complex values are mpmath ``mpc`` pairs.  The
helpers here centralise precision management, lossless decimal round-trips
for serialization, and the deterministic 64-bit LCG used for sample-point
jitter.
"""

from __future__ import annotations

import contextlib

import mpmath as mp

DEFAULT_PRECISION_BITS = 256

# Deterministic LCG (cross-language reproducible sample generation).
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_LCG_MASK = (1 << 64) - 1


@contextlib.contextmanager
def bits(prec_bits: int):
    """Context manager: run the enclosed block at ``prec_bits`` significand bits."""
    with mp.mp.workprec(prec_bits):
        yield mp.mp


def guard(prec_bits: int, extra: int = 32) -> int:
    """Working precision with guard bits for internal computations."""
    return prec_bits + extra


def default_precision_for_degree(degree_max: int) -> int:
    """Rule-of-thumb significand width for a moment problem of this degree.

    Monomial Gram matrices lose roughly four bits per degree; the floor is
    the package default of 256 bits.
    """
    return max(DEFAULT_PRECISION_BITS, 4 * degree_max + 64)


def decimal_digits(prec_bits: int) -> int:
    """Decimal digits that round-trip a ``prec_bits``-bit float."""
    return int(prec_bits * 0.30103) + 8


def real_to_str(x, prec_bits: int) -> str:
    """Serialize an mpf as a decimal string that reloads losslessly."""
    with mp.mp.workprec(prec_bits + 16):
        # mp.mpf(x) rounds to the ambient precision, so widen it first
        return mp.nstr(+mp.mpf(x), decimal_digits(prec_bits),
                       strip_zeros=False)


def str_to_real(s: str):
    return mp.mpf(s)


def complex_to_pair(z, prec_bits: int) -> list[str]:
    z = mp.mpc(z)
    return [real_to_str(z.real, prec_bits), real_to_str(z.imag, prec_bits)]


def pair_to_complex(pair) -> mp.mpc:
    return mp.mpc(mp.mpf(pair[0]), mp.mpf(pair[1]))


class Lcg:
    """64-bit linear congruential generator with the pinned constants."""

    def __init__(self, seed: int):
        self.state = seed & _LCG_MASK

    def next_u64(self) -> int:
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) & _LCG_MASK
        return self.state

    def uniform(self):
        """mpf in [0, 1) with 64 bits of entropy."""
        return mp.mpf(self.next_u64()) / mp.mpf(1 << 64)

    def complex_in_box(self, re_lo, re_hi, im_lo, im_hi):
        re = mp.mpf(re_lo) + (mp.mpf(re_hi) - mp.mpf(re_lo)) * self.uniform()
        im = mp.mpf(im_lo) + (mp.mpf(im_hi) - mp.mpf(im_lo)) * self.uniform()
        return mp.mpc(re, im)
