import mpmath as mp
import pytest

from bergman_lab.precision import (Lcg, bits, complex_to_pair, pair_to_complex,
                                   real_to_str, str_to_real)


def test_bits_context_restores():
    before = mp.mp.prec
    with bits(300):
        assert mp.mp.prec == 300
    assert mp.mp.prec == before


def test_real_roundtrip():
    with bits(256):
        x = mp.mpf(1) / 3
        s = real_to_str(x, 256)
        assert "." in s and "e" not in s.lower()
        y = str_to_real(s)
        assert abs(x - y) < mp.mpf(2) ** (-250)


def test_complex_pair_roundtrip():
    with bits(256):
        z = mp.mpc(1, -2) / 7
        re, im = complex_to_pair(z, 256)
        w = pair_to_complex([re, im])
        assert abs(z - w) < mp.mpf(2) ** (-250)


def test_lcg_deterministic():
    a = Lcg(12345)
    b = Lcg(12345)
    assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]


def test_lcg_uniform_range():
    g = Lcg(7)
    for _ in range(100):
        u = g.uniform()
        assert 0 <= u < 1


def test_lcg_box():
    g = Lcg(1)
    z = g.complex_in_box(mp.mpf(0), mp.mpf(1), mp.mpf(-1), mp.mpf(0))
    assert 0 <= z.real < 1 and -1 <= z.imag < 0
