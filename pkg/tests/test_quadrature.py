import mpmath as mp
import pytest

from bergman_lab.precision import bits
from bergman_lab.quadrature import (PanelRule, graded_breakpoints,
                                    legendre_rule, panel_points)


def test_legendre_exact_polynomials():
    with bits(288):
        xs, ws = legendre_rule(24, 288)
        for p in (0, 2, 10, 40):
            val = sum(w * x ** p for x, w in zip(xs, ws))
            exact = mp.mpf(2) / (p + 1) if p % 2 == 0 else mp.mpf(0)
            if p <= 2 * 24 - 1:
                assert abs(val - exact) < mp.mpf(2) ** (-270)


def test_graded_breakpoints_structure():
    with bits(128):
        pts = graded_breakpoints(mp.mpf(0), mp.mpf(1), 4, True, True)
        assert pts[0] == 0 and pts[-1] == 1
        assert all(b > a for a, b in zip(pts, pts[1:]))
        # innermost left panel has dyadic length 2^-levels / 2
        assert pts[1] == mp.mpf(2) ** (-5)


def test_panel_points_measure():
    with bits(256):
        pts, wts = panel_points(mp.mpf(0), mp.mpf("0.25"), 32, 256)
        assert abs(sum(wts) - mp.mpf("0.25")) < mp.mpf(2) ** (-240)
        assert all(0 < t < mp.mpf("0.25") for t in pts)


def test_jacobi_singular_endpoint():
    # integral of t^(-1/2) cos(t) on [0,1] against a known mpmath quad
    with bits(192):
        rule = PanelRule(mp.mpf(0), mp.mpf(1), 32, 8, 192,
                         sing_left=mp.mpf("-0.5"))
        val = rule.integrate(lambda t: mp.cos(t))
        ref = mp.quad(lambda t: mp.cos(t ** 2) * 2, [0, 1])  # t = s^2
        assert abs(val - ref) < mp.mpf(2) ** (-150)
