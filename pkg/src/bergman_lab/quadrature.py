"""Gauss–Legendre / Gauss–Jacobi panel quadrature in arbitrary precision.

Rules are built by Golub–Welsch on the Jacobi matrix of the weight, using
mpmath's symmetric eigensolver, and cached per (order, exponent, precision).
Panels can be graded dyadically toward singular or non-smooth endpoints, and
corner-touching panels can carry a Gauss–Jacobi weight ``(t - corner)^sigma``
that absorbs an algebraic endpoint factor exactly.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp

_RULE_CACHE: dict = {}


def _jacobi_rule_sym(n: int, alpha, beta, prec_bits: int):
    """Nodes/weights for weight (1-x)^alpha (1+x)^beta on [-1, 1]."""
    key = (n, str(alpha), str(beta), prec_bits)
    if key in _RULE_CACHE:
        return _RULE_CACHE[key]
    with mp.mp.workprec(prec_bits + 32):
        a = mp.mpf(alpha)
        b = mp.mpf(beta)
        J = mp.zeros(n, n)
        if n > 0:
            J[0, 0] = (b - a) / (a + b + 2)
        for k in range(1, n):
            den = (2 * k + a + b) * (2 * k + a + b + 2)
            J[k, k] = (b * b - a * a) / den if den != 0 else mp.mpf(0)
            if k == 1:
                bk = 4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
            else:
                bk = (4 * k * (k + a) * (k + b) * (k + a + b)
                      / ((2 * k + a + b) ** 2 * (2 * k + a + b + 1) * (2 * k + a + b - 1)))
            J[k, k - 1] = J[k - 1, k] = mp.sqrt(bk)
        E, Q = mp.eigsy(J)
        mu0 = mp.power(2, a + b + 1) * mp.beta(a + 1, b + 1)
        nodes = [E[i] for i in range(n)]
        weights = [mu0 * Q[0, i] ** 2 for i in range(n)]
    _RULE_CACHE[key] = (nodes, weights)
    return nodes, weights


def legendre_rule(n: int, prec_bits: int):
    return _jacobi_rule_sym(n, 0, 0, prec_bits)


def left_jacobi_rule(n: int, sigma, prec_bits: int):
    """Rule for ∫_{-1}^{1} (1+x)^sigma f(x) dx (singular factor at the left end)."""
    return _jacobi_rule_sym(n, 0, Fraction(sigma) if isinstance(sigma, str) else sigma, prec_bits)


def graded_breakpoints(a, b, levels: int, grade_left: bool, grade_right: bool):
    """Dyadic panel breakpoints on [a, b], refined toward graded ends.

    ``levels`` halvings toward each graded end; the innermost panel touches
    the endpoint with length (b-a) * 2^-levels / (#graded halves).
    """
    a = mp.mpf(a)
    b = mp.mpf(b)
    if not grade_left and not grade_right:
        return [a, b]
    mid = (a + b) / 2
    pts = [a]
    if grade_left and grade_right:
        left_end, right_start = mid, mid
    elif grade_left:
        left_end, right_start = b, b
    else:
        left_end, right_start = a, a
    if grade_left:
        h = left_end - a
        cuts = [a + h * mp.mpf(2) ** (-j) for j in range(levels, 0, -1)]
        pts.extend(cuts)
    if grade_right:
        h = b - right_start
        pts.extend(b - h * mp.mpf(2) ** (-j) for j in range(1, levels + 1))
    pts.append(b)
    # dedupe/sort defensively (mpf exact dyadics, so comparisons are safe)
    out = [pts[0]]
    for p in pts[1:]:
        if p > out[-1]:
            out.append(p)
    return out


def panel_points(a, b, n: int, prec_bits: int, left_sigma=None, right_sigma=None):
    """Quadrature points/weights on [a, b].

    With ``left_sigma`` the rule integrates (t-a)^sigma * f(t) given f;
    weights then include the singular factor.  Same for ``right_sigma`` at b.
    Only one end may be singular per panel.
    """
    a = mp.mpf(a)
    b = mp.mpf(b)
    half = (b - a) / 2
    if left_sigma is not None:
        nodes, weights = left_jacobi_rule(n, left_sigma, prec_bits)
        scale = half ** (mp.mpf(left_sigma) + 1)
        pts = [a + half * (1 + x) for x in nodes]
        wts = [w * scale for w in weights]
    elif right_sigma is not None:
        nodes, weights = left_jacobi_rule(n, right_sigma, prec_bits)
        scale = half ** (mp.mpf(right_sigma) + 1)
        pts = [b - half * (1 + x) for x in nodes]
        wts = [w * scale for w in weights]
    else:
        nodes, weights = legendre_rule(n, prec_bits)
        pts = [a + half * (1 + x) for x in nodes]
        wts = [w * half for w in weights]
    return pts, wts


class PanelRule:
    """Frozen node/weight list computing ∫_a^b (t-a)^σL (b-t)^σR g(t) dt.

    ``sing_left``/``sing_right`` are the algebraic exponents σL/σR (``None``
    means the factor is absent).  Each factor is absorbed exactly by a
    Gauss-Jacobi rule on its touching panel; away from that panel the factor
    is analytic and is folded into the stored weights.  ``integrate`` is
    called with the regular part ``g`` only.
    """

    def __init__(self, a, b, nodes_per_panel: int, grading_levels: int,
                 prec_bits: int, sing_left=None, sing_right=None):
        a = mp.mpf(a)
        b = mp.mpf(b)
        if sing_left is not None and sing_right is not None:
            grading_levels = max(grading_levels, 1)
        bps = graded_breakpoints(a, b, grading_levels,
                                 sing_left is not None, sing_right is not None)
        sL = None if sing_left is None else mp.mpf(sing_left)
        sR = None if sing_right is None else mp.mpf(sing_right)
        pts, wts = [], []
        for i in range(len(bps) - 1):
            pa, pb = bps[i], bps[i + 1]
            absorb_left = i == 0 and sL is not None
            absorb_right = i == len(bps) - 2 and sR is not None
            p, w = panel_points(pa, pb, nodes_per_panel, prec_bits,
                                left_sigma=sL if absorb_left else None,
                                right_sigma=sR if absorb_right else None)
            for t, wt in zip(p, w):
                if sL is not None and not absorb_left:
                    wt = wt * (t - a) ** sL
                if sR is not None and not absorb_right:
                    wt = wt * (b - t) ** sR
                pts.append(t)
                wts.append(wt)
        self.a = a
        self.b = b
        self.points = pts
        self.weights = wts
        self.sing_left = sL
        self.sing_right = sR

    def integrate(self, g):
        total = mp.mpf(0)
        for t, w in zip(self.points, self.weights):
            total += w * g(t)
        return total


def integrate_smooth(f, a, b, nodes_per_panel: int, prec_bits: int,
                     grading_levels: int = 0, grade_left=False, grade_right=False):
    """Plain GL panel integration with optional dyadic grading (no GJ weight)."""
    bps = graded_breakpoints(a, b, grading_levels, grade_left, grade_right)
    total = mp.mpf(0)
    for i in range(len(bps) - 1):
        pts, wts = panel_points(bps[i], bps[i + 1], nodes_per_panel, prec_bits)
        for t, w in zip(pts, wts):
            total += w * f(t)
    return total
