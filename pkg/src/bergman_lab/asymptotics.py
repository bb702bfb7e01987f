"""Strong-asymptotics deviations, n-th-root profiles, and zero sets.

The normalised polynomials p_n satisfy p_n(z) ~ sqrt(n+1) Phi'(z) Phi(z)^n on
the region where the glued conformal map Phi is defined; ``deviation``
measures the relative departure A_n from that law.  ``poly_zeros`` computes
all roots of p_n by simultaneous (Aberth-Ehrlich) iteration, and
``zero_diagnostics`` reports the distances that the zero-dichotomy
experiments are built on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import mpmath as mp
from mpmath import mpf, mpc

from .continuation import (AnnulusConfig, Phi_eval, classify_point,
                           point_in_domain)
from .errors import InvalidParameterError, RootFindingError, ScalingError
from .moments import OrthonormalSystem, eval_p
from .precision import bits

#: above this degree the deviation must be assembled in log space
DIRECT_PATH_MAX_N = 64


@dataclass
class DeviationRecord:
    n: int
    z: mpc
    A_n: mpc
    regime: str            # "exterior" | "interior" | "omega-star"
    aux: mpf               # |Phi(z)|


@dataclass
class ZeroSet:
    n: int
    zeros: list
    max_residual: mpf      # max |p_n(zeta)| / (max|coeff| * max(1,|zeta|)^n)


@dataclass
class RateFit:
    quantity: str
    samples: list          # (n, value) pairs
    model: str             # descriptive: "value", "value*n", "value*n/log n"
    sup_stat: mpf


def _phi_glued_prime(d, cfg, z, h=None):
    """Central finite-difference derivative of the glued map at z."""
    if h is None:
        h = mpf(2) ** (-(d.prec // 3))
    up = Phi_eval(d, z + h, cfg)
    dn = Phi_eval(d, z - h, cfg)
    return (up - dn) / (2 * h)


def deviation(d, sys: OrthonormalSystem, n: int, z, cfg: AnnulusConfig,
              regime: Optional[str] = None, force_direct: bool = False,
              glued=None) -> DeviationRecord:
    """Relative deviation A_n(z) = p_n(z) / (sqrt(n+1) Phi' Phi^n) - 1.

    ``regime`` may be forced to "omega-star" for boundary points; otherwise
    it is inferred (exterior vs. classified interior).  ``glued`` may carry a
    precomputed (Phi(z), Phi'(z)) pair so sweeps over n classify z only
    once.  Beyond degree ``DIRECT_PATH_MAX_N`` the denominator is assembled
    from logarithms so the result never depends on the exponent range of
    direct powers.
    """
    z = mpc(z)
    if n > sys.degree_max:
        raise InvalidParameterError(f"degree {n} exceeds system table")
    if regime is None:
        regime = "interior" if point_in_domain(d, z) else "exterior"
    with bits(d.prec + 32):
        if glued is not None:
            Phi, dPhi = glued
        else:
            Phi = Phi_eval(d, z, cfg)
            dPhi = _phi_glued_prime(d, cfg, z)
        pn = eval_p(sys, n, z)
        root = mp.sqrt(mpf(n + 1))
        if n <= DIRECT_PATH_MAX_N:
            A = pn / (root * dPhi * Phi ** n) - 1
        else:
            if force_direct:
                raise ScalingError(
                    f"direct power path refused for degree {n} > "
                    f"{DIRECT_PATH_MAX_N}")
            # log-magnitude accumulation: exp(log p_n - log denom) - 1
            log_den = mp.log(root) + mp.log(dPhi) + n * mp.log(Phi)
            A = mp.exp(mp.log(pn) - log_den) - 1
        return DeviationRecord(n=n, z=z, A_n=A, regime=regime,
                               aux=abs(Phi))


def nth_root_profile(d, sys: OrthonormalSystem, z, n_range,
                     cfg: Optional[AnnulusConfig] = None) -> RateFit:
    """|p_n(z)|^(1/n) over ``n_range`` with its running maximum.

    The running maximum is the empirical stand-in for the limsup that the
    interior theory compares with r(z); it is reported as a finite-range
    statistic, never as a limit.
    """
    z = mpc(z)
    samples = []
    running = mpf(0)
    with bits(d.prec + 32):
        for n in n_range:
            val = abs(eval_p(sys, n, z)) ** (mpf(1) / n)
            running = max(running, val)
            samples.append((n, val))
    return RateFit(quantity="nth-root-profile", samples=samples,
                   model="value", sup_stat=running)


def poly_zeros(sys: OrthonormalSystem, n: int,
               prec_bits: Optional[int] = None, radius=None) -> ZeroSet:
    """All n roots of p_n by simultaneous Aberth-Ehrlich iteration.

    No deflation: every root is refined against the full polynomial, so
    clustered roots cannot poison later ones.  Initial guesses sit on a
    circle whose radius reflects the domain scale (the logarithmic capacity
    of the boundary when the caller provides it).
    """
    if n < 1:
        raise InvalidParameterError("poly_zeros needs degree >= 1")
    if n > sys.degree_max:
        raise InvalidParameterError(f"degree {n} exceeds system table")
    P = prec_bits if prec_bits is not None else sys.prec_bits
    with bits(P + 32):
        coeffs = [mpc(c) for c in sys.coeffs[n]]
        an = coeffs[n]
        scale = max(abs(c) for c in coeffs)
        r0 = mpf(radius) if radius is not None else mpf(1)

        def p_and_dp(x):
            pv = coeffs[n]
            dv = mpc(0)
            for j in range(n - 1, -1, -1):
                dv = dv * x + pv
                pv = pv * x + coeffs[j]
            return pv, dv

        zs = [r0 * mp.exp(mpc(0, 2 * mp.pi * (j + mpf("0.354")) / n))
              for j in range(n)]
        target = mpf(2) ** (64 - P)
        worst = mpf("inf")
        for sweep in range(500):
            worst = mpf(0)
            for j in range(n):
                pv, dv = p_and_dp(zs[j])
                worst = max(worst, abs(pv) / (scale *
                            max(mpf(1), abs(zs[j])) ** n))
                if pv == 0:
                    continue
                w = pv / dv if dv != 0 else mpc(1)
                s = mpc(0)
                for k in range(n):
                    if k != j:
                        s += 1 / (zs[j] - zs[k])
                denom = 1 - w * s
                zs[j] = zs[j] - (w / denom if denom != 0 else w)
            if worst < target:
                break
        else:
            raise RootFindingError(
                "simultaneous iteration did not reach the residual target",
                worst_residual=worst)
        zs.sort(key=lambda t: (mp.re(t), mp.im(t)))
        return ZeroSet(n=n, zeros=zs, max_residual=worst)


def _dist_segment(p, a, b):
    """Exact distance from p to the closed segment [a, b]."""
    ab = b - a
    L2 = abs(ab) ** 2
    if L2 == 0:
        return abs(p - a)
    t = mp.re((p - a) * mp.conj(ab)) / L2
    t = min(max(t, mpf(0)), mpf(1))
    return abs(p - (a + t * ab))


def spoke_segments(d):
    """The radial segments [0, corner] whose union attracts N-gon zeros."""
    return [(mpc(0), c.location) for c in d.corners]


def zero_diagnostics(zs: ZeroSet, d) -> list:
    """Per-zero distances: to the spoke set, to the boundary, to corners.

    For the lens the 'spoke set' is the single segment between the two
    corners.  Boundary distance is a sampled minimum over L (512 points per
    arc), adequate for reporting; spoke and corner distances are exact.
    """
    if d.spec_string.startswith("lens"):
        segs = [(d.corners[0].location, d.corners[1].location)]
    else:
        segs = spoke_segments(d)
    corners = [c.location for c in d.corners]
    bsamples = []
    S = 512 * max(1, len(d.arcs))
    for j in range(S):
        bsamples.append(d.boundary_point(mpf(j) / S))
    rows = []
    for zeta in zs.zeros:
        dg = min((_dist_segment(zeta, a, b) for (a, b) in segs),
                 default=mpf("nan"))
        dl = min(abs(zeta - b) for b in bsamples)
        dc = min((abs(zeta - c) for c in corners), default=mpf("nan"))
        rows.append({"n": zs.n, "zero": zeta, "dist_gamma": dg,
                     "dist_L": dl, "dist_corners": dc})
    return rows
