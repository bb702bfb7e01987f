"""Faber polynomials, second-kind tables, and contour functionals.

Everything here lives in the w-plane of the exterior map.  A domain's psi is
sampled once per radius on equispaced circle nodes and cached; all Laurent
coefficients, Faber projections, and alpha integrals reuse those samples.

The alpha integrals are defined on |w| = 1 but evaluated on |w| = 1.1: the
integrand p_k(psi(w)) w^(-n-1) psi'(w) is analytic in the collar annulus
1 < |w| < 1.25 (p_k is entire, psi is conformal there), so by Cauchy's
theorem the value is identical while the trapezoid rule becomes spectrally
accurate instead of fighting the prevertex branch points on the circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
from mpmath import mpf, mpc

from .errors import (FaberInconsistencyError, InvalidParameterError,
                     NearBoundaryError, PrecisionExhaustedError,
                     QuadratureError)
from .precision import bits
from .moments import MomentMatrix, OrthonormalSystem, eval_p

_ALPHA_RADIUS = mpf("1.1")
_ALPHA_SAMPLES = 2048
_PROJ_RADIUS = mpf(2)


@dataclass
class LaurentSeries:
    """psi(w) = gamma*w + c[0] + sum_{k>=1} c[k] w^(-k) on |w| >= 1."""

    gamma: mpf
    c: list               # c[0..M]
    radius: mpf           # sample radius R
    count: int            # M
    prec_bits: int


@dataclass
class FaberSystem:
    F: list               # row n = monomial coefficients of F_n (length n+1)
    G: list               # row n = coefficients of G_n = F'_{n+1}/(n+1)
    gamma: mpf
    prec_bits: int


_COLLAR_CACHE: dict = {}
_CIRCLE_CACHE: dict = {}
_ALPHA_CACHE: dict = {}
_PK_CACHE: dict = {}
_QN_CACHE: dict = {}


def collar_samples(d, R, S: int):
    """w, psi(w), psi'(w) at S equispaced nodes on |w| = R (cached)."""
    key = (d.cache_key(), str(mpf(R)), S)
    if key in _COLLAR_CACHE:
        return _COLLAR_CACHE[key]
    wp = d.prec + 32
    with bits(wp):
        R = mpf(R)
        ws, psis, dpsis = [], [], []
        for s in range(S):
            w = R * mp.exp(2j * mp.pi * s / S)
            ws.append(w)
            psis.append(d.psi(w))
            dpsis.append(d.dpsi(w))
    out = {"w": ws, "psi": psis, "dpsi": dpsis, "R": R, "S": S}
    _COLLAR_CACHE[key] = out
    return out


def circle_samples(d, S: int):
    """w, psi, psi', and h = varphi(psi) at S equispaced nodes on |w| = 1.

    For corner domains psi is still well defined on the circle; h extends
    analytically across it for the reflection-symmetric catalog domains, so
    these samples support spectrally accurate trapezoid sums.
    """
    key = (d.cache_key(), S)
    if key in _CIRCLE_CACHE:
        return _CIRCLE_CACHE[key]
    wp = d.prec + 32
    with bits(wp):
        ws, psis, dpsis = [], [], []
        for s in range(S):
            w = mp.exp(2j * mp.pi * s / S)
            ws.append(w)
            psis.append(d.psi(w))
            dpsis.append(d.dpsi(w))
        hs = None
        if d.h_is_identity:
            hs = list(ws)
        elif d.interior_available:
            hs = [d.varphi(z) for z in psis]
    out = {"w": ws, "psi": psis, "dpsi": dpsis, "h": hs, "S": S}
    _CIRCLE_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# Laurent expansion of psi
# ---------------------------------------------------------------------------

def psi_laurent(d, R, M: int) -> LaurentSeries:
    """Laurent coefficients of psi from trapezoid sums on |w| = R.

    Uses 2^ceil(log2(8M)) samples; validated by reconstructing psi at
    interleaved nodes (tail test).
    """
    if M < 1:
        raise InvalidParameterError("M must be >= 1")
    S = 1
    while S < 8 * M:
        S *= 2
    wp = d.prec + 32
    cs = collar_samples(d, R, S)
    with bits(wp):
        R = mpf(R)
        # a_m = (1/S) sum psi(w_s) w_s^{-m};  gamma = a_1, c_0 = a_0, c_k = a_{-k}
        def coeff(m):
            tot = mpc(0)
            for w, pz in zip(cs["w"], cs["psi"]):
                tot += pz * w ** (-m)
            return tot / S

        gamma = coeff(1)
        c = [coeff(0)] + [coeff(-k) for k in range(1, M + 1)]
        # tail test at interleaved angles
        worst = mpf(0)
        for s in range(0, S, max(1, S // 64)):
            w = R * mp.exp(2j * mp.pi * (s + mpf("0.5")) / S)
            recon = gamma * w + c[0]
            wk = mpc(1)
            for k in range(1, M + 1):
                wk /= w
                recon += c[k] * wk
            worst = max(worst, abs(recon - d.psi(w)))
        if worst > mp.mpf(2) ** (32 - d.prec):
            raise QuadratureError(
                f"Laurent tail test failed (gap {mp.nstr(worst, 5)}); "
                f"increase M or samples")
    return LaurentSeries(gamma=gamma.real, c=c, radius=R, count=M, prec_bits=d.prec)


# ---------------------------------------------------------------------------
# Faber polynomials, two routes
# ---------------------------------------------------------------------------

def _faber_recursion(L: LaurentSeries, N: int):
    """gamma F_{n+1} = (z - c0) F_n - sum_{k=1}^n c_k F_{n-k} - n c_n."""
    g = L.gamma
    c = L.c
    rows = [[mpc(1)]]
    for n in range(N):
        prev = rows[n]
        new = [mpc(0)] * (n + 2)
        for j, v in enumerate(prev):       # z * F_n
            new[j + 1] += v
        for j, v in enumerate(prev):       # -c0 * F_n
            new[j] -= c[0] * v
        for k in range(1, n + 1):
            ck = c[k] if k < len(c) else mpc(0)
            if ck != 0:
                for j, v in enumerate(rows[n - k]):
                    new[j] -= ck * v
        cn = c[n] if 0 < n < len(c) else mpc(0)
        new[0] -= n * cn
        rows.append([v / g for v in new])
    return rows


def _faber_projection(d, N: int):
    """F_n as the nonnegative-power projection of phi^n.

    Coefficient j of F_n: (1/2 pi i) ∮ w^n psi(w)^(-j-1) psi'(w) dw on
    |w| = 2, by the substitution z = psi(w).
    """
    S = 512 if N <= 120 else 1024
    cs = collar_samples(d, _PROJ_RADIUS, S)
    wp = d.prec + 32
    with bits(wp):
        # P[s][j] = w_s^{1} psi^{-j-1} psi' ; f_j^{(n)} = (1/S) sum P[s][j] w_s^n
        inv_psi = []
        for s in range(S):
            ip = 1 / cs["psi"][s]
            base = cs["w"][s] * cs["dpsi"][s] * ip
            row = [base]
            for j in range(1, N + 1):
                base = base * ip
                row.append(base)
            inv_psi.append(row)
        rows = []
        wn = [mpc(1)] * S
        for n in range(N + 1):
            coeffs = []
            for j in range(n + 1):
                tot = mpc(0)
                for s in range(S):
                    tot += inv_psi[s][j] * wn[s]
                coeffs.append(tot / S)
            rows.append(coeffs)
            for s in range(S):
                wn[s] = wn[s] * cs["w"][s]
    return rows


def faber_polys(d, L: LaurentSeries, N: int) -> FaberSystem:
    """Faber system F_0..F_N and G_n = F'_{n+1}/(n+1), two-route validated."""
    wp = d.prec + 32
    with bits(wp):
        rec = _faber_recursion(L, N + 1)
        proj = _faber_projection(d, N + 1)
        tol = mp.mpf(2) ** (48 - d.prec)
        worst = mpf(0)
        for n in range(N + 2):
            for j in range(n + 1):
                worst = max(worst, abs(rec[n][j] - proj[n][j]))
        if worst > tol:
            raise FaberInconsistencyError(
                f"Faber routes disagree: max coefficient gap {mp.nstr(worst, 5)}",
                max_gap=worst)
        F = [proj[n] for n in range(N + 1)]
        G = []
        for n in range(N + 1):
            nxt = proj[n + 1]
            G.append([(j + 1) * nxt[j + 1] / (n + 1) for j in range(n + 1)])
    return FaberSystem(F=F, G=G, gamma=L.gamma, prec_bits=d.prec)


# ---------------------------------------------------------------------------
# epsilon, beta, identity
# ---------------------------------------------------------------------------

def _norm2_from_gram(coeffs, M: MomentMatrix):
    """L2(D) norm squared of the polynomial with the given coefficients."""
    s = mpc(0)
    for j, cj in enumerate(coeffs):
        row = M.entries[j]
        for k, ck in enumerate(coeffs):
            s += cj * mp.conj(ck) * row[k]
    return s.real


def epsilon_nn(d, M: MomentMatrix, fab: FaberSystem, n: int) -> mpf:
    """eps_{n,n} = 1 - (n+1) ||G_n||^2."""
    with bits(d.prec + 32):
        val = 1 - (n + 1) * _norm2_from_gram(fab.G[n], M)
        if val < -mp.mpf(2) ** (32 - d.prec):
            raise PrecisionExhaustedError(
                f"eps_{{{n},{n}}} = {mp.nstr(val, 8)} negative beyond tolerance")
    return val


def beta_nn(d, sys: OrthonormalSystem, fab: FaberSystem, M: MomentMatrix,
            n: int) -> mpf:
    """beta_{n,n} = (n+1) ||G_n - (gamma^(n+1)/lambda_n) p_n||^2."""
    with bits(d.prec + 32):
        scale = d.capacity ** (n + 1) / sys.leading[n]
        q = [fab.G[n][j] - scale * sys.coeffs[n][j] for j in range(n + 1)]
        return (n + 1) * _norm2_from_gram(q, M)


def lambda_identity_residual(d, sys, fab, M, n) -> mpf:
    """Residual of (n+1) gamma^(2(n+1)) / lambda_n^2 = 1 - (beta + eps)."""
    with bits(d.prec + 32):
        lhs = (n + 1) * d.capacity ** (2 * (n + 1)) / sys.leading[n] ** 2
        rhs = 1 - (beta_nn(d, sys, fab, M, n) + epsilon_nn(d, M, fab, n))
        return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# alpha coefficients
# ---------------------------------------------------------------------------

def alpha(d, sys: OrthonormalSystem, n: int, k: int) -> mpc:
    """alpha_{n,k} = -(1/2 pi i) conj( ∮ p_k(psi(w)) w^(-n-1) psi'(w) dw ).

    Contour nominally |w| = 1; evaluated on |w| = 1.1 (equal by analyticity
    in the collar).  Self-validated by comparing S and S/2 trapezoid sums.
    """
    key = (d.cache_key(), sys.degree_max, n, k)
    if key in _ALPHA_CACHE:
        return _ALPHA_CACHE[key]
    if k > sys.degree_max:
        raise InvalidParameterError(f"alpha needs p_{k} beyond degree_max")
    S = _ALPHA_SAMPLES
    cs = collar_samples(d, _ALPHA_RADIUS, S)
    wp = d.prec + 32
    pk_key = (d.cache_key(), sys.degree_max, k)
    with bits(wp):
        vals = _PK_CACHE.get(pk_key)
        if vals is None:
            vals = [eval_p(sys, k, cs["psi"][s]) * cs["dpsi"][s] * cs["w"][s]
                    for s in range(S)]
            _PK_CACHE[pk_key] = vals
        tot_full = mpc(0)
        tot_half = mpc(0)
        for s in range(S):
            term = vals[s] * cs["w"][s] ** (-n - 1)
            tot_full += term
            if s % 2 == 0:
                tot_half += term
        # alpha = -(1/2pi i) conj(I) and tot/S = I/(2pi i); conjugation flips
        # the sign of 1/(2pi i), so alpha = +conj(tot/S).
        val_full = mp.conj(tot_full / S)
        val_half = mp.conj(tot_half / (S // 2))
        # generous validation bound: both sums are spectrally convergent
        if abs(val_full - val_half) > mp.mpf(2) ** (-min(d.prec // 2, 120)):
            raise QuadratureError(
                f"alpha({n},{k}) trapezoid self-validation failed "
                f"(gap {mp.nstr(abs(val_full - val_half), 5)})")
    _ALPHA_CACHE[key] = val_full
    return val_full


def hg_tables(d, sys: OrthonormalSystem, n: int, J: int):
    """h(n, 0..J) by the alpha-driven recursion.

    h(n,0) = 1; g(n,0,k) = -alpha_{n,k};
    h(n,m+1) = g(n,m,n+m+1)/alpha_{n+m+1,n+m+1};
    g(n,m+1,k) = g(n,m,k) - h(n,m+1) alpha_{n+m+1,k}.
    """
    wp = d.prec + 32
    with bits(wp):
        kmax = n + J + 1
        h = [mpc(1)]
        g = {k: -alpha(d, sys, n, k) for k in range(n + 1, kmax + 1)}
        for m in range(J):
            idx = n + m + 1
            diag = alpha(d, sys, idx, idx)
            if abs(diag) < mp.mpf(2) ** (-d.prec // 2):
                raise PrecisionExhaustedError(
                    f"alpha({idx},{idx}) vanishes; cannot continue recursion")
            hm = g[idx] / diag
            h.append(hm)
            for k in range(idx + 1, kmax + 1):
                g[k] = g[k] - hm * alpha(d, sys, idx, k)
    return h


# ---------------------------------------------------------------------------
# Q_n contour functional
# ---------------------------------------------------------------------------

def Q_n(d, n: int, z, S: int = 2048) -> mpc:
    """Q_n(z) = (n+1) varphi'(z)/(2 pi i) ∮_{|w|=1} w^n/(h(w) - varphi(z)) dw.

    h(w) = varphi(psi(w)) is analytic across |w| = 1 for the catalog corner
    domains (reflection symmetry), so the trapezoid sum is spectral.  Raises
    near-boundary-error when varphi(z) comes too close to the unit circle,
    where the integrand's pole approaches the contour.
    """
    key = (d.cache_key(), n, str(mpc(z)), S)
    if key in _QN_CACHE:
        return _QN_CACHE[key]
    cs = circle_samples(d, S)
    if cs["h"] is None:
        raise InvalidParameterError(
            f"Q_n needs the interior map; unavailable for {d.name!r}")
    wp = d.prec + 32
    with bits(wp):
        vz = d.varphi(z)
        dist = 1 - abs(vz)
        if dist < mpf("0.02"):
            raise NearBoundaryError(
                f"z too close to the boundary: 1 - |varphi(z)| = {mp.nstr(dist, 5)}",
                distance=dist)
        tot_full = mpc(0)
        tot_half = mpc(0)
        for s in range(S):
            term = cs["w"][s] ** (n + 1) / (cs["h"][s] - vz)
            tot_full += term
            if s % 2 == 0:
                tot_half += term
        val_full = (n + 1) * d.dvarphi(z) * tot_full / S
        val_half = (n + 1) * d.dvarphi(z) * tot_half / (S // 2)
        if abs(val_full - val_half) > mp.mpf(2) ** (-48) * (1 + abs(val_full)):
            raise QuadratureError(
                f"Q_{n} trapezoid self-validation failed "
                f"(gap {mp.nstr(abs(val_full - val_half), 5)})")
    _QN_CACHE[key] = val_full
    return val_full


def series_reconstruction(d, sys: OrthonormalSystem, n: int, z, J: int) -> mpc:
    """Truncated series sum_{j<=J} h(n,j) Q_{n+j}(z).

    Converges to lambda_n/gamma^(n+1) * p_n(z) as J grows.
    """
    h = hg_tables(d, sys, n, J)
    with bits(d.prec + 32):
        tot = mpc(0)
        for j in range(J + 1):
            tot += h[j] * Q_n(d, n + j, z)
    return tot
