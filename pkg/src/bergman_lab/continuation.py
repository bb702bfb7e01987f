"""Meromorphic continuation of h(w) = varphi(psi(w)) and point classification.

The boundary correspondence h extends meromorphically to an annulus around
|w| = 1.  Outside the circle h(w) = varphi_cont(psi(w)), where varphi_cont is
the reflection continuation of the interior map: for the regular N-gons with
N in {3, 4} edge reflections tile the plane, so varphi continues to a global
meromorphic function evaluated by folding the argument back into the polygon
(tracking reflection parity); for the lens varphi is already a global
rational function.  Inside the circle h(w) = 1/conj(h(1/conj(w))).

For zero finding and classification the module builds, per domain, a
pole-subtracted Laurent model of h: pole locations are the images under phi
of the reflection orbit of the base point (odd-parity orbit points give
poles of varphi_cont, even-parity ones give zeros whose circle reflections
are the poles of h inside |w| < 1), residues follow from the chain rule, and
the remaining analytic part is recovered by trapezoid sums on |w| = 1.
Series evaluation makes argument-principle windings and Newton polishing
cheap; every model is validated against direct h evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath as mp
from mpmath import mpf, mpc

from .errors import (AnnulusDomainError, ClassificationError,
                     ContourDegenerateError, InvalidParameterError,
                     NearBoundaryInconclusiveError, NotInOmegaStarError,
                     RootFindingError)
from .precision import bits
from .faber import circle_samples

#: contours stay this far inside |w| = 1 during classification
DELTA_EDGE = mpf("1e-6")
#: relative modulus window within which largest zeros count as tied
TIE_WINDOW = mpf("1e-20")
#: maximum contour jitter attempts before classification fails
MAX_JITTERS = 8

_INF = mpc(mp.inf, 0)


@dataclass(frozen=True)
class AnnulusConfig:
    """Working annulus rho_in < |w| < 1/rho_in and solver tolerances."""

    rho_in: str = "0.3"
    circle_samples: int = 4096
    newton_tol_log2: int = 100    # tolerance 2^(newton_tol_log2 - P)

    def rho(self):
        return mpf(self.rho_in)


@dataclass
class ContinuationResult:
    point: mpc
    p: int
    r: mpf
    phi1: Optional[mpc]
    in_omega_star: bool


# ---------------------------------------------------------------------------
# reflection folding: global continuation of varphi
# ---------------------------------------------------------------------------

_FOLD_CACHE: dict = {}


def _ngon_fold_data(d):
    key = d.cache_key()
    if key in _FOLD_CACHE:
        return _FOLD_CACHE[key]
    verts = [c.location for c in d.corners]
    N = len(verts)
    edges = []
    for k in range(N):
        a, b = verts[k], verts[(k + 1) % N]
        B = (b - a) ** 2 / abs(b - a) ** 2
        normal = mp.exp(1j * (mp.arg(b - a) - mp.pi / 2))
        # edge line: re(z * conj(normal)) = dist, interior side below
        dist = mp.re(a * mp.conj(normal))
        alpha = a - B * mp.conj(a)
        edges.append((B, alpha, normal, dist))
    _FOLD_CACHE[key] = edges
    return edges


def _fold(d, z):
    """Map z into closure(D) by edge-line reflections.

    Returns (A, b, parity): the composed map M with M(z) in the polygon,
    M(y) = A*y + b for even parity and A*conj(y) + b for odd parity.
    Only valid when the edge reflections tile the plane (N in {3, 4}).
    """
    edges = _ngon_fold_data(d)
    tol = mp.mpf(2) ** (48 - d.prec)
    A, b = mpc(1), mpc(0)
    parity = 0
    for _ in range(256):
        zc = A * mp.conj(z) + b if parity else A * z + b
        worst, worst_k = tol, -1
        for k, (B, alpha, normal, dist) in enumerate(edges):
            v = mp.re(zc * mp.conj(normal)) - dist
            if v > worst:
                worst, worst_k = v, k
        if worst_k < 0:
            return A, b, parity
        B, alpha, normal, dist = edges[worst_k]
        A = B * mp.conj(A)
        b = alpha + B * mp.conj(b)
        parity ^= 1
    raise ClassificationError("reflection folding did not terminate")


def varphi_cont(d, z):
    """Globally continued interior map: (value, derivative).

    Returns (_INF, _INF) at a pole of the continuation.
    """
    z = mpc(z)
    if d.h_is_identity:
        return z, mpc(1)
    spec = d.spec_string
    if spec.startswith("lens"):
        if z == 1 or z == -1:
            return _INF, _INF
        return d.varphi(z), d.dvarphi(z)
    if spec.startswith("ngon"):
        N = len(d.corners)
        if N not in (3, 4):
            raise InvalidParameterError(
                "continuation requires a plane-tiling reflection group "
                f"(N in {{3, 4}}), got N={N}")
        A, b, parity = _fold(d, z)
        zf = A * mp.conj(z) + b if parity else A * z + b
        v = d.varphi(zf)
        if parity == 0:
            return v, d.dvarphi(zf) * A
        if v == 0:
            return _INF, _INF
        F = mp.conj(v)
        Fp = mp.conj(d.dvarphi(zf) * A)
        return 1 / F, -Fp / F ** 2
    raise InvalidParameterError(
        f"no interior-map continuation for domain {d.name}")


def h_eval(d, w, cfg: AnnulusConfig):
    """h(w) on the working annulus; _INF marks a pole."""
    w = mpc(w)
    rho = cfg.rho()
    aw = abs(w)
    if not (rho < aw < 1 / rho):
        raise InvalidParameterError("w outside the working annulus")
    with bits(d.prec + 32):
        if d.h_is_identity:
            return w
        if aw >= 1:
            val, _ = varphi_cont(d, d.psi(w))
            return val
        val, _ = varphi_cont(d, d.psi(1 / mp.conj(w)))
        if val == _INF:
            return mpc(0)
        if val == 0:
            return _INF
        return 1 / mp.conj(val)


def h_eval_prime(d, w, cfg: AnnulusConfig):
    """(h(w), h'(w)) by the analytic chain rule; (_INF, _INF) at poles."""
    w = mpc(w)
    with bits(d.prec + 32):
        if d.h_is_identity:
            return w, mpc(1)
        if abs(w) >= 1:
            val, dv = varphi_cont(d, d.psi(w))
            if val == _INF:
                return _INF, _INF
            return val, dv * d.dpsi(w)
        v = 1 / mp.conj(w)
        val, dv = varphi_cont(d, d.psi(v))
        if val == _INF:
            return mpc(0), mpc(0)   # zero of h; derivative not needed here
        if val == 0:
            return _INF, _INF
        hv = mp.conj(val)
        hp_out = dv * d.dpsi(v)
        # h(w) = 1/conj(h_out(1/conj(w))); H(w) := conj(h_out(1/conj w)) is
        # analytic with H'(w) = -conj(h_out'(1/conj w)) / w^2
        Hp = -mp.conj(hp_out) / w ** 2
        return 1 / hv, -Hp / hv ** 2


# ---------------------------------------------------------------------------
# pole enumeration (reflection orbit of the base point)
# ---------------------------------------------------------------------------

def _orbit(d, R_need):
    """Reflection-group orbit of the base point 0 within |zeta| <= R_need.

    Returns a list of (zeta, parity, A_inv) where the tile map M gives
    zeta = M(0) and A_inv is the linear factor of M^{-1} (the fold map
    sending a neighborhood of zeta back to the base polygon).
    """
    edges = _ngon_fold_data(d)
    seen = {}
    # tiles as maps (A, b, parity); key by the image of 0 and of a probe
    frontier = [(mpc(1), mpc(0), 0)]
    probe = mpc("0.3", "0.17")
    out = []

    def keyof(A, b, parity):
        z0 = b
        z1 = A * mp.conj(probe) + b if parity else A * probe + b
        return (mp.nstr(z0, 20), mp.nstr(z1, 20))

    seen[keyof(mpc(1), mpc(0), 0)] = True
    out.append((mpc(0), 0, mpc(1)))
    pt_seen = {(0, 0): True}

    def pt_key(z):
        return (int(mp.floor(mp.re(z) * 4096 + mpf("0.5"))),
                int(mp.floor(mp.im(z) * 4096 + mpf("0.5"))))

    while frontier:
        newf = []
        for (A, b, parity) in frontier:
            for (B, alpha, normal, dist) in edges:
                # neighbor tile map M' = M o r_k, r_k(y) = alpha + B conj(y):
                # M even: M'(y) = A(alpha + B conj y) + b  (odd result)
                # M odd:  M'(y) = A conj(alpha + B conj y) + b (even result)
                if parity:
                    A2 = A * mp.conj(B)
                    b2 = A * mp.conj(alpha) + b
                else:
                    A2 = A * B
                    b2 = A * alpha + b
                p2 = parity ^ 1
                k2 = keyof(A2, b2, p2)
                if k2 in seen:
                    continue
                seen[k2] = True
                zeta = b2          # M'(0)
                if abs(zeta) > R_need + 2:
                    continue
                A_inv = 1 / mp.conj(A2) if p2 else 1 / A2
                pk = pt_key(zeta)
                if abs(zeta) <= R_need and pk not in pt_seen:
                    pt_seen[pk] = True
                    out.append((zeta, p2, A_inv))
                newf.append((A2, b2, p2))
        frontier = newf
    return out


_POLE_CACHE: dict = {}


def h_pole_data(d, cfg: AnnulusConfig):
    """Poles of h in a slightly enlarged working annulus: [(w_p, res_p)]."""
    key = (d.cache_key(), cfg.rho_in)
    if key in _POLE_CACHE:
        return _POLE_CACHE[key]
    rho = cfg.rho()
    poles = []
    with bits(d.prec + 32):
        if d.h_is_identity:
            _POLE_CACHE[key] = []
            return []
        dvarphi0 = d.dvarphi(0)
        if d.spec_string.startswith("lens"):
            for (zeta, r_z) in d.varphi_pole_data:
                w_p = d.phi(zeta)
                if abs(w_p) < mpf("1.2") / rho:
                    poles.append((w_p, r_z / d.dpsi(w_p)))
        else:
            R_out = mpf("1.2") / rho
            R_need = max(abs(d.psi(R_out * mp.exp(2j * mp.pi * s / 32)))
                         for s in range(32)) + 1
            for (zeta, parity, A_inv) in _orbit(d, R_need):
                if zeta == 0:
                    continue
                w_img = d.phi(zeta)
                if parity == 1:
                    # pole of varphi_cont: residue 1/conj(varphi'(0) A_inv)
                    if abs(w_img) < R_out:
                        r_z = 1 / mp.conj(dvarphi0 * A_inv)
                        poles.append((w_img, r_z / d.dpsi(w_img)))
                else:
                    # zero of h outside; reflected pole of h inside
                    v_p = 1 / mp.conj(w_img)
                    if abs(v_p) > mpf("0.85") * rho:
                        s_z = dvarphi0 * A_inv * d.dpsi(w_img)
                        poles.append((v_p, -v_p ** 2 / mp.conj(s_z)))
    _POLE_CACHE[key] = poles
    return poles


# ---------------------------------------------------------------------------
# Laurent model of h
# ---------------------------------------------------------------------------

class HModel:
    """h(w) = sum_k b_k w^k + sum_p res_p/(w - w_p) on the working annulus."""

    def __init__(self, d, cfg, poles, b_neg, b_pos, prec_bits):
        self.d = d
        self.cfg = cfg
        self.poles = poles
        self.b_neg = b_neg        # b_neg[k] = b_{-k-1}
        self.b_pos = b_pos        # b_pos[k] = b_k, k >= 0
        self.prec_bits = prec_bits

        def pack(coeffs):
            import math
            entries = [(k, b) for k, b in enumerate(coeffs) if b != 0]
            mags = [math.log2(float(abs(b))) if abs(b) > mpf(0) else -1e9
                    for (_, b) in entries]
            # Discard coefficients at the sampling noise floor: they carry no
            # information and would mislead the truncation rule in eval().
            if len(mags) >= 16:
                tail = sorted(mags[-max(8, len(mags) // 8):])
                floor = tail[len(tail) // 2] + 8.0
                keep = [i for i, m in enumerate(mags) if m > floor]
                entries = [entries[i] for i in keep]
                mags = [mags[i] for i in keep]
            return entries, mags

        self._pos, self._pos_mag = pack(b_pos)
        self._neg, self._neg_mag = pack(b_neg)

    @staticmethod
    def _cut(entries, mags, slope, drop):
        """Index past the last useful term when term magnitudes behave like
        mags[i] + degree(i) * slope.

        For slope <= 0 every term shrinks past the coefficient noise floor:
        include everything above ``drop``.  For slope > 0 the noise-floor
        coefficients are amplified geometrically, so the partial sums behave
        like an asymptotic series; truncating at the smallest term minimises
        the error.
        """
        if not entries:
            return 0, -1e9
        if slope <= 0:
            cut = len(entries)
            best = -1e9
            for i, (k, _) in enumerate(entries):
                t = mags[i] + k * slope
                best = max(best, t)
                if t < drop and i + 1 < cut:
                    # keep scanning: a later coefficient may still be large
                    continue
            return cut, best
        i_min, t_min = 0, mags[0] + entries[0][0] * slope
        for i, (k, _) in enumerate(entries):
            t = mags[i] + k * slope
            if t < t_min:
                i_min, t_min = i, t
        return i_min + 1, t_min

    def eval(self, w, want_prime=False):
        import math
        w = mpc(w)
        law = math.log2(float(abs(w)))
        drop = -(self.prec_bits + 16)
        tot = mpc(0)
        dtot = mpc(0)
        cut_p, _ = self._cut(self._pos, self._pos_mag, law, drop)
        for (k, bk) in self._pos[:cut_p]:
            wk = w ** k
            tot += bk * wk
            if want_prime and k:
                dtot += k * bk * wk / w
        iw = 1 / w
        cut_n, _ = self._cut(
            [(k + 1, b) for (k, b) in self._neg], self._neg_mag, -law, drop)
        for (k, bk) in self._neg[:cut_n]:
            m = k + 1           # term b_{-m} w^{-m}
            wk = iw ** m
            tot += bk * wk
            if want_prime:
                dtot += -m * bk * wk / w
        for (w_p, res) in self.poles:
            tot += res / (w - w_p)
            if want_prime:
                dtot += -res / (w - w_p) ** 2
        if want_prime:
            return tot, dtot
        return tot

    def poles_between(self, r1, r2):
        return [w_p for (w_p, _) in self.poles if r1 < abs(w_p) < r2]


_HMODEL_CACHE: dict = {}


def _symmetry_stride(d):
    if d.spec_string.startswith("ngon"):
        return len(d.corners)
    if d.spec_string.startswith("lens"):
        return 2
    return 1


def h_model(d, cfg: AnnulusConfig) -> HModel:
    """Build (and cache) the pole-subtracted Laurent model of h."""
    key = (d.cache_key(), cfg.rho_in, cfg.circle_samples)
    if key in _HMODEL_CACHE:
        return _HMODEL_CACHE[key]
    if not d.interior_available:
        raise AnnulusDomainError(
            f"domain {d.name} has no interior map; h is unavailable")
    S = cfg.circle_samples
    poles = h_pole_data(d, cfg)
    wp = d.prec + 32
    with bits(wp):
        cs = circle_samples(d, S)
        ws, hs = cs["w"], cs["h"]
        reg = []
        for s in range(S):
            v = hs[s]
            for (w_p, res) in poles:
                v -= res / (ws[s] - w_p)
            reg.append(v)
        stride = _symmetry_stride(d)
        # Coefficients hit the sample noise floor once the true decay
        # undercuts ~2^-(P+20); computing far beyond that is wasted work.
        K = min((3 * S) // 8, 2 * wp)
        b_pos = [mpc(0)] * (K + 1)
        b_neg = [mpc(0)] * K
        for k in range(-K, K + 1):
            if stride > 1 and (k - 1) % stride != 0:
                continue
            # b_k = (1/S) sum_s reg[s] w_s^(-k), w_s^(-k) = ws[(-s k) mod S]
            step = (-k) % S
            tot = mpc(0)
            idx = 0
            for s in range(S):
                tot += reg[s] * ws[idx]
                idx += step
                if idx >= S:
                    idx -= S
            b = tot / S
            if k >= 0:
                b_pos[k] = b
            else:
                b_neg[-k - 1] = b
        model = HModel(d, cfg, poles, b_neg, b_pos, d.prec)
    _HMODEL_CACHE[key] = model
    return model


# ---------------------------------------------------------------------------
# zero location and point classification
# ---------------------------------------------------------------------------

def _float_model(model):
    """Double-precision copy of the Laurent model for cheap winding counts."""
    cached = getattr(model, "_float", None)
    if cached is not None:
        return cached
    import numpy as np
    kp = np.array([k for (k, _) in model._pos], dtype=np.int64)
    bp = np.array([complex(b) for (_, b) in model._pos])
    kn = np.array([k + 1 for (k, _) in model._neg], dtype=np.int64)
    bn = np.array([complex(b) for (_, b) in model._neg])
    wp = np.array([complex(w) for (w, _) in model.poles])
    rp = np.array([complex(r) for (_, r) in model.poles])
    model._float = (kp, bp, kn, bn, wp, rp)
    return model._float


def _float_eval(fm, w, want_prime=False):
    """Evaluate the float model on a complex ndarray ``w``."""
    import numpy as np
    kp, bp, kn, bn, wp, rp = fm
    out = np.zeros_like(w)
    dout = np.zeros_like(w) if want_prime else None
    errstate = np.errstate(all="ignore")   # iterates may land on poles
    with errstate:
        return _float_eval_inner(np, fm, w, out, dout, want_prime)


def _float_eval_inner(np, fm, w, out, dout, want_prime):
    kp, bp, kn, bn, wp, rp = fm
    for lo in range(0, w.size, 4096):
        ww = w[lo:lo + 4096]
        P = np.power(ww[:, None], kp[None, :])
        out[lo:lo + 4096] += P @ bp
        iww = 1.0 / ww
        Q = np.power(iww[:, None], kn[None, :])
        out[lo:lo + 4096] += Q @ bn
        if wp.size:
            diff = ww[:, None] - wp[None, :]
            out[lo:lo + 4096] += (rp[None, :] / diff).sum(axis=1)
        if want_prime:
            d = (P @ (kp * bp)) * iww
            d += (Q @ (kn * bn)) * (-iww)
            if wp.size:
                d += (-rp[None, :] / diff ** 2).sum(axis=1)
            dout[lo:lo + 4096] = d
    if want_prime:
        return out, dout
    return out


def _winding(fm, vz, r):
    """Winding number of w -> h(w) - vz around circle |w| = r.

    Phase tracking: the sum of principal-branch argument increments over a
    closed sampled loop is exactly 2 pi times an integer; the count is
    trusted once every increment is safely below pi (so no sample-to-sample
    phase wrap can be missed).  Equivalent to the trapezoid integral of the
    log-derivative, refined until it is unambiguous.
    """
    import numpy as np
    vzf = complex(vz)
    S = 256
    while S <= (1 << 16):
        th = np.arange(S) * (2.0 * np.pi / S)
        w = float(r) * np.exp(1j * th)
        f = _float_eval(fm, w) - vzf
        af = np.abs(f)
        scale = max(float(np.median(af)), 1e-300)
        if af.min() < 1e-9 * scale:
            raise ContourDegenerateError(
                f"h - varphi(z) vanishes on the sampled circle |w| = {float(r)}")
        dph = np.angle(np.roll(f, -1) / f)
        if np.abs(dph).max() < 2.0:
            return int(round(dph.sum() / (2.0 * np.pi)))
        S *= 2
    raise ContourDegenerateError(
        f"phase tracking did not stabilise on |w| = {float(r)}")


def _poles_in(model, r1, r2):
    return sum(1 for (w_p, _) in model.poles if r1 < abs(w_p) < r2)


def annulus_zero_count(d, z, r1, r2, cfg: AnnulusConfig) -> int:
    """Zeros (with multiplicity) of h(w) - varphi(z) in r1 < |w| < r2.

    Argument-principle winding over the two circles, corrected for the poles
    of h inside the ring (the winding counts zeros minus poles).
    """
    r1, r2 = mpf(r1), mpf(r2)
    rho = cfg.rho()
    if not (rho <= r1 < r2 <= 1 / rho):
        raise InvalidParameterError(
            f"ring [{float(r1)}, {float(r2)}] outside working annulus")
    model = h_model(d, cfg)
    fm = _float_model(model)
    vz, _ = varphi_cont(d, z)
    count = (_winding(fm, vz, r2) - _winding(fm, vz, r1)
             + _poles_in(model, r1, r2))
    if count < 0:
        raise ClassificationError(
            f"negative corrected count {count} on ring "
            f"[{float(r1)}, {float(r2)}]")
    return count


def _winding_jittered(fm, vz, r, lo, hi):
    """Winding at radius ~r, nudged inside (lo, hi) if a zero hits the circle."""
    span = hi - lo
    for j in range(MAX_JITTERS):
        try:
            return _winding(fm, vz, r), r
        except ContourDegenerateError:
            r = r + span * 1e-4 * (j + 1) * (1 if (j % 2 == 0) else -1)
            r = min(max(r, lo + span * 1e-6), hi - span * 1e-6)
    raise ClassificationError(
        f"no admissible contour radius near {float(r)} after "
        f"{MAX_JITTERS} jitters")


def _newton_float(fm, vz, seeds, lo, hi):
    """Vectorised float Newton for h(w) - vz from an array of seeds."""
    import numpy as np
    w = seeds.copy()
    vzf = complex(vz)
    with np.errstate(all="ignore"):
        for _ in range(60):
            f, df = _float_eval(fm, w, want_prime=True)
            f -= vzf
            step = f / df
            step[~np.isfinite(step)] = 0.0
            w = w - step
    f = _float_eval(fm, w) - vzf
    aw = np.abs(w)
    good = (np.abs(f) < 1e-9) & (aw > lo) & (aw < hi)
    return w[good]


def _dedupe(points, tol):
    out = []
    for w in points:
        if all(abs(w - u) > tol for u in out):
            out.append(w)
    return out


def _float_zeros(model, fm, vz, rho):
    """Locate zeros of h - vz in rho < |w| < 1 - delta_edge, double precision.

    Dyadic radial subdivision with pole-corrected windings isolates the
    count per ring; Newton from mid-ring seeds finds the roots; small-circle
    windings assign multiplicities.  Returns a list of (root, multiplicity).
    """
    import numpy as np
    lo = float(rho)
    hi = float(1 - DELTA_EDGE)
    wind_cache = {}

    def wind(r):
        if r not in wind_cache:
            c, r_used = _winding_jittered(fm, vz, r, lo * 0.999, hi)
            wind_cache[r] = (c, r_used)
        return wind_cache[r]

    c_lo, r_lo = wind(lo)
    c_hi, r_hi = wind(hi)
    total = c_hi - c_lo + _poles_in(model, r_lo, r_hi)
    if total == 0:
        return [], 0
    pole_radii = [abs(w_p) for (w_p, _) in model.poles]
    found = []
    stack = [(r_lo, c_lo, r_hi, c_hi, total)]
    while stack:
        a, ca, b, cb, count = stack.pop()
        if count == 0:
            continue
        if count == 1 or (b - a) < 1e-4:
            K = max(16, 8 * count)
            th = np.arange(K) * (2.0 * np.pi / K) + 0.37
            seeds = (0.5 * (a + b)) * np.exp(1j * th)
            for extra in range(3):
                roots = _dedupe(list(_newton_float(fm, vz, seeds, a, b)), 1e-7)
                if count == 1 and len(roots) == 1:
                    found.append((roots[0], 1))
                    break
                mults = []
                ok = True
                for w0 in roots:
                    eps = 1e-5
                    near = min((abs(w0 - u) for u in roots if u is not w0),
                               default=1.0)
                    near_p = min((abs(abs(w0) - pr) for pr in pole_radii),
                                 default=1.0)
                    eps = min(eps, near / 3, max(near_p / 2, 1e-9))
                    # small-circle winding about w0 gives its multiplicity
                    S = 128
                    thc = np.arange(S) * (2.0 * np.pi / S)
                    wc = w0 + eps * np.exp(1j * thc)
                    fc = _float_eval(fm, wc) - complex(vz)
                    dph = np.angle(np.roll(fc, -1) / fc)
                    if np.abs(dph).max() > 2.0:
                        ok = False
                        break
                    mults.append(int(round(dph.sum() / (2.0 * np.pi))))
                if ok and sum(mults) == count and len(roots) > 0:
                    found.extend(zip(roots, mults))
                    break
                K *= 4
                th = np.arange(K) * (2.0 * np.pi / K) + 0.11 * (extra + 1)
                rr = np.linspace(a + (b - a) * 0.1, b - (b - a) * 0.1,
                                 5 + 2 * extra)
                seeds = (rr[:, None] * np.exp(1j * th)[None, :]).ravel()
            else:
                raise ClassificationError(
                    f"located {len(roots)} roots but ring "
                    f"({a:.6f}, {b:.6f}) holds {count} zeros")
            continue
        m = 0.5 * (a + b)
        # keep the cut away from pole radii, where windings refine slowly
        for pr in pole_radii:
            if abs(m - pr) < 1e-6:
                m += 3e-6
        cm, rm = wind(m)
        inner = cm - ca + _poles_in(model, a, rm)
        outer = cb - cm + _poles_in(model, rm, b)
        stack.append((a, ca, rm, cm, inner))
        stack.append((rm, cm, b, cb, outer))
    return found, total


def _polish_root(d, cfg, vz, w0):
    """Full-precision Newton on h(w) - varphi(z) from a float-accurate seed."""
    wp = d.prec + 32
    tol = mpf(2) ** (cfg.newton_tol_log2 - d.prec)
    with bits(wp):
        w = mpc(w0)
        best = None
        for _ in range(80):
            hv, df = h_eval_prime(d, w, cfg)
            f = hv - vz
            af = abs(f)
            if best is None or af < best[1]:
                best = (w, af)
            if af < tol:
                return w, af
            if df == 0:
                break
            w = w - f / df
        raise RootFindingError(
            "root polish stalled at residual "
            f"{mp.nstr(best[1], 5)} (target {mp.nstr(tol, 5)})",
            worst_residual=best[1])


def classify_point(d, z, cfg: AnnulusConfig) -> ContinuationResult:
    """Stratum p, radius r(z), and (when p = 1) the continued map value.

    Zeros of h(w) - varphi(z) in rho_in < |w| < 1 - delta_edge are located in
    double precision (windings + Newton) and polished with full-precision
    Newton on the direct h evaluation; the largest-modulus group, merged
    under the relative tie window, determines p and r.
    """
    z = mpc(z)
    model = h_model(d, cfg)
    fm = _float_model(model)
    with bits(d.prec + 32):
        vz, _ = varphi_cont(d, z)
    rho = cfg.rho()
    raw, total = _float_zeros(model, fm, vz, rho)
    if total == 0:
        return ContinuationResult(point=z, p=0, r=rho, phi1=None,
                                  in_omega_star=False)
    polished = []
    for (w0, mult) in raw:
        w_star, _ = _polish_root(d, cfg, vz, w0)
        polished.append((w_star, mult))
    rmax = max(abs(w) for (w, _) in polished)
    edge = 1 - DELTA_EDGE
    if abs(rmax - edge) < TIE_WINDOW * edge:
        raise NearBoundaryInconclusiveError(
            f"largest zero modulus {mp.nstr(rmax, 25)} touches the contour "
            "ceiling; the point is too close to the boundary to classify")
    tied = [(w, m) for (w, m) in polished if abs(w) >= rmax * (1 - TIE_WINDOW)]
    p = sum(m for (_, m) in tied)
    phi1 = None
    if p == 1:
        phi1 = tied[0][0]
    return ContinuationResult(point=z, p=p, r=rmax, phi1=phi1,
                              in_omega_star=(p == 1))


def point_in_domain(d, z, margin=mpf(0)) -> bool:
    """Strict interior test for catalog domains (margin > 0 shrinks D)."""
    z = mpc(z)
    spec = d.spec_string
    if spec.startswith("disk") or spec.startswith("ellipse"):
        # level sets of |phi| are known only through phi; use the unit circle
        # (disk) / boundary ellipse directly.
        if spec.startswith("disk"):
            return abs(z) < 1 - margin
        rho = mpf(spec.split("=", 1)[1])
        a, b = (rho + 1 / rho) / 2, (rho - 1 / rho) / 2
        return (mp.re(z) / a) ** 2 + (mp.im(z) / b) ** 2 < (1 - margin) ** 2
    if spec.startswith("ngon"):
        for (_, _, normal, dist) in _ngon_fold_data(d):
            if mp.re(z * mp.conj(normal)) >= dist - margin:
                return False
        return True
    if spec.startswith("lens"):
        v = d.varphi(z) if z not in (mpc(1), mpc(-1)) else mpc(2)
        return abs(v) < 1 - margin
    raise InvalidParameterError(f"no interior test for domain {d.name}")


def Phi_eval(d, z, cfg: AnnulusConfig):
    """The glued conformal map: exterior map outside D, continued interior
    map on the p = 1 stratum inside."""
    z = mpc(z)
    for c in d.corners:
        if abs(z - c.location) < DELTA_EDGE:
            raise NotInOmegaStarError(
                "the glued map has no continuous extension at a corner")
    if point_in_domain(d, z):
        res = classify_point(d, z, cfg)
        if res.p != 1:
            raise NotInOmegaStarError(
                f"interior point lies in stratum p = {res.p}")
        return res.phi1
    with bits(d.prec + 32):
        return d.phi(z)


# ---------------------------------------------------------------------------
# raster export
# ---------------------------------------------------------------------------

def _classify_float(model, fm, vz, rho):
    """Double-precision classification for raster pixels: (p, r)."""
    raw, total = _float_zeros(model, fm, vz, rho)
    if total == 0:
        return 0, float(rho)
    rmax = max(abs(w) for (w, _) in raw)
    p = sum(m for (w, m) in raw if abs(w) >= rmax * (1 - 1e-9))
    return p, rmax


def domain_bounding_box(d, samples=256):
    """Axis-aligned bounding box of L as floats (xmin, xmax, ymin, ymax)."""
    xs, ys = [], []
    for j in range(samples):
        z = d.boundary_point(mpf(j) / samples)
        xs.append(float(mp.re(z)))
        ys.append(float(mp.im(z)))
    return min(xs), max(xs), min(ys), max(ys)


def omega_star_raster(d, cfg: AnnulusConfig, nx: int, ny: int, pad=0.15):
    """Per-pixel stratum records over a padded bounding box of D.

    Yields dicts with keys x, y, p, r, in_omega_star.  Exterior pixels are in
    Omega (hence in Omega*) and are reported with p = 0 and r = 1.  Interior
    pixels that cannot be classified (boundary-grazing contours) are reported
    with p = -1 and are not claimed for Omega*.
    """
    if nx < 2 or ny < 2:
        raise InvalidParameterError("raster needs at least 2x2 pixels")
    model = h_model(d, cfg)
    fm = _float_model(model)
    rho = cfg.rho()
    xmin, xmax, ymin, ymax = domain_bounding_box(d)
    wx, wy = xmax - xmin, ymax - ymin
    xmin, xmax = xmin - pad * wx, xmax + pad * wx
    ymin, ymax = ymin - pad * wy, ymax + pad * wy
    records = []
    for iy in range(ny):
        y = ymin + (ymax - ymin) * (iy + 0.5) / ny
        for ix in range(nx):
            x = xmin + (xmax - xmin) * (ix + 0.5) / nx
            z = mpc(mpf(x), mpf(y))
            if not point_in_domain(d, z, margin=mpf("1e-9")):
                records.append({"x": x, "y": y, "p": 0, "r": 1.0,
                                "in_omega_star": 1})
                continue
            try:
                with bits(d.prec + 32):
                    vz, _ = varphi_cont(d, z)
                p, r = _classify_float(model, fm, vz, rho)
                star = 1 if p == 1 else 0
            except (ClassificationError, ContourDegenerateError,
                    NearBoundaryInconclusiveError):
                p, r, star = -1, 1.0, 0
            records.append({"x": x, "y": y, "p": p, "r": r,
                            "in_omega_star": star})
    return records


def phi1_prime(d, z, res: ContinuationResult, cfg: AnnulusConfig):
    """Derivative of the continued interior map on the p = 1 stratum.

    Implicit differentiation of h(phi1(z)) = varphi(z):
    phi1'(z) = varphi'(z) / h'(phi1(z)).
    """
    if res.phi1 is None:
        raise NotInOmegaStarError("phi1 derivative needs a p = 1 point")
    with bits(d.prec + 32):
        _, dvz = varphi_cont(d, z)
        _, dh = h_eval_prime(d, res.phi1, cfg)
        return dvz / dh
