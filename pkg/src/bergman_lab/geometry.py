"""Domain catalog: unit disk, ellipses, regular N-gons, circular-arc lens.

Each domain carries its boundary curve as a list of analytic arcs, corner
metadata, and evaluators for the exterior conformal pair (phi, psi) and the
interior map varphi.  Polygon maps are Schwarz-Christoffel integrals,
evaluated by a truncated Laurent/Taylor series away from the boundary and by
corner-aware radial path integrals near it; forward maps are inverted by
Newton iteration seeded from a coarse precomputed grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath as mp
from mpmath import mpf, mpc

from .errors import InvalidParameterError, MapInversionError
from .precision import DEFAULT_PRECISION_BITS, bits

_NEWTON_CAP = 60


@dataclass(frozen=True)
class AnalyticArc:
    """One analytic piece of the boundary, t in [0, 1], positively oriented."""

    point: Callable
    tangent: Callable  # d(point)/dt
    label: str = ""
    data: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CornerSpec:
    location: mpc
    interior_angle: mpf
    order_m: Optional[int]
    prevertex_angle: Optional[mpf] = None  # arg of phi(location) on |w|=1


class DomainModel:
    """Immutable bundle of boundary data and conformal map evaluators.

    ``capacity`` is gamma = phi'(infinity).  ``varphi_pole_data`` lists
    (zeta_p, r_p): the reflection of the base point across each boundary
    arc and the residue of the analytically continued varphi there (used
    to split off the leading singularities of varphi(psi(w))).
    """

    def __init__(self, *, name, spec_string, class_tag, prec_bits, capacity,
                 base_point, arcs, corners, phi, dphi, psi, dpsi,
                 varphi=None, dvarphi=None, varphi_pole_data=(),
                 prevertex_angles=(), psi_prevertex_exponent=None,
                 h_is_identity=False):
        self.name = name
        self.spec_string = spec_string
        self.class_tag = class_tag
        self.prec = prec_bits
        self.capacity = capacity
        self.base_point = base_point
        self.arcs = list(arcs)
        self.corners = list(corners)
        self._phi = phi
        self._dphi = dphi
        self._psi = psi
        self._dpsi = dpsi
        self._varphi = varphi
        self._dvarphi = dvarphi
        self.varphi_pole_data = list(varphi_pole_data)
        self.prevertex_angles = list(prevertex_angles)
        self.psi_prevertex_exponent = psi_prevertex_exponent
        self.h_is_identity = h_is_identity

    # -- exterior maps -----------------------------------------------------
    def phi(self, z):
        return self._phi(mpc(z))

    def dphi(self, z):
        return self._dphi(mpc(z))

    def psi(self, w):
        return self._psi(mpc(w))

    def dpsi(self, w):
        return self._dpsi(mpc(w))

    # -- interior map ------------------------------------------------------
    @property
    def interior_available(self):
        return self._varphi is not None

    def varphi(self, z):
        if self._varphi is None:
            raise InvalidParameterError(
                f"interior map not available for domain {self.name!r}")
        return self._varphi(mpc(z))

    def dvarphi(self, z):
        if self._dvarphi is None:
            raise InvalidParameterError(
                f"interior map derivative not available for domain {self.name!r}")
        return self._dvarphi(mpc(z))

    # -- boundary convenience ----------------------------------------------
    def boundary_point(self, t):
        """Point of L at global parameter t in [0, 1) spread across arcs."""
        t = mp.mpf(t) % 1
        n = len(self.arcs)
        s = t * n
        i = min(int(mp.floor(s)), n - 1)
        return self.arcs[i].point(s - i)

    def cache_key(self):
        return (self.spec_string, self.prec)

    def __repr__(self):
        return (f"DomainModel({self.spec_string!r}, class={self.class_tag}, "
                f"prec={self.prec})")


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _newton(f, df, target, w0, tol, cap=_NEWTON_CAP, guard=None, step_cap=None):
    """Damped Newton solve of f(w) = target starting at w0."""
    w = mpc(w0)
    for _ in range(cap):
        d = df(w)
        if d == 0:
            raise MapInversionError("zero derivative in Newton step", point=target)
        step = (f(w) - target) / d
        if step_cap is not None and abs(step) > step_cap:
            step = step * (step_cap / abs(step))
        wn = w - step
        if guard is not None:
            wn = guard(w, wn)
        if abs(wn - w) <= tol * max(mpf(1), abs(wn)):
            return wn
        w = wn
    raise MapInversionError(
        f"Newton inversion did not converge within {cap} steps", point=target)


def _laurent_limit(f, base_radius, terms):
    """Neville extrapolation of f(z) -> f(inf) using samples z = base*2^j.

    Assumes f has a convergent expansion in 1/z at infinity.
    """
    xs = []
    ys = []
    for j in range(terms):
        z = mpf(base_radius) * (mp.mpf(2) ** j)
        xs.append(1 / z)
        ys.append(mpc(f(z)))
    vals = list(ys)
    for k in range(1, terms):
        for i in range(terms - k):
            vals[i] = vals[i + 1] + (vals[i + 1] - vals[i]) * xs[i + k] / (xs[i] - xs[i + k])
    return vals[0]


def _nearest_start(grid, z):
    best = None
    best_d = None
    for zi, wi in grid:
        d = abs(z - zi)
        if best_d is None or d < best_d:
            best_d = d
            best = wi
    return best


def _segment_arc(a, b, label="edge"):
    a = mpc(a)
    b = mpc(b)
    return AnalyticArc(point=lambda t, a=a, b=b: a + (b - a) * mp.mpf(t),
                       tangent=lambda t, a=a, b=b: b - a,
                       label=label,
                       data={"kind": "segment", "a": a, "b": b})


def _circle_arc(center, radius, theta0, theta1, label="arc"):
    c = mpc(center)
    r = mpf(radius)
    t0 = mpf(theta0)
    t1 = mpf(theta1)

    def pt(t, c=c, r=r, t0=t0, t1=t1):
        th = t0 + (t1 - t0) * mp.mpf(t)
        return c + r * mp.exp(1j * th)

    def tg(t, c=c, r=r, t0=t0, t1=t1):
        th = t0 + (t1 - t0) * mp.mpf(t)
        return r * (t1 - t0) * 1j * mp.exp(1j * th)

    return AnalyticArc(point=pt, tangent=tg, label=label,
                       data={"kind": "circle", "center": c, "radius": r,
                             "theta0": t0, "theta1": t1})


# ---------------------------------------------------------------------------
# disk
# ---------------------------------------------------------------------------

def make_disk(prec_bits: int = DEFAULT_PRECISION_BITS) -> DomainModel:
    """Unit disk; every map is the identity."""
    ident = lambda z: mpc(z)
    one = lambda z: mpc(1)
    with bits(prec_bits + 32):
        arc = _circle_arc(0, 1, 0, 2 * mp.pi, label="circle")
    return DomainModel(
        name="disk", spec_string="disk", class_tag="analytic",
        prec_bits=prec_bits, capacity=mpf(1), base_point=mpc(0),
        arcs=[arc], corners=[],
        phi=ident, dphi=one, psi=ident, dpsi=one,
        varphi=ident, dvarphi=one,
        varphi_pole_data=[], prevertex_angles=[],
        psi_prevertex_exponent=None, h_is_identity=True)


# ---------------------------------------------------------------------------
# ellipse
# ---------------------------------------------------------------------------

def make_ellipse(rho, prec_bits: int = DEFAULT_PRECISION_BITS) -> DomainModel:
    """Ellipse = image of |u| = rho under u -> (u + 1/u)/2, rho > 1.

    The interior map is deliberately not provided; the ellipse is used for
    orthogonalization and exterior-asymptotics experiments only.
    """
    with bits(prec_bits + 32):
        rho = mpf(rho)
        if not rho > 1:
            raise InvalidParameterError(f"ellipse requires rho > 1, got {rho}")

        def phi(z, rho=rho):
            z = mpc(z)
            s = mp.sqrt(z * z - 1)
            if abs(z + s) < abs(z - s):
                s = -s
            return (z + s) / rho

        def dphi(z, rho=rho):
            z = mpc(z)
            s = mp.sqrt(z * z - 1)
            if abs(z + s) < abs(z - s):
                s = -s
            return (1 + z / s) / rho

        def psi(w, rho=rho):
            w = mpc(w)
            return (rho * w + 1 / (rho * w)) / 2

        def dpsi(w, rho=rho):
            w = mpc(w)
            return (rho - 1 / (rho * w * w)) / 2

        capacity = _laurent_limit(lambda z: phi(z) / z, mpf(10) ** 7, 12)
        capacity = mp.re(capacity)
        arc = AnalyticArc(
            point=lambda t, rho=rho: psi(mp.exp(2j * mp.pi * mp.mpf(t))),
            tangent=lambda t, rho=rho: (2j * mp.pi * mp.exp(2j * mp.pi * mp.mpf(t))
                                        * dpsi(mp.exp(2j * mp.pi * mp.mpf(t)))),
            label="ellipse", data={"kind": "psi-image"})
    return DomainModel(
        name="ellipse", spec_string=f"ellipse:rho={rho}", class_tag="analytic",
        prec_bits=prec_bits, capacity=capacity, base_point=mpc(0),
        arcs=[arc], corners=[],
        phi=phi, dphi=dphi, psi=psi, dpsi=dpsi,
        varphi=None, dvarphi=None, varphi_pole_data=[],
        prevertex_angles=[], psi_prevertex_exponent=None)


# ---------------------------------------------------------------------------
# regular N-gon (Schwarz-Christoffel)
# ---------------------------------------------------------------------------

_R_SERIES = mpf("1.25")    # exterior series region |w| >= _R_SERIES
_R_IN_SERIES = mpf("0.9")  # interior series region |u| <= _R_IN_SERIES


def _ext_series_coeffs(N, prec_bits):
    """Coefficients b_k of T(w) = sum b_k w^(1-Nk), psi = C*T."""
    with bits(prec_bits + 32):
        K = int(mp.ceil((prec_bits + 48) / (N * mp.log(_R_SERIES, 2)))) + 2
        two_over_N = mpf(2) / N
        out = []
        for k in range(K):
            b = mp.binomial(two_over_N, k) * (-1) ** k / (1 - N * k)
            out.append(b)
        return out


def _int_series_coeffs(N, prec_bits):
    """Coefficients d_k of F(u) = sum d_k u^(1+Nk), interior map f = c*F."""
    with bits(prec_bits + 32):
        K = int(mp.ceil((prec_bits + 48) / (N * mp.log(1 / _R_IN_SERIES, 2)))) + 2
        a = -mpf(2) / N
        out = []
        for k in range(K):
            d = mp.binomial(a, k) * (-1) ** k / (1 + N * k)
            out.append(d)
        return out


def _horner_scaled(coeffs, x, w_outer):
    """w_outer * sum coeffs[k] * x^k by Horner."""
    acc = mpc(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return w_outer * acc


def _dist_point_segment(p, a, b):
    """Euclidean distance from complex p to segment [a, b]."""
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - a)
    t = mp.re((p - a) * mp.conj(d)) / L2
    t = max(mpf(0), min(mpf(1), t))
    return abs(p - (a + t * d))


def make_regular_ngon(N: int, prec_bits: int = DEFAULT_PRECISION_BITS) -> DomainModel:
    """Regular N-gon with vertices at the N-th roots of unity, N >= 3.

    Exterior map psi'(w) = C (1 - w^-N)^(2/N); interior map
    f'(u) = c (1 - u^N)^(-2/N) with f(0) = 0, both with prevertices at the
    N-th roots of unity (forced by the N-fold symmetry).  Series expansions
    cover |w| >= 1.25 and |u| <= 0.9; radial path integrals with graded
    panels (Gauss-Jacobi at prevertex endpoints) cover the collar.
    """
    if int(N) != N or N < 3:
        raise InvalidParameterError(f"ngon requires integer N >= 3, got {N}")
    N = int(N)
    wp = prec_bits + 48
    with bits(wp):
        sigma = mpf(2) / N
        bcoef = _ext_series_coeffs(N, prec_bits)
        dcoef = _int_series_coeffs(N, prec_bits)

        # T(1) = 1 - I_N with I_N = int_0^1 (1 - (1-u^N)^(2/N)) / u^2 du.
        # On [1/2, 1] split off the (1-u)^(2/N) factor so the Gauss-Jacobi
        # panel absorbs it exactly: integrand = 1/u^2 - (1-u)^s * q(u)^s / u^2
        # with q = (1-u^N)/(1-u) analytic and positive.
        from .quadrature import PanelRule, integrate_smooth, legendre_rule
        I_left = integrate_smooth(
            lambda u: (1 - (1 - u ** N) ** sigma) / (u * u) if u > 0 else mpf(0),
            mpf(0), mpf("0.5"), 48, wp, grading_levels=30, grade_left=True)
        rule_r = PanelRule(mpf("0.5"), mpf(1), 48, 12, wp, sing_right=sigma)

        def _q_pow(u, N=N, sigma=sigma):
            q = (1 - u ** N) / (1 - u)
            return q ** sigma

        I_right = mpf(1) - rule_r.integrate(lambda u: _q_pow(u) / (u * u))
        I_N = I_left + I_right
        # T(1) = 1 + I_N, psi = C*T with psi(1) = 1, so C = 1/(1 + I_N) and
        # gamma = phi'(inf) = 1/C.
        C = 1 / (1 + I_N)
        capacity = 1 + I_N
        c_int = N / mp.beta(mpf(1) / N, 1 - sigma)  # f(u) = c * F(u), f(1) = 1

        prevzs = [mp.exp(2j * mp.pi * k / N) for k in range(N)]
        prev_angles = [2 * mp.pi * k / N for k in range(N)]

        def _psi_series(w):
            x = w ** (-N)
            return C * _horner_scaled(bcoef, x, w)

        def dpsi(w, C=C, N=N, sigma=sigma):
            w = mpc(w)
            return C * (1 - w ** (-N)) ** sigma

        def _radial_tail(wa, wb, kind):
            """Path integral of the map derivative along segment wa -> wb.

            kind 'ext': integrand C(1-t^-N)^(2/N); 'int': c(1-t^N)^(-2/N).
            Handles a prevertex exactly at wb (radially approached) by
            Gauss-Jacobi absorption; otherwise grades panels toward wb
            down to the distance of the nearest prevertex.
            """
            seg = wb - wa
            expo = sigma if kind == "ext" else -sigma
            scale = C if kind == "ext" else c_int
            dmin = min(_dist_point_segment(p, wa, wb) for p in prevzs)
            tol = mp.mpf(2) ** (-wp)
            at_prev = min(abs(wb - p) for p in prevzs) < mp.mpf(2) ** (16 - wp)
            if at_prev and dmin < tol:
                # Along a prevertex radius 1 - t^(-N) (resp. 1 - t^N) is real,
                # positive, and vanishes linearly at the endpoint, so the
                # regular part ((1 - t^(-+N))/(1-s))^expo is smooth and the
                # Gauss-Jacobi panel absorbs (1-s)^expo exactly.
                rule = PanelRule(mpf(0), mpf(1), 48, 8, wp, sing_right=expo)

                def g(s):
                    t = wa + seg * s
                    base = (1 - t ** (-N)) if kind == "ext" else (1 - t ** N)
                    return scale * (mp.re(base) / (1 - s)) ** expo

                return rule.integrate(g) * seg
            levels = int(max(8, mp.ceil(-mp.log(max(dmin, mp.mpf(2) ** (-wp)), 2)) + 8))
            levels = min(levels, wp)
            return seg * integrate_smooth(
                lambda s: scale * ((1 - (wa + seg * s) ** (-N)) ** expo
                                   if kind == "ext"
                                   else (1 - (wa + seg * s) ** N) ** expo),
                mpf(0), mpf(1), 48, wp, grading_levels=levels, grade_right=True)

        def psi(w, C=C, N=N):
            w = mpc(w)
            aw = abs(w)
            if aw >= _R_SERIES:
                return _psi_series(w)
            if aw < mpf(1) - mp.mpf(2) ** (48 - wp):
                raise InvalidParameterError("psi requires |w| >= 1")
            anchor = w / aw * _R_SERIES
            return _psi_series(anchor) + _radial_tail(anchor, w, "ext")

        def f_int(u, N=N):
            u = mpc(u)
            au = abs(u)
            if au <= _R_IN_SERIES:
                x = u ** N
                return c_int * _horner_scaled(dcoef, x, u)
            if au > mpf("1.15"):
                raise InvalidParameterError("interior map evaluated too far outside")
            anchor = u / au * _R_IN_SERIES
            x = anchor ** N
            base = c_int * _horner_scaled(dcoef, x, anchor)
            return base + _radial_tail(anchor, u, "int")

        def df_int(u, N=N, sigma=sigma):
            u = mpc(u)
            return c_int * (1 - u ** N) ** (-sigma)

        # coarse inversion grids
        tol = mp.mpf(2) ** (12 - prec_bits)
        ext_grid = []
        for r in (mpf("1.02"), mpf("1.1"), mpf("1.3"), mpf(2), mpf(4), mpf(10)):
            for k in range(4 * N):
                wg = r * mp.exp(1j * mp.pi * (2 * k + 1) / (4 * N))
                ext_grid.append((psi(wg), wg))
        int_grid = [(mpc(0), mpc(0))]
        for r in (mpf("0.3"), mpf("0.6"), mpf("0.8"), mpf("0.9")):
            for k in range(4 * N):
                ug = r * mp.exp(2j * mp.pi * k / (4 * N))
                int_grid.append((f_int(ug), ug))

        def _guard_ext(w_old, w_new):
            if abs(w_new) < 1:
                w_new = w_new / abs(w_new) * (2 - abs(w_new))
            return w_new

        def _guard_int(u_old, u_new):
            if abs(u_new) > mpf("1.12"):
                u_new = u_new / abs(u_new) * mpf("1.12")
            return u_new

        def phi(z):
            z = mpc(z)
            if abs(z) > 4:
                w0 = z / capacity
            else:
                w0 = _nearest_start(ext_grid, z)
            return _newton(psi, dpsi, z, w0, tol, guard=_guard_ext,
                           step_cap=mpf("0.5") * max(mpf(1), abs(w0)))

        def dphi(z):
            return 1 / dpsi(phi(z))

        # Boundary correspondence in closed form: along the edge from the
        # vertex at u = 1, arclength(theta) = k_beta * B(sin^2(N theta / 2);
        # 1/2 - 1/N, 1/2) via the substitution s = sin^2(N t / 2) in
        # integral of |f'(e^{it})| = c (2 sin(N t / 2))^(-2/N).
        a_beta = mpf(1) / 2 - mpf(1) / N
        k_beta = c_int * mpf(4) ** (-mpf(1) / N) / N
        omega_rot = mp.exp(2j * mp.pi / N)
        half_edge = mp.sin(mp.pi / N)
        edge_dir = (omega_rot - 1) / abs(omega_rot - 1)
        edge_normal = mp.exp(1j * mp.pi / N)
        edge_dist = mp.cos(mp.pi / N)

        def _edge_theta(ell):
            """theta in [0, pi/N] with edge arclength(theta) = ell."""
            if ell <= mp.mpf(2) ** (32 - wp):
                return mpf(0)
            hi = mp.pi / N
            L_half = k_beta * mp.beta(a_beta, mpf(1) / 2)
            if ell >= L_half:
                return hi
            if ell > mpf("0.8") * L_half:
                # near the midpoint the substitution s = sin^2(N theta/2)
                # flattens quadratically, costing half the precision; solve
                # for the deficit from pi/N with a plain Legendre quadrature
                # of the (there smooth) arclength density instead.
                return _edge_theta_mid(L_half - ell)
            lo = mpf(0)
            # seed from the corner power law ell ~ c (N t/2)^(-2/N) t/(1-2/N)
            th = ((1 - sigma) * ell * (N / 2) ** sigma / c_int) ** (1 / (1 - sigma))
            th = min(max(th, mp.mpf(2) ** (-wp)), hi * (1 - mp.mpf(2) ** (-wp)))
            tol_t = mp.mpf(2) ** (32 - wp)
            for _ in range(wp):
                s2 = mp.sin(N * th / 2) ** 2
                val = k_beta * mp.betainc(a_beta, mpf(1) / 2, 0, s2) - ell
                if val > 0:
                    hi = th
                else:
                    lo = th
                nt = th - val / (c_int * (2 * mp.sin(N * th / 2)) ** (-sigma))
                if not (lo < nt < hi):
                    nt = (lo + hi) / 2
                done = abs(nt - th) < tol_t * max(mpf(1), abs(th))
                th = nt
                if done:
                    return th
            raise MapInversionError(
                "boundary correspondence solve did not converge", point=ell)

        _gl_nodes, _gl_weights = legendre_rule(192, wp)

        def _arc_deficit(th):
            """integral of c (2 sin(N t/2))^(-2/N) over [th, pi/N]."""
            a2, b2 = th, mp.pi / N
            mid, hw = (a2 + b2) / 2, (b2 - a2) / 2
            tot = mpf(0)
            for x, wgt in zip(_gl_nodes, _gl_weights):
                t = mid + hw * x
                tot += wgt * (2 * mp.sin(N * t / 2)) ** (-sigma)
            return c_int * hw * tot

        def _edge_theta_mid(deficit):
            """theta with arclength(pi/N) - arclength(theta) = deficit."""
            hi = mp.pi / N
            lo = hi / 2
            dens_mid = c_int * mpf(2) ** (-sigma)
            th = hi - deficit / dens_mid
            th = min(max(th, lo * (1 + mp.mpf(2) ** (-wp))), hi)
            tol_t = mp.mpf(2) ** (32 - wp)
            for _ in range(wp):
                val = _arc_deficit(th) - deficit
                if val > 0:
                    lo = th
                else:
                    hi = th
                nt = th + val / (c_int * (2 * mp.sin(N * th / 2)) ** (-sigma))
                if not (lo < nt < hi):
                    nt = (lo + hi) / 2
                done = abs(nt - th) < tol_t
                th = nt
                if done:
                    return th
            raise MapInversionError(
                "boundary correspondence solve did not converge",
                point=deficit)

        def varphi(z):
            z = mpc(z)
            if z == 0:
                return mpc(0)
            with bits(wp):
                ang = mp.arg(z)
                if ang < 0:
                    ang += 2 * mp.pi
                k = min(int(mp.floor(ang * N / (2 * mp.pi))), N - 1)
                rot = omega_rot ** k
                zr = z / rot
                side = edge_dist - mp.re(zr * mp.conj(edge_normal))
                if abs(side) < mp.mpf(2) ** (64 - wp):
                    ell = mp.re((zr - 1) * mp.conj(edge_dir))
                    if ell < half_edge:
                        th = _edge_theta(ell)
                    else:
                        th = 2 * mp.pi / N - _edge_theta(2 * half_edge - ell)
                    return rot * mp.exp(1j * th)
            u0 = _nearest_start(int_grid, z)
            return _newton(f_int, df_int, z, u0, tol, guard=_guard_int,
                           step_cap=mpf("0.25"))

        def dvarphi(z):
            return 1 / df_int(varphi(z))

        verts = [mp.exp(2j * mp.pi * k / N) for k in range(N)]
        arcs = [_segment_arc(verts[k], verts[(k + 1) % N], label=f"edge{k}")
                for k in range(N)]
        interior_angle = mp.pi * (N - 2) / N
        order_m = {3: 3, 4: 2}.get(N)
        corners = [CornerSpec(location=verts[k], interior_angle=interior_angle,
                              order_m=order_m, prevertex_angle=prev_angles[k])
                   for k in range(N)]
        # reflections of the base point (0) across each edge, and residues of
        # the continued interior map there: r_p = 1 / (varphi'(0) * conj(B))
        dvarphi0 = 1 / c_int  # f'(0) = c, so varphi'(0) = 1/c
        pole_data = []
        for k in range(N):
            a, b = verts[k], verts[(k + 1) % N]
            B = (b - a) ** 2 / abs(b - a) ** 2
            zeta = a - B * mp.conj(a)
            r_p = 1 / (dvarphi0 * mp.conj(B))
            pole_data.append((zeta, r_p))

    return DomainModel(
        name=f"ngon{N}", spec_string=f"ngon:N={N}",
        class_tag="corner" if N in (3, 4) else "singular",
        prec_bits=prec_bits, capacity=capacity, base_point=mpc(0),
        arcs=arcs, corners=corners,
        phi=phi, dphi=dphi, psi=psi, dpsi=dpsi,
        varphi=varphi, dvarphi=dvarphi, varphi_pole_data=pole_data,
        prevertex_angles=prev_angles, psi_prevertex_exponent=sigma)


# ---------------------------------------------------------------------------
# lens
# ---------------------------------------------------------------------------

def make_lens(prec_bits: int = DEFAULT_PRECISION_BITS) -> DomainModel:
    """Lens bounded by two circular arcs through +-i with interior angles pi/2.

    The right arc lies on the circle |z + 1| = sqrt(2), the left arc on
    |z - 1| = sqrt(2).  Interior map: z -> w = (z-i)/(z+i), then w^2, then a
    Moebius onto the disk (all rational, so varphi continues globally).
    Exterior map: the same Moebius, a 2/3 power with a cut through the lens,
    and a Moebius onto the exterior of the disk.
    """
    with bits(prec_bits + 32):
        i_ = mpc(0, 1)

        def varphi(z, i_=i_):
            z = mpc(z)
            if z == -i_:       # corner; Moebius pole, limit is -i
                return -i_
            w = (z - i_) / (z + i_)
            W = w * w
            return -i_ * (W - 1) / (W + 1)

        def dvarphi(z, i_=i_):
            z = mpc(z)
            w = (z - i_) / (z + i_)
            W = w * w
            return -i_ * (4 * w / (W + 1) ** 2) * (2 * i_ / (z + i_) ** 2)

        def _v_of(z, i_=i_):
            return -(z - i_) / (z + i_)

        branch_tol = mp.mpf(2) ** (-(prec_bits + 32) // 2)

        def _pow23(v):
            # v^(2/3) with branch arg v in [pi/4, 7pi/4]; the tolerance keeps
            # on-arc points (arg v = pi/4 up to rounding) on the right sheet
            if v == 0:
                return mpc(0)
            a = mp.arg(v)
            if a < mp.pi / 4 - branch_tol:
                a += 2 * mp.pi
            return abs(v) ** (mpf(2) / 3) * mp.exp(2j * a / 3)

        def _phi_unnorm(z, i_=i_):
            z = mpc(z)
            if z == -i_:
                return mpc(1)  # limit through t -> infinity
            v = _v_of(z)
            s = _pow23(v)
            t = mp.exp(-1j * mp.pi / 6) * s
            return (t + i_) / (t - i_)

        A = _laurent_limit(lambda z: _phi_unnorm(z) / z, mpf(10) ** 6, 12)
        sigma_e = mp.conj(A) / abs(A)
        capacity = abs(A)

        def phi(z, sigma_e=sigma_e):
            return sigma_e * _phi_unnorm(z)

        def dphi(z, sigma_e=sigma_e, i_=i_):
            z = mpc(z)
            v = _v_of(z)
            s = _pow23(v)
            t = mp.exp(-1j * mp.pi / 6) * s
            dv = -2j / (z + i_) ** 2
            ds = (mpf(2) / 3) * s / v * dv
            dt = mp.exp(-1j * mp.pi / 6) * ds
            return sigma_e * (-2j / (t - i_) ** 2) * dt

        def _sqrt_s(s):
            # s^(1/2) with branch arg s in [pi/6, 7pi/6]
            if s == 0:
                return mpc(0)
            b = mp.arg(s)
            if b <= -mp.pi * 5 / 6 + branch_tol:
                b += 2 * mp.pi
            return mp.sqrt(abs(s)) * mp.exp(1j * b / 2)

        def psi(w, sigma_e=sigma_e, i_=i_):
            w = mpc(w)
            W = w / sigma_e
            t = i_ * (W + 1) / (W - 1)
            s = mp.exp(1j * mp.pi / 6) * t
            r = _sqrt_s(s)
            v = s * r  # s^(3/2) on the chosen branch
            return i_ * (1 - v) / (1 + v)

        def dpsi(w, sigma_e=sigma_e, i_=i_):
            w = mpc(w)
            W = w / sigma_e
            t = i_ * (W + 1) / (W - 1)
            s = mp.exp(1j * mp.pi / 6) * t
            r = _sqrt_s(s)
            v = s * r
            dz_dv = -2j / (1 + v) ** 2
            dv_ds = mpf(3) / 2 * r
            ds_dt = mp.exp(1j * mp.pi / 6)
            dt_dW = -2j / (W - 1) ** 2
            return dz_dv * dv_ds * ds_dt * dt_dW / sigma_e

        sq2 = mp.sqrt(2)
        arcs = [_circle_arc(-1, sq2, -mp.pi / 4, mp.pi / 4, label="right"),
                _circle_arc(1, sq2, 3 * mp.pi / 4, 5 * mp.pi / 4, label="left")]
        prev_hi = mp.arg(phi(i_))    # prevertex of corner +i
        prev_lo = mp.arg(phi(-i_))
        corners = [CornerSpec(location=i_, interior_angle=mp.pi / 2, order_m=2,
                              prevertex_angle=prev_hi),
                   CornerSpec(location=-i_, interior_angle=mp.pi / 2, order_m=2,
                              prevertex_angle=prev_lo)]
        # reflections of 0 across the two arc circles: c + R^2/conj(0 - c)
        dvarphi0 = dvarphi(mpc(0))   # = 2
        pole_data = []
        for cen in (mpc(-1), mpc(1)):
            zeta = cen + 2 / mp.conj(-cen)
            wpd = -2 / (zeta - cen) ** 2   # derivative of conj-reflection
            r_p = 1 / (dvarphi0 * wpd)
            pole_data.append((zeta, r_p))

    return DomainModel(
        name="lens", spec_string="lens", class_tag="corner",
        prec_bits=prec_bits, capacity=capacity, base_point=mpc(0),
        arcs=arcs, corners=corners,
        phi=phi, dphi=dphi, psi=psi, dpsi=dpsi,
        varphi=varphi, dvarphi=dvarphi, varphi_pole_data=pole_data,
        prevertex_angles=[prev_hi, prev_lo], psi_prevertex_exponent=mpf(1) / 2)


# ---------------------------------------------------------------------------
# spec-string front door
# ---------------------------------------------------------------------------

def domain_from_spec(spec: str, prec_bits: int = DEFAULT_PRECISION_BITS) -> DomainModel:
    """Build a catalog domain from a config string.

    Accepted forms: "disk", "ellipse:rho=<real>", "ngon:N=<int>", "lens".
    """
    spec = spec.strip()
    if spec == "disk":
        return make_disk(prec_bits)
    if spec == "lens":
        return make_lens(prec_bits)
    if spec.startswith("ellipse:"):
        body = spec[len("ellipse:"):]
        key, _, val = body.partition("=")
        if key.strip() != "rho" or not val:
            raise InvalidParameterError(f"bad ellipse spec {spec!r}")
        return make_ellipse(mpf(val), prec_bits)
    if spec.startswith("ngon:"):
        body = spec[len("ngon:"):]
        key, _, val = body.partition("=")
        if key.strip() != "N" or not val:
            raise InvalidParameterError(f"bad ngon spec {spec!r}")
        try:
            n = int(val)
        except ValueError:
            raise InvalidParameterError(f"bad ngon spec {spec!r}")
        return make_regular_ngon(n, prec_bits)
    raise InvalidParameterError(f"unknown domain spec {spec!r}")
