import mpmath as mp
import pytest
from mpmath import mpc, mpf

from bergman_lab import asymptotics as az
from bergman_lab import continuation as ct
from bergman_lab import moments as mo
from bergman_lab.errors import ScalingError
from bergman_lab.precision import bits

CFG = ct.AnnulusConfig()


def test_disk_deviation_vanishes(disk, disk_system):
    # p_n = sqrt(n+1) z^n and Phi = z exactly: A_n ~ quadrature error only
    with bits(disk.prec + 32):
        z = mpc("1.4", "0.3")
        for n in (1, 5, 16):
            rec = az.deviation(disk, disk_system, n, z, CFG)
            assert abs(rec.A_n) < mpf("1e-60")
            assert rec.regime == "exterior"


def test_deviation_regimes(disk, disk_system):
    rec = az.deviation(disk, disk_system, 4, mpc("0.35", "0.2"), CFG)
    assert rec.regime == "interior"


def test_log_path_matches_direct(disk, disk_system):
    with bits(disk.prec + 32):
        z = mpc("1.2", "0.1")
        glued = (z, mpc(1))
        a = az.deviation(disk, disk_system, 16, z, CFG, glued=glued).A_n
        saved = az.DIRECT_PATH_MAX_N
        try:
            az.DIRECT_PATH_MAX_N = 8   # force the log-magnitude branch
            b = az.deviation(disk, disk_system, 16, z, CFG, glued=glued).A_n
        finally:
            az.DIRECT_PATH_MAX_N = saved
        assert abs(a - b) < mpf("1e-60")


def test_force_direct_refused_beyond_cap(disk, disk_system):
    saved = az.DIRECT_PATH_MAX_N
    try:
        az.DIRECT_PATH_MAX_N = 8
        with pytest.raises(ScalingError):
            az.deviation(disk, disk_system, 16, mpc(2), CFG,
                         glued=(mpc(2), mpc(1)), force_direct=True)
    finally:
        az.DIRECT_PATH_MAX_N = saved


def test_nth_root_profile_disk(disk, disk_system):
    # |p_n(z)|^(1/n) = ((n+1)^(1/2) |z|^n)^(1/n) -> |z|
    with bits(disk.prec + 32):
        z = mpc("0.6", 0)
        fit = az.nth_root_profile(disk, disk_system, z, range(1, 17))
        assert fit.model == "value"
        ns, vals = zip(*fit.samples)
        assert ns == tuple(range(1, 17))
        # every sample has the closed form (n+1)^(1/2n) |z|
        for n, v in fit.samples:
            exact = mpf(n + 1) ** (mpf(1) / (2 * n)) * mpf("0.6")
            assert abs(v - exact) < mpf("1e-50")
        # the sup over the window is attained at n = 1
        assert abs(fit.sup_stat - mp.sqrt(2) * mpf("0.6")) < mpf("1e-50")


def test_poly_zeros_residuals(disk_system):
    zs = az.poly_zeros(disk_system, 12)
    assert len(zs.zeros) == 12
    assert zs.max_residual < mpf(2) ** (-150)
    with bits(288):
        # p_n for the disk is sqrt(n+1) z^n: a single zero of
        # multiplicity 12 at the origin.  A residual of eps perturbs a
        # root of multiplicity m by O(eps^(1/m)), so the computed zeros
        # scatter in a disk of radius about 2^(-150/12).
        assert max(abs(z) for z in zs.zeros) < mpf(2) ** (mpf(-140) / 12)


def test_poly_zeros_product_identity(square_system):
    # product of zeros = (-1)^n c_0 / c_n
    n = 9
    zs = az.poly_zeros(square_system, n)
    with bits(288):
        prod = mp.mpc(1)
        for z in zs.zeros:
            prod *= z
        c0 = square_system.coeffs[n][0]
        cn = square_system.coeffs[n][n]
        assert abs(prod - (-1) ** n * c0 / cn) < mpf("1e-40")


def test_spoke_segments(square):
    segs = az.spoke_segments(square)
    assert len(segs) == 4
    for a, b in segs:
        assert a == 0 and abs(abs(b) - 1) < mpf("1e-50")


def test_dist_segment():
    with bits(128):
        assert abs(az._dist_segment(mpc(0, 1), mpc(-1, 0), mpc(1, 0)) - 1) \
            < mpf("1e-30")
        assert abs(az._dist_segment(mpc(2, 0), mpc(-1, 0), mpc(1, 0)) - 1) \
            < mpf("1e-30")


def test_zero_diagnostics_rows(square_system, square):
    zs = az.poly_zeros(square_system, 6)
    rows = az.zero_diagnostics(zs, square)
    assert len(rows) == 6
    assert {"n", "zero", "dist_gamma", "dist_L", "dist_corners"} <= set(rows[0])
