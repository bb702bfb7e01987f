import mpmath as mp
import pytest
from mpmath import mpc, mpf

from bergman_lab import faber as fb
from bergman_lab import moments as mo
from bergman_lab.errors import QuadratureError
from bergman_lab.precision import bits


def _laurent(d, R=mpf("1.3"), margin=24):
    with bits(d.prec + 32):
        M = int(mp.ceil((d.prec - margin) / mp.log(R, 2)))
        return fb.psi_laurent(d, R, M)


def test_laurent_reproduces_psi(square):
    L = _laurent(square)
    with bits(square.prec + 32):
        w = mpc("1.31", "0.4")
        w = w / abs(w) * mpf("1.35")
        val = L.gamma * w + L.c[0] + sum(L.c[k] * w ** (-k)
                                         for k in range(1, L.count + 1))
        assert abs(val - square.psi(w)) < mpf(2) ** (-180)


def test_laurent_leading_is_reciprocal_capacity(square):
    L = _laurent(square)
    with bits(square.prec + 32):
        assert abs(L.gamma - 1 / square.capacity) < mpf(2) ** (-180)


def test_short_truncation_rejected(square):
    with pytest.raises(QuadratureError):
        fb.psi_laurent(square, mpf("1.3"), 64)


def test_faber_tracks_orthonormal_leading(square, square_system):
    # beta_nn = (n+1) ||G_n - (gamma^(n+1)/lambda_n) p_n||^2 is small: the
    # Faber polynomials and the orthonormal ones share their top structure
    L = _laurent(square)
    fab = fb.faber_polys(square, L, 12)
    g = mo.gram(square, 16)
    for n in (3, 8, 12):
        assert fb.beta_nn(square, square_system, fab, g, n) < mpf("0.5")


def test_disk_faber_trivial(disk, disk_system):
    L = _laurent(disk)
    fab = fb.faber_polys(disk, L, 8)
    with bits(disk.prec + 32):
        for n in range(9):
            for k in range(n):
                assert abs(fab.G[n][k]) < mpf("1e-60")
            assert abs(fab.G[n][n] - 1) < mpf("1e-60")


def test_lambda_identity_disk(disk, disk_system):
    L = _laurent(disk)
    fab = fb.faber_polys(disk, L, 8)
    g = mo.gram(disk, 8)
    for n in (0, 3, 8):
        assert fb.lambda_identity_residual(disk, disk_system, fab, g, n) \
            < mpf("1e-60")


def test_alpha_diagonal_matches_leading(ellipse):
    # alpha_{n,n} = lambda_n / gamma^(n+1)
    sysm = mo.orthonormalize(mo.gram(ellipse, 10))
    with bits(ellipse.prec + 32):
        for n in (2, 5, 9):
            a = fb.alpha(ellipse, sysm, n, n)
            want = sysm.leading[n] / ellipse.capacity ** (n + 1)
            assert abs(a - want) < mpf("1e-50")


def test_q_series_consistency(square, square_system):
    # sum_{j<=J} h(n,j) Q_{n+j}(z) approaches lambda_n gamma^-(n+1) p_n(z)
    z = mpc("0.2", "0.15")
    n = 2   # alpha needs p_k up to k = n + J + 1 <= degree_max
    with bits(square.prec + 32):
        target = (square_system.leading[n] / square.capacity ** (n + 1)
                  * mo.eval_p(square_system, n, z))
        err4 = abs(fb.series_reconstruction(square, square_system, n, z, 4)
                   - target)
        err8 = abs(fb.series_reconstruction(square, square_system, n, z, 8)
                   - target)
        assert err8 < err4 / 2
