import mpmath as mp
import pytest
from mpmath import mpc, mpf

from bergman_lab import continuation as ct
from bergman_lab.errors import NotInOmegaStarError
from bergman_lab.precision import bits
from oracles import fd_derivative

CFG = ct.AnnulusConfig()


def test_varphi_cont_matches_interior(lens):
    with bits(lens.prec + 32):
        z = mpc("0.1", "0.2")
        v, dv = ct.varphi_cont(lens, z)
        assert abs(v - lens.varphi(z)) < mpf(2) ** (-200)
        fd = fd_derivative(lambda u: ct.varphi_cont(lens, u)[0], z)
        assert abs(dv - fd) < mpf(2) ** (-120)


def test_h_model_matches_direct_on_circle(lens):
    model = ct.h_model(lens, CFG)
    with bits(lens.prec + 32):
        for t in ("0.13", "0.41", "0.77"):
            w = mp.exp(2j * mp.pi * mpf(t))
            direct, _ = ct.h_eval_prime(lens, w, CFG)
            assert abs(model.eval(w) - direct) < mpf("1e-60")


def test_h_model_reflection_symmetry(lens):
    # h(1/conj(w)) = 1/conj(h(w))
    with bits(lens.prec + 32):
        w = mpf("0.8") * mp.exp(2j * mp.pi * mpf("0.23"))
        hv, _ = ct.h_eval_prime(lens, w, CFG)
        hr, _ = ct.h_eval_prime(lens, 1 / mp.conj(w), CFG)
        assert abs(hr - 1 / mp.conj(hv)) < mpf("1e-40")


def test_disk_classification_identity(disk):
    with bits(disk.prec + 32):
        z = mpc("0.35", "0.2")
        res = ct.classify_point(disk, z, CFG)
        assert res.p == 1
        assert res.in_omega_star
        assert abs(res.r - abs(z)) < mpf("1e-30")
        assert abs(res.phi1 - z) < mpf("1e-30")


def test_deep_interior_unreachable(disk):
    # below the annulus floor the continuation reports p = 0
    res = ct.classify_point(disk, mpc("0.1", "0.05"), CFG)
    assert res.p == 0 and not res.in_omega_star


def test_lens_segment_is_exceptional(lens):
    # on the imaginary segment between the corners two roots tie: p = 2
    res = ct.classify_point(lens, mpc(0, "0.4"), CFG)
    assert res.p == 2 and not res.in_omega_star
    res = ct.classify_point(lens, mpc("0.2", 0), CFG)
    assert res.p == 1 and res.in_omega_star


def test_annulus_zero_count(disk):
    with bits(disk.prec + 32):
        # h(w) - z = w - z has one zero in any ring containing |z|
        assert ct.annulus_zero_count(disk, mpc("0.5", 0), mpf("0.4"),
                                     mpf("0.9"), CFG) == 1
        assert ct.annulus_zero_count(disk, mpc("0.5", 0), mpf("0.6"),
                                     mpf("0.9"), CFG) == 0


def test_point_in_domain(disk, lens, ellipse, square):
    assert ct.point_in_domain(disk, mpc("0.9", 0))
    assert not ct.point_in_domain(disk, mpc("1.1", 0))
    assert ct.point_in_domain(square, mpc("0.4", "0.4"))
    assert not ct.point_in_domain(square, mpc("0.6", "0.6"))
    assert ct.point_in_domain(lens, mpc(0, "0.9"))
    assert not ct.point_in_domain(lens, mpc("0.5", 0))
    # ellipse semi-axes: a = (rho + 1/rho)/2, b = (rho - 1/rho)/2
    assert ct.point_in_domain(ellipse, mpc("1.05", 0))
    assert not ct.point_in_domain(ellipse, mpc(0, "0.45"))


def test_phi_eval_glues(disk, lens):
    with bits(disk.prec + 32):
        # exterior: the exterior map; interior p = 1: the continued map
        assert abs(ct.Phi_eval(disk, mpc(2, 1), CFG) - mpc(2, 1)) == 0
        # interior p = 1: Phi is the annulus root phi_1, i.e. h(Phi) = varphi
        z = mpc("0.2", 0)
        v = ct.Phi_eval(lens, z, CFG)
        hv, _ = ct.h_eval_prime(lens, v, CFG)
        assert abs(hv - ct.varphi_cont(lens, z)[0]) < mpf("1e-40")
        assert abs(v) < 1
        with pytest.raises(NotInOmegaStarError):
            ct.Phi_eval(lens, mpc(0, "0.4"), CFG)


def test_phi1_prime_implicit(lens):
    with bits(lens.prec + 32):
        z = mpc("0.25", "0.1")
        res = ct.classify_point(lens, z, CFG)
        dv = ct.phi1_prime(lens, z, res, CFG)
        fd = fd_derivative(
            lambda u: ct.classify_point(lens, u, CFG).phi1, z,
            prec_bits=160)
        assert abs(dv - fd) < mpf(2) ** (-60)


def test_raster_shapes(disk):
    recs = ct.omega_star_raster(disk, CFG, 8, 8)
    assert len(recs) == 64
    assert {"x", "y", "p", "r", "in_omega_star"} <= set(recs[0])
