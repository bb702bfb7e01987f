import mpmath as mp
import pytest
from mpmath import mpc, mpf

from bergman_lab import geometry as geo
from bergman_lab.errors import InvalidParameterError
from bergman_lab.precision import bits
from oracles import fd_derivative

TOL = mpf(2) ** (-200)


def test_spec_roundtrip():
    for spec in ("disk", "lens", "ellipse:rho=1.5", "ngon:N=4"):
        d = geo.domain_from_spec(spec)
        assert d.spec_string == spec


def test_bad_spec_rejected():
    with pytest.raises(InvalidParameterError):
        geo.domain_from_spec("pentagon-ish")


def test_disk_maps_identity(disk):
    with bits(288):
        z = mpc("0.3", "0.2")
        assert disk.phi(mpc(2)) == 2
        assert disk.varphi(z) == z
        assert disk.capacity == 1


def test_exterior_map_inverse_pair(square, ellipse, lens):
    with bits(288):
        for d in (square, ellipse, lens):
            w = mpc("1.7", "0.4")
            assert abs(d.phi(d.psi(w)) - w) < TOL


def test_exterior_map_normalization(square):
    # phi(z)/z -> phi'(infinity) = capacity at infinity
    with bits(288):
        big = mpf("1e12")
        assert abs(square.phi(big) / big - square.capacity) < mpf("1e-10")


def test_derivatives_match_fd(square, ellipse, lens):
    with bits(288):
        for d in (square, ellipse, lens):
            z = mpc("1.9", "0.3")
            fd = fd_derivative(d.phi, z)
            assert abs(d.dphi(z) - fd) < mpf(2) ** (-120)
            w = mpc("1.4", "-0.2")
            fd = fd_derivative(d.psi, w)
            assert abs(d.dpsi(w) - fd) < mpf(2) ** (-120)


def test_interior_map_normalization(square, lens):
    with bits(288):
        for d in (square, lens):
            assert abs(d.varphi(mpc(0))) < TOL
            dv = d.dvarphi(mpc(0))
            assert abs(dv.imag) < TOL and dv.real > 0


def test_boundary_on_unit_modulus(square, lens, ellipse):
    # |phi| = 1 on the boundary; arcs traverse positively
    with bits(288):
        for d in (square, lens, ellipse):
            for arc in d.arcs:
                for t in (mpf("0.2"), mpf("0.7")):
                    z = arc.point(t)
                    assert abs(abs(d.phi(z)) - 1) < mpf(2) ** (-150)


def test_arc_tangent_consistent(square, lens):
    with bits(288):
        for d in (square, lens):
            arc = d.arcs[0]
            t = mpf("0.4")
            fd = fd_derivative(arc.point, t)
            assert abs(arc.tangent(t) - fd) < mpf(2) ** (-120)


def test_corner_count():
    assert len(geo.domain_from_spec("ngon:N=4").corners) == 4
    assert len(geo.domain_from_spec("lens").corners) == 2
    assert len(geo.domain_from_spec("disk").corners) == 0


def test_square_capacity_closed_form(square):
    # logarithmic capacity of a square of side a is Gamma(1/4)^2 a/(4 pi^(3/2));
    # here a = sqrt(2) and capacity stores phi'(infinity), its reciprocal
    with bits(288):
        gamma = 2 * mp.sqrt(2) * mp.pi ** mpf("1.5") / mp.gamma(mpf("0.25")) ** 2
        assert abs(square.capacity - gamma) < mpf("1e-60")
