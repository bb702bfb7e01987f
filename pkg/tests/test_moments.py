import json

import mpmath as mp
import pytest
from mpmath import mpc, mpf

from bergman_lab import moments as mo
from bergman_lab.errors import InvalidParameterError
from bergman_lab.precision import bits
from oracles import tensor_moment


def test_disk_moments_closed_form(disk):
    g = mo.gram(disk, 10)
    with bits(288):
        for j in range(11):
            for k in range(11):
                want = mpf(1) / (j + 1) if j == k else mpf(0)
                assert abs(g[j, k] - want) < mpf("1e-70")


def test_moments_match_tensor_oracle(ellipse):
    g = mo.gram(ellipse, 4)
    with bits(288):
        for j in range(5):
            for k in range(5):
                gap = abs(g[j, k] - tensor_moment("ellipse:rho=1.5", j, k))
                assert gap < mpf("1e-40")


def test_boundary_moment_agrees_with_gram(square):
    g = mo.gram(square, 6)
    with bits(288):
        for (j, k) in ((0, 0), (3, 3), (5, 1)):
            assert abs(g[j, k] - mo.boundary_moment(square, j, k)) < mpf("1e-70")


def test_gram_hermitian(square):
    g = mo.gram(square, 8)
    with bits(288):
        for j in range(9):
            for k in range(9):
                assert abs(g[j, k] - mp.conj(g[k, j])) == 0


def test_symmetry_annihilates_offstride(square):
    # fourfold symmetry: <z^j, z^k> = 0 unless j = k (mod 4)
    g = mo.gram(square, 8)
    with bits(288):
        for j in range(9):
            for k in range(9):
                if (j - k) % 4:
                    assert abs(g[j, k]) < mpf("1e-70")


def test_orthonormality_residual(square_system, square):
    g = mo.gram(square, 16)
    assert mo.orthonormality_residual(square_system, g) < mpf("1e-60")


def test_leading_positive_and_monotone_growth(square_system):
    lead = square_system.leading
    assert all(l > 0 for l in lead)


def test_disk_system_closed_form(disk_system):
    with bits(288):
        for n in range(17):
            assert abs(disk_system.leading[n] - mp.sqrt(n + 1)) < mpf("1e-70")
            for k in range(n):
                assert abs(disk_system.coeffs[n][k]) < mpf("1e-70")


def test_eval_p_matches_coeffs(square_system):
    with bits(288):
        z = mpc("0.3", "0.2")
        n = 7
        direct = sum(square_system.coeffs[n][k] * z ** k for k in range(n + 1))
        assert abs(mo.eval_p(square_system, n, z) - direct) < mpf("1e-70")


def test_eval_p_prime_fd(square_system):
    from oracles import fd_derivative
    with bits(288):
        z = mpc("0.25", "-0.1")
        fd = fd_derivative(lambda u: mo.eval_p(square_system, 9, u), z)
        assert abs(mo.eval_p_prime(square_system, 9, z) - fd) < mpf(2) ** (-120)


def test_system_json_roundtrip(square_system):
    text = square_system.to_json()
    back = mo.OrthonormalSystem.from_json(text)
    assert back.degree_max == square_system.degree_max
    with bits(288):
        for n in range(back.degree_max + 1):
            for k in range(n + 1):
                assert (abs(back.coeffs[n][k] - square_system.coeffs[n][k])
                        < mpf(2) ** (-200))
    # and the serialization is valid JSON with string-encoded numbers
    doc = json.loads(text)
    assert isinstance(doc, dict)


def test_eval_out_of_range(disk_system):
    with pytest.raises(InvalidParameterError):
        mo.eval_p(disk_system, 17, mpc(0))
