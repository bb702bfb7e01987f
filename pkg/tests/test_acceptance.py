"""The twelve primary acceptance criteria, one pass/fail line each."""

import pytest

from bergman_lab import acceptance as ac


def _check(cid):
    r = ac.CRITERIA[cid]()
    print(f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.cid}: "
          f"{r.name} — {r.detail}")
    assert r.passed, f"criterion {r.cid}: {r.detail}"


def test_criterion_01_disk_closed_forms():
    _check(1)


def test_criterion_02_moment_oracle():
    _check(2)


def test_criterion_03_lambda_identity():
    _check(3)


def test_criterion_04_alpha_triangularity():
    _check(4)


def test_criterion_05_series_convergence():
    _check(5)


def test_criterion_06_zero_loci():
    _check(6)


def test_criterion_07_pentagon_dichotomy():
    _check(7)


def test_criterion_08_exterior_rate():
    _check(8)


def test_criterion_09_unified_edge_asymptotics():
    _check(9)


def test_criterion_10_nth_root_vs_r():
    _check(10)


def test_criterion_11_residue_formula():
    _check(11)


def test_criterion_12_determinism():
    _check(12)
