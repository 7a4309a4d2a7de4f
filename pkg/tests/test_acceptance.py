"""The eleven acceptance criteria at their stated tolerances.

Each test prints its verdict line immediately and again in the
"acceptance criteria" section of the terminal summary.
"""
import time

import pytest

from spinshape import checks
from spinshape.analytic import bound_state_count
from spinshape.fields import ModelParams
from spinshape.numerics import Grid

PARAMS = ModelParams(2.5, 1.0, 1.0)
GRID = Grid.box(20.0, 2000)
BROKEN = ModelParams(0.5, 2.0, 1.0)


@pytest.fixture
def record(acceptance_log, capsys):
    def _record(number, result):
        acceptance_log.append((number, result))
        with capsys.disabled():
            print(f"\ncriterion {number:2d}: {result.line()}")
        return result

    return _record


def test_criterion_01_closed_form_spectrum(record):
    start = time.perf_counter()
    spectrum = checks.check_spectrum(PARAMS, GRID)
    conv = checks.check_convergence(PARAMS, GRID)
    elapsed = time.perf_counter() - start
    ok = spectrum.passed and conv.passed and elapsed < 60
    result = checks.CheckResult(
        "closed_form_spectrum", ok, spectrum.value, spectrum.limit, f"{spectrum.message}; {conv.message}; {elapsed:.1f} s"
    )
    record(1, result)
    assert spectrum.passed, spectrum.message
    assert conv.passed, conv.message
    assert elapsed < 60


def test_criterion_02_twofold_degeneracy(record):
    r = record(2, checks.check_degeneracy(PARAMS, GRID))
    assert r.passed, r.line()


def test_criterion_03_isospectrality(record):
    r = record(3, checks.check_isospectrality(PARAMS, GRID))
    assert r.passed, r.line()


def test_criterion_04_fourfold_degeneracy(record):
    r = record(4, checks.check_fourfold(PARAMS, GRID))
    assert r.passed, r.line()


def test_criterion_05_shape_invariance(record):
    r = record(5, checks.check_shape_invariance(PARAMS, GRID))
    assert r.passed, r.line()


def test_criterion_06_symmetry_algebra(record):
    r = record(6, checks.check_algebra(PARAMS, GRID))
    assert r.passed, r.line()
    assert r.details["shifted_TA"] >= 1e-2 and r.details["rotated_RA"] >= 1e-2


def test_criterion_07_zero_modes(record):
    admissible = checks.check_zero_modes(PARAMS, GRID)
    broken = checks.check_zero_modes(BROKEN, GRID)
    ok = admissible.passed and broken.passed and bound_state_count(BROKEN.gamma, BROKEN.beta) == 0
    r = record(7, checks.CheckResult("zero_modes", ok, admissible.value, admissible.limit,
                                     f"{admissible.message}; {broken.message}"))
    assert r.passed, r.line()


def test_criterion_08_ladder(record):
    r = record(8, checks.check_ladder(PARAMS, GRID, spacing=0.01))
    assert r.passed, r.line()


def test_criterion_09_case1_oracle(record):
    r = record(9, checks.check_case1(PARAMS))
    assert r.passed, r.line()


def test_criterion_10_hypergeometric(record):
    r = record(10, checks.check_hypergeometric(PARAMS))
    assert r.passed, r.line()


def test_criterion_11_level_count(record):
    r = record(11, checks.check_level_count(samples=500, seed=0, half_width=30.0, points=1500))
    assert r.passed, r.line()
