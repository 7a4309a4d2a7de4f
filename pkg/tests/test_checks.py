import pytest

from spinshape import checks
from spinshape.config import RunConfig
from spinshape.fields import ModelParams
from spinshape.numerics import Grid

PARAMS = ModelParams(2.5, 1.0, 1.0)


def test_sabotaged_potential_shifts_spectrum():
    r = checks.check_spectrum(PARAMS, Grid.box(20.0, 2000), scheme="direct", sabotage=True)
    assert not r.passed
    assert r.details["ground_offset"] == pytest.approx(0.75 * PARAMS.beta**2, abs=5e-3)


def test_direct_scheme_passes_without_sabotage():
    assert checks.check_spectrum(PARAMS, Grid.box(20.0, 2000), scheme="direct").passed


def test_coarse_grid_fails_convergence_with_hint():
    r = checks.check_convergence(PARAMS, Grid.box(20.0, 31))
    assert not r.passed
    assert "raise grid.points" in r.message


def test_broken_case_checks():
    grid = Grid.box(20.0, 2000)
    broken = ModelParams(0.5, 2.0, 1.0)
    assert checks.check_spectrum(broken, grid).passed
    assert checks.check_zero_modes(broken, grid).passed
    assert checks.check_fourfold(broken, grid).passed


def test_near_threshold_flag():
    grid = Grid.box(30.0, 1500)
    # gamma - |beta|/2 just above level 1's edge: kappa_1 L is small
    predicted, found, near = checks.count_sample(2.0, 1.0 + 1e-3, grid)
    assert near
    predicted, found, near = checks.count_sample(2.5, 1.0, grid)
    assert not near and found == predicted == 2


def test_run_all_names():
    names = [r.name for r in checks.run_all(RunConfig(grid=RunConfig().grid.__class__(20.0, 1000)))]
    assert len(names) == 11 and len(set(names)) == 11


def test_fourfold_dense_path_agrees():
    grid = Grid.box(20.0, 600)
    split = checks.check_fourfold(PARAMS, grid)
    dense = checks.check_fourfold(PARAMS, grid, full=True)
    assert dense.passed and split.passed
    assert dense.details["multiplicities"] == [2, 4]
