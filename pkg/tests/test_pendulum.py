import math

import numpy as np
import pytest
from conftest import basin_image

from basin_checks import ZOOM_WINDOW, energy_violations, rotation_agreement, wada_fraction
from chaosqm.pendulum import (
    DEFAULT_MAGNETS,
    UNRESOLVED,
    IntegrationError,
    PendulumParams,
    cell_centers,
    compute_basins,
    energy,
    integrate_trajectory,
    trajectory,
)


def rotate(p, turns=1):
    a = 2 * math.pi / 3 * turns
    return (math.cos(a) * p[0] - math.sin(a) * p[1], math.sin(a) * p[0] + math.cos(a) * p[1])


def test_default_magnets_on_unit_circle():
    for i, (x, y) in enumerate(DEFAULT_MAGNETS):
        assert math.hypot(x, y) == pytest.approx(1.0, abs=1e-15)
        assert math.degrees(math.atan2(y, x)) % 360 == pytest.approx(90 + 120 * i)


@pytest.mark.parametrize("i", [0, 1, 2])
def test_release_over_magnet(default_params, i):
    idx, steps = integrate_trajectory(default_params, DEFAULT_MAGNETS[i])
    assert idx == i + 1
    assert steps >= 100


def test_centre_is_unresolved():
    params = PendulumParams(max_steps=5000)
    assert integrate_trajectory(params, (0.0, 0.0)) == (UNRESOLVED, 5000)


@pytest.mark.parametrize("x0", [(0.3, 0.4), (1.2, -0.7), (-1.5, 1.9), (0.05, -1.1)])
def test_rotated_release_permutes_index(default_params, x0):
    base, _ = integrate_trajectory(default_params, x0)
    assert base != UNRESOLVED
    for turns in (1, 2):
        got, _ = integrate_trajectory(default_params, rotate(x0, turns))
        assert got == (base - 1 + turns) % 3 + 1


def test_capture_is_stable(default_params):
    rng = np.random.default_rng(3)
    mags = np.array(default_params.magnets)
    for x0 in rng.uniform(-2, 2, size=(100, 2)):
        idx, steps = integrate_trajectory(default_params, x0)
        if idx == UNRESOLVED:
            continue
        path = trajectory(default_params, x0, (0, 0), steps + 1000)
        tail = path[steps:, :2]
        dist = np.hypot(tail[:, 0:1] - mags[:, 0], tail[:, 1:2] - mags[:, 1])
        assert np.all(np.argmin(dist, axis=1) == idx - 1)
        assert dist[-1, idx - 1] < default_params.capture_radius


def test_energy_nonincreasing():
    assert energy_violations(n_trajectories=30) <= 1e-6


def test_energy_of_rest_state_at_magnet():
    p = PendulumParams()
    e = energy(p, np.array([0.0, 1.0, 0.0, 0.0]))
    expect = 0.5 * p.restoring - 1 / p.height - 2 / math.sqrt(3 + p.height ** 2)
    assert e == pytest.approx(expect, rel=1e-14)


def test_blowup_raises_integration_error():
    with pytest.raises(IntegrationError) as info:
        integrate_trajectory(PendulumParams(step=50.0, restoring=40.0), (1.9, 1.9))
    assert info.value.step >= 1


@pytest.mark.parametrize("bad", [
    dict(magnets=((0, 1), (0, 1), (1, 0))),
    dict(magnets=((0, 1), (1, 0))),
    dict(damping=-0.1),
    dict(height=0.0),
    dict(step=math.nan),
    dict(max_steps=0),
])
def test_params_validation(bad):
    with pytest.raises(ValueError):
        PendulumParams(**bad)


def test_cell_geometry():
    xs, ys = cell_centers(4, 2, (0.0, 4.0, 0.0, 2.0))
    assert xs.tolist() == [0.5, 1.5, 2.5, 3.5]
    assert ys.tolist() == [1.5, 0.5]  # top row first


def test_basins_shape_and_magnet_cells():
    img = basin_image(60, 60)
    assert img.cells.shape == (60, 60) and img.width == img.height == 60
    for i, (x, y) in enumerate(DEFAULT_MAGNETS):
        assert img.cells[img.cell_of(x, y)] == i + 1
    assert set(np.unique(img.cells)) <= {0, 1, 2, 3}


def test_basins_validation(default_params):
    with pytest.raises(ValueError):
        compute_basins(default_params, 1, 10)
    with pytest.raises(ValueError):
        compute_basins(default_params, 10, 10, (1.0, 1.0, 0.0, 1.0))


@pytest.mark.parametrize("workers", [4, 8])
def test_basins_independent_of_workers(workers):
    ref = basin_image(60, 60)
    img = basin_image(60, 60, workers=workers)
    assert img.cells.tobytes() == ref.cells.tobytes()
    assert img.steps.tobytes() == ref.steps.tobytes()


def test_rotation_consistency_300():
    frac, n = rotation_agreement(basin_image(300, 300))
    assert n > 1000
    assert frac >= 0.99


@pytest.mark.slow
def test_boundary_cells_see_all_three_basins():
    img = compute_basins(PendulumParams(), 600, 600, ZOOM_WINDOW)
    assert len(set(np.unique(img.cells).tolist()) - {0}) == 3
    frac, n = wada_fraction(img.cells)
    assert n > 100
    assert frac >= 0.30
