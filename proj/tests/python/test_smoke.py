import math

import pytest

import rieszlab as rl


def test_constants_and_gammas():
    assert rl.packing_density(2) == pytest.approx(math.pi / (2 * math.sqrt(3)), rel=1e-15)
    assert rl.gamma_r_sigma(2, 0.0, math.exp(-1.0)) == pytest.approx(-2 * math.pi, rel=1e-12)
    assert rl.gamma_sigma_tail(1, 0.25) == pytest.approx(8.0, rel=1e-12)


def test_discrete_energy_roundtrip(tmp_path):
    pts = [(0.1 + 0.2 * i, 0.1 + 0.2 * j, 0.0) for i in range(3) for j in range(3)]
    config = rl.validate_configuration(pts, 2, 0.05)
    assert len(config) == 9
    params = rl.Params(2, -1.0, 0.05)
    breakdown = rl.energy(params, config)
    assert not breakdown.forbidden
    assert breakdown.pair < 0.0
    assert breakdown.total == pytest.approx(breakdown.pair, rel=1e-15)

    path = tmp_path / "points.txt"
    rl.save_configuration(path, config)
    again = rl.load_configuration(path)
    assert again.points == config.points


def test_continuum_oracle():
    cells = [(x, 0, 0) for x in range(64)]
    interval = rl.make_pixel_set(cells, 1, 1.0 / 64.0)
    value = rl.riesz_energy(1, -0.5, rl.indicator_field(interval))
    assert value == pytest.approx(-8.0 / 3.0, abs=2e-3)


def test_experiment_registry():
    names = rl.experiment_names()
    assert "gamma-constants" in names
