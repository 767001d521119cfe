"""Smoke tests for the python bindings: wiring and a few reference values."""

import math

import numpy as np
import pytest

import chemolab as cl


@pytest.fixture(scope="module")
def grid():
    return cl.build_grid(r_max=12.0, cells=1024, dim=3)


def gaussian(grid, amp=1.0):
    r = grid.nodes
    return amp * np.exp(-r * r)


def test_grid_and_quadrature(grid):
    assert len(grid) == 1025
    assert grid.dim == 3
    assert grid.nodes[0] == 0.0
    assert grid.nodes[-1] == pytest.approx(12.0)
    mass = cl.integrate_radial(gaussian(grid), grid)
    assert mass == pytest.approx(math.pi ** 1.5, rel=1e-4)
    assert cl.unit_sphere_area(3) == pytest.approx(4.0 * math.pi)
    assert cl.lp_norm(gaussian(grid), math.inf, grid) == pytest.approx(1.0)


def test_operators(grid):
    r = grid.nodes
    lap = cl.radial_laplacian(r * r, grid)
    assert np.allclose(lap, 6.0, atol=1e-8)
    div = cl.chemotaxis_divergence(np.ones_like(r), gaussian(grid), grid)
    assert cl.integrate_radial(div, grid) == pytest.approx(0.0, abs=1e-11)


def test_energy_identity(grid):
    u = gaussian(grid, 0.8)
    v = gaussian(grid, 0.5)
    w = gaussian(grid, 0.3)
    rep = cl.energy(grid, u, v, w)
    assert rep.F == rep.dirichlet + rep.l2w - rep.coupling + rep.entropy_u + rep.entropy_v
    assert rep.D >= 0.0


def test_simulate_reaches_t(grid):
    u = gaussian(grid, 0.05)
    control = cl.StepControl()
    control.dt_max = 1e-3
    out = cl.simulate(grid, u, u, 0.5 * u, t_end=0.05, control=control)
    assert out["termination"] == "ReachedT"
    m = out["series"]["mass_u"]
    assert m[-1] == pytest.approx(m[0], rel=1e-10)


def test_gronwall():
    assert cl.gronwall_bound(1.0, 1.0, 2.0) == 1.0
    assert cl.gronwall_ode_check(1.0, 1.0, 2.0) == pytest.approx(1.0, rel=0.02)


def test_phi_and_family():
    exact = math.log(1.0 + math.sqrt(2.0)) - 1.0 / math.sqrt(2.0)
    assert cl.phi(1.0, 3) == pytest.approx(exact, rel=1e-9)
    eta, log_eta, phi_value = cl.select_eta(0.5, 1.0, 3)
    assert 0.0 < eta < 1.0
    assert 0.125 * phi_value >= 1.0
    spec = cl.make_family_spec_fixed_eps(1.0, 1.0, 1.0, j=2, r_j=0.25, eps_bar=0.1)
    small = cl.build_grid(r_max=8.0, cells=256, dim=3)
    u, v, w = cl.dense_family(spec, small)
    assert (u > 0).all() and (w > 0).all()
    norms = cl.family_norms(spec, r_max=8.0)
    assert norms["K_plus_one"] == pytest.approx(norms["K"] + 1.0)


def test_theorem_threshold():
    assert cl.theorem_threshold(2.0, 0.75) == pytest.approx(-256.0)
    with pytest.raises(ValueError):
        cl.theorem_threshold(1.0, 0.3)


def test_gamma_integral():
    assert cl.gamma_integral(1.0) == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_model_params_kwargs():
    p = cl.ModelParams(chi=2.0, lambda_=0.5, dim=4)
    assert p.chi == 2.0
    assert p.lambda_ == 0.5
    assert p.dim == 4
    with pytest.raises(ValueError):
        cl.ModelParams(chi=-1.0)


def test_run_experiment(tmp_path):
    code = cl.run_experiment("gronwall-suite", str(tmp_path / "out"))
    assert code == 0
    assert (tmp_path / "out" / "summary.txt").exists()
    assert (tmp_path / "out" / "gronwall.csv").exists()
