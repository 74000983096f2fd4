"""Tests for lib/ode.py: integration, variational equation, equilibria."""

from __future__ import annotations

import io

import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from lib.errors import IntegrationError
from lib.ode import (
    IntegratorConfig,
    Trajectory,
    converged_to_equilibrium,
    integrate,
    integrate_variational,
)
from lib.systems import SystemModel, lti_system, thomas_system


def harmonic_oscillator() -> SystemModel:
    return lti_system(np.array([[0.0, 1.0], [-1.0, 0.0]]), name="oscillator")


def blow_up() -> SystemModel:
    """``x' = x^2`` from ``x(0) = 1`` escapes at ``t = 1``."""
    return SystemModel(
        dimension=1,
        vector_field=lambda t, x: x**2,
        jacobian=lambda t, x: np.array([[2.0 * x[0]]]),
        name="blow-up",
    )


class TestIntegratorConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"method": "euler"}, {"abs_tol": 0.0}, {"rel_tol": -1.0}, {"step": 0.0}, {"max_step": float("nan")}],
        ids=["method", "atol", "rtol", "step", "max-step"],
    )
    def test_rejects(self, kwargs) -> None:
        with pytest.raises(ValueError):
            IntegratorConfig(**kwargs)

    def test_to_dict_hides_infinite_max_step(self) -> None:
        assert IntegratorConfig().to_dict()["max_step"] is None


class TestIntegrate:
    @pytest.mark.parametrize("method", ["rk45", "rk4"])
    def test_exponential_decay(self, method: str) -> None:
        cfg = IntegratorConfig(method=method, step=1e-3)
        traj = integrate(lti_system(-np.eye(1)), [1.0], (0.0, 1.0), cfg)
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(1.0)
        assert traj.final_state[0] == pytest.approx(np.exp(-1.0), abs=1e-8)

    def test_rk4_is_fourth_order(self) -> None:
        sys = lti_system(-np.eye(1))
        errors = []
        for h in (0.1, 0.05):
            traj = integrate(sys, [1.0], (0.0, 2.0), IntegratorConfig(method="rk4", step=h))
            errors.append(abs(traj.final_state[0] - np.exp(-2.0)))
        assert errors[0] / errors[1] == pytest.approx(16.0, rel=0.1)

    def test_oscillator_conserves_energy(self) -> None:
        traj = integrate(harmonic_oscillator(), [1.0, 0.0], (0.0, 20.0))
        energy = np.sum(traj.states**2, axis=1)
        assert np.max(np.abs(energy - 1.0)) < 1e-6

    def test_blow_up_returns_partial(self) -> None:
        with pytest.raises(IntegrationError) as excinfo:
            integrate(blow_up(), [1.0], (0.0, 2.0))
        partial = excinfo.value.partial
        assert partial is not None
        assert partial.times[-1] <= 1.01
        assert np.all(np.isfinite(partial.states))

    def test_blow_up_fixed_step(self) -> None:
        cfg = IntegratorConfig(method="rk4", step=0.05)
        with pytest.raises(IntegrationError) as excinfo:
            integrate(blow_up(), [1.0], (0.0, 3.0), cfg)
        assert excinfo.value.partial is not None

    @pytest.mark.parametrize("span", [(1.0, 1.0), (2.0, 0.0), (0.0, float("inf"))])
    def test_bad_span(self, span) -> None:
        with pytest.raises(ValueError):
            integrate(lti_system(np.eye(1)), [1.0], span)

    def test_start_outside_domain_warns(self, caplog) -> None:
        with caplog.at_level("WARNING", logger="lib.ode"):
            integrate(thomas_system(2.0), [5.0, 0.0, 0.0], (0.0, 0.1))
        assert any("outside" in r.message for r in caplog.records)


class TestVariational:
    def test_lti_fundamental_matrix_is_expm(self, rng) -> None:
        A = 0.5 * rng.standard_normal((3, 3))
        traj, Y = integrate_variational(lti_system(A), rng.standard_normal(3), (0.0, 2.0))
        assert Y.shape == (len(traj), 3, 3)
        assert_allclose(Y[0], np.eye(3))
        for i in (len(traj) // 2, -1):
            assert_allclose(Y[i], scipy.linalg.expm(A * traj.times[i]), atol=1e-6)

    def test_liouville_formula(self, rng) -> None:
        sys = thomas_system(0.3)
        traj, Y = integrate_variational(sys, rng.uniform(-1, 1, size=3), (0.0, 3.0))
        assert np.linalg.det(Y[-1]) == pytest.approx(np.exp(-0.9 * traj.times[-1]), rel=1e-6)

    def test_matches_finite_difference_sensitivity(self) -> None:
        sys = thomas_system(0.3)
        x0 = np.array([0.4, -1.0, 0.7])
        cfg = IntegratorConfig(abs_tol=1e-11, rel_tol=1e-11)
        _, Y = integrate_variational(sys, x0, (0.0, 2.0), cfg)
        h = 1e-4
        fd = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            plus = integrate(sys, x0 + e, (0.0, 2.0), cfg).final_state
            minus = integrate(sys, x0 - e, (0.0, 2.0), cfg).final_state
            fd[:, j] = (plus - minus) / (2 * h)
        assert_allclose(Y[-1], fd, atol=1e-5)


class TestTrajectory:
    def test_csv(self) -> None:
        traj = Trajectory(times=[0.0, 0.5], states=[[1.0, 2.0], [0.25, 1.0 / 3.0]])
        out = io.StringIO()
        traj.to_csv(out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "t,x1,x2"
        assert lines[1] == "0,1,2"
        assert lines[2] == "0.5,0.25,0.333333333333333"

    def test_csv_to_path(self, tmp_path) -> None:
        path = tmp_path / "traj.csv"
        Trajectory(times=[0.0], states=[[1.0]]).to_csv(path)
        assert path.read_text().splitlines() == ["t,x1", "0,1"]

    @pytest.mark.parametrize(
        "times, states",
        [([0.0, 0.0], [[1.0], [1.0]]), ([0.0, 1.0], [[1.0]]), ([0.0], [[np.nan]])],
        ids=["not-increasing", "shape", "nan"],
    )
    def test_validation(self, times, states) -> None:
        with pytest.raises(ValueError):
            Trajectory(times=times, states=states)


class TestConvergedToEquilibrium:
    def test_decay_converges(self) -> None:
        sys = lti_system(-np.eye(2))
        traj = integrate(sys, [1.0, -1.0], (0.0, 30.0))
        assert converged_to_equilibrium(sys, traj)

    def test_oscillator_does_not(self) -> None:
        sys = harmonic_oscillator()
        traj = integrate(sys, [1.0, 0.0], (0.0, 30.0))
        assert not converged_to_equilibrium(sys, traj)

    def test_bad_fraction(self) -> None:
        sys = lti_system(-np.eye(1))
        traj = Trajectory(times=[0.0], states=[[0.0]])
        with pytest.raises(ValueError):
            converged_to_equilibrium(sys, traj, tail_fraction=0.0)

    def test_strongly_damped_thomas_converges_and_stays_in_box(self) -> None:
        sys = thomas_system(2.0)
        for x0 in sys.domain.sample(4, seed=1):
            traj = integrate(sys, x0, (0.0, 40.0))
            assert all(sys.domain.contains(x) for x in traj.states)
            assert converged_to_equilibrium(sys, traj)
