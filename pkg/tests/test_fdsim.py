"""
Unit tests for the staggered leapfrog integrator of the linearized Investment/Profits system.
"""

from __future__ import annotations

import logging
import math
from dataclasses import replace

import numpy as np
import pytest

from riskwave.dispersion import WaveMode, incompressible_mode, simplest_mode
from riskwave.errors import BadGridError, CFLViolationError, InstabilityError, ProbeOutOfDomainError
from riskwave.fdsim import (
  SimConfig,
  SimState,
  border_integral,
  cfl_limit,
  cross_energy,
  init_sim,
  l2_error,
  run_and_probe,
  sample_probe,
  step,
)
from riskwave.models import InitialCondition, LateralBoundary, ModelParams
from riskwave.wavefield import potential_time_derivative

# Couplings for which the simplest mode with the incompressible dispersion solves the bulk equations exactly.
WAVE_PARAMS = ModelParams(a1=1.0, a2=-0.1, b=1.0, d=-0.1, g_x=0.1, g_y=0.1, h_x=1.0, h_y=0.1, I0=1.0, P0=1.0, X=1.0, Y=6.0)
WAVE_K = 2.0 * math.pi
AMPLITUDE = 0.01


def _wave_mode() -> WaveMode:
  omega = incompressible_mode(WAVE_PARAMS, WAVE_K).omega
  return simplest_mode(WAVE_PARAMS, omega, WAVE_K)


def _forced_state(nx: int, ny: int, T: float, amplitude: float = AMPLITUDE) -> SimState:
  mode = _wave_mode()
  cfg = SimConfig(nx=nx, ny=ny, dt=cfl_limit(WAVE_PARAMS, nx, ny), T=T, forcing=mode, amplitude=amplitude)
  return init_sim(WAVE_PARAMS, cfg, InitialCondition.ANALYTIC, mode, amplitude)


def _advance(state: SimState, steps: int) -> SimState:
  for _ in range(steps):
    state = step(state)
  return state


def test_wave_mode_matches_bulk_dispersion() -> None:
  """The chosen couplings give s = k, so the simplest mode is an exact bulk solution."""
  mode = _wave_mode()

  assert mode.target_slope == pytest.approx(WAVE_K, rel=1e-12)


def test_second_order_convergence_over_short_horizon() -> None:
  """Halving dx, dy and dt cuts the error against the exact mode by about four."""
  T = 4 * cfl_limit(WAVE_PARAMS, 32, 384)
  coarse = _forced_state(32, 384, T)
  fine = _forced_state(64, 768, T)
  mode = _wave_mode()

  coarse = _advance(coarse, coarse.cfg.steps)
  fine = _advance(fine, fine.cfg.steps)

  assert coarse.cfg.steps == 4
  assert fine.cfg.steps == 8
  ratio = l2_error(coarse, mode, AMPLITUDE) / l2_error(fine, mode, AMPLITUDE)
  assert 3.0 <= ratio <= 5.0


def test_zero_state_stays_zero() -> None:
  """Without forcing or initial perturbation nothing moves."""
  cfg = SimConfig(nx=8, ny=8, dt=cfl_limit(WAVE_PARAMS, 8, 8), T=0.5)
  state = _advance(init_sim(WAVE_PARAMS, cfg), 20)

  for values in state.fields():
    assert not np.any(values)


def test_simulation_is_linear() -> None:
  """Doubling initial data and forcing doubles every field bit for bit."""
  T = 5 * cfl_limit(WAVE_PARAMS, 16, 96)
  single = _advance(_forced_state(16, 96, T), 5)
  double = _advance(_forced_state(16, 96, T, 2 * AMPLITUDE), 5)

  for a, b in zip(single.fields(), double.fields(), strict=True):
    np.testing.assert_array_equal(b, 2.0 * a)


def test_constant_perturbations_are_steady() -> None:
  """Uniform dI and dP with zero velocities carry no gradients and stay put."""
  cfg = SimConfig(nx=8, ny=8, dt=cfl_limit(WAVE_PARAMS, 8, 8), T=0.1, coupling=True)
  start = init_sim(WAVE_PARAMS, cfg)
  start = replace(start, dI=np.full((8, 8), 0.3), dP=np.full((8, 8), -0.2))

  state = _advance(start, 10)

  np.testing.assert_array_equal(state.dI, start.dI)
  np.testing.assert_array_equal(state.dP, start.dP)
  assert not np.any(state.vy)


def test_time_step_above_cfl_is_rejected() -> None:
  """dt beyond the stability bound raises before any stepping."""
  cfg = SimConfig(nx=8, ny=8, dt=1.01 * cfl_limit(WAVE_PARAMS, 8, 8), T=1.0)

  with pytest.raises(CFLViolationError):
    init_sim(WAVE_PARAMS, cfg)


@pytest.mark.parametrize(("nx", "ny"), [(4, 16), (16, 7)])
def test_small_grids_are_rejected(nx: int, ny: int) -> None:
  """Fewer than eight cells along an axis is a configuration error."""
  with pytest.raises(BadGridError):
    SimConfig(nx=nx, ny=ny, dt=0.01, T=1.0)


def test_nonpositive_time_step_is_rejected() -> None:
  """dt must be positive."""
  with pytest.raises(BadGridError):
    SimConfig(nx=8, ny=8, dt=0.0, T=1.0)


def test_probe_outside_domain_is_rejected() -> None:
  """Probes are checked before the run starts."""
  cfg = SimConfig(nx=8, ny=8, dt=cfl_limit(WAVE_PARAMS, 8, 8), T=0.1)

  with pytest.raises(ProbeOutOfDomainError):
    run_and_probe(init_sim(WAVE_PARAMS, cfg), [(0.5, 1.0), (2.0, 1.0)])


def test_analytic_start_needs_a_mode() -> None:
  """ANALYTIC without a mode is a usage error."""
  cfg = SimConfig(nx=8, ny=8, dt=cfl_limit(WAVE_PARAMS, 8, 8), T=0.1)

  with pytest.raises(ValueError, match="wave mode"):
    init_sim(WAVE_PARAMS, cfg, InitialCondition.ANALYTIC)


def test_long_runs_blow_up_and_are_stopped() -> None:
  """Grid-scale modes of the bulk system grow every step until the guard trips."""
  mode = _wave_mode()
  dt = cfl_limit(WAVE_PARAMS, 16, 96)
  cfg = SimConfig(nx=16, ny=96, dt=dt, T=2000 * dt, forcing=mode, amplitude=AMPLITUDE)
  state = init_sim(WAVE_PARAMS, cfg, InitialCondition.ANALYTIC, mode, AMPLITUDE)

  with pytest.raises(InstabilityError):
    _advance(state, cfg.steps)


def test_analytic_start_samples_exact_mode() -> None:
  """A probe at a cell center reads the exact dI there at t = 0."""
  mode = _wave_mode()
  state = _forced_state(16, 96, 0.0)
  x, y = 5.5 / 16, WAVE_PARAMS.Y - 0.5 * 6.0 / 96

  probe = sample_probe(state, x, y)

  expected = WAVE_PARAMS.P0 / WAVE_PARAMS.d * potential_time_derivative(mode, WAVE_PARAMS, AMPLITUDE, 0.0, x, y)
  assert probe[0] == pytest.approx(float(expected), rel=1e-12)


def test_cross_energy_is_quadratic() -> None:
  """Doubling every field multiplies the invariant by four."""
  single = _forced_state(16, 96, 0.0)
  double = _forced_state(16, 96, 0.0, 2 * AMPLITUDE)

  assert cross_energy(double) == pytest.approx(4.0 * cross_energy(single), rel=1e-14)


def test_run_and_probe_records_every_step() -> None:
  """Zero runs give all-zero series with step 0 included."""
  dt = cfl_limit(WAVE_PARAMS, 8, 8)
  cfg = SimConfig(nx=8, ny=8, dt=dt, T=6 * dt)

  record, final = run_and_probe(init_sim(WAVE_PARAMS, cfg), [(0.5, 3.0), (1.0, 6.0)], cadence=2)

  assert final.n == 6
  assert record.times.tolist() == pytest.approx([0.0, 2 * dt, 4 * dt, 6 * dt])
  assert all(series.shape == (4, 6) for series in record.series)
  assert not any(np.any(series) for series in record.series)
  assert not np.any(record.border_integral)
  assert border_integral(final) == 0.0


def test_incommensurate_forcing_is_logged(caplog: pytest.LogCaptureFixture) -> None:
  """Periodic edges with kX / 2pi off an integer emit a warning."""
  omega = incompressible_mode(WAVE_PARAMS, 3.0).omega
  mode = simplest_mode(WAVE_PARAMS, omega, 3.0)
  cfg = SimConfig(nx=8, ny=8, dt=cfl_limit(WAVE_PARAMS, 8, 8), T=0.1, lateral=LateralBoundary.PERIODIC, forcing=mode, amplitude=0.1)

  with caplog.at_level(logging.WARNING, logger="riskwave.fdsim"):
    init_sim(WAVE_PARAMS, cfg)

  assert "not periodic" in caplog.text
