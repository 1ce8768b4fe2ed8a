"""
Unit tests for parameter validation and the steady Investment/Profits distributions.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskwave.core import (
  corner_values,
  derive_g_y,
  derive_h_y,
  incompressible_amplitudes,
  require_valid,
  sample_valid_params,
  steady_fields,
  steady_gradients,
  steady_grid,
  validate_params,
)
from riskwave.errors import InvalidParamsError, InvalidSignsError, OutOfDomainError
from riskwave.models import ModelParams


def test_unit_parameters_are_valid() -> None:
  """Unit couplings on a quarter-size rectangle satisfy every constraint."""
  report = validate_params(ModelParams.unit())

  assert report.ok
  assert report.names() == []


def test_negative_b_is_reported_not_raised() -> None:
  """A wrong sign shows up as a named violation."""
  p = ModelParams.unit().model_copy(update={"b": -1.0})

  report = validate_params(p)

  assert not report.ok
  assert "b > 0" in report.names()


def test_identity_violation_is_reported() -> None:
  """I0²h_y must match P0²g_y."""
  p = ModelParams.unit().model_copy(update={"h_y": 2.0})

  assert "I0²h_y = P0²g_y" in validate_params(p).names()


def test_tilt_bound_is_checked() -> None:
  """Unit parameters on a unit square break b > g_x·X + g_y·Y."""
  report = validate_params(ModelParams.unit(X=1.0, Y=1.0))

  assert report.names() == ["b > g_x·X + g_y·Y"]


def test_require_valid_raises_with_report() -> None:
  """The raised error carries the full report."""
  p = ModelParams.unit().model_copy(update={"d": 1.0})

  with pytest.raises(InvalidParamsError, match="d < 0") as excinfo:
    require_valid(p)

  assert "d < 0" in excinfo.value.report.names()


def test_corner_values_for_unit_parameters() -> None:
  """Most secure corner holds (1.5, 0.5), most risky corner (I0, P0)."""
  I_secure, P_secure, I_risky, P_risky = corner_values(ModelParams.unit())

  assert I_secure == pytest.approx(1.5, abs=1e-15)
  assert P_secure == pytest.approx(0.5, abs=1e-15)
  assert (I_risky, P_risky) == (1.0, 1.0)


def test_steady_fields_at_risky_corner_are_exact() -> None:
  """I(X, Y) = I0 and P(X, Y) = P0 with no rounding."""
  p = ModelParams.unit().model_copy(update={"I0": 1.7, "P0": 1.7})

  assert steady_fields(p, p.X, p.Y) == (1.7, 1.7)


def test_steady_fields_reject_points_outside() -> None:
  """Points beyond the rectangle raise."""
  p = ModelParams.unit()

  with pytest.raises(OutOfDomainError):
    steady_fields(p, p.X + 0.01, 0.0)


def test_steady_fields_accept_arrays() -> None:
  """Array inputs give array outputs of the same shape."""
  p = ModelParams.unit()
  x = np.linspace(0.0, p.X, 5)

  investment, profits = steady_fields(p, x, np.zeros_like(x))

  assert investment.shape == (5,)
  assert profits.shape == (5,)


def test_steady_gradients_match_finite_differences() -> None:
  """Closed-form gradients agree with central differences of the fields."""
  p = sample_valid_params(np.random.default_rng(3))
  (dIdx, dIdy), (dPdx, dPdy) = steady_gradients(p)
  x, y, h = p.X / 2, p.Y / 2, 1e-4

  assert (steady_fields(p, x + h, y)[0] - steady_fields(p, x - h, y)[0]) / (2 * h) == pytest.approx(dIdx, rel=1e-8)
  assert (steady_fields(p, x, y + h)[0] - steady_fields(p, x, y - h)[0]) / (2 * h) == pytest.approx(dIdy, rel=1e-8)
  assert (steady_fields(p, x + h, y)[1] - steady_fields(p, x - h, y)[1]) / (2 * h) == pytest.approx(dPdx, rel=1e-8)
  assert (steady_fields(p, x, y + h)[1] - steady_fields(p, x, y - h)[1]) / (2 * h) == pytest.approx(dPdy, rel=1e-8)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_steady_state_is_monotonic(seed: int) -> None:
  """More risk means less Investment and more Profits along both axes."""
  p = sample_valid_params(np.random.default_rng(seed))
  assert validate_params(p).ok

  xs = np.linspace(0.0, p.X, 7)
  ys = np.linspace(0.0, p.Y, 7)
  I_x, P_x = steady_fields(p, xs, np.full_like(xs, p.Y / 2))
  I_y, P_y = steady_fields(p, np.full_like(ys, p.X / 2), ys)

  assert np.all(np.diff(I_x) < 0)
  assert np.all(np.diff(I_y) < 0)
  assert np.all(np.diff(P_x) > 0)
  assert np.all(np.diff(P_y) > 0)


def test_steady_grid_orders_x_fastest() -> None:
  """Lattice nodes run along x first and cover both corners."""
  p = ModelParams.unit()

  points = steady_grid(p, 3, 2)

  assert len(points) == 6
  assert (points[0].x, points[0].y) == (0.0, 0.0)
  assert (points[1].x, points[1].y) == (p.X / 2, 0.0)
  assert (points[-1].x, points[-1].y) == (p.X, p.Y)
  assert points[-1].I == 1.0


def test_incompressible_amplitudes_for_unit_couplings() -> None:
  """Unit couplings force I0 = P0 = 1."""
  assert incompressible_amplitudes(1.0, -1.0, 1.0, -1.0, 1.0) == (1.0, 1.0)


def test_incompressible_amplitudes_need_signs() -> None:
  """Positive a2 has no incompressible amplitudes."""
  with pytest.raises(InvalidSignsError):
    incompressible_amplitudes(1.0, 1.0, 1.0, -1.0, 1.0)


def test_derived_tilts_complete_the_identity() -> None:
  """derive_g_y and derive_h_y are inverse completions of I0²h_y = P0²g_y."""
  I0, P0 = 1.3, 0.7

  g_y = derive_g_y(I0, P0, 0.4)
  h_y = derive_h_y(I0, P0, g_y)

  assert I0**2 * 0.4 == pytest.approx(P0**2 * g_y, rel=1e-12)
  assert h_y == pytest.approx(0.4, rel=1e-12)
  assert math.isfinite(g_y)
