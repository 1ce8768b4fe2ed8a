"""Space-time reconstruction of surface-like waves on the y = Y border.

Potentials share one form, phi = psi = A cos(kx - omega t) f(y - Y), and every other field follows
from them: velocities are their gradients, Investment and Profits perturbations their time
derivatives, the border displacement follows from the kinematic condition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import fixed_quad

from riskwave.core import steady_fields
from riskwave.errors import NonSimplestModeError, OutOfDomainError

if TYPE_CHECKING:
  from numpy.typing import ArrayLike, NDArray

  from riskwave.dispersion import WaveMode
  from riskwave.models import ModelParams

logger = logging.getLogger(__name__)

QUADRATURE_POINTS = 256
RK4_STEPS_PER_PERIOD = 256

NON_SIMPLEST_ERROR = "closed-form trajectories need a single weighted exponential with positive root"
ABOVE_BORDER_ERROR = "starting point lies above the y = Y border"

# Integrating the border Investment density gives the opposite sign to the commonly printed closed form.
AGGREGATE_SIGN_NOTE = (
  "wave term of the border aggregate is -(2 P0 A omega / (d k)) sin(kX/2) sin(omega t - kX/2); "
  "the printed closed form carries the opposite sign, quadrature of the pointwise field agrees with this one"
)


@dataclass(frozen=True)
class PotentialSample:
  phi: NDArray[np.float64]
  psi: NDArray[np.float64]
  v: tuple[NDArray[np.float64], NDArray[np.float64]]
  u: tuple[NDArray[np.float64], NDArray[np.float64]]


@dataclass(frozen=True)
class BoundaryShape:
  """zeta(t, x) on a (times, xs) lattice."""

  times: NDArray[np.float64]
  xs: NDArray[np.float64]
  zeta: NDArray[np.float64]
  amplitude: float
  mode: WaveMode


@dataclass(frozen=True)
class FieldSnapshot:
  """Fields on an nx by ny node lattice spanning the rectangle; arrays are indexed [ix, iy]."""

  t: float
  xs: NDArray[np.float64]
  ys: NDArray[np.float64]
  I: NDArray[np.float64]  # noqa: E741
  P: NDArray[np.float64]
  v: NDArray[np.float64]
  u: NDArray[np.float64]

  def rows(self) -> list[tuple[float, ...]]:
    """(t, x, y, I, P, vx, vy, ux, uy) with x fastest."""
    return [
      (
        self.t,
        float(self.xs[i]),
        float(self.ys[j]),
        float(self.I[i, j]),
        float(self.P[i, j]),
        float(self.v[i, j, 0]),
        float(self.v[i, j, 1]),
        float(self.u[i, j, 0]),
        float(self.u[i, j, 1]),
      )
      for j in range(self.ys.size)
      for i in range(self.xs.size)
    ]


def profile(mode: WaveMode, eta: ArrayLike) -> NDArray[np.float64]:
  """Depth profile f(eta), eta = y - Y; f(0) = 1."""
  eta = np.asarray(eta, dtype=np.float64)
  total = np.zeros_like(eta)
  for component, weight in zip(mode.components, mode.weights, strict=True):
    if weight:
      total = total + weight * component.value(eta)
  return total


def profile_derivative(mode: WaveMode, eta: ArrayLike) -> NDArray[np.float64]:
  """f'(eta); f'(0) is the mode's target slope."""
  eta = np.asarray(eta, dtype=np.float64)
  total = np.zeros_like(eta)
  for component, weight in zip(mode.components, mode.weights, strict=True):
    if weight:
      total = total + weight * component.slope(eta)
  return total


def _phase(mode: WaveMode, t: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
  return mode.k * np.asarray(x, dtype=np.float64) - mode.omega * np.asarray(t, dtype=np.float64)


def potential_and_velocity(mode: WaveMode, p: ModelParams, A: float, t: ArrayLike, x: ArrayLike, y: ArrayLike) -> PotentialSample:
  """Potentials and their analytic gradients; v = u because phi = psi."""
  phase = _phase(mode, t, x)
  eta = np.asarray(y, dtype=np.float64) - p.Y
  f = profile(mode, eta)
  phi = A * np.cos(phase) * f
  vx = -A * mode.k * np.sin(phase) * f
  vy = A * np.cos(phase) * profile_derivative(mode, eta)
  return PotentialSample(phi=phi, psi=phi.copy(), v=(vx, vy), u=(vx.copy(), vy.copy()))


def potential_time_derivative(mode: WaveMode, p: ModelParams, A: float, t: ArrayLike, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
  """d(phi)/dt = A omega sin(kx - omega t) f(y - Y)."""
  eta = np.asarray(y, dtype=np.float64) - p.Y
  return A * mode.omega * np.sin(_phase(mode, t, x)) * profile(mode, eta)


def boundary_shape(mode: WaveMode, p: ModelParams, A: float, t: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
  """zeta = Y - A omega I0 / (g_y P0) sin(kx - omega t)."""
  return p.Y - A * mode.omega * p.I0 / (p.g_y * p.P0) * np.sin(_phase(mode, t, x))


def boundary_shape_from_profits(mode: WaveMode, p: ModelParams, A: float, t: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
  """zeta read off the Profits potential, Y - P0 / (h_y I0) d(psi)/dt; equals boundary_shape when I0²h_y = P0²g_y."""
  return p.Y - p.P0 / (p.h_y * p.I0) * potential_time_derivative(mode, p, A, t, x, p.Y)


def sample_boundary(mode: WaveMode, p: ModelParams, A: float, times: ArrayLike, xs: ArrayLike) -> BoundaryShape:
  """Boundary displacement sampled on a times by xs lattice."""
  times = np.asarray(times, dtype=np.float64)
  xs = np.asarray(xs, dtype=np.float64)
  tt, xx = np.meshgrid(times, xs, indexing="ij")
  return BoundaryShape(times=times, xs=xs, zeta=boundary_shape(mode, p, A, tt, xx), amplitude=A, mode=mode)


def boundary_amplitude_variants(mode: WaveMode, p: ModelParams) -> dict[str, float]:
  """Unit-amplitude border displacement in its canonical form and the two commonly printed forms.

  The printed forms agree with the canonical one only when I0 = P0 and the mode is the simplest one.
  """
  return {
    "canonical": mode.omega * p.I0 / (p.g_y * p.P0),
    "omega_over_g_y": mode.omega / p.g_y,
    "sqrt_s_ratio": math.sqrt(mode.target_slope * p.P0 / (p.g_y * p.I0)),
  }


def field_perturbations(mode: WaveMode, p: ModelParams, A: float, t: ArrayLike, x: ArrayLike, y: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
  """Investment and Profits: steady fields plus (P0/d) d(psi)/dt and (I0/b) d(phi)/dt."""
  xa = np.asarray(x, dtype=np.float64)
  ya = np.asarray(y, dtype=np.float64)
  I_steady, P_steady = steady_fields(p, xa, ya)
  rate = potential_time_derivative(mode, p, A, t, xa, ya)
  return I_steady + p.P0 / p.d * rate, P_steady + p.I0 / p.b * rate


def aggregate_steady(p: ModelParams) -> float:
  """Closed-form border integral of the steady Investment along y = Y."""
  return p.I0 * (p.X - p.h_x * p.X**2 / (2.0 * p.d))


def aggregate_investment(mode: WaveMode, p: ModelParams, A: float, t: float) -> float:
  """Investment integrated along the border y = Y over 0 < x < X."""
  wave = -(2.0 * p.P0 * A * mode.omega / (p.d * mode.k)) * math.sin(mode.k * p.X / 2.0) * math.sin(mode.omega * t - mode.k * p.X / 2.0)
  return aggregate_steady(p) + wave


def aggregate_investment_quadrature(mode: WaveMode, p: ModelParams, A: float, t: float, n: int = QUADRATURE_POINTS) -> float:
  """Gauss-Legendre quadrature of the pointwise border Investment; the reference for aggregate_investment."""

  def border(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return field_perturbations(mode, p, A, t, x, np.full_like(x, p.Y))[0]

  value, _ = fixed_quad(border, 0.0, p.X, n=n)
  return float(value)


def _simplest_rate(mode: WaveMode) -> tuple[float, float]:
  if not mode.is_simplest:
    raise NonSimplestModeError(NON_SIMPLEST_ERROR)
  component, weight = next((c, w) for c, w in zip(mode.components, mode.weights, strict=True) if w)
  return component.rate, weight


def circulation_trajectory(mode: WaveMode, p: ModelParams, A: float, x0: float, y0: float, times: ArrayLike) -> NDArray[np.float64]:
  """Closed-form small orbit around (x0, y0); rows are (x, y)."""
  s, weight = _simplest_rate(mode)
  if y0 > p.Y:
    raise OutOfDomainError(ABOVE_BORDER_ERROR)
  depth = weight * math.exp(s * (y0 - p.Y))
  phase = mode.k * x0 - mode.omega * np.asarray(times, dtype=np.float64)
  xs = x0 - A * (mode.k / mode.omega) * np.cos(phase) * depth
  ys = y0 - A * (s / mode.omega) * np.sin(phase) * depth
  return np.column_stack([xs, ys])


def orbit_radius_squared(mode: WaveMode, p: ModelParams, A: float, x0: float, y0: float, t: ArrayLike) -> NDArray[np.float64]:
  """(x - x0)² + (y - y0)² of the closed-form orbit as k²/omega² [1 + (s² - k²)/k² sin²(kx0 - omega t)] e^{2s(y0 - Y)}."""
  s, weight = _simplest_rate(mode)
  k = mode.k
  modulation = 1.0 + (s**2 - k**2) / k**2 * np.sin(k * x0 - mode.omega * np.asarray(t, dtype=np.float64)) ** 2
  return (A * weight * k / mode.omega) ** 2 * modulation * math.exp(2.0 * s * (y0 - p.Y))


def integrate_trajectory(
  mode: WaveMode,
  p: ModelParams,
  A: float,
  x0: float,
  y0: float,
  periods: float = 1.0,
  steps_per_period: int = RK4_STEPS_PER_PERIOD,
) -> NDArray[np.float64]:
  """Fixed-step RK4 of dx/dt = v(t, x, y) for any mode; rows are (t, x, y)."""
  h = mode.period / steps_per_period
  n = round(periods * steps_per_period)

  def velocity(t: float, point: NDArray[np.float64]) -> NDArray[np.float64]:
    sample = potential_and_velocity(mode, p, A, t, point[0], point[1])
    return np.array([float(sample.v[0]), float(sample.v[1])])

  path = np.empty((n + 1, 3))
  point = np.array([x0, y0], dtype=np.float64)
  path[0] = (0.0, x0, y0)
  for i in range(n):
    t = i * h
    k1 = velocity(t, point)
    k2 = velocity(t + h / 2.0, point + h / 2.0 * k1)
    k3 = velocity(t + h / 2.0, point + h / 2.0 * k2)
    k4 = velocity(t + h, point + h * k3)
    point = point + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    path[i + 1] = (t + h, point[0], point[1])
  return path


def sample_snapshot(mode: WaveMode, p: ModelParams, A: float, t: float, nx: int, ny: int) -> FieldSnapshot:
  """All fields at time t on a node lattice covering [0, X] x [0, Y]."""
  xs = np.linspace(0.0, p.X, nx)
  ys = np.linspace(0.0, p.Y, ny)
  xx, yy = np.meshgrid(xs, ys, indexing="ij")
  investment, profits = field_perturbations(mode, p, A, t, xx, yy)
  sample = potential_and_velocity(mode, p, A, t, xx, yy)
  return FieldSnapshot(
    t=t,
    xs=xs,
    ys=ys,
    I=investment,
    P=profits,
    v=np.stack(sample.v, axis=-1),
    u=np.stack(sample.u, axis=-1),
  )
