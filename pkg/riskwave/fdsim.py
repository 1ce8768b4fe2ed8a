"""Finite-difference time-domain integrator for the linearized Investment/Profits system.

Unknowns are perturbations about the steady state: scalars dI, dP at cell centers and velocity
components on the faces normal to them (vx, ux on x-faces, vy, uy on y-faces). Time stepping is
kick-drift-kick leapfrog:

  dv/dt = (b / I0) grad dP        du/dt = (d / P0) grad dI
  ddI/dt = -I0 div v + a1 u_y     ddP/dt = -P0 div u + a2 v_y

The y = Y faces carry v_y = u_y prescribed by a wave mode; y = 0 faces have zero normal velocity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from riskwave.core import require_valid
from riskwave.errors import BadGridError, CFLViolationError, InstabilityError, ProbeOutOfDomainError
from riskwave.models import InitialCondition, LateralBoundary
from riskwave.wavefield import potential_and_velocity, potential_time_derivative

if TYPE_CHECKING:
  from collections.abc import Sequence

  from numpy.typing import NDArray

  from riskwave.dispersion import WaveMode
  from riskwave.models import ModelParams

logger = logging.getLogger(__name__)

MIN_CELLS = 8
CFL_SAFETY = 0.5
INSTABILITY_FACTOR = 1e12
COMMENSURATE_TOL = 1e-9
FIELD_NAMES = ("dI", "dP", "vx", "vy", "ux", "uy")

MISSING_MODE_ERROR = "analytic initial condition needs a wave mode"
BOUNDARY_NOTE = "lateral edges {lateral}; zero normal velocity at y=0; forcing applied on the fixed y=Y faces"


@dataclass(frozen=True)
class SimConfig:
  nx: int
  ny: int
  dt: float
  T: float
  lateral: LateralBoundary = LateralBoundary.PERIODIC
  forcing: WaveMode | None = None
  amplitude: float = 0.0
  coupling: bool = True

  def __post_init__(self) -> None:
    if self.nx < MIN_CELLS or self.ny < MIN_CELLS:
      msg = f"simulation grid needs nx, ny >= {MIN_CELLS}, got {self.nx} x {self.ny}"
      raise BadGridError(msg)
    if not (self.dt > 0 and self.T >= 0 and math.isfinite(self.dt) and math.isfinite(self.T)):
      msg = f"time step and horizon must be positive and finite, got dt={self.dt!r}, T={self.T!r}"
      raise BadGridError(msg)

  @property
  def steps(self) -> int:
    return round(self.T / self.dt)

  def boundary_note(self) -> str:
    return BOUNDARY_NOTE.format(lateral=self.lateral.value)


@dataclass(frozen=True)
class SimState:
  p: ModelParams
  cfg: SimConfig
  t: float
  n: int
  dI: NDArray[np.float64]
  dP: NDArray[np.float64]
  vx: NDArray[np.float64]
  vy: NDArray[np.float64]
  ux: NDArray[np.float64]
  uy: NDArray[np.float64]
  scale: float = 1.0

  @property
  def dx(self) -> float:
    return self.p.X / self.cfg.nx

  @property
  def dy(self) -> float:
    return self.p.Y / self.cfg.ny

  def fields(self) -> tuple[NDArray[np.float64], ...]:
    return self.dI, self.dP, self.vx, self.vy, self.ux, self.uy


@dataclass(frozen=True)
class ProbeRecord:
  """Samples every `cadence` steps: per probe a (n_samples, 6) array of dI, dP, vx, vy, ux, uy."""

  times: NDArray[np.float64]
  probes: tuple[tuple[float, float], ...]
  series: tuple[NDArray[np.float64], ...]
  border_integral: NDArray[np.float64]
  columns: tuple[str, ...] = field(default=FIELD_NAMES)


def cfl_limit(p: ModelParams, nx: int, ny: int) -> float:
  """Largest admissible dt: 0.5 min(dx, dy) / sqrt(max(b P0 / I0, |d| I0 / P0))."""
  c_max = math.sqrt(max(p.b * p.P0 / p.I0, abs(p.d) * p.I0 / p.P0))
  return CFL_SAFETY * min(p.X / nx, p.Y / ny) / c_max


def _centers(p: ModelParams, nx: int, ny: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
  return (np.arange(nx) + 0.5) * (p.X / nx), (np.arange(ny) + 0.5) * (p.Y / ny)


def _nodes(extent: float, n: int) -> NDArray[np.float64]:
  return np.arange(n + 1) * (extent / n)


def exact_mode_fields(mode: WaveMode, p: ModelParams, A: float, nx: int, ny: int, t: float) -> tuple[NDArray[np.float64], ...]:
  """Analytic (dI, dP, vx, vy, ux, uy) of a wave mode sampled at the staggered positions."""
  xc, yc = _centers(p, nx, ny)
  xf = _nodes(p.X, nx)
  yf = _nodes(p.Y, ny)

  cx, cy = np.meshgrid(xc, yc, indexing="ij")
  rate = potential_time_derivative(mode, p, A, t, cx, cy)
  dI = p.P0 / p.d * rate
  dP = p.I0 / p.b * rate

  fx, fy = np.meshgrid(xf, yc, indexing="ij")
  vx = potential_and_velocity(mode, p, A, t, fx, fy).v[0]
  gx, gy = np.meshgrid(xc, yf, indexing="ij")
  vy = potential_and_velocity(mode, p, A, t, gx, gy).v[1]
  return dI, dP, vx, vy, vx.copy(), vy.copy()


def _forcing(cfg: SimConfig, p: ModelParams, t: float) -> NDArray[np.float64]:
  xc = (np.arange(cfg.nx) + 0.5) * (p.X / cfg.nx)
  if cfg.forcing is None or cfg.amplitude == 0:
    return np.zeros(cfg.nx)
  mode = cfg.forcing
  return cfg.amplitude * mode.target_slope * np.cos(mode.k * xc - mode.omega * t)


def _set_border_faces(cfg: SimConfig, p: ModelParams, vx: NDArray[np.float64], vy: NDArray[np.float64], t: float) -> None:
  vy[:, 0] = 0.0
  vy[:, -1] = _forcing(cfg, p, t)
  if cfg.lateral is LateralBoundary.ZERO_NORMAL:
    vx[0, :] = 0.0
    vx[-1, :] = 0.0


def init_sim(
  p: ModelParams,
  cfg: SimConfig,
  initial: InitialCondition = InitialCondition.ZERO,
  mode: WaveMode | None = None,
  amplitude: float = 0.0,
) -> SimState:
  """Starting state: identically zero, or a wave mode sampled at t = 0."""
  require_valid(p)
  limit = cfl_limit(p, cfg.nx, cfg.ny)
  if cfg.dt > limit:
    msg = f"dt={cfg.dt!r} exceeds the stability bound {limit!r}"
    raise CFLViolationError(msg)

  if cfg.lateral is LateralBoundary.PERIODIC and cfg.forcing is not None:
    wraps = cfg.forcing.k * p.X / (2.0 * math.pi)
    if abs(wraps - round(wraps)) > COMMENSURATE_TOL:
      logger.warning("forcing wavenumber k=%g is not periodic over X=%g (kX/2pi=%g)", cfg.forcing.k, p.X, wraps)

  if initial is InitialCondition.ANALYTIC:
    if mode is None:
      raise ValueError(MISSING_MODE_ERROR)
    dI, dP, vx, vy, ux, uy = exact_mode_fields(mode, p, amplitude, cfg.nx, cfg.ny, 0.0)
  else:
    dI = np.zeros((cfg.nx, cfg.ny))
    dP = np.zeros((cfg.nx, cfg.ny))
    vx = np.zeros((cfg.nx + 1, cfg.ny))
    vy = np.zeros((cfg.nx, cfg.ny + 1))
    ux = np.zeros((cfg.nx + 1, cfg.ny))
    uy = np.zeros((cfg.nx, cfg.ny + 1))

  scale = max(1.0, *(float(np.max(np.abs(a))) for a in (dI, dP, vx, vy, ux, uy)))
  if cfg.forcing is not None:
    scale = max(scale, abs(cfg.amplitude * cfg.forcing.target_slope))
  logger.debug("simulation initialised: %d x %d cells, dt=%g, %s", cfg.nx, cfg.ny, cfg.dt, cfg.boundary_note())
  return SimState(p=p, cfg=cfg, t=0.0, n=0, dI=dI, dP=dP, vx=vx, vy=vy, ux=ux, uy=uy, scale=scale)


def _kick(state: SimState, vx: NDArray[np.float64], vy: NDArray[np.float64], scalar: NDArray[np.float64], factor: float, t: float) -> None:
  dx, dy = state.dx, state.dy
  vx[1:-1, :] += factor * (scalar[1:, :] - scalar[:-1, :]) / dx
  if state.cfg.lateral is LateralBoundary.PERIODIC:
    wrap = factor * (scalar[0, :] - scalar[-1, :]) / dx
    vx[0, :] += wrap
    vx[-1, :] = vx[0, :]
  vy[:, 1:-1] += factor * (scalar[:, 1:] - scalar[:, :-1]) / dy
  _set_border_faces(state.cfg, state.p, vx, vy, t)


def _divergence(state: SimState, vx: NDArray[np.float64], vy: NDArray[np.float64]) -> NDArray[np.float64]:
  return (vx[1:, :] - vx[:-1, :]) / state.dx + (vy[:, 1:] - vy[:, :-1]) / state.dy


def _center_average(vy: NDArray[np.float64]) -> NDArray[np.float64]:
  return 0.5 * (vy[:, 1:] + vy[:, :-1])


def step(state: SimState) -> SimState:
  """Advance by one dt; raises InstabilityError once fields leave the admissible range."""
  p, cfg = state.p, state.cfg
  dt = cfg.dt
  half = state.t + dt / 2.0
  full = state.t + dt
  a1, a2 = (p.a1, p.a2) if cfg.coupling else (0.0, 0.0)

  vx, vy, ux, uy = state.vx.copy(), state.vy.copy(), state.ux.copy(), state.uy.copy()
  _kick(state, vx, vy, state.dP, dt / 2.0 * p.b / p.I0, half)
  _kick(state, ux, uy, state.dI, dt / 2.0 * p.d / p.P0, half)

  dI = state.dI + dt * (-p.I0 * _divergence(state, vx, vy) + a1 * _center_average(uy))
  dP = state.dP + dt * (-p.P0 * _divergence(state, ux, uy) + a2 * _center_average(vy))

  _kick(state, vx, vy, dP, dt / 2.0 * p.b / p.I0, full)
  _kick(state, ux, uy, dI, dt / 2.0 * p.d / p.P0, full)

  advanced = replace(state, t=full, n=state.n + 1, dI=dI, dP=dP, vx=vx, vy=vy, ux=ux, uy=uy)
  _check_stable(advanced)
  return advanced


def _check_stable(state: SimState) -> None:
  limit = INSTABILITY_FACTOR * state.scale
  for name, values in zip(FIELD_NAMES, state.fields(), strict=True):
    if not np.all(np.isfinite(values)) or float(np.max(np.abs(values))) > limit:
      logger.error("simulation unstable at step %d (t=%g): %s left the admissible range", state.n, state.t, name)
      msg = f"field {name} exceeded {limit:.3e} or became non-finite at step {state.n}, t={state.t!r}"
      raise InstabilityError(msg)


def _probe_index(state: SimState, x: float, y: float) -> tuple[int, int]:
  p, cfg = state.p, state.cfg
  if not (0 <= x <= p.X and 0 <= y <= p.Y):
    msg = f"probe ({x}, {y}) lies outside [0, {p.X}] x [0, {p.Y}]"
    raise ProbeOutOfDomainError(msg)
  return min(int(x / state.dx), cfg.nx - 1), min(int(y / state.dy), cfg.ny - 1)


def sample_probe(state: SimState, x: float, y: float) -> NDArray[np.float64]:
  """(dI, dP, vx, vy, ux, uy) in the cell holding (x, y); velocities averaged to the cell center."""
  i, j = _probe_index(state, x, y)
  return np.array(
    [
      state.dI[i, j],
      state.dP[i, j],
      0.5 * (state.vx[i, j] + state.vx[i + 1, j]),
      0.5 * (state.vy[i, j] + state.vy[i, j + 1]),
      0.5 * (state.ux[i, j] + state.ux[i + 1, j]),
      0.5 * (state.uy[i, j] + state.uy[i, j + 1]),
    ],
  )


def border_integral(state: SimState) -> float:
  """Discrete x-integral of dI along the top cell row."""
  return float(np.sum(state.dI[:, -1]) * state.dx)


def run_and_probe(state: SimState, probes: Sequence[tuple[float, float]], cadence: int = 1) -> tuple[ProbeRecord, SimState]:
  """Step to the configured horizon, sampling each probe every `cadence` steps (step 0 included)."""
  if cadence < 1:
    msg = f"cadence must be at least 1, got {cadence}"
    raise ValueError(msg)
  for x, y in probes:
    _probe_index(state, x, y)

  times: list[float] = []
  samples: list[list[NDArray[np.float64]]] = [[] for _ in probes]
  integral: list[float] = []

  def record(current: SimState) -> None:
    times.append(current.t)
    integral.append(border_integral(current))
    for target, (x, y) in zip(samples, probes, strict=True):
      target.append(sample_probe(current, x, y))

  record(state)
  for _ in range(state.cfg.steps):
    state = step(state)
    if state.n % cadence == 0:
      record(state)

  series = tuple(np.array(rows) if rows else np.empty((0, 6)) for rows in samples)
  return ProbeRecord(times=np.array(times), probes=tuple(probes), series=series, border_integral=np.array(integral)), state


def cross_energy(state: SimState) -> float:
  """Quadratic invariant of the uncoupled system: sum of (|d| dI² - b dP²) / (P0 I0) + 2 v.u, cell-area weighted.

  The bulk system mixes a positive and a negative stiffness, so this form is indefinite.
  """
  p = state.p
  area = state.dx * state.dy
  scalars = np.sum(abs(p.d) * state.dI**2 - p.b * state.dP**2) / (p.P0 * p.I0)
  vx, ux = state.vx, state.ux
  if state.cfg.lateral is LateralBoundary.PERIODIC:
    vx, ux = vx[:-1, :], ux[:-1, :]
  cross = np.sum(vx * ux) + np.sum(state.vy * state.uy)
  return float(area * (scalars + 2.0 * cross))


def l2_error(state: SimState, mode: WaveMode, amplitude: float) -> float:
  """Root-mean-square deviation of dI and dP from the exact mode at the state's time."""
  exact = exact_mode_fields(mode, state.p, amplitude, state.cfg.nx, state.cfg.ny, state.t)
  diff = np.concatenate([(state.dI - exact[0]).ravel(), (state.dP - exact[1]).ravel()])
  return float(np.sqrt(np.mean(diff**2)))
