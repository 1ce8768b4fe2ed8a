"""Aggregation of e-particles into density, impulse and velocity fields."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from riskwave.errors import BadGridError, IncompatibleGridsError, ParticleOutOfDomainError
from riskwave.models import Deposition, EParticle

if TYPE_CHECKING:
  from collections.abc import Sequence

  from numpy.typing import NDArray

logger = logging.getLogger(__name__)

DEFAULT_FLOOR_FRACTION = 1e-12
INCOMPATIBLE_GRIDS_ERROR = "density and impulse grids differ in shape or spacing"
EMPTY_ENSEMBLE_ERROR = "ensemble needs at least one particle and one extensive variable"


@dataclass(frozen=True)
class GridSpec:
  """Uniform cell layout over [0, X] x [0, Y]."""

  nx: int
  ny: int
  X: float
  Y: float

  def __post_init__(self) -> None:
    if self.nx < 1 or self.ny < 1 or self.X <= 0 or self.Y <= 0:
      msg = f"grid needs positive cell counts and extents, got nx={self.nx}, ny={self.ny}, X={self.X}, Y={self.Y}"
      raise BadGridError(msg)

  @property
  def dx(self) -> float:
    return self.X / self.nx

  @property
  def dy(self) -> float:
    return self.Y / self.ny

  def centers(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Cell-center coordinates along x and y."""
    return (np.arange(self.nx) + 0.5) * self.dx, (np.arange(self.ny) + 0.5) * self.dy


@dataclass(frozen=True)
class FieldGrid:
  """Per-cell scalars (nx, ny) or 2-vectors (nx, ny, 2); `empty` marks cells with undefined values."""

  spec: GridSpec
  values: NDArray[np.float64]
  empty: NDArray[np.bool_] | None = None

  @property
  def nx(self) -> int:
    return self.spec.nx

  @property
  def ny(self) -> int:
    return self.spec.ny

  @property
  def dx(self) -> float:
    return self.spec.dx

  @property
  def dy(self) -> float:
    return self.spec.dy

  def total(self) -> NDArray[np.float64]:
    """Sum over all defined cells."""
    values = self.values if self.empty is None else self.values[~self.empty]
    return np.asarray(values.reshape(-1, *self.values.shape[2:]).sum(axis=0))

  def __add__(self, other: FieldGrid) -> FieldGrid:
    _require_congruent(self, other)
    return FieldGrid(spec=self.spec, values=self.values + other.values)


@dataclass(frozen=True)
class ParticleEnsemble:
  """Columnar e-particle storage: positions (N, 2), velocities (N, 2), extensive values (N, l)."""

  positions: NDArray[np.float64]
  velocities: NDArray[np.float64]
  values: NDArray[np.float64]

  def __post_init__(self) -> None:
    n = self.positions.shape[0]
    if self.positions.shape != (n, 2) or self.velocities.shape != (n, 2) or self.values.ndim != 2 or self.values.shape[0] != n:
      msg = "positions, velocities and values must share the particle count"
      raise ValueError(msg)
    if self.values.shape[1] < 1:
      raise ValueError(EMPTY_ENSEMBLE_ERROR)

  def __len__(self) -> int:
    return int(self.positions.shape[0])

  @property
  def n_variables(self) -> int:
    return int(self.values.shape[1])

  @classmethod
  def from_particles(cls, particles: Sequence[EParticle]) -> ParticleEnsemble:
    if not particles:
      raise ValueError(EMPTY_ENSEMBLE_ERROR)
    widths = {len(particle.extensive_values) for particle in particles}
    if len(widths) != 1:
      msg = f"particles carry different numbers of extensive variables: {sorted(widths)}"
      raise ValueError(msg)
    return cls(
      positions=np.array([particle.position for particle in particles], dtype=np.float64),
      velocities=np.array([particle.velocity for particle in particles], dtype=np.float64),
      values=np.array([particle.extensive_values for particle in particles], dtype=np.float64),
    )

  def union(self, other: ParticleEnsemble) -> ParticleEnsemble:
    return ParticleEnsemble(
      positions=np.concatenate([self.positions, other.positions]),
      velocities=np.concatenate([self.velocities, other.velocities]),
      values=np.concatenate([self.values, other.values]),
    )


def particle_impulses(particle: EParticle) -> list[tuple[float, float]]:
  """Financial impulse u_j * v of every extensive variable carried by one particle."""
  vx, vy = particle.velocity
  return [(u * vx, u * vy) for u in particle.extensive_values]


def _require_congruent(a: FieldGrid, b: FieldGrid) -> None:
  if a.spec != b.spec or a.values.shape[:2] != b.values.shape[:2]:
    raise IncompatibleGridsError(INCOMPATIBLE_GRIDS_ERROR)


def _check_inside(ensemble: ParticleEnsemble, grid: GridSpec) -> None:
  x = ensemble.positions[:, 0]
  y = ensemble.positions[:, 1]
  outside = ~((x >= 0) & (x <= grid.X) & (y >= 0) & (y <= grid.Y))
  if np.any(outside):
    first = int(np.argmax(outside))
    msg = f"particle {first} at ({x[first]}, {y[first]}) lies outside [0, {grid.X}] x [0, {grid.Y}]; {int(outside.sum())} in total"
    raise ParticleOutOfDomainError(msg)


def _nearest_weights(coord: NDArray[np.float64], spacing: float, n: int) -> list[tuple[NDArray[np.intp], NDArray[np.float64]]]:
  index = np.clip(np.floor(coord / spacing).astype(np.intp), 0, n - 1)
  return [(index, np.ones_like(coord))]


def _linear_weights(coord: NDArray[np.float64], spacing: float, n: int) -> list[tuple[NDArray[np.intp], NDArray[np.float64]]]:
  # Weight outside the first/last center folds back onto the edge cell, so totals are kept.
  position = coord / spacing - 0.5
  lower = np.floor(position)
  upper_weight = position - lower
  lower_index = lower.astype(np.intp)
  return [
    (np.clip(lower_index, 0, n - 1), 1.0 - upper_weight),
    (np.clip(lower_index + 1, 0, n - 1), upper_weight),
  ]


def deposit_fields(
  ensemble: ParticleEnsemble,
  grid: GridSpec,
  variable: int,
  deposition: Deposition = Deposition.NEAREST_CELL,
) -> tuple[FieldGrid, FieldGrid]:
  """Deposit density u_j and impulse u_j * v of variable j (0-based) onto the grid cells."""
  if not 0 <= variable < ensemble.n_variables:
    msg = f"variable index {variable} outside 0..{ensemble.n_variables - 1}"
    raise IndexError(msg)
  _check_inside(ensemble, grid)

  weights = _nearest_weights if deposition is Deposition.NEAREST_CELL else _linear_weights
  x_parts = weights(ensemble.positions[:, 0], grid.dx, grid.nx)
  y_parts = weights(ensemble.positions[:, 1], grid.dy, grid.ny)

  u = ensemble.values[:, variable]
  impulse = u[:, None] * ensemble.velocities

  density = np.zeros((grid.nx, grid.ny))
  momentum = np.zeros((grid.nx, grid.ny, 2))
  # np.add.at accumulates in particle order; repeated runs agree bit for bit.
  for ix, wx in x_parts:
    for iy, wy in y_parts:
      w = wx * wy
      np.add.at(density, (ix, iy), w * u)
      np.add.at(momentum, (ix, iy), w[:, None] * impulse)

  logger.debug("deposited %d particles of variable %d with %s kernel", len(ensemble), variable, deposition.value)
  return FieldGrid(spec=grid, values=density), FieldGrid(spec=grid, values=momentum)


def field_velocity(density: FieldGrid, impulse: FieldGrid, floor: float | None = None) -> FieldGrid:
  """Velocity = impulse / density where density >= floor; other cells are marked empty with NaN values."""
  _require_congruent(density, impulse)
  if impulse.values.shape != (*density.values.shape, 2):
    raise IncompatibleGridsError(INCOMPATIBLE_GRIDS_ERROR)

  if floor is None:
    mean = float(np.mean(np.abs(density.values)))
    floor = DEFAULT_FLOOR_FRACTION * mean if mean > 0 else DEFAULT_FLOOR_FRACTION

  empty = ~(density.values >= floor)
  velocity = np.full(impulse.values.shape, np.nan)
  filled = ~empty
  velocity[filled] = impulse.values[filled] / density.values[filled][:, None]
  return FieldGrid(spec=density.spec, values=velocity, empty=empty)
