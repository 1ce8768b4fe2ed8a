"""Domain models for the riskwave application."""

from __future__ import annotations

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, FiniteFloat


class Regime(StrEnum):
  """Root pattern of the quartic characteristic polynomial."""

  ALL_REAL = "AllReal"
  TWO_REAL_TWO_COMPLEX = "TwoRealTwoComplex"
  ALL_COMPLEX = "AllComplex"


class WeightPolicy(StrEnum):
  """How the two weight constraints pick one of infinitely many profiles."""

  MINIMAL_NORM = "minimal-norm"
  PIN_SECONDARY_ZERO = "pin-zero"


class ModeKind(StrEnum):
  """Single-exponential mode or a mode built from quartic roots."""

  SIMPLEST = "simplest"
  QUARTIC = "quartic"


class Deposition(StrEnum):
  """Particle-to-grid kernel."""

  NEAREST_CELL = "nearest-cell"
  BILINEAR = "bilinear"


class LateralBoundary(StrEnum):
  """Simulator condition on the x=0 and x=X edges."""

  PERIODIC = "periodic"
  ZERO_NORMAL = "zero-normal"


class InitialCondition(StrEnum):
  """Simulator starting state."""

  ZERO = "zero"
  ANALYTIC = "analytic"


class ModelParams(BaseModel):
  """Coupling coefficients, financial accelerations, corner amplitudes and domain extents."""

  model_config = ConfigDict(frozen=True)

  a1: FiniteFloat
  a2: FiniteFloat
  b: FiniteFloat
  d: FiniteFloat
  g_x: FiniteFloat
  g_y: FiniteFloat
  h_x: FiniteFloat
  h_y: FiniteFloat
  I0: FiniteFloat
  P0: FiniteFloat
  X: FiniteFloat
  Y: FiniteFloat
  n_risks: int = 2

  @classmethod
  def unit(cls, X: float = 0.25, Y: float = 0.25) -> ModelParams:
    """Unit couplings, accelerations and amplitudes on an X by Y rectangle."""
    return cls(a1=1.0, a2=-1.0, b=1.0, d=-1.0, g_x=1.0, g_y=1.0, h_x=1.0, h_y=1.0, I0=1.0, P0=1.0, X=X, Y=Y)


class Violation(BaseModel):
  """One broken parameter constraint."""

  model_config = ConfigDict(frozen=True)

  constraint: str
  detail: str
  keys: tuple[str, ...] = ()


class ValidationReport(BaseModel):
  """Outcome of checking a parameter set; empty violations means ok."""

  model_config = ConfigDict(frozen=True)

  violations: tuple[Violation, ...] = ()

  @property
  def ok(self) -> bool:
    return not self.violations

  def names(self) -> list[str]:
    """Constraint labels of every violation, in check order."""
    return [v.constraint for v in self.violations]


class SteadyPoint(BaseModel):
  """Steady Investment and Profits densities at one risk coordinate."""

  model_config = ConfigDict(frozen=True)

  x: float
  y: float
  I: float  # noqa: E741
  P: float


class EParticle(BaseModel):
  """An economic agent on the risk plane with its additive financial variables."""

  model_config = ConfigDict(frozen=True)

  position: tuple[FiniteFloat, FiniteFloat]
  velocity: tuple[FiniteFloat, FiniteFloat]
  extensive_values: tuple[FiniteFloat, ...] = Field(min_length=1)
