"""Parameter validation and steady-state Investment/Profits distributions on the macro rectangle."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, overload

import numpy as np

from riskwave.errors import InvalidParamsError, InvalidSignsError, OutOfDomainError
from riskwave.models import ModelParams, SteadyPoint, ValidationReport, Violation

if TYPE_CHECKING:
  from numpy.typing import NDArray

logger = logging.getLogger(__name__)

IDENTITY_RTOL = 1e-9
SUPPORTED_RISKS = 2

INCOMPRESSIBLE_SIGNS_ERROR = "incompressible amplitudes need a1 > 0, a2 < 0, b > 0, d < 0 and g_y > 0"
AMPLITUDE_SIGNS_ERROR = "amplitudes I0 and P0 must be positive"

# Positivity of h and g is read from "risks increase Profits"; the sign is not stated outright.
MONOTONICITY_NOTE = "inferred from the monotonic steady state (more risks, more Profits)"


def _check(violations: list[Violation], holds: bool, constraint: str, detail: str, *keys: str) -> None:
  if not holds:
    violations.append(Violation(constraint=constraint, detail=detail, keys=keys))


def validate_params(p: ModelParams) -> ValidationReport:
  """Check every sign and consistency constraint; violations are reported, never raised."""
  violations: list[Violation] = []

  _check(violations, p.n_risks == SUPPORTED_RISKS, "n = 2", f"n={p.n_risks}; only two risk axes are modelled", "n_risks")
  _check(violations, p.a1 > 0, "a1 > 0", f"a1={p.a1!r}", "a1")
  _check(violations, p.a2 < 0, "a2 < 0", f"a2={p.a2!r}", "a2")
  _check(violations, p.b > 0, "b > 0", f"b={p.b!r}", "b")
  _check(violations, p.d < 0, "d < 0", f"d={p.d!r}", "d")
  for name in ("g_x", "g_y", "h_x", "h_y"):
    value = getattr(p, name)
    _check(violations, value > 0, f"{name} > 0", f"{name}={value!r}; {MONOTONICITY_NOTE}", name)
  for name in ("I0", "P0", "X", "Y"):
    value = getattr(p, name)
    _check(violations, value > 0, f"{name} > 0", f"{name}={value!r}", name)

  lhs = p.I0**2 * p.h_y
  rhs = p.P0**2 * p.g_y
  _check(
    violations,
    math.isclose(lhs, rhs, rel_tol=IDENTITY_RTOL, abs_tol=0.0),
    "I0²h_y = P0²g_y",
    f"{lhs!r} != {rhs!r}",
    "I0",
    "P0",
    "h_y",
    "g_y",
  )

  tilt = p.g_x * p.X + p.g_y * p.Y
  _check(violations, p.b > tilt, "b > g_x·X + g_y·Y", f"b={p.b!r}, g_x·X + g_y·Y={tilt!r}", "b", "g_x", "g_y", "X", "Y")

  report = ValidationReport(violations=tuple(violations))
  if not report.ok:
    logger.info("parameter validation found %d violation(s): %s", len(violations), ", ".join(report.names()))
  return report


def require_valid(p: ModelParams) -> None:
  """Raise InvalidParamsError unless every constraint holds."""
  report = validate_params(p)
  if not report.ok:
    raise InvalidParamsError(report)


def derive_g_y(I0: float, P0: float, h_y: float) -> float:
  """g_y completing I0²h_y = P0²g_y."""
  if I0 <= 0 or P0 <= 0:
    raise InvalidSignsError(AMPLITUDE_SIGNS_ERROR)
  return I0**2 * h_y / P0**2


def derive_h_y(I0: float, P0: float, g_y: float) -> float:
  """h_y completing I0²h_y = P0²g_y."""
  if I0 <= 0 or P0 <= 0:
    raise InvalidSignsError(AMPLITUDE_SIGNS_ERROR)
  return P0**2 * g_y / I0**2


def incompressible_amplitudes(a1: float, a2: float, b: float, d: float, g_y: float) -> tuple[float, float]:
  """Corner amplitudes (I0, P0) forced by divergence-free velocities."""
  if not (a1 > 0 and a2 < 0 and b > 0 and d < 0 and g_y > 0):
    raise InvalidSignsError(INCOMPRESSIBLE_SIGNS_ERROR)
  a2b = a2 * b
  P0 = -a2b / g_y
  I0 = -(a2b**2) / (a1 * d * g_y)
  return I0, P0


def _inside(p: ModelParams, x: NDArray[np.float64], y: NDArray[np.float64]) -> bool:
  return bool(np.all((x >= 0) & (x <= p.X) & (y >= 0) & (y <= p.Y)))


@overload
def steady_fields(p: ModelParams, x: float, y: float) -> tuple[float, float]: ...


@overload
def steady_fields(p: ModelParams, x: NDArray[np.float64], y: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]: ...


def steady_fields(p: ModelParams, x: float | NDArray[np.float64], y: float | NDArray[np.float64]) -> tuple[float, float] | tuple[NDArray[np.float64], NDArray[np.float64]]:
  """Linear steady Investment and Profits; I(X, Y) = I0 and P(X, Y) = P0."""
  xa = np.asarray(x, dtype=np.float64)
  ya = np.asarray(y, dtype=np.float64)
  if not _inside(p, xa, ya):
    msg = f"point(s) outside [0, {p.X}] x [0, {p.Y}]"
    raise OutOfDomainError(msg)

  dx = xa - p.X
  dy = ya - p.Y
  I = p.I0 * (1.0 + (p.h_x * dx + p.h_y * dy) / p.d)  # noqa: E741
  P = p.P0 * (1.0 + (p.g_x * dx + p.g_y * dy) / p.b)
  if np.ndim(I) == 0:
    return float(I), float(P)
  return I, P


def steady_gradients(p: ModelParams) -> tuple[tuple[float, float], tuple[float, float]]:
  """Constant gradients ((dI/dx, dI/dy), (dP/dx, dP/dy)) of the steady distributions."""
  return (p.I0 * p.h_x / p.d, p.I0 * p.h_y / p.d), (p.P0 * p.g_x / p.b, p.P0 * p.g_y / p.b)


def steady_grid(p: ModelParams, nx: int, ny: int) -> list[SteadyPoint]:
  """Steady distribution sampled on an nx by ny lattice of nodes spanning the rectangle, x fastest."""
  xs = np.linspace(0.0, p.X, nx)
  ys = np.linspace(0.0, p.Y, ny)
  gx, gy = np.meshgrid(xs, ys, indexing="xy")
  I, P = steady_fields(p, gx, gy)  # noqa: E741
  return [
    SteadyPoint(x=float(gx[j, i]), y=float(gy[j, i]), I=float(I[j, i]), P=float(P[j, i])) for j in range(ny) for i in range(nx)
  ]


def corner_values(p: ModelParams) -> tuple[float, float, float, float]:
  """Steady (I, P) at the most secure corner (0, 0) followed by the most risky corner (X, Y)."""
  require_valid(p)
  I_secure = p.I0 * (1.0 - (p.h_x * p.X + p.h_y * p.Y) / p.d)
  P_secure = p.P0 * (1.0 - (p.g_x * p.X + p.g_y * p.Y) / p.b)
  return I_secure, P_secure, p.I0, p.P0


def sample_valid_params(rng: np.random.Generator) -> ModelParams:
  """Draw an admissible parameter set; h_y is completed from the I0²h_y = P0²g_y identity."""
  I0 = float(rng.uniform(0.5, 2.0))
  P0 = float(rng.uniform(0.5, 2.0))
  g_y = float(rng.uniform(0.1, 1.0))
  return ModelParams(
    a1=float(rng.uniform(0.1, 2.0)),
    a2=float(rng.uniform(-2.0, -0.1)),
    b=float(rng.uniform(1.5, 3.0)),
    d=float(rng.uniform(-2.0, -0.1)),
    g_x=float(rng.uniform(0.1, 1.0)),
    g_y=g_y,
    h_x=float(rng.uniform(0.1, 1.0)),
    h_y=derive_h_y(I0, P0, g_y),
    I0=I0,
    P0=P0,
    X=float(rng.uniform(0.1, 0.5)),
    Y=float(rng.uniform(0.1, 0.5)),
  )
