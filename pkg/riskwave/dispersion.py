"""Mode analysis of surface-like waves on the y = Y border.

Two regimes are covered. With divergence-free velocities the potentials are harmonic and the
dispersion relation is explicit. Without that approximation the depth profile f(y - Y) solves a
fourth-order ODE whose characteristic quartic has q3 = 0; its roots decide whether the profile
decays or grows inward.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

import numpy as np

from riskwave.core import incompressible_amplitudes, require_valid, sample_valid_params
from riskwave.errors import (
  AmplitudeMismatchError,
  DegenerateLeadingCoefficientError,
  InfeasibleConstraintsError,
  NonPositiveWavenumberError,
)
from riskwave.models import ModelParams, Regime, WeightPolicy

if TYPE_CHECKING:
  from collections.abc import Iterable, Sequence

  from numpy.typing import NDArray

logger = logging.getLogger(__name__)

AMPLITUDE_RTOL = 1e-9
DEFAULT_REAL_TOL = 1e-9
CLUSTER_RTOL = 1e-6
CONSTRAINT_TOL = 1e-9
POLISH_STEPS = 2
NEAR_DEGENERATE_FACTOR = 1e3
WEIGHT_EPS = 1e-14

NONPOSITIVE_K_ERROR = "wavenumber k must be positive"
NEGATIVE_OMEGA_ERROR = "frequency omega must be non-negative"
NONPOSITIVE_OMEGA_ERROR = "frequency omega must be positive for a surface mode"
DEGENERATE_QUARTIC_ERROR = "quartic leading coefficient q4 is zero"
UNPAIRED_ROOTS_ERROR = "complex roots must come in conjugate pairs"

ComponentKind = Literal["exp", "cos", "sin"]


@dataclass(frozen=True)
class IncompressibleMode:
  """Harmonic surface mode of divergence-free financial fluids."""

  k: float
  omega: float
  c: float
  kappa: float

  @property
  def wavelength(self) -> float:
    return 2.0 * math.pi / self.k


@dataclass(frozen=True)
class QuarticCoeffs:
  """q4 s^4 + q3 s^3 + q2 s^2 + q1 s + q0."""

  q4: float
  q3: float
  q2: float
  q1: float
  q0: float

  def as_array(self) -> NDArray[np.float64]:
    """Coefficients, highest power first."""
    return np.array([self.q4, self.q3, self.q2, self.q1, self.q0])

  @property
  def scale(self) -> float:
    return float(np.max(np.abs(self.as_array())))

  @property
  def sign_pattern_ok(self) -> bool:
    """q4 > 0, q1 <= 0 (strict once omega > 0), q0 > 0."""
    return self.q4 > 0 and self.q1 <= 0 and self.q0 > 0

  def evaluate(self, s: complex) -> complex:
    return (((self.q4 * s + self.q3) * s + self.q2) * s + self.q1) * s + self.q0

  def slope(self, s: complex) -> complex:
    return ((4.0 * self.q4 * s + 3.0 * self.q3) * s + 2.0 * self.q2) * s + self.q1


@dataclass(frozen=True)
class ProfileComponent:
  """One real basis function of the depth profile: e^{rate*eta}, optionally times cos or sin(theta*eta)."""

  kind: ComponentKind
  rate: float
  theta: float = 0.0

  @property
  def root(self) -> complex:
    return complex(self.rate, self.theta)

  @property
  def value_at_border(self) -> float:
    return 0.0 if self.kind == "sin" else 1.0

  @property
  def slope_at_border(self) -> float:
    return self.theta if self.kind == "sin" else self.rate

  def value(self, eta: NDArray[np.float64] | float) -> NDArray[np.float64]:
    envelope = np.exp(self.rate * np.asarray(eta, dtype=np.float64))
    if self.kind == "exp":
      return envelope
    phase = self.theta * np.asarray(eta, dtype=np.float64)
    return envelope * (np.cos(phase) if self.kind == "cos" else np.sin(phase))

  def slope(self, eta: NDArray[np.float64] | float) -> NDArray[np.float64]:
    eta = np.asarray(eta, dtype=np.float64)
    envelope = np.exp(self.rate * eta)
    if self.kind == "exp":
      return self.rate * envelope
    phase = self.theta * eta
    if self.kind == "cos":
      return envelope * (self.rate * np.cos(phase) - self.theta * np.sin(phase))
    return envelope * (self.rate * np.sin(phase) + self.theta * np.cos(phase))


@dataclass(frozen=True)
class ProfileSolution:
  """Regime, basis components and weights that satisfy f(0) = 1 and f'(0) = target slope."""

  regime: Regime
  components: tuple[ProfileComponent, ...]
  weights: tuple[float, ...]
  policy: WeightPolicy | None
  target_slope: float
  near_degenerate: bool = False
  repeated_roots: bool = False


@dataclass(frozen=True)
class WaveMode:
  """A single (omega, k) surface mode with its depth profile."""

  omega: float
  k: float
  roots: tuple[complex, ...]
  components: tuple[ProfileComponent, ...]
  weights: tuple[float, ...]
  target_slope: float
  regime: Regime | None = None
  policy: WeightPolicy | None = None
  amplitude: float = 1.0
  near_degenerate: bool = False
  repeated_roots: bool = False
  quartic_residual: float | None = None

  @property
  def period(self) -> float:
    return 2.0 * math.pi / self.omega

  @property
  def is_simplest(self) -> bool:
    """Exactly one weighted component, a pure exponential with a positive root."""
    active = [(c, w) for c, w in zip(self.components, self.weights, strict=True) if abs(w) > WEIGHT_EPS]
    return len(active) == 1 and active[0][0].kind == "exp" and active[0][0].rate > 0

  def border_constraints(self) -> tuple[float, float]:
    """(f(0), f'(0)) implied by the weights."""
    value = sum(w * c.value_at_border for c, w in zip(self.components, self.weights, strict=True))
    slope = sum(w * c.slope_at_border for c, w in zip(self.components, self.weights, strict=True))
    return value, slope


@dataclass(frozen=True)
class ComponentGrowth:
  index: int
  kind: ComponentKind
  rate: float
  weight: float
  grows_inward: bool

  @property
  def e_folding_rate(self) -> float:
    """Amplitude change per unit risk depth, |Re s|."""
    return abs(self.rate)


@dataclass(frozen=True)
class GrowthReport:
  components: tuple[ComponentGrowth, ...]

  @property
  def amplifying(self) -> bool:
    return any(c.grows_inward for c in self.components)

  @property
  def max_inward_rate(self) -> float:
    return max((c.e_folding_rate for c in self.components if c.grows_inward), default=0.0)


@dataclass(frozen=True)
class SignSweepReport:
  draws: int
  two_real_two_complex: int
  counterexamples: tuple[str, ...]
  max_residual: float
  max_vieta_sum: float


def target_slope(omega: float, I0: float, P0: float, g_y: float) -> float:
  """Border slope f'(0) = omega^2 I0 / (g_y P0) imposed by the kinematic condition."""
  return omega**2 * I0 / (g_y * P0)


def incompressible_mode(p: ModelParams, k: float) -> IncompressibleMode:
  """Dispersion, group velocity and inward decay of the divergence-free mode."""
  if not k > 0:
    raise NonPositiveWavenumberError(NONPOSITIVE_K_ERROR)
  I0, P0 = incompressible_amplitudes(p.a1, p.a2, p.b, p.d, p.g_y)
  if not (math.isclose(p.I0, I0, rel_tol=AMPLITUDE_RTOL) and math.isclose(p.P0, P0, rel_tol=AMPLITUDE_RTOL)):
    msg = f"incompressible regime needs I0={I0!r}, P0={P0!r}; got I0={p.I0!r}, P0={p.P0!r}"
    raise AmplitudeMismatchError(msg)

  omega_sq = (p.a1 * p.d) / (p.a2 * p.b) * p.g_y * k
  omega = math.sqrt(omega_sq)
  return IncompressibleMode(k=k, omega=omega, c=omega / (2.0 * k), kappa=-p.P0 * omega_sq / (p.a1 * p.d))


def _coefficients(p: ModelParams, omega: float, k: float) -> QuarticCoeffs:
  bd = p.b * p.d
  return QuarticCoeffs(
    q4=-bd * p.P0 * p.I0,
    q3=0.0,
    q2=p.a1 * p.a2 * bd + 2.0 * k**2 * bd * p.P0 * p.I0,
    q1=omega**2 * (p.P0 * p.a2 * p.b + p.I0 * p.a1 * p.d),
    q0=p.I0 * p.P0 * omega**4 - bd * p.P0 * p.I0 * k**4,
  )


def quartic_coefficients(p: ModelParams, omega: float, k: float) -> QuarticCoeffs:
  """Characteristic polynomial of the compressible profile equation."""
  require_valid(p)
  if omega < 0:
    raise ValueError(NEGATIVE_OMEGA_ERROR)
  if not k > 0:
    raise NonPositiveWavenumberError(NONPOSITIVE_K_ERROR)
  coeffs = _coefficients(p, omega, k)
  if not coeffs.sign_pattern_ok or (omega > 0 and not coeffs.q1 < 0):
    logger.warning("quartic sign pattern q4>0, q1<0, q0>0 broken: %s", coeffs)
  return coeffs


def _quadratic(b: complex, c: complex) -> tuple[complex, complex]:
  """Roots of z^2 + b z + c without cancellation."""
  disc = cmath.sqrt(b * b - 4.0 * c)
  head = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
  if head == 0:
    return 0j, 0j
  first = -0.5 * head
  return first, c / first


def _cubic(a: float, b: float, c: float) -> list[complex]:
  """Roots of t^3 + a t^2 + b t + c by Cardano in complex arithmetic."""
  shift = a / 3.0
  p = b - a * a / 3.0
  q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
  if p == 0 and q == 0:
    return [complex(-shift)] * 3
  disc = cmath.sqrt((q / 2.0) ** 2 + (p / 3.0) ** 3)
  w = -q / 2.0 + disc if abs(-q / 2.0 + disc) >= abs(-q / 2.0 - disc) else -q / 2.0 - disc
  u = w ** (1.0 / 3.0)
  turn = cmath.exp(2j * math.pi / 3.0)
  roots = []
  for j in range(3):
    uj = u * turn**j
    roots.append(uj - p / (3.0 * uj) - shift)
  return roots


def _ferrari(q: QuarticCoeffs) -> list[complex]:
  a = q.q3 / q.q4
  b = q.q2 / q.q4
  c = q.q1 / q.q4
  d = q.q0 / q.q4

  shift = a / 4.0
  p = b - 3.0 * a * a / 8.0
  qq = c - a * b / 2.0 + a**3 / 8.0
  r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a**4 / 256.0

  if qq == 0:
    z1, z2 = _quadratic(p, r)
    ys = [cmath.sqrt(z1), -cmath.sqrt(z1), cmath.sqrt(z2), -cmath.sqrt(z2)]
  else:
    m = max(_cubic(p, p * p / 4.0 - r, -qq * qq / 8.0), key=abs)
    s = cmath.sqrt(2.0 * m)
    t = qq / (2.0 * s)
    ys = [*_quadratic(-s, p / 2.0 + m + t), *_quadratic(s, p / 2.0 + m - t)]
  return [y - shift for y in ys]


def _polish(q: QuarticCoeffs, root: complex) -> complex:
  for _ in range(POLISH_STEPS):
    value = q.evaluate(root)
    slope = q.slope(root)
    if value == 0 or slope == 0:
      break
    candidate = root - value / slope
    if abs(q.evaluate(candidate)) >= abs(value):
      break
    root = candidate
  return root


def _pair_conjugates(roots: list[complex]) -> list[complex]:
  pending = list(roots)
  paired: list[complex] = []
  while pending:
    s = pending.pop(0)
    if not pending:
      paired.append(complex(s.real, 0.0))
      break
    j = min(range(len(pending)), key=lambda i: abs(pending[i] - s.conjugate()))
    if 2.0 * abs(s.imag) <= abs(pending[j] - s.conjugate()):
      paired.append(complex(s.real, 0.0))
      continue
    partner = pending.pop(j)
    mean = (s + partner.conjugate()) / 2.0
    paired.extend([mean, mean.conjugate()])
  return paired


def _merge_clusters(roots: list[complex]) -> list[complex]:
  groups: list[list[int]] = []
  for i, s in enumerate(roots):
    for group in groups:
      lead = roots[group[0]]
      if abs(s - lead) <= CLUSTER_RTOL * (1.0 + abs(lead)):
        group.append(i)
        break
    else:
      groups.append([i])
  merged = list(roots)
  for group in groups:
    if len(group) > 1:
      mean = sum(roots[i] for i in group) / len(group)
      for i in group:
        merged[i] = mean
  return merged


def solve_quartic(q: QuarticCoeffs) -> NDArray[np.complex128]:
  """Four roots sorted by (real, imaginary) part; Ferrari followed by Newton polishing."""
  if q.q4 == 0:
    raise DegenerateLeadingCoefficientError(DEGENERATE_QUARTIC_ERROR)
  roots = [_polish(q, s) for s in _ferrari(q)]
  roots = _merge_clusters(_pair_conjugates(roots))
  roots.sort(key=lambda s: (s.real, s.imag))
  return np.array(roots, dtype=np.complex128)


def _is_real(s: complex, tol: float) -> bool:
  return abs(s.imag) <= tol * (1.0 + abs(s))


def classify_regime(roots: Sequence[complex], tol: float = DEFAULT_REAL_TOL) -> Regime:
  """Exhaustive and exclusive: the number of real roots is 4, 2 or 0."""
  n_real = sum(_is_real(complex(s), tol) for s in roots)
  if n_real == len(roots):
    return Regime.ALL_REAL
  if n_real == 0:
    return Regime.ALL_COMPLEX
  if n_real == 2:
    return Regime.TWO_REAL_TWO_COMPLEX
  msg = f"{n_real} real roots among {len(roots)}; {UNPAIRED_ROOTS_ERROR}"
  raise ValueError(msg)


def _upper_half(roots: list[complex], expected: int) -> list[complex]:
  upper = sorted((s for s in roots if s.imag > 0), key=lambda s: (-s.real, s.imag))
  if len(upper) != expected:
    raise ValueError(UNPAIRED_ROOTS_ERROR)
  return upper


def profile_components(roots: Sequence[complex], tol: float = DEFAULT_REAL_TOL) -> tuple[Regime, tuple[ProfileComponent, ...]]:
  """Real basis functions for the regime's profile family, in weight order."""
  values = [complex(s) for s in roots]
  regime = classify_regime(values, tol)
  real = sorted(s.real for s in values if _is_real(s, tol))
  complex_roots = [s for s in values if not _is_real(s, tol)]

  if regime is Regime.ALL_REAL:
    return regime, tuple(ProfileComponent("exp", s) for s in real)
  if regime is Regime.TWO_REAL_TWO_COMPLEX:
    (pair,) = _upper_half(complex_roots, 1)
    return regime, (
      ProfileComponent("exp", real[0]),
      ProfileComponent("exp", real[1]),
      ProfileComponent("cos", pair.real, pair.imag),
      ProfileComponent("sin", pair.real, pair.imag),
    )
  first, second = _upper_half(complex_roots, 2)
  return regime, (
    ProfileComponent("cos", first.real, first.imag),
    ProfileComponent("cos", second.real, second.imag),
    ProfileComponent("sin", first.real, first.imag),
    ProfileComponent("sin", second.real, second.imag),
  )


def _solve_weights(
  components: Sequence[ProfileComponent],
  target: float,
  policy: WeightPolicy,
) -> tuple[float, ...]:
  system = np.array([[c.value_at_border for c in components], [c.slope_at_border for c in components]])
  rhs = np.array([1.0, target])
  free = system if policy is WeightPolicy.MINIMAL_NORM else system[:, :2]
  solution, *_ = np.linalg.lstsq(free, rhs, rcond=None)
  weights = np.zeros(len(components))
  weights[: solution.size] = solution

  residual = float(np.max(np.abs(system @ weights - rhs)))
  if residual > CONSTRAINT_TOL * max(1.0, abs(target)):
    msg = f"weight constraints f(0)=1, f'(0)={target!r} unsatisfiable under {policy.value} (residual {residual:.3e})"
    raise InfeasibleConstraintsError(msg)
  return tuple(float(w) for w in weights)


def _flags(roots: Sequence[complex], tol: float) -> tuple[bool, bool]:
  values = [complex(s) for s in roots]
  near = any(tol / NEAR_DEGENERATE_FACTOR < abs(s.imag) / (1.0 + abs(s)) <= tol * NEAR_DEGENERATE_FACTOR for s in values)
  repeated = len(set(values)) < len(values)
  return near, repeated


def classify_and_weights(
  roots: Sequence[complex],
  omega: float,
  I0: float,
  P0: float,
  g_y: float,
  policy: WeightPolicy = WeightPolicy.MINIMAL_NORM,
  tol: float = DEFAULT_REAL_TOL,
) -> ProfileSolution:
  """Assign the regime and pick profile weights meeting f(0) = 1 and f'(0) = omega^2 I0 / (g_y P0)."""
  regime, components = profile_components(roots, tol)
  target = target_slope(omega, I0, P0, g_y)
  weights = _solve_weights(components, target, policy)
  near, repeated = _flags(roots, tol)
  if near:
    logger.warning("roots %s sit close to the real/complex threshold %g", list(roots), tol)
  if repeated:
    logger.warning("repeated roots %s; identical basis functions share their weight", list(roots))
  return ProfileSolution(
    regime=regime,
    components=components,
    weights=weights,
    policy=policy,
    target_slope=target,
    near_degenerate=near,
    repeated_roots=repeated,
  )


def build_wave_mode(
  p: ModelParams,
  omega: float,
  k: float,
  policy: WeightPolicy = WeightPolicy.MINIMAL_NORM,
  tol: float = DEFAULT_REAL_TOL,
  amplitude: float = 1.0,
) -> WaveMode:
  """Quartic coefficients, roots, regime and weights for one (omega, k)."""
  if not omega > 0:
    raise ValueError(NONPOSITIVE_OMEGA_ERROR)
  coeffs = quartic_coefficients(p, omega, k)
  roots = solve_quartic(coeffs)
  solution = classify_and_weights(roots, omega, p.I0, p.P0, p.g_y, policy, tol)
  residual = max(abs(coeffs.evaluate(s)) / (coeffs.scale * max(1.0, abs(s) ** 4)) for s in roots)
  return WaveMode(
    omega=omega,
    k=k,
    roots=tuple(complex(s) for s in roots),
    components=solution.components,
    weights=solution.weights,
    target_slope=solution.target_slope,
    regime=solution.regime,
    policy=policy,
    amplitude=amplitude,
    near_degenerate=solution.near_degenerate,
    repeated_roots=solution.repeated_roots,
    quartic_residual=float(residual),
  )


def simplest_mode(p: ModelParams, omega: float, k: float, amplitude: float = 1.0) -> WaveMode:
  """Single decaying exponential with s = omega^2 I0 / (g_y P0).

  The relative quartic residual of s is kept on the mode; it vanishes only when s is also a
  characteristic root (for unit parameters at omega = k = 1, for instance).
  """
  if not omega > 0:
    raise ValueError(NONPOSITIVE_OMEGA_ERROR)
  if not k > 0:
    raise NonPositiveWavenumberError(NONPOSITIVE_K_ERROR)
  s = target_slope(omega, p.I0, p.P0, p.g_y)
  coeffs = _coefficients(p, omega, k)
  residual = abs(coeffs.evaluate(s)) / (coeffs.scale * max(1.0, s**4))
  return WaveMode(
    omega=omega,
    k=k,
    roots=(complex(s),),
    components=(ProfileComponent("exp", s),),
    weights=(1.0,),
    target_slope=s,
    amplitude=amplitude,
    quartic_residual=residual,
  )


def assemble_mode(
  roots: Sequence[complex],
  weights: Sequence[float],
  omega: float,
  k: float,
  I0: float,
  P0: float,
  g_y: float,
  tol: float = DEFAULT_REAL_TOL,
  amplitude: float = 1.0,
) -> WaveMode:
  """WaveMode from caller-chosen weights; the regime's two border constraints must hold."""
  regime, components = profile_components(roots, tol)
  if len(weights) != len(components):
    msg = f"{regime.value} profile takes {len(components)} weights, got {len(weights)}"
    raise ValueError(msg)
  target = target_slope(omega, I0, P0, g_y)
  mode = WaveMode(
    omega=omega,
    k=k,
    roots=tuple(complex(s) for s in roots),
    components=components,
    weights=tuple(float(w) for w in weights),
    target_slope=target,
    regime=regime,
    amplitude=amplitude,
  )
  value, slope = mode.border_constraints()
  if abs(value - 1.0) > CONSTRAINT_TOL or abs(slope - target) > CONSTRAINT_TOL * max(1.0, abs(target)):
    msg = f"weights give f(0)={value!r}, f'(0)={slope!r}; need 1 and {target!r}"
    raise InfeasibleConstraintsError(msg)
  return mode


def inward_growth_rates(mode: WaveMode) -> GrowthReport:
  """Per weighted component: grows inward (y < Y) iff its root has negative real part."""
  return GrowthReport(
    components=tuple(
      ComponentGrowth(index=i, kind=c.kind, rate=c.rate, weight=w, grows_inward=c.rate < 0)
      for i, (c, w) in enumerate(zip(mode.components, mode.weights, strict=True))
      if abs(w) > WEIGHT_EPS
    ),
  )


def quartic_dispersion_curve(
  p: ModelParams,
  k: float,
  omegas: Iterable[float],
  tol: float = DEFAULT_REAL_TOL,
) -> list[tuple[float, Regime, NDArray[np.complex128]]]:
  """Regime and roots along a frequency sweep at fixed k."""
  curve = []
  previous: Regime | None = None
  for omega in omegas:
    roots = solve_quartic(quartic_coefficients(p, omega, k))
    regime = classify_regime(roots, tol)
    if previous is not None and regime is not previous:
      logger.info("regime changes from %s to %s near omega=%g", previous.value, regime.value, omega)
    previous = regime
    curve.append((omega, regime, roots))
  return curve


def sweep_sign_pattern(n: int, seed: int = 0, tol: float = DEFAULT_REAL_TOL) -> SignSweepReport:
  """Randomized check that two real roots carry the sign opposite to the complex pair's real part."""
  rng = np.random.default_rng(seed)
  mixed = 0
  counterexamples: list[str] = []
  max_residual = 0.0
  max_sum = 0.0
  for _ in range(n):
    p = sample_valid_params(rng)
    omega = float(rng.uniform(0.1, 3.0))
    k = float(rng.uniform(0.1, 3.0))
    coeffs = quartic_coefficients(p, omega, k)
    roots = solve_quartic(coeffs)
    max_residual = max(max_residual, *(abs(coeffs.evaluate(s)) / (coeffs.scale * max(1.0, abs(s) ** 4)) for s in roots))
    max_sum = max(max_sum, abs(complex(np.sum(roots))))
    if classify_regime(roots, tol) is not Regime.TWO_REAL_TWO_COMPLEX:
      continue
    mixed += 1
    real = [s.real for s in roots if _is_real(complex(s), tol)]
    pair_rate = next(s.real for s in roots if not _is_real(complex(s), tol))
    if not all(math.copysign(1.0, s) == -math.copysign(1.0, pair_rate) for s in real):
      note = f"omega={omega!r} k={k!r} params={p.model_dump()} roots={list(roots)}"
      logger.warning("sign observation fails: %s", note)
      counterexamples.append(note)
  return SignSweepReport(
    draws=n,
    two_real_two_complex=mixed,
    counterexamples=tuple(counterexamples),
    max_residual=max_residual,
    max_vieta_sum=max_sum,
  )
