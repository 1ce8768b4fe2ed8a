"""Exception hierarchy shared by the library and the command-line driver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
  from riskwave.models import ValidationReport

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_OUTPUT = 4


class RiskwaveError(Exception):
  """Base class for every error raised by riskwave."""

  exit_code = EXIT_NUMERICAL


@dataclass(frozen=True)
class ConfigIssue:
  """A single line-addressed problem found while reading a run configuration."""

  line: int | None
  message: str

  def __str__(self) -> str:
    if self.line is None:
      return self.message
    return f"line {self.line}: {self.message}"


class ConfigError(RiskwaveError):
  """Configuration text could not be turned into a valid RunConfig."""

  exit_code = EXIT_CONFIG

  def __init__(self, issues: list[ConfigIssue]) -> None:
    self.issues = issues
    super().__init__("; ".join(str(issue) for issue in issues))


class InvalidParamsError(RiskwaveError):
  """Model parameters violate one or more constraints."""

  exit_code = EXIT_CONFIG

  def __init__(self, report: ValidationReport) -> None:
    self.report = report
    super().__init__("; ".join(f"{v.constraint} ({v.detail})" for v in report.violations))


class InvalidSignsError(RiskwaveError):
  """Coefficient signs required by a closed form do not hold."""

  exit_code = EXIT_CONFIG


class OutOfDomainError(RiskwaveError):
  """A point lies outside the macro rectangle."""


class AmplitudeMismatchError(RiskwaveError):
  """I0 and P0 differ from the values the incompressible regime forces."""


class NonPositiveWavenumberError(RiskwaveError):
  """Wavenumber must be strictly positive."""


class DegenerateLeadingCoefficientError(RiskwaveError):
  """Quartic leading coefficient is zero."""


class InfeasibleConstraintsError(RiskwaveError):
  """Profile weight constraints have no solution under the chosen policy."""


class NonSimplestModeError(RiskwaveError):
  """Closed-form trajectories exist only for single positive-root modes."""


class IncompatibleGridsError(RiskwaveError):
  """Two field grids do not share shape and spacing."""


class ParticleOutOfDomainError(RiskwaveError):
  """An e-particle lies outside the macro rectangle."""


class BadGridError(RiskwaveError):
  """Grid dimensions are unusable."""

  exit_code = EXIT_CONFIG


class CFLViolationError(RiskwaveError):
  """Time step exceeds the stability bound."""

  exit_code = EXIT_CONFIG


class InstabilityError(RiskwaveError):
  """Simulation fields left the admissible range."""


class ProbeOutOfDomainError(RiskwaveError):
  """A probe point lies outside the simulated rectangle."""

  exit_code = EXIT_CONFIG


class OutputError(RiskwaveError):
  """Writing an output file failed."""

  exit_code = EXIT_OUTPUT
