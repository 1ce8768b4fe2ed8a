"""Run configuration: a flat [section] / key = value file parsed into pydantic models."""

from __future__ import annotations

import logging
import math
import os
from pathlib import Path
from typing import Any

from jinja2 import Environment, FileSystemLoader, StrictUndefined
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, ValidationError, field_validator

from riskwave.core import derive_g_y, derive_h_y, incompressible_amplitudes, validate_params
from riskwave.errors import ConfigError, ConfigIssue, InvalidSignsError
from riskwave.models import Deposition, InitialCondition, LateralBoundary, ModeKind, ModelParams, WeightPolicy

logger = logging.getLogger(__name__)

LOG_LEVEL_ENV = "RISKWAVE_LOG_LEVEL"
DEFAULT_LOG_LEVEL = "WARNING"
LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")
TEMPLATE_DIR = Path(__file__).parent / "templates"
CONFIG_TEMPLATE = "config.ini.j2"

SYNTAX_ERROR = "expected '[section]' or 'key = value'"
MISSING_MODEL_ERROR = "a [model] section is required"
MISSING_TILT_ERROR = "one of g_y or h_y is required to complete I0²h_y = P0²g_y"
MISSING_AMPLITUDES_ERROR = "I0 and P0 must be given together, or both omitted with g_y given"

# Sign each key must have before I0, P0, g_y or h_y can be derived.
REQUIRED_SIGNS = {"a1": 1, "a2": -1, "b": 1, "d": -1, "g_y": 1, "I0": 1, "P0": 1}


def log_level() -> str:
  """Level name from RISKWAVE_LOG_LEVEL; unknown names fall back to WARNING."""
  level = os.getenv(LOG_LEVEL_ENV, DEFAULT_LOG_LEVEL).upper()
  if level not in LOG_LEVELS:
    logger.warning("ignoring %s=%r, expected one of %s", LOG_LEVEL_ENV, level, ", ".join(LOG_LEVELS))
    return DEFAULT_LOG_LEVEL
  return level


class Section(BaseModel):
  model_config = ConfigDict(extra="forbid", frozen=True)


class ModelSection(Section):
  """Raw [model] entries; g_y, h_y, I0 and P0 may be left for derivation."""

  a1: FiniteFloat
  a2: FiniteFloat
  b: FiniteFloat
  d: FiniteFloat
  g_x: FiniteFloat
  h_x: FiniteFloat
  X: FiniteFloat
  Y: FiniteFloat
  g_y: FiniteFloat | None = None
  h_y: FiniteFloat | None = None
  I0: FiniteFloat | None = None
  P0: FiniteFloat | None = None
  n_risks: int = 2


class ModeSection(Section):
  kind: ModeKind = ModeKind.SIMPLEST
  omega: float = 1.0
  k: float = 1.0
  amplitude: float = 1.0
  omega_max: float | None = None
  omega_points: int = Field(default=50, ge=2)


class DispersionSection(Section):
  k_min: float = Field(default=0.1, gt=0)
  k_max: float = Field(default=10.0, gt=0)
  k_points: int = Field(default=50, ge=2)


class FieldSection(Section):
  t: float = 0.0
  nx: int = Field(default=11, ge=2)
  ny: int = Field(default=11, ge=2)


class AggregateSection(Section):
  t_start: float = 0.0
  t_end: float = 2.0 * math.pi
  t_points: int = Field(default=64, ge=2)


class TrajectorySection(Section):
  x0: float | None = None
  y0: float | None = None
  t_points: int = Field(default=64, ge=2)
  numeric: bool = False


class SimulateSection(Section):
  nx: int = 32
  ny: int = 32
  dt: float | None = None
  T: float | None = None
  lateral: LateralBoundary = LateralBoundary.PERIODIC
  initial: InitialCondition = InitialCondition.ZERO
  cadence: int = Field(default=1, ge=1)
  probes: tuple[tuple[float, float], ...] = ()

  @field_validator("probes", mode="before")
  @classmethod
  def split_probes(cls, value: Any) -> Any:
    """'x,y; x,y' into pairs."""
    if not isinstance(value, str):
      return value
    pairs = []
    for chunk in filter(None, (part.strip() for part in value.split(";"))):
      x, _, y = chunk.partition(",")
      pairs.append((x.strip(), y.strip()))
    return tuple(pairs)


class KineticSection(Section):
  particles: str | None = None
  nx: int = Field(default=10, ge=1)
  ny: int = Field(default=10, ge=1)
  variable: int = Field(default=0, ge=0)
  deposition: Deposition = Deposition.NEAREST_CELL


class SweepSection(Section):
  draws: int = Field(default=0, ge=0)
  seed: int = 0


class RunConfig(BaseModel):
  """Resolved parameters plus every command block, defaults filled."""

  model_config = ConfigDict(extra="forbid", frozen=True)

  model: ModelParams
  mode: ModeSection = ModeSection()
  dispersion: DispersionSection = DispersionSection()
  field: FieldSection = FieldSection()
  aggregate: AggregateSection = AggregateSection()
  trajectory: TrajectorySection = TrajectorySection()
  simulate: SimulateSection = SimulateSection()
  kinetic: KineticSection = KineticSection()
  sweep: SweepSection = SweepSection()
  policy: WeightPolicy = WeightPolicy.MINIMAL_NORM
  tol: float = Field(default=1e-9, gt=0)


SECTIONS: dict[str, type[Section]] = {
  "model": ModelSection,
  "mode": ModeSection,
  "dispersion": DispersionSection,
  "field": FieldSection,
  "aggregate": AggregateSection,
  "trajectory": TrajectorySection,
  "simulate": SimulateSection,
  "kinetic": KineticSection,
  "sweep": SweepSection,
}


def _tokenize(text: str, issues: list[ConfigIssue]) -> tuple[dict[str, dict[str, str]], dict[tuple[str, str], int]]:
  values: dict[str, dict[str, str]] = {}
  lines: dict[tuple[str, str], int] = {}
  section: str | None = None

  for number, raw in enumerate(text.splitlines(), start=1):
    line = raw.strip()
    if not line or line.startswith(("#", ";")):
      continue
    if line.startswith("[") and line.endswith("]"):
      section = line[1:-1].strip()
      if section not in SECTIONS:
        issues.append(ConfigIssue(number, f"unknown section [{section}]"))
        section = None
        continue
      lines[(section, "")] = number
      values.setdefault(section, {})
      continue
    key, sep, value = line.partition("=")
    key = key.strip()
    if not sep or not key:
      issues.append(ConfigIssue(number, SYNTAX_ERROR))
      continue
    if section is None:
      issues.append(ConfigIssue(number, f"key '{key}' appears outside a known section"))
      continue
    if key in values[section]:
      issues.append(ConfigIssue(number, f"duplicate key '{key}' in [{section}] (first on line {lines[(section, key)]})"))
      continue
    values[section][key] = value.strip()
    lines[(section, key)] = number
  return values, lines


def _section_issues(name: str, exc: ValidationError, lines: dict[tuple[str, str], int]) -> list[ConfigIssue]:
  issues = []
  for error in exc.errors():
    key = str(error["loc"][0]) if error["loc"] else ""
    line = lines.get((name, key), lines.get((name, "")))
    if error["type"] == "extra_forbidden":
      issues.append(ConfigIssue(line, f"unknown key '{key}' in [{name}]"))
    else:
      issues.append(ConfigIssue(line, f"[{name}] {key}: {error['msg']}"))
  return issues


def _first_sign_line(raw: ModelSection, lines: dict[tuple[str, str], int], fallback: int | None) -> int | None:
  """Line of the earliest [model] key whose sign blocks the derivation."""
  offending = [
    lines[("model", key)]
    for key, sign in REQUIRED_SIGNS.items()
    if (value := getattr(raw, key)) is not None and value * sign <= 0 and ("model", key) in lines
  ]
  return min(offending, default=fallback)


def _resolve_model(raw: ModelSection, lines: dict[tuple[str, str], int], issues: list[ConfigIssue]) -> ModelParams | None:
  I0, P0, g_y, h_y = raw.I0, raw.P0, raw.g_y, raw.h_y
  line = lines.get(("model", ""))
  try:
    if I0 is None and P0 is None:
      if g_y is None:
        issues.append(ConfigIssue(line, MISSING_AMPLITUDES_ERROR))
        return None
      I0, P0 = incompressible_amplitudes(raw.a1, raw.a2, raw.b, raw.d, g_y)
      logger.info("I0=%r and P0=%r taken from the incompressible regime", I0, P0)
    elif I0 is None or P0 is None:
      issues.append(ConfigIssue(line, MISSING_AMPLITUDES_ERROR))
      return None
    if g_y is None and h_y is None:
      issues.append(ConfigIssue(line, MISSING_TILT_ERROR))
      return None
    if g_y is None:
      g_y = derive_g_y(I0, P0, h_y)  # type: ignore[arg-type]
    elif h_y is None:
      h_y = derive_h_y(I0, P0, g_y)
  except InvalidSignsError as exc:
    issues.append(ConfigIssue(_first_sign_line(raw, lines, line), str(exc)))
    return None

  params = ModelParams(**{**raw.model_dump(), "g_y": g_y, "h_y": h_y, "I0": I0, "P0": P0})
  for violation in validate_params(params).violations:
    key_line = next((lines[("model", key)] for key in violation.keys if ("model", key) in lines), line)
    issues.append(ConfigIssue(key_line, f"constraint {violation.constraint} violated: {violation.detail}"))
  return params


def parse_config(text: str, policy: WeightPolicy | None = None, tol: float | None = None) -> RunConfig:
  """Parse and validate; every problem found is reported together in one ConfigError."""
  issues: list[ConfigIssue] = []
  values, lines = _tokenize(text, issues)

  sections: dict[str, Section] = {}
  for name, cls in SECTIONS.items():
    if name not in values and name != "model":
      continue
    try:
      sections[name] = cls(**values.get(name, {}))
    except ValidationError as exc:
      if name == "model" and "model" not in values:
        issues.append(ConfigIssue(None, MISSING_MODEL_ERROR))
      else:
        issues.extend(_section_issues(name, exc, lines))

  params = None
  if isinstance(raw := sections.get("model"), ModelSection):
    params = _resolve_model(raw, lines, issues)

  if issues or params is None:
    raise ConfigError(issues)

  extras: dict[str, Any] = {}
  if policy is not None:
    extras["policy"] = policy
  if tol is not None:
    extras["tol"] = tol
  return RunConfig(model=params, **{name: section for name, section in sections.items() if name != "model"}, **extras)


def load_config(path: Path, policy: WeightPolicy | None = None, tol: float | None = None) -> RunConfig:
  try:
    text = path.read_text(encoding="utf-8")
  except (OSError, UnicodeDecodeError) as exc:
    raise ConfigError([ConfigIssue(None, f"cannot read {path}: {exc}")]) from exc
  return parse_config(text, policy=policy, tol=tol)


def _ini_value(value: Any) -> str:
  if isinstance(value, bool):
    return "true" if value else "false"
  if isinstance(value, float):
    return repr(value)
  if isinstance(value, tuple):
    return "; ".join(",".join(_ini_value(v) for v in pair) for pair in value)
  if hasattr(value, "value"):
    return str(value.value)
  return str(value)


def _template_env() -> Environment:
  env = Environment(
    loader=FileSystemLoader(TEMPLATE_DIR),
    autoescape=False,  # noqa: S701
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
    undefined=StrictUndefined,
  )
  env.filters["ini"] = _ini_value
  return env


def render_config(cfg: RunConfig) -> str:
  """Config text that parses back to an equal RunConfig; policy and tol are CLI options and not rendered."""
  sections = [("model", cfg.model.model_dump())]
  sections.extend((name, getattr(cfg, name).model_dump()) for name in SECTIONS if name != "model")
  return _template_env().get_template(CONFIG_TEMPLATE).render(sections=sections)
