"""CSV, metadata sidecar and particle-file codecs."""

from __future__ import annotations

import csv
import io
import logging
import os
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from riskwave import __version__
from riskwave.errors import ConfigError, ConfigIssue, OutputError
from riskwave.kinetic import ParticleEnsemble

if TYPE_CHECKING:
  from collections.abc import Iterable, Sequence

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".17g"
METADATA_SUFFIX = ".meta.json"
PARTICLE_COLUMNS = ("x", "y", "vx", "vy")
INVALID_PARTICLE_HEADER_ERROR = "particle file header must start with x,y,vx,vy followed by at least one u column"


def format_cell(value: Any) -> str:
  """Floats at 17 significant digits; everything else through str()."""
  if isinstance(value, bool):
    return str(value).lower()
  if isinstance(value, (float, np.floating)):
    return format(float(value), FLOAT_FORMAT)
  if isinstance(value, (int, np.integer)):
    return str(int(value))
  return str(value)


def atomic_write_text(path: Path, text: str) -> None:
  """Write via a temporary file in the target directory, then rename over the target."""
  try:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
      with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
      os.replace(temp_name, path)
    except BaseException:
      Path(temp_name).unlink(missing_ok=True)
      raise
  except OSError as exc:
    msg = f"cannot write {path}: {exc}"
    raise OutputError(msg) from exc
  logger.info("wrote %s", path)


class CSVEmitter:
  """Plot-ready CSV tables."""

  @staticmethod
  def render_csv(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Header row then one line per row, LF endings, minimal quoting."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(headers)
    width = len(headers)
    for number, row in enumerate(rows, start=1):
      if len(row) != width:
        msg = f"row {number} has {len(row)} cells, header has {width}"
        raise ValueError(msg)
      writer.writerow([format_cell(cell) for cell in row])
    return buffer.getvalue()

  @staticmethod
  def emit_csv(headers: Sequence[str], rows: Iterable[Sequence[Any]], path: Path) -> Path:
    """Render and atomically write one table."""
    atomic_write_text(path, CSVEmitter.render_csv(headers, rows))
    return path


class RunMetadata(BaseModel):
  """Everything needed to reproduce one output file."""

  model_config = ConfigDict(frozen=True)

  command: str
  tool_version: str = __version__
  params: dict[str, float | int]
  policy: str | None = None
  tol: float | None = None
  seed: int | None = None
  settings: dict[str, Any] = {}
  notes: list[str] = []
  outputs: list[str] = []


class MetadataSidecar:
  """JSON file written next to each CSV output."""

  @staticmethod
  def sidecar_path(csv_path: Path) -> Path:
    """<csv>.meta.json beside the table."""
    return csv_path.with_name(csv_path.name + METADATA_SUFFIX)

  @staticmethod
  def write(metadata: RunMetadata, csv_path: Path) -> Path:
    """Write metadata as JSON next to csv_path."""
    path = MetadataSidecar.sidecar_path(csv_path)
    atomic_write_text(path, metadata.model_dump_json(indent=2) + "\n")
    return path

  @staticmethod
  def read(path: Path) -> RunMetadata:
    """Load a sidecar back into RunMetadata."""
    return RunMetadata.model_validate_json(path.read_text(encoding="utf-8"))


class ParticleCSVReader:
  """Particle files with columns x, y, vx, vy, u0[, u1, ...]."""

  @staticmethod
  def parse_particles(text: str) -> ParticleEnsemble:
    """Header x,y,vx,vy,u0..u(l-1); every bad row is reported with its line."""
    reader = csv.reader(io.StringIO(text))
    header = [column.strip() for column in next(reader, [])]
    if tuple(header[:4]) != PARTICLE_COLUMNS or len(header) < len(PARTICLE_COLUMNS) + 1:
      raise ConfigError([ConfigIssue(1, INVALID_PARTICLE_HEADER_ERROR)])

    issues: list[ConfigIssue] = []
    rows: list[list[float]] = []
    for number, record in enumerate(reader, start=2):
      if not record or not "".join(record).strip():
        continue
      if len(record) != len(header):
        issues.append(ConfigIssue(number, f"expected {len(header)} columns, got {len(record)}"))
        continue
      try:
        values = [float(cell) for cell in record]
      except ValueError:
        issues.append(ConfigIssue(number, f"non-numeric value in {record}"))
        continue
      if not np.all(np.isfinite(values)):
        issues.append(ConfigIssue(number, "non-finite value"))
        continue
      rows.append(values)
    if not rows and not issues:
      issues.append(ConfigIssue(None, "particle file holds no particles"))
    if issues:
      raise ConfigError(issues)

    table = np.array(rows, dtype=np.float64)
    return ParticleEnsemble(positions=table[:, 0:2], velocities=table[:, 2:4], values=table[:, 4:])

  @staticmethod
  def read_particles(path: Path) -> ParticleEnsemble:
    """Read and parse a particle CSV file as UTF-8."""
    try:
      text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
      raise ConfigError([ConfigIssue(None, f"cannot read {path}: {exc}")]) from exc
    ensemble = ParticleCSVReader.parse_particles(text)
    logger.info("read %d particles with %d variable(s) from %s", len(ensemble), ensemble.n_variables, path)
    return ensemble
