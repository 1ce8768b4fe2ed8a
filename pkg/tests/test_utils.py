"""
Unit tests covering the CSV emitter, metadata sidecars and the particle-file reader.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from riskwave import __version__
from riskwave.errors import ConfigError, OutputError
from riskwave.utils import CSVEmitter, MetadataSidecar, ParticleCSVReader, RunMetadata, atomic_write_text, format_cell

if TYPE_CHECKING:
  from pathlib import Path


def test_format_cell_keeps_full_precision() -> None:
  """Floats print at 17 significant digits so they read back exactly."""
  assert format_cell(0.5) == "0.5"
  assert format_cell(0.1) == "0.10000000000000001"
  assert float(format_cell(np.float64(1.0) / 3.0)) == 1.0 / 3.0


def test_format_cell_other_types() -> None:
  """Booleans lower-case, integers plain, strings untouched."""
  assert format_cell(True) == "true"
  assert format_cell(np.int64(7)) == "7"
  assert format_cell("AllReal") == "AllReal"


def test_empty_table_is_header_only() -> None:
  """No rows still gives a header line."""
  assert CSVEmitter.render_csv(["col"], []) == "col\n"


def test_rows_use_lf_endings() -> None:
  """Each row ends in a bare newline."""
  assert CSVEmitter.render_csv(["col"], [[0.5]]) == "col\n0.5\n"
  assert CSVEmitter.render_csv(["a", "b"], [[1, 2.0], [3, -0.25]]) == "a,b\n1,2\n3,-0.25\n"


def test_row_width_must_match_header() -> None:
  """Ragged tables are a programming error."""
  with pytest.raises(ValueError, match="row 2 has 1 cells"):
    CSVEmitter.render_csv(["a", "b"], [[1, 2], [3]])


def test_emit_csv_is_atomic_and_repeatable(tmp_path: Path) -> None:
  """Rewriting leaves identical bytes and no temporary files behind."""
  path = tmp_path / "out" / "table.csv"

  CSVEmitter.emit_csv(["t", "value"], [[0.0, 1.5], [0.1, 1.25]], path)
  first = path.read_bytes()
  CSVEmitter.emit_csv(["t", "value"], [[0.0, 1.5], [0.1, 1.25]], path)

  assert path.read_bytes() == first
  assert sorted(p.name for p in path.parent.iterdir()) == ["table.csv"]


def test_unwritable_target_raises_output_error(tmp_path: Path) -> None:
  """A file where the output directory should be is an output failure."""
  blocker = tmp_path / "blocker"
  blocker.write_text("", encoding="utf-8")

  with pytest.raises(OutputError, match="cannot write"):
    atomic_write_text(blocker / "table.csv", "col\n")


def test_sidecar_round_trip(tmp_path: Path) -> None:
  """Metadata written next to a CSV reads back unchanged."""
  csv_path = tmp_path / "aggregate.csv"
  metadata = RunMetadata(
    command="aggregate",
    params={"a1": 1.0, "n_risks": 2},
    policy="minimal-norm",
    tol=1e-9,
    settings={"omega": 1.0, "kind": "simplest"},
    notes=["wave term sign"],
    outputs=["aggregate.csv"],
  )

  sidecar = MetadataSidecar.write(metadata, csv_path)

  assert sidecar.name == "aggregate.csv.meta.json"
  assert MetadataSidecar.read(sidecar) == metadata
  assert metadata.tool_version == __version__


def test_particle_file_is_parsed() -> None:
  """Columns x, y, vx, vy then one column per extensive variable."""
  ensemble = ParticleCSVReader.parse_particles("x,y,vx,vy,u0,u1\n0.1,0.2,1,0,3,4\n\n0.3,0.4,0,1,5,6\n")

  assert len(ensemble) == 2
  assert ensemble.n_variables == 2
  np.testing.assert_array_equal(ensemble.positions, [[0.1, 0.2], [0.3, 0.4]])
  np.testing.assert_array_equal(ensemble.values[:, 1], [4.0, 6.0])


def test_particle_header_is_checked() -> None:
  """Files must name the position and velocity columns first."""
  with pytest.raises(ConfigError, match="line 1: particle file header"):
    ParticleCSVReader.parse_particles("y,x,vx,vy,u0\n0,0,0,0,1\n")


def test_particle_rows_report_line_numbers() -> None:
  """Every bad row is reported with its line."""
  with pytest.raises(ConfigError) as excinfo:
    ParticleCSVReader.parse_particles("x,y,vx,vy,u0\n0,0,0,0,1\n0,zero,0,0,1\n0,0,0\n0,0,0,0,inf\n")

  lines = [issue.line for issue in excinfo.value.issues]
  assert lines == [3, 4, 5]


def test_empty_particle_file_is_rejected() -> None:
  """A header alone holds no particles."""
  with pytest.raises(ConfigError, match="no particles"):
    ParticleCSVReader.parse_particles("x,y,vx,vy,u0\n")


def test_read_particles_from_disk(tmp_path: Path) -> None:
  """Paths are read as UTF-8; missing files are configuration errors."""
  path = tmp_path / "particles.csv"
  path.write_text("x,y,vx,vy,u0\n0.5,0.5,1,1,2\n", encoding="utf-8")

  assert len(ParticleCSVReader.read_particles(path)) == 1
  with pytest.raises(ConfigError, match="cannot read"):
    ParticleCSVReader.read_particles(tmp_path / "absent.csv")
