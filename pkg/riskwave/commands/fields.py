"""Wave-field commands: snapshots, border aggregate and trajectories."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from riskwave.commands.common import configured_mode, mode_settings, write_table
from riskwave.wavefield import (
  AGGREGATE_SIGN_NOTE,
  aggregate_investment,
  aggregate_steady,
  boundary_amplitude_variants,
  circulation_trajectory,
  integrate_trajectory,
  sample_snapshot,
)

if TYPE_CHECKING:
  from pathlib import Path

  from riskwave.config import RunConfig

SNAPSHOT_COLUMNS = ("t", "x", "y", "I", "P", "vx", "vy", "ux", "uy")


def run_field(cfg: RunConfig, out: Path) -> list[Path]:
  """Snapshot of I, P and both velocities on the [field] lattice at time t."""
  mode = configured_mode(cfg)
  spec = cfg.field
  snapshot = sample_snapshot(mode, cfg.model, mode.amplitude, spec.t, spec.nx, spec.ny)
  settings = {**mode_settings(mode), "border_amplitude": boundary_amplitude_variants(mode, cfg.model)}
  return write_table(cfg, "field", out / "field.csv", SNAPSHOT_COLUMNS, snapshot.rows(), settings=settings)


def run_aggregate(cfg: RunConfig, out: Path) -> list[Path]:
  """Border-integrated Investment as a time series."""
  mode = configured_mode(cfg)
  spec = cfg.aggregate
  times = np.linspace(spec.t_start, spec.t_end, spec.t_points)
  rows = [(float(t), aggregate_investment(mode, cfg.model, mode.amplitude, float(t))) for t in times]
  settings = {**mode_settings(mode), "steady_part": aggregate_steady(cfg.model)}
  return write_table(cfg, "aggregate", out / "aggregate.csv", ("t", "value"), rows, settings=settings, notes=[AGGREGATE_SIGN_NOTE])


def run_trajectory(cfg: RunConfig, out: Path) -> list[Path]:
  """Closed-form orbit for the simplest mode, RK4 path when numeric is set."""
  mode = configured_mode(cfg)
  spec = cfg.trajectory
  p = cfg.model
  x0 = p.X / 2.0 if spec.x0 is None else spec.x0
  y0 = p.Y if spec.y0 is None else spec.y0

  if spec.numeric:
    path = integrate_trajectory(mode, p, mode.amplitude, x0, y0)
    rows = [tuple(float(v) for v in row) for row in path]
  else:
    times = np.linspace(0.0, mode.period, spec.t_points)
    points = circulation_trajectory(mode, p, mode.amplitude, x0, y0, times)
    rows = [(float(t), float(x), float(y)) for t, (x, y) in zip(times, points, strict=True)]
  settings = {**mode_settings(mode), "x0": x0, "y0": y0, "numeric": spec.numeric}
  return write_table(cfg, "trajectory", out / "trajectory.csv", ("t", "x", "y"), rows, settings=settings)
