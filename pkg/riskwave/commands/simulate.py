"""Simulator and particle-aggregation commands."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING

from riskwave.commands.common import configured_mode, mode_settings, write_table
from riskwave.core import steady_fields
from riskwave.errors import ConfigError, ConfigIssue
from riskwave.fdsim import FIELD_NAMES, SimConfig, cfl_limit, cross_energy, init_sim, run_and_probe
from riskwave.kinetic import GridSpec, deposit_fields, field_velocity
from riskwave.utils import ParticleCSVReader

if TYPE_CHECKING:
  from riskwave.config import RunConfig
  from riskwave.fdsim import SimState

logger = logging.getLogger(__name__)

MISSING_PARTICLES_ERROR = "[kinetic] particles = <path> is required for the kinetic command"
VARIABLE_INDEX_ERROR = "[kinetic] variable = {variable} but {path} holds {count} variable column(s)"
DEFAULT_SIM_STEPS = 16
LONG_RUN_STEPS = 100


def _state_rows(state: SimState) -> list[tuple[float, ...]]:
  """Final state at cell centers in the snapshot column layout."""
  p = state.p
  rows = []
  for j in range(state.cfg.ny):
    y = (j + 0.5) * state.dy
    for i in range(state.cfg.nx):
      x = (i + 0.5) * state.dx
      I_steady, P_steady = steady_fields(p, x, y)
      rows.append(
        (
          state.t,
          x,
          y,
          I_steady + float(state.dI[i, j]),
          P_steady + float(state.dP[i, j]),
          0.5 * float(state.vx[i, j] + state.vx[i + 1, j]),
          0.5 * float(state.vy[i, j] + state.vy[i, j + 1]),
          0.5 * float(state.ux[i, j] + state.ux[i + 1, j]),
          0.5 * float(state.uy[i, j] + state.uy[i, j + 1]),
        ),
      )
  return rows


def simulation_horizon(T: float | None, dt: float) -> float:
  """Configured horizon, or DEFAULT_SIM_STEPS steps of dt when [simulate] T is unset."""
  if T is None:
    logger.info("[simulate] T unset, running %d steps of dt=%r", DEFAULT_SIM_STEPS, dt)
    return DEFAULT_SIM_STEPS * dt
  if T / dt > LONG_RUN_STEPS:
    # Grid-scale modes of the b > 0, d < 0 bulk grow every step; long runs end in InstabilityError.
    logger.warning("[simulate] T=%r is %d steps of dt=%r; runs past %d steps usually blow up", T, round(T / dt), dt, LONG_RUN_STEPS)
  return T


def run_simulate(cfg: RunConfig, out: Path) -> list[Path]:
  """Force the y = Y border with the configured mode, probe, and dump the final state."""
  p, spec = cfg.model, cfg.simulate
  mode = configured_mode(cfg)
  dt = cfl_limit(p, spec.nx, spec.ny) if spec.dt is None else spec.dt
  T = simulation_horizon(spec.T, dt)
  sim = SimConfig(nx=spec.nx, ny=spec.ny, dt=dt, T=T, lateral=spec.lateral, forcing=mode, amplitude=mode.amplitude)
  state = init_sim(p, sim, spec.initial, mode=mode, amplitude=mode.amplitude)
  start_energy = cross_energy(state)

  probes = list(spec.probes) or [(p.X / 2.0, p.Y)]
  record, final = run_and_probe(state, probes, cadence=spec.cadence)

  headers = ["t", "border_dI", *(f"p{j}_{name}" for j in range(len(probes)) for name in FIELD_NAMES)]
  rows = []
  for n, t in enumerate(record.times):
    values = [float(v) for series in record.series for v in series[n]]
    rows.append((float(t), float(record.border_integral[n]), *values))

  settings = {
    **mode_settings(mode),
    "nx": spec.nx,
    "ny": spec.ny,
    "dt": dt,
    "T": T,
    "steps": final.n,
    "probes": [list(pt) for pt in probes],
    "cross_energy_start": start_energy,
    "cross_energy_end": cross_energy(final),
  }
  notes = [sim.boundary_note()]
  written = write_table(cfg, "simulate", out / "simulate_probes.csv", headers, rows, settings=settings, notes=notes)
  written += write_table(
    cfg,
    "simulate",
    out / "simulate_final.csv",
    ("t", "x", "y", "I", "P", "vx", "vy", "ux", "uy"),
    _state_rows(final),
    settings=settings,
    notes=notes,
  )
  return written


def run_kinetic(cfg: RunConfig, out: Path) -> list[Path]:
  """Deposit particles from a CSV file and derive the cell velocity field."""
  spec = cfg.kinetic
  if spec.particles is None:
    raise ConfigError([ConfigIssue(None, MISSING_PARTICLES_ERROR)])
  ensemble = ParticleCSVReader.read_particles(Path(spec.particles))
  if spec.variable >= ensemble.n_variables:
    msg = VARIABLE_INDEX_ERROR.format(variable=spec.variable, path=spec.particles, count=ensemble.n_variables)
    raise ConfigError([ConfigIssue(None, msg)])
  grid = GridSpec(nx=spec.nx, ny=spec.ny, X=cfg.model.X, Y=cfg.model.Y)
  density, impulse = deposit_fields(ensemble, grid, spec.variable, spec.deposition)
  velocity = field_velocity(density, impulse)

  xs, ys = grid.centers()
  empty = velocity.empty
  rows = [
    (
      float(xs[i]),
      float(ys[j]),
      float(density.values[i, j]),
      float(impulse.values[i, j, 0]),
      float(impulse.values[i, j, 1]),
      float(velocity.values[i, j, 0]),
      float(velocity.values[i, j, 1]),
      int(empty[i, j]) if empty is not None else 0,
    )
    for j in range(grid.ny)
    for i in range(grid.nx)
  ]
  settings = {**spec.model_dump(mode="json"), "particles_read": len(ensemble)}
  return write_table(
    cfg,
    "kinetic",
    out / "kinetic.csv",
    ("x", "y", "density", "impulse_x", "impulse_y", "vx", "vy", "empty"),
    rows,
    settings=settings,
  )
