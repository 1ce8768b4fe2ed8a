"""Parameter, steady-state and dispersion commands."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from riskwave.commands.common import mode_settings, write_table
from riskwave.core import corner_values, steady_grid, validate_params
from riskwave.dispersion import build_wave_mode, incompressible_mode, inward_growth_rates, quartic_dispersion_curve, sweep_sign_pattern

if TYPE_CHECKING:
  from pathlib import Path

  from riskwave.config import RunConfig


def run_validate(cfg: RunConfig, out: Path) -> list[Path]:
  """Corner values of a parameter set that passed validation."""
  p = cfg.model
  report = validate_params(p)
  I_secure, P_secure, I_risky, P_risky = corner_values(p)
  rows = [("secure", 0.0, 0.0, I_secure, P_secure), ("risky", p.X, p.Y, I_risky, P_risky)]
  return write_table(
    cfg,
    "validate",
    out / "validate.csv",
    ("corner", "x", "y", "I", "P"),
    rows,
    settings={"violations": report.names()},
  )


def run_steady(cfg: RunConfig, out: Path) -> list[Path]:
  """Steady I and P on the [field] lattice."""
  points = steady_grid(cfg.model, cfg.field.nx, cfg.field.ny)
  return write_table(
    cfg,
    "steady",
    out / "steady.csv",
    ("x", "y", "I", "P"),
    [(pt.x, pt.y, pt.I, pt.P) for pt in points],
    settings={"nx": cfg.field.nx, "ny": cfg.field.ny},
  )


def run_dispersion(cfg: RunConfig, out: Path) -> list[Path]:
  """Incompressible dispersion over the configured k sweep."""
  spec = cfg.dispersion
  rows = []
  for k in np.linspace(spec.k_min, spec.k_max, spec.k_points):
    mode = incompressible_mode(cfg.model, float(k))
    rows.append((mode.k, mode.omega, mode.c, mode.kappa))
  return write_table(cfg, "dispersion", out / "dispersion.csv", ("k", "omega", "c", "kappa"), rows, settings=spec.model_dump())


def run_modes(cfg: RunConfig, out: Path) -> list[Path]:
  """Quartic roots, regime and weights at (omega, k); optionally a regime scan and a sign sweep."""
  p, spec = cfg.model, cfg.mode
  mode = build_wave_mode(p, spec.omega, spec.k, policy=cfg.policy, tol=cfg.tol, amplitude=spec.amplitude)
  growth = inward_growth_rates(mode)
  growing = {c.index for c in growth.components if c.grows_inward}
  settings = {**mode_settings(mode), "amplifying": growth.amplifying, "max_inward_rate": growth.max_inward_rate}
  notes = []
  if mode.near_degenerate:
    notes.append("roots lie close to the real/complex threshold")
  if mode.repeated_roots:
    notes.append("repeated roots share one weight column")

  written = write_table(
    cfg,
    "modes",
    out / "modes.csv",
    ("index", "root_re", "root_im", "regime"),
    [(i, s.real, s.imag, mode.regime.value if mode.regime else "") for i, s in enumerate(mode.roots)],
    settings=settings,
    notes=notes,
  )
  written += write_table(
    cfg,
    "modes",
    out / "modes_weights.csv",
    ("index", "kind", "rate", "theta", "weight", "grows_inward"),
    [(i, c.kind, c.rate, c.theta, w, i in growing) for i, (c, w) in enumerate(zip(mode.components, mode.weights, strict=True))],
    settings=settings,
  )

  if spec.omega_max is not None:
    omegas = np.linspace(spec.omega, spec.omega_max, spec.omega_points)
    curve = quartic_dispersion_curve(p, spec.k, (float(w) for w in omegas), tol=cfg.tol)
    headers = ("omega", "regime", *(f"s{j}_{part}" for j in range(1, 5) for part in ("re", "im")))
    rows = [(omega, regime.value, *(v for s in roots for v in (s.real, s.imag))) for omega, regime, roots in curve]
    written += write_table(cfg, "modes", out / "modes_curve.csv", headers, rows, settings={"k": spec.k})

  if cfg.sweep.draws > 0:
    report = sweep_sign_pattern(cfg.sweep.draws, seed=cfg.sweep.seed, tol=cfg.tol)
    written += write_table(
      cfg,
      "modes",
      out / "modes_sweep.csv",
      ("draws", "two_real_two_complex", "counterexamples", "max_residual", "max_vieta_sum"),
      [(report.draws, report.two_real_two_complex, len(report.counterexamples), report.max_residual, report.max_vieta_sum)],
      notes=list(report.counterexamples),
      seed=cfg.sweep.seed,
    )
  return written
