"""Helpers shared by the command handlers."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from riskwave.dispersion import build_wave_mode, simplest_mode
from riskwave.models import ModeKind
from riskwave.utils import CSVEmitter, MetadataSidecar, RunMetadata

if TYPE_CHECKING:
  from collections.abc import Iterable, Sequence
  from pathlib import Path

  from riskwave.config import RunConfig
  from riskwave.dispersion import WaveMode


def configured_mode(cfg: RunConfig) -> WaveMode:
  """The [mode] block as a WaveMode."""
  spec = cfg.mode
  if spec.kind is ModeKind.SIMPLEST:
    return simplest_mode(cfg.model, spec.omega, spec.k, amplitude=spec.amplitude)
  return build_wave_mode(cfg.model, spec.omega, spec.k, policy=cfg.policy, tol=cfg.tol, amplitude=spec.amplitude)


def mode_settings(mode: WaveMode) -> dict[str, Any]:
  """Sidecar settings describing a wave mode."""
  return {
    "omega": mode.omega,
    "k": mode.k,
    "amplitude": mode.amplitude,
    "regime": mode.regime.value if mode.regime else None,
    "roots": [[s.real, s.imag] for s in mode.roots],
    "weights": list(mode.weights),
    "quartic_residual": mode.quartic_residual,
  }


def write_table(
  cfg: RunConfig,
  command: str,
  path: Path,
  headers: Sequence[str],
  rows: Iterable[Sequence[Any]],
  settings: dict[str, Any] | None = None,
  notes: Sequence[str] = (),
  seed: int | None = None,
) -> list[Path]:
  """CSV plus its metadata sidecar; returns both paths."""
  CSVEmitter.emit_csv(headers, rows, path)
  metadata = RunMetadata(
    command=command,
    params=cfg.model.model_dump(),
    policy=cfg.policy.value,
    tol=cfg.tol,
    seed=seed,
    settings=settings or {},
    notes=list(notes),
    outputs=[path.name],
  )
  return [path, MetadataSidecar.write(metadata, path)]
