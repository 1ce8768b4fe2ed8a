"""Main riskwave command-line application."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING

from riskwave import __version__
from riskwave.commands import analysis, fields, simulate
from riskwave.config import load_config, log_level
from riskwave.errors import EXIT_CONFIG, EXIT_OK, RiskwaveError
from riskwave.models import WeightPolicy

if TYPE_CHECKING:
  from collections.abc import Callable, Sequence

  from riskwave.config import RunConfig

logger = logging.getLogger(__name__)

command_handlers: dict[str, Callable[[RunConfig, Path], list[Path]]] = {
  # Parameters and steady state
  "validate": analysis.run_validate,
  "steady": analysis.run_steady,
  # Dispersion
  "dispersion": analysis.run_dispersion,
  "modes": analysis.run_modes,
  # Wave fields
  "field": fields.run_field,
  "aggregate": fields.run_aggregate,
  "trajectory": fields.run_trajectory,
  # Simulation and particles
  "simulate": simulate.run_simulate,
  "kinetic": simulate.run_kinetic,
}


def build_parser() -> argparse.ArgumentParser:
  """Command-line parser: one positional command plus config, output and weight options."""
  parser = argparse.ArgumentParser(prog="riskwave", description="Surface-like waves of Investment and Profits on the risk plane.")
  parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
  parser.add_argument("command", choices=sorted(command_handlers))
  parser.add_argument("--config", type=Path, required=True, help="run configuration file")
  parser.add_argument("--out", type=Path, default=Path(), help="output directory (default: current directory)")
  parser.add_argument("--policy", type=WeightPolicy, choices=list(WeightPolicy), default=None, help="profile weight policy")
  parser.add_argument("--tol", type=float, default=None, help="real/complex root threshold")
  return parser


def execute(cfg: RunConfig, command: str, out: Path) -> list[Path]:
  """Run one command; returns the files written."""
  handler = command_handlers[command]
  written = handler(cfg, out)
  logger.info("%s finished, %d file(s) written", command, len(written))
  return written


def main(argv: Sequence[str] | None = None) -> int:
  """Parse arguments, run one command and map failures to exit codes."""
  args = build_parser().parse_args(argv)
  logging.basicConfig(level=log_level(), format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

  try:
    cfg = load_config(args.config, policy=args.policy, tol=args.tol)
    execute(cfg, args.command, args.out)
  except RiskwaveError as exc:
    print(f"riskwave {args.command}: {exc}", file=sys.stderr)  # noqa: T201
    return exc.exit_code
  except ValueError as exc:
    print(f"riskwave {args.command}: {exc}", file=sys.stderr)  # noqa: T201
    return EXIT_CONFIG
  return EXIT_OK


if __name__ == "__main__":
  sys.exit(main())
