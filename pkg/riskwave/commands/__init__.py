"""Command handler modules for riskwave."""

from riskwave.commands import analysis, fields, simulate

__all__ = ["analysis", "fields", "simulate"]
