"""riskwave - surface-like waves of Investment and Profits on economic space."""

__version__ = "0.1.0"
