#!/usr/bin/env python3
"""Run the riskwave command-line tool."""

if __name__ == "__main__":
  import sys

  from riskwave.app import main

  sys.exit(main())
