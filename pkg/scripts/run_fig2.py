#!/usr/bin/env python3
"""Fixed-temperature cut: quantum bound vs one simple measurement.

Thin wrapper over the `fig2` preset; extra flags pass straight through.

    python3 scripts/run_fig2.py --model ising -N 6 --beta-gap 180 --out results/fig2_ising.csv
"""

import sys

from critfish.cli import main

if __name__ == "__main__":
    sys.exit(main(["fig2", *sys.argv[1:]]))
