#!/usr/bin/env python3
"""Coupling-temperature Fisher-information grid for one spin model.

Thin wrapper over the `fig1` preset; extra flags pass straight through.

    python3 scripts/run_fig1.py --model lmg -N 20 --out results/fig1_lmg.csv
"""

import sys

from critfish.cli import main

if __name__ == "__main__":
    sys.exit(main(["fig1", *sys.argv[1:]]))
