"""Regenerate all four figures (CSV + SVG) into one directory.

    python3 scripts/reproduce_figures.py --out figures --k 1000 --seed 42
"""

import argparse
import sys

from medmarg.cli import main as cli_main


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="figures")
    p.add_argument("--k", type=int, default=1000, help="prior draws for M1/B1 (and M2/B2)")
    p.add_argument("--l", type=int, default=None, help="conditional draws per prior draw")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--with-m2", action="store_true")
    p.add_argument("--mc", action="store_true", help="Monte Carlo power instead of exact")
    return p.parse_args(argv)


def main(argv=None):
    a = parse_args(argv)
    cmd = ["figures", "--which", "all", "--k", str(a.k), "--seed", str(a.seed), "--out", a.out]
    if a.l is not None:
        cmd += ["--l", str(a.l)]
    if a.with_m2:
        cmd.append("--with-m2")
    if a.mc:
        cmd += ["--mode", "mc"]
    return cli_main(cmd)


if __name__ == "__main__":
    sys.exit(main())
