#!/usr/bin/env python3
"""Run the interpolated-vs-direct equivalence experiment and print a table.

Equivalent to `ecograde validate`, kept as a script for quick iteration on
generator parameters. Writes histogram/raincloud data plus summary.json.
"""

import argparse
import sys
from pathlib import Path

from ecograde.validation import ValidationConfig, run_validation


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20240301)
    parser.add_argument("--n-addresses", type=int, default=1000)
    parser.add_argument("--coverage", type=float, default=0.7)
    parser.add_argument("--inject-shift", type=float, default=0.0)
    parser.add_argument("--cities", nargs="+", default=None)
    parser.add_argument("--out", type=Path, default=Path("runs/validation"))
    args = parser.parse_args()

    config = ValidationConfig(
        seed=args.seed,
        cities=tuple(args.cities) if args.cities else ValidationConfig().cities,
        n_addresses=args.n_addresses,
        epc_coverage_fraction=args.coverage,
        inject_shift=args.inject_shift,
    )
    summary = run_validation(config, out_dir=args.out)
    print(f"{'city':<15}{'G1 mean':>9}{'G2 mean':>9}{'gap':>8}{'n1':>6}{'n2':>6}")
    for c in summary.cities:
        print(f"{c.city:<15}{c.g1_mean:>9.4f}{c.g2_mean:>9.4f}{c.gap:>8.4f}{c.n_g1:>6}{c.n_g2:>6}")
    tost = summary.tost
    verdict = "EQUIVALENT" if tost.equivalent else "NOT EQUIVALENT"
    print(f"\nTOST (margin {tost.margin}, alpha {tost.alpha}): {verdict}")
    print(f"  p_lower={tost.p_lower:.3g} p_upper={tost.p_upper:.3g}")
    print(f"  CI G1 ({tost.ci_g1[0]:.4f}, {tost.ci_g1[1]:.4f})  CI G2 ({tost.ci_g2[0]:.4f}, {tost.ci_g2[1]:.4f})")
    print(f"  outputs under {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
