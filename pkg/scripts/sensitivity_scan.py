#!/usr/bin/env python3
"""Fidelity of the four-ion |2,0> herald along one perturbation axis.

Writes a CSV (value, mean, stderr, q05, first-order estimate) to stdout.

    python scripts/sensitivity_scan.py --axis angular_halfwidth \
        --values 0 0.1 0.2 0.3 0.5 1.0 --unit deg > window.csv
    python scripts/sensitivity_scan.py --axis wavelength \
        --values 300e-9 400e-9 500e-9 600e-9 800e-9
"""

import argparse
import csv
import math
import sys

from dicke_herald import ChainGeometry, MonteCarloSetup, PerturbationSpec, Polarizer, scan_parameter
from dicke_herald.analysis import SCAN_AXES


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--axis", choices=SCAN_AXES, required=True)
    p.add_argument("--values", type=float, nargs="+", required=True)
    p.add_argument("--unit", choices=["si", "deg"], default="si", help="deg converts angles to radians")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=2008)
    p.add_argument("--workers", type=int, default=None)
    args = p.parse_args()

    values = [math.radians(v) for v in args.values] if args.unit == "deg" else args.values
    setup = MonteCarloSetup(
        geometry=ChainGeometry(4, 5e-6, 500e-9),
        polarizers=(Polarizer.SIGMA_PLUS,) * 2 + (Polarizer.SIGMA_MINUS,) * 2,
        perturbation=PerturbationSpec(lateral_sigma=5e-9, angular_halfwidth=math.radians(0.3), rng_seed=args.seed),
        num_samples=args.samples,
    )
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["value", "mean_fidelity", "fidelity_stderr", "q05", "first_order_fidelity", "error"])
    for raw, point in zip(args.values, scan_parameter(args.axis, values, setup, workers=args.workers)):
        r = point.report
        if r is None:
            writer.writerow([raw, "", "", "", "", point.error])
        else:
            writer.writerow([raw, f"{r.mean_fidelity:.6f}", f"{r.fidelity_stderr:.6f}",
                             f"{r.quantiles[0]:.6f}", f"{r.first_order_fidelity:.6f}", ""])


if __name__ == "__main__":
    main()
