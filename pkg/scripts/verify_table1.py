"""Recompute the two-source worked example and exit nonzero on mismatch."""

import argparse
import sys

from shift_hpo.harness import verify_table1

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--tol", type=float, default=1e-2)
    report = verify_table1(p.parse_args().tol)
    print(report.render())
    sys.exit(0 if report.passed else 1)
