"""Fit a density ratio for N(0, 1) over N(1, 1) and compare with the closed form."""

import argparse

import numpy as np

from shift_hpo.density_ratio import UlsifConfig, fit_ulsif


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    target = rng.normal(0.0, 1.0, size=(args.n, 1))
    source = rng.normal(1.0, 1.0, size=(args.n, 1))
    model = fit_ulsif(target, source, UlsifConfig(seed=args.seed))
    print(f"bandwidth {model.bandwidth:.4f}, ridge {model.ridge:g}")
    for x in np.linspace(-2, 2, 9):
        true = np.exp(0.5 * (x - 1) ** 2 - 0.5 * x * x)
        print(f"x={x:+.2f}  fitted {model.evaluate([[x]])[0]:7.3f}  true {true:7.3f}")


if __name__ == "__main__":
    main()
