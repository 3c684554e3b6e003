"""Mean VR regret against source size and evaluation budget on the toy problem."""

import argparse
from pathlib import Path

from shift_hpo.harness import dumps, no_regret_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-values", default="100,400,1600")
    p.add_argument("--budgets", default="10,25,50")
    p.add_argument("--seeds", type=int, default=30)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--out", default="results/no_regret.json")
    args = p.parse_args()

    table = no_regret_sweep(
        n_values=[int(x) for x in args.n_values.split(",")],
        budgets=[int(x) for x in args.budgets.split(",")],
        seeds=range(args.seeds),
        c=args.c,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps(table.to_dict()))
    for n, m, s in zip(table.n_values, table.regret_by_n, table.se_by_n):
        print(f"n={n:<6d} regret {m:.4f} +/- {s:.4f}")
    for b, m, s in zip(table.budgets, table.regret_by_budget, table.se_by_budget):
        print(f"B={b:<6d} regret {m:.4f} +/- {s:.4f}")
    print("nonincreasing in n:", table.nonincreasing_in_n, "| in B:", table.nonincreasing_in_budget)


if __name__ == "__main__":
    main()
