"""Separation of the marked pair on the counterexample graphs.

For each d, estimates Pr[u, v separated] under 3-phase KPR, 4-phase KPR and
two_cuts (with and without the randwts prefix), all with the adversarial
root order, and prints the 4-phase bound 8 (d/R)^4 next to it.

    python scripts/counterexample_sweep.py [--d 1 2 3] [--trials 2000]
"""

import argparse

from fairdecomp.counterexamples import counterexample, kpr_plus_bound
from fairdecomp.decompositions import LddConfig, RootPolicy
from fairdecomp.stats import estimate_separation


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    variants = {
        "kpr (3 phases)": dict(algorithm="kpr"),
        "kpr_plus (4 phases)": dict(algorithm="kpr_plus"),
        "two_cuts": dict(algorithm="two_cuts"),
        "two_cuts + prefix": dict(algorithm="two_cuts", with_prefix=True),
    }
    print("d  R   " + "  ".join(f"{k:>20}" for k in variants) + "   8(d/R)^4")
    for d in args.d:
        mg = counterexample(d)
        pol = RootPolicy.prefer(*mg.roots)
        for R in sorted({2 * d + 1, 3 * d, 4 * d} - set(range(2 * d + 1))):
            cells = []
            for kw in variants.values():
                cfg = LddConfig(R=R, root_policy=pol, seed=args.seed, **kw)
                (e,) = estimate_separation(mg.graph, cfg, [(mg.u, mg.v)], args.trials, 0.99)
                cells.append(f"{e.p_hat:8.4f} [{e.ci_low:.3f},{e.ci_high:.3f}]")
            print(f"{d}  {R:<3} " + "  ".join(f"{c:>20}" for c in cells) + f"   {kpr_plus_bound(d, R):.4f}")


if __name__ == "__main__":
    main()
