"""Audit verdicts across the soft conjunction family and two classic t-norms.

Only blend=1 should come out convex-and-logical; every softer member breaks
the upper Frechet bound, and min/product break convexity.

    python scripts/audit_sweep.py --samples 20000
"""
import argparse

from pslconj.conjunction import SoftConjunction
from pslconj.convexity import min_tnorm, product_tnorm, uniqueness_audit


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--arities", type=int, nargs="+", default=[2, 3, 4, 5])
    args = ap.parse_args()

    ops = [(f"family:{b:g}", SoftConjunction(b)) for b in (0.0, 0.25, 0.5, 0.75, 0.95, 1.0)]
    ops += [("min", min_tnorm), ("product", product_tnorm)]

    print(f"{'op':<14}{'n':>3}  {'verdict':<20}{'jensen':>8}{'bounds':>8}  max|op-luk|")
    for name, op in ops:
        for n in args.arities:
            rep = uniqueness_audit(op, n, args.samples, args.seed, op_name=name)
            print(
                f"{name:<14}{n:>3}  {rep.verdict:<20}{rep.n_violations:>8}{rep.n_bound_failures:>8}"
                f"  {rep.max_lukasiewicz_deviation:.3g}"
            )


if __name__ == "__main__":
    main()
