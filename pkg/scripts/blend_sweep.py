"""How the blend changes inference on the bundled hiring model.

The candidate is a strong researcher and colleague but a weak teacher.  A
strict conjunction scores the body at 0 and nothing pushes Hire up; softer
members score it at 1 - c1 and the optimum trades that against the
Hire -> Teacher rule.

    python scripts/blend_sweep.py
"""
import argparse

import numpy as np

from pslconj.conjunction import SoftConjunction
from pslconj.inference import LossSpec, grid_oracle, solve_subgradient
from pslconj.models import model_text
from pslconj.rules import GroundAtom, ground, parse_program


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--exponent", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=11)
    args = ap.parse_args()

    model = ground(parse_program(model_text("hiring")))
    hire = model.index[GroundAtom("Hire")]
    loss = LossSpec(args.exponent)

    print(f"{'blend':>6} {'c1(3)':>8} {'body':>8} {'Hire':>8} {'objective':>10} {'oracle':>10}")
    for blend in np.linspace(0.0, 1.0, args.steps):
        op = SoftConjunction(float(blend))
        sol = solve_subgradient(model, op, loss)
        orc = grid_oracle(model, op, loss, resolution=0.01)
        body = op((1.0, 0.0, 1.0))
        print(
            f"{blend:6.2f} {op.c1(3):8.4f} {body:8.4f} {sol.interpretation.values[hire]:8.4f}"
            f" {sol.objective:10.6f} {orc.objective:10.6f}"
        )


if __name__ == "__main__":
    main()
