"""Command-line entry point.

    pslconj infer MODEL [--blend B] [--exponent P] [--seed S] [--oracle]
    pslconj audit {family:<blend>|min|product} [--arity N] [--samples K] [--seed S]
    pslconj decompose P1 P2 ...
    pslconj joint M1 M2 ... --target T [--out FILE]
    pslconj export-lp MODEL [--blend B] [--out FILE]

Reports are JSON on stdout with floats rounded to 12 significant digits.
Every key except ``timing`` is a deterministic function of the arguments.

Exit codes: 0 success; 1 audit result contradicting the expected class;
2 usage, parse, grounding or other input errors; 3 solver errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .conjunction import SoftConjunction
from .convexity import (
    CONVEX_AND_LOGICAL,
    CONVEX_NOT_LOGICAL,
    LOGICAL_NOT_CONVEX,
    decompose,
    min_tnorm,
    product_tnorm,
    regime,
    uniqueness_audit,
    vertex_str,
)
from .errors import NonconvexLossError, OracleScaleError, ProgramError, PSLError
from .inference import LossSpec, SolveConfig, export_lp, grid_oracle, solve_subgradient
from .joint import construct_joint
from .rules import ground, parse_program

ORACLE_MAX_FREE = 3


class UsageError(Exception):
    pass


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def render(report: dict) -> str:
    return json.dumps(_round(report), indent=2, ensure_ascii=False) + "\n"


def _load(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return ground(parse_program(text))


def cmd_infer(args) -> dict:
    model = _load(args.model)
    op = SoftConjunction(args.blend)
    loss = LossSpec(args.exponent)
    cfg = SolveConfig(
        seed=args.seed,
        max_iterations=args.max_iter,
        step=args.step,
        tolerance=args.tol,
        init=args.init,
    )
    sol = solve_subgradient(model, op, loss, cfg)
    report = {
        "command": "infer",
        "inputs": {"file": str(args.model), "blend": args.blend, "exponent": args.exponent, "seed": args.seed},
        "seed": args.seed,
        "atoms": sol.interpretation.as_dict(model),
        "evidence": [str(a) for a, e in zip(model.atoms, model.evidence_mask) if e],
        "objective": sol.objective,
        "iterations": sol.iterations,
        "ground_rules": len(model.ground_rules),
    }
    if args.oracle:
        n_free = len(model.free_indices)
        if n_free <= ORACLE_MAX_FREE:
            orc = grid_oracle(model, op, loss, args.resolution)
            report["oracle"] = {
                "resolution": args.resolution,
                "objective": orc.objective,
                "atoms": orc.interpretation.as_dict(model),
                "gap": sol.objective - orc.objective,
            }
        else:
            report["oracle"] = {"skipped": f"{n_free} free atoms exceeds {ORACLE_MAX_FREE}"}
    return report


def parse_op(name: str):
    if name == "min":
        return min_tnorm, LOGICAL_NOT_CONVEX, False
    if name == "product":
        return product_tnorm, LOGICAL_NOT_CONVEX, False
    if name.startswith("family:"):
        try:
            op = SoftConjunction(float(name.removeprefix("family:")))
        except ValueError as exc:
            raise UsageError(f"bad family blend in {name!r}: {exc}") from exc
        expected = CONVEX_AND_LOGICAL if op.blend == 1.0 else CONVEX_NOT_LOGICAL
        return op, expected, True
    raise UsageError(f"unknown operation {name!r}; expected family:<blend>, min or product")


def cmd_audit(args) -> dict:
    op, expected, _ = parse_op(args.op)
    if args.arity < 2:
        raise UsageError("--arity must be >= 2")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    rep = uniqueness_audit(op, args.arity, args.samples, args.seed, op_name=args.op, max_kept=3)
    out = {
        "command": "audit",
        "inputs": {"op": args.op, "arity": args.arity, "samples": args.samples, "seed": args.seed},
        "seed": args.seed,
        "expected": expected,
        **{k: v for k, v in rep.to_dict().items() if k not in ("op", "arity", "seed")},
    }
    out["matches_expected"] = rep.verdict == expected and not rep.inconsistencies
    out["_exit"] = 0 if out["matches_expected"] else 1
    return out


def cmd_decompose(args) -> dict:
    comb = decompose(args.vector)
    n = len(args.vector)
    return {
        "command": "decompose",
        "inputs": {"vector": args.vector},
        "regime": regime(args.vector),
        "terms": [{"vertex": vertex_str(v), "weight": w} for v, w in comb.terms],
        "ones_weight": comb.weight_on((1,) * n),
        "reconstruction": comb.reconstruct().tolist(),
    }


def cmd_joint(args) -> dict:
    j = construct_joint(args.marginals, args.target)
    text = j.to_csv()
    if not args.out:
        return {"_stdout": text}
    Path(args.out).write_text(text, encoding="utf-8")
    return {
        "command": "joint",
        "inputs": {"marginals": args.marginals, "target": args.target},
        "out": str(args.out),
        "rows": len(j.atoms),
        "conjunction": j.conjunction_prob(),
        "marginals": [j.marginal(i) for i in range(j.arity)],
    }


def cmd_export_lp(args) -> dict:
    model = _load(args.model)
    text = export_lp(model, SoftConjunction(args.blend), LossSpec(args.exponent))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        return {
            "command": "export-lp",
            "inputs": {"file": str(args.model), "blend": args.blend},
            "out": str(args.out),
            "rows": sum(1 for line in text.splitlines() if line.startswith("row:")),
        }
    return {"_stdout": text}


def _prob(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pslconj", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="minimize the hinge-loss objective of a model file")
    p.add_argument("model")
    p.add_argument("--blend", type=_prob, default=1.0)
    p.add_argument("--exponent", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=SolveConfig.max_iterations)
    p.add_argument("--step", type=float, default=SolveConfig.step)
    p.add_argument("--tol", type=float, default=SolveConfig.tolerance)
    p.add_argument("--init", choices=("center", "random"), default="center")
    p.add_argument("--oracle", action="store_true", help="compare with the grid oracle (<= 3 free atoms)")
    p.add_argument("--resolution", type=float, default=0.01)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("audit", help="sampled convexity and Frechet-bound audit of an operation")
    p.add_argument("op", help="family:<blend>, min or product")
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("decompose", help="write a point as a convex combination of 0/1 vectors")
    p.add_argument("vector", nargs="+", type=_prob)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("joint", help="joint distribution with given marginals and conjunction probability")
    p.add_argument("marginals", nargs="+", type=_prob)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("export-lp", help="write the exponent-1 objective as an LP")
    p.add_argument("model")
    p.add_argument("--blend", type=_prob, default=1.0)
    p.add_argument("--exponent", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_lp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0

    started = time.perf_counter()
    try:
        report = args.func(args)
    except ProgramError as exc:
        for d in exc.diagnostics:
            print(f"{getattr(args, 'model', '<input>')}:{d}", file=sys.stderr)
        return 2
    except (NonconvexLossError, OracleScaleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, PSLError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    code = report.pop("_exit", 0)
    if "_stdout" in report:
        sys.stdout.write(report["_stdout"])
        return code
    report["timing"] = {"seconds": time.perf_counter() - started}
    sys.stdout.write(render(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
