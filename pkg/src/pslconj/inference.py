"""Hinge-loss inference over a ground model.

The objective is

    sum_r  lambda_r * max(conj(p(body_r)) - p(head_r), 0) ** exponent

with ``conj`` a :class:`~pslconj.conjunction.SoftConjunction`.  It is convex
for every blend and every exponent >= 1, and piecewise linear for
exponent 1, in which case :func:`export_lp` writes the equivalent LP.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .conjunction import SoftConjunction, eval_family, resolve_c1
from .errors import DomainError, NonconvexLossError, NotPiecewiseLinearError, OracleScaleError
from .rules import GroundModel, GroundRule


@dataclass(frozen=True)
class LossSpec:
    """Per-rule loss ``weight * distance ** exponent``; convex iff exponent >= 1."""

    exponent: float = 1.0

    def __post_init__(self):
        if not self.exponent >= 1.0:
            raise NonconvexLossError(f"loss exponent must be >= 1 for convexity, got {self.exponent!r}")


@dataclass
class Interpretation:
    values: np.ndarray
    evidence_mask: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(~((self.values >= 0.0) & (self.values <= 1.0))):
            raise DomainError("interpretation values must lie in [0, 1]")

    @classmethod
    def initial(cls, model: GroundModel, mode: str = "center", seed: int = 0) -> Interpretation:
        values = np.where(model.evidence_mask, model.evidence_values, 0.5)
        if mode == "random":
            rng = np.random.default_rng(seed)
            values = np.where(model.evidence_mask, model.evidence_values, rng.random(model.n_atoms))
        elif mode != "center":
            raise ValueError(f"unknown initialization mode {mode!r}")
        return cls(values, model.evidence_mask.copy())

    def with_free(self, model: GroundModel, free_values) -> Interpretation:
        values = self.values.copy()
        values[model.free_indices] = free_values
        return Interpretation(values, self.evidence_mask)

    def as_dict(self, model: GroundModel) -> dict[str, float]:
        return {str(a): float(v) for a, v in zip(model.atoms, self.values)}


@dataclass(frozen=True)
class SolveConfig:
    seed: int = 0
    max_iterations: int = 10_000
    step: float = 0.1
    tolerance: float = 1e-9
    init: str = "center"
    patience: int = 100

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass
class Solution:
    interpretation: Interpretation
    objective: float
    iterations: int
    penalties: list[float] = field(default_factory=list)


def _values(x) -> np.ndarray:
    return x.values if isinstance(x, Interpretation) else np.asarray(x, dtype=float)


def rule_penalty(gr: GroundRule, x, op: SoftConjunction, loss: LossSpec = LossSpec()) -> float:
    v = _values(x)
    conj = eval_family(op, [v[i] for i in gr.body])
    distance = max(conj - float(v[gr.head]), 0.0)
    return gr.weight * distance ** loss.exponent


def rule_penalties(model: GroundModel, x, op: SoftConjunction, loss: LossSpec = LossSpec()) -> list[float]:
    return [rule_penalty(gr, x, op, loss) for gr in model.ground_rules]


def evaluate_objective(model: GroundModel, x, op: SoftConjunction, loss: LossSpec = LossSpec()) -> float:
    total = 0.0
    for gr in model.ground_rules:
        total += rule_penalty(gr, x, op, loss)
    return total


class _Compiled:
    """Ground rules grouped by body arity for batched evaluation.

    Agrees with :func:`evaluate_objective` up to summation order.
    """

    def __init__(self, model: GroundModel, op: SoftConjunction, loss: LossSpec):
        self.n_atoms = model.n_atoms
        self.exponent = loss.exponent
        self.groups = []
        by_arity: dict[int, list[GroundRule]] = {}
        for gr in model.ground_rules:
            by_arity.setdefault(len(gr.body), []).append(gr)
        for n, grs in sorted(by_arity.items()):
            c1 = resolve_c1(op.blend, n)
            body = np.array([gr.body for gr in grs], dtype=np.intp)
            head = np.array([gr.head for gr in grs], dtype=np.intp)
            weight = np.array([gr.weight for gr in grs])
            self.groups.append((n, c1, op.blend, body, head, weight))

    @staticmethod
    def _inner(n, c1, blend, total):
        if c1 == 1.0:
            return total - (n - 1)
        if blend == 0.0:
            return total / n
        return 1.0 - c1 * (n - total)

    def objective(self, X: np.ndarray) -> np.ndarray:
        """Objective for each row of ``X`` (shape ``(k, n_atoms)``)."""
        out = np.zeros(X.shape[0])
        for n, c1, blend, body, head, weight in self.groups:
            conj = np.maximum(self._inner(n, c1, blend, X[:, body].sum(axis=2)), 0.0)
            dist = np.maximum(conj - X[:, head], 0.0)
            out += (weight * dist ** self.exponent).sum(axis=1)
        return out

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        g = np.zeros(self.n_atoms)
        for n, c1, blend, body, head, weight in self.groups:
            inner = self._inner(n, c1, blend, x[body].sum(axis=1))
            conj = np.maximum(inner, 0.0)
            dist = conj - x[head]
            active = dist > 0.0  # kinks count as inactive
            if not active.any():
                continue
            if self.exponent == 1.0:
                scale = weight * active
            else:
                scale = weight * self.exponent * np.where(active, dist, 0.0) ** (self.exponent - 1.0)
            slope = np.where(inner > 0.0, c1, 0.0) * scale
            np.add.at(g, body, np.repeat(slope[:, None], n, axis=1))
            np.add.at(g, head, -scale)
        return g


def _solution(model, interp, op, loss, iterations) -> Solution:
    penalties = rule_penalties(model, interp, op, loss)
    return Solution(interp, evaluate_objective(model, interp, op, loss), iterations, penalties)


def solve_subgradient(
    model: GroundModel,
    op: SoftConjunction = SoftConjunction(),
    loss: LossSpec = LossSpec(),
    cfg: SolveConfig = SolveConfig(),
) -> Solution:
    """Projected subgradient descent on the free atoms, step ``step / sqrt(t)``.

    Evidence atoms stay fixed.  Returns the best iterate seen (the start
    included).  Stops after ``max_iterations`` or when the best objective
    has improved by less than ``tolerance`` over the last ``patience``
    iterations.
    """
    if not loss.exponent >= 1.0:
        raise NonconvexLossError(f"loss exponent must be >= 1, got {loss.exponent!r}")
    start = Interpretation.initial(model, cfg.init, cfg.seed)
    compiled = _Compiled(model, op, loss)
    free = ~model.evidence_mask
    x = start.values.copy()
    best_x = x.copy()
    best = float(compiled.objective(x[None, :])[0])
    history = [best]
    t = 0
    if model.ground_rules and free.any():
        for t in range(1, cfg.max_iterations + 1):
            g = compiled.subgradient(x)
            g[~free] = 0.0
            if not g.any():
                break
            x = np.clip(x - cfg.step / math.sqrt(t) * g, 0.0, 1.0)
            f = float(compiled.objective(x[None, :])[0])
            if f < best:
                best, best_x = f, x.copy()
            history.append(best)
            if t >= cfg.patience and history[-cfg.patience - 1] - best < cfg.tolerance:
                break
    return _solution(model, Interpretation(best_x, model.evidence_mask.copy()), op, loss, t)


def grid_oracle(
    model: GroundModel,
    op: SoftConjunction = SoftConjunction(),
    loss: LossSpec = LossSpec(),
    resolution: float = 0.01,
    max_free: int = 4,
    chunk: int = 1 << 16,
) -> Solution:
    """Exhaustive minimization over the grid ``{0, r, 2r, ..., 1}`` for each free atom.

    Ties go to the lexicographically smallest grid point.
    """
    free = model.free_indices
    if len(free) > max_free:
        raise OracleScaleError(f"grid oracle limited to {max_free} free atoms, model has {len(free)}")
    steps = round(1.0 / resolution)
    if steps < 1 or abs(steps * resolution - 1.0) > 1e-9:
        raise ValueError(f"resolution {resolution!r} must divide 1")
    axis = np.linspace(0.0, 1.0, steps + 1)
    compiled = _Compiled(model, op, loss)
    base = np.where(model.evidence_mask, model.evidence_values, 0.0)

    points = itertools.product(axis, repeat=len(free))
    best_val, best_pt, evaluated = math.inf, (), 0
    while True:
        block = list(itertools.islice(points, chunk))
        if not block:
            break
        X = np.tile(base, (len(block), 1))
        if len(free):
            X[:, free] = np.array(block)
        vals = compiled.objective(X)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_pt = float(vals[k]), block[k]
        evaluated += len(block)
    values = base.copy()
    values[free] = best_pt
    return _solution(model, Interpretation(values, model.evidence_mask.copy()), op, loss, evaluated)


# --- LP export ----------------------------------------------------------------


def _num(c: float) -> str:
    return f"{c:.12g}"


def _affine(coeffs: dict[int, float], const: float) -> str:
    parts = []
    for i in sorted(coeffs):
        c = coeffs[i]
        if c == 0.0:
            continue
        sign = "-" if c < 0 else "+"
        parts.append((sign, f"{_num(abs(c))}*p_{i}"))
    if const != 0.0 or not parts:
        parts.append(("-" if const < 0 else "+", _num(abs(const))))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, term in parts[1:]:
        text += f" {sign} {term}"
    return text


def rule_row(gr: GroundRule, op: SoftConjunction) -> tuple[dict[int, float], float]:
    """Coefficients and constant of ``c1 * sum(body) - (n c1 - 1) - head``."""
    n = len(gr.body)
    c1 = resolve_c1(op.blend, n)
    coeffs: dict[int, float] = {}
    for i in gr.body:
        coeffs[i] = coeffs.get(i, 0.0) + c1
    coeffs[gr.head] = coeffs.get(gr.head, 0.0) - 1.0
    return coeffs, -(n * c1 - 1.0)


def export_lp(model: GroundModel, op: SoftConjunction = SoftConjunction(), loss: LossSpec = LossSpec()) -> str:
    """Write the exponent-1 objective as a linear program.

    One slack ``u_r`` per ground rule, with ``u_r >= 0`` and
    ``u_r >= c1 * sum(body) - (n c1 - 1) - head``; the conjunction's own
    floor at 0 can be dropped because head probabilities are nonnegative.
    """
    if loss.exponent != 1.0:
        raise NotPiecewiseLinearError(f"LP export needs exponent 1, got {loss.exponent!r}")
    lines = [
        f"# hinge-loss LP: {model.n_atoms} atoms, {len(model.ground_rules)} rules, blend {_num(op.blend)}"
    ]
    terms = [f"{_num(gr.weight)}*u_{r}" for r, gr in enumerate(model.ground_rules)]
    lines.append(("objective: " + " + ".join(terms)) if terms else "objective:")
    for r, gr in enumerate(model.ground_rules):
        lines.append(f"row: u_{r} >= 0")
        coeffs, const = rule_row(gr, op)
        lines.append(f"row: u_{r} >= {_affine(coeffs, const)}")
    for i in range(model.n_atoms):
        lines.append(f"bound: 0 <= p_{i} <= 1")
    for i in np.flatnonzero(model.evidence_mask):
        lines.append(f"fix: p_{i} = {_num(model.evidence_values[i])}")
    return "\n".join(lines) + "\n"


@dataclass
class LinearProgram:
    """Parsed form of :func:`export_lp` output."""

    objective: dict[int, float]
    rows: list[tuple[int, dict[int, float], float]]  # u_r >= coeffs . p + const
    bounds: dict[int, tuple[float, float]]
    fixed: dict[int, float]

    @property
    def n_slacks(self) -> int:
        ids = set(self.objective) | {r for r, _, _ in self.rows}
        return max(ids) + 1 if ids else 0

    @property
    def n_atoms(self) -> int:
        ids = set(self.bounds) | set(self.fixed) | {i for _, c, _ in self.rows for i in c}
        return max(ids) + 1 if ids else 0

    def active_slacks(self, p) -> np.ndarray:
        """Smallest feasible ``u`` for a given ``p``: the largest right-hand side of each slack."""
        p = np.asarray(p, dtype=float)
        u = np.full(self.n_slacks, -math.inf)
        for r, coeffs, const in self.rows:
            rhs = math.fsum([*(c * p[i] for i, c in coeffs.items()), const])
            u[r] = max(u[r], rhs)
        return u

    def objective_value(self, u) -> float:
        return math.fsum(w * u[r] for r, w in self.objective.items())


_TERM = re.compile(r"([+-]?)\s*([0-9.eE+-]+)(?:\*([pu])_(\d+))?")


def _parse_affine(text: str) -> tuple[dict[int, float], float]:
    coeffs: dict[int, float] = {}
    const = 0.0
    # split on binary +/- surrounded by spaces
    pieces = re.split(r"\s+(?=[+-]\s)", text.strip())
    for piece in pieces:
        piece = piece.replace(" ", "")
        m = _TERM.fullmatch(piece)
        if m is None:
            raise ValueError(f"cannot parse LP term {piece!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        value = sign * float(m.group(2))
        if m.group(3):
            idx = int(m.group(4))
            coeffs[idx] = coeffs.get(idx, 0.0) + value
        else:
            const += value
    return coeffs, const


def parse_lp(text: str) -> LinearProgram:
    lp = LinearProgram({}, [], {}, {})
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        rest = rest.strip()
        if key == "objective":
            if rest:
                coeffs, _ = _parse_affine(rest)
                lp.objective = coeffs
        elif key == "row":
            lhs, _, rhs = rest.partition(">=")
            r = int(lhs.strip().removeprefix("u_"))
            coeffs, const = _parse_affine(rhs)
            lp.rows.append((r, coeffs, const))
        elif key == "bound":
            lo, var, hi = (s.strip() for s in rest.split("<="))
            lp.bounds[int(var.removeprefix("p_"))] = (float(lo), float(hi))
        elif key == "fix":
            var, _, value = rest.partition("=")
            lp.fixed[int(var.strip().removeprefix("p_"))] = float(value)
        else:
            raise ValueError(f"unknown LP statement {key!r}")
    return lp
