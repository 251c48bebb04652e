"""Numerical audit of the claim that the Lukasiewicz t-norm is the only
convex operation staying inside the Frechet interval.

Two ingredients:

* sampled falsification: seeded Jensen checks on random segments and
  Frechet-bound checks at vertices and random points;
* the constructive vertex decompositions behind the uniqueness argument.
  Every p in [0,1]^n is written as a convex combination of 0/1 vectors,
  and the weight landing on (1,...,1) is exactly ``max(sum(p) - (n-1), 0)``.
  Jensen then bounds any convex operation from above by that weight.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .conjunction import (
    EXACT_TOL,
    SAMPLE_TOL,
    Operation,
    as_probabilities,
    checked_value,
    eval_lukasiewicz,
    frechet_bounds,
    satisfies_definition1,
)
from .errors import BoundarySumError, InteriorSumError, InvalidArityError, UpperSumError

Vertex = tuple[int, ...]

CONVEX_AND_LOGICAL = "convex-and-logical"
CONVEX_NOT_LOGICAL = "convex-not-logical"
LOGICAL_NOT_CONVEX = "logical-not-convex"
NEITHER = "neither"


def min_tnorm(p: Sequence[float]) -> float:
    return min(as_probabilities(p))


def product_tnorm(p: Sequence[float]) -> float:
    return math.prod(as_probabilities(p))


def ones(n: int) -> Vertex:
    return (1,) * n


def hole(n: int, i: int) -> Vertex:
    """All-ones vector of length ``n`` with a 0 at position ``i``."""
    return tuple(0 if j == i else 1 for j in range(n))


def vertex_str(v: Vertex) -> str:
    return "".join(str(b) for b in v)


@dataclass(frozen=True)
class VertexCombination:
    """Convex combination ``sum(w * v)`` of 0/1 vectors of a common arity."""

    arity: int
    terms: tuple[tuple[Vertex, float], ...]

    def __post_init__(self):
        for v, w in self.terms:
            if len(v) != self.arity or any(b not in (0, 1) for b in v):
                raise ValueError(f"bad vertex {v} for arity {self.arity}")
            if w < 0:
                raise ValueError(f"negative weight {w} on {v}")
        if abs(self.total_weight() - 1.0) > EXACT_TOL:
            raise ValueError(f"weights sum to {self.total_weight()!r}, not 1")

    def total_weight(self) -> float:
        return math.fsum(w for _, w in self.terms)

    def weight_on(self, vertex: Sequence[int]) -> float:
        vertex = tuple(vertex)
        return math.fsum(w for v, w in self.terms if v == vertex)

    def reconstruct(self) -> np.ndarray:
        return np.array([math.fsum(w * v[j] for v, w in self.terms) for j in range(self.arity)])

    @property
    def vertices(self) -> list[Vertex]:
        return [v for v, _ in self.terms]

    def jensen_bound(self, op: Operation) -> float:
        """``sum(w * op(v))``: an upper bound on ``op`` at the combined point when op is convex."""
        return math.fsum(w * checked_value(op, v) for v, w in self.terms)

    def to_dict(self) -> dict:
        return {
            "arity": self.arity,
            "terms": [{"vertex": vertex_str(v), "weight": w} for v, w in self.terms],
        }


def _merge(arity, weighted, drop_zero=True) -> VertexCombination:
    acc: dict[Vertex, float] = {}
    for v, w in weighted:
        if drop_zero and w == 0.0:
            continue
        acc[v] = acc.get(v, 0.0) + w
    return VertexCombination(arity, tuple(acc.items()))


def _boundary_terms(values):
    n = len(values)
    return [(hole(n, i), 1.0 - values[i]) for i in range(n)]


def decompose_boundary(p: Sequence[float]) -> VertexCombination:
    """Decompose a point with ``sum(p) == n - 1`` over the vectors with a single zero.

    The weight on the vector with its zero at ``i`` is ``1 - p[i]``.  All n
    terms are kept, including zero weights.
    """
    values = as_probabilities(p)
    n = len(values)
    total = math.fsum(values)
    if abs(total - (n - 1)) > SAMPLE_TOL:
        raise BoundarySumError(f"sum(p) = {total!r}, expected {n - 1}")
    return VertexCombination(n, tuple(_boundary_terms(values)))


def _staircase(values):
    """Sort descending; the k-th vertex flags the top k coordinates with weight v_(k) - v_(k+1).

    Coordinates equal to zero never receive a positive weight.
    """
    n = len(values)
    order = sorted(range(n), key=lambda i: -values[i])
    out = []
    bits = [0] * n
    prev = 1.0
    for i in order:
        out.append((tuple(bits), prev - values[i]))
        bits[i] = 1
        prev = values[i]
    out.append((tuple(bits), prev))
    return out


def decompose_interior(p: Sequence[float]) -> VertexCombination:
    """Decompose a point with ``sum(p) <= n - 1`` over 0/1 vectors that each have a zero bit.

    Walks the coordinates left to right.  At coordinate k (all earlier
    coordinates already promoted to 1), if raising it to
    ``q = n - 1 - (everything else)`` stays within 1, the point splits
    between the boundary point carrying q (decomposed over single-zero
    vectors) and the point with coordinate k set to 0.  Otherwise it splits
    between coordinate k at 0 and at 1, and the walk continues on the latter.
    Points with a zero coordinate are finished off by the staircase.
    """
    values = list(as_probabilities(p))
    n = len(values)
    total = math.fsum(values)
    if total > (n - 1) + EXACT_TOL:
        raise InteriorSumError(f"sum(p) = {total!r} exceeds {n - 1}")

    weighted = []
    mass = 1.0
    current = list(values)
    for k in range(n):
        pk = current[k]
        rest = math.fsum(current[k + 1:])
        zero_branch = current[:k] + [0.0] + current[k + 1:]
        if pk == 0.0:
            weighted += [(v, mass * w) for v, w in _staircase(zero_branch)]
            break
        # compare against the integer so q <= 1 holds exactly in floating point
        if rest >= n - 2 - k:
            q = (n - 1 - k) - rest
            theta = 1.0 if q <= pk else pk / q
            raised = current[:k] + [q] + current[k + 1:]
            weighted += [(v, mass * theta * w) for v, w in _boundary_terms(raised)]
            if theta < 1.0:
                weighted += [(v, mass * (1.0 - theta) * w) for v, w in _staircase(zero_branch)]
            break
        # case 1 always holds by k = n - 2, so the walk terminates
        weighted += [(v, mass * (1.0 - pk) * w) for v, w in _staircase(zero_branch)]
        mass *= pk
        current[k] = 1.0
    return _merge(n, weighted)


def decompose_upper(p: Sequence[float]) -> VertexCombination:
    """Decompose a point with ``sum(p) > n - 1``.

    Weight ``sum(p) - (n - 1)`` goes on (1,...,1) and ``1 - p[i]`` on the
    vector with its zero at ``i``.
    """
    values = as_probabilities(p)
    n = len(values)
    excess = math.fsum(values) - (n - 1)
    if excess <= 0.0:
        raise UpperSumError(f"sum(p) - (n - 1) = {excess!r} is not positive")
    return VertexCombination(n, ((ones(n), excess), *_boundary_terms(values)))


def decompose(p: Sequence[float]) -> VertexCombination:
    """Dispatch on ``sum(p)`` versus ``n - 1``; sums within 1e-12 of n-1 count as boundary."""
    values = as_probabilities(p)
    n = len(values)
    excess = math.fsum(values) - (n - 1)
    if abs(excess) <= EXACT_TOL:
        return decompose_boundary(values)
    if excess < 0:
        return decompose_interior(values)
    return decompose_upper(values)


def regime(p: Sequence[float]) -> str:
    values = as_probabilities(p)
    excess = math.fsum(values) - (len(values) - 1)
    if abs(excess) <= EXACT_TOL:
        return "boundary"
    return "interior" if excess < 0 else "upper"


def jensen_replay(op: Operation, p: Sequence[float]) -> tuple[float, float]:
    """Return ``(op(p), bound)`` where bound is Jensen's bound through :func:`decompose`.

    A convex ``op`` has ``op(p) <= bound``; an op that is also within the
    Frechet interval has bound equal to the Lukasiewicz value.
    """
    values = as_probabilities(p)
    return checked_value(op, values), decompose(values).jensen_bound(op)


@dataclass(frozen=True)
class ConvexityCounterexample:
    x: tuple[float, ...]
    y: tuple[float, ...]
    lam: float
    lhs: float
    rhs: float
    sample_index: int = -1  # -1 for deterministic probes

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {
            "x": list(self.x),
            "y": list(self.y),
            "lambda": self.lam,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "sample_index": self.sample_index,
        }


def _probes(n):
    # opposing unit vectors, then opposing single-zero vectors
    seen = set()
    unit = [tuple(1.0 if j == i else 0.0 for j in range(n)) for i in range(n)]
    holes = [tuple(map(float, hole(n, i))) for i in range(n)]
    for family in (unit, holes):
        for a, b in itertools.combinations(family, 2):
            if frozenset((a, b)) not in seen:
                seen.add(frozenset((a, b)))
                yield a, b, 0.5


def _segments(n, samples, seed):
    rng = np.random.default_rng(seed)
    draws = rng.random((samples, 2 * n + 1))
    for row in draws:
        yield tuple(row[:n].tolist()), tuple(row[n:2 * n].tolist()), float(row[2 * n])


def _jensen_violations(op, arity, samples, seed, probes, tol):
    candidates = []
    if probes:
        candidates.append((-1, _probes(arity)))
    candidates.append((0, _segments(arity, samples, seed)))
    for start, stream in candidates:
        for k, (x, y, lam) in enumerate(stream):
            mid = tuple(lam * a + (1.0 - lam) * b for a, b in zip(x, y))
            lhs = checked_value(op, mid)
            rhs = lam * checked_value(op, x) + (1.0 - lam) * checked_value(op, y)
            if lhs > rhs + tol:
                yield ConvexityCounterexample(x, y, lam, lhs, rhs, -1 if start < 0 else k)


def convexity_search(
    op: Operation,
    arity: int,
    samples: int,
    seed: int,
    probes: bool = True,
    tol: float = SAMPLE_TOL,
) -> ConvexityCounterexample | None:
    """Return the first Jensen violation ``op(lx + (1-l)y) > l op(x) + (1-l) op(y) + tol``.

    The deterministic probe set (pairs of opposing vertices at l = 0.5) is
    tried before ``samples`` seeded uniform triples.
    """
    if arity < 1:
        raise InvalidArityError(f"arity must be >= 1, got {arity}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    return next(_jensen_violations(op, arity, samples, seed, probes, tol), None)


@dataclass(frozen=True)
class BoundFailure:
    point: tuple[float, ...]
    side: str
    gap: float

    def to_dict(self) -> dict:
        return {"point": list(self.point), "side": self.side, "gap": self.gap}


@dataclass
class AuditReport:
    """Result of :func:`uniqueness_audit`.

    The lists keep at most ``max_kept`` entries; the ``n_*`` counters are exact.
    ``inconsistencies`` lists points where an op judged convex and logical
    disagrees with the Lukasiewicz t-norm by more than 1e-9, which would
    contradict the uniqueness result.
    """

    op_name: str
    arity: int
    seed: int
    samples_drawn: int
    violations: list[ConvexityCounterexample] = field(default_factory=list)
    bound_failures: list[BoundFailure] = field(default_factory=list)
    n_violations: int = 0
    n_bound_failures: int = 0
    max_lukasiewicz_deviation: float = 0.0
    inconsistencies: list[tuple[float, ...]] = field(default_factory=list)

    @property
    def convex(self) -> bool:
        return self.n_violations == 0

    @property
    def logical(self) -> bool:
        return self.n_bound_failures == 0

    @property
    def verdict(self) -> str:
        if self.convex and self.logical:
            return CONVEX_AND_LOGICAL
        if self.convex:
            return CONVEX_NOT_LOGICAL
        if self.logical:
            return LOGICAL_NOT_CONVEX
        return NEITHER

    def to_dict(self) -> dict:
        return {
            "op": self.op_name,
            "arity": self.arity,
            "seed": self.seed,
            "samples_drawn": self.samples_drawn,
            "verdict": self.verdict,
            "n_violations": self.n_violations,
            "n_bound_failures": self.n_bound_failures,
            "counterexample": self.violations[0].to_dict() if self.violations else None,
            "violations": [v.to_dict() for v in self.violations],
            "bound_failures": [b.to_dict() for b in self.bound_failures],
            "max_lukasiewicz_deviation": self.max_lukasiewicz_deviation,
            "inconsistencies": [list(p) for p in self.inconsistencies],
        }


def uniqueness_audit(
    op: Operation,
    arity: int,
    samples: int,
    seed: int,
    op_name: str | None = None,
    max_kept: int = 10,
    tol: float = SAMPLE_TOL,
) -> AuditReport:
    """Classify ``op`` as convex and/or logical on ``[0,1]^arity`` by sampling.

    Convexity: probe set plus ``samples`` seeded Jensen triples.  Logical:
    the Frechet interval is checked at every 0/1 vertex and at every
    sampled segment endpoint and midpoint.  When both hold, ``op`` is
    compared pointwise with the Lukasiewicz t-norm at all those points.
    """
    if arity < 2:
        raise InvalidArityError(f"audit needs arity >= 2, got {arity}")
    report = AuditReport(op_name or getattr(op, "name", repr(op)), arity, seed, samples)

    for cx in _jensen_violations(op, arity, samples, seed, True, tol):
        report.n_violations += 1
        if len(report.violations) < max_kept:
            report.violations.append(cx)

    points: list[tuple[float, ...]] = [tuple(float(b) for b in v) for v in itertools.product((0, 1), repeat=arity)]
    for x, y, lam in _segments(arity, samples, seed):
        points += [x, y, tuple(lam * a + (1.0 - lam) * b for a, b in zip(x, y))]

    values = []
    for pt in points:
        check = satisfies_definition1(op, pt, tol)
        values.append(check.value)
        if not check.ok:
            report.n_bound_failures += 1
            if len(report.bound_failures) < max_kept:
                report.bound_failures.append(BoundFailure(pt, check.side, check.gap))

    deviation = 0.0
    for pt, v in zip(points, values):
        d = abs(v - eval_lukasiewicz(pt))
        deviation = max(deviation, d)
        if report.verdict == CONVEX_AND_LOGICAL and d > tol and len(report.inconsistencies) < max_kept:
            report.inconsistencies.append(pt)
    report.max_lukasiewicz_deviation = deviation
    return report


def expected_weight_on_ones(p: Sequence[float]) -> float:
    return frechet_bounds(p).lower
