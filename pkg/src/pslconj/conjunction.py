"""Soft conjunction operations on probability vectors.

The family evaluated here is

    conj(p) = max(c1 * sum(p) - (n * c1 - 1), 0),    c1 in [1/n, 1]

which contains the Lukasiewicz t-norm (c1 = 1) and the arithmetic
average (c1 = 1/n) as its two extremes.  Programs mix rule arities, so a
member of the family is selected by one arity-free ``blend`` in [0, 1]
that is mapped to c1 per arity.

All sums use :func:`math.fsum`, which is correctly rounded and therefore
independent of argument order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DomainError, InvalidArityError

# absolute slack for sampled inequalities (Frechet bounds, Jensen)
SAMPLE_TOL = 1e-9
# absolute slack for exact algebraic identities
EXACT_TOL = 1e-12

Operation = Callable[[Sequence[float]], float]


def as_probabilities(p) -> tuple[float, ...]:
    """Validate ``p`` as a non-empty vector of probabilities and return it as a tuple."""
    values = tuple(float(v) for v in p)
    if not values:
        raise InvalidArityError("conjunction needs at least one argument")
    for v in values:
        # written so that NaN also fails
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"probability {v!r} outside [0, 1]")
    return values


def eval_lukasiewicz(p: Sequence[float]) -> float:
    """Lukasiewicz t-norm ``max(sum(p) - (n - 1), 0)``."""
    values = as_probabilities(p)
    n = len(values)
    return max(math.fsum(values) - (n - 1), 0.0)


def eval_average(p: Sequence[float]) -> float:
    """Arithmetic mean of ``p``."""
    values = as_probabilities(p)
    return math.fsum(values) / len(values)


def resolve_c1(blend: float, arity: int) -> float:
    """Map ``blend`` to the slope c1 for a conjunction of ``arity`` arguments.

    Affine in blend: 1/arity at blend 0, 1 at blend 1.  Written as
    ``blend + (1 - blend) / arity`` so both endpoints come out exact.
    """
    if isinstance(blend, SoftConjunction):
        blend = blend.blend
    if int(arity) != arity or arity < 1:
        raise InvalidArityError(f"arity must be a positive integer, got {arity!r}")
    if not 0.0 <= blend <= 1.0:
        raise DomainError(f"blend {blend!r} outside [0, 1]")
    return blend + (1.0 - blend) / arity


def eval_family(op: SoftConjunction | float, p: Sequence[float]) -> float:
    values = as_probabilities(p)
    blend = op.blend if isinstance(op, SoftConjunction) else float(op)
    n = len(values)
    c1 = resolve_c1(blend, n)
    total = math.fsum(values)
    # canonical forms at the two ends keep them bit-identical to the named operations
    if c1 == 1.0:
        return max(total - (n - 1), 0.0)
    if blend == 0.0:
        return total / n
    # 1 - c1 * (n - sum) equals c1 * sum - (n c1 - 1) and never exceeds 1 in floating point
    return max(1.0 - c1 * (n - total), 0.0)


@dataclass(frozen=True)
class SoftConjunction:
    """A member of the soft conjunction family, selected by ``blend``.

    ``blend=1`` is the Lukasiewicz t-norm and ``blend=0`` the arithmetic
    average, at every arity.  Instances are callable on probability vectors.
    """

    blend: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.blend <= 1.0:
            raise DomainError(f"blend {self.blend!r} outside [0, 1]")

    def c1(self, arity: int) -> float:
        return resolve_c1(self.blend, arity)

    def __call__(self, p: Sequence[float]) -> float:
        return eval_family(self, p)

    @property
    def name(self) -> str:
        return f"family:{self.blend:g}"


LUKASIEWICZ = SoftConjunction(1.0)
AVERAGE = SoftConjunction(0.0)


@dataclass(frozen=True)
class FrechetInterval:
    lower: float
    upper: float

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    @property
    def width(self) -> float:
        return self.upper - self.lower


def frechet_bounds(p: Sequence[float]) -> FrechetInterval:
    """Sharp bounds on P(a_1 & ... & a_n) given only the marginals ``p``."""
    values = as_probabilities(p)
    lower = max(math.fsum(values) - (len(values) - 1), 0.0)
    return FrechetInterval(lower, min(values))


@dataclass(frozen=True)
class Definition1Check:
    """Outcome of testing one point against the Frechet interval.

    ``side`` is ``None`` when the value is inside, otherwise ``"lower"`` or
    ``"upper"``; ``gap`` is the distance by which that bound is violated.
    """

    ok: bool
    value: float
    interval: FrechetInterval
    side: str | None = None
    gap: float = 0.0

    def __bool__(self):
        return self.ok


def checked_value(op: Operation, p: Sequence[float]) -> float:
    """Evaluate ``op`` at ``p`` and reject results outside [0, 1]."""
    value = float(op(p))
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"operation returned {value!r} outside [0, 1] at {tuple(p)}")
    return value


def satisfies_definition1(op: Operation, p: Sequence[float], tol: float = SAMPLE_TOL) -> Definition1Check:
    """Check that ``op(p)`` lies within the Frechet interval of ``p``.

    An operation passing this at every point of the cube is a logical
    conjunction operation.
    """
    values = as_probabilities(p)
    value = checked_value(op, values)
    interval = frechet_bounds(values)
    if value < interval.lower - tol:
        return Definition1Check(False, value, interval, "lower", interval.lower - value)
    if value > interval.upper + tol:
        return Definition1Check(False, value, interval, "upper", value - interval.upper)
    return Definition1Check(True, value, interval)
