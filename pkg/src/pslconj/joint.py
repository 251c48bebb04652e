"""Explicit joint distributions that reach any point of the Frechet interval.

Given marginals m_1..m_n and a target t with
``max(sum(m) - (n-1), 0) <= t <= min(m)``, :func:`construct_joint` builds
events with exactly those marginals whose conjunction has probability t.

Both extremes come from a single uniform u on the unit circle:

* upper (comonotone): event i holds iff ``u < m_i``; all events share the
  interval [0, min m), so the conjunction has probability min(m);
* lower: the complement of event i is an arc of length ``1 - m_i``; the
  arcs are laid end to end, so they overlap only once they have covered
  the whole circle, leaving ``max(1 - sum(1 - m_i), 0)`` uncovered.

Any t in between is a mixture of the two, which keeps the marginals.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

from .conjunction import EXACT_TOL, as_probabilities, frechet_bounds
from .errors import InfeasibleTargetError, InvalidArityError

Pattern = tuple[int, ...]

MAX_EVENTS = 16


@dataclass(frozen=True)
class JointDistribution:
    """Probability mass on 0/1 outcome patterns of ``arity`` events."""

    arity: int
    atoms: dict[Pattern, float]

    def __post_init__(self):
        for pattern, mass in self.atoms.items():
            if len(pattern) != self.arity or any(b not in (0, 1) for b in pattern):
                raise ValueError(f"bad pattern {pattern} for arity {self.arity}")
            if mass < 0:
                raise ValueError(f"negative mass {mass} on {pattern}")
        total = math.fsum(self.atoms.values())
        if abs(total - 1.0) > EXACT_TOL:
            raise ValueError(f"masses sum to {total!r}")

    def marginal(self, i: int) -> float:
        return joint_marginal(self, i)

    def conjunction_prob(self) -> float:
        return joint_conjunction_prob(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["pattern", "mass"])
        for pattern, mass in sorted(self.atoms.items(), reverse=True):
            writer.writerow(["".join(map(str, pattern)), repr(mass)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> JointDistribution:
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty joint table")
        atoms: dict[Pattern, float] = {}
        for row in rows:
            pattern = tuple(int(c) for c in row["pattern"])
            atoms[pattern] = atoms.get(pattern, 0.0) + float(row["mass"])
        return cls(len(next(iter(atoms))), atoms)


def joint_marginal(j: JointDistribution, i: int) -> float:
    """P(event i), with ``i`` a 0-based event index."""
    if not 0 <= i < j.arity:
        raise IndexError(f"event index {i} out of range for arity {j.arity}")
    return math.fsum(m for pattern, m in j.atoms.items() if pattern[i] == 1)


def joint_conjunction_prob(j: JointDistribution) -> float:
    return j.atoms.get((1,) * j.arity, 0.0)


def _discretize(n, breakpoints, occurs):
    """Cut [0, 1) at ``breakpoints`` and record the pattern of each piece."""
    cuts = sorted({0.0, 1.0, *(b for b in breakpoints if 0.0 < b < 1.0)})
    atoms: dict[Pattern, float] = {}
    for a, b in zip(cuts, cuts[1:]):
        mid = 0.5 * (a + b)
        pattern = tuple(1 if occurs(i, mid) else 0 for i in range(n))
        atoms[pattern] = atoms.get(pattern, 0.0) + (b - a)
    return atoms


def comonotone_joint(marginals: Sequence[float]) -> dict[Pattern, float]:
    m = as_probabilities(marginals)
    return _discretize(len(m), m, lambda i, u: u < m[i])


def countermonotone_joint(marginals: Sequence[float]) -> dict[Pattern, float]:
    m = as_probabilities(marginals)
    n = len(m)
    starts = []
    acc = 0.0
    for mi in m:
        starts.append(acc % 1.0)
        acc += 1.0 - mi
    ends = [(s + 1.0 - mi) % 1.0 for s, mi in zip(starts, m)]

    def occurs(i, u):
        return (u - starts[i]) % 1.0 >= 1.0 - m[i]

    return _discretize(n, starts + ends, occurs)


def construct_joint(marginals: Sequence[float], target: float) -> JointDistribution:
    """Build a joint distribution with the given marginals and P(all events) == ``target``.

    Raises :class:`InfeasibleTargetError` when ``target`` lies outside the
    Frechet interval of ``marginals`` by more than 1e-12.  The support has
    at most ``4n + 2`` patterns.
    """
    m = as_probabilities(marginals)
    n = len(m)
    if n > MAX_EVENTS:
        raise InvalidArityError(f"at most {MAX_EVENTS} events supported, got {n}")
    interval = frechet_bounds(m)
    target = float(target)
    if not interval.contains(target, EXACT_TOL):
        raise InfeasibleTargetError(
            f"target {target!r} outside Frechet interval [{interval.lower!r}, {interval.upper!r}]"
        )
    ones = (1,) * n
    upper = comonotone_joint(m)
    lower = countermonotone_joint(m)
    hi = upper.get(ones, 0.0)
    lo = lower.get(ones, 0.0)
    # interpolate between the realized extremes rather than the nominal bounds
    theta = 0.0 if hi <= lo else min(max((hi - target) / (hi - lo), 0.0), 1.0)

    atoms: dict[Pattern, float] = {}
    for weight, part in ((1.0 - theta, upper), (theta, lower)):
        if weight == 0.0:
            continue
        for pattern, mass in part.items():
            atoms[pattern] = atoms.get(pattern, 0.0) + weight * mass
    return JointDistribution(n, atoms)
