"""Bunching observables derived from output distributions.

The full-bunching ratio ``q_q(j) / q_c(j)`` between indistinguishable and
distinguishable particles equals ``n! / prod_k g_k!`` for every unitary, mode
count and output mode ``j``. :func:`full_bunching_ratio` evaluates both
probabilities through the permanent machinery instead of using the closed
form, so comparing the two is a genuine check.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .photonic import InputSpec, Model, output_distribution, transition_probability

NORMALIZATION_TOL = 1e-6

Distribution = Mapping[Sequence[int], float]


def _check_normalized(dist: Distribution) -> None:
    if not dist:
        raise ValidationError("empty distribution")
    total = math.fsum(dist.values())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(f"distribution sums to {total!r}, not 1")


def _is_collision(h: Sequence[int]) -> bool:
    return max(h) >= 2


def collision_free_mass(dist: Distribution) -> float:
    _check_normalized(dist)
    return math.fsum(p for h, p in dist.items() if not _is_collision(h))


def bunching_probability(dist: Distribution) -> float:
    """Probability that at least two particles share an output mode.

    Summed over the collision states themselves so that a model which
    assigns them exactly zero (fermions) reports exactly zero.
    """
    _check_normalized(dist)
    return math.fsum(p for h, p in dist.items() if _is_collision(h))


def full_bunching_probability(dist: Distribution, j: int) -> float:
    """Probability that all n particles leave in mode ``j`` (1-indexed)."""
    _check_normalized(dist)
    first = next(iter(dist))
    m, n = len(first), sum(first)
    if not 1 <= j <= m:
        raise DomainError(f"output mode {j} outside [1,{m}]")
    target = tuple(n if k == j else 0 for k in range(1, m + 1))
    return float(dist.get(target, 0.0))


def theoretical_ratio(inp: InputSpec) -> float:
    return math.factorial(inp.n) / math.prod(math.factorial(g) for g in inp.occupations)


def full_bunching_ratio(u, inp: InputSpec, j: int, model: Model | str = Model.BOSON,
                        w: float | None = None) -> float | None:
    """``q(j) / q_c(j)``, or None when some ``U[j, r_k]`` vanishes so ``q_c(j) = 0``.

    ``q`` is the full-bunching probability under ``model`` (indistinguishable
    bosons by default); ``q_c`` is always the distinguishable-particle value.
    """
    u = np.asarray(u)
    if not 1 <= j <= inp.m:
        raise DomainError(f"output mode {j} outside [1,{inp.m}]")
    column = u[j - 1, [r - 1 for r in inp.r_tuple]]
    h = tuple(inp.n if k == j else 0 for k in range(1, inp.m + 1))
    q_c = transition_probability(u, inp, h, Model.CLASSICAL)
    if q_c == 0.0 or not np.all(column != 0):
        return None
    return transition_probability(u, inp, h, model, w) / q_c


def hom_invert(t: float, p_c: float) -> float:
    """Bunching probability of indistinguishable particles from the coincidence ratio.

    ``t = (1 - p_q) / (1 - p_c)`` is what a delay scan measures, so
    ``p_q = 1 - t (1 - p_c)``.
    """
    if t < 0:
        raise DomainError(f"coincidence ratio t={t} must be non-negative")
    if not 0.0 <= p_c <= 1.0:
        raise DomainError(f"classical bunching probability {p_c} outside [0,1]")
    p_q = 1.0 - t * (1.0 - p_c)
    if not 0.0 <= p_q <= 1.0:
        raise DomainError(f"t={t}, p_c={p_c} give p_q={p_q} outside [0,1]; inconsistent inputs")
    return p_q


def coincidence_ratio(p_q: float, p_c: float) -> float:
    if p_c >= 1.0:
        raise DomainError("classical bunching probability of 1 leaves no coincidences to compare")
    return (1.0 - p_q) / (1.0 - p_c)


def predicted_ratio_mixture(n: int, w: float) -> float:
    """Full-bunching ratio of a mixture: weight w on n indistinguishable particles,
    1 - w on n - 1 indistinguishable plus one distinguishable.

    Use w = beta (two-photon visibility) for n = 2, w = alpha**2 for n = 3.
    """
    if n < 2:
        raise DomainError(f"mixture ratio needs n >= 2, got {n}")
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"mixture weight {w} outside [0,1]")
    # w n! + (1 - w)(n-1)!, factored to avoid the cancellation in (1 - w).
    return math.factorial(n - 1) * (1.0 + w * (n - 1))


@dataclass(frozen=True)
class BunchingReport:
    model: str
    p_bunch: float
    collision_free: float
    full_bunch: list[float]
    r_fb: list[float | None]

    def to_json(self) -> dict:
        return asdict(self)


def bunching_report(u, inp: InputSpec, model: Model | str, w: float | None = None) -> BunchingReport:
    model = Model(model)
    dist = output_distribution(u, inp, model, w)
    return BunchingReport(
        model=model.value,
        p_bunch=bunching_probability(dist),
        collision_free=collision_free_mass(dist),
        full_bunch=[full_bunching_probability(dist, j) for j in range(1, inp.m + 1)],
        r_fb=[full_bunching_ratio(u, inp, j, model, w) for j in range(1, inp.m + 1)],
    )


def save_report(report: BunchingReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_json(), indent=1) + "\n")
