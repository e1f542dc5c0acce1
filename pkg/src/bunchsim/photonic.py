"""Output statistics of n particles in an m-mode interferometer.

``U[i, j]`` is the amplitude for a single particle entering mode ``j`` to
leave in mode ``i``. For input occupations ``g`` and output occupations ``h``
the scattering matrix ``U_{G,H}`` repeats column ``j`` of ``U`` ``g_j`` times
and row ``i`` ``h_i`` times (rows index outputs, columns index inputs), and

* boson:      |per U_{G,H}|^2 / (prod g! prod h!)
* classical:  per(|U_{G,H}|^2) / prod h!
* fermion:    0 if any h_i >= 2, else |det U_{G,H}|^2
* mixed:      particles of one species interfere as bosons; different species
              combine classically, i.e. the output is the convolution of the
              per-species boson distributions.

A partially distinguishable source is handled at the probability level as a
mixture: weight ``w`` on all particles indistinguishable, ``1 - w`` on the
species assignment given in the :class:`InputSpec`.
"""

from __future__ import annotations

import csv
import enum
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, ModelViolationError, ResourceError, ValidationError
from .permanent import determinant, permanent, permanent_of_rows

STATE_GUARD = 10**7
SMALL_N = 4


class Model(str, enum.Enum):
    BOSON = "boson"
    CLASSICAL = "classical"
    FERMION = "fermion"
    MIXED = "mixed"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class InputSpec:
    """Particles entering the interferometer, as ``(mode, species)`` pairs, 1-indexed."""

    m: int
    particles: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError(f"need at least one mode, got m={self.m}")
        if not self.particles:
            raise ValidationError("input has no particles")
        for mode, _ in self.particles:
            if not 1 <= mode <= self.m:
                raise ValidationError(f"input mode {mode} outside [1,{self.m}]")

    @classmethod
    def from_modes(cls, m: int, modes: Iterable[int], species: Iterable[str] | None = None) -> "InputSpec":
        modes = [int(x) for x in modes]
        if species is None:
            labels = ["a"] * len(modes)
        else:
            labels = [str(s) for s in species]
            if len(labels) != len(modes):
                raise ValidationError(f"{len(modes)} input modes but {len(labels)} species labels")
        return cls(m, tuple(zip(modes, labels)))

    @property
    def n(self) -> int:
        return len(self.particles)

    @property
    def occupations(self) -> tuple[int, ...]:
        counts = Counter(mode for mode, _ in self.particles)
        return tuple(counts.get(k, 0) for k in range(1, self.m + 1))

    @property
    def r_tuple(self) -> tuple[int, ...]:
        """Input modes, one entry per particle, in nondecreasing order."""
        return tuple(sorted(mode for mode, _ in self.particles))

    def species_groups(self) -> list[tuple[int, ...]]:
        """Occupation vectors per species, in order of first appearance."""
        order: dict[str, list[int]] = {}
        for mode, label in self.particles:
            order.setdefault(label, []).append(mode)
        return [_occupations(modes, self.m) for modes in order.values()]


def _occupations(modes: Iterable[int], m: int) -> tuple[int, ...]:
    counts = Counter(modes)
    return tuple(counts.get(k, 0) for k in range(1, m + 1))


def _expand(occ: Sequence[int]) -> list[int]:
    return [k for k, c in enumerate(occ) for _ in range(c)]


_FACT = [math.factorial(k) for k in range(32)]


def _fact_prod(occ: Iterable[int]) -> int:
    out = 1
    for c in occ:
        out *= _FACT[c] if c < 32 else math.factorial(c)
    return out


def scattering_submatrix(u, g: Sequence[int], h: Sequence[int]) -> np.ndarray:
    """n x n matrix with row i of U repeated h_i times and column j repeated g_j times.

    Rows and columns appear in ascending mode order.
    """
    u = np.asarray(u)
    m = u.shape[0]
    if len(g) != m or len(h) != m:
        raise ValidationError(f"occupation vectors must have length {m}")
    if any(x < 0 for x in g) or any(x < 0 for x in h):
        raise ValidationError("occupations must be non-negative")
    if sum(g) != sum(h):
        raise ValidationError(f"input has {sum(g)} particles but output has {sum(h)}")
    return u[np.ix_(_expand(h), _expand(g))]


class _Scatterer:
    """Per-unitary evaluation of the single-species and classical rules.

    Small scattering matrices are assembled and summed on nested Python
    lists, which is several times faster than numpy for n <= 4.
    """

    def __init__(self, u: np.ndarray):
        self.u = u
        self.rows = u.tolist()
        self.abs2 = (np.abs(u) ** 2).tolist()

    def _sub(self, table, h_idx, g_idx):
        return [[table[i][j] for j in g_idx] for i in h_idx]

    def _per(self, table, h_idx, g_idx) -> complex:
        if len(g_idx) <= SMALL_N:
            return permanent_of_rows(self._sub(table, h_idx, g_idx))
        return permanent(np.array(self._sub(table, h_idx, g_idx)))

    def boson(self, g, h) -> float:
        g_idx = _expand(g)
        if not g_idx:
            return 1.0
        amp = self._per(self.rows, _expand(h), g_idx)
        return (amp.real**2 + amp.imag**2) / (_fact_prod(g) * _fact_prod(h))

    def classical(self, g, h) -> float:
        return self._per(self.abs2, _expand(h), _expand(g)).real / _fact_prod(h)

    def fermion(self, g, h) -> float:
        if any(x >= 2 for x in h):
            return 0.0
        d = determinant(np.array(self._sub(self.rows, _expand(h), _expand(g))))
        return d.real**2 + d.imag**2

    def mixed(self, groups: list[tuple[int, ...]], h: tuple[int, ...]) -> float:
        g, rest = groups[0], groups[1:]
        if not rest:
            return self.boson(g, h)
        total = 0.0
        for part in _sub_occupations(h, sum(g)):
            p = self.boson(g, part)
            if p == 0.0:
                continue
            remaining = tuple(a - b for a, b in zip(h, part))
            total += p * self.mixed(rest, remaining)
        return total


def _sub_occupations(remaining: Sequence[int], k: int) -> Iterator[tuple[int, ...]]:
    """All vectors x <= remaining (elementwise) with sum k."""
    if not remaining:
        if k == 0:
            yield ()
        return
    head, tail = remaining[0], remaining[1:]
    cap = sum(tail)
    for first in range(min(head, k), -1, -1):
        if k - first <= cap:
            for rest in _sub_occupations(tail, k - first):
                yield (first,) + rest


def _check_model(inp: InputSpec, model: Model, w: float | None) -> Model:
    model = Model(model)
    if model is Model.FERMION and any(c > 1 for c in inp.occupations):
        raise ModelViolationError(
            f"fermion model forbids more than one particle per input mode, got occupations {inp.occupations}"
        )
    if w is not None:
        if model is not Model.MIXED:
            raise ValidationError("a mixture weight only applies to the mixed model")
        if not 0.0 <= w <= 1.0:
            raise DomainError(f"mixture weight {w} outside [0,1]")
    return model


def _probability(sc: _Scatterer, g, groups, h: tuple[int, ...], model: Model, w: float | None) -> float:
    if model is Model.BOSON:
        return sc.boson(g, h)
    if model is Model.CLASSICAL:
        return sc.classical(g, h)
    if model is Model.FERMION:
        return sc.fermion(g, h)
    p = sc.mixed(groups, h)
    if w is None:
        return p
    return w * sc.boson(g, h) + (1.0 - w) * p


def transition_probability(u, inp: InputSpec, h: Sequence[int], model: Model | str,
                           w: float | None = None) -> float:
    """Probability of output occupations ``h`` for the given input and statistics.

    ``w`` is only meaningful for ``model="mixed"``: it weights the fully
    indistinguishable component of a partial-distinguishability mixture.
    """
    u = np.asarray(u)
    model = _check_model(inp, model, w)
    h = tuple(int(x) for x in h)
    if len(h) != inp.m or u.shape != (inp.m, inp.m):
        raise ValidationError(f"output vector and unitary must match m={inp.m}")
    if any(x < 0 for x in h) or sum(h) != inp.n:
        raise ValidationError(f"output {h} does not hold {inp.n} particles")
    return _probability(_Scatterer(u), inp.occupations, inp.species_groups(), h, model, w)


def count_outputs(n: int, m: int) -> int:
    return math.comb(n + m - 1, n)


def enumerate_outputs(n: int, m: int, guard: int = STATE_GUARD) -> list[tuple[int, ...]]:
    """All occupation vectors of n particles in m modes, colexicographic order.

    Colex means vectors are compared from the last mode backwards, so for
    n=2, m=2 the order is (2,0), (1,1), (0,2).
    """
    if n < 0 or m < 1:
        raise DomainError(f"invalid (n, m) = ({n}, {m})")
    total = count_outputs(n, m)
    if total > guard:
        raise ResourceError(f"{total} output states for n={n}, m={m} exceeds the guard of {guard}")
    return list(_colex_states(n, m))


@lru_cache(maxsize=64)
def _colex_states(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    states = [_occupations((k + 1 for k in modes), m)
              for modes in combinations_with_replacement(range(m), n)]
    states.sort(key=lambda s: s[::-1])
    return tuple(states)


def output_distribution(u, inp: InputSpec, model: Model | str,
                        w: float | None = None) -> dict[tuple[int, ...], float]:
    u = np.asarray(u)
    model = _check_model(inp, model, w)
    if u.shape != (inp.m, inp.m):
        raise ValidationError(f"unitary shape {u.shape} does not match m={inp.m}")
    sc = _Scatterer(u)
    g, groups = inp.occupations, inp.species_groups()
    states = enumerate_outputs(inp.n, inp.m)
    return {h: _probability(sc, g, groups, h, model, w) for h in states}


def write_distribution_csv(dist: dict[tuple[int, ...], float], path: str | Path | None = None,
                           stream=None) -> None:
    if not dist:
        raise ValidationError("empty distribution")
    m = len(next(iter(dist)))
    fh = open(path, "w", newline="") if path is not None else stream
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"h{k}" for k in range(1, m + 1)] + ["probability"])
        for h, p in dist.items():
            writer.writerow([*h, repr(float(p))])
    finally:
        if path is not None:
            fh.close()


def read_distribution_csv(path: str | Path) -> dict[tuple[int, ...], float]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != "probability":
            raise ValidationError(f"{path}: expected header h1,...,hm,probability")
        return {tuple(int(x) for x in row[:-1]): float(row[-1]) for row in reader if row}
