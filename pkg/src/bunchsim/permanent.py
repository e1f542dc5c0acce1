"""Permanents and determinants of small square matrices.

``permanent_naive`` is the definition summed over all n! permutations and
serves as the test oracle. ``permanent_ryser`` is Ryser's inclusion-exclusion
formula walked in Gray-code order, so each of the 2^n subsets costs one column
update of the running row sums. ``permanent_glynn`` is an independent
cross-check with the same asymptotic cost.

Ryser and Glynn both cancel large signed terms. For matrices whose
permanent is tiny compared with the entry scale (e.g. rank-one matrices with
one small entry) the naive sum is markedly more accurate, which is why
:func:`permanent` keeps the naive sum for small n.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import DimensionError, SizeGuardError

NAIVE_MAX_N = 10
RYSER_MAX_N = 30
KAHAN_MIN_N = 16
AUTO_NAIVE_MAX_N = 6


def _square(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionError("matrix has non-finite entries")
    return a


@lru_cache(maxsize=None)
def _permutation_table(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp)


@lru_cache(maxsize=None)
def _permutation_pairs(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    return tuple(tuple(enumerate(p)) for p in itertools.permutations(range(n)))


def permanent_of_rows(rows: list[list]) -> complex:
    """Naive permanent of a small matrix given as nested Python lists (no validation)."""
    total = 0
    for pairs in _permutation_pairs(len(rows)):
        term = 1
        for i, j in pairs:
            term *= rows[i][j]
        total += term
    return complex(total)


def permanent_naive(a) -> complex:
    """Sum over all permutations of prod_i a[i, sigma(i)]. Guarded at n <= 10."""
    a = _square(a)
    n = a.shape[0]
    if n > NAIVE_MAX_N:
        raise SizeGuardError(f"permanent_naive is limited to n <= {NAIVE_MAX_N} (got {n}); use permanent_ryser")
    if n <= 4:
        return permanent_of_rows(a.tolist())
    perms = _permutation_table(n)
    return complex(a[np.arange(n), perms].prod(axis=1).sum())


def _kahan_add(total, comp, x):
    y = x - comp
    t = total + y
    return t, (t - total) - y


def permanent_ryser(a) -> complex:
    a = _square(a)
    n = a.shape[0]
    if n > RYSER_MAX_N:
        raise SizeGuardError(f"permanent_ryser is limited to n <= {RYSER_MAX_N} (got {n})")
    cols = [a[:, j].astype(complex) for j in range(n)]
    row_sums = np.zeros(n, dtype=complex)
    in_subset = [False] * n
    compensated = n >= KAHAN_MIN_N
    size = 0
    total = 0j
    comp = 0j
    # Gray code: step k flips the column indexed by the lowest set bit of k.
    for k in range(1, 2**n):
        j = (k & -k).bit_length() - 1
        if in_subset[j]:
            row_sums -= cols[j]
            size -= 1
        else:
            row_sums += cols[j]
            size += 1
        in_subset[j] = not in_subset[j]
        term = complex(np.prod(row_sums))
        if (n - size) % 2:
            term = -term
        if compensated:
            total, comp = _kahan_add(total, comp, term)
        else:
            total += term
    return total


def permanent_glynn(a) -> complex:
    """Glynn's formula with Gray-code sign updates; a cross-check for Ryser."""
    a = _square(a)
    n = a.shape[0]
    if n > RYSER_MAX_N:
        raise SizeGuardError(f"permanent_glynn is limited to n <= {RYSER_MAX_N} (got {n})")
    if n == 1:
        return complex(a[0, 0])
    a = a.astype(complex)
    # delta_0 is pinned to +1; the remaining n-1 signs run through a Gray code.
    col_sums = a.sum(axis=0)
    delta = np.ones(n)
    total = complex(np.prod(col_sums))
    sign = 1
    for k in range(1, 2 ** (n - 1)):
        i = (k & -k).bit_length()
        delta[i] = -delta[i]
        col_sums += 2 * delta[i] * a[i, :]
        sign = -sign
        total += sign * complex(np.prod(col_sums))
    return total / 2 ** (n - 1)


def permanent(a) -> complex:
    """Exact permanent, picking the algorithm by size."""
    a = _square(a)
    if a.shape[0] <= AUTO_NAIVE_MAX_N:
        return permanent_naive(a)
    return permanent_ryser(a)


def determinant(a) -> complex:
    """LU determinant with partial pivoting (LAPACK getrf via numpy)."""
    a = _square(a)
    return complex(np.linalg.det(a.astype(complex)))

