"""Unitary matrices: validation, Haar sampling, composition and JSON persistence.

Matrices are plain ``complex128`` numpy arrays; "unitary" is a checked
property rather than a wrapper type. Tolerances are max-norm residuals of
``U^dag U - I``.

Haar sampling follows the Ginibre + QR recipe *with* the phase correction:
the columns of ``Q`` are multiplied by ``r_jj / |r_jj|``. Without that step
LAPACK's sign convention for ``R`` leaks into ``Q`` and the result is not
Haar distributed.

Randomness is counter-based (Philox). Ensemble member ``k`` of a run seeded
with ``master`` uses :func:`sub_seed`, so every sample is reproducible on its
own regardless of evaluation order or worker count.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError, NotUnitaryError, ValidationError

CONSTRUCTED_TOL = 1e-10
COMPOSED_TOL = 1e-9
LOADED_TOL = 1e-8

_SEED_MAX = 2**64


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_MAX:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_check_seed(seed))))


def sub_seed(master: int, k: int) -> int:
    """Derive the seed of ensemble member ``k`` by hashing ``(master, k)``."""
    ss = np.random.SeedSequence([_check_seed(master), int(k)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def unitarity_residual(mat) -> float:
    a = np.asarray(mat)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    eye = np.eye(a.shape[0])
    return float(np.max(np.abs(a.conj().T @ a - eye))) if a.size else 0.0


def check_unitary(mat, tol: float = CONSTRUCTED_TOL) -> bool:
    """True iff ``max |(U^dag U - I)_ij| <= tol``. Non-finite entries give False."""
    a = np.asarray(mat)
    res = unitarity_residual(a)
    return bool(np.all(np.isfinite(a))) and res <= tol


def as_unitary(mat, tol: float = CONSTRUCTED_TOL) -> np.ndarray:
    """Return ``mat`` as a complex array, raising :class:`NotUnitaryError` if it is not unitary."""
    a = np.asarray(mat, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    res = unitarity_residual(a)
    if res > tol:
        raise NotUnitaryError(res, tol)
    return a


def haar_sample(m: int, seed: int) -> np.ndarray:
    if m < 1:
        raise DomainError(f"number of modes must be >= 1, got {m}")
    rng = rng_from_seed(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def multiply(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2:
        raise DimensionError(f"cannot multiply unitaries of shapes {a.shape} and {b.shape}")
    return as_unitary(a @ b, COMPOSED_TOL)


def unitary_to_json(u) -> dict:
    u = np.asarray(u, dtype=complex)
    return {"m": int(u.shape[0]), "re": u.real.tolist(), "im": u.imag.tolist()}


def unitary_from_json(doc: dict, tol: float = LOADED_TOL) -> np.ndarray:
    try:
        m = int(doc["m"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed unitary document: {exc}") from exc
    if re.shape != (m, m) or im.shape != (m, m):
        raise DimensionError(f"declared m={m} but re/im have shapes {re.shape}/{im.shape}")
    return as_unitary(re + 1j * im, tol)


def save_unitary(u, path: str | Path) -> None:
    Path(path).write_text(json.dumps(unitary_to_json(u)) + "\n")


def load_unitary(path: str | Path, tol: float = LOADED_TOL) -> np.ndarray:
    return unitary_from_json(json.loads(Path(path).read_text()), tol)
