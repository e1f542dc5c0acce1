"""Compile coupler / phase-shifter layouts into interferometer unitaries.

Conventions
-----------
* Modes are 1-indexed, as in the ``(1,2)`` input labels used for the chips.
* A coupler with transmissivity ``T`` (the bar, same-mode probability) acts on
  adjacent modes ``(a, a+1)`` as ``[[sqrt(T), i sqrt(1-T)], [i sqrt(1-T), sqrt(T)]]``.
* A phase shifter multiplies its mode by ``exp(i phi)``.
* Element list order is propagation order, so the compiled matrix is
  ``E_N @ ... @ E_1``.

The ideal three-mode tritter is the normalized 3x3 discrete Fourier matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DomainError, ValidationError
from .matrix import CONSTRUCTED_TOL, as_unitary, rng_from_seed


@dataclass(frozen=True)
class Coupler:
    a: int
    b: int
    t: float = 0.5

    def problems(self, m: int) -> list[str]:
        out = []
        if not (1 <= self.a <= m and 1 <= self.b <= m):
            out.append(f"modes ({self.a},{self.b}) outside [1,{m}]")
        if self.b != self.a + 1:
            out.append(f"coupler must join adjacent modes a, a+1; got ({self.a},{self.b})")
        if not 0.0 <= self.t <= 1.0:
            out.append(f"transmissivity {self.t} outside [0,1]")
        return out


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phi: float

    def problems(self, m: int) -> list[str]:
        if not 1 <= self.mode <= m:
            return [f"mode {self.mode} outside [1,{m}]"]
        if not np.isfinite(self.phi):
            return [f"phase {self.phi} is not finite"]
        return []


Element = Union[Coupler, PhaseShifter]


@dataclass
class CircuitSpec:
    m: int
    elements: list[Element] = field(default_factory=list)

    def __add__(self, other: "CircuitSpec") -> "CircuitSpec":
        if self.m != other.m:
            raise ValidationError(f"cannot concatenate circuits on {self.m} and {other.m} modes")
        return CircuitSpec(self.m, list(self.elements) + list(other.elements))

    def validate(self) -> None:
        if self.m < 1:
            raise ValidationError(f"circuit needs at least one mode, got m={self.m}")
        bad = []
        for idx, el in enumerate(self.elements):
            bad.extend(f"element {idx} {el!r}: {p}" for p in el.problems(self.m))
        if bad:
            raise ValidationError("invalid circuit:\n  " + "\n  ".join(bad))


def coupler_block(t: float) -> np.ndarray:
    s, c = np.sqrt(t), np.sqrt(1.0 - t)
    return np.array([[s, 1j * c], [1j * c, s]])


def element_matrix(el: Element, m: int) -> np.ndarray:
    u = np.eye(m, dtype=complex)
    if isinstance(el, Coupler):
        i = el.a - 1
        u[i:i + 2, i:i + 2] = coupler_block(el.t)
    else:
        u[el.mode - 1, el.mode - 1] = np.exp(1j * el.phi)
    return u


def build_unitary(spec: CircuitSpec) -> np.ndarray:
    spec.validate()
    u = np.eye(spec.m, dtype=complex)
    for el in spec.elements:
        # Left-multiply an embedded 2x2 / 1x1 block: only the touched rows change.
        if isinstance(el, Coupler):
            i = el.a - 1
            u[i:i + 2, :] = coupler_block(el.t) @ u[i:i + 2, :]
        else:
            u[el.mode - 1, :] *= np.exp(1j * el.phi)
    return as_unitary(u, CONSTRUCTED_TOL)


# -- presets -----------------------------------------------------------------


def qft_tritter() -> np.ndarray:
    """Balanced three-splitter ``U_jk = w^((j-1)(k-1)) / sqrt(3)``, ``w = exp(2 pi i / 3)``."""
    j, k = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
    return as_unitary(np.exp(2j * np.pi * j * k / 3) / np.sqrt(3.0))


def balanced_coupler() -> CircuitSpec:
    return CircuitSpec(2, [Coupler(1, 2, 0.5)])


def brickwall(m: int, layers: int, t: float = 0.5, phase_seed: int | None = None) -> CircuitSpec:
    """Layered nearest-neighbour mesh.

    Odd layers couple (1,2),(3,4),..., even layers (2,3),(4,5),...; couplers
    that would run past mode ``m`` are dropped. Each layer is followed by a
    phase shifter on every mode: all zero ("equal phases") when
    ``phase_seed`` is None, otherwise uniform on [0, 2 pi) from that seed
    ("static disorder").
    """
    if m < 2:
        raise DomainError(f"brickwall needs m >= 2, got {m}")
    if layers < 1:
        raise DomainError(f"brickwall needs layers >= 1, got {layers}")
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"transmissivity {t} outside [0,1]")
    rng = rng_from_seed(phase_seed) if phase_seed is not None else None
    elements: list[Element] = []
    for layer in range(1, layers + 1):
        start = 1 if layer % 2 == 1 else 2
        elements.extend(Coupler(a, a + 1, t) for a in range(start, m, 2))
        phases = rng.uniform(0.0, 2 * np.pi, m) if rng is not None else np.zeros(m)
        elements.extend(PhaseShifter(k + 1, float(phases[k])) for k in range(m))
    return CircuitSpec(m, elements)


def random_phase_network(m: int, layers: int, seed: int) -> CircuitSpec:
    return brickwall(m, layers, 0.5, phase_seed=seed)


PRESETS = ("balanced_coupler", "qft_tritter", "brickwall", "random_phase_network")


def make_preset(name: str, m: int | None = None, layers: int | None = None,
                t: float = 0.5, seed: int | None = None) -> CircuitSpec | np.ndarray:
    if name == "balanced_coupler":
        return balanced_coupler()
    if name == "qft_tritter":
        return qft_tritter()
    if name in ("brickwall", "random_phase_network"):
        if m is None or layers is None:
            raise DomainError(f"preset {name} needs both m and layers")
        if name == "brickwall":
            return brickwall(m, layers, t, seed)
        if seed is None:
            raise DomainError("random_phase_network needs a seed")
        return random_phase_network(m, layers, seed)
    raise DomainError(f"unknown preset {name!r}; choose one of {', '.join(PRESETS)}")


# -- circuit files -----------------------------------------------------------


def circuit_to_json(spec: CircuitSpec) -> dict:
    els = []
    for el in spec.elements:
        if isinstance(el, Coupler):
            els.append({"type": "coupler", "a": el.a, "b": el.b, "t": el.t})
        else:
            els.append({"type": "phase", "mode": el.mode, "phi": el.phi})
    return {"m": spec.m, "elements": els}


def circuit_from_json(doc: dict) -> CircuitSpec:
    try:
        m = int(doc["m"])
        elements: list[Element] = []
        for idx, raw in enumerate(doc["elements"]):
            kind = raw.get("type")
            if kind == "coupler":
                elements.append(Coupler(int(raw["a"]), int(raw["b"]), float(raw["t"])))
            elif kind == "phase":
                elements.append(PhaseShifter(int(raw["mode"]), float(raw["phi"])))
            else:
                raise ValidationError(f"element {idx}: unknown type {kind!r}")
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed circuit document: {exc}") from exc
    spec = CircuitSpec(m, elements)
    spec.validate()
    return spec


def load_circuit(path: str | Path) -> CircuitSpec:
    return circuit_from_json(json.loads(Path(path).read_text()))


def save_circuit(spec: CircuitSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(circuit_to_json(spec), indent=1) + "\n")
