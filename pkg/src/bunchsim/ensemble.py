"""Bunching statistics over Haar-random interferometers.

The closed form for the Haar-average bunching probability of n bosons in
distinct input modes of an m-mode interferometer is

    p_b(n, m) = 1 - prod_{a=0}^{n-1} (1 - a/m) / (1 + a/m),

valid for n <= m. :func:`haar_ensemble_scan` estimates the same quantity (for
any statistics model) by Monte Carlo. Sample ``k`` is drawn from
``sub_seed(seed, k)``, so a scan is reproducible bit for bit whatever the
number of workers.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bunching import bunching_probability
from .errors import DomainError, ResourceError, ValidationError
from .matrix import haar_sample, sub_seed
from .photonic import STATE_GUARD, InputSpec, Model, count_outputs, output_distribution

BAND_SIGMAS = 1.5
HIST_BINS = 50


def birthday_formula(n: int, m: int) -> float:
    if n < 1 or m < 1:
        raise DomainError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if n > m:
        raise DomainError(f"closed form holds for n <= m only, got n={n} > m={m}")
    # integer products keep the ratio exact up to the final division
    num = math.prod(m - a for a in range(n))
    den = math.prod(m + a for a in range(n))
    return 1.0 - num / den


@dataclass(frozen=True)
class EnsembleReport:
    n: int
    m: int
    samples: int
    seed: int
    model: str
    w: float | None
    mean: float
    std: float
    band_low: float
    band_high: float
    hist_edges: tuple[float, ...]
    hist_counts: tuple[int, ...]
    values: tuple[float, ...]

    def summary(self) -> dict:
        return {
            "n": self.n, "m": self.m, "samples": self.samples, "seed": self.seed,
            "model": self.model, "w": self.w, "mean": self.mean, "std": self.std,
            "band_low": self.band_low, "band_high": self.band_high,
            "histogram": {"edges": list(self.hist_edges), "counts": list(self.hist_counts)},
        }


def _sample_pb(m: int, inp: InputSpec, model: Model, w: float | None, seed: int, k: int) -> float:
    u = haar_sample(m, sub_seed(seed, k))
    return bunching_probability(output_distribution(u, inp, model, w))


def _run_chunk(args) -> list[float]:
    m, inp, model, w, seed, ks = args
    return [_sample_pb(m, inp, model, w, seed, k) for k in ks]


def haar_ensemble_scan(n: int, m: int, inp: InputSpec, samples: int, seed: int,
                       model: Model | str = Model.BOSON, w: float | None = None,
                       workers: int = 1) -> EnsembleReport:
    model = Model(model)
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    if inp.n != n or inp.m != m:
        raise ValidationError(f"input describes n={inp.n}, m={inp.m} but scan asked for n={n}, m={m}")
    if count_outputs(n, m) > STATE_GUARD:
        raise ResourceError(f"n={n}, m={m} exceeds the output-state guard of {STATE_GUARD}")
    # Fail fast on model/input incompatibility before spawning work.
    output_distribution(np.eye(m), inp, model, w)

    if workers <= 1:
        values = [_sample_pb(m, inp, model, w, seed, k) for k in range(samples)]
    else:
        chunks = np.array_split(np.arange(samples), workers * 4)
        jobs = [(m, inp, model, w, seed, [int(k) for k in c]) for c in chunks if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = [v for part in pool.map(_run_chunk, jobs) for v in part]

    arr = np.asarray(values, dtype=float)
    mean = float(np.mean(arr))
    std = float(np.std(arr, ddof=1))
    counts, edges = np.histogram(np.clip(arr, 0.0, 1.0), bins=HIST_BINS, range=(0.0, 1.0))
    return EnsembleReport(
        n=n, m=m, samples=samples, seed=int(seed), model=model.value, w=w,
        mean=mean, std=std,
        band_low=mean - BAND_SIGMAS * std, band_high=mean + BAND_SIGMAS * std,
        hist_edges=tuple(float(e) for e in edges), hist_counts=tuple(int(c) for c in counts),
        values=tuple(float(v) for v in arr),
    )


def write_ensemble_csv(report: EnsembleReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "p_b"])
        for k, v in enumerate(report.values):
            writer.writerow([k, repr(v)])


def write_summary_json(report: EnsembleReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.summary(), indent=1) + "\n")
