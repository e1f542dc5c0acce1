"""Self-checks behind ``bunchsim verify``.

Each check returns a :class:`CheckResult`; nothing here raises on a failed
check, so the CLI can report every failure in one run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bunching import bunching_probability, full_bunching_ratio, theoretical_ratio
from .matrix import haar_sample, rng_from_seed, sub_seed
from .permanent import permanent_naive, permanent_ryser
from .photonic import InputSpec, Model, output_distribution

RATIO_RTOL = 1e-9
ORACLE_RTOL = 1e-9
NORM_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def random_input(rng: np.random.Generator, m: int, n: int, repeated: bool) -> InputSpec:
    """Random input of n particles; ``repeated`` forces some g_k >= 2."""
    if repeated or n > m:
        head = [int(x) for x in rng.integers(1, m + 1, size=n - 1)]
        modes = head + [head[0]]
    else:
        modes = [int(x) for x in rng.choice(np.arange(1, m + 1), size=n, replace=False)]
    return InputSpec.from_modes(m, modes)


def ratio_sweep(seed: int = 2013, instances: int = 200) -> CheckResult:
    worst = 0.0
    defined = undefined = repeated_inputs = 0
    for k in range(instances):
        rng = rng_from_seed(sub_seed(seed, k))
        m = int(rng.integers(2, 9))
        n = int(rng.integers(2, 5))
        inp = random_input(rng, m, n, repeated=bool(k % 2))
        repeated_inputs += max(inp.occupations) >= 2
        u = haar_sample(m, sub_seed(seed, instances + k))
        expected = theoretical_ratio(inp)
        for j in range(1, m + 1):
            r = full_bunching_ratio(u, inp, j)
            if r is None:
                undefined += 1
                continue
            defined += 1
            worst = max(worst, abs(r - expected) / expected)
    ok = worst <= RATIO_RTOL and defined > 0
    return CheckResult(
        "full-bunching ratio n!/prod g!",
        ok,
        f"{instances} unitaries ({repeated_inputs} with repeated inputs), {defined} ratios, "
        f"{undefined} undefined, max rel err {worst:.2e} (tol {RATIO_RTOL:.0e})",
    )


def oracle_equivalence(seed: int = 7, count: int = 500, max_n: int = 9) -> CheckResult:
    rng = rng_from_seed(seed)
    worst = 0.0
    for k in range(count):
        n = 1 + k % max_n
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        ref = permanent_naive(a)
        worst = max(worst, abs(permanent_ryser(a) - ref) / abs(ref))
    w = np.exp(2j * np.pi / 3)
    fourier = np.array([[w ** (j * k) for k in range(3)] for j in range(3)])
    f3 = permanent_ryser(fourier)
    f3_ok = abs(f3 - (-3)) <= 1e-12
    return CheckResult(
        "Ryser vs naive permanent",
        worst <= ORACLE_RTOL and f3_ok,
        f"{count} matrices n<={max_n}, max rel err {worst:.2e}; per(F3) = {f3.real:.12g}{f3.imag:+.1e}j",
    )


def fermion_exclusion(seed: int = 11, instances: int = 50) -> CheckResult:
    rng = rng_from_seed(seed)
    nonzero = 0
    worst_norm = 0.0
    for k in range(instances):
        n = 2 + k % 2
        m = int(rng.integers(n, 9))
        inp = random_input(rng, m, n, repeated=False)
        dist = output_distribution(haar_sample(m, sub_seed(seed, k)), inp, Model.FERMION)
        nonzero += bunching_probability(dist) != 0.0
        worst_norm = max(worst_norm, abs(math.fsum(dist.values()) - 1.0))
    return CheckResult(
        "fermionic exclusion",
        nonzero == 0 and worst_norm <= NORM_TOL,
        f"{instances} unitaries, {nonzero} with p_b != 0, max |sum - 1| {worst_norm:.1e}",
    )


def normalization(seed: int = 5, instances: int = 200) -> CheckResult:
    rng = rng_from_seed(seed)
    worst = 0.0
    for k in range(instances):
        m = int(rng.integers(2, 9))
        n = int(rng.integers(1, min(4, m) + 1))
        base = random_input(rng, m, n, repeated=False)
        labels = [str(x) for x in rng.integers(0, 2, size=n)]
        inp = InputSpec.from_modes(m, [p for p, _ in base.particles], labels)
        u = haar_sample(m, sub_seed(seed, k))
        for model in Model:
            dist = output_distribution(u, inp, model)
            worst = max(worst, abs(math.fsum(dist.values()) - 1.0))
    return CheckResult(
        "normalization of all models",
        worst <= NORM_TOL,
        f"{instances} instances x {len(Model)} models, max |sum - 1| {worst:.1e}",
    )


def run_all(seed: int | None = None) -> list[CheckResult]:
    if seed is None:
        return [ratio_sweep(), oracle_equivalence(), fermion_exclusion(), normalization()]
    return [ratio_sweep(seed), oracle_equivalence(seed), fermion_exclusion(seed), normalization(seed)]
