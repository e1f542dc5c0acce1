import io
import math

import numpy as np
import pytest

from bunchsim.circuit import balanced_coupler, build_unitary, qft_tritter
from bunchsim.errors import ModelViolationError, ResourceError, ValidationError
from bunchsim.photonic import (
    InputSpec,
    Model,
    count_outputs,
    enumerate_outputs,
    output_distribution,
    read_distribution_csv,
    scattering_submatrix,
    transition_probability,
    write_distribution_csv,
)
from tests.oracles import boson_fock_oracle, leibniz_det, random_unitary

COUPLER = build_unitary(balanced_coupler())


def _random_case(rng, max_n=4, max_m=8, distinct=False):
    m = int(rng.integers(2, max_m + 1))
    n = int(rng.integers(1, min(max_n, m) + 1))
    if distinct:
        modes = rng.choice(np.arange(1, m + 1), size=n, replace=False)
    else:
        modes = rng.integers(1, m + 1, size=n)
    return random_unitary(rng, m), [int(x) for x in modes]


# -- InputSpec / enumeration -------------------------------------------------


def test_input_spec_derived_fields():
    inp = InputSpec.from_modes(4, [4, 1, 2, 1, 4, 4])
    assert inp.occupations == (2, 1, 0, 3)
    assert inp.r_tuple == (1, 1, 2, 4, 4, 4)
    assert inp.n == 6


def test_input_spec_validation():
    with pytest.raises(ValidationError):
        InputSpec.from_modes(3, [1, 4])
    with pytest.raises(ValidationError):
        InputSpec.from_modes(3, [1, 2], ["a"])


def test_enumerate_small():
    assert enumerate_outputs(1, 2) == [(1, 0), (0, 1)]
    assert enumerate_outputs(2, 2) == [(2, 0), (1, 1), (0, 2)]


def test_enumerate_count_and_uniqueness():
    states = enumerate_outputs(3, 5)
    assert len(states) == 35 == math.comb(7, 3)
    assert len(set(states)) == 35
    assert all(sum(s) == 3 and len(s) == 5 for s in states)


def test_enumerate_colex():
    states = enumerate_outputs(3, 4)
    keys = [s[::-1] for s in states]
    assert keys == sorted(keys)


def test_enumerate_guard():
    assert count_outputs(10, 40) > 10**7
    with pytest.raises(ResourceError):
        enumerate_outputs(10, 40)


# -- scattering matrix ---------------------------------------------------------


def test_submatrix_no_repetition(rng):
    u = random_unitary(rng, 4)
    np.testing.assert_array_equal(scattering_submatrix(u, (1, 1, 1, 1), (1, 1, 1, 1)), u)


def test_submatrix_full_bunching_rows(rng):
    u = random_unitary(rng, 5)
    a = scattering_submatrix(u, (1, 1, 0, 1, 0), (0, 0, 3, 0, 0))
    # A_{i,k} = U_{j, r_k} with j = 3, r = (1, 2, 4)
    np.testing.assert_array_equal(a, np.tile(u[2, [0, 1, 3]], (3, 1)))


def test_submatrix_repetition_by_hand():
    u = np.arange(9).reshape(3, 3) * (1 + 1j)
    a = scattering_submatrix(u, (2, 1, 0), (1, 1, 1))
    # input column 1 twice, column 2 once; every output row once
    expected = np.array([[u[0, 0], u[0, 0], u[0, 1]],
                         [u[1, 0], u[1, 0], u[1, 1]],
                         [u[2, 0], u[2, 0], u[2, 1]]])
    np.testing.assert_array_equal(a, expected)


def test_submatrix_sum_mismatch():
    with pytest.raises(ValidationError):
        scattering_submatrix(np.eye(3), (1, 1, 0), (1, 0, 0))


# -- transition probabilities --------------------------------------------------


@pytest.mark.parametrize("model", list(Model))
def test_single_particle_rule(rng, model):
    u = random_unitary(rng, 4)
    inp = InputSpec.from_modes(4, [3])
    for i in range(1, 5):
        h = tuple(int(k == i) for k in range(1, 5))
        assert transition_probability(u, inp, h, model) == pytest.approx(abs(u[i - 1, 2]) ** 2, abs=1e-15)


def test_hong_ou_mandel_dip():
    inp = InputSpec.from_modes(2, [1, 2])
    assert transition_probability(COUPLER, inp, (1, 1), "boson") == pytest.approx(0, abs=1e-15)
    assert transition_probability(COUPLER, inp, (2, 0), "boson") == pytest.approx(0.5, abs=1e-15)
    assert transition_probability(COUPLER, inp, (1, 1), "classical") == pytest.approx(0.5, abs=1e-15)
    assert transition_probability(COUPLER, inp, (1, 1), "fermion") == pytest.approx(1, abs=1e-15)


def test_tritter_coincidence():
    inp = InputSpec.from_modes(3, [1, 2, 3])
    # |per(F3 / sqrt 3)|^2 = |-3 / 3^1.5|^2 = 1/3
    assert transition_probability(qft_tritter(), inp, (1, 1, 1), "boson") == pytest.approx(1 / 3, abs=1e-14)


def test_fermion_rejects_repeated_input():
    inp = InputSpec.from_modes(3, [1, 1])
    with pytest.raises(ModelViolationError):
        transition_probability(np.eye(3), inp, (1, 1, 0), "fermion")


def test_bad_output_vector():
    inp = InputSpec.from_modes(3, [1, 2])
    with pytest.raises(ValidationError):
        transition_probability(np.eye(3), inp, (1, 0, 0), "boson")
    with pytest.raises(ValidationError):
        transition_probability(np.eye(3), inp, (1, 1), "boson")


def test_weight_only_for_mixed():
    inp = InputSpec.from_modes(2, [1, 2])
    with pytest.raises(ValidationError):
        output_distribution(COUPLER, inp, "boson", w=0.5)


# -- distributions vs oracles --------------------------------------------------


def test_boson_matches_fock_oracle(rng):
    for _ in range(60):
        u, modes = _random_case(rng)
        inp = InputSpec.from_modes(u.shape[0], modes)
        dist = output_distribution(u, inp, Model.BOSON)
        oracle = boson_fock_oracle(u, [k - 1 for k in modes])
        assert set(oracle) == set(dist)
        for h, p in dist.items():
            assert p == pytest.approx(oracle[h], abs=1e-12)


def test_fermion_matches_leibniz(rng):
    for _ in range(30):
        u, modes = _random_case(rng, distinct=True)
        inp = InputSpec.from_modes(u.shape[0], modes)
        for h, p in output_distribution(u, inp, Model.FERMION).items():
            if max(h) >= 2:
                assert p == 0.0
            else:
                rows = [i for i, c in enumerate(h) if c]
                d = leibniz_det(u[np.ix_(rows, sorted(k - 1 for k in modes))])
                assert p == pytest.approx(abs(d) ** 2, abs=1e-12)


def test_classical_matches_monte_carlo():
    rng = np.random.default_rng(77)
    u = random_unitary(rng, 4)
    modes = [1, 2, 2]
    inp = InputSpec.from_modes(4, modes)
    dist = output_distribution(u, inp, Model.CLASSICAL)
    trials = 10**6
    probs = np.abs(u) ** 2
    counts = np.zeros((trials, 4), dtype=np.int64)
    for k in modes:
        exits = rng.choice(4, size=trials, p=probs[:, k - 1] / probs[:, k - 1].sum())
        counts[np.arange(trials), exits] += 1
    keys, freq = np.unique(counts, axis=0, return_counts=True)
    observed = {tuple(int(x) for x in key): c for key, c in zip(keys, freq)}
    for h, p in dist.items():
        sigma = math.sqrt(trials * p * (1 - p))
        assert abs(observed.get(h, 0) - trials * p) <= 5 * sigma + 1e-9


@pytest.mark.parametrize("model", list(Model))
def test_normalization(rng, model):
    for _ in range(200):
        u, modes = _random_case(rng, distinct=(model is Model.FERMION))
        labels = [str(x) for x in rng.integers(0, 3, size=len(modes))]
        inp = InputSpec.from_modes(u.shape[0], modes, labels)
        assert math.fsum(output_distribution(u, inp, model).values()) == pytest.approx(1, abs=1e-9)


def test_mixed_single_species_is_boson(rng):
    for _ in range(20):
        u, modes = _random_case(rng)
        inp = InputSpec.from_modes(u.shape[0], modes, ["x"] * len(modes))
        b = output_distribution(u, inp, Model.BOSON)
        mx = output_distribution(u, inp, Model.MIXED)
        for h in b:
            assert abs(b[h] - mx[h]) <= 1e-12


def test_mixed_distinct_species_is_classical(rng):
    for _ in range(20):
        u = random_unitary(rng, 4)
        modes = [int(x) for x in rng.integers(1, 5, size=3)]
        inp = InputSpec.from_modes(4, modes, ["a", "b", "c"])
        c = output_distribution(u, inp, Model.CLASSICAL)
        mx = output_distribution(u, inp, Model.MIXED)
        for h in c:
            assert abs(c[h] - mx[h]) <= 1e-12


def test_species_relabel_invariance(rng):
    u = random_unitary(rng, 5)
    a = output_distribution(u, InputSpec.from_modes(5, [1, 2, 4, 5], ["p", "q", "p", "r"]), Model.MIXED)
    b = output_distribution(u, InputSpec.from_modes(5, [1, 2, 4, 5], ["z", "y", "z", "x"]), Model.MIXED)
    for h in a:
        assert a[h] == pytest.approx(b[h], abs=1e-14)


def test_mixed_two_plus_one_matches_oracle(rng):
    # Two indistinguishable photons convolved with one distinguishable photon.
    u = random_unitary(rng, 4)
    pair = boson_fock_oracle(u, [0, 1])
    single = boson_fock_oracle(u, [2])
    expected: dict = {}
    for h1, p1 in pair.items():
        for h2, p2 in single.items():
            h = tuple(a + b for a, b in zip(h1, h2))
            expected[h] = expected.get(h, 0) + p1 * p2
    mx = output_distribution(u, InputSpec.from_modes(4, [1, 2, 3], "aab"), Model.MIXED)
    for h, p in mx.items():
        assert p == pytest.approx(expected[h], abs=1e-12)


def test_weighted_mixture_is_linear(rng):
    u = random_unitary(rng, 3)
    inp = InputSpec.from_modes(3, [1, 2, 3], "aab")
    b = output_distribution(u, inp, Model.BOSON)
    mx = output_distribution(u, inp, Model.MIXED)
    w = 0.3
    mixed = output_distribution(u, inp, Model.MIXED, w=w)
    for h in b:
        assert mixed[h] == pytest.approx(w * b[h] + (1 - w) * mx[h], abs=1e-15)


def test_fermion_exclusion_bitwise(rng):
    for _ in range(50):
        u, modes = _random_case(rng, distinct=True)
        inp = InputSpec.from_modes(u.shape[0], modes)
        dist = output_distribution(u, inp, Model.FERMION)
        assert all(p == 0.0 for h, p in dist.items() if max(h) >= 2)


def test_boson_equals_classical_single_particle(rng):
    u = random_unitary(rng, 6)
    inp = InputSpec.from_modes(6, [4])
    b, c = output_distribution(u, inp, "boson"), output_distribution(u, inp, "classical")
    for h in b:
        assert b[h] == pytest.approx(c[h], rel=1e-14)


def test_csv_round_trip(tmp_path, rng):
    u = random_unitary(rng, 3)
    dist = output_distribution(u, InputSpec.from_modes(3, [1, 2]), Model.BOSON)
    path = tmp_path / "d.csv"
    write_distribution_csv(dist, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "h1,h2,h3,probability"
    assert lines[1].startswith("2,0,0,")
    assert read_distribution_csv(path) == dist


def test_csv_to_stream():
    buf = io.StringIO()
    write_distribution_csv({(1, 0): 0.25, (0, 1): 0.75}, stream=buf)
    assert buf.getvalue() == "h1,h2,probability\n1,0,0.25\n0,1,0.75\n"
