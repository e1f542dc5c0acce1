import json

import numpy as np
import pytest

from bunchsim.errors import DimensionError, DomainError, NotUnitaryError
from bunchsim.matrix import (
    check_unitary,
    haar_sample,
    load_unitary,
    multiply,
    save_unitary,
    sub_seed,
)

S = np.sqrt(0.5)
COUPLER = np.array([[S, 1j * S], [1j * S, S]])


def test_check_unitary_identity():
    assert check_unitary(np.eye(3), 1e-12)


def test_check_unitary_rank_one():
    assert not check_unitary(np.ones((2, 2)) / 2, 1e-10)


def test_check_unitary_balanced_coupler():
    # U^dag U = [[1/2 + 1/2, -i/2 + i/2], ...] = I
    assert check_unitary(COUPLER, 1e-10)


def test_check_unitary_rejects_non_square():
    with pytest.raises(DimensionError):
        check_unitary(np.ones((2, 3)))


def test_check_unitary_nan_is_false():
    a = np.eye(2, dtype=complex)
    a[0, 1] = np.nan
    assert not check_unitary(a)


def test_haar_single_mode_is_phase():
    u = haar_sample(1, 3)
    assert u.shape == (1, 1)
    assert abs(abs(u[0, 0]) - 1) < 1e-14


def test_haar_deterministic():
    np.testing.assert_array_equal(haar_sample(4, 99), haar_sample(4, 99))
    assert not np.array_equal(haar_sample(4, 99), haar_sample(4, 100))


def test_haar_rejects_zero_modes():
    with pytest.raises(DomainError):
        haar_sample(0, 1)


def test_seed_range():
    with pytest.raises(DomainError):
        haar_sample(2, -1)
    with pytest.raises(DomainError):
        haar_sample(2, 2**64)
    haar_sample(2, 2**64 - 1)


def test_sub_seed_distinct_and_stable():
    seeds = [sub_seed(5, k) for k in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds == [sub_seed(5, k) for k in range(1000)]


@pytest.mark.parametrize("m", range(1, 33))
def test_haar_unitary_many_seeds(m):
    assert all(check_unitary(haar_sample(m, s), 1e-10) for s in range(100))


def _haar_batch(m, count, master):
    return np.array([haar_sample(m, sub_seed(master, k)) for k in range(count)])


def test_haar_second_moment_m3():
    us = _haar_batch(3, 20000, 1)
    assert abs(np.mean(np.abs(us[:, 0, 0]) ** 2) - 1 / 3) < 0.01


@pytest.mark.parametrize("m,i,j", [(2, 0, 1), (4, 2, 3), (6, 5, 0)])
def test_haar_second_moment_bound(m, i, j):
    n = 4000
    us = _haar_batch(m, n, 17 + m)
    mean = np.mean(np.abs(us[:, i, j]) ** 2)
    assert abs(mean - 1 / m) <= 4 / np.sqrt(n) / m


def test_haar_first_moment_vanishes():
    # Without the R-phase correction the diagonal has a biased phase.
    us = _haar_batch(3, 4000, 2)
    assert abs(np.mean(us[:, 0, 0])) < 4 / np.sqrt(4000)


def test_haar_left_invariance_smoke():
    m, n = 4, 4000
    v = haar_sample(m, 12345)
    us = _haar_batch(m, n, 3)
    mean = np.mean(np.abs((v @ us)[:, 0, 0]) ** 2)
    assert abs(mean - 1 / m) <= 4 / np.sqrt(n) / m


def test_multiply_identity_and_inverse():
    u = haar_sample(5, 8)
    np.testing.assert_allclose(multiply(u, np.eye(5)), u, atol=0)
    np.testing.assert_allclose(multiply(u, u.conj().T), np.eye(5), atol=1e-10)


def test_multiply_two_couplers_is_full_swap():
    # [[s, is],[is, s]]^2 = [[s^2 - s^2, 2is^2], [2is^2, s^2 - s^2]] = [[0, i], [i, 0]]
    out = multiply(COUPLER, COUPLER)
    assert abs(out[0, 0]) ** 2 < 1e-30
    np.testing.assert_allclose(out, [[0, 1j], [1j, 0]], atol=1e-15)


def test_multiply_dim_mismatch():
    with pytest.raises(DimensionError):
        multiply(np.eye(2), np.eye(3))


def test_json_round_trip_exact(tmp_path):
    u = haar_sample(6, 42)
    path = tmp_path / "u.json"
    save_unitary(u, path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"m", "re", "im"} and doc["m"] == 6
    np.testing.assert_array_equal(load_unitary(path), u)


def test_loader_reports_residual(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"m": 2, "re": [[1, 0], [0, 1.001]], "im": [[0, 0], [0, 0]]}))
    with pytest.raises(NotUnitaryError) as exc:
        load_unitary(path)
    assert exc.value.residual == pytest.approx(0.002001, rel=1e-6)
    assert "2.001e-03" in str(exc.value)


def test_loader_tolerates_small_residual(tmp_path):
    path = tmp_path / "ok.json"
    path.write_text(json.dumps({"m": 2, "re": [[1, 0], [0, 1 + 1e-9]], "im": [[0, 0], [0, 0]]}))
    assert load_unitary(path).shape == (2, 2)


def test_loader_shape_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"m": 3, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}))
    with pytest.raises(DimensionError):
        load_unitary(path)
