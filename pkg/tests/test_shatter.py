import math

import numpy as np
import pytest

from margin_spectra.optim import SingularGramError, min_norm_interpolator
from margin_spectra.shatter import (
    EnumerationCapError,
    SampleMatrix,
    SubsetBudgetError,
    fat_shattering_search,
    fat_shattering_upper_bound,
    lambda_min_sufficient,
    read_points_csv,
    shatter_at_origin,
    shatter_with_offsets,
    shatter_witness,
    write_points_csv,
)


def constructive_verdict(X, gamma):
    """Oracle: per labeling, build the min-norm interpolator of (X/gamma, y)
    and test whether its norm stays within the unit ball."""
    m = X.shape[0]
    try:
        for mask in range(1 << (m - 1)):
            y = np.ones(m)
            for j in range(m - 1):
                if (mask >> j) & 1:
                    y[j + 1] = -1.0
            w = min_norm_interpolator(X / gamma, y)
            if np.linalg.norm(w) > 1.0 + 1e-9:
                return False
        return True
    except SingularGramError:
        return False


def random_instance(rng):
    m = int(rng.integers(1, 7))
    d = int(rng.integers(m, 9))
    scale = 10.0 ** rng.uniform(-1, 1)
    return rng.standard_normal((m, d)) * scale * math.sqrt(d)


class TestShatterAtOrigin:
    def test_orthogonal_rows_boundary(self):
        cert = shatter_at_origin(math.sqrt(2) * np.eye(2), 1.0)
        assert cert.shattered
        assert cert.worst_value == pytest.approx(1.0)

    def test_duplicate_rows_singular(self):
        cert = shatter_at_origin(np.array([[1.0, 2.0], [1.0, 2.0]]), 1.0)
        assert not cert.shattered
        assert cert.gram_condition <= 1e-10

    def test_unit_rows_not_shattered(self):
        cert = shatter_at_origin(np.eye(2), 1.0)
        assert not cert.shattered
        assert cert.worst_value == pytest.approx(2.0)

    def test_diagonal_gap_instance(self):
        cert = shatter_at_origin(np.array([[1.1, 0], [0, 10.0]]), 1.0)
        assert cert.shattered
        assert cert.worst_value == pytest.approx(1 / 1.21 + 1 / 100)

    def test_m_exceeding_d_not_shattered(self):
        cert = shatter_at_origin(np.ones((3, 2)) + np.eye(3, 2), 1.0)
        assert not cert.shattered

    def test_cap_error(self):
        with pytest.raises(EnumerationCapError):
            shatter_at_origin(np.eye(5), 1.0, cap=4)

    def test_witness_margins(self):
        X = np.array([[1.1, 0], [0, 10.0]])
        cert = shatter_at_origin(X, 1.0)
        assert cert.shattered
        for mask in range(4):
            y = np.array([1.0 if mask & 1 else -1.0, 1.0 if mask & 2 else -1.0])
            w = shatter_witness(X, 1.0, y)
            assert np.linalg.norm(w) <= 1 + 1e-8
            assert np.all(y * (X @ w) >= 1.0 - 1e-8)

    def test_matches_constructive_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            X = random_instance(rng)
            cert = shatter_at_origin(X, 1.0)
            assert cert.shattered == constructive_verdict(X, 1.0)

    def test_certificate_serializes(self):
        cert = shatter_at_origin(math.sqrt(2) * np.eye(2), 1.0)
        d = cert.to_dict()
        assert d["shattered"] is True
        assert len(d["worst_labeling"]) == 2


class TestLambdaMinSufficient:
    def test_orthogonal_boundary(self):
        assert lambda_min_sufficient(math.sqrt(2) * np.eye(2), 1.0)

    def test_one_sided_gap(self):
        X = np.array([[1.1, 0], [0, 10.0]])
        assert not lambda_min_sufficient(X, 1.0)
        assert shatter_at_origin(X, 1.0).shattered

    def test_false_and_not_shattered(self):
        X = np.array([[2.0, 0], [0, 0.5]])
        assert not lambda_min_sufficient(X, 1.0)
        cert = shatter_at_origin(X, 1.0)
        assert not cert.shattered
        assert cert.worst_value == pytest.approx(4.25)

    def test_sufficiency_never_contradicted(self):
        rng = np.random.default_rng(0)
        hits = 0
        for _ in range(1000):
            X = random_instance(rng)
            if lambda_min_sufficient(X, 1.0):
                hits += 1
                assert shatter_at_origin(X, 1.0).shattered
        assert hits > 20


class TestInvariances:
    def test_row_permutation(self):
        rng = np.random.default_rng(5)
        X = random_instance(rng)
        cert = shatter_at_origin(X, 1.0)
        perm = rng.permutation(X.shape[0])
        cert_p = shatter_at_origin(X[perm], 1.0)
        assert cert.shattered == cert_p.shattered
        assert cert.worst_value == pytest.approx(cert_p.worst_value)

    def test_right_rotation(self):
        rng = np.random.default_rng(6)
        X = random_instance(rng)
        q, _ = np.linalg.qr(rng.standard_normal((X.shape[1], X.shape[1])))
        cert = shatter_at_origin(X, 1.0)
        cert_r = shatter_at_origin(X @ q, 1.0)
        assert cert.shattered == cert_r.shattered
        assert cert.worst_value == pytest.approx(cert_r.worst_value)

    def test_gamma_scaling(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            X = random_instance(rng)
            gamma = 10.0 ** rng.uniform(-1, 1)
            a = shatter_at_origin(X, gamma)
            b = shatter_at_origin(X / gamma, 1.0)
            assert a.shattered == b.shattered

    def test_subset_closure(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            m, d = 4, 6
            X = rng.standard_normal((m, d)) * math.sqrt(d)
            if not shatter_at_origin(X, 1.0).shattered:
                continue
            for drop in range(m):
                sub = np.delete(X, drop, axis=0)
                assert shatter_at_origin(sub, 1.0).shattered


class TestOffsets:
    def test_zero_offsets_match_origin(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            m = int(rng.integers(1, 4))
            d = int(rng.integers(m, 5))
            X = rng.standard_normal((m, d)) * 2
            assert (shatter_with_offsets(X, np.zeros(m), 1.0)
                    == shatter_at_origin(X, 1.0).shattered)

    def test_one_dimensional_infeasible_offset(self):
        assert not shatter_with_offsets(np.array([[0.5]]), np.array([-1.0]), 1.0)

    def test_smaller_margin_explicit_witness(self):
        assert shatter_with_offsets(np.eye(2), np.zeros(2), 0.7)


class TestUpperBound:
    def test_orthogonal_pair(self):
        assert fat_shattering_upper_bound(math.sqrt(2) * np.eye(2), 1.0) == 4

    def test_all_zero_points(self):
        assert fat_shattering_upper_bound(np.zeros((3, 2)), 1.0) == 1

    def test_single_long_point(self):
        assert fat_shattering_upper_bound(np.array([[10.0, 0]]), 1.0) == 3


class TestFatShatteringSearch:
    def test_two_orthogonal_plus_origin(self):
        pts = np.vstack([math.sqrt(2) * np.eye(2), np.zeros(2)])
        est = fat_shattering_search(pts, 1.0, 3)
        assert est.lower == 2
        assert est.witness_subset == (0, 1)

    def test_single_zero_point(self):
        est = fat_shattering_search(np.zeros((1, 2)), 1.0, 1)
        assert est.lower == 0

    def test_lower_at_most_upper_random(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            pts = rng.standard_normal((6, 6)) * math.sqrt(6)
            est = fat_shattering_search(pts, 1.0, 6)
            assert est.lower <= est.upper

    def test_budget_error(self):
        with pytest.raises(SubsetBudgetError):
            fat_shattering_search(np.eye(30), 1.0, 19, cap=20)


def test_points_csv_roundtrip(tmp_path):
    pts = SampleMatrix(np.array([[1.5, -2.0], [0.0, 3.25]]))
    path = tmp_path / "pts.csv"
    write_points_csv(path, pts)
    back = read_points_csv(path)
    assert np.array_equal(back.rows, pts.rows)
