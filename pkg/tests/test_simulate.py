"""Event simulator: counts, reproducibility, moment agreement, CSV I/O."""

import math

import numpy as np
import pytest

from gmmlor import (
    InputError,
    MixtureModel2D,
    eigen_from_covariance,
    mean_sinusoid,
    read_lors_csv,
    simulate_lors,
    theoretical_moments,
    write_lors_csv,
)
from gmmlor.projection import ProjectionVarianceParams
from gmmlor.simulate import lors_csv_text
from conftest import BENCHMARK_COUNTS, make_component


def single(mean, cov):
    return MixtureModel2D((make_component(mean, cov, 1.0),))


def test_counts_are_exact(benchmark_mixture):
    res = simulate_lors(benchmark_mixture, counts=BENCHMARK_COUNTS, seed=0)
    assert res.counts == BENCHMARK_COUNTS
    assert len(res.s) == len(res.phi) == len(res.labels) == 7000
    hist = np.bincount(res.labels, minlength=3)
    assert tuple(hist) == BENCHMARK_COUNTS


def test_total_split_matches_weights(benchmark_mixture):
    res = simulate_lors(benchmark_mixture, n_total=7000, seed=3)
    assert sum(res.counts) == 7000
    # multinomial split: stay within 5 sigma of the expectation
    for k, w in enumerate(benchmark_mixture.weights):
        se = math.sqrt(7000 * w * (1 - w))
        assert abs(res.counts[k] - 7000 * w) < 5 * se


def test_zero_count_component_absent(benchmark_mixture):
    res = simulate_lors(benchmark_mixture, counts=(0, 10, 5), seed=1)
    assert res.counts == (0, 10, 5)
    assert 0 not in res.labels


def test_same_seed_same_csv_bytes(benchmark_mixture):
    a = simulate_lors(benchmark_mixture, counts=(50, 30, 20), seed=42)
    b = simulate_lors(benchmark_mixture, counts=(50, 30, 20), seed=42)
    assert lors_csv_text(a.s, a.phi, a.labels) == lors_csv_text(b.s, b.phi, b.labels)
    c = simulate_lors(benchmark_mixture, counts=(50, 30, 20), seed=43)
    assert lors_csv_text(a.s, a.phi) != lors_csv_text(c.s, c.phi)


def test_point_source_lines_pass_through_the_point():
    model = single((1.0, 2.0), 1e-18 * np.eye(2))
    res = simulate_lors(model, counts=(2000,), seed=8)
    expect = mean_sinusoid(res.phi, (1.0, 2.0))
    assert np.max(np.abs(res.s - expect)) < 1e-6


def test_isotropic_offset_variance():
    sigma_sq = 0.0625
    n = 100000
    res = simulate_lors(single((0.0, 0.0), sigma_sq * np.eye(2)), counts=(n,), seed=5)
    # the projected variance is flat, so var(s) estimates sigma^2
    se = sigma_sq * math.sqrt(2.0 / n)
    assert abs(res.s.var() - sigma_sq) < 5 * se


def test_sample_moments_match_theory():
    cov = np.array([[0.04, 0.03], [0.03, 0.09]])
    n = 100000
    res = simulate_lors(single((0.0, 0.0), cov), counts=(n,), seed=17)
    e = eigen_from_covariance(cov)
    m2, m4 = theoretical_moments(
        ProjectionVarianceParams(e.sigma1_sq, e.sigma2_sq, e.phi0)
    )
    m2_hat = np.mean(res.s**2)
    m4_hat = np.mean(res.s**4)
    assert abs(m2_hat - m2) / m2 < 0.02
    assert abs(m4_hat - m4) / m4 < 0.05


def test_csv_roundtrip_with_labels(tmp_path, benchmark_mixture):
    res = simulate_lors(benchmark_mixture, counts=(30, 20, 10), seed=2)
    path = tmp_path / "lors.csv"
    write_lors_csv(path, res.s, res.phi, res.labels)
    s, phi, labels = read_lors_csv(path)
    assert np.array_equal(s, res.s)
    assert np.array_equal(phi, res.phi)
    assert np.array_equal(labels, res.labels)


def test_csv_roundtrip_without_labels(tmp_path, benchmark_mixture):
    res = simulate_lors(benchmark_mixture, counts=(30, 20, 10), seed=2)
    path = tmp_path / "lors.csv"
    write_lors_csv(path, res.s, res.phi)
    s, phi, labels = read_lors_csv(path)
    assert labels is None
    assert np.array_equal(s, res.s)


def test_csv_rejects_malformed_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("s,phi\n1.0\n")
    with pytest.raises(InputError):
        read_lors_csv(path)


def test_csv_rejects_nonfinite_values(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("s,phi\n1.0,nan\n")
    with pytest.raises(InputError):
        read_lors_csv(path)


def test_csv_rejects_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_lors_csv(tmp_path / "nope.csv")


def test_shuffle_preserves_events(benchmark_mixture):
    plain = simulate_lors(benchmark_mixture, counts=(40, 30, 20), seed=9)
    mixed = simulate_lors(benchmark_mixture, counts=(40, 30, 20), seed=9, shuffle=True)
    assert mixed.counts == plain.counts
    key = lambda r: sorted(zip(r.s, r.phi, r.labels))
    assert key(mixed) == key(plain)
    # and the block layout is actually broken up
    assert not np.array_equal(mixed.labels, plain.labels)


def test_counts_validation(benchmark_mixture):
    with pytest.raises(InputError):
        simulate_lors(benchmark_mixture, counts=(10, 10), seed=0)
    with pytest.raises(InputError):
        simulate_lors(benchmark_mixture, counts=(10, -1, 5), seed=0)
    with pytest.raises(InputError):
        simulate_lors(benchmark_mixture)  # needs counts or n_total
