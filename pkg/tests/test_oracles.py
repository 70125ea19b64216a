import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adasgd import BoundedAffine, Exact, RngStream, SubGaussianAffine, Truncated, TwoPointAdversarial
from adasgd import lower_bound_quad, nonconvex_sine, quadratic
from adasgd.errors import ConfigurationError, InvalidInput, OracleMisconfiguration, UnsupportedQuery
from adasgd.oracles import NoiseParams, noise_bound, sample, truncate_sample, truncation_radius
from adasgd.rng import BIT_GENERATOR, trial_streams

N = 100_000


def many(oracle, grad, n=N, seed=0):
    grad = np.asarray(grad, dtype=np.float64)
    d = oracle.draws(RngStream(seed).generator(), n, grad.size)
    return oracle.perturb(np.broadcast_to(grad, (n, grad.size)), d)


def test_exact_oracle():
    p = quadratic([1.0, 2.0])
    w = np.array([0.5, -1.0])
    np.testing.assert_array_equal(sample(Exact(), p, w, RngStream(0)), p.gradient(w))


def test_bounded_affine_at_stationary_point():
    g = many(BoundedAffine(1.0, 0.0), [0.0, 0.0, 0.0], n=20_000)
    assert np.all(np.linalg.norm(g, axis=1) <= 1.0)


@pytest.mark.parametrize("s0,s1", [(0.5, 0.0), (0.0, 1.0), (1.0, 2.0)])
def test_bounded_affine_never_exceeds_bound(s0, s1):
    grad = np.array([1.0, -2.0, 0.5])
    oracle = BoundedAffine(s0, s1)
    noise = many(oracle, grad, n=20_000) - grad
    bound = oracle.noise_bound(grad)
    assert bound == pytest.approx(math.sqrt(s0**2 + s1**2 * (grad @ grad)))
    assert np.all(np.linalg.norm(noise, axis=1) <= bound)


def test_noise_bound_values():
    q = quadratic([1.0, 1.0])
    assert noise_bound(BoundedAffine(2.0, 0.0), q, [7.0, -1.0]) == pytest.approx(2.0)
    assert noise_bound(BoundedAffine(0.0, 1.0), q, [3.0, 0.0]) == pytest.approx(3.0)
    # delta = 0.1 / 10 per query: 3 sqrt(ln(4 / 0.01)) = 3 sqrt(ln 400)
    t = Truncated(SubGaussianAffine(1.0, 0.0), 0.1, 10)
    assert noise_bound(t, q, [1.0, 2.0]) == pytest.approx(3 * math.sqrt(math.log(400.0)), rel=1e-12)
    assert 3 * math.sqrt(math.log(400.0)) == pytest.approx(7.3432, abs=1e-4)
    with pytest.raises(UnsupportedQuery):
        noise_bound(SubGaussianAffine(1.0, 0.0), q, [0.0, 0.0])


def test_truncation_radius_values():
    assert truncation_radius(1.0, 0.04) == pytest.approx(math.sqrt(math.log(100)), rel=1e-12)
    assert truncation_radius(1.0, 0.04) == pytest.approx(2.1460, abs=1e-4)
    assert 3 * truncation_radius(1.0, 0.04) == pytest.approx(6.4378, abs=1e-4)


def test_truncated_params():
    sg = SubGaussianAffine(0.5, 2.0)
    k = 3 * math.sqrt(math.log(4 * 50 / 0.2))
    p = sg.truncated_params(50, 0.2)
    assert (p.sigma0, p.sigma1) == pytest.approx((0.5 * k, 2.0 * k))
    t = Truncated(sg, 0.2, 50).bound_params()
    assert (t.sigma0, t.sigma1) == pytest.approx((p.sigma0, p.sigma1), rel=1e-12)


def test_two_point_symmetric_case():
    g = many(TwoPointAdversarial(1.0, 2), [0.0])
    assert set(np.unique(g)) == {-1.0, 1.0}
    assert abs(g.mean()) <= 0.01


def test_two_point_frequencies():
    T = 10
    g = many(TwoPointAdversarial(2.0, T), [0.0])
    assert np.mean(g > 0) == pytest.approx(1 / T, abs=4 * math.sqrt(0.09 / N))
    assert np.unique(g[g < 0]) == pytest.approx([-2.0 / (T - 1)])


def test_two_point_forced_low_and_dimension():
    g = many(TwoPointAdversarial(1.0, 5, force_low=True), [0.0], n=100)
    assert np.all(g == -0.25)
    with pytest.raises(ConfigurationError):
        sample(TwoPointAdversarial(1.0, 5), quadratic([1.0, 1.0]), [0.0, 0.0], RngStream(0))


def test_oracle_configuration_errors():
    with pytest.raises(ConfigurationError):
        Truncated(SubGaussianAffine(1, 0), 1.0, 10)
    with pytest.raises(ConfigurationError):
        Truncated(SubGaussianAffine(1, 0), 0.1, 1)
    with pytest.raises(ConfigurationError):
        Truncated(Exact(), 0.1, 10)
    with pytest.raises((InvalidInput, ConfigurationError)):
        NoiseParams(-1.0, 0.0)


@pytest.mark.parametrize("oracle", [
    Exact(), BoundedAffine(1.0, 0.5), SubGaussianAffine(1.0, 0.5),
    Truncated(SubGaussianAffine(1.0, 0.5), 0.1, 100), Truncated(BoundedAffine(0.5, 1.0), 0.5, 2),
], ids=lambda o: type(o).__name__)
def test_unbiased(oracle):
    grad = np.array([0.5, -1.0, 2.0])
    g = many(oracle, grad, seed=3)
    scale = math.sqrt(oracle.params.scale(grad @ grad)) if hasattr(oracle, "params") else 0.0
    if isinstance(oracle, Truncated):
        scale = math.sqrt(oracle.inner.params.scale(grad @ grad))
    assert np.all(np.abs(g.mean(axis=0) - grad) <= 4 * scale / math.sqrt(N) + 1e-15)


def test_bounded_oracles_respect_bound_always():
    t = Truncated(BoundedAffine(0.5, 1.0), 0.5, 2)
    grad = np.array([0.2, 0.4])
    noise = many(t, grad, n=50_000) - grad
    assert np.all(np.linalg.norm(noise, axis=1) <= t.noise_bound(grad))


@pytest.mark.parametrize("d", [1, 2, 5, 20])
def test_subgaussian_tail(d):
    s = 1.3
    z = many(SubGaussianAffine(s, 0.0), np.zeros(d), seed=d)
    norms = np.linalg.norm(z, axis=1)
    for t in np.linspace(0.2, 3.0, 15):
        emp = np.mean(norms >= t)
        assert emp <= 2 * math.exp(-t**2 / s**2) + 4 * math.sqrt(0.25 / N)


def test_rejection_sampling_exercised():
    # per-query delta = 0.45 makes the acceptance radius small enough to reject in 1-d
    t = Truncated(SubGaussianAffine(1.0, 0.0), 0.9, 2)
    d = t.draws(RngStream(5).generator(), 20_000, 1)
    unit = t.inner.unit_noise(d[:, :-2])
    assert np.all(np.abs(unit[:, 0]) <= t.unit_radius)
    rejected = d[:, -1] == 1
    assert rejected.mean() > t.delta / 2  # coin flips plus at least some rejections


def test_truncate_sample_function():
    gen = np.random.default_rng(0)
    sigma, delta = 1.0, 0.1
    grad = np.array([1.0, 2.0])
    r = truncation_radius(sigma, delta)
    outs = []
    for _ in range(4000):
        resample = lambda: grad + gen.normal(scale=sigma, size=2)
        outs.append(truncate_sample(resample(), grad, sigma, delta, gen, resample))
    noise = np.array(outs) - grad
    assert np.all(np.linalg.norm(noise, axis=1) <= r)
    assert np.linalg.norm(noise.mean(axis=0)) < 0.1
    # zero noise on the correction branch with symmetric inner noise
    assert np.mean(np.all(noise == 0, axis=1)) == pytest.approx(delta / 2, abs=0.02)


def test_truncate_sample_correction_branch_and_cap(monkeypatch):
    # first seed whose first uniform lands on the correction branch (prob delta/2 = 0.25)
    seed = next(s for s in range(100) if RngStream(s).generator().random() < 0.25)
    out = truncate_sample([0.0], [1.0], 1.0, 0.5, RngStream(seed), lambda: [0.0], mean_z=[0.1])
    assert out[0] == pytest.approx(1.0 - 1.5 / 0.5 * 0.1)
    monkeypatch.setattr("adasgd.oracles.RETRY_CAP", 5)
    with pytest.raises(OracleMisconfiguration):
        truncate_sample([100.0], [0.0], 1.0, 0.5, RngStream(0), lambda: [100.0])
    with pytest.raises(InvalidInput):
        truncate_sample([0.0], [0.0], 1.0, 1.5, RngStream(0), lambda: [0.0])


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**32))
def test_stream_determinism(seed, stream):
    a = RngStream(seed, stream).generator().random(4)
    b = RngStream(seed, stream).generator().random(4)
    np.testing.assert_array_equal(a, b)


def test_streams_distinct_and_pinned():
    assert BIT_GENERATOR == "PCG64"
    assert type(RngStream(1).generator().bit_generator).__name__ == BIT_GENERATOR
    xs = [s.generator().random() for s in trial_streams(7, 5)]
    assert len(set(xs)) == 5
    with pytest.raises((InvalidInput, ValueError)):
        RngStream(-1)


def test_sample_determinism_all_oracles():
    p = nonconvex_sine(3)
    w = np.array([0.1, 0.2, -0.3])
    for o in (BoundedAffine(1, 1), SubGaussianAffine(1, 1), Truncated(SubGaussianAffine(1, 1), 0.1, 10)):
        np.testing.assert_array_equal(sample(o, p, w, RngStream(3, 1)), sample(o, p, w, RngStream(3, 1)))
    lb = lower_bound_quad(1.0)
    assert sample(TwoPointAdversarial(1.0, 3), lb, [0.0], RngStream(1))[0] in (1.0, -0.5)
