import math
from math import log, log2, sqrt

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from adasgd import bounds
from adasgd.bounds import BoundInputs
from adasgd.errors import InvalidInput

REL = 1e-9


def P(**kw):
    base = dict(beta=1.0, sigma0=0.0, sigma1=0.0, eta=1.0, gamma=1.0, T=1, delta=0.5)
    base.update(kw)
    return BoundInputs(**base)


# ---- frozen hand evaluations -------------------------------------------------

def test_c1_examples():
    assert bounds.c1(P(T=2, gamma=2.0)) == pytest.approx(log2(17), rel=REL)
    assert bounds.c1(P(T=2, gamma=2.0)) == pytest.approx(4.0875, abs=1e-4)
    assert bounds.c1(P(sigma0=1.0)) == pytest.approx(log2(11), rel=REL)
    assert bounds.c1(P(sigma0=1.0)) == pytest.approx(3.4594, abs=1e-4)
    assert bounds.c1(P(beta=0.0, T=50)) == 0.0


def test_gamma_zero_rejected():
    for fn in (bounds.c1, bounds.f_bound, bounds.d_bound_sq, bounds.nonconvex_rate_rhs, bounds.convex_rate_rhs):
        with pytest.raises(InvalidInput):
            fn(P(gamma=0.0))


def test_input_validation():
    with pytest.raises(InvalidInput):
        P(sigma0=-1.0)
    with pytest.raises(InvalidInput):
        P(delta=1.0)
    with pytest.raises(InvalidInput):
        P(T=0)
    with pytest.raises(InvalidInput):
        bounds.known_f_bound(P())


def test_theorem_delta_ranges():
    bounds.check_theorem_delta("thm1", 0.3)
    for th, bad in (("thm1", 0.34), ("thm2", 0.25), ("thm5", 0.5)):
        with pytest.raises(InvalidInput):
            bounds.check_theorem_delta(th, bad)


def test_f_bound_noiseless():
    p = P(T=20, delta=0.1, delta1=3.0, eta=0.5, beta=2.0)
    assert bounds.f_bound(p) == pytest.approx(2 * 3.0 + 0.25 * 2.0 * bounds.c1(p), rel=REL)


def test_f_bound_beta_zero_example():
    # T/delta = 2, beta = 0: C1 = log2(1 + 2), F = 2 + (3 + 4 C1)
    p = P(beta=0.0, sigma0=1.0, delta1=1.0)
    c = log2(3)
    assert bounds.c1(p) == pytest.approx(c, rel=REL)
    assert bounds.f_bound(p) == pytest.approx(2 + 3 + 4 * c, rel=REL)


def test_known_f_bound_examples():
    p = P(beta=1.0, sigma0=1.0, T=16, delta=0.25, delta1=1.0, alpha=1.0)
    assert bounds.known_f_bound(p) == pytest.approx(8.5, rel=REL)
    q = P(beta=3.0, T=100, delta=0.1, delta1=2.0, alpha=0.5)
    assert bounds.known_f_bound(q) == pytest.approx(4.0 + 2 * 3.0 * 0.25, rel=REL)
    # beta = 0 falls back to the sigma0 alpha / sqrt(T) branch
    r = P(beta=0.0, sigma0=2.0, T=16, delta=0.25, alpha=1.0)
    assert bounds.known_f_bound(r) == pytest.approx(3 * 0.5 * 6, rel=REL)


def test_known_rate_noiseless():
    p = P(beta=2.0, T=64, delta=0.25, delta1=1.5, alpha=1.0)
    assert bounds.known_rate_rhs(p) == pytest.approx(8 * 2.0 * 1.5 * 8 / 64, rel=REL)


def test_d_bound_noiseless():
    p = P(T=128, delta=0.1, d1=2.0, eta=0.3, delta1=1.0)
    assert bounds.lemma13_c(p) == 0.0
    assert bounds.d_bound_sq(p) == pytest.approx(8.0 + 0.09 * (0.5 + 2 * bounds.c1(p)), rel=REL)


def test_lemma13_and_lemma14_constants():
    A, B = bounds.lemma13_ab(1000, 0.1)
    inner = log2(60 * log2(6000) ** 2 / 0.1)
    assert (A, B) == pytest.approx((512 * inner, 512 * inner**2), rel=REL)
    a, b = bounds.lemma14_ab([1, 10], 0.05)
    inner = [log2(60 * log2(6 * t) / 0.05) for t in (1, 10)]
    assert list(a) == pytest.approx([16 * x for x in inner], rel=REL)
    assert list(b) == pytest.approx([16 * x**2 for x in inner], rel=REL)


# ---- rate right-hand sides ---------------------------------------------------

def test_nonconvex_rate_halves_when_noiseless_and_flat():
    p = lambda T: P(beta=0.0, T=T, delta=0.1, delta1=2.0, eta=0.5, gamma=3.0)
    assert bounds.nonconvex_rate_rhs(p(2048)) / bounds.nonconvex_rate_rhs(p(1024)) == pytest.approx(0.5, rel=1e-12)


def test_nonconvex_rate_zero():
    assert bounds.nonconvex_rate_rhs(P(beta=0.0, T=100, delta=0.1)) == 0.0


def test_nonconvex_rate_sqrt_regime():
    p = lambda T: BoundInputs(1.0, 10.0, 0.0, 1.0, 1.0, T, 0.1, 1.0, 1.0)
    T = 10**12
    lo, hi = bounds.nonconvex_rate_rhs(p(T)), bounds.nonconvex_rate_rhs(p(2 * T))
    assert hi / lo == pytest.approx(2**-0.5, rel=0.05)
    dominant = sqrt(8) * bounds.c2(p(T)) * 10.0 / sqrt(T)
    assert dominant / lo == pytest.approx(1.0, rel=0.01)


def test_convex_rate_halving():
    p = lambda T: P(T=T, delta=0.1, eta=0.01, d1=10.0)
    ratio = bounds.convex_rate_rhs(p(2**11)) / bounds.convex_rate_rhs(p(2**10))
    assert 0.49 < ratio < 0.51


def test_report_fields_and_regime():
    p = BoundInputs(1.0, 1.0, 1.0, 1.0, 1.0, 1000, 0.1, 1.0, 1.0, 1.0)
    r = bounds.report(p)
    assert r.c1 == bounds.c1(p) and r.f_bound == bounds.f_bound(p)
    assert r.d_bound_sq == bounds.d_bound_sq(p)
    assert r.known_f_bound == bounds.known_f_bound(p)
    assert r.regime in ("low-noise", "high-noise")
    assert bounds.report(P(beta=0.0, sigma0=0.0, T=10)).regime == "low-noise"
    d = r.to_dict()
    assert set(d) >= {"c1", "f_bound", "d_bound_sq", "nonconvex_rate_rhs", "convex_rate_rhs", "regime"}
    s = bounds.report(p, subgaussian=True)
    assert s.subgaussian and s.f_bound == pytest.approx(bounds.f_bound_subgaussian(p), rel=1e-12)


# ---- sub-Gaussian variant: direct transcription as a second route -----------

def c1_subgaussian_direct(p):
    L = log(4 * p.T / p.delta)
    num = 18 * p.sigma0**2 * p.T * L + (8 + 72 * p.sigma1**2 * L) * (p.eta**2 * p.beta**2 * p.T**3 + p.beta * p.delta1 * p.T)
    return log2(1 + num / p.gamma**2)


def f_subgaussian_direct(p, c):
    L = log(4 * p.T / p.delta)
    lg = log2(p.T / p.delta)
    return (2 * p.delta1
            + (9 * lg + 12 * c) * p.eta * p.sigma0 * sqrt(L)
            + (81 * lg**2 + 144 * c**2) * p.eta**2 * p.beta * p.sigma1**2 * L
            + p.eta**2 * p.beta * c)


def test_subgaussian_examples():
    assert bounds.c1_subgaussian(P(sigma0=1.0)) == pytest.approx(log2(1 + 18 * log(8) + 8), rel=REL)
    # C1 = 0, log2(T/delta) = 1: the sigma0 multiplier is 9 eta sigma0 sqrt(ln(4T/delta))
    p = P(beta=0.0, sigma0=1.0)
    assert bounds.f_bound_subgaussian(p, c1_value=0.0) == pytest.approx(9 * sqrt(log(8)), rel=REL)
    z = P(T=30, delta=0.2, delta1=1.0)
    assert bounds.f_bound_subgaussian(z) == pytest.approx(bounds.f_bound(z), rel=1e-14)
    assert bounds.c1_subgaussian(z) == pytest.approx(bounds.c1(z), rel=1e-14)


inputs = st.builds(
    BoundInputs,
    beta=st.floats(0, 10), sigma0=st.floats(0, 10), sigma1=st.floats(0, 5),
    eta=st.floats(1e-3, 10), gamma=st.floats(1e-2, 10), T=st.integers(1, 10**6),
    delta=st.floats(1e-4, 0.99), delta1=st.floats(0, 100), d1=st.floats(0, 100),
)


@given(inputs)
def test_subgaussian_matches_transcription(p):
    c = c1_subgaussian_direct(p)
    assert bounds.c1_subgaussian(p) == pytest.approx(c, rel=1e-9, abs=1e-12)
    assert bounds.f_bound_subgaussian(p) == pytest.approx(f_subgaussian_direct(p, c), rel=1e-9, abs=1e-12)


@given(inputs)
def test_subgaussian_dominates(p):
    assume(log(4 * p.T / p.delta) >= 1)
    assert bounds.f_bound_subgaussian(p) >= bounds.f_bound(p) * (1 - 1e-12)


# ---- monotonicity and purity -------------------------------------------------

@given(inputs, st.sampled_from(["sigma0", "sigma1", "delta1", "d1", "T"]), st.floats(1.0, 4.0))
def test_bounds_monotone(p, field, factor):
    if field == "T":
        q = BoundInputs(**{**p.__dict__, "T": int(p.T * factor) + 1})
    else:
        bumped = getattr(p, field) * factor + (0.01 if getattr(p, field) == 0 else 0)
        q = BoundInputs(**{**p.__dict__, field: bumped})
    tol = 1 - 1e-12
    assert bounds.f_bound(q) >= bounds.f_bound(p) * tol
    assert bounds.d_bound_sq(q) >= bounds.d_bound_sq(p) * tol


@given(inputs)
def test_bounds_pure(p):
    assert bounds.report(p) == bounds.report(p)
    assert math.isfinite(bounds.f_bound(p)) and bounds.f_bound(p) >= 0
