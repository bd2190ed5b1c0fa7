import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gevlc.besov import (
    BesovIndex,
    InadmissibleExponents,
    NormAccumulator,
    TimeNormSpec,
    besov_norm,
    chemin_lerner_norm,
    embedding_ratio,
    gradient_equivalence_ratio,
    interpolation_check,
    log_chemin_lerner_norm,
    log_besov_norm,
    lp_norm,
    product_estimate_ratio,
)
from gevlc.fourier_grid import GridSpec, SpectralField, forward_transform, random_field, zeros
from gevlc.littlewood_paley import build_cutoffs

from oracles import trapezoid_quadrature_1d

SPEC = GridSpec(3, 16)
DEC = build_cutoffs(SPEC)
X = SPEC.coordinates()


def _cosine(k: int, axis: int = 0, amp: float = 1.0):
    # exact coefficients; a transformed grid function would carry 1e-17 noise
    # that dominates once Gevrey weights reach e^1000
    c = np.zeros((1,) + SPEC.shape, complex)
    idx = [0, 0, 0, 0]
    idx[axis + 1] = k
    c[tuple(idx)] = amp / 2
    idx[axis + 1] = -k
    c[tuple(idx)] = amp / 2
    return SpectralField(SPEC, c)


COS3 = _cosine(3)  # sits entirely in block j = 1
NORM_COS = math.sqrt(4 * math.pi**3)  # ||cos(3 x1)||_{L^2((0, 2 pi)^3)}
seeds = st.integers(0, 10**6)


def test_lp_norms_of_a_cosine():
    assert lp_norm(COS3, 2) == pytest.approx(NORM_COS, rel=1e-12)
    assert lp_norm(COS3, 4) == pytest.approx((3 * math.pi**3) ** 0.25, rel=1e-12)
    assert lp_norm(COS3, math.inf) == pytest.approx(1.0)


def test_vector_lp_uses_euclidean_length():
    u = forward_transform(np.stack([np.cos(X[0]), np.sin(X[0]), 0 * X[0]]), SPEC)
    assert lp_norm(u, 3) == pytest.approx((2 * math.pi) ** 1.0, rel=1e-12)


@pytest.mark.parametrize("s,r", [(0.5, 1), (-1.0, 2), (2.5, math.inf)])
def test_single_block_besov_closed_form(s, r):
    assert besov_norm(COS3, BesovIndex(s, 2, r), DEC) == pytest.approx(2**s * NORM_COS, rel=1e-12)


def test_two_block_besov_closed_form():
    f = forward_transform(np.cos(3 * X[0]) + 2 * np.cos(6 * X[1]), SPEC)  # |k| = 6 -> block 2 only
    s = 0.5
    b1, b2 = 2**s * NORM_COS, 2 ** (2 * s) * 2 * NORM_COS
    assert besov_norm(f, BesovIndex(s, 2, 1), DEC) == pytest.approx(b1 + b2, rel=1e-12)
    assert besov_norm(f, BesovIndex(s, 2, 2), DEC) == pytest.approx(math.hypot(b1, b2), rel=1e-12)


def test_parseval_and_quadrature_routes_agree():
    f = random_field(SPEC, np.random.default_rng(3), dealiased=False)
    idx = BesovIndex(0.7, 2, 1)
    from gevlc import besov as bv

    quad = [math.log(lp_norm(f.with_coeffs(f.coeffs * DEC.block(j)), 2)) for j in DEC.js]
    assert np.allclose(bv.block_log_norms(f, 2, DEC), quad, rtol=0, atol=1e-12)
    assert math.isfinite(log_besov_norm(f, idx, DEC))


def test_zero_field_has_zero_norm():
    assert besov_norm(zeros(SPEC), BesovIndex(1, 2, 1), DEC) == 0.0


@pytest.mark.parametrize("bad", [dict(s=0, p=0.5, r=1), dict(s=0, p=2, r=0.9), dict(s=math.nan, p=2, r=1)])
def test_bad_index(bad):
    with pytest.raises(ValueError):
        BesovIndex(**bad)


@given(seeds, st.floats(0.1, 10))
def test_homogeneity(seed, c):
    f = random_field(SPEC, np.random.default_rng(seed))
    idx = BesovIndex(0.5, 2, 1)
    assert besov_norm(f * c, idx, DEC) == pytest.approx(c * besov_norm(f, idx, DEC), rel=1e-12)


@given(seeds)
def test_triangle_inequality_and_r_monotonicity(seed):
    r = np.random.default_rng(seed)
    f, g = random_field(SPEC, r), random_field(SPEC, r)
    idx = BesovIndex(0.5, 2, 1)
    assert besov_norm(f + g, idx, DEC) <= (1 + 1e-12) * (besov_norm(f, idx, DEC) + besov_norm(g, idx, DEC))
    vals = [besov_norm(f, BesovIndex(0.5, 2, rr), DEC) for rr in (1, 2, math.inf)]
    assert vals[0] >= vals[1] >= vals[2]


@given(seeds, st.floats(0.05, 0.95))
def test_interpolation_holder_bound(seed, theta):
    f = random_field(SPEC, np.random.default_rng(seed))
    assert interpolation_check(f, -1.0, 1.0, theta, 2.0, 1.0, DEC) <= 1 + 1e-12


def test_interpolation_rejects_degenerate_input():
    with pytest.raises(ValueError):
        interpolation_check(zeros(SPEC), -1, 1, 0.5, 2, 1, DEC)
    with pytest.raises(ValueError):
        interpolation_check(COS3, 1, -1, 0.5, 2, 1, DEC)


def test_gradient_equivalence_single_block():
    # ||grad cos(3x)||_{B^{s-1}} / ||cos(3x)||_{B^s} = 3 / 2
    assert gradient_equivalence_ratio(COS3, 0.5, 2.0, 1.0, DEC) == pytest.approx(1.5, rel=1e-12)


def test_embedding_single_block():
    ratio = embedding_ratio(COS3, 1.5, 2.0, 4.0, 1.0, DEC)
    expected = 2 ** (-0.75) * (3 * math.pi**3) ** 0.25 / NORM_COS
    assert ratio == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        embedding_ratio(COS3, 1.5, 4.0, 2.0, 1.0, DEC)


def _decaying_series(t_grid):
    return [COS3 * math.exp(-9 * t) for t in t_grid]


@pytest.mark.parametrize("rho", [1.0, 2.0])
@pytest.mark.parametrize("gevrey", [False, True])
def test_chemin_lerner_matches_trapezoid_oracle(rho, gevrey):
    t = np.linspace(0, 0.5, 21)
    series = _decaying_series(t)
    s = 0.5
    got = chemin_lerner_norm(series, TimeNormSpec(rho, t, BesovIndex(s, 2, 1)), DEC, gevrey)
    # |xi|_1 = 3 on the support
    vals = (2**s * NORM_COS * np.exp(-9 * t + (3 * np.sqrt(t) if gevrey else 0))) ** rho
    expected = trapezoid_quadrature_1d(vals, t[1] - t[0]) ** (1 / rho)
    assert got == pytest.approx(expected, rel=1e-12)


def test_chemin_lerner_sup_norm():
    t = np.linspace(0, 0.5, 11)
    got = chemin_lerner_norm(_decaying_series(t), TimeNormSpec(math.inf, t, BesovIndex(0, 2, 1)), DEC, gevrey=True)
    expected = NORM_COS * max(math.exp(-9 * x + 3 * math.sqrt(x)) for x in t)
    assert got == pytest.approx(expected, rel=1e-12)


def test_gevrey_weight_survives_huge_times():
    t = np.array([0.0, 1e6])
    got = log_chemin_lerner_norm([COS3, COS3], TimeNormSpec(math.inf, t, BesovIndex(0, 2, 1)), DEC, gevrey=True)
    assert got == pytest.approx(math.log(NORM_COS) + 3 * 1e3, rel=1e-12)


@given(seeds, st.sampled_from([1.0, 2.0, math.inf]), st.booleans())
def test_accumulator_matches_batch(seed, rho, gevrey):
    r = np.random.default_rng(seed)
    t = np.sort(r.uniform(0, 1, 6))
    t[0] = 0.0
    series = [random_field(SPEC, r) for _ in t]
    acc = NormAccumulator(DEC, 2.0, rho, gevrey)
    prev = 0.0
    for ti, f in zip(t, series):
        acc.add(ti, f)
        if ti > 0:
            now = acc.norm(0.5)
            assert now >= prev * (1 - 1e-12)
            prev = now
    batch = chemin_lerner_norm(series, TimeNormSpec(rho, t, BesovIndex(0.5, 2, 1)), DEC, gevrey)
    assert acc.norm(0.5) == pytest.approx(batch, rel=1e-12)


def test_accumulator_rejects_backwards_time():
    acc = NormAccumulator(DEC, 2.0, 1.0)
    acc.add(0.5, COS3)
    with pytest.raises(ValueError):
        acc.add(0.25, COS3)


def test_time_spec_validation():
    with pytest.raises(ValueError):
        TimeNormSpec(1.0, np.array([0.0, 0.0]), BesovIndex(0, 2, 1))
    with pytest.raises(ValueError):
        chemin_lerner_norm([COS3], TimeNormSpec(1.0, np.array([0.0]), BesovIndex(0, 2, 1)), DEC)


def test_product_estimate_admissibility():
    t = np.linspace(0, 0.1, 3)
    with pytest.raises(InadmissibleExponents):
        product_estimate_ratio(COS3, COS3, "into_p", 1.5, 8.0, t, DEC)
    with pytest.raises(InadmissibleExponents):
        product_estimate_ratio(COS3, COS3, "into_q", 8.0, 1.5, t, DEC)
    with pytest.raises(ValueError):
        product_estimate_ratio(COS3, COS3, "other", 2.0, 2.0, t, DEC)
    assert product_estimate_ratio(zeros(SPEC), COS3, "into_p", 2.0, 2.0, t, DEC) == 0.0


@given(seeds)
def test_product_estimate_ratio_is_bounded(seed):
    r = np.random.default_rng(seed)
    t = np.linspace(0, 0.25, 4)
    f, g = random_field(SPEC, r), random_field(SPEC, r)
    for mode in ("into_p", "into_q"):
        ratio = product_estimate_ratio(f, g, mode, 2.0, 2.0, t, DEC)
        assert 0 < ratio <= 50
