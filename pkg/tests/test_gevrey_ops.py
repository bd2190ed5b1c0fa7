import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from gevlc.besov import BesovIndex, besov_norm
from gevlc.fourier_grid import GridSpec, SpectralField, dealias, l1_symbol, product, random_field, zeros
from gevlc.gevrey_ops import (
    DegenerateFitError,
    GevreyWeight,
    KernelProbe,
    LogScaledField,
    bilinear_conjugated,
    bilinear_decomposed,
    bilinear_direct,
    bilinear_lp_ratio,
    damping_multiplier,
    gevrey_besov_norm,
    gevrey_multiply,
    half_line_project,
    heat_gevrey,
    heat_gevrey_symbol,
    heat_semigroup,
    kernel_l1_norm,
    octant_factor,
    octant_weight_check,
    spectral_slope,
)
from gevlc.littlewood_paley import build_cutoffs

from oracles import acyclic_convolution

seeds = st.integers(0, 10**6)

# frozen from the seed-free kernel probe at n = 128, box 32 sqrt(t)
C1_FROZEN = 0.9483403
C2_FROZEN = 1.4055953


# ------------------------------------------------------------ weights


@given(seeds, st.floats(0, 4))
def test_gevrey_multiply_round_trip(seed, t):
    f = random_field(GridSpec(2, 16), np.random.default_rng(seed))
    w = GevreyWeight(t)
    back = gevrey_multiply(gevrey_multiply(f, w, +1), w, -1)
    assert np.abs(back.coeffs - f.coeffs).max() <= 1e-12 * np.abs(f.coeffs).max()


def test_gevrey_multiply_overflow_and_log_domain():
    spec = GridSpec(1, 32)
    f = random_field(spec, np.random.default_rng(0), dealiased=False)
    with pytest.raises(OverflowError):
        gevrey_multiply(f, GevreyWeight(1e4), +1)
    big = gevrey_multiply(f, GevreyWeight(1e4, mode="log_domain"), +1)
    assert isinstance(big, LogScaledField)
    assert big.log_scale == pytest.approx(100 * 16)
    assert np.all(np.isfinite(big.field.coeffs))
    with pytest.raises(ValueError):
        GevreyWeight(-1.0)
    with pytest.raises(ValueError):
        gevrey_multiply(f, GevreyWeight(1.0), 0)


@given(st.floats(1e-4, 100), st.sampled_from([1, 2, 3]))
def test_heat_gevrey_exponent_is_bounded(t, dim):
    # -t|xi|^2 + sqrt(t)|xi|_1 <= dim/4 with equality at |xi_i| = 1/(2 sqrt(t))
    spec = GridSpec(dim, 32)
    assert heat_gevrey_symbol(spec, t).max() <= dim / 4 + 1e-12


def test_heat_gevrey_is_product_of_heat_and_gevrey():
    spec = GridSpec(3, 16)
    f = random_field(spec, np.random.default_rng(1))
    a = heat_gevrey(f, 0.3)
    b = gevrey_multiply(heat_semigroup(f, 0.3), GevreyWeight(0.3))
    assert np.abs(a.coeffs - b.coeffs).max() <= 1e-14
    with pytest.raises(ValueError):
        heat_semigroup(f, -1)


def test_gevrey_besov_norm_single_mode():
    spec = GridSpec(3, 16)
    c = np.zeros((1,) + spec.shape, complex)
    c[0, 3, 0, 0] = c[0, -3, 0, 0] = 0.5
    f = SpectralField(spec, c)
    dec = build_cutoffs(spec)
    plain = besov_norm(f, BesovIndex(0.5, 2, 1), dec)
    assert gevrey_besov_norm(f, 0.49, BesovIndex(0.5, 2, 1), dec) == pytest.approx(plain * math.exp(0.7 * 3), rel=1e-12)


# ------------------------------------------------------------ kernels


@pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
def test_poisson_kernel_unit_mass(t):
    k = kernel_l1_norm(KernelProbe(0, t))
    assert abs(k.value - 1) <= 1e-6
    assert k.min_value >= 0
    assert k.resolved


def test_one_dimensional_kernels_match_closed_forms():
    # |xi| e^{-|xi|} on the line: K = (1 - x^2) / (pi (1 + x^2)^2), ||K||_1 = 2 / pi
    k1 = kernel_l1_norm(KernelProbe(1, 1.0, dim=1, n=4096, box_factor=256))
    assert k1.value == pytest.approx(2 / math.pi, rel=1e-3)
    # xi^2 e^{-|xi|}: K = 2 (1 - 3x^2) / (pi (1 + x^2)^3)
    ref, _ = quad(lambda x: abs(2 * (1 - 3 * x * x)) / (math.pi * (1 + x * x) ** 3), -np.inf, np.inf, limit=200)
    k2 = kernel_l1_norm(KernelProbe(2, 1.0, dim=1, n=4096, box_factor=256))
    assert k2.value == pytest.approx(ref, rel=1e-4)


@pytest.mark.parametrize("m", [1, 2])
def test_kernel_scaling(m):
    ref = kernel_l1_norm(KernelProbe(m, 1.0)).value
    for t in (0.25, 4.0):
        assert kernel_l1_norm(KernelProbe(m, t)).value * t ** (m / 2) == pytest.approx(ref, rel=1e-4)


def test_kernel_constants_regression():
    assert kernel_l1_norm(KernelProbe(1, 1.0)).value == pytest.approx(C1_FROZEN, rel=1e-6)
    assert kernel_l1_norm(KernelProbe(2, 1.0)).value == pytest.approx(C2_FROZEN, rel=1e-6)


def test_kernel_tail_flag():
    k = kernel_l1_norm(KernelProbe(1, 1.0, box_factor=4, n=32))
    assert not k.resolved
    with pytest.raises(ValueError):
        KernelProbe(-1, 1.0)
    with pytest.raises(ValueError):
        KernelProbe(1, 0.0)


# ------------------------------------------------------------ octants


def test_octant_factor_table():
    assert octant_factor(1, 1, 1) == "one" and octant_factor(-1, -1, 1) == "one"
    assert octant_factor(1, -1, 1) == "damp_u"
    assert octant_factor(1, -1, -1) == "damp_v"
    assert octant_factor(-1, 1, -1) == "damp_u"


@given(st.floats(0.01, 4), seeds)
def test_octant_weights_are_exact(t, seed):
    assert octant_weight_check(2000, t, np.random.default_rng(seed)) <= 1e-12


@given(seeds, st.sampled_from([(1, 16), (2, 8), (3, 8)]))
def test_half_line_projections_sum_to_identity(seed, grid):
    spec = GridSpec(*grid)
    f = random_field(spec, np.random.default_rng(seed), dealiased=False)
    for axis in range(spec.dim):
        total = half_line_project(f, axis, +1).coeffs + half_line_project(f, axis, -1).coeffs
        assert np.abs(total - f.coeffs).max() == 0.0


def test_half_line_projection_weights():
    spec = GridSpec(1, 8)
    f = SpectralField(spec, np.ones(8))
    w = half_line_project(f, 0, +1).coeffs[0].real
    # fft order 0, 1, 2, 3, -4, -3, -2, -1
    assert list(w) == [0.5, 1, 1, 1, 0, 0, 0, 0]
    with pytest.raises(ValueError):
        half_line_project(f, 1, +1)


def test_damping_multiplier():
    spec = GridSpec(1, 16)
    f = random_field(spec, np.random.default_rng(0))
    assert damping_multiplier(f, 0, 1.0, 1, 1) is f
    d = damping_multiplier(f, 0, 0.25, 1, -1)
    k = np.abs(spec.wavevectors()[0])
    assert np.allclose(d.coeffs, f.coeffs * np.exp(-k))


# ------------------------------------------------------------ B_t


@given(seeds)
def test_bilinear_at_zero_is_the_product(seed):
    spec = GridSpec(1, 32)
    r = np.random.default_rng(seed)
    u, v = random_field(spec, r), random_field(spec, r)
    ref = acyclic_convolution(dealias(u).coeffs[0], dealias(v).coeffs[0], spec.n)
    assert np.abs(bilinear_direct(u, v, 0.0).coeffs[0] - ref).max() <= 1e-14
    assert np.abs(bilinear_decomposed(u, v, 0.0).coeffs - product(u, v).coeffs).max() <= 1e-14


@given(seeds, st.sampled_from([0.0, 0.1, 1.0, 3.0]), st.sampled_from([(1, 32), (2, 16)]))
def test_decomposition_matches_direct_sum(seed, t, grid):
    spec = GridSpec(*grid)
    r = np.random.default_rng(seed)
    u, v = random_field(spec, r), random_field(spec, r)
    direct = bilinear_direct(u, v, t).coeffs
    dec = bilinear_decomposed(u, v, t).coeffs
    assert np.abs(dec - direct).max() <= 1e-8 * np.abs(direct).max()
    conj = bilinear_conjugated(u, v, t).coeffs
    assert np.abs(conj - direct).max() <= 1e-10 * np.abs(direct).max()


def test_bilinear_three_dimensional_matches_conjugation():
    spec = GridSpec(3, 8)
    r = np.random.default_rng(5)
    u, v = random_field(spec, r), random_field(spec, r)
    a = bilinear_decomposed(u, v, 0.5).coeffs
    b = bilinear_conjugated(u, v, 0.5).coeffs
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


def test_bilinear_guards():
    u = random_field(GridSpec(1, 16), np.random.default_rng(0))
    with pytest.raises(ValueError):
        bilinear_direct(u, random_field(GridSpec(1, 32), np.random.default_rng(0)), 0.1)
    with pytest.raises(ValueError):
        bilinear_direct(*(2 * [random_field(GridSpec(3, 8), np.random.default_rng(0))]), 0.1)
    assert bilinear_lp_ratio(u, u, 1.0, 2.0) > 0


# ------------------------------------------------------------ slopes


@given(st.floats(0.05, 1.5), st.sampled_from([1, 2, 3]))
def test_slope_of_exact_exponential_spectrum(gamma, dim):
    spec = GridSpec(dim, 16)
    coeffs = np.exp(-gamma * l1_symbol(spec.wavevectors()))[None]
    fit = spectral_slope(SpectralField(spec, coeffs))
    assert fit.radius == pytest.approx(gamma, rel=1e-10)
    assert fit.residual <= 1e-10


def test_slope_of_heat_evolved_exponential():
    # e^{-t k^2 - g|k|} per axis is concave in the shell index; fit is near g + t k
    spec = GridSpec(1, 32)
    coeffs = np.exp(-0.5 * l1_symbol(spec.wavevectors()))[None]
    fit = spectral_slope(heat_semigroup(SpectralField(spec, coeffs), 0.01))
    assert fit.radius > 0.5


def test_slope_degenerate_inputs():
    spec = GridSpec(1, 16)
    with pytest.raises(DegenerateFitError):
        spectral_slope(zeros(spec))
    c = np.zeros((1, 16), complex)
    c[0, 1] = c[0, -1] = 1
    with pytest.raises(DegenerateFitError):
        spectral_slope(SpectralField(spec, c))


def test_white_noise_has_no_radius():
    f = random_field(GridSpec(3, 32), np.random.default_rng(9))
    assert spectral_slope(f).radius < 0.05
