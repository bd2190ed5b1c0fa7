"""Gevrey multiplier exp(sqrt(t) Lambda_1), heat semigroups, kernel L^1 probes,
the Gevrey-conjugated product B_t and its sign-octant decomposition, and the
spectral-slope estimate of the analyticity radius.

Sign conventions for B_t(u, v) = e^{a L1}(e^{-a L1}u . e^{-a L1}v), a = sqrt(t):
for one axis let ``eta`` be the frequency of v, ``zeta = xi - eta`` that of u
and ``xi`` the output frequency, with signs ``lam``, ``mu``, ``gam``.  The
weight exp(a(|xi| - |zeta| - |eta|)) is

* 1 when lam == mu,
* exp(-2a|zeta|) when lam != mu and gam == lam (u is damped),
* exp(-2a|eta|)  when lam != mu and gam == mu (v is damped),

and the multi-dimensional weight is the product over axes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.fft as sfft

from .besov import BesovIndex, gevrey_log_weight, log_besov_norm, lp_norm
from .fourier_grid import (
    GridSpec,
    SpectralField,
    apply_multiplier,
    dealias,
    forward_transform,
    inverse_transform,
    l1_symbol,
)
from .littlewood_paley import DyadicDecomposition

MAX_LINEAR_EXPONENT = 700.0


@dataclass(frozen=True)
class GevreyWeight:
    t: float
    cap: float | None = None
    mode: Literal["linear", "log_domain"] = "linear"

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("Gevrey time must be nonnegative")
        if self.mode not in ("linear", "log_domain"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def radius(self) -> float:
        return math.sqrt(self.t)


@dataclass(frozen=True)
class LogScaledField:
    """``exp(log_scale) * field``; used when the weight would overflow."""

    field: SpectralField
    log_scale: float


def gevrey_exponent(spec: GridSpec, t: float) -> np.ndarray:
    return math.sqrt(t) * l1_symbol(spec.wavevectors())


def gevrey_multiply(f: SpectralField, w: GevreyWeight, sign: int = +1):
    """Scale coefficients by exp(sign * sqrt(t) |xi|_1).

    Linear mode returns a SpectralField and raises ``OverflowError`` if the
    exponent on an occupied mode exceeds the cap (default 700).  Log-domain
    mode returns a :class:`LogScaledField` with the largest exponent factored
    out.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    expo = sign * gevrey_exponent(f.spec, w.t)
    occupied = np.any(f.coeffs != 0, axis=0)
    top = float(expo[occupied].max()) if occupied.any() else 0.0
    if w.mode == "linear":
        cap = MAX_LINEAR_EXPONENT if w.cap is None else min(w.cap, MAX_LINEAR_EXPONENT)
        if top > cap:
            raise OverflowError(f"Gevrey exponent {top:.1f} exceeds {cap}; use log_domain mode")
        return apply_multiplier(f, np.exp(expo))
    shift = max(top, 0.0)
    return LogScaledField(apply_multiplier(f, np.exp(np.where(occupied, expo - shift, -np.inf))), shift)


def heat_semigroup(f: SpectralField, t: float) -> SpectralField:
    """e^{t Laplacian}: multiplier exp(-t|xi|^2)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    k2 = (f.spec.wavevectors() ** 2).sum(axis=0)
    return apply_multiplier(f, np.exp(-t * k2))


def heat_gevrey_symbol(spec: GridSpec, t: float, diffusion: float = 1.0) -> np.ndarray:
    xi = spec.wavevectors()
    return -diffusion * t * (xi**2).sum(axis=0) + math.sqrt(t) * l1_symbol(xi)


def heat_gevrey(f: SpectralField, t: float, diffusion: float = 1.0) -> SpectralField:
    """exp(diffusion t Laplacian + sqrt(t) Lambda_1).

    The exponent is at most dim / (4 diffusion), so this never overflows.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    return apply_multiplier(f, np.exp(heat_gevrey_symbol(f.spec, t, diffusion)))


def log_gevrey_besov_norm(f: SpectralField, t: float, idx: BesovIndex, dec: DyadicDecomposition) -> float:
    """log ||exp(sqrt(t) Lambda_1) f||_{B^s_{p,r}}, computed block by block
    with the largest exponent shifted out, so it is finite for any t."""
    return log_besov_norm(f, idx, dec, gevrey_log_weight(f, t))


def gevrey_besov_norm(f: SpectralField, t: float, idx: BesovIndex, dec: DyadicDecomposition) -> float:
    return math.exp(log_gevrey_besov_norm(f, t, idx, dec))


# ---------------------------------------------------------------- kernels


@dataclass(frozen=True)
class KernelProbe:
    """Quadrature setup for the kernel of |xi|^m exp(-sqrt(t)|xi|_1).

    ``m = 0`` uses the 1-D Poisson factor on ``n_1d`` points with spacing
    ``h_factor * sqrt(t)`` and raises it to the power ``dim``.  ``m >= 1``
    uses a periodic box of side ``box_factor * sqrt(t)`` with ``n`` points
    per axis; working in units of sqrt(t) makes the t-dependence an exact
    change of variables.
    """

    m: int
    t: float
    dim: int = 3
    n: int = 128
    box_factor: float = 32.0
    n_1d: int = 2**20
    h_factor: float = 0.05
    tail_tol: float = 0.15

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if not self.t > 0:
            raise ValueError("t must be positive")
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")


@dataclass(frozen=True)
class KernelL1:
    value: float
    tail_fraction: float
    min_value: float
    resolved: bool


def _tail_mask(n: int, dim: int) -> np.ndarray:
    # outer eighth of the box on each side, coordinates centred at the origin
    idx = np.abs(np.fft.fftfreq(n, 1.0 / n))
    outer = idx > 3 * n / 8
    grids = np.meshgrid(*([outer] * dim), indexing="ij")
    return np.logical_or.reduce(grids)


def kernel_l1_norm(probe: KernelProbe) -> KernelL1:
    """L^1 norm of the inverse transform of |xi|^m exp(-sqrt(t)|xi|_1)."""
    a = math.sqrt(probe.t)
    if probe.m == 0:
        n, h = probe.n_1d, probe.h_factor * a
        xi = 2 * np.pi * np.fft.fftfreq(n, h)
        kern = sfft.ifft(np.exp(-a * np.abs(xi))).real / h
        l1 = float(np.abs(kern).sum() * h)
        tail = float(np.abs(kern[_tail_mask(n, 1)]).sum() * h) / l1
        return KernelL1(l1**probe.dim, tail, float(kern.min()), tail <= probe.tail_tol)
    n, dim = probe.n, probe.dim
    box = probe.box_factor * a
    full = 2 * np.pi * np.fft.fftfreq(n, box / n)
    half = 2 * np.pi * np.fft.rfftfreq(n, box / n)
    axes = [full] * (dim - 1) + [half]
    xi = np.meshgrid(*axes, indexing="ij", sparse=True)
    r2 = sum(x**2 for x in xi)
    symbol = r2 ** (probe.m / 2) * np.exp(-a * sum(np.abs(x) for x in xi))
    del r2, xi
    # periodised kernel: (1/L^dim) sum_k symbol e^{i xi x}; the symbol is even and real
    kern = sfft.irfftn(symbol, s=(n,) * dim, norm="forward") / box**dim
    del symbol
    cell = (box / n) ** dim
    l1 = float(np.abs(kern).sum() * cell)
    tail = float(np.abs(kern[_tail_mask(n, dim)]).sum() * cell) / l1
    return KernelL1(l1, tail, float(kern.min()), tail <= probe.tail_tol)


# ------------------------------------------------------ octant machinery


def half_line_project(f: SpectralField, axis: int, k: int) -> SpectralField:
    """Keep frequencies with k * xi_axis > 0; xi_axis = 0 gets weight 1/2.

    The Nyquist index is assigned to the negative side, so the two
    projections always sum to the identity.
    """
    if k not in (+1, -1):
        raise ValueError("k must be +1 or -1")
    if not 0 <= axis < f.spec.dim:
        raise ValueError(f"axis {axis} out of range for dim {f.spec.dim}")
    ki = f.spec.mode_indices()[axis]
    w = np.where(k * ki > 0, 1.0, 0.0)
    w[ki == 0] = 0.5
    if k == -1:
        w[ki == -f.spec.n // 2] = 1.0
    return f.with_coeffs(f.coeffs * w, real=False)


def damping_multiplier(f: SpectralField, axis: int, t: float, k1: int, k2: int) -> SpectralField:
    """Identity if k1 == k2, else exp(-2 sqrt(t) |xi_axis|) along one axis."""
    if k1 not in (+1, -1) or k2 not in (+1, -1):
        raise ValueError("k1, k2 must be +1 or -1")
    if k1 == k2:
        return f
    xi = f.spec.wavevectors()[axis]
    return apply_multiplier(f, np.exp(-2 * math.sqrt(t) * np.abs(xi)))


def octant_factor(lam: int, mu: int, gam: int) -> str:
    """Which member of {1, damp u, damp v} one axis contributes."""
    if lam == mu:
        return "one"
    return "damp_u" if gam == lam else "damp_v"


def octant_weight_check(
    samples: int, t: float, rng: np.random.Generator, dim: int = 3, scale: float = 10.0
) -> float:
    """Max |exp(a(|xi|_1 - |xi-eta|_1 - |eta|_1)) - prod_i m_i| over random pairs,
    where each m_i is chosen from {1, exp(-2a|xi_i-eta_i|), exp(-2a|eta_i|)}
    by the sign triple of axis i alone."""
    a = math.sqrt(t)
    xi = rng.uniform(-scale, scale, (samples, dim))
    eta = rng.uniform(-scale, scale, (samples, dim))
    zeta = xi - eta
    exact = np.exp(a * (np.abs(xi).sum(1) - np.abs(zeta).sum(1) - np.abs(eta).sum(1)))
    lam, mu, gam = np.sign(eta), np.sign(zeta), np.sign(xi)
    factors = np.ones_like(xi)
    damp_u = (lam != mu) & (gam == lam)
    damp_v = (lam != mu) & (gam == mu)
    factors = np.where(damp_u, np.exp(-2 * a * np.abs(zeta)), factors)
    factors = np.where(damp_v, np.exp(-2 * a * np.abs(eta)), factors)
    return float(np.abs(exact - factors.prod(axis=1)).max())


def _check_pair(u: SpectralField, v: SpectralField) -> None:
    if u.spec != v.spec:
        raise ValueError("fields live on different grids")
    if u.components != v.components:
        raise ValueError("B_t acts componentwise on fields with equal component counts")


def bilinear_direct(u: SpectralField, v: SpectralField, t: float) -> SpectralField:
    """Brute-force frequency sum of B_t(u, v) over the dealiased band.

    Inputs are truncated to the 2/3 band and the output is restricted to it,
    which matches the dealiased pointwise product at t = 0.
    """
    _check_pair(u, v)
    spec = u.spec
    if spec.dim not in (1, 2) or spec.n > 64:
        raise ValueError("bilinear_direct is limited to dim 1-2 and n <= 64")
    a = math.sqrt(t)
    band = spec.dealias_mask()
    ki = spec.mode_indices()
    l1 = l1_symbol(spec.wavevectors())
    uc = u.coeffs * band
    vc = v.coeffs * band
    out = np.zeros_like(uc)
    unit = spec.unit_wavenumber
    for eta in zip(*np.nonzero(band)):
        veta = vc[(slice(None),) + eta]
        if not np.any(veta):
            continue
        eta_int = np.array([ki[d][eta] for d in range(spec.dim)])
        zeta_int = ki - eta_int.reshape((-1,) + (1,) * spec.dim)
        valid = band & np.all(3 * np.abs(zeta_int) <= spec.n, axis=0)
        idx = tuple(np.mod(zeta_int[d], spec.n) for d in range(spec.dim))
        weight = np.exp(a * (l1 - unit * np.abs(zeta_int).sum(axis=0) - unit * np.abs(eta_int).sum()))
        out += np.where(valid, weight, 0.0) * uc[(slice(None),) + idx] * veta.reshape((-1,) + (1,) * spec.dim)
    return SpectralField(spec, out, u.real and v.real)


def bilinear_decomposed(u: SpectralField, v: SpectralField, t: float) -> SpectralField:
    """B_t(u, v) as a sum over sign-octant triples of products in physical space.

    Each term is P_gam[(D_u P_mu u) (D_v P_lam v)] where the P are
    tensor half-space projections and D_u, D_v apply exp(-2 sqrt(t)|xi_i|)
    on the axes selected by :func:`octant_factor`.  No factor exp(+sqrt(t)...)
    is ever formed.
    """
    _check_pair(u, v)
    spec = u.spec
    dim = spec.dim
    uc = dealias(u)
    vc = dealias(v)
    signs = list(itertools.product((-1, 1), repeat=dim))
    a = math.sqrt(t)
    absxi = np.abs(spec.wavevectors())
    damp = [np.exp(-2 * a * absxi[i]) for i in range(dim)]

    def project(f: SpectralField, octant) -> SpectralField:
        for axis, s in enumerate(octant):
            f = half_line_project(f, axis, s)
        return f

    def damped(f: SpectralField, axes) -> np.ndarray:
        c = f.coeffs
        for i in axes:
            c = c * damp[i]
        return inverse_transform(f.with_coeffs(c, real=False))

    pu = {mu: project(uc, mu) for mu in signs}
    pv = {lam: project(vc, lam) for lam in signs}
    acc = np.zeros_like(uc.coeffs)
    for lam in signs:
        for mu in signs:
            for gam in signs:
                kinds = [octant_factor(lam[i], mu[i], gam[i]) for i in range(dim)]
                uu = damped(pu[mu], [i for i, k in enumerate(kinds) if k == "damp_u"])
                vv = damped(pv[lam], [i for i, k in enumerate(kinds) if k == "damp_v"])
                term = forward_transform(uu * vv, spec)
                acc += project(term, gam).coeffs
    out = SpectralField(spec, acc, u.real and v.real)
    out = dealias(out)
    if out.real:
        # the summed terms are Hermitian up to rounding; drop the residue
        phys = inverse_transform(out.with_coeffs(out.coeffs, real=False)).real
        out = dealias(forward_transform(phys, spec))
    return out


def bilinear_conjugated(u: SpectralField, v: SpectralField, t: float) -> SpectralField:
    """B_t via explicit Gevrey conjugation of the dealiased product (linear mode)."""
    _check_pair(u, v)
    w = GevreyWeight(t)
    uu = inverse_transform(gevrey_multiply(dealias(u), w, -1))
    vv = inverse_transform(gevrey_multiply(dealias(v), w, -1))
    prod = dealias(forward_transform(uu * vv, u.spec))
    return gevrey_multiply(prod.with_coeffs(prod.coeffs, u.real and v.real), w, +1)


def bilinear_lp_ratio(u: SpectralField, v: SpectralField, t: float, p: float) -> float:
    """||B_t(u, v)||_{L^p} / (||u||_{L^{2p}} ||v||_{L^{2p}})."""
    num = lp_norm(bilinear_decomposed(u, v, t), p)
    return num / (lp_norm(dealias(u), 2 * p) * lp_norm(dealias(v), 2 * p))


# ---------------------------------------------------------- spectral slope


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    shells: int

    @property
    def radius(self) -> float:
        return -self.slope


class DegenerateFitError(ValueError):
    pass


def shell_maxima(f: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    """(|xi|_1 shell centres, max |coefficient| per integer l1 shell)."""
    m = np.abs(f.spec.mode_indices()).sum(axis=0).ravel()
    amp = np.abs(f.coeffs).max(axis=0).ravel()
    peak = np.zeros(m.max() + 1)
    np.maximum.at(peak, m, amp)
    shells = np.arange(m.max() + 1)
    return shells * f.spec.unit_wavenumber, peak


def spectral_slope(
    f: SpectralField, noise_floor: float = 1e-13, min_shells: int = 5, max_shell: int | None = None
) -> SlopeFit:
    """Least-squares line through log(max |f_k|) against the l1 shell centre.

    Shells below ``noise_floor`` times the overall peak are dropped, as is
    the mean.  ``-slope`` estimates the Gevrey radius.
    """
    centres, peak = shell_maxima(f)
    top = peak[1:].max(initial=0.0)
    if top == 0.0:
        raise DegenerateFitError("field has no nonzero modes")
    keep = peak > noise_floor * top
    keep[0] = False
    if max_shell is not None:
        keep[max_shell + 1 :] = False
    if keep.sum() < min_shells:
        raise DegenerateFitError(f"only {int(keep.sum())} shells above the noise floor")
    x, y = centres[keep], np.log(peak[keep])
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(np.sqrt(res[0] / x.size)) if res.size else 0.0
    return SlopeFit(float(slope), float(intercept), resid, int(keep.sum()))
