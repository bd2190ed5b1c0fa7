"""Periodic-box discretization: grids, spectral fields, transforms and operators.

Conventions
-----------
Fields live on the torus ``[0, L)^dim`` sampled at ``n`` points per axis.
Coefficients are Fourier-series coefficients::

    f(x) = sum_k c_k exp(i kappa_k . x),   kappa_k = 2 pi k / L,

so the forward transform divides by ``n**dim`` and the inverse carries no
factor.  With this choice ``cos(x_1)`` has coefficient 1/2 at ``k = (+-1, 0, 0)``,
products of fields are plain (acyclic) convolutions of coefficients on the
retained modes, and Parseval reads ``||f||_2^2 = L^dim * sum_k |c_k|^2``.

Coefficient arrays use numpy's FFT ordering along every axis and carry a
leading component axis: ``coeffs.shape == (components,) + (n,) * dim``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.fft as sfft

FrequencySymbol = Callable[[np.ndarray], np.ndarray]
"""Maps a wavevector array ``xi`` of shape ``(dim, n, ..., n)`` to symbol values."""


@dataclass(frozen=True)
class GridSpec:
    dim: int
    n: int
    box_length: float = 2.0 * np.pi

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.box_length > 0:
            raise ValueError("box_length must be positive")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def spacing(self) -> float:
        return self.box_length / self.n

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def unit_wavenumber(self) -> float:
        return 2.0 * np.pi / self.box_length

    def integer_modes(self) -> np.ndarray:
        """Integer lattice indices along one axis, FFT order."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).round().astype(int)

    def mode_indices(self) -> np.ndarray:
        """Integer multi-indices, shape ``(dim,) + shape``."""
        k = self.integer_modes()
        return np.stack(np.meshgrid(*([k] * self.dim), indexing="ij"))

    def wavevectors(self) -> np.ndarray:
        """Physical wavevectors ``2 pi k / L``, shape ``(dim,) + shape``."""
        return self.mode_indices() * self.unit_wavenumber

    def derivative_wavevectors(self) -> np.ndarray:
        """Wavevectors with the Nyquist entry of each axis set to zero."""
        xi = self.wavevectors()
        xi[self.mode_indices() == -self.n // 2] = 0.0
        return xi

    def coordinates(self) -> np.ndarray:
        x = np.arange(self.n) * self.spacing
        return np.stack(np.meshgrid(*([x] * self.dim), indexing="ij"))

    def dealias_mask(self) -> np.ndarray:
        """True on modes kept by the 2/3 rule (every ``|k_i| <= n/3``)."""
        k = np.abs(self.mode_indices())
        return np.all(3 * k <= self.n, axis=0)


@dataclass(frozen=True, eq=False)
class SpectralField:
    spec: GridSpec
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == self.spec.dim:
            c = c[None]
        if c.shape[1:] != self.spec.shape:
            raise ValueError(
                f"coefficient shape {c.shape} incompatible with grid {self.spec.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    def with_coeffs(self, coeffs: np.ndarray, real: bool | None = None) -> SpectralField:
        return replace(self, coeffs=coeffs, real=self.real if real is None else real)

    def to_physical(self) -> np.ndarray:
        return inverse_transform(self)

    def component(self, i: int) -> SpectralField:
        return self.with_coeffs(self.coeffs[i : i + 1])

    def __add__(self, other: SpectralField) -> SpectralField:
        _check_same_grid(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs, self.real and other.real)

    def __sub__(self, other: SpectralField) -> SpectralField:
        _check_same_grid(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs, self.real and other.real)

    def __neg__(self) -> SpectralField:
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, scalar) -> SpectralField:
        real = self.real and np.isrealobj(scalar)
        return self.with_coeffs(self.coeffs * scalar, real)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max(initial=0.0))


def _check_same_grid(a: SpectralField, b: SpectralField) -> None:
    if a.spec != b.spec or a.components != b.components:
        raise ValueError("fields live on different grids or have different component counts")


def zeros(spec: GridSpec, components: int = 1) -> SpectralField:
    return SpectralField(spec, np.zeros((components,) + spec.shape, dtype=complex))


def stack(fields: list[SpectralField]) -> SpectralField:
    spec = fields[0].spec
    return SpectralField(
        spec, np.concatenate([f.coeffs for f in fields]), all(f.real for f in fields)
    )


def forward_transform(real_field: np.ndarray, spec: GridSpec) -> SpectralField:
    """Physical samples -> Fourier-series coefficients.

    ``real_field`` has shape ``spec.shape`` (scalar) or ``(c,) + spec.shape``.
    Complex input is accepted and produces a field flagged non-real.
    """
    a = np.asarray(real_field)
    if a.shape == spec.shape:
        a = a[None]
    if a.shape[1:] != spec.shape:
        raise ValueError(f"array shape {np.shape(real_field)} does not match grid {spec.shape}")
    axes = tuple(range(1, spec.dim + 1))
    coeffs = sfft.fftn(a, axes=axes, norm="forward")
    return SpectralField(spec, coeffs, real=not np.iscomplexobj(a))


def inverse_transform(f: SpectralField) -> np.ndarray:
    """Coefficients -> physical samples, shape ``(components,) + shape``.

    Returns a real array when the field is flagged real.
    """
    axes = tuple(range(1, f.spec.dim + 1))
    out = sfft.ifftn(f.coeffs, axes=axes, norm="forward")
    return out.real if f.real else out


def evaluate_symbol(spec: GridSpec, m: FrequencySymbol) -> np.ndarray:
    return np.asarray(m(spec.wavevectors()))


def apply_multiplier(f: SpectralField, m: FrequencySymbol | np.ndarray) -> SpectralField:
    """Multiply every component's coefficients by the symbol ``m``.

    Raises ``FloatingPointError`` if the symbol is non-finite on an occupied
    frequency; exponential weights that can overflow belong in the
    log-domain routines of :mod:`gevlc.gevrey_ops`.
    """
    values = m if isinstance(m, np.ndarray) else evaluate_symbol(f.spec, m)
    values = np.broadcast_to(values, f.spec.shape)
    occupied = np.any(f.coeffs != 0, axis=0)
    if not np.all(np.isfinite(values[occupied])):
        raise FloatingPointError("multiplier is not finite on an occupied frequency")
    out = np.where(occupied, values, 0.0) * f.coeffs
    real = f.real and bool(np.all(np.isreal(values)))
    return f.with_coeffs(out, real)


def l1_symbol(xi: np.ndarray) -> np.ndarray:
    """|xi|_1, the symbol of Lambda_1."""
    return np.abs(xi).sum(axis=0)


def l2_symbol(xi: np.ndarray) -> np.ndarray:
    """|xi|, the symbol of Lambda = sqrt(-Laplacian)."""
    return np.sqrt((xi**2).sum(axis=0))


def _ik(spec: GridSpec) -> np.ndarray:
    return 1j * spec.derivative_wavevectors()


def gradient(f: SpectralField) -> SpectralField:
    """Gradient of a scalar field (or of each component, component-major)."""
    ik = _ik(f.spec)
    out = (f.coeffs[:, None] * ik[None]).reshape((-1,) + f.spec.shape)
    return f.with_coeffs(out)


def divergence(u: SpectralField) -> SpectralField:
    if u.components != u.spec.dim:
        raise ValueError(f"divergence needs {u.spec.dim} components, got {u.components}")
    return u.with_coeffs((_ik(u.spec) * u.coeffs).sum(axis=0, keepdims=True))


def laplacian(f: SpectralField) -> SpectralField:
    k2 = (f.spec.derivative_wavevectors() ** 2).sum(axis=0)
    return f.with_coeffs(-k2 * f.coeffs)


def partial(f: SpectralField, axis: int) -> SpectralField:
    return f.with_coeffs(_ik(f.spec)[axis] * f.coeffs)


def leray_project(u: SpectralField) -> SpectralField:
    """Project onto divergence-free fields: P = I - grad Lap^{-1} div.

    Uses the same Nyquist-zeroed wavevectors as the derivative operators,
    so ``divergence(leray_project(u))`` vanishes to rounding.  Modes whose
    derivative wavevector is zero (the mean) pass through unchanged.
    """
    if u.components != u.spec.dim:
        raise ValueError(f"Leray projection needs {u.spec.dim} components, got {u.components}")
    xi = u.spec.derivative_wavevectors()
    k2 = (xi**2).sum(axis=0)
    safe = np.where(k2 == 0, 1.0, k2)
    kdotu = (xi * u.coeffs).sum(axis=0)
    return u.with_coeffs(u.coeffs - xi * (kdotu / safe))


def dealias(f: SpectralField) -> SpectralField:
    """2/3 rule: zero every mode with some ``|k_i| > n/3``."""
    return f.with_coeffs(f.coeffs * f.spec.dealias_mask())


def zero_mean(f: SpectralField) -> SpectralField:
    c = f.coeffs.copy()
    c[(slice(None),) + (0,) * f.spec.dim] = 0.0
    return f.with_coeffs(c)


def mean(f: SpectralField) -> np.ndarray:
    return f.coeffs[(slice(None),) + (0,) * f.spec.dim].copy()


def product(a: SpectralField, b: SpectralField) -> SpectralField:
    """Pointwise product of two scalar fields, dealiased."""
    pa, pb = inverse_transform(a), inverse_transform(b)
    out = forward_transform(pa * pb, a.spec)
    return dealias(out)


def grid_l2_norm(f: SpectralField) -> float:
    """Rectangle-rule L^2 norm over the box (sums components)."""
    phys = inverse_transform(f)
    return float(np.sqrt((np.abs(phys) ** 2).sum() * f.spec.spacing**f.spec.dim))


def coeff_l2_norm(f: SpectralField) -> float:
    """Parseval side: sqrt(L^dim * sum |c_k|^2)."""
    return float(np.sqrt(f.spec.volume * (np.abs(f.coeffs) ** 2).sum()))


def random_field(
    spec: GridSpec,
    rng: np.random.Generator,
    components: int = 1,
    dealiased: bool = True,
    zero_mean_: bool = True,
) -> SpectralField:
    """White-noise real field, optionally band-limited to the 2/3 band."""
    phys = rng.standard_normal((components,) + spec.shape)
    f = forward_transform(phys, spec)
    if dealiased:
        f = dealias(f)
    if zero_mean_:
        f = zero_mean(f)
    return f
