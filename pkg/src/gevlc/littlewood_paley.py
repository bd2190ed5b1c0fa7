"""Homogeneous dyadic decomposition on the lattice, Bony paraproducts and
Bernstein-ratio instrumentation.

The band-pass profile ``phi`` is a smooth radial bump: it ramps up on
[3/4, 1] and down on [2, 8/3] with the exp(-1/x) smooth step, and is then
normalized by ``sum_j psi(2^-j r)``.  That normalizer is invariant under
``r -> 2r``, so the blocks sum to one at every nonzero frequency up to
rounding.  ``chi(r) = 1 - sum_{j >= 0} phi(2^-j r)`` is the matching
low-pass profile (equal to 1 on ``r <= 3/4``, zero for ``r >= 4/3``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .fourier_grid import (
    GridSpec,
    SpectralField,
    dealias,
    forward_transform,
    inverse_transform,
    l2_symbol,
    partial,
    zero_mean,
)

_INNER, _PLATEAU_LO, _PLATEAU_HI, _OUTER = 0.75, 1.0, 2.0, 8.0 / 3.0


def _smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def raw_bump(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    up = _smooth_step((r - _INNER) / (_PLATEAU_LO - _INNER))
    down = _smooth_step((_OUTER - r) / (_OUTER - _PLATEAU_HI))
    return np.where((r > _INNER) & (r < _OUTER), np.minimum(up, down), 0.0)


def _bump_normalizer(r: np.ndarray) -> np.ndarray:
    # every r > 0 meets the plateau of exactly one dyadic dilate, so only the
    # dilates with 2^-j r in (3/4, 8/3) contribute
    r = np.asarray(r, dtype=float)
    safe = np.where(r > 0, r, 1.0)
    base = np.floor(np.log2(safe))
    total = np.zeros_like(safe)
    for shift in range(-2, 3):
        total += raw_bump(safe * 2.0 ** (-(base + shift)))
    return total


def phi(r: np.ndarray) -> np.ndarray:
    """Band-pass profile, supported in 3/4 <= r <= 8/3."""
    r = np.asarray(r, dtype=float)
    bump = raw_bump(r)
    live = bump > 0
    return np.where(live, bump / _bump_normalizer(np.where(live, r, 1.0)), 0.0)


def chi(r: np.ndarray) -> np.ndarray:
    """Low-pass profile, 1 on r <= 3/4 and supported in r <= 4/3."""
    r = np.asarray(r, dtype=float)
    out = np.ones_like(r)
    for j in range(0, 3):
        out -= phi(r * 2.0**-j)
    return np.where(r >= 4.0 / 3.0, 0.0, np.clip(out, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    """Cutoffs sampled on a grid, plus the range of non-empty blocks.

    ``j_min`` is the lowest block reaching the smallest nonzero frequency,
    ``j_max`` the highest block touching the largest lattice frequency, so
    the blocks cover every nonzero mode of the grid.
    """

    spec: GridSpec
    j_min: int
    j_max: int
    radius: np.ndarray = field(repr=False)
    blocks: dict[int, np.ndarray] = field(repr=False)

    @property
    def js(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def phi_symbol(self, xi: np.ndarray) -> np.ndarray:
        return phi(l2_symbol(xi))

    def chi_symbol(self, xi: np.ndarray) -> np.ndarray:
        return chi(l2_symbol(xi))

    def block(self, j: int) -> np.ndarray:
        if j not in self.blocks:
            raise ValueError(f"block {j} outside [{self.j_min}, {self.j_max}]")
        return self.blocks[j]

    def low_pass(self, j: int) -> np.ndarray:
        """Homogeneous S_j symbol: chi(2^-j xi), with the mean mode removed."""
        out = chi(self.radius * 2.0**-j)
        out[(0,) * self.spec.dim] = 0.0
        return out


def build_cutoffs(spec: GridSpec) -> DyadicDecomposition:
    r = l2_symbol(spec.wavevectors())
    nonzero = r[r > 0]
    r_min, r_max = nonzero.min(), nonzero.max()
    j_min = int(np.ceil(np.log2(r_min / _OUTER)))
    if r_min >= _OUTER * 2.0**j_min:
        j_min += 1
    j_max = int(np.floor(np.log2(r_max / _INNER)))
    if _INNER * 2.0**j_max >= r_max:
        j_max -= 1
    if j_max - j_min + 1 < 3:
        raise ValueError(f"grid n={spec.n} hosts fewer than 3 dyadic blocks")
    blocks = {j: phi(r * 2.0**-j) for j in range(j_min, j_max + 1)}
    return DyadicDecomposition(spec, j_min, j_max, r, blocks)


def delta_j(f: SpectralField, j: int, dec: DyadicDecomposition) -> SpectralField:
    return f.with_coeffs(f.coeffs * dec.block(j))


def s_j(f: SpectralField, j: int, dec: DyadicDecomposition) -> SpectralField:
    return f.with_coeffs(f.coeffs * dec.low_pass(j))


def block_series(f: SpectralField, dec: DyadicDecomposition) -> dict[int, SpectralField]:
    return {j: delta_j(f, j, dec) for j in dec.js}


def partition_residual(dec: DyadicDecomposition) -> float:
    """max |sum_j phi(2^-j xi) - 1| over nonzero lattice frequencies."""
    total = sum(dec.blocks.values())
    mask = dec.radius > 0
    return float(np.abs(total[mask] - 1.0).max())


def _scalar(f: SpectralField) -> None:
    if f.components != 1:
        raise ValueError("paraproducts act on scalar fields; apply componentwise")


def bony_decompose(u: SpectralField, v: SpectralField, dec: DyadicDecomposition):
    """Split the dealiased product ``u v`` into ``(T_u v, T_v u, R(u, v))``.

    Means are dropped (homogeneous setting), so the three parts sum to the
    product of the zero-mean parts.  Each piece is formed in physical space
    and dealiased.
    """
    _scalar(u)
    _scalar(v)
    u, v = zero_mean(u), zero_mean(v)
    ublocks = {j: inverse_transform(delta_j(u, j, dec))[0] for j in dec.js}
    vblocks = {j: inverse_transform(delta_j(v, j, dec))[0] for j in dec.js}

    def paraproduct(low: SpectralField, high_blocks: dict[int, np.ndarray]) -> np.ndarray:
        acc = 0.0
        for j in dec.js:
            acc = acc + inverse_transform(s_j(low, j - 1, dec))[0] * high_blocks[j]
        return acc

    tuv = paraproduct(u, vblocks)
    tvu = paraproduct(v, ublocks)
    ruv = 0.0
    for j in dec.js:
        tilde = sum(vblocks[k] for k in (j - 1, j, j + 1) if k in vblocks)
        ruv = ruv + ublocks[j] * tilde
    real = u.real and v.real
    parts = []
    for p in (tuv, tvu, ruv):
        g = forward_transform(p, dec.spec)
        parts.append(dealias(g.with_coeffs(g.coeffs, real)))
    return tuple(parts)


@dataclass(frozen=True)
class BernsteinRatio:
    upper: float
    """sup_|a|=k ||d^a D_j f||_q / (2^{j(k + dim(1/p - 1/q))} ||D_j f||_p)."""
    annulus: float
    """sup_|a|=k ||d^a D_j f||_p / (2^{jk} ||D_j f||_p), the reverse bound."""


class EmptyBlockError(ValueError):
    pass


def bernstein_ratio(
    f: SpectralField, j: int, p: float, q: float, k: int, dec: DyadicDecomposition
) -> BernsteinRatio:
    from .besov import lp_norm

    if not (q >= p >= 1):
        raise ValueError("need q >= p >= 1")
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    g = delta_j(f, j, dec)
    base_p = lp_norm(g, p)
    if base_p == 0.0:
        raise EmptyBlockError(f"block {j} of the field is empty")
    dim = f.spec.dim
    sup_q = sup_p = 0.0
    for alpha in itertools.combinations_with_replacement(range(dim), k):
        h = g
        for axis in alpha:
            h = partial(h, axis)
        sup_q = max(sup_q, lp_norm(h, q))
        sup_p = max(sup_p, lp_norm(h, p))
    inv = (1.0 / p) - (0.0 if np.isinf(q) else 1.0 / q)
    upper = sup_q / (2.0 ** (j * (k + dim * inv)) * base_p)
    annulus = sup_p / (2.0**(j * k) * base_p)
    return BernsteinRatio(upper, annulus)


def block_norm_rows(f: SpectralField, s: float, p: float, dec: DyadicDecomposition):
    """Rows ``(j, 2^{js} ||D_j f||_p)`` for CSV export."""
    from .besov import lp_norm

    return [(j, 2.0 ** (j * s) * lp_norm(delta_j(f, j, dec), p)) for j in dec.js]
