"""Grid L^p norms, homogeneous Besov norms, Chemin-Lerner time-space norms
and measured-ratio monitors for the classical Besov inequalities.

Block norms are carried in log form throughout so that exponentially
weighted (Gevrey) fields never overflow: a weight ``exp(w(xi))`` is
applied per block after subtracting the block's maximal exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .fourier_grid import SpectralField, dealias, forward_transform, gradient, inverse_transform, l1_symbol
from .littlewood_paley import DyadicDecomposition

INF = math.inf


@dataclass(frozen=True)
class BesovIndex:
    s: float
    p: float
    r: float

    def __post_init__(self):
        for name in ("p", "r"):
            v = getattr(self, name)
            if not (v >= 1):
                raise ValueError(f"{name} must lie in [1, inf], got {v}")
        if not math.isfinite(self.s):
            raise ValueError("regularity s must be finite")


@dataclass(frozen=True)
class TimeNormSpec:
    rho: float
    t_grid: np.ndarray
    besov: BesovIndex

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("t_grid must be a nonempty 1-D array")
        if t[0] < 0 or np.any(np.diff(t) <= 0):
            raise ValueError("t_grid must start at t >= 0 and increase strictly")
        if not (self.rho >= 1):
            raise ValueError("rho must lie in [1, inf]")
        object.__setattr__(self, "t_grid", t)


def _pointwise_abs(f: SpectralField) -> np.ndarray:
    phys = inverse_transform(f)
    if f.components == 1:
        return np.abs(phys[0])
    return np.sqrt((np.abs(phys) ** 2).sum(axis=0))


def lp_norm(f: SpectralField, p: float) -> float:
    """Rectangle-rule L^p norm over the box; vectors use the pointwise
    Euclidean length.  ``p = inf`` is the grid maximum."""
    if not (p >= 1):
        raise ValueError("p must lie in [1, inf]")
    a = _pointwise_abs(f)
    if math.isinf(p):
        return float(a.max())
    cell = f.spec.spacing**f.spec.dim
    return float((np.sum(a**p) * cell) ** (1.0 / p))


def _log_lp_of_coeffs(f: SpectralField, coeffs: np.ndarray, p: float) -> float:
    if not np.any(coeffs):
        return -INF
    if p == 2:
        return 0.5 * math.log(f.spec.volume * float(np.sum(np.abs(coeffs) ** 2)))
    return math.log(lp_norm(f.with_coeffs(coeffs), p))


def block_log_norms(
    f: SpectralField,
    p: float,
    dec: DyadicDecomposition,
    log_weight: np.ndarray | None = None,
) -> np.ndarray:
    """``log ||D_j (e^{w} f)||_{L^p}`` for every block, ``-inf`` if empty.

    ``log_weight`` is the exponent ``w`` sampled on the lattice.  For
    ``p = 2`` the norms come from Parseval; other ``p`` use grid quadrature.
    """
    out = np.empty(len(dec.js))
    for i, j in enumerate(dec.js):
        phi_j = dec.block(j)
        if log_weight is None:
            out[i] = _log_lp_of_coeffs(f, f.coeffs * phi_j, p)
            continue
        # shift by the largest exponent on modes that are actually occupied,
        # otherwise exp(w - shift) can underflow for every live mode
        support = (phi_j > 0) & np.any(f.coeffs != 0, axis=0)
        shift = float(log_weight[support].max()) if support.any() else 0.0
        scaled = np.where(support, np.exp(np.where(support, log_weight - shift, 0.0)) * phi_j, 0.0)
        out[i] = _log_lp_of_coeffs(f, f.coeffs * scaled, p) + shift
    return out


def gevrey_log_weight(f: SpectralField, t: float) -> np.ndarray:
    """Exponent sqrt(t) |xi|_1 of the Gevrey multiplier on f's lattice."""
    return math.sqrt(t) * l1_symbol(f.spec.wavevectors())


def _combine_blocks(log_blocks: np.ndarray, s: float, r: float, dec: DyadicDecomposition) -> float:
    js = np.array(list(dec.js), dtype=float)
    terms = log_blocks + js * s * math.log(2.0)
    if np.all(np.isneginf(terms)):
        return -INF
    if math.isinf(r):
        return float(terms.max())
    return float(logsumexp(r * terms) / r)


def log_besov_norm(
    f: SpectralField, idx: BesovIndex, dec: DyadicDecomposition, log_weight: np.ndarray | None = None
) -> float:
    return _combine_blocks(block_log_norms(f, idx.p, dec, log_weight), idx.s, idx.r, dec)


def besov_norm(f: SpectralField, idx: BesovIndex, dec: DyadicDecomposition) -> float:
    """l^r over blocks of 2^{js} ||D_j f||_{L^p}; the mean never enters."""
    return math.exp(log_besov_norm(f, idx, dec))


def _trapezoid_log_weights(t: np.ndarray) -> np.ndarray:
    w = np.zeros_like(t)
    dt = np.diff(t)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return np.log(w)


def time_block_log_norms(
    snapshots: Sequence[SpectralField],
    t_grid: np.ndarray,
    p: float,
    dec: DyadicDecomposition,
    gevrey: bool = False,
) -> np.ndarray:
    """Array ``[time, block]`` of log block norms, Gevrey-weighted at each
    snapshot's own time when ``gevrey`` is set."""
    t_grid = np.asarray(t_grid, dtype=float)
    if len(snapshots) != t_grid.size:
        raise ValueError("snapshots and t_grid have different lengths")
    return np.array(
        [
            block_log_norms(u, p, dec, gevrey_log_weight(u, t) if gevrey else None)
            for u, t in zip(snapshots, t_grid)
        ]
    )


def integrate_time_blocks(logs: np.ndarray, t_grid: np.ndarray, rho: float) -> np.ndarray:
    """Per block, log of (int ||D_j u||^rho dt)^{1/rho} by the trapezoidal
    rule, or the max over time when rho is infinite."""
    t_grid = np.asarray(t_grid, dtype=float)
    if math.isinf(rho):
        return logs.max(axis=0)
    if t_grid.size < 2:
        raise ValueError("finite rho needs at least two snapshots")
    lw = _trapezoid_log_weights(t_grid)[:, None]
    empty = np.all(np.isneginf(logs), axis=0)
    with np.errstate(invalid="ignore"):
        summed = logsumexp(rho * logs + lw, axis=0)
    return np.where(empty, -INF, summed / rho)


def chemin_lerner_log_blocks(
    snapshots: Sequence[SpectralField],
    t_grid: np.ndarray,
    p: float,
    rho: float,
    dec: DyadicDecomposition,
    gevrey: bool = False,
) -> np.ndarray:
    """Per block, log of (int_T ||D_j u(t)||_p^rho dt)^{1/rho} (max if rho=inf)."""
    if not math.isinf(rho) and len(snapshots) < 2:
        raise ValueError("finite rho needs at least two snapshots")
    return integrate_time_blocks(time_block_log_norms(snapshots, t_grid, p, dec, gevrey), t_grid, rho)


def combine_blocks(log_blocks: np.ndarray, s: float, r: float, dec: DyadicDecomposition) -> float:
    """log of the l^r sum of 2^{js} exp(log_blocks[j])."""
    return _combine_blocks(log_blocks, s, r, dec)


def log_chemin_lerner_norm(
    snapshots: Sequence[SpectralField], spec: TimeNormSpec, dec: DyadicDecomposition, gevrey: bool = False
) -> float:
    idx = spec.besov
    blocks = chemin_lerner_log_blocks(snapshots, spec.t_grid, idx.p, spec.rho, dec, gevrey)
    return _combine_blocks(blocks, idx.s, idx.r, dec)


def chemin_lerner_norm(
    snapshots: Sequence[SpectralField], spec: TimeNormSpec, dec: DyadicDecomposition, gevrey: bool = False
) -> float:
    """Time-space norm taking L^rho in time block by block (trapezoidal
    rule) before the weighted l^r sum.  With ``gevrey`` each snapshot is
    weighted by exp(sqrt(t) Lambda_1) at its own time."""
    return math.exp(log_chemin_lerner_norm(snapshots, spec, dec, gevrey))


@dataclass
class NormAccumulator:
    """Streaming Chemin-Lerner block integrals for one (p, rho) pair.

    Feed snapshots in time order with :meth:`add`; query any (s, r) with
    :meth:`norm`.  For finite ``rho`` the running integrals are nondecreasing.
    """

    dec: DyadicDecomposition
    p: float
    rho: float
    gevrey: bool = False
    log_integrals: np.ndarray = field(init=False)
    _last_t: float | None = field(init=False, default=None)
    _last_logs: np.ndarray | None = field(init=False, default=None)

    def __post_init__(self):
        self.log_integrals = np.full(len(self.dec.js), -INF)

    def add(self, t: float, u: SpectralField) -> None:
        logs = block_log_norms(u, self.p, self.dec, gevrey_log_weight(u, t) if self.gevrey else None)
        if math.isinf(self.rho):
            self.log_integrals = np.maximum(self.log_integrals, logs)
        elif self._last_t is not None:
            if t <= self._last_t:
                raise ValueError("snapshots must arrive in increasing time order")
            half = math.log((t - self._last_t) / 2)
            with np.errstate(invalid="ignore"):
                inc = np.logaddexp(self.rho * self._last_logs, self.rho * logs) + half
                self.log_integrals = np.logaddexp(self.log_integrals, inc)
        self._last_t, self._last_logs = t, logs

    def log_blocks(self) -> np.ndarray:
        if math.isinf(self.rho):
            return self.log_integrals.copy()
        return self.log_integrals / self.rho

    def norm(self, s: float, r: float = 1.0) -> float:
        return math.exp(_combine_blocks(self.log_blocks(), s, r, self.dec))


def interpolation_check(
    f: SpectralField, s1: float, s2: float, theta: float, p: float, r: float, dec: DyadicDecomposition
) -> float:
    """||f||_{B^{theta s1 + (1-theta) s2}} / (||f||_{B^{s1}}^theta ||f||_{B^{s2}}^{1-theta})."""
    if not s1 < s2:
        raise ValueError("need s1 < s2")
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    mid = log_besov_norm(f, BesovIndex(theta * s1 + (1 - theta) * s2, p, r), dec)
    lo = log_besov_norm(f, BesovIndex(s1, p, r), dec)
    hi = log_besov_norm(f, BesovIndex(s2, p, r), dec)
    if math.isinf(lo) or math.isinf(hi):
        raise ValueError("interpolation ratio undefined for the zero field")
    return math.exp(mid - theta * lo - (1 - theta) * hi)


def embedding_ratio(
    f: SpectralField, s: float, p1: float, p2: float, r: float, dec: DyadicDecomposition
) -> float:
    """||f||_{B^{s - dim(1/p1 - 1/p2)}_{p2,r}} / ||f||_{B^s_{p1,r}} for p1 <= p2."""
    if not p1 <= p2:
        raise ValueError("need p1 <= p2")
    dim = f.spec.dim
    loss = dim * (1.0 / p1 - (0.0 if math.isinf(p2) else 1.0 / p2))
    num = log_besov_norm(f, BesovIndex(s - loss, p2, r), dec)
    den = log_besov_norm(f, BesovIndex(s, p1, r), dec)
    return math.exp(num - den)


def gradient_equivalence_ratio(f: SpectralField, s: float, p: float, r: float, dec: DyadicDecomposition) -> float:
    """||grad f||_{B^{s-1}_{p,r}} / ||f||_{B^s_{p,r}} for a scalar field."""
    num = log_besov_norm(gradient(f), BesovIndex(s - 1, p, r), dec)
    den = log_besov_norm(f, BesovIndex(s, p, r), dec)
    return math.exp(num - den)


class InadmissibleExponents(ValueError):
    pass


def _as_series(f, n: int) -> list[SpectralField]:
    if isinstance(f, SpectralField):
        return [f] * n
    f = list(f)
    if len(f) != n:
        raise ValueError("field series and t_grid have different lengths")
    return f


def _pointwise_product(f: SpectralField, g: SpectralField) -> SpectralField:
    pf, pg = inverse_transform(f), inverse_transform(g)
    out = forward_transform((pf * pg).sum(axis=0) if f.components > 1 else pf * pg, f.spec)
    return dealias(out.with_coeffs(out.coeffs, f.real and g.real))


def product_estimate_ratio(
    f,
    g,
    mode: str,
    p: float,
    q: float,
    t_grid: np.ndarray,
    dec: DyadicDecomposition,
) -> float:
    """Left side over right side of a Gevrey-weighted product estimate.

    ``f`` and ``g`` are fields (held constant in time) or series aligned
    with ``t_grid``; every norm is a Chemin-Lerner norm of the field
    weighted by exp(sqrt(t) Lambda_1).

    ``mode="into_p"``::

        ||fg||_{L~1 B^{d/p}_{p,1}}
            vs  ||f||_{L~inf B^{d/q-1}_{q,1}} ||g||_{L~1 B^{d/q+1}_{q,1}} + (f <-> g)

    admissible when -min(1/3, 1/(2p)) <= 1/q - 1/p.

    ``mode="into_q"``::

        ||fg||_{L~1 B^{d/q}_{q,1}}
            vs  ||f||_{L~2 B^{d/p}_{p,1}} ||g||_{L~2 B^{d/q}_{q,1}}
              + ||f||_{L~1 B^{d/p+1}_{p,1}} ||g||_{L~inf B^{d/q-1}_{q,1}}

    admissible when 1/q - 1/p <= 1/3.
    """
    if not (1 < p < INF and 1 < q < INF):
        raise InadmissibleExponents("need 1 < p, q < inf")
    gap = 1.0 / q - 1.0 / p
    if mode == "into_p":
        if gap < -min(1.0 / 3.0, 1.0 / (2.0 * p)) - 1e-15:
            raise InadmissibleExponents(f"(p, q) = ({p}, {q}) violates -min(1/3, 1/(2p)) <= 1/q - 1/p")
    elif mode == "into_q":
        if gap > 1.0 / 3.0 + 1e-15:
            raise InadmissibleExponents(f"(p, q) = ({p}, {q}) violates 1/q - 1/p <= 1/3")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    t_grid = np.asarray(t_grid, dtype=float)
    fs = _as_series(f, t_grid.size)
    gs = _as_series(g, t_grid.size)
    fg = [_pointwise_product(a, b) for a, b in zip(fs, gs)]
    d = f.spec.dim if isinstance(f, SpectralField) else fs[0].spec.dim

    def cl(series, rho, s, pp):
        return log_chemin_lerner_norm(series, TimeNormSpec(rho, t_grid, BesovIndex(s, pp, 1)), dec, gevrey=True)

    if mode == "into_p":
        lhs = cl(fg, 1, d / p, p)
        rhs = np.logaddexp(
            cl(fs, INF, d / q - 1, q) + cl(gs, 1, d / q + 1, q),
            cl(fs, 1, d / q + 1, q) + cl(gs, INF, d / q - 1, q),
        )
    else:
        lhs = cl(fg, 1, d / q, q)
        rhs = np.logaddexp(
            cl(fs, 2, d / p, p) + cl(gs, 2, d / q, q),
            cl(fs, 1, d / p + 1, p) + cl(gs, INF, d / q - 1, q),
        )
    if math.isinf(lhs):
        return 0.0
    return math.exp(lhs - rhs)
