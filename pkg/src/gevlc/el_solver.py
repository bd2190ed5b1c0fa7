"""Mild-solution evolution of the simplified Ericksen-Leslie system

    u_t - Lap u + P[u . grad u + div(grad d (.) grad d)] = 0,   div u = 0,
    d_t - Lap d + u . grad d = |grad d|^2 d,

written for the deviation delta = d - d_bar from a constant unit vector.
Two routes discretize the same Duhamel formula: exponential time differencing
(:func:`step_mild`) and a Picard iteration around the heat flows of the data
(:func:`picard_solve`).

All products are formed pairwise in physical space and dealiased, so every
nonlinear term is an exact multilinear form in the retained coefficients.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .besov import BesovIndex, besov_norm, combine_blocks, integrate_time_blocks, time_block_log_norms
from .fourier_grid import (
    GridSpec,
    SpectralField,
    dealias,
    forward_transform,
    grid_l2_norm,
    gradient,
    inverse_transform,
    leray_project,
    zero_mean,
    zeros,
)
from .gevrey_ops import heat_semigroup
from .littlewood_paley import DyadicDecomposition, build_cutoffs

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class CFLViolation(SolverError):
    pass


class SolverDivergence(SolverError):
    pass


class ConstraintViolation(SolverError):
    pass


@dataclass(frozen=True)
class SolverState:
    t: float
    u: SpectralField
    delta: SpectralField
    d_bar: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d_bar, dtype=float)
        if d.shape != (3,):
            raise ValueError("d_bar must be a 3-vector")
        if abs(np.linalg.norm(d) - 1.0) > 1e-14:
            raise ValueError("d_bar must have unit length")
        object.__setattr__(self, "d_bar", d)
        if self.u.components != self.u.spec.dim:
            raise ValueError("velocity needs dim components")
        if self.delta.components != 3:
            raise ValueError("director deviation needs 3 components")
        if self.u.spec != self.delta.spec:
            raise ValueError("u and delta live on different grids")

    @property
    def spec(self) -> GridSpec:
        return self.u.spec


# ------------------------------------------------------------ products


class _Prepared:
    """A spectral field with its physical samples and gradient cached."""

    def __init__(self, f: SpectralField):
        self.f = f
        self._p = None
        self._g = None

    @property
    def P(self) -> np.ndarray:
        if self._p is None:
            self._p = inverse_transform(self.f)
        return self._p

    @property
    def G(self) -> np.ndarray:
        """Physical ``G[c, j] = d_j f_c``."""
        if self._g is None:
            f = self.f
            self._g = inverse_transform(gradient(f)).reshape((f.components, f.spec.dim) + f.spec.shape)
        return self._g


def _prep(f) -> _Prepared:
    return f if isinstance(f, _Prepared) else _Prepared(f)


def _to_field(phys: np.ndarray, spec: GridSpec) -> SpectralField:
    return dealias(forward_transform(phys, spec))


def _adv(a: _Prepared, b: _Prepared) -> np.ndarray:
    return np.einsum("j...,cj...->c...", a.P, b.G)


def _stress(a: _Prepared, b: _Prepared) -> np.ndarray:
    dim = a.f.spec.dim
    return np.einsum("ki...,kj...->ij...", a.G, b.G).reshape((dim * dim,) + a.f.spec.shape)


def _ginner(a: _Prepared, b: _Prepared) -> np.ndarray:
    return np.einsum("ki...,ki...->...", a.G, b.G)


def _div_tensor(tensor: SpectralField) -> SpectralField:
    spec = tensor.spec
    dim = spec.dim
    g = gradient(tensor).coeffs.reshape((dim, dim, dim) + spec.shape)  # [i, j, derivative]
    return SpectralField(spec, np.einsum("iji...->j...", g), tensor.real)


def advect(a: SpectralField, b: SpectralField) -> SpectralField:
    """(a . grad) b, componentwise in b."""
    return _to_field(_adv(_prep(a), _prep(b)), a.spec)


def stress_divergence(a: SpectralField, b: SpectralField) -> SpectralField:
    """div(grad a (.) grad b), the j-th entry being sum_i d_i sum_k d_i a_k d_j b_k."""
    return _div_tensor(_to_field(_stress(_prep(a), _prep(b)), a.spec))


def grad_inner(a: SpectralField, b: SpectralField) -> SpectralField:
    """Scalar sum_{k,i} d_i a_k d_i b_k."""
    return _to_field(_ginner(_prep(a), _prep(b)), a.spec)


def scalar_times(s: SpectralField, b: SpectralField) -> SpectralField:
    return _to_field(inverse_transform(s)[0] * inverse_transform(b), b.spec)


def scalar_along(s: SpectralField, direction: np.ndarray) -> SpectralField:
    d = np.asarray(direction, dtype=float).reshape((-1,) + (1,) * s.spec.dim)
    return SpectralField(s.spec, s.coeffs[0][None] * d, s.real)


# ------------------------------------------------------- nonlinear terms


def _forcing(u: SpectralField, delta: SpectralField, d_bar: np.ndarray) -> tuple[SpectralField, SpectralField]:
    spec = u.spec
    U, D = _Prepared(u), _Prepared(delta)
    fu = -leray_project(_to_field(_adv(U, U), spec) + _div_tensor(_to_field(_stress(D, D), spec)))
    g = _to_field(_ginner(D, D), spec)
    fd = -_to_field(_adv(U, D) - inverse_transform(g)[0] * D.P, spec) + scalar_along(g, d_bar)
    return zero_mean(fu), zero_mean(fd)


def nonlinear_velocity(state: SolverState) -> SpectralField:
    """-P[u . grad u + div(grad delta (.) grad delta)], divergence-free, mean zero."""
    return _forcing(state.u, state.delta, state.d_bar)[0]


def nonlinear_director(state: SolverState) -> SpectralField:
    """-u . grad delta + |grad delta|^2 delta + |grad delta|^2 d_bar, mean zero."""
    return _forcing(state.u, state.delta, state.d_bar)[1]


# --------------------------------------------------------- time stepping


def _series(z: np.ndarray, coeff) -> np.ndarray:
    out = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(12):
        out += coeff(k) * term
        term = term * (-z)
    return out


def phi1(z: np.ndarray) -> np.ndarray:
    """(1 - e^{-z}) / z."""
    z = np.asarray(z, dtype=float)
    small = z < 0.1
    safe = np.where(small, 1.0, z)
    return np.where(small, _series(z, lambda k: 1.0 / math.factorial(k + 1)), -np.expm1(-safe) / safe)


def psi_left(z: np.ndarray) -> np.ndarray:
    """(1 - e^{-z} - z e^{-z}) / z^2: weight of the left node in the exponential trapezoid."""
    z = np.asarray(z, dtype=float)
    small = z < 0.1
    safe = np.where(small, 1.0, z)
    big = (-np.expm1(-safe) - safe * np.exp(-safe)) / safe**2
    return np.where(small, _series(z, lambda k: (k + 1) / math.factorial(k + 2)), big)


def psi_right(z: np.ndarray) -> np.ndarray:
    """(z - 1 + e^{-z}) / z^2: weight of the right node."""
    z = np.asarray(z, dtype=float)
    small = z < 0.1
    safe = np.where(small, 1.0, z)
    big = (safe + np.expm1(-safe)) / safe**2
    return np.where(small, _series(z, lambda k: 1.0 / math.factorial(k + 2)), big)


def _kappa(spec: GridSpec) -> np.ndarray:
    return (spec.wavevectors() ** 2).sum(axis=0)


def _etd(f: SpectralField, forcing: SpectralField, kappa: np.ndarray, h: float) -> SpectralField:
    z = kappa * h
    return f.with_coeffs(np.exp(-z) * f.coeffs + h * phi1(z) * forcing.coeffs)


SCHEMES = ("etd1", "etd_midpoint")


def _check_finite(state: SolverState) -> None:
    for name, f in (("u", state.u), ("delta", state.delta)):
        if not np.all(np.isfinite(f.coeffs)):
            raise SolverDivergence(f"non-finite {name} at t={state.t:.6g}")


def step_mild(
    state: SolverState,
    dt: float,
    scheme: str = "etd_midpoint",
    cfl: float = 0.5,
    nonlinear: bool = True,
) -> SolverState:
    """Advance by ``dt`` with the heat part integrated exactly.

    ``etd1`` is exponential Euler; ``etd_midpoint`` evaluates the
    nonlinearity at an exponential-Euler half step (second order).  The
    velocity is re-projected and both means re-zeroed after the step.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    spec = state.spec
    umax = float(np.sqrt((inverse_transform(state.u) ** 2).sum(axis=0)).max())
    if dt * umax / spec.spacing > cfl:
        raise CFLViolation(f"dt={dt:g} with max|u|={umax:.3g} exceeds CFL {cfl}")
    kappa = _kappa(spec)

    def forcing(u, delta):
        if not nonlinear:
            return zeros(spec, u.components), zeros(spec, 3)
        return _forcing(u, delta, state.d_bar)

    fu, fd = forcing(state.u, state.delta)
    if scheme == "etd1":
        u1 = _etd(state.u, fu, kappa, dt)
        d1 = _etd(state.delta, fd, kappa, dt)
    else:
        uh = _etd(state.u, fu, kappa, dt / 2)
        dh = _etd(state.delta, fd, kappa, dt / 2)
        fu, fd = forcing(uh, dh)
        u1 = _etd(state.u, fu, kappa, dt)
        d1 = _etd(state.delta, fd, kappa, dt)
    new = replace(state, t=state.t + dt, u=zero_mean(leray_project(u1)), delta=zero_mean(d1))
    _check_finite(new)
    return new


def march(
    state: SolverState,
    t_end: float,
    dt: float,
    scheme: str = "etd_midpoint",
    sample_every: int = 1,
    nonlinear: bool = True,
    renormalize: bool = False,
    cfl: float = 0.5,
) -> list[SolverState]:
    """Uniform steps to ``t_end``; returns the initial state and every
    ``sample_every``-th state (the final state is always included)."""
    steps = int(round((t_end - state.t) / dt))
    if steps < 1 or abs(state.t + steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("t_end - t must be a positive multiple of dt")
    out = [state]
    t0 = state.t
    for i in range(1, steps + 1):
        state = step_mild(state, dt, scheme, cfl=cfl, nonlinear=nonlinear)
        state = replace(state, t=t0 + i * dt)
        if renormalize:
            state, _ = renormalize_director(state)
        if i % sample_every == 0 or i == steps:
            out.append(state)
    return out


# ------------------------------------------------------- Picard iteration


def linear_flows(u0: SpectralField, delta0: SpectralField, t_grid: Sequence[float]):
    """Heat flows e^{t Lap} u0 and e^{t Lap} delta0 sampled on ``t_grid``."""
    uL = [heat_semigroup(u0, t) if t > 0 else u0 for t in t_grid]
    dL = [heat_semigroup(delta0, t) if t > 0 else delta0 for t in t_grid]
    return uL, dL


@dataclass(frozen=True)
class Remainders:
    r1: SpectralField
    r2: SpectralField
    r3: SpectralField
    r4: SpectralField
    r5: SpectralField


def _remainders(L: _Prepared, dL: _Prepared, B: _Prepared, dB: _Prepared, d_bar) -> tuple[Remainders, SpectralField]:
    spec = L.f.spec
    r1 = _to_field(_adv(L, L) + _adv(L, B) + _adv(B, L), spec)
    r2 = _div_tensor(_to_field(_stress(dL, dL) + _stress(dL, dB) + _stress(dB, dL), spec))
    r3 = _to_field(_adv(L, dL) + _adv(L, dB) + _adv(B, dL), spec)
    gLL = _to_field(_ginner(dL, dL), spec)
    gLb = _to_field(_ginner(dL, dB), spec)
    gbb = _to_field(_ginner(dB, dB), spec)
    mixed = gLL + 2.0 * gLb
    r4 = scalar_along(mixed, d_bar)
    pm, pbb = inverse_transform(mixed)[0], inverse_transform(gbb)[0]
    r5 = _to_field(pm * (dL.P + dB.P) + pbb * dL.P, spec)
    return Remainders(r1, r2, r3, r4, r5), gbb


def remainder_terms(
    u_L: SpectralField, delta_L: SpectralField, u_bar: SpectralField, delta_bar: SpectralField, d_bar
) -> Remainders:
    """Coupling terms between the heat flows and the corrections.

    The cross stress is symmetrized, div(gdL (.) gdb + gdb (.) gdL), and the
    mixed gradient term is the inner product 2 gdL . gdb; with these the
    corrections' forcing equals the full nonlinearity minus the
    nonlinearity of the corrections alone.
    """
    return _remainders(_prep(u_L), _prep(delta_L), _prep(u_bar), _prep(delta_bar), d_bar)[0]


def correction_forcing(u_L, delta_L, u_bar, delta_bar, d_bar) -> tuple[SpectralField, SpectralField]:
    """Right-hand sides of the correction equations, built from R1..R5."""
    L, dL, B, dB = _prep(u_L), _prep(delta_L), _prep(u_bar), _prep(delta_bar)
    spec = L.f.spec
    R, gbb = _remainders(L, dL, B, dB, d_bar)
    fu = -leray_project(_to_field(_adv(B, B), spec) + _div_tensor(_to_field(_stress(dB, dB), spec)) + R.r1 + R.r2)
    own = _to_field(inverse_transform(gbb)[0] * dB.P - _adv(B, dB), spec) + scalar_along(gbb, d_bar)
    fd = own - R.r3 + R.r4 + R.r5
    return zero_mean(fu), zero_mean(fd)


def duhamel_integral(forcing: Sequence[SpectralField], t_grid: Sequence[float]) -> list[SpectralField]:
    """int_0^t e^{(t-s) Lap} F(s) ds on the nodes of a uniform grid.

    F is interpolated linearly between nodes and the heat factor is applied
    exactly (exponential trapezoid).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    h = np.diff(t_grid)
    if h.size and not np.allclose(h, h[0], rtol=1e-12, atol=0):
        raise ValueError("duhamel_integral needs a uniform time grid")
    spec = forcing[0].spec
    acc = forcing[0].with_coeffs(np.zeros_like(forcing[0].coeffs))
    out = [acc]
    if not h.size:
        return out
    z = _kappa(spec) * h[0]
    decay, wl, wr = np.exp(-z), h[0] * psi_left(z), h[0] * psi_right(z)
    for i in range(len(t_grid) - 1):
        acc = acc.with_coeffs(decay * acc.coeffs + wl * forcing[i].coeffs + wr * forcing[i + 1].coeffs)
        out.append(acc)
    return out


@dataclass(frozen=True)
class PicardConfig:
    horizon: float = 0.25
    steps: int = 50
    max_iters: int = 30
    contraction_tol: float = 1e-10
    epsilon: float = 0.1
    zeta: float = 0.01
    p: float = 2.0
    q: float = 2.0
    c0: float = 1.0
    c1: float = 1.0
    divergence_ratio: float = 1.0

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.steps < 1 or self.max_iters < 2:
            raise ValueError("need steps >= 1 and max_iters >= 2")
        if not (self.contraction_tol > 0 and self.epsilon > 0 and self.zeta > 0):
            raise ValueError("tolerances must be positive")

    @property
    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.steps + 1)


def admissibility_gap(p: float, q: float) -> float:
    return 1.0 / q - 1.0 / p


def contraction_weights(p: float, q: float, m0: float, c0: float = 1.0, c1: float = 1.0) -> tuple[float, float]:
    """Weights (A, B) of the L~inf and L~1 parts of the iteration norm.

    Both are 1 strictly inside the admissible range and 2 c0 c1 m0 on the
    corresponding endpoint.
    """
    gap = admissibility_gap(p, q)
    lower = -min(1.0 / 3.0, 1.0 / (2.0 * p))
    if not (lower - 1e-15 <= gap <= 1.0 / 3.0 + 1e-15):
        raise ValueError(f"(p, q) = ({p}, {q}) outside the admissible range")
    endpoint = 2.0 * c0 * c1 * m0
    a = endpoint if abs(gap - 1.0 / 3.0) <= 1e-15 else 1.0
    b = endpoint if abs(gap - lower) <= 1e-15 else 1.0
    return a, b


@dataclass
class IterationTrace:
    horizon: float
    weights: tuple[float, float]
    norms: list[float] = field(default_factory=list)
    diffs: list[float] = field(default_factory=list)
    converged: bool = False
    contracting: bool = True

    def record(self, norm: float, diff: float) -> None:
        self.norms.append(norm)
        self.diffs.append(diff)

    @property
    def ratios(self) -> list[float]:
        """diffs[k] / diffs[k-1]; 0 when both vanish."""
        out = []
        for a, b in zip(self.diffs[1:], self.diffs[:-1]):
            if b == 0:
                out.append(0.0 if a == 0 else math.inf)
            else:
                out.append(a / b)
        return out


class NonContraction(SolverError):
    def __init__(self, message: str, trace: IterationTrace):
        super().__init__(message)
        self.trace = trace


def iteration_norm(
    us: Sequence[SpectralField],
    ds: Sequence[SpectralField],
    t_grid: np.ndarray,
    p: float,
    q: float,
    weights: tuple[float, float],
    dec: DyadicDecomposition,
) -> float:
    """A (|u|_{L~inf eB^{d/p-1}} + |d|_{L~inf eB^{d/q}}) + B (|u|_{L~1 eB^{d/p+1}} + |d|_{L~1 eB^{d/q+2}})."""
    dim = us[0].spec.dim
    lu = time_block_log_norms(us, t_grid, p, dec, gevrey=True)
    ld = time_block_log_norms(ds, t_grid, q, dec, gevrey=True)
    a, b = weights

    def cl(logs, rho, s):
        return math.exp(combine_blocks(integrate_time_blocks(logs, t_grid, rho), s, 1, dec))

    sup = cl(lu, math.inf, dim / p - 1) + cl(ld, math.inf, dim / q)
    if len(t_grid) < 2:
        return a * sup
    return a * sup + b * (cl(lu, 1, dim / p + 1) + cl(ld, 1, dim / q + 2))


@dataclass
class PicardResult:
    t_grid: np.ndarray
    states: list[SolverState]
    u_bar: list[SpectralField]
    delta_bar: list[SpectralField]
    trace: IterationTrace


def data_size(u0: SpectralField, delta0: SpectralField, p: float, q: float, dec: DyadicDecomposition) -> float:
    """M0 = |u0|_{B^{d/p-1}_{p,1}} + |delta0|_{B^{d/q}_{q,1}}."""
    dim = u0.spec.dim
    return besov_norm(u0, BesovIndex(dim / p - 1, p, 1), dec) + besov_norm(delta0, BesovIndex(dim / q, q, 1), dec)


def picard_solve(
    u0: SpectralField,
    delta0: SpectralField,
    d_bar,
    cfg: PicardConfig,
    dec: DyadicDecomposition | None = None,
) -> PicardResult:
    """Iterate the correction map from (0, 0) on a uniform grid over [0, T].

    Stops when the weighted successive difference falls below
    ``contraction_tol`` times the iterate norm.  Raises
    :class:`NonContraction` (carrying the trace) when a ratio of successive
    differences reaches ``divergence_ratio``, a value becomes non-finite, or
    ``max_iters`` is exhausted.
    """
    spec = u0.spec
    dec = dec or build_cutoffs(spec)
    t_grid = cfg.t_grid
    d_bar = np.asarray(d_bar, dtype=float)
    m0 = data_size(u0, delta0, cfg.p, cfg.q, dec)
    weights = contraction_weights(cfg.p, cfg.q, m0, cfg.c0, cfg.c1)
    trace = IterationTrace(cfg.horizon, weights)
    uL, dL = linear_flows(u0, delta0, t_grid)
    ub = [zeros(spec, spec.dim) for _ in t_grid]
    db = [zeros(spec, 3) for _ in t_grid]
    for it in range(1, cfg.max_iters + 1):
        forcing = [correction_forcing(uL[i], dL[i], ub[i], db[i], d_bar) for i in range(len(t_grid))]
        new_u = [zero_mean(leray_project(f)) for f in duhamel_integral([f[0] for f in forcing], t_grid)]
        new_d = [zero_mean(f) for f in duhamel_integral([f[1] for f in forcing], t_grid)]
        with np.errstate(all="ignore"):
            diff = iteration_norm(
                [a - b for a, b in zip(new_u, ub)], [a - b for a, b in zip(new_d, db)], t_grid, cfg.p, cfg.q, weights, dec
            )
            norm = iteration_norm(new_u, new_d, t_grid, cfg.p, cfg.q, weights, dec)
        trace.record(norm, diff)
        ub, db = new_u, new_d
        log.debug("picard iterate %d: norm %.3e diff %.3e", it, norm, diff)
        if not (math.isfinite(diff) and math.isfinite(norm)):
            trace.contracting = False
            raise NonContraction(f"iterate {it} is not finite", trace)
        if it >= 3 and trace.ratios[-1] >= cfg.divergence_ratio:
            trace.contracting = False
            raise NonContraction(f"difference ratio {trace.ratios[-1]:.3g} at iterate {it}", trace)
        if diff <= cfg.contraction_tol * norm or diff == 0.0:
            trace.converged = True
            break
    if not trace.converged:
        trace.contracting = False
        raise NonContraction(f"no convergence in {cfg.max_iters} iterates", trace)
    states = [
        SolverState(float(t), zero_mean(leray_project(uL[i] + ub[i])), zero_mean(dL[i] + db[i]), d_bar)
        for i, t in enumerate(t_grid)
    ]
    return PicardResult(t_grid, states, ub, db, trace)


def picard_with_retry(u0, delta0, d_bar, cfg: PicardConfig, max_halvings: int = 3, dec=None):
    """Run :func:`picard_solve`, halving the horizon after each non-contraction.

    Returns ``(result, failed_traces)``; re-raises the last failure when the
    halvings are exhausted.
    """
    failures = []
    for _ in range(max_halvings + 1):
        try:
            return picard_solve(u0, delta0, d_bar, cfg, dec), failures
        except NonContraction as exc:
            failures.append(exc.trace)
            last = exc
            cfg = replace(cfg, horizon=cfg.horizon / 2)
    raise last


def solution_distance(
    a: Sequence[SolverState], b: Sequence[SolverState], p: float, q: float, dec: DyadicDecomposition, weights=(1.0, 1.0)
) -> float:
    """Iteration norm of the difference of two aligned state series."""
    if len(a) != len(b):
        raise ValueError("state series have different lengths")
    t_grid = np.array([s.t for s in a])
    if not np.allclose(t_grid, [s.t for s in b], atol=1e-12):
        raise ValueError("state series are sampled at different times")
    with np.errstate(all="ignore"):
        return iteration_norm([x.u - y.u for x, y in zip(a, b)], [x.delta - y.delta for x, y in zip(a, b)], t_grid, p, q, weights, dec)


# ---------------------------------------------------------------- monitors


@dataclass(frozen=True)
class BlowupReport:
    times: np.ndarray
    cumulative: np.ndarray
    instantaneous: np.ndarray
    trend: str

    @property
    def final(self) -> float:
        return float(self.cumulative[-1]) if self.cumulative.size else 0.0


def blowup_monitor(
    states: Sequence[SolverState],
    p: float = 2.0,
    q: float = 2.0,
    theta: float = 1.0,
    dec: DyadicDecomposition | None = None,
    growth_tol: float = 0.05,
) -> BlowupReport:
    """Continuation quantity on every prefix of the run.

    The quantity sums Gevrey-weighted Chemin-Lerner norms of u in
    L~1 B^{d/p+1}, L~{1+th} B^{d/p+(1-th)/(1+th)}, L~{(1+th)/th} B^{d/p+(th-1)/(1+th)}
    and of delta in L~1 B^{d/q+2}, L~{1+th} B^{d/q+2/(1+th)}, L~{(1+th)/th} B^{d/q+2th/(1+th)}.

    ``trend`` compares the instantaneous Gevrey norm at the end of the run
    with its value at the midpoint: ``increasing`` if it grew by more than
    ``growth_tol``, ``decreasing`` if it shrank by more, else ``flat``.
    """
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    spec = states[0].spec
    dec = dec or build_cutoffs(spec)
    dim = spec.dim
    t = np.array([s.t for s in states])
    lu = time_block_log_norms([s.u for s in states], t, p, dec, gevrey=True)
    ld = time_block_log_norms([s.delta for s in states], t, q, dec, gevrey=True)
    r1, r2 = 1 + theta, (1 + theta) / theta
    u_terms = [(1.0, dim / p + 1), (r1, dim / p + (1 - theta) / (1 + theta)), (r2, dim / p + (theta - 1) / (1 + theta))]
    d_terms = [(1.0, dim / q + 2), (r1, dim / q + 2 / (1 + theta)), (r2, dim / q + 2 * theta / (1 + theta))]
    cumulative = np.zeros(t.size)
    for k in range(1, t.size):
        total = 0.0
        for logs, terms in ((lu, u_terms), (ld, d_terms)):
            for rho, s in terms:
                total += math.exp(combine_blocks(integrate_time_blocks(logs[: k + 1], t[: k + 1], rho), s, 1, dec))
        cumulative[k] = total
    inst = np.array(
        [
            math.exp(combine_blocks(lu[k], dim / p - 1, 1, dec)) + math.exp(combine_blocks(ld[k], dim / q, 1, dec))
            for k in range(t.size)
        ]
    )
    mid, end = inst[t.size // 2], inst[-1]
    if end > (1 + growth_tol) * mid and end > 0:
        trend = "increasing"
    elif end < mid / (1 + growth_tol):
        trend = "decreasing"
    else:
        trend = "flat"
    return BlowupReport(t, cumulative, inst, trend)


def renormalize_director(state: SolverState, min_length: float = 0.5) -> tuple[SolverState, float]:
    """Project d = d_bar + delta back onto the unit sphere pointwise.

    Returns the new state and the drift max| |d| - 1 | measured before the
    projection.  The mean of the new delta is kept, so |d_bar + delta| = 1
    holds on the grid; the next solver step removes the mean again.
    """
    spec = state.spec
    d = inverse_transform(state.delta) + state.d_bar.reshape((3,) + (1,) * spec.dim)
    length = np.sqrt((d**2).sum(axis=0))
    if length.min() < min_length:
        raise ConstraintViolation(f"|d| fell to {length.min():.3g}")
    drift = float(np.abs(length - 1.0).max())
    log.debug("director drift before renormalization: %.3e", drift)
    if drift == 0.0:
        return state, drift
    unit = d / length
    delta = forward_transform(unit - state.d_bar.reshape((3,) + (1,) * spec.dim), spec)
    return replace(state, delta=delta), drift


def director_length_error(state: SolverState) -> float:
    d = inverse_transform(state.delta) + state.d_bar.reshape((3,) + (1,) * state.spec.dim)
    return float(np.abs(np.sqrt((d**2).sum(axis=0)) - 1.0).max())


def energy(state: SolverState) -> float:
    """|u|_{L^2}^2 + |grad d|_{L^2}^2."""
    return grid_l2_norm(state.u) ** 2 + grid_l2_norm(gradient(state.delta)) ** 2


def divergence_max(state: SolverState) -> float:
    from .fourier_grid import divergence

    return float(np.abs(inverse_transform(divergence(state.u))).max())


# ------------------------------------------------------------ initial data


def _orthonormal_complement(d_bar: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    trial = np.eye(3)[int(np.argmin(np.abs(d_bar)))]
    e1 = trial - trial.dot(d_bar) * d_bar
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(d_bar, e1)


def _shaped_noise(spec: GridSpec, rng: np.random.Generator, components: int, exponent: float) -> SpectralField:
    f = forward_transform(rng.standard_normal((components,) + spec.shape), spec)
    k = np.sqrt((spec.mode_indices() ** 2).sum(axis=0))
    shape = np.where(k > 0, np.where(k > 0, k, 1.0) ** (-exponent), 0.0)
    return zero_mean(dealias(f.with_coeffs(f.coeffs * shape)))


def generate_initial_data(
    spec: GridSpec,
    seed: int,
    m0: float = 0.05,
    d_bar=(0.0, 0.0, 1.0),
    p: float = 2.0,
    q: float = 2.0,
    velocity_share: float = 0.5,
    velocity_exponent: float = 2.0,
    director_exponent: float = 3.0,
    dec: DyadicDecomposition | None = None,
) -> tuple[SpectralField, SpectralField, np.ndarray]:
    """Seeded random data with power-law shell amplitudes |k|^{-exponent}.

    u0 is divergence-free with |u0|_{B^{d/p-1}_{p,1}} = velocity_share * m0;
    delta0 points into the plane orthogonal to d_bar and carries the rest of
    m0 in B^{d/q}_{q,1}.
    """
    if spec.dim != 3:
        raise ValueError("initial data are generated for dim = 3")
    dec = dec or build_cutoffs(spec)
    d_bar = np.asarray(d_bar, dtype=float)
    d_bar = d_bar / np.linalg.norm(d_bar)
    rng = np.random.default_rng(seed)
    u0 = zero_mean(leray_project(_shaped_noise(spec, rng, 3, velocity_exponent)))
    psi = _shaped_noise(spec, rng, 2, director_exponent)
    e1, e2 = _orthonormal_complement(d_bar)
    delta0 = scalar_along(psi.component(0), e1) + scalar_along(psi.component(1), e2)
    if m0 == 0:
        return u0 * 0.0, delta0 * 0.0, d_bar
    nu = besov_norm(u0, BesovIndex(3 / p - 1, p, 1), dec)
    nd = besov_norm(delta0, BesovIndex(3 / q, q, 1), dec)
    return u0 * (velocity_share * m0 / nu), delta0 * ((1 - velocity_share) * m0 / nd), d_bar


def initial_state(u0: SpectralField, delta0: SpectralField, d_bar) -> SolverState:
    return SolverState(0.0, u0, delta0, np.asarray(d_bar, dtype=float))
