"""Standalone Navier-Stokes integrator used as a reference for the
director-free reduction.  It shares no nonlinear code with the solver:
the advection is written in rotational form u x curl u and time is
advanced with classical RK4 on the full (stiff) spectral system."""
from __future__ import annotations

import numpy as np

from ..fourier_grid import GridSpec, SpectralField, forward_transform, inverse_transform


def navier_stokes_rk4(u0: SpectralField, t_end: float, dt: float) -> SpectralField:
    spec: GridSpec = u0.spec
    xi = spec.derivative_wavevectors()
    k2 = (spec.wavevectors() ** 2).sum(axis=0)
    kd2 = (xi**2).sum(axis=0)
    kd2 = np.where(kd2 == 0, 1.0, kd2)
    keep = spec.dealias_mask()

    def rhs(c):
        u = inverse_transform(SpectralField(spec, c))
        w = inverse_transform(SpectralField(spec, 1j * np.cross(xi, c, axis=0)))
        nl = forward_transform(np.cross(u, w, axis=0), spec).coeffs * keep
        nl = nl - xi * (xi * nl).sum(axis=0) / kd2
        return nl - k2 * c

    steps = int(round(t_end / dt))
    c = u0.coeffs.copy()
    for _ in range(steps):
        a = rhs(c)
        b = rhs(c + 0.5 * dt * a)
        d = rhs(c + 0.5 * dt * b)
        e = rhs(c + dt * d)
        c = c + dt / 6 * (a + 2 * b + 2 * d + e)
        c[(slice(None),) + (0,) * spec.dim] = 0.0
    return SpectralField(spec, c)


def taylor_green(spec: GridSpec, amplitude: float) -> SpectralField:
    x, y, z = spec.coordinates()
    u = amplitude * np.stack([np.sin(x) * np.cos(y) * np.cos(z), -np.cos(x) * np.sin(y) * np.cos(z), 0 * x])
    return forward_transform(u, spec)
