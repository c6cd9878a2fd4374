"""Uniform periodic grid on [0, 2pi) with differentiation and quadrature operators."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AngleGrid:
    """Uniform turning-angle grid theta_i = 2*pi*i/n; the right endpoint is excluded."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)):
            raise ValueError(f"grid size must be an integer, got {self.n!r}")
        if self.n < 16 or self.n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 16, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.n

    @cached_property
    def theta(self) -> np.ndarray:
        nodes = TWO_PI * np.arange(self.n) / self.n
        nodes.flags.writeable = False
        return nodes


def _as_grid_values(values, grid: AngleGrid) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} grid samples, got shape {v.shape}")
    return v


def _padded(v: np.ndarray) -> np.ndarray:
    # Two ghost nodes per side; one allocation instead of four np.roll copies.
    return np.concatenate((v[-2:], v, v[:2]))


def d_theta(values, grid: AngleGrid) -> np.ndarray:
    """Fourth-order centered periodic first derivative."""
    v = _as_grid_values(values, grid)
    w = _padded(v)
    return (8.0 * (w[3:-1] - w[1:-3]) - (w[4:] - w[:-4])) / (12.0 * grid.dtheta)


def d2_theta(values, grid: AngleGrid) -> np.ndarray:
    """Fourth-order centered periodic second derivative."""
    v = _as_grid_values(values, grid)
    w = _padded(v)
    return (-(w[4:] + w[:-4]) + 16.0 * (w[3:-1] + w[1:-3]) - 30.0 * v) / (12.0 * grid.dtheta**2)


def integrate(values, grid: AngleGrid) -> float:
    """Periodic trapezoid rule; spectrally accurate for smooth periodic integrands."""
    v = _as_grid_values(values, grid)
    return float(v.sum() * grid.dtheta)


def periodic_antiderivative(values, grid: AngleGrid) -> np.ndarray:
    """Cumulative integral from theta = 0 of the trigonometric interpolant.

    Returns samples of V(theta_i) = int_0^theta_i v(phi) dphi.  The zero mode
    contributes the secular term mean(v) * theta, so the result is meaningful
    for integrands with nonzero mean; all oscillatory modes are integrated
    exactly, which keeps closed-curve reconstructions at rounding accuracy.
    """
    v = _as_grid_values(values, grid)
    spectrum = np.fft.rfft(v)
    wavenumbers = np.arange(spectrum.size)
    anti = np.zeros_like(spectrum)
    anti[1:] = spectrum[1:] / (1j * wavenumbers[1:])
    # The Nyquist sine component vanishes at the nodes; drop it.
    anti[-1] = 0.0
    oscillatory = np.fft.irfft(anti, grid.n)
    mean = spectrum[0].real / grid.n
    return (oscillatory - oscillatory[0]) + mean * grid.theta
