"""
Reference solutions used by the tests only.

free_line_solution: the Dirac system on the whole line, exact transport for m = 0
and an independent fine-grid leap-frog for m > 0.
bessel_series_reference: I0 power series summed in exact rational arithmetic with
a rigorous bound on the neglected tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np


def gaussian(x: np.ndarray, x0: float, sigma: float) -> np.ndarray:
    return (2.0 * np.pi * sigma * sigma) ** -0.25 * np.exp(-((x - x0) ** 2) / (4.0 * sigma * sigma))


@dataclass(frozen=True)
class OracleRun:
    description: str
    refine: int
    t: float
    x: np.ndarray
    phi: np.ndarray
    chi: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.phi) ** 2 + np.abs(self.chi) ** 2


# =========================
# Free line
# =========================

def _fine_leapfrog(
    mass: float, x0: float, sigma: float, t: float, dx: float, dt: float, half_width: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Integrate on [x0 - half_width, x0 + half_width] with zero walls and return
    (x_nodes, phi at t, x_half, chi at t), each component interpolated linearly in
    time between its two bracketing levels.
    """
    cells = int(math.ceil(2.0 * half_width / dx))
    xs = x0 - half_width + dx * np.arange(cells + 1)
    xh = xs[:-1] + 0.5 * dx
    lam, mu = dt / dx, 0.5 * mass * dt

    phi = gaussian(xs, x0, sigma).astype(complex)
    chi = gaussian(xh, x0, sigma).astype(complex)
    phi[0] = phi[-1] = 0.0
    # phi at -dt/2
    phi[1:-1] += 0.5 * lam * (chi[1:] - chi[:-1]) + 1j * mu * phi[1:-1]

    # phi levels sit at (k - 1/2) dt, chi levels at k dt
    n_chi = int(math.floor(t / dt + 1e-12))
    n_phi = int(math.floor(t / dt + 0.5 + 1e-12))
    n_total = max(n_chi, n_phi) + 1

    phi_prev = chi_prev = None
    phi_at = chi_at = None
    for k in range(n_total + 1):
        if k == n_phi:
            phi_prev = phi.copy()
        if k == n_phi + 1:
            w = (t - (n_phi - 0.5) * dt) / dt
            phi_at = (1.0 - w) * phi_prev + w * phi
        if k == n_chi:
            chi_prev = chi.copy()
        if k == n_chi + 1:
            w = (t - n_chi * dt) / dt
            chi_at = (1.0 - w) * chi_prev + w * chi
        if phi_at is not None and chi_at is not None:
            break
        new_phi = phi.copy()
        new_phi[1:-1] = ((1.0 - 1j * mu) * phi[1:-1] - lam * (chi[1:] - chi[:-1])) / (1.0 + 1j * mu)
        new_phi[0] = new_phi[-1] = 0.0
        chi = ((1.0 + 1j * mu) * chi - lam * (new_phi[1:] - new_phi[:-1])) / (1.0 - 1j * mu)
        phi = new_phi

    assert phi_at is not None and chi_at is not None
    return xs, phi_at, xh, chi_at


def free_line_solution(
    x: np.ndarray,
    t: float,
    *,
    mass: float,
    x0: float,
    sigma: float,
    dx: float = 0.0125,
    dt: float = 0.01,
    refine: int = 4,
) -> OracleRun:
    """
    Whole-line solution for the spinor G(x - x0) (1, 1)^T at time t, sampled at x.
    dx, dt are the grid of the run being validated; the fine grid is refine times finer.
    """
    x = np.asarray(x, dtype=float)
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if mass == 0:
        g = gaussian(x - t, x0, sigma).astype(complex)
        return OracleRun("exact transport, m=0", 1, t, x, g, g.copy())

    if refine < 2:
        raise ValueError(f"oracle grid must be at least 2x finer, got refine={refine}")
    half_width = max(abs(float(x.min()) - x0), abs(float(x.max()) - x0)) + t + 12.0 * sigma
    xs, phi, xh, chi = _fine_leapfrog(mass, x0, sigma, t, dx / refine, dt / refine, half_width)

    edge = max(abs(phi[1]), abs(phi[-2]), abs(chi[0]), abs(chi[-1]))
    if edge > 1e-12:
        raise RuntimeError(f"solution support reached the oracle boundary (|value| = {edge:.3g})")

    phi_x = np.interp(x, xs, phi.real) + 1j * np.interp(x, xs, phi.imag)
    chi_x = np.interp(x, xh, chi.real) + 1j * np.interp(x, xh, chi.imag)
    return OracleRun(f"fine leap-frog, m={mass}", refine, t, x, phi_x, chi_x)


# =========================
# Bessel series
# =========================

def bessel_series_reference(z: float, terms: int | None = None, max_terms: int = 2000) -> Tuple[float, float]:
    """
    sum_k (z^2/4)^k / (k!)^2 with exact rationals. Returns (value, tail_bound) where
    tail_bound bounds the neglected terms. With terms=None the sum runs until the
    bound drops below 1e-40 relative.
    """
    if not z >= 0:
        raise ValueError(f"z must be non-negative, got {z!r}")
    q = Fraction(z) ** 2 / 4
    term = Fraction(1)
    total = Fraction(0)
    k = 0
    while True:
        if terms is not None and k == terms:
            break
        total += term
        k += 1
        term = term * q / (k * k)
        ratio = q / ((k + 1) * (k + 1))
        if terms is None and ratio < 1 and term / (1 - ratio) <= total * Fraction(1, 10**40):
            break
        if k >= max_terms:
            raise RuntimeError(f"series did not converge within {max_terms} terms at z={z}")

    # term is now the first neglected term; later ratios only shrink
    ratio = q / ((k + 1) * (k + 1))
    if ratio >= 1:
        raise RuntimeError(f"{k} terms are too few for a tail bound at z={z}")
    bound = term / (1 - ratio)
    return float(total), float(bound)
