from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from diracgraph.bessel import bessel_i0
from diracgraph.errors import BoundaryError
from diracgraph.graph import weights_residual

logger = logging.getLogger(__name__)


class VertexMode(enum.Enum):
    KIRCHHOFF = "kirchhoff"
    WEIGHTED = "weighted"
    TRANSPARENT = "transparent"


class EndMode(enum.Enum):
    DIRICHLET = "dirichlet"
    TRANSPARENT = "transparent"


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> float:
        return 1.0 if self is Side.RIGHT else -1.0


class KernelKind(enum.Enum):
    I0 = "i0"
    J0 = "j0"


# =========================
# Convolution kernel
# =========================

@dataclass(frozen=True)
class BesselKernel:
    """
    Samples of K(k dt) and K'(k dt) for the time-domain DtN map, k = 0..n.
    K = I0(m t) by default; KernelKind.J0 gives J0(m t).
    """

    mass: float
    dt: float
    samples: np.ndarray
    derivative: np.ndarray
    kind: KernelKind = KernelKind.I0

    @classmethod
    def build(cls, mass: float, dt: float, n_steps: int, kind: KernelKind = KernelKind.I0) -> "BesselKernel":
        if mass < 0:
            raise ValueError(f"mass must be non-negative, got {mass}")
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        z = mass * dt * np.arange(n_steps + 1, dtype=float)
        if kind is KernelKind.I0:
            samples = np.array([bessel_i0(v) for v in z])
            derivative = mass * special.i1(z)
        else:
            samples = special.j0(z)
            derivative = -mass * special.j1(z)
        samples.setflags(write=False)
        derivative.setflags(write=False)
        return cls(float(mass), float(dt), samples, derivative, kind)

    def __len__(self) -> int:
        return len(self.samples)

    def extended(self, n_steps: int) -> "BesselKernel":
        if n_steps + 1 <= len(self):
            return self
        return BesselKernel.build(self.mass, self.dt, max(n_steps, 2 * len(self)), self.kind)

    @property
    def weights(self) -> np.ndarray:
        """G(k dt) = K'(k dt) + i m K(k dt)."""
        return self.derivative + 1j * self.mass * self.samples

    @property
    def endpoint_factor(self) -> complex:
        # coefficient of the newest sample phi_k in chi_k, k >= 1
        return 1.0 + 0.5 * self.dt * complex(self.weights[0])


def vertex_factor(alphas: Sequence[float]) -> float:
    """A = alpha_1^2 * sum_{j>=2} alpha_j^-2; A == 1 exactly when the sum rule holds."""
    a = np.asarray(alphas, dtype=float)
    if a.size < 2 or np.any(a <= 0):
        raise BoundaryError(f"need at least two positive weights, got {list(alphas)}")
    return float(a[0] ** 2 * np.sum(a[1:] ** -2))


# =========================
# Histories
# =========================

class BoundaryHistory:
    """Dense record of boundary phi (and the resulting chi) values, one per time level."""

    def __init__(self, capacity: int = 64) -> None:
        self._phi = np.zeros(max(capacity, 1), dtype=complex)
        self._chi = np.zeros(max(capacity, 1), dtype=complex)
        self._size = 0

    def __len__(self) -> int:
        return self._size

    @property
    def phi(self) -> np.ndarray:
        return self._phi[: self._size]

    @property
    def chi(self) -> np.ndarray:
        return self._chi[: self._size]

    def append(self, phi: complex, chi: complex) -> None:
        if self._size == len(self._phi):
            grow = len(self._phi)
            self._phi = np.concatenate([self._phi, np.zeros(grow, dtype=complex)])
            self._chi = np.concatenate([self._chi, np.zeros(grow, dtype=complex)])
        self._phi[self._size] = phi
        self._chi[self._size] = chi
        self._size += 1

    @classmethod
    def from_arrays(cls, phi: np.ndarray, chi: np.ndarray) -> "BoundaryHistory":
        if len(phi) != len(chi):
            raise BoundaryError("history phi/chi length mismatch")
        h = cls(capacity=len(phi) + 64)
        for p, c in zip(phi, chi):
            h.append(complex(p), complex(c))
        return h


def convolution_tail(kernel: BesselKernel, phi: np.ndarray, k: int) -> complex:
    """
    dt * [ G_k phi_0 / 2 + sum_{l=1}^{k-1} G_{k-l} phi_l ], the part of the
    trapezoid sum that does not involve phi_k. Needs phi_0..phi_{k-1}.
    """
    if k <= 0:
        return 0j
    if len(phi) < k:
        raise BoundaryError(f"missing history: need {k} samples, have {len(phi)}")
    if len(kernel) < k + 1:
        raise BoundaryError(f"kernel holds {len(kernel)} samples, level {k} requested")
    g = kernel.weights
    acc = 0.5 * g[k] * phi[0]
    if k > 1:
        acc += np.dot(g[k - 1 : 0 : -1], phi[1:k])
    return complex(kernel.dt * acc)


def _tbc_value(factor: float, history: np.ndarray, kernel: BesselKernel, t: int) -> complex:
    if t < 0:
        raise BoundaryError(f"time level must be non-negative, got {t}")
    if len(history) < t + 1:
        raise BoundaryError(f"missing history: level {t} requested, {len(history)} samples recorded")
    if t == 0:
        return factor * complex(history[0])
    return factor * (kernel.endpoint_factor * history[t] + convolution_tail(kernel, history, t))


def apply_end_tbc(side: Side, history: np.ndarray, kernel: BesselKernel, t: int) -> complex:
    """
    chi at a truncated bond end from the recorded boundary phi values:
    chi = +-(d/dt int K phi + i m int K phi), plus sign on the right end.
    """
    return _tbc_value(side.sign, np.asarray(history), kernel, t)


def apply_vertex_tbc(history: np.ndarray, kernel: BesselKernel, factor: float) -> complex:
    """chi_1 at the vertex for an interior-only run; factor is A (== 1 under the sum rule)."""
    if not factor > 0:
        raise BoundaryError(f"vertex factor A must be positive, got {factor}")
    history = np.asarray(history)
    return _tbc_value(float(factor), history, kernel, len(history) - 1)


# =========================
# Node updates
# =========================

def advance_tbc_node(
    *,
    factor: float,
    outward: float,
    phi_prev: complex,
    chi_prev: complex,
    chi_inner: complex,
    tail: complex,
    kernel: BesselKernel,
    lam: float,
    mu: float,
) -> Tuple[complex, complex]:
    """
    Advance one boundary phi node whose flux is chi_k = factor * (a phi_k + tail).

    Half-cell balance with the boundary flux averaged over the two levels:
      phi+ - phi- = -2 lam * outward * ((chi_k + chi_prev)/2 - chi_inner) - i mu (phi+ + phi-)
    Returns (phi_new, chi_new).
    """
    a = kernel.endpoint_factor
    c = factor
    lhs = 1.0 + 1j * mu + lam * outward * c * a
    rhs = (1.0 - 1j * mu) * phi_prev - lam * outward * (c * tail + chi_prev) + 2.0 * lam * outward * chi_inner
    phi_new = rhs / lhs
    return phi_new, c * (a * phi_new + tail)


@dataclass(frozen=True)
class VertexValues:
    phi: np.ndarray
    chi: np.ndarray


def apply_vertex(
    mode: VertexMode,
    phi_prev: np.ndarray,
    chi_adjacent: np.ndarray,
    alphas: Sequence[float],
    *,
    lam: float,
    mu: float,
    dx: float,
    dt: float,
) -> VertexValues:
    """
    Advance the coinciding vertex phi nodes of all bonds by one step.

    phi_prev[j], chi_adjacent[j] refer to bond j+1; bond 1 is incoming, the others outgoing.
    The weighted continuity alpha_j phi_j(0) = Phi is imposed exactly and Phi is advanced by
    the weighted half-cell balance, so the returned vertex fluxes chi_j(0) satisfy
    chi_1/alpha_1 = sum_{j>=2} chi_j/alpha_j. Kirchhoff mode uses unit weights.
    """
    if mode is VertexMode.TRANSPARENT:
        raise BoundaryError(
            "transparent vertex mode simulates bond 1 alone; use apply_vertex_tbc, not a multi-bond vertex"
        )
    phi_prev = np.asarray(phi_prev, dtype=complex)
    chi_adjacent = np.asarray(chi_adjacent, dtype=complex)
    n = len(phi_prev)
    if n < 2 or len(chi_adjacent) != n or len(alphas) != n:
        raise BoundaryError(f"vertex needs matching per-bond inputs for >= 2 bonds, got {n}")

    w = np.ones(n) if mode is VertexMode.KIRCHHOFF else np.asarray(alphas, dtype=float)
    inv = 1.0 / w
    s = float(np.sum(inv * inv))
    outward = np.full(n, -1.0)
    outward[0] = 1.0

    # weighted projection of the stored values onto the continuity constraint
    big_phi_prev = np.sum(phi_prev * inv) / s
    balance = np.sum(outward * chi_adjacent * inv)
    big_phi = ((1.0 - 1j * mu) * big_phi_prev + (2.0 * lam / s) * balance) / (1.0 + 1j * mu)

    phi_new = big_phi * inv
    phi_old = big_phi_prev * inv
    chi_vertex = chi_adjacent - outward * 0.5 * dx * (
        (phi_new - phi_old) / dt + 1j * (mu / dt) * (phi_new + phi_old)
    )
    return VertexValues(phi_new, chi_vertex)


def project_vertex(phi_vertex: np.ndarray, alphas: Sequence[float], mode: VertexMode) -> np.ndarray:
    """Closest (weighted least squares) vertex values satisfying alpha_j phi_j(0) = const."""
    phi_vertex = np.asarray(phi_vertex, dtype=complex)
    w = np.ones(len(phi_vertex)) if mode is VertexMode.KIRCHHOFF else np.asarray(alphas, dtype=float)
    inv = 1.0 / w
    big_phi = np.sum(phi_vertex * inv) / np.sum(inv * inv)
    return big_phi * inv


# =========================
# Policy
# =========================

VERTEX_KEY = "vertex"


def end_key(bond_id: int) -> str:
    return f"end:{bond_id}"


@dataclass
class BoundaryPolicy:
    """
    Vertex and end conditions of one simulation, plus the convolution histories
    of its transparent boundaries. Owned by exactly one simulation.
    """

    vertex_mode: VertexMode
    end_modes: Tuple[EndMode, ...]
    alphas: Tuple[float, ...]
    kernel_kind: KernelKind = KernelKind.I0
    kernel: Optional[BesselKernel] = None
    histories: Dict[str, BoundaryHistory] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.end_modes) != len(self.alphas):
            raise BoundaryError(
                f"{len(self.end_modes)} end modes given for {len(self.alphas)} bonds"
            )
        if len(self.alphas) < 2:
            raise BoundaryError("a policy needs the weights of at least two bonds")

    @property
    def domain(self) -> Tuple[int, ...]:
        """Bond ids that are actually simulated."""
        if self.vertex_mode is VertexMode.TRANSPARENT:
            return (1,)
        return tuple(range(1, len(self.alphas) + 1))

    @property
    def effective_alphas(self) -> Tuple[float, ...]:
        """Weights the vertex condition actually uses; Kirchhoff ignores the configured ones."""
        if self.vertex_mode is VertexMode.KIRCHHOFF:
            return tuple(1.0 for _ in self.alphas)
        return self.alphas

    @property
    def vertex_factor(self) -> float:
        return vertex_factor(self.effective_alphas)

    @property
    def sum_rule_residual(self) -> float:
        return weights_residual(self.effective_alphas)

    def transparent_keys(self) -> Tuple[str, ...]:
        keys = [end_key(b) for b in self.domain if self.end_modes[b - 1] is EndMode.TRANSPARENT]
        if self.vertex_mode is VertexMode.TRANSPARENT:
            keys.append(VERTEX_KEY)
        return tuple(keys)

    def bind(self, mass: float, dt: float, n_steps: int) -> None:
        """Prepare the kernel for a run of n_steps further steps from the current histories."""
        needed = n_steps + max((len(h) for h in self.histories.values()), default=0)
        if (
            self.kernel is None
            or self.kernel.mass != mass
            or self.kernel.dt != dt
            or self.kernel.kind is not self.kernel_kind
        ):
            self.kernel = BesselKernel.build(mass, dt, needed, self.kernel_kind)
        else:
            self.kernel = self.kernel.extended(needed)

    def ensure_kernel(self, level: int) -> BesselKernel:
        if self.kernel is None:
            raise BoundaryError("boundary policy is not bound to a mass and time step")
        if len(self.kernel) < level + 1:
            logger.debug("extending convolution kernel to level %d", level)
            self.kernel = self.kernel.extended(level)
        return self.kernel

    def history(self, key: str) -> BoundaryHistory:
        if key not in self.histories:
            raise BoundaryError(f"missing history for boundary {key!r}")
        return self.histories[key]

    def reset(self) -> None:
        self.histories = {}
