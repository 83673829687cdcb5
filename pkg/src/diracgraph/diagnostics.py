from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

import numpy as np

from diracgraph.graph import StarGraph

if TYPE_CHECKING:
    from diracgraph.solver import SimParams, SpinorField

FULLY_TRANSMITTED = 0.02


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    time_level: int
    bond_ids: Tuple[int, ...]
    partial_norms: Tuple[float, ...]
    total_norm: float
    energy: float
    reflection: float

    def norm_of(self, bond_id: int) -> float:
        return self.partial_norms[self.bond_ids.index(bond_id)]


# =========================
# Norms and energy
# =========================

def _phi_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def _bond_norm(phi: np.ndarray, chi: np.ndarray, dx: float) -> float:
    # trapezoid over phi nodes, midpoint over chi half nodes
    phi_part = float(np.sum(_phi_weights(len(phi)) * np.abs(phi) ** 2))
    chi_part = float(np.sum(np.abs(chi) ** 2))
    return dx * (phi_part + chi_part)


def partial_norm(field: "SpinorField", bond_id: int) -> float:
    i = field.index(bond_id)
    return _bond_norm(field.phi[i], field.chi[i], field.dx)


def field_norm(field: "SpinorField") -> float:
    return sum(_bond_norm(p, c, field.dx) for p, c in zip(field.phi, field.chi))


def energy(field: "SpinorField", params: "SimParams") -> float:
    """
    ||phi||^2 + ||chi||^2 + (dt/dx) Re(D phi, chi), summed over the simulated bonds,
    with (D phi)_{j-1/2} = phi_j - phi_{j-1}. Pairs phi^{n-1/2} with chi^n.
    """
    total = 0.0
    for p, c in zip(field.phi, field.chi):
        coupling = float(np.real(np.vdot(c, np.diff(p))))  # sum (D phi) conj(chi)
        total += _bond_norm(p, c, field.dx) + field.dx * params.lam * coupling
    return total


# =========================
# Scattering observables
# =========================

def reflection_coefficient(record: DiagnosticsRecord) -> float:
    """N_1 / sum_j N_j."""
    if not record.total_norm > 0:
        raise ValueError("reflection coefficient is undefined for a zero total norm")
    return record.norm_of(1) / record.total_norm


def transmitted_fractions(
    record: DiagnosticsRecord, threshold: float = FULLY_TRANSMITTED
) -> Tuple[float, ...]:
    """Share of the transmitted norm carried by each outgoing bond, in bond order."""
    r = reflection_coefficient(record)
    if r > threshold:
        raise ValueError(f"packet not fully transmitted yet: R={r:.6g} exceeds {threshold}")
    outgoing = [n for b, n in zip(record.bond_ids, record.partial_norms) if b != 1]
    if not outgoing:
        raise ValueError("record holds no outgoing bonds")
    transmitted = sum(outgoing)
    return tuple(n / transmitted for n in outgoing)


def make_record(
    field: "SpinorField", params: "SimParams", reference_norm: Optional[float] = None
) -> DiagnosticsRecord:
    """
    Diagnostics of one time level. R is N_1 over the current total norm, or over
    reference_norm when given. Runs that simulate bond 1 alone pass the total norm
    at time level 0.
    """
    norms = tuple(partial_norm(field, b) for b in field.bond_ids)
    total = float(sum(norms))
    denominator = total if reference_norm is None else reference_norm
    reflection = norms[field.bond_ids.index(1)] / denominator if denominator > 0 and 1 in field.bond_ids else 0.0
    return DiagnosticsRecord(
        t=field.time_level * params.dt,
        time_level=field.time_level,
        bond_ids=field.bond_ids,
        partial_norms=norms,
        total_norm=total,
        energy=energy(field, params),
        reflection=min(max(reflection, 0.0), 1.0),
    )


def max_relative_drift(values: Sequence[float]) -> float:
    """max_n |v_n - v_0| / |v_0|; 0 for an empty series or a zero reference."""
    if len(values) == 0:
        return 0.0
    arr = np.asarray(values, dtype=float)
    ref = abs(arr[0])
    if ref == 0:
        return 0.0
    return float(np.max(np.abs(arr - arr[0])) / ref)


# =========================
# Self-adjointness check
# =========================

def extrapolate_chi(chi: np.ndarray, at_start: bool) -> complex:
    """Second order one-sided value of chi at a bond end: (3 chi_{1/2} - chi_{3/2}) / 2."""
    if len(chi) == 1:
        return complex(chi[0])
    if at_start:
        return complex(1.5 * chi[0] - 0.5 * chi[1])
    return complex(1.5 * chi[-1] - 0.5 * chi[-2])


def boundary_form(psi: "SpinorField", other: "SpinorField", graph: StarGraph) -> complex:
    """
    Omega(psi, other) = <D psi, other> - <psi, D other>
                      = -i sum_b [phi v* + chi u*] evaluated right end minus left end,
    with psi = (phi, chi) and other = (u, v) in each bond's own coordinate.
    """
    if psi.bond_ids != other.bond_ids:
        raise ValueError(f"fields live on different bonds: {psi.bond_ids} vs {other.bond_ids}")
    total = 0j
    for bond_id, phi, chi, u, v in zip(psi.bond_ids, psi.phi, psi.chi, other.phi, other.chi):
        graph.bond(bond_id)
        left = phi[0] * np.conj(extrapolate_chi(v, True)) + extrapolate_chi(chi, True) * np.conj(u[0])
        right = phi[-1] * np.conj(extrapolate_chi(v, False)) + extrapolate_chi(chi, False) * np.conj(u[-1])
        total += right - left
    return complex(-1j * total)
