from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, Tuple

import numpy as np

from diracgraph.errors import GraphError

DEFAULT_LENGTH = 20.0

# relative slack when checking that a bond length is a whole number of cells
_GRID_TOL = 1e-9

BondSpec = Tuple[float, float, float]  # (alpha, truncation_length, dx)


class Orientation(enum.Enum):
    INCOMING = "incoming"  # coordinate range [-L, 0], vertex at the last node
    OUTGOING = "outgoing"  # coordinate range [0, L], vertex at node 0


@dataclass(frozen=True)
class Bond:
    id: int
    orientation: Orientation
    length: float
    dx: float
    alpha: float

    def __post_init__(self) -> None:
        if self.id < 1:
            raise GraphError(f"bond id must be >= 1, got {self.id}")
        if not (self.length > 0 and np.isfinite(self.length)):
            raise GraphError(f"bond {self.id}: length must be positive, got {self.length!r}")
        if not (self.dx > 0 and np.isfinite(self.dx)):
            raise GraphError(f"bond {self.id}: dx must be positive, got {self.dx!r}")
        if not (self.alpha > 0 and np.isfinite(self.alpha)):
            raise GraphError(f"bond {self.id}: alpha must be positive, got {self.alpha!r}")
        ratio = self.length / self.dx
        if abs(ratio - round(ratio)) > _GRID_TOL * max(1.0, ratio) or round(ratio) < 1:
            raise GraphError(
                f"bond {self.id}: length {self.length} is not a whole number of cells of dx={self.dx}"
            )

    @property
    def cells(self) -> int:
        return int(round(self.length / self.dx))

    @property
    def incoming(self) -> bool:
        return self.orientation is Orientation.INCOMING

    @property
    def bounds(self) -> Tuple[float, float]:
        if self.incoming:
            return -self.length, 0.0
        return 0.0, self.length

    @property
    def vertex_index(self) -> int:
        """Index of the phi node sitting on the vertex."""
        return self.cells if self.incoming else 0

    @property
    def end_index(self) -> int:
        """Index of the phi node at the far (truncated) end."""
        return 0 if self.incoming else self.cells

    def phi_nodes(self) -> np.ndarray:
        start = self.bounds[0]
        return start + self.dx * np.arange(self.cells + 1)

    def chi_nodes(self) -> np.ndarray:
        start = self.bounds[0]
        return start + self.dx * (np.arange(self.cells) + 0.5)

    def contains(self, x: float) -> bool:
        lo, hi = self.bounds
        return lo <= x <= hi


@dataclass(frozen=True)
class StarGraph:
    bonds: Tuple[Bond, ...]

    def __post_init__(self) -> None:
        if len(self.bonds) < 2:
            raise GraphError(f"a star graph needs at least 2 bonds, got {len(self.bonds)}")
        for position, bond in enumerate(self.bonds, start=1):
            if bond.id != position:
                raise GraphError(f"bond ids must run 1..N in order, found {bond.id} at {position}")
            expected = Orientation.INCOMING if position == 1 else Orientation.OUTGOING
            if bond.orientation is not expected:
                raise GraphError(f"bond {position} must be {expected.value}")
        dxs = {b.dx for b in self.bonds}
        if len(dxs) != 1:
            raise GraphError(f"all bonds must share one dx, got {sorted(dxs)}")

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    @property
    def dx(self) -> float:
        return self.bonds[0].dx

    @property
    def alphas(self) -> Tuple[float, ...]:
        return tuple(b.alpha for b in self.bonds)

    def bond(self, bond_id: int) -> Bond:
        if not 1 <= bond_id <= self.n_bonds:
            raise GraphError(f"no bond {bond_id} in a {self.n_bonds}-bond graph")
        return self.bonds[bond_id - 1]

    def with_alpha(self, bond_id: int, alpha: float) -> "StarGraph":
        bonds = list(self.bonds)
        bonds[bond_id - 1] = replace(self.bond(bond_id), alpha=float(alpha))
        return StarGraph(tuple(bonds))


def build_star_graph(spec: Sequence[BondSpec] | Iterable[BondSpec]) -> StarGraph:
    """
    Build a star graph from (alpha, truncation_length, dx) triples.
    Bond 1 is the incoming bond, the rest are outgoing.
    """
    items = list(spec)
    if len(items) < 2:
        raise GraphError(f"a star graph needs at least 2 bonds, got {len(items)}")

    bonds = []
    for position, item in enumerate(items, start=1):
        try:
            alpha, length, dx = item
        except (TypeError, ValueError):
            raise GraphError(f"bond {position}: expected (alpha, length, dx), got {item!r}") from None
        orientation = Orientation.INCOMING if position == 1 else Orientation.OUTGOING
        bonds.append(Bond(position, orientation, float(length), float(dx), float(alpha)))
    return StarGraph(tuple(bonds))


def weights_residual(alphas: Sequence[float]) -> float:
    """alpha_1^-2 - sum_{j>=2} alpha_j^-2 for bare weights, bond 1 first."""
    a = np.asarray(alphas, dtype=float)
    return float(a[0] ** -2 - np.sum(a[1:] ** -2))


def sum_rule_residual(graph: StarGraph) -> float:
    """alpha_1^-2 - sum_{j>=2} alpha_j^-2; zero exactly when the vertex is transparent."""
    return weights_residual(graph.alphas)
