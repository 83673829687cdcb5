from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, List, Optional, Sequence, Tuple

import numpy as np

from diracgraph.boundary import (
    VERTEX_KEY,
    BoundaryHistory,
    BoundaryPolicy,
    EndMode,
    KernelKind,
    Side,
    VertexMode,
    advance_tbc_node,
    apply_vertex,
    convolution_tail,
    end_key,
    project_vertex,
)
from diracgraph.diagnostics import DiagnosticsRecord, field_norm, make_record
from diracgraph.errors import BoundaryError, InstabilityError
from diracgraph.graph import Bond, StarGraph

if TYPE_CHECKING:
    from diracgraph.config import ExperimentConfig

logger = logging.getLogger(__name__)

DEFAULT_OVERFLOW_FACTOR = 1e6
NORM_GROWTH_WARNING = 1.1  # ratio to the initial total norm


class StartMode(enum.Enum):
    TAYLOR = "taylor"  # phi^{-1/2} from a half step back, second order
    SAMPLED = "sampled"  # phi^{-1/2} = phi(0), first order


@dataclass(frozen=True)
class SimParams:
    mass: float
    dt: float
    dx: float
    n_steps: int
    overflow_factor: float = DEFAULT_OVERFLOW_FACTOR
    enforce_cfl: bool = True

    def __post_init__(self) -> None:
        if not self.mass >= 0:
            raise ValueError(f"mass must be non-negative, got {self.mass!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not self.dx > 0:
            raise ValueError(f"dx must be positive, got {self.dx!r}")
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be non-negative, got {self.n_steps}")
        if not self.overflow_factor > 0:
            raise ValueError(f"overflow_factor must be positive, got {self.overflow_factor!r}")
        if self.enforce_cfl and self.lam > 1.0:
            raise ValueError(f"CFL violated: dt/dx = {self.lam:.6g} > 1")

    @property
    def lam(self) -> float:
        return self.dt / self.dx

    @property
    def mu(self) -> float:
        return 0.5 * self.mass * self.dt


@dataclass
class SpinorField:
    """
    Staggered spinor on the simulated bonds. At time_level n, phi holds phi^{n-1/2}
    on the integer nodes and chi holds chi^n on the half nodes.
    """

    bond_ids: Tuple[int, ...]
    phi: List[np.ndarray]
    chi: List[np.ndarray]
    dx: float
    time_level: int = 0

    def __post_init__(self) -> None:
        if not (len(self.bond_ids) == len(self.phi) == len(self.chi)):
            raise ValueError("bond_ids, phi and chi must have one entry per bond")
        for bond_id, p, c in zip(self.bond_ids, self.phi, self.chi):
            if len(p) != len(c) + 1:
                raise ValueError(f"bond {bond_id}: phi must have one more node than chi")

    @classmethod
    def zeros(cls, graph: StarGraph, bond_ids: Sequence[int] | None = None) -> "SpinorField":
        ids = tuple(bond_ids) if bond_ids is not None else tuple(b.id for b in graph.bonds)
        bonds = [graph.bond(i) for i in ids]
        return cls(
            ids,
            [np.zeros(b.cells + 1, dtype=complex) for b in bonds],
            [np.zeros(b.cells, dtype=complex) for b in bonds],
            graph.dx,
        )

    def index(self, bond_id: int) -> int:
        try:
            return self.bond_ids.index(bond_id)
        except ValueError:
            raise BoundaryError(f"bond {bond_id} is not part of the simulated domain {self.bond_ids}") from None

    def copy(self) -> "SpinorField":
        return SpinorField(
            self.bond_ids,
            [p.copy() for p in self.phi],
            [c.copy() for c in self.chi],
            self.dx,
            self.time_level,
        )

    def scaled(self, factor: complex) -> "SpinorField":
        return SpinorField(
            self.bond_ids,
            [factor * p for p in self.phi],
            [factor * c for c in self.chi],
            self.dx,
            self.time_level,
        )

    def max_abs(self) -> float:
        return max(
            max((float(np.max(np.abs(p))) for p in self.phi if p.size), default=0.0),
            max((float(np.max(np.abs(c))) for c in self.chi if c.size), default=0.0),
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.phi) and all(np.all(np.isfinite(c)) for c in self.chi)


@dataclass(frozen=True)
class SpinorFragment:
    bond_id: int
    phi: np.ndarray
    chi: np.ndarray


# =========================
# Initial data
# =========================

def gaussian(x: np.ndarray, x0: float, sigma: float) -> np.ndarray:
    """(2 pi sigma^2)^{-1/4} exp(-(x - x0)^2 / (4 sigma^2))"""
    return (2.0 * np.pi * sigma * sigma) ** -0.25 * np.exp(-((x - x0) ** 2) / (4.0 * sigma * sigma))


def gaussian_spinor(x0: float, sigma: float, bond: Bond) -> SpinorFragment:
    """Gaussian spinor (1, 1)^T sampled on the staggered nodes of one bond."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if not bond.contains(x0):
        lo, hi = bond.bounds
        raise ValueError(f"x0={x0} lies outside bond {bond.id} ([{lo}, {hi}])")
    phi = gaussian(bond.phi_nodes(), x0, sigma).astype(complex)
    chi = gaussian(bond.chi_nodes(), x0, sigma).astype(complex)
    return SpinorFragment(bond.id, phi, chi)


def half_step_back(field: SpinorField, params: SimParams) -> SpinorField:
    """phi(-dt/2) ~ phi(0) + dt/2 (d_x chi + i m phi) on interior nodes."""
    out = field.copy()
    for p, c in zip(out.phi, out.chi):
        p[1:-1] += 0.5 * params.lam * (c[1:] - c[:-1]) + 1j * params.mu * p[1:-1]
    return out


def make_admissible(field: SpinorField, graph: StarGraph, policy: BoundaryPolicy) -> SpinorField:
    """Project the vertex values onto weighted continuity and zero the Dirichlet ends."""
    out = field.copy()
    for i, bond_id in enumerate(out.bond_ids):
        bond = graph.bond(bond_id)
        if policy.end_modes[bond_id - 1] is EndMode.DIRICHLET:
            out.phi[i][bond.end_index] = 0.0
    if policy.vertex_mode is not VertexMode.TRANSPARENT:
        idx = [graph.bond(b).vertex_index for b in out.bond_ids]
        values = np.array([p[k] for p, k in zip(out.phi, idx)])
        projected = project_vertex(values, policy.alphas, policy.vertex_mode)
        for p, k, v in zip(out.phi, idx, projected):
            p[k] = v
    return out


def initial_field(
    graph: StarGraph,
    params: SimParams,
    policy: BoundaryPolicy,
    *,
    x0: float,
    sigma: float,
    bond: int = 1,
    normalize: bool = True,
    amplitude: float = 1.0,
    start: StartMode = StartMode.TAYLOR,
) -> SpinorField:
    field = SpinorField.zeros(graph, policy.domain)
    fragment = gaussian_spinor(x0, sigma, graph.bond(bond))
    i = field.index(bond)
    field.phi[i][:] = amplitude * fragment.phi
    field.chi[i][:] = amplitude * fragment.chi

    if start is StartMode.TAYLOR:
        field = half_step_back(field, params)
    field = make_admissible(field, graph, policy)

    if normalize:
        total = field_norm(field)
        if total > 0:
            field = field.scaled(1.0 / math.sqrt(total))
    return field


def init_histories(field: SpinorField, graph: StarGraph, policy: BoundaryPolicy) -> None:
    """Start a history (level 0 sample) for every transparent boundary of the domain."""
    policy.reset()
    for bond_id in policy.domain:
        if policy.end_modes[bond_id - 1] is not EndMode.TRANSPARENT:
            continue
        bond = graph.bond(bond_id)
        side = Side.LEFT if bond.incoming else Side.RIGHT
        value = complex(field.phi[field.index(bond_id)][bond.end_index])
        history = BoundaryHistory()
        history.append(value, side.sign * value)
        policy.histories[end_key(bond_id)] = history
    if policy.vertex_mode is VertexMode.TRANSPARENT:
        value = complex(field.phi[field.index(1)][graph.bond(1).vertex_index])
        history = BoundaryHistory()
        history.append(value, policy.vertex_factor * value)
        policy.histories[VERTEX_KEY] = history


# =========================
# Time stepping
# =========================

def step(
    field: SpinorField,
    graph: StarGraph,
    params: SimParams,
    policy: BoundaryPolicy,
    *,
    guard: Optional[float] = None,
) -> SpinorField:
    """
    Advance all simulated bonds by one dt:
    interior phi nodes by the leap-frog stencil, vertex and end phi nodes by the
    boundary conditions, then all chi half nodes.
    """
    if field.bond_ids != policy.domain:
        raise BoundaryError(
            f"field covers bonds {field.bond_ids} but the {policy.vertex_mode.value} policy simulates {policy.domain}"
        )
    level = field.time_level + 1
    keys = policy.transparent_keys()
    for key in keys:
        if len(policy.history(key)) != level:
            raise BoundaryError(
                f"history {key!r} holds {len(policy.history(key))} samples at time level {field.time_level}"
            )
    kernel = policy.ensure_kernel(level) if keys else None

    lam, mu = params.lam, params.mu
    q_plus, q_minus = 1.0 + 1j * mu, 1.0 - 1j * mu

    new_phi: List[np.ndarray] = []
    for p, c in zip(field.phi, field.chi):
        q = np.empty_like(p)
        q[1:-1] = (q_minus * p[1:-1] - lam * (c[1:] - c[:-1])) / q_plus
        new_phi.append(q)

    bonds = [graph.bond(b) for b in field.bond_ids]

    # vertex
    if policy.vertex_mode is VertexMode.TRANSPARENT:
        assert kernel is not None
        history = policy.history(VERTEX_KEY)
        k = bonds[0].vertex_index
        phi_v, chi_v = advance_tbc_node(
            factor=policy.vertex_factor,
            outward=1.0,
            phi_prev=complex(field.phi[0][k]),
            chi_prev=complex(history.chi[-1]),
            chi_inner=complex(field.chi[0][-1]),
            tail=convolution_tail(kernel, history.phi, level),
            kernel=kernel,
            lam=lam,
            mu=mu,
        )
        new_phi[0][k] = phi_v
        history.append(phi_v, chi_v)
    else:
        idx = [b.vertex_index for b in bonds]
        values = apply_vertex(
            policy.vertex_mode,
            np.array([p[k] for p, k in zip(field.phi, idx)]),
            np.array([c[-1] if b.incoming else c[0] for c, b in zip(field.chi, bonds)]),
            policy.alphas,
            lam=lam,
            mu=mu,
            dx=params.dx,
            dt=params.dt,
        )
        for q, k, v in zip(new_phi, idx, values.phi):
            q[k] = v

    # far ends
    for i, bond in enumerate(bonds):
        k = bond.end_index
        if policy.end_modes[bond.id - 1] is EndMode.DIRICHLET:
            new_phi[i][k] = 0.0
            continue
        assert kernel is not None
        side = Side.LEFT if bond.incoming else Side.RIGHT
        history = policy.history(end_key(bond.id))
        c = field.chi[i]
        phi_e, chi_e = advance_tbc_node(
            factor=side.sign,
            outward=side.sign,
            phi_prev=complex(field.phi[i][k]),
            chi_prev=complex(history.chi[-1]),
            chi_inner=complex(c[0] if bond.incoming else c[-1]),
            tail=convolution_tail(kernel, history.phi, level),
            kernel=kernel,
            lam=lam,
            mu=mu,
        )
        new_phi[i][k] = phi_e
        history.append(phi_e, chi_e)

    new_chi = [(q_plus * c - lam * (q[1:] - q[:-1])) / q_minus for c, q in zip(field.chi, new_phi)]
    out = SpinorField(field.bond_ids, new_phi, new_chi, field.dx, level)

    if not out.is_finite():
        raise InstabilityError(level, float("nan"), guard if guard is not None else float("inf"))
    if guard is not None:
        peak = out.max_abs()
        if peak > guard:
            raise InstabilityError(level, peak, guard)
    return out


# =========================
# Runs
# =========================

@dataclass(frozen=True)
class Snapshot:
    bond_id: int
    t: float
    time_level: int
    x: np.ndarray
    phi: np.ndarray
    chi: np.ndarray  # averaged onto the phi nodes

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.phi) ** 2 + np.abs(self.chi) ** 2


def chi_on_nodes(chi: np.ndarray) -> np.ndarray:
    """Average half-node values onto the integer nodes; single neighbour at the ends."""
    out = np.empty(len(chi) + 1, dtype=complex)
    out[0] = chi[0]
    out[-1] = chi[-1]
    out[1:-1] = 0.5 * (chi[1:] + chi[:-1])
    return out


def take_snapshots(field: SpinorField, graph: StarGraph, dt: float) -> List[Snapshot]:
    t = field.time_level * dt
    return [
        Snapshot(b, t, field.time_level, graph.bond(b).phi_nodes(), p.copy(), chi_on_nodes(c))
        for b, p, c in zip(field.bond_ids, field.phi, field.chi)
    ]


@dataclass
class SimulationState:
    field: SpinorField
    policy: BoundaryPolicy
    reference_norm: Optional[float] = None  # total norm at time level 0

    def record_reference(self) -> Optional[float]:
        """Denominator of R for this state's records; None means the current total."""
        if self.policy.vertex_mode is VertexMode.TRANSPARENT:
            return self.reference_norm
        return None


@dataclass
class RunResult:
    graph: StarGraph
    params: SimParams
    state: SimulationState
    records: List[DiagnosticsRecord] = field(default_factory=list)
    snapshots: List[Snapshot] = field(default_factory=list)

    @property
    def final(self) -> DiagnosticsRecord:
        return self.records[-1]


def prepare(config: "ExperimentConfig") -> Tuple[StarGraph, SimParams, SimulationState]:
    graph = config.build_graph()
    params = config.sim_params()
    policy = config.build_policy(graph)
    init = config.initial
    field_ = initial_field(
        graph,
        params,
        policy,
        x0=init.x0,
        sigma=init.sigma,
        bond=init.bond,
        normalize=init.normalize,
        amplitude=init.amplitude,
        start=config.solver.start,
    )
    init_histories(field_, graph, policy)
    return graph, params, SimulationState(field_, policy, field_norm(field_))


def _warn_norm_growth(record: DiagnosticsRecord, initial_norm: float, policy: BoundaryPolicy) -> None:
    hint = ""
    if policy.transparent_keys() and policy.kernel_kind is KernelKind.I0:
        hint = "; the i0 boundary kernel amplifies at large m*t, consider kernel: j0"
    logger.warning(
        "total norm grew to %.6g times its initial value at t=%.4f%s",
        record.total_norm / initial_norm, record.t, hint,
    )


def run(
    config: "ExperimentConfig",
    *,
    state: Optional[SimulationState] = None,
    on_sample: Optional[Callable[[DiagnosticsRecord], None]] = None,
) -> RunResult:
    """
    Execute config.solver.n_steps steps from the configured initial data (or from a
    restored state), sampling diagnostics every sample_every steps plus the final step.
    Snapshot times are measured from the start of this run.
    """
    graph, params, fresh = prepare(config) if state is None else (config.build_graph(), config.sim_params(), None)
    current = fresh if fresh is not None else state
    assert current is not None
    policy = current.policy
    policy.bind(params.mass, params.dt, params.n_steps)
    if current.reference_norm is None:
        current.reference_norm = field_norm(current.field)
    reference = current.record_reference()
    initial_norm = current.reference_norm
    norm_warned = False

    f = current.field
    start_level = f.time_level
    initial_peak = f.max_abs()
    guard = params.overflow_factor * initial_peak if initial_peak > 0 else None

    snapshot_steps = sorted({int(round(t / params.dt)) for t in config.sampling.snapshot_times})
    sample_every = config.sampling.sample_every

    logger.info(
        "run: %d bonds (domain %s), %d steps, dt=%g, dx=%g, m=%g, vertex=%s",
        graph.n_bonds, policy.domain, params.n_steps, params.dt, params.dx, params.mass,
        policy.vertex_mode.value,
    )

    result = RunResult(graph, params, current)

    def sample(fld: SpinorField) -> None:
        nonlocal norm_warned
        record = make_record(fld, params, reference)
        result.records.append(record)
        if not norm_warned and initial_norm and record.total_norm > NORM_GROWTH_WARNING * initial_norm:
            norm_warned = True
            _warn_norm_growth(record, initial_norm, policy)
        logger.debug("t=%.4f total=%.12g R=%.6g E=%.12g", record.t, record.total_norm, record.reflection, record.energy)
        if on_sample is not None:
            on_sample(record)

    sample(f)
    if 0 in snapshot_steps:
        result.snapshots.extend(take_snapshots(f, graph, params.dt))

    for n in range(1, params.n_steps + 1):
        f = step(f, graph, params, policy, guard=guard)
        if n % sample_every == 0 or n == params.n_steps:
            sample(f)
        if n in snapshot_steps:
            result.snapshots.extend(take_snapshots(f, graph, params.dt))

    current.field = f
    logger.info(
        "run finished at t=%.4f (levels %d..%d): R=%.6g total=%.12g",
        f.time_level * params.dt, start_level, f.time_level, result.final.reflection, result.final.total_norm,
    )
    return result

