from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Tuple

import numpy as np
from google.protobuf.message import DecodeError

from diracgraph.boundary import BoundaryHistory, BoundaryPolicy, EndMode, KernelKind, VertexMode
from diracgraph.dg.v1 import state_pb2
from diracgraph.errors import CheckpointError, GraphError
from diracgraph.graph import Bond, Orientation, StarGraph
from diracgraph.solver import SimParams, SimulationState, SpinorField

if TYPE_CHECKING:
    from diracgraph.config import ExperimentConfig

logger = logging.getLogger(__name__)


# =========================
# Graph
# =========================

def graph_to_message(graph: StarGraph) -> state_pb2.StarGraph:
    msg = state_pb2.StarGraph()
    for b in graph.bonds:
        msg.bonds.add(id=b.id, incoming=b.incoming, length=b.length, dx=b.dx, alpha=b.alpha)
    return msg


def message_to_graph(msg: state_pb2.StarGraph) -> StarGraph:
    bonds = []
    for b in msg.bonds:
        orientation = Orientation.INCOMING if b.incoming else Orientation.OUTGOING
        bonds.append(Bond(int(b.id), orientation, b.length, b.dx, b.alpha))
    return StarGraph(tuple(bonds))


def graph_to_bytes(graph: StarGraph) -> bytes:
    return graph_to_message(graph).SerializeToString()


def bytes_to_graph(data: bytes) -> StarGraph:
    msg = state_pb2.StarGraph()
    try:
        msg.ParseFromString(data)
        return message_to_graph(msg)
    except (DecodeError, GraphError) as e:
        raise CheckpointError(f"invalid graph payload: {e}") from None


# =========================
# Complex arrays
# =========================

def _fill_series(series: state_pb2.ComplexSeries, values: np.ndarray) -> None:
    series.re.extend(np.real(values).tolist())
    series.im.extend(np.imag(values).tolist())


def _read_series(series: state_pb2.ComplexSeries, where: str) -> np.ndarray:
    if len(series.re) != len(series.im):
        raise CheckpointError(f"{where}: {len(series.re)} real parts but {len(series.im)} imaginary parts")
    return np.asarray(series.re, dtype=float) + 1j * np.asarray(series.im, dtype=float)


# =========================
# Checkpoints
# =========================

@dataclass
class RestoredRun:
    graph: StarGraph
    mass: float
    dt: float
    state: SimulationState

    @property
    def time_level(self) -> int:
        return self.state.field.time_level

    def check_compatible(self, config: "ExperimentConfig") -> None:
        """Raise CheckpointError unless the config describes the same simulation."""
        graph = config.build_graph()
        policy = self.state.policy
        mismatches = []
        if graph != self.graph:
            mismatches.append("graph")
        if config.solver.mass != self.mass:
            mismatches.append(f"mass ({config.solver.mass} vs {self.mass})")
        if config.solver.dt != self.dt:
            mismatches.append(f"dt ({config.solver.dt} vs {self.dt})")
        if config.boundary.vertex_mode is not policy.vertex_mode:
            mismatches.append(f"vertex_mode ({config.boundary.vertex_mode.value} vs {policy.vertex_mode.value})")
        if config.boundary.kernel is not policy.kernel_kind:
            mismatches.append(f"kernel ({config.boundary.kernel.value} vs {policy.kernel_kind.value})")
        if config.end_modes != policy.end_modes:
            mismatches.append("end modes")
        if mismatches:
            raise CheckpointError(f"checkpoint does not match the config: {', '.join(mismatches)}")


def checkpoint_to_bytes(graph: StarGraph, params: SimParams, state: SimulationState) -> bytes:
    f, policy = state.field, state.policy
    msg = state_pb2.Checkpoint(
        mass=params.mass,
        dt=params.dt,
        time_level=f.time_level,
        vertex_mode=policy.vertex_mode.value,
        kernel=policy.kernel_kind.value,
        reference_norm=state.reference_norm or 0.0,
    )
    msg.graph.CopyFrom(graph_to_message(graph))
    msg.end_modes.extend(m.value for m in policy.end_modes)
    for bond_id, phi, chi in zip(f.bond_ids, f.phi, f.chi):
        b = msg.bonds.add(bond_id=bond_id)
        _fill_series(b.phi, phi)
        _fill_series(b.chi, chi)
    for key in sorted(policy.histories):
        history = policy.histories[key]
        t = msg.traces.add(key=key)
        _fill_series(t.phi, history.phi)
        _fill_series(t.chi, history.chi)
    return msg.SerializeToString()


def bytes_to_checkpoint(data: bytes) -> RestoredRun:
    msg = state_pb2.Checkpoint()
    try:
        msg.ParseFromString(data)
    except DecodeError as e:
        raise CheckpointError(f"not a checkpoint: {e}") from None

    try:
        graph = message_to_graph(msg.graph)
        vertex_mode = VertexMode(msg.vertex_mode)
        kernel = KernelKind(msg.kernel)
        end_modes: Tuple[EndMode, ...] = tuple(EndMode(m) for m in msg.end_modes)
        params = SimParams(msg.mass, msg.dt, graph.dx, 0, enforce_cfl=False)
    except ValueError as e:
        raise CheckpointError(f"invalid checkpoint header: {e}") from None

    policy = BoundaryPolicy(vertex_mode, end_modes, graph.alphas, kernel_kind=kernel)
    if tuple(b.bond_id for b in msg.bonds) != policy.domain:
        raise CheckpointError(
            f"checkpoint holds bonds {[b.bond_id for b in msg.bonds]}, expected {list(policy.domain)}"
        )

    phi, chi = [], []
    for b in msg.bonds:
        cells = graph.bond(b.bond_id).cells
        p = _read_series(b.phi, f"bond {b.bond_id} phi")
        c = _read_series(b.chi, f"bond {b.bond_id} chi")
        if len(p) != cells + 1 or len(c) != cells:
            raise CheckpointError(f"bond {b.bond_id}: field size does not match {cells} cells")
        phi.append(p)
        chi.append(c)
    field = SpinorField(policy.domain, phi, chi, graph.dx, int(msg.time_level))

    for t in msg.traces:
        history = BoundaryHistory.from_arrays(_read_series(t.phi, t.key), _read_series(t.chi, t.key))
        if len(history) != field.time_level + 1:
            raise CheckpointError(
                f"trace {t.key!r} holds {len(history)} samples at time level {field.time_level}"
            )
        policy.histories[t.key] = history
    missing = set(policy.transparent_keys()) - set(policy.histories)
    if missing:
        raise CheckpointError(f"checkpoint lacks boundary traces {sorted(missing)}")

    if not (math.isfinite(msg.reference_norm) and msg.reference_norm >= 0):
        raise CheckpointError(f"invalid checkpoint header: reference_norm {msg.reference_norm!r}")
    reference = msg.reference_norm if msg.reference_norm > 0 else None
    return RestoredRun(graph, params.mass, params.dt, SimulationState(field, policy, reference))


def save_checkpoint(path: Path, graph: StarGraph, params: SimParams, state: SimulationState) -> Path:
    path = Path(path)
    path.write_bytes(checkpoint_to_bytes(graph, params, state))
    logger.info("checkpoint at time level %d written to %s", state.field.time_level, path)
    return path


def load_checkpoint(path: Path) -> RestoredRun:
    restored = bytes_to_checkpoint(Path(path).read_bytes())
    logger.info("loaded checkpoint %s (time level %d)", path, restored.time_level)
    return restored
