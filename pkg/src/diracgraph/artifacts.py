from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import pandas as pd

from diracgraph.diagnostics import DiagnosticsRecord
from diracgraph.solver import Snapshot

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def timeseries_frame(records: Sequence[DiagnosticsRecord]) -> pd.DataFrame:
    if not records:
        raise ValueError("no diagnostics records to write")
    bond_ids = records[0].bond_ids
    rows: List[Dict[str, float]] = []
    for r in records:
        row: Dict[str, float] = {"t": r.t}
        for b, n in zip(bond_ids, r.partial_norms):
            row[f"N_{b}"] = n
        row["total"] = r.total_norm
        row["E"] = r.energy
        row["R"] = r.reflection
        rows.append(row)
    return pd.DataFrame(rows, columns=["t", *[f"N_{b}" for b in bond_ids], "total", "E", "R"])


def snapshot_frame(snapshot: Snapshot) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "x": snapshot.x,
            "re_phi": snapshot.phi.real,
            "im_phi": snapshot.phi.imag,
            "re_chi": snapshot.chi.real,
            "im_chi": snapshot.chi.imag,
            "density": snapshot.density,
        }
    )


def snapshot_name(snapshot: Snapshot) -> str:
    return f"snapshot_b{snapshot.bond_id}_t{snapshot.t:.6g}.csv"


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_timeseries(path: Path, records: Sequence[DiagnosticsRecord]) -> Path:
    return write_csv(path, timeseries_frame(records))


def write_snapshots(out_dir: Path, snapshots: Iterable[Snapshot]) -> List[Path]:
    written = []
    for snap in snapshots:
        written.append(write_csv(out_dir / snapshot_name(snap), snapshot_frame(snap)))
    if written:
        logger.info("wrote %d snapshot file(s) to %s", len(written), out_dir)
    return written


def write_json(path: Path, obj: Dict[str, Any]) -> Path:
    with path.open("w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def remove_outputs(paths: Iterable[Path]) -> None:
    for p in paths:
        try:
            p.unlink()
            logger.warning("removed partial output %s", p)
        except FileNotFoundError:
            pass
