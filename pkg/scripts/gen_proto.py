#!/usr/bin/env python3
"""
Regenerate the checkpoint message modules under src/diracgraph/dg/ from proto/.

Equivalent to:
  python -m grpc_tools.protoc -I proto --python_out=src/diracgraph proto/dg/v1/*.proto

With --check nothing is written: the modules are generated into a temporary
directory and compared byte for byte with the checked-in ones.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
import tempfile
from pathlib import Path
from typing import List


def _fail(msg: str, code: int = 1) -> None:
    print(f"[gen_proto] ERROR: {msg}", file=sys.stderr)
    raise SystemExit(code)


def _protoc(proto_dir: Path, proto_files: List[Path], extra: List[str]) -> None:
    cmd = [sys.executable, "-m", "grpc_tools.protoc", f"-I{proto_dir}", *extra]
    cmd.extend(str(p) for p in proto_files)
    print("[gen_proto] Running:")
    print("  " + " ".join(cmd))
    try:
        subprocess.check_call(cmd)
    except FileNotFoundError as e:
        _fail(f"Could not run protoc via grpc_tools.protoc: {e}")
    except subprocess.CalledProcessError as e:
        _fail(f"protoc failed with exit code {e.returncode}", code=e.returncode)


def _check(proto_dir: Path, proto_files: List[Path], out_dir: Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        _protoc(proto_dir, proto_files, [f"--python_out={tmp}"])
        generated = sorted(Path(tmp).rglob("*_pb2.py"))
        if not generated:
            _fail("protoc produced no *_pb2.py files")
        stale = []
        for fresh in generated:
            rel = fresh.relative_to(tmp)
            current = out_dir / rel
            if not current.exists() or current.read_bytes() != fresh.read_bytes():
                stale.append(str(rel))
    if stale:
        _fail(f"out of date with the schema: {', '.join(stale)}; rerun without --check")
    print(f"[gen_proto] {len(generated)} module(s) match the schema")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--proto-dir", default="proto", help="Root directory of the .proto files (default: proto)")
    parser.add_argument("--out-dir", default="src/diracgraph", help="Output root for *_pb2.py (default: src/diracgraph)")
    parser.add_argument("--pattern", default="dg/**/*.proto", help="Glob under proto-dir (default: dg/**/*.proto)")
    parser.add_argument("--mypy", action="store_true", help="Also generate .pyi stubs (requires mypy-protobuf).")
    parser.add_argument("--check", action="store_true", help="Only verify that the checked-in modules match.")
    args = parser.parse_args()

    repo_root = Path(__file__).resolve().parents[1]
    proto_dir = (repo_root / args.proto_dir).resolve()
    out_dir = (repo_root / args.out_dir).resolve()

    if not proto_dir.exists():
        _fail(f"proto dir not found: {proto_dir}")
    proto_files = sorted(proto_dir.glob(args.pattern))
    if not proto_files:
        _fail(f"No .proto files found under {proto_dir} with pattern {args.pattern!r}")

    if args.check:
        _check(proto_dir, proto_files, out_dir)
        return

    out_dir.mkdir(parents=True, exist_ok=True)
    extra = [f"--python_out={out_dir}"]
    if args.mypy:
        extra.append(f"--mypy_out={out_dir}")
    _protoc(proto_dir, proto_files, extra)
    print(f"[gen_proto] Done. Generated files are in: {out_dir}")


if __name__ == "__main__":
    main()
