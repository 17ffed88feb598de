# Copyright 2026 The blockdvfs Authors.
# SPDX-License-Identifier: Apache-2.0
"""Hand-written scenarios that do not need a search."""

from __future__ import annotations

import json
import random
from pathlib import Path


def _write(path: Path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def alternating_graph(phases=3, gemms=6, small=200):
    """GPU-heavy GEMM phases separated by phases of tiny launch-bound ops.

    Op ids carry the phase so tests can find phase boundaries.
    """
    ops, edges = [], []
    prev = None
    for ph in range(phases):
        for kind, count in (("gpu", gemms), ("cpu", small)):
            for i in range(count):
                if kind == "gpu":
                    op = {"id": f"p{ph}.gpu.{i}", "kind": "linear", "w_comp": 2.0e9,
                          "d_mem": 8.0e6}
                else:
                    op = {"id": f"p{ph}.cpu.{i}", "kind": "activation", "w_comp": 1.0e5,
                          "d_mem": 2.0e4}
                op.update({"s_comp": 0.0, "s_mem": 0.0, "structured": False})
                ops.append(op)
                if prev is not None:
                    edges.append([prev, op["id"]])
                prev = op["id"]
    return {"name": "alternating_phases", "operators": ops, "edges": edges}


def resnet18_trace(graph_path: Path, samples=4, seed=7):
    """Per-sample sparsity jitter around the static fixture values."""
    graph = json.loads(graph_path.read_text())
    rng = random.Random(seed)
    records = []
    for _ in range(samples):
        rec = {}
        for op in graph["operators"]:
            sc = min(0.95, max(0.0, round(op["s_comp"] + rng.uniform(-0.05, 0.05), 3)))
            rec[op["id"]] = [sc, sc if op["structured"] else 0.0]
        records.append(rec)
    return records


def write_all(out: Path, profile):
    _write(out / "graphs" / "alternating_phases.json", alternating_graph())
    _write(out / "scenarios" / "alternating_phases.json", {
        "graph": "../graphs/alternating_phases.json",
        "profile": "../profiles/orin_nano.json",
        "policy": {"kind": "reactive_default", "up": 0.8, "down": 0.3, "period": 0.01},
        "thermal": {"t0": profile.t_ambient},
    })
    # Long enough (several thermal time constants) for both policies to
    # approach their steady temperatures; the limit sits between them.
    _write(out / "scenarios" / "vit_b16_sustained.json", {
        "graph": "../graphs/vit_b16.json",
        "profile": "../profiles/orin_nano.json",
        "policy": {"kind": "sparse_dvfs_lookahead"},
        "partition": {"n": 5, "eps": 0.05},
        "thermal": {"t0": profile.t_ambient, "limit": SUSTAINED_LIMIT},
        "sim": {"iterations": SUSTAINED_ITERATIONS},
    })
    _write(out / "traces" / "resnet18_samples.json",
           resnet18_trace(out / "graphs" / "resnet18.json"))
    _write(out / "scenarios" / "resnet18_trace.json", {
        "graph": "../graphs/resnet18.json",
        "profile": "../profiles/orin_nano.json",
        "policy": {"kind": "sparse_dvfs_lookahead"},
        "partition": {"n": 5, "eps": 0.05},
        "trace": "../traces/resnet18_samples.json",
    })


SUSTAINED_LIMIT = 60.0
SUSTAINED_ITERATIONS = 1000
