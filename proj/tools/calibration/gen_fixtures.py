# Copyright 2026 The blockdvfs Authors.
# SPDX-License-Identifier: Apache-2.0
"""Generates the calibrated device profile, fixture graphs and scenarios.

    python3 tools/calibration/gen_fixtures.py [--out data] [--search]

Operator shapes come from the real architectures (architectures.py). Only the
per-operator sparsity is free. design.json holds one (s_comp, structured)
class per operator; with --search a seeded annealing run over the class menu
looks for a design matching TARGETS instead (slow, and not every fixture
converges; the ResNet-18 design was finished by hand). The look-ahead lead of
each scenario is back-solved from the resulting schedule. See
docs/CALIBRATION.md.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from pathlib import Path

import architectures
import extras
import model

SPARSITY_LEVELS = [round(0.05 * i, 2) for i in range(20)]
CLASSES = [(s, st) for s in SPARSITY_LEVELS for st in (False, True)]

# Block count at N=5, number of block transitions that retune the GPU,
# serial and look-ahead switching stall totals (ms), and the minimum ratio of
# operator-level to block-level switching latency.
TARGETS = {
    "resnet18": dict(blocks=2, gpu_changes=1, serial=7.23, lookahead=0.12, ratio=7.0,
                     start=[0.7] * 21),
    "resnet101": dict(blocks=16, gpu_changes=2, serial=10.81, lookahead=1.45, ratio=None,
                      start=("random", 0.3)),
    "vit_b16": dict(blocks=8, gpu_changes=1, serial=5.44, lookahead=0.72, ratio=8.5),
    "vit_l16": dict(blocks=12, gpu_changes=1, serial=7.92, lookahead=1.08, ratio=None,
                    u_shape=True),
}
N_MONOTONE = [1, 2, 5, 10]
N_SWEEP = [1, 2, 3, 5, 8, 10, 20]
TEMP = 25.0


class Fixture:
    def __init__(self, profile, name, ops, edges):
        self.p = profile
        self.name = name
        self.base = ops
        self.edges = edges
        self.cache = {}

    def ops_for(self, classes):
        out = []
        for op, c in zip(self.base, classes):
            s, structured = CLASSES[c]
            out.append(model.Op(op.id, op.kind, op.w, op.d, s, s if structured else 0.0,
                                structured))
        return out

    def optimum(self, op):
        key = (op.w, op.d, op.sc, op.sm)
        if key not in self.cache:
            self.cache[key] = model.optimal(self.p, op, TEMP)
        return self.cache[key]

    def evaluate(self, classes, target):
        p = self.p
        ops = self.ops_for(classes)
        optima = [self.optimum(op) for op in ops]
        counts = {n: len(model.partition(p, ops, optima, n)) for n in N_MONOTONE}
        blocks = model.executed_blocks(p, ops, optima, 5)
        trans = model.transitions(p, blocks)
        gpu_changes = sum(1 for i in range(len(blocks) - 1) if blocks[i][2][1] != blocks[i + 1][2][1])
        serial = model.stall_total(trans, 0.0) * 1e3
        lead = model.solve_lead(trans, target["lookahead"] * 1e-3)
        op_total = model.op_level_total(p, optima) * 1e3
        info = dict(counts=counts, gpu_changes=gpu_changes, serial=serial, lead=lead,
                    ratio=op_total / serial if serial > 0 else math.inf)

        cost = 100.0 * abs(counts[5] - target["blocks"])
        for a, b in zip(N_MONOTONE, N_MONOTONE[1:]):
            cost += 20.0 * max(0, counts[b] - counts[a])
        cost += 2.0 * abs(gpu_changes - target["gpu_changes"])
        cost += 50.0 * max(0.0, abs(serial - target["serial"]) / target["serial"] - 0.12)
        if lead is None:
            floor = model.stall_total(trans, None) * 1e3
            cost += 2.0 + 10.0 * (floor - target["lookahead"]) / target["lookahead"]
        if target["ratio"]:
            cost += 10.0 * max(0.0, target["ratio"] * 1.15 - info["ratio"])
        if target.get("u_shape") and lead is not None and cost == 0.0:
            energies = []
            for n in N_SWEEP:
                b = model.executed_blocks(p, ops, optima, n)
                energies.append(model.energy(p, ops, b, lead))
            info["energies"] = energies
            lo = min(range(len(energies)), key=energies.__getitem__)
            if lo in (0, len(energies) - 1):
                cost += 5.0
            else:
                margin = min(energies[0], energies[-1]) / energies[lo] - 1.0
                cost += 5.0 * max(0.0, 0.01 - margin)
        return cost, info


def anneal(fix, target, iterations, seed, restart):
    rng = random.Random(seed * 1000 + restart)
    n = len(fix.base)
    # First attempt starts from uniformly sparse unstructured operators,
    # restarts from random classes.
    if restart == 0:
        start = target.get("start", [0.5] * n)
        if isinstance(start, tuple):
            allowed = [i for i, (s, _) in enumerate(CLASSES) if s <= start[1]]
            state = [rng.choice(allowed) for _ in range(n)]
        else:
            state = [CLASSES.index((s, False)) for s in start]
    else:
        state = [rng.randrange(len(CLASSES)) for _ in range(n)]
    cost, info = fix.evaluate(state, target)
    best = (cost, list(state), info)
    temp0 = 5.0
    for it in range(iterations):
        if best[0] == 0.0:
            break
        temp = temp0 * (1.0 - it / iterations) + 1e-3
        cand = list(state)
        for _ in range(rng.choice([1, 1, 2, 3])):
            cand[rng.randrange(n)] = rng.randrange(len(CLASSES))
        c, inf = fix.evaluate(cand, target)
        if c <= cost or rng.random() < math.exp((cost - c) / temp):
            state, cost, info = cand, c, inf
            if c < best[0]:
                best = (c, list(cand), inf)
    return best


def descend(fix, target, state, rounds=6):
    """Coordinate descent: retries every class for every operator."""
    cost, info = fix.evaluate(state, target)
    for _ in range(rounds):
        improved = False
        for i in range(len(state)):
            for c in range(len(CLASSES)):
                if c == state[i]:
                    continue
                cand = list(state)
                cand[i] = c
                cc, inf = fix.evaluate(cand, target)
                if cc < cost:
                    state, cost, info, improved = cand, cc, inf, True
            if cost == 0.0:
                return cost, state, info
        if not improved and len(state) <= 24:
            improved = pair_step(fix, target, state, cost)
            if improved:
                cost, state, info = improved
                improved = True
        if not improved:
            break
    return cost, state, info


def pair_step(fix, target, state, cost):
    """Best improving change of two operators at once; small graphs only."""
    best = None
    n = len(state)
    for i in range(n):
        for j in range(i + 1, n):
            for ci in range(len(CLASSES)):
                for cj in range(len(CLASSES)):
                    cand = list(state)
                    cand[i], cand[j] = ci, cj
                    cc, inf = fix.evaluate(cand, target)
                    if cc < cost and (best is None or cc < best[0]):
                        best = (cc, cand, inf)
                        if cc == 0.0:
                            return best
    return best


def graph_json(name, ops, edges):
    return {
        "name": name,
        "operators": [
            {"id": op.id, "kind": op.kind, "w_comp": op.w, "d_mem": op.d, "s_comp": op.sc,
             "s_mem": op.sm, "structured": op.structured} for op in ops
        ],
        "edges": [list(e) for e in edges],
    }


def write_json(path: Path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def search(fix, target, args):
    best = None
    for restart in range(args.restarts):
        result = anneal(fix, target, args.iterations, args.seed, restart)
        if result[0] > 0.0:
            result = descend(fix, target, result[1])
        if best is None or result[0] < best[0]:
            best = result
        if best[0] == 0.0:
            break
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[2] / "data"))
    ap.add_argument("--search", action="store_true",
                    help="search sparsity classes instead of reading design.json")
    ap.add_argument("--iterations", type=int, default=6000)
    ap.add_argument("--seed", type=int, default=20260)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--only", nargs="*")
    args = ap.parse_args()
    out = Path(args.out)
    design_path = Path(__file__).with_name("design.json")
    design = json.loads(design_path.read_text())

    profile = model.Profile()
    write_json(out / "profiles" / "orin_nano.json", profile.to_json())

    ok = True
    for name, build in architectures.ALL.items():
        if args.only and name not in args.only:
            continue
        gname, ops, edges = build()
        fix = Fixture(profile, gname, ops, edges)
        target = TARGETS[name]
        if args.search:
            cost, classes, info = search(fix, target, args)
            design[name] = [list(CLASSES[c]) for c in classes]
        else:
            classes = [CLASSES.index((s, bool(st))) for s, st in design[name]]
            cost, info = fix.evaluate(classes, target)
        print(f"{name}: cost={cost:.4f} {info}", file=sys.stderr)
        ok &= cost == 0.0
        write_json(out / "graphs" / f"{name}.json", graph_json(gname, fix.ops_for(classes), edges))
        lead = info["lead"]
        scenario = {
            "graph": f"../graphs/{name}.json",
            "profile": "../profiles/orin_nano.json",
            "policy": {"kind": "sparse_dvfs_lookahead", "lead": round(lead, 9) if lead else None},
            "partition": {"n": 5, "eps": 0.05},
            "thermal": {"t0": profile.t_ambient},
            "sweep": {"n_values": N_SWEEP},
        }
        write_json(out / "scenarios" / f"{name}.json", scenario)

    if args.search:
        design_path.write_text(json.dumps(design, indent=1) + "\n")
    extras.write_all(out, profile)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
