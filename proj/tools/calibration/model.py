# Copyright 2026 The blockdvfs Authors.
# SPDX-License-Identifier: Apache-2.0
"""Python mirror of the latency/power model, partitioner and coordination.

Used only to search fixture parameters. The operation order follows the C++
code so that results agree bit for bit on the fixtures; the C++ acceptance
suite is the final check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CPU_KHZ = [115200, 192000, 268800, 345600, 422400, 499200, 576000, 652800, 729600, 806400,
           883200, 960000, 1036800, 1113600, 1190400, 1267200, 1344000, 1420800, 1497600,
           1510400]
CPU = [k * 1000 for k in CPU_KHZ]
GPU = [306000000, 408000000, 510000000, 612000000, 624000000]
MEM = [204000000, 665600000, 2133000000, 3199000000]


@dataclass
class Profile:
    name: str = "orin-nano-8gb-calibrated"
    cpu: list = field(default_factory=lambda: list(CPU))
    gpu: list = field(default_factory=lambda: list(GPU))
    mem: list = field(default_factory=lambda: list(MEM))
    # Effective work per GPU cycle at full CPU feed, and the CPU feed knee.
    flops_per_cycle: float = 280.0
    feed_knee: float = 800e6
    bytes_per_cycle: float = 8.0
    v_cpu: tuple = (0.60, 1.00)
    v_gpu: tuple = (0.62, 1.00)
    v_mem: tuple = (0.60, 1.10)
    alpha_max: dict = field(default_factory=lambda: {"cpu": 1.2e-9, "gpu": 3e-9, "mem": 4e-10})
    alpha_min_ratio: float = 0.5
    k1: float = 0.008
    k2: float = 1.5
    r_th: float = 4.0
    tau_th: float = 5.0
    t_ambient: float = 25.0
    t_overhead: float = 0.15e-3
    t_switch_base: float = 0.85e-3
    t_prefill: float = 0.5e-3
    # Off-diagonal switch latency: fixed part + slope * |delta GPU MHz|.
    switch_fixed: float = 5.2e-3
    switch_per_mhz: float = 17.5e-6
    switch_diag: float = 0.04e-3

    def __post_init__(self):
        self.build_tables()

    def build_tables(self):
        def lin(levels, v0, v1):
            lo, hi = levels[0], levels[-1]
            return [round(v0 + (v1 - v0) * (f - lo) / (hi - lo), 4) for f in levels]

        self.volt = {"cpu": lin(self.cpu, *self.v_cpu), "gpu": lin(self.gpu, *self.v_gpu),
                     "mem": lin(self.mem, *self.v_mem)}
        top = 1.0 - math.exp(-self.cpu[-1] / self.feed_knee)
        self.pp = [[float(round(self.flops_per_cycle * g *
                                (1.0 - math.exp(-c / self.feed_knee)) / top))
                    for g in self.gpu] for c in self.cpu]
        self.bw = [float(round(self.bytes_per_cycle * m)) for m in self.mem]
        self.alpha_min = {k: v * self.alpha_min_ratio for k, v in self.alpha_max.items()}
        ng = len(self.gpu)
        self.matrix = [[0.0] * ng for _ in range(ng)]
        for i in range(ng):
            for j in range(ng):
                if i == j:
                    self.matrix[i][j] = self.switch_diag
                else:
                    dm = abs(self.gpu[i] - self.gpu[j]) / 1e6
                    self.matrix[i][j] = round(self.switch_fixed + self.switch_per_mhz * dm, 9)

    def to_json(self):
        def lm(levels, vals):
            return {str(f): v for f, v in zip(levels, vals)}

        return {
            "name": self.name,
            "cpu_levels": self.cpu,
            "gpu_levels": self.gpu,
            "mem_levels": self.mem,
            "peak_perf": {f"{c}/{g}": self.pp[i][j] for i, c in enumerate(self.cpu)
                          for j, g in enumerate(self.gpu)},
            "mem_bandwidth": lm(self.mem, self.bw),
            "voltage": {"cpu": lm(self.cpu, self.volt["cpu"]), "gpu": lm(self.gpu, self.volt["gpu"]),
                        "mem": lm(self.mem, self.volt["mem"])},
            "t_overhead": self.t_overhead,
            "t_switch_base": self.t_switch_base,
            "t_switch_matrix": {f"{a}/{b}": self.matrix[i][j] for i, a in enumerate(self.gpu)
                                for j, b in enumerate(self.gpu)},
            "alpha_max": self.alpha_max,
            "alpha_min": self.alpha_min,
            "k1": self.k1,
            "k2": self.k2,
            "r_th": self.r_th,
            "tau_th": self.tau_th,
            "t_ambient": self.t_ambient,
            "t_prefill": self.t_prefill,
        }

    # Triplets are (cpu_index, gpu_index, mem_index) throughout.
    def exec_time(self, w, d, sc, sm, t):
        ci, gi, mi = t
        comp = (w * (1.0 - sc)) / self.pp[ci][gi]
        mem = (d * (1.0 - sm)) / self.bw[mi]
        return max(comp, mem) + self.t_overhead, comp, mem

    def power(self, t, temp, s):
        leak = self.k1 * temp + self.k2
        dyn = 0.0
        stat = 0.0
        for comp, idx, levels in (("cpu", t[0], self.cpu), ("gpu", t[1], self.gpu),
                                  ("mem", t[2], self.mem)):
            v = self.volt[comp][idx]
            a = self.alpha_max[comp] - (self.alpha_max[comp] - self.alpha_min[comp]) * s
            dyn += a * v * v * float(levels[idx])
            stat += leak * v
        return dyn + stat

    def switch_latency(self, a, b):
        if a == b:
            return 0.0
        return self.matrix[a[1]][b[1]]

    def hz(self, t):
        return (self.cpu[t[0]], self.gpu[t[1]], self.mem[t[2]])


@dataclass
class Op:
    id: str
    kind: str
    w: float
    d: float
    sc: float = 0.0
    sm: float = 0.0
    structured: bool = False


def grid(p: Profile):
    return [(c, g, m) for c in range(len(p.cpu)) for g in range(len(p.gpu))
            for m in range(len(p.mem))]


def optimal(p: Profile, op: Op, temp: float):
    best = None
    best_e = math.inf
    for t in grid(p):
        te = p.exec_time(op.w, op.d, op.sc, op.sm, t)[0]
        e = p.power(t, temp, op.sc) * te
        if best is None or e < best_e or (e == best_e and
                                          (p.gpu[t[1]], p.cpu[t[0]], p.mem[t[2]]) <
                                          (p.gpu[best[1]], p.cpu[best[0]], p.mem[best[2]])):
            best, best_e = t, e
    return best


def similar(p: Profile, a, b, eps):
    for x, y in zip(p.hz(a), p.hz(b)):
        if abs(float(x) - float(y)) > eps * float(y):
            return False
    return True


def tmax(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def block_time(p, ops, t):
    total = 0.0
    for op in ops:
        total += p.exec_time(op.w, op.d, op.sc, op.sm, t)[0]
    return total


def partition(p: Profile, ops, optima, n_factor, eps=0.05):
    """Returns a list of (first, last_exclusive, triplet).

    The running block time is extended incrementally while the block triplet
    is unchanged; the additions happen in the same order as a from-scratch
    sum, so the result is identical.
    """
    threshold = n_factor * p.t_switch_base
    blocks = []
    first = 0
    cur = optima[0]
    t_est = p.exec_time(ops[0].w, ops[0].d, ops[0].sc, ops[0].sm, cur)[0]
    for i in range(1, len(ops)):
        if t_est < threshold or similar(p, optima[i], cur, eps):
            nxt = tmax(cur, optima[i])
            if nxt == cur:
                t_est += p.exec_time(ops[i].w, ops[i].d, ops[i].sc, ops[i].sm, cur)[0]
            else:
                cur = nxt
                t_est = block_time(p, ops[first:i + 1], cur)
        else:
            blocks.append((first, i, cur))
            first, cur = i, optima[i]
            t_est = p.exec_time(ops[i].w, ops[i].d, ops[i].sc, ops[i].sm, cur)[0]
    blocks.append((first, len(ops), cur))
    return blocks


def coordinate(p: Profile, ops, t):
    work = 0.0
    byts = 0.0
    for op in ops:
        work += op.w * (1.0 - op.sc)
        byts += op.d * (1.0 - op.sm)

    def terms(x):
        return work / p.pp[x[0]][x[1]], byts / p.bw[x[2]]

    c, m = terms(t)
    t_plan = block_time(p, ops, t)
    if m >= c:
        base = (t[0], t[1], len(p.mem) - 1)
        for g in range(len(p.gpu)):
            cand = (t[0], g, len(p.mem) - 1)
            cc, mm = terms(cand)
            if cc <= mm and block_time(p, ops, cand) <= t_plan:
                return cand
        return (t[0], len(p.gpu) - 1, len(p.mem) - 1)
    for mi in range(len(p.mem)):
        cand = (t[0], t[1], mi)
        cc, mm = terms(cand)
        if mm <= cc and block_time(p, ops, cand) <= t_plan:
            return cand
    return t


def residual(lat, dur, lead):
    overlap = dur if lead is None else min(lead, dur)
    return max(0.0, lat - overlap)


def executed_blocks(p, ops, optima, n_factor):
    out = []
    for first, last, t in partition(p, ops, optima, n_factor):
        bo = ops[first:last]
        ct = coordinate(p, bo, t)
        out.append((first, last, ct, block_time(p, bo, ct)))
    return out


def transitions(p, blocks):
    return [(p.switch_latency(blocks[i][2], blocks[i + 1][2]), blocks[i][3])
            for i in range(len(blocks) - 1)]


def stall_total(trans, lead):
    return sum(residual(lat, dur, lead) for lat, dur in trans)


def solve_lead(trans, target):
    """Smallest lead whose total residual stall is <= target (bisection)."""
    lo, hi = 0.0, max([lat for lat, _ in trans] + [0.0])
    if stall_total(trans, hi) > target:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if stall_total(trans, mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def energy(p, ops, blocks, lead, temp=25.0, boost=True):
    """Energy of a sparse policy run at constant temperature."""
    e = 0.0
    for b, (first, last, t, dur) in enumerate(blocks):
        if b > 0:
            prev = blocks[b - 1]
            lat = p.switch_latency(prev[2], t)
            stall = residual(lat, prev[3], lead)
            e += p.power(prev[2], temp, 0.0) * stall
        boost_left = min(p.t_prefill, dur) if boost else 0.0
        boosted = (len(p.cpu) - 1, t[1], t[2])
        for op in ops[first:last]:
            te = p.exec_time(op.w, op.d, op.sc, op.sm, t)[0]
            x = min(boost_left, te)
            e += p.power(boosted, temp, op.sc) * x + p.power(t, temp, op.sc) * (te - x)
            boost_left -= x
    return e


def op_level_total(p, optima):
    return sum(p.switch_latency(optima[i], optima[i + 1]) for i in range(len(optima) - 1))
