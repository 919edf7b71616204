"""Priority-key representation and the repair-based encode/decode pipeline.

A solution is a flat vector of keys in (0,1): one key per station, one per
task (grouped by variant), one per buffer.  Encoding turns keys into resource
counts, task processing order and buffer capacities; decoding assigns tasks
to stations through a cumulative-eligibility lookup that keeps precedence and
technological constraints satisfied by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ProblemInstance, RmsConfiguration, compute_station_workload

KEY_EPS = 1e-9


class InfeasibleDecodeError(Exception):
    """A task ran out of eligible stations while decoding."""


@dataclass(frozen=True)
class Chromosome:
    keys: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "keys", tuple(float(k) for k in self.keys))

    def __len__(self) -> int:
        return len(self.keys)


@dataclass(frozen=True)
class EncodedSettings:
    resources_per_ws: tuple[int, ...]
    sorted_task_order: tuple[tuple[int, ...], ...]  # per variant
    buffers: tuple[int, ...]


def random_chromosome(inst: ProblemInstance, seed) -> Chromosome:
    rng = np.random.default_rng(seed)
    keys = np.clip(rng.random(inst.chromosome_length), KEY_EPS, 1.0 - KEY_EPS)
    return Chromosome(tuple(keys.tolist()))


def split_keys(chrom: Chromosome, inst: ProblemInstance):
    """(station keys, per-variant task keys, buffer keys)."""
    if len(chrom) != inst.chromosome_length:
        raise ValueError(
            f"chromosome length {len(chrom)} != expected {inst.chromosome_length}"
        )
    ns = inst.num_stations
    station = chrom.keys[:ns]
    task, pos = [], ns
    for v in inst.variants:
        task.append(chrom.keys[pos : pos + v.num_tasks])
        pos += v.num_tasks
    return station, task, chrom.keys[pos:]


def _repair_totals(values, keys, target, low, high, step, descending):
    """Round-robin add/remove over entries sorted by key until the total is
    back inside the target; entries pinned at a bound are skipped."""
    values = list(values)
    order = sorted(range(len(values)), key=lambda i: (-keys[i], i) if descending else (keys[i], i))
    total = sum(values)
    while (total > target) if descending else (total < target):
        for i in order:
            if descending and values[i] - step >= low:
                values[i] -= step
                total -= step
            elif not descending and values[i] + step <= high:
                values[i] += step
                total += step
            if descending and total <= target:
                break
            if not descending and total >= target:
                break
    return values


def encode(chrom: Chromosome, inst: ProblemInstance) -> EncodedSettings:
    """Keys -> resource counts per WS, task order per variant, buffer sizes."""
    station_keys, task_keys, buffer_keys = split_keys(chrom, inst)
    lo, hi = inst.min_resources_per_ws, inst.max_resources_per_ws

    resources = [int(np.ceil(lo + k * (hi - lo))) for k in station_keys]
    if sum(resources) > inst.total_resources:
        resources = _repair_totals(
            resources, station_keys, inst.total_resources, lo, hi, 1, descending=True
        )
    elif sum(resources) < inst.total_resources:
        resources = _repair_totals(
            resources, station_keys, inst.total_resources, lo, hi, 1, descending=False
        )

    order = []
    for v, variant in enumerate(inst.variants):
        keys = task_keys[v]
        ranked = sorted(
            range(variant.num_tasks),
            key=lambda i: (variant.flexibility(i), -keys[i], i),
        )
        order.append(tuple(ranked))

    bmin, bmax = inst.buffer_min, inst.buffer_max
    buffers = [int(np.ceil(bmin + k * (bmax - bmin))) for k in buffer_keys]
    nb = inst.num_buffers
    if sum(buffers) > bmax * nb:
        buffers = _repair_totals(buffers, buffer_keys, bmax * nb, bmin, bmax, inst.buffer_unit, True)
    elif sum(buffers) < bmin * nb:
        buffers = _repair_totals(buffers, buffer_keys, bmin * nb, bmin, bmax, inst.buffer_unit, False)

    return EncodedSettings(tuple(resources), tuple(order), tuple(buffers))


def decode(settings: EncodedSettings, chrom: Chromosome, inst: ProblemInstance) -> RmsConfiguration:
    """Assign every task to a station via its priority key.

    Tasks are visited in encoded order; each one lands on the k-th of its
    currently eligible stations where k is the key's quantile.  Assigning a
    task clips the station window of all its transitive predecessors and
    successors, so precedence can never be violated afterwards.
    """
    _, task_keys, _ = split_keys(chrom, inst)
    ns = inst.num_stations
    assignment = []
    for v, variant in enumerate(inst.variants):
        keys = task_keys[v]
        n = variant.num_tasks
        lo = [0] * n
        hi = [ns - 1] * n
        stations = [-1] * n
        for i in settings.sorted_task_order[v]:
            allowed = [j for j in range(lo[i], hi[i] + 1) if variant.tech_req[j][i]]
            if not allowed:
                raise InfeasibleDecodeError(
                    f"variant {variant.id} task {variant.tasks[i].id} has no eligible station left"
                )
            # cumulative share of eligible stations; integer counts keep the
            # final entry at exactly 1.0
            count = 0
            station = allowed[-1]
            for j in allowed:
                count += 1
                if count / len(allowed) >= keys[i]:
                    station = j
                    break
            stations[i] = station
            for p in variant.transitive_predecessors[i]:
                if hi[p] > station:
                    hi[p] = station
            for s in variant.transitive_successors[i]:
                if lo[s] < station:
                    lo[s] = station
        assignment.append(tuple(stations))
    assignment = tuple(assignment)
    return RmsConfiguration(
        resources_per_ws=settings.resources_per_ws,
        assignment=assignment,
        buffers=settings.buffers,
        station_workload=compute_station_workload(inst, assignment),
    )


def decode_chromosome(chrom: Chromosome, inst: ProblemInstance) -> RmsConfiguration:
    """encode + decode in one step."""
    return decode(encode(chrom, inst), chrom, inst)
