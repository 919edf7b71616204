"""Problem definition for reconfigurable multi-part flow lines.

A scenario consists of NS serial workstations separated by NS-1 finite
buffers, a pool of TNM identical movable resources, and one task list per
product variant with precedence and station-eligibility constraints.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

SCHEMA_VERSION = 1

# Seed for the one-time draw of reference-case task times and precedence.
_REFERENCE_SEED = 731

# Variant column prefixes used in feature tables and reports: first two
# mirror the usual part-1/part-2 naming, further variants get P3, P4, ...
VARIANT_PREFIXES = ("A", "E")


def variant_prefix(index: int) -> str:
    if index < len(VARIANT_PREFIXES):
        return VARIANT_PREFIXES[index]
    return f"P{index + 1}"


class StructuralError(ValueError):
    """Configuration and instance shapes do not line up."""


@dataclass(frozen=True)
class Task:
    id: str
    nominal_time: float

    def __post_init__(self):
        if self.nominal_time <= 0:
            raise ValueError(f"task {self.id}: nominal_time must be > 0")


@dataclass(frozen=True)
class Variant:
    """One product type: tasks, precedence matrix and eligibility matrix.

    precedence[i][r] is 1 when task i must be done at the same station or
    earlier than task r.  tech_req[j][i] is 1 when station j can host task i.
    """

    id: str
    tasks: tuple[Task, ...]
    precedence: tuple[tuple[int, ...], ...]
    tech_req: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "precedence", _freeze_matrix(self.precedence))
        object.__setattr__(self, "tech_req", _freeze_matrix(self.tech_req))

    @property
    def num_tasks(self) -> int:
        return len(self.tasks)

    @cached_property
    def total_time(self) -> float:
        return float(sum(t.nominal_time for t in self.tasks))

    @cached_property
    def direct_predecessors(self) -> tuple[tuple[int, ...], ...]:
        n = self.num_tasks
        return tuple(
            tuple(i for i in range(n) if self.precedence[i][r]) for r in range(n)
        )

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Kahn order with lowest-index tie break; raises on cycles."""
        n = self.num_tasks
        indeg = [len(self.direct_predecessors[r]) for r in range(n)]
        ready = sorted(i for i in range(n) if indeg[i] == 0)
        order: list[int] = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for r in range(n):
                if self.precedence[i][r]:
                    indeg[r] -= 1
                    if indeg[r] == 0:
                        # keep ready sorted for determinism
                        lo, hi = 0, len(ready)
                        while lo < hi:
                            mid = (lo + hi) // 2
                            if ready[mid] < r:
                                lo = mid + 1
                            else:
                                hi = mid
                        ready.insert(lo, r)
        if len(order) != n:
            raise ValueError(f"variant {self.id}: precedence graph has a cycle")
        return tuple(order)

    @cached_property
    def transitive_predecessors(self) -> tuple[frozenset[int], ...]:
        n = self.num_tasks
        preds: list[set[int]] = [set() for _ in range(n)]
        for r in self.topological_order:
            for i in self.direct_predecessors[r]:
                preds[r].add(i)
                preds[r] |= preds[i]
        return tuple(frozenset(p) for p in preds)

    @cached_property
    def precedence_pairs(self) -> tuple[tuple[int, int], ...]:
        n = self.num_tasks
        return tuple(
            (i, r) for i in range(n) for r in range(n) if self.precedence[i][r]
        )

    @cached_property
    def transitive_successors(self) -> tuple[frozenset[int], ...]:
        n = self.num_tasks
        succs: list[set[int]] = [set() for _ in range(n)]
        for i in range(n):
            for r in self.transitive_predecessors[i]:
                succs[r].add(i)
        return tuple(frozenset(s) for s in succs)

    def has_cycle(self) -> bool:
        try:
            self.topological_order
        except ValueError:
            return True
        return False

    def flexibility(self, task_index: int) -> int:
        """Number of stations eligible for the task."""
        return sum(row[task_index] for row in self.tech_req)


@dataclass(frozen=True)
class StochasticParams:
    availability: float = 1.0
    mttr: float = 0.0
    task_time_cv: float = 0.0
    setup_time: float = 0.0
    handling_time: float = 0.0

    def __post_init__(self):
        if not 0 < self.availability <= 1:
            raise ValueError("availability must be in (0, 1]")
        if self.mttr < 0 or self.task_time_cv < 0:
            raise ValueError("mttr and task_time_cv must be >= 0")

    @property
    def mtbf(self) -> float:
        """Mean busy time between failures implied by availability and MTTR."""
        if self.availability >= 1.0 or self.mttr <= 0:
            return float("inf")
        return self.mttr * self.availability / (1.0 - self.availability)


@dataclass(frozen=True)
class ProductionMix:
    proportions: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "proportions", tuple(float(p) for p in self.proportions))
        if any(p < 0 for p in self.proportions):
            raise ValueError("mix proportions must be >= 0")
        if abs(sum(self.proportions) - 1.0) > 1e-9:
            raise ValueError("mix proportions must sum to 1")


@dataclass(frozen=True)
class ProblemInstance:
    num_stations: int
    variants: tuple[Variant, ...]
    total_resources: int
    min_resources_per_ws: int
    max_resources_per_ws: int
    buffer_min: int
    buffer_max: int
    buffer_unit: int
    stochastic: StochasticParams
    mix: ProductionMix

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))

    @property
    def num_buffers(self) -> int:
        return self.num_stations - 1

    @property
    def num_variants(self) -> int:
        return len(self.variants)

    @property
    def chromosome_length(self) -> int:
        return self.num_stations + sum(v.num_tasks for v in self.variants) + self.num_buffers

    @property
    def death_penalty_objectives(self) -> tuple[float, int]:
        """Worst-case objective pair assigned to undecodable solutions."""
        return 0.0, self.buffer_max * self.num_buffers

    @cached_property
    def content_hash(self) -> str:
        payload = json.dumps(instance_to_dict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class RmsConfiguration:
    """A decoded, fully specified line configuration."""

    resources_per_ws: tuple[int, ...]
    assignment: tuple[tuple[int, ...], ...]  # per variant, task -> 0-based station
    buffers: tuple[int, ...]
    station_workload: tuple[tuple[float, ...], ...]  # per variant, per station seconds

    def __post_init__(self):
        object.__setattr__(self, "resources_per_ws", tuple(self.resources_per_ws))
        object.__setattr__(self, "assignment", _freeze_matrix(self.assignment))
        object.__setattr__(self, "buffers", tuple(self.buffers))
        object.__setattr__(
            self, "station_workload", tuple(tuple(float(x) for x in row) for row in self.station_workload)
        )

    @property
    def total_buffer_capacity(self) -> int:
        return sum(self.buffers)


def _freeze_matrix(rows) -> tuple[tuple, ...]:
    return tuple(tuple(row) for row in rows)


def compute_station_workload(inst: ProblemInstance, assignment) -> tuple[tuple[float, ...], ...]:
    out = []
    for v, variant in enumerate(inst.variants):
        loads = [0.0] * inst.num_stations
        for i, task in enumerate(variant.tasks):
            loads[assignment[v][i]] += task.nominal_time
        out.append(tuple(loads))
    return tuple(out)


# ---------------------------------------------------------------------------
# validation


def validate_instance(inst: ProblemInstance) -> list[str]:
    """Check every instance invariant; returns human-readable violations."""
    out: list[str] = []
    ns = inst.num_stations
    if ns < 1:
        out.append("NS must be >= 1")
        return out
    if inst.num_buffers != ns - 1:
        out.append(f"NB must equal NS-1 (got NS={ns})")
    if inst.min_resources_per_ws < 1:
        out.append("NMWS_min must be >= 1")
    if inst.max_resources_per_ws < inst.min_resources_per_ws:
        out.append("NMWS_max < NMWS_min")
    if inst.total_resources < inst.min_resources_per_ws * ns:
        out.append(
            f"TNM < NMWS_min*NS ({inst.total_resources} < {inst.min_resources_per_ws * ns}): "
            "no feasible resource assignment"
        )
    if inst.total_resources > inst.max_resources_per_ws * ns:
        out.append(
            f"TNM > NMWS_max*NS ({inst.total_resources} > {inst.max_resources_per_ws * ns}): "
            "no feasible resource assignment"
        )
    if inst.buffer_min < 0:
        out.append("B_min must be >= 0")
    if inst.buffer_max < inst.buffer_min:
        out.append("B_max < B_min")
    if inst.buffer_unit < 1:
        out.append("B_unit must be >= 1")
    if len(inst.mix.proportions) != inst.num_variants:
        out.append("mix length does not match number of variants")

    for v, variant in enumerate(inst.variants):
        n = variant.num_tasks
        if n == 0:
            out.append(f"variant {variant.id}: no tasks")
            continue
        if len(variant.precedence) != n or any(len(r) != n for r in variant.precedence):
            out.append(f"variant {variant.id}: precedence matrix is not {n}x{n}")
            continue
        if len(variant.tech_req) != ns or any(len(r) != n for r in variant.tech_req):
            out.append(f"variant {variant.id}: tech_req matrix is not {ns}x{n}")
            continue
        if variant.has_cycle():
            out.append(f"variant {variant.id}: precedence cycle")
            continue
        for i in range(n):
            if variant.flexibility(i) < 1:
                out.append(f"variant {variant.id}: task {variant.tasks[i].id} has no eligible station")
        if out and out[-1].startswith(f"variant {variant.id}"):
            continue
        # Joint feasibility: greedily place each task at the earliest eligible
        # station no earlier than all its predecessors.  Success proves a
        # feasible assignment exists.
        earliest = [0] * n
        for i in variant.topological_order:
            lo = max((earliest[p] for p in variant.direct_predecessors[i]), default=0)
            station = next((j for j in range(lo, ns) if variant.tech_req[j][i]), None)
            if station is None:
                out.append(
                    f"variant {variant.id}: task {variant.tasks[i].id} cannot be placed "
                    "(precedence and tech_req jointly infeasible)"
                )
                break
            earliest[i] = station
    return out


def check_configuration(inst: ProblemInstance, cfg: RmsConfiguration) -> list[str]:
    """Feasibility oracle for decoded configurations (Eqs. 3-9 of the model)."""
    ns = inst.num_stations
    if len(cfg.resources_per_ws) != ns:
        raise StructuralError("resources_per_ws length != NS")
    if len(cfg.buffers) != inst.num_buffers:
        raise StructuralError("buffers length != NB")
    if len(cfg.assignment) != inst.num_variants:
        raise StructuralError("assignment variant count mismatch")
    for v, variant in enumerate(inst.variants):
        if len(cfg.assignment[v]) != variant.num_tasks:
            raise StructuralError(f"assignment length mismatch for variant {variant.id}")

    out: list[str] = []
    if sum(cfg.resources_per_ws) != inst.total_resources:
        out.append(f"Eq. 5: resources sum {sum(cfg.resources_per_ws)} != TNM {inst.total_resources}")
    for j, count in enumerate(cfg.resources_per_ws):
        if count < inst.min_resources_per_ws:
            out.append(f"Eq. 7: WS{j + 1} has {count} < NMWS_min")
        if count > inst.max_resources_per_ws:
            out.append(f"Eq. 8: WS{j + 1} has {count} > NMWS_max")
    for v, variant in enumerate(inst.variants):
        for i, station in enumerate(cfg.assignment[v]):
            if not 0 <= station < ns:
                out.append(f"Eq. 3: variant {variant.id} task {variant.tasks[i].id} station out of range")
                continue
            if not variant.tech_req[station][i]:
                out.append(
                    f"Eq. 6: variant {variant.id} task {variant.tasks[i].id} "
                    f"assigned to WS{station + 1} with TR=0"
                )
        for i, r in variant.precedence_pairs:
            if cfg.assignment[v][i] > cfg.assignment[v][r]:
                out.append(
                    f"Eq. 4: variant {variant.id} task {variant.tasks[i].id} is after "
                    f"its successor {variant.tasks[r].id}"
                )
    for k, cap in enumerate(cfg.buffers):
        if not inst.buffer_min <= cap <= inst.buffer_max:
            out.append(f"Eq. 9: Bu{k + 1}={cap} outside [{inst.buffer_min}, {inst.buffer_max}]")
    return out


# ---------------------------------------------------------------------------
# reference case

# Published aggregates of the truck-line case: two parts, 29 and 24 tasks,
# totals 336.38 s and 293.38 s.  The per-task split and the precedence
# structure below are synthetic stand-ins drawn once with a fixed seed.
_REFERENCE_TASKS = {"p1": (29, 336.38), "p2": (24, 293.38)}


def _synthetic_times(rng: np.random.Generator, count: int, total: float) -> list[float]:
    raw = rng.uniform(0.5, 1.5, size=count)
    times = [round(float(x), 2) for x in raw * (total / raw.sum())]
    times[-1] = total - sum(times[:-1])
    return times


def _synthetic_precedence(rng: np.random.Generator, count: int) -> list[list[int]]:
    """Layered DAG with parallel branches, order strength around 0.2-0.35 as
    is typical for assembly precedence graphs."""
    mat = [[0] * count for _ in range(count)]
    layer_of = [0] * count
    layer, used = 0, 0
    while used < count:
        width = int(rng.integers(4, 8))
        for i in range(used, min(count, used + width)):
            layer_of[i] = layer
        used += width
        layer += 1
    for r in range(count):
        if layer_of[r] == 0:
            continue
        prev = [i for i in range(count) if layer_of[i] == layer_of[r] - 1]
        mat[prev[int(rng.integers(0, len(prev)))]][r] = 1
        if rng.random() < 0.35:
            mat[prev[int(rng.integers(0, len(prev)))]][r] = 1
    return mat


def _banded_tech_req(ns: int, prec: list[list[int]]) -> list[list[int]]:
    """Eligibility bands by assembly depth: the first half of the build needs
    the early-line fixtures (first stations), the second half the finishing
    gear (last stations); the middle station hosts everything.  Bands are
    monotone along the precedence order, so banding never conflicts with it.
    """
    n = len(prec)
    depth = [0] * n
    for r in range(n):  # tasks are indexed in topological layers
        for i in range(n):
            if prec[i][r]:
                depth[r] = max(depth[r], depth[i] + 1)
    dmax = max(depth) or 1
    mid = ns // 2
    tr = [[0] * n for _ in range(ns)]
    for i in range(n):
        lo, hi = (0, mid) if depth[i] / dmax < 0.5 else (mid, ns - 1)
        for j in range(lo, hi + 1):
            tr[j][i] = 1
    return tr


def reference_case(
    total_resources: int = 7,
    mix: Sequence[float] = (0.3, 0.7),
    tech_req: dict[str, Sequence[Sequence[int]]] | None = None,
    restricted: bool = False,
) -> ProblemInstance:
    """Paper-shaped two-part line: 3 stations, up to 5 resources each.

    All stations are eligible for every task by default; ``restricted=True``
    applies banded technological requirements, and ``tech_req`` overrides the
    matrix per variant id.
    """
    ns = 3
    rng = np.random.default_rng(_REFERENCE_SEED)
    variants = []
    for vid, (count, total) in _REFERENCE_TASKS.items():
        times = _synthetic_times(rng, count, total)
        prec = _synthetic_precedence(rng, count)
        tr = tech_req.get(vid) if tech_req else None
        if tr is None:
            tr = _banded_tech_req(ns, prec) if restricted else [[1] * count for _ in range(ns)]
        variants.append(
            Variant(
                id=vid,
                tasks=tuple(Task(f"{vid}t{i + 1}", t) for i, t in enumerate(times)),
                precedence=prec,
                tech_req=tr,
            )
        )
    inst = ProblemInstance(
        num_stations=ns,
        variants=tuple(variants),
        total_resources=total_resources,
        min_resources_per_ws=1,
        max_resources_per_ws=5,
        buffer_min=1,
        buffer_max=40,
        buffer_unit=1,
        stochastic=StochasticParams(availability=0.85, mttr=600.0, handling_time=5.0),
        mix=ProductionMix(tuple(mix)),
    )
    violations = validate_instance(inst)
    if violations:
        raise ValueError(f"reference case invalid: {violations}")
    return inst


# ---------------------------------------------------------------------------
# case generator


@dataclass(frozen=True)
class CaseGenSpec:
    num_stations: int
    num_variants: int
    tasks_per_variant: int
    total_resources: int
    min_resources_per_ws: int = 1
    max_resources_per_ws: int = 5
    buffer_min: int = 1
    buffer_max: int = 20
    buffer_unit: int = 1
    mean_task_time: float = 60.0
    precedence_density: float = 0.3
    eligibility: float = 1.0  # probability of a non-forced TR entry being 1
    proportions: tuple[float, ...] | None = None
    stochastic: StochasticParams = field(default_factory=StochasticParams)


def generate_case(spec: CaseGenSpec, seed: int) -> ProblemInstance:
    """Random but always-valid instance, deterministic per seed."""
    ns = spec.num_stations
    if spec.total_resources < spec.min_resources_per_ws * ns:
        raise ValueError("spec infeasible: TNM < NMWS_min*NS")
    if spec.total_resources > spec.max_resources_per_ws * ns:
        raise ValueError("spec infeasible: TNM > NMWS_max*NS")
    rng = np.random.default_rng([seed, 0x5CE2])
    variants = []
    for v in range(spec.num_variants):
        n = spec.tasks_per_variant
        times = [round(float(t), 2) for t in rng.uniform(0.5, 1.5, size=n) * spec.mean_task_time]
        prec = [[0] * n for _ in range(n)]
        for i in range(n):
            for r in range(i + 1, n):
                if rng.random() < spec.precedence_density / max(1, r - i):
                    prec[i][r] = 1
        # Anchor a monotone feasible assignment so precedence and eligibility
        # can never conflict, then sprinkle extra eligibility at random.
        variant = Variant(
            id=f"v{v + 1}",
            tasks=tuple(Task(f"v{v + 1}t{i + 1}", t) for i, t in enumerate(times)),
            precedence=prec,
            tech_req=[[1] * n for _ in range(ns)],
        )
        anchors = [0] * n
        for i in variant.topological_order:
            lo = max((anchors[p] for p in variant.direct_predecessors[i]), default=0)
            anchors[i] = int(rng.integers(lo, ns))
        tr = [[0] * n for _ in range(ns)]
        for i in range(n):
            for j in range(ns):
                if j == anchors[i] or rng.random() < spec.eligibility:
                    tr[j][i] = 1
        variants.append(
            Variant(id=variant.id, tasks=variant.tasks, precedence=prec, tech_req=tr)
        )
    if spec.proportions is not None:
        mix = ProductionMix(spec.proportions)
    else:
        mix = ProductionMix((1.0 / spec.num_variants,) * spec.num_variants)
    inst = ProblemInstance(
        num_stations=ns,
        variants=tuple(variants),
        total_resources=spec.total_resources,
        min_resources_per_ws=spec.min_resources_per_ws,
        max_resources_per_ws=spec.max_resources_per_ws,
        buffer_min=spec.buffer_min,
        buffer_max=spec.buffer_max,
        buffer_unit=spec.buffer_unit,
        stochastic=spec.stochastic,
        mix=mix,
    )
    violations = validate_instance(inst)
    if violations:
        raise ValueError(f"generated case invalid: {violations}")
    return inst


# ---------------------------------------------------------------------------
# scenario files


def instance_to_dict(inst: ProblemInstance) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "scenario",
        "num_stations": inst.num_stations,
        "total_resources": inst.total_resources,
        "min_resources_per_ws": inst.min_resources_per_ws,
        "max_resources_per_ws": inst.max_resources_per_ws,
        "buffer_min": inst.buffer_min,
        "buffer_max": inst.buffer_max,
        "buffer_unit": inst.buffer_unit,
        "stochastic": {
            "availability": inst.stochastic.availability,
            "mttr": inst.stochastic.mttr,
            "task_time_cv": inst.stochastic.task_time_cv,
            "setup_time": inst.stochastic.setup_time,
            "handling_time": inst.stochastic.handling_time,
        },
        "mix": list(inst.mix.proportions),
        "variants": [
            {
                "id": v.id,
                "tasks": [{"id": t.id, "nominal_time": t.nominal_time} for t in v.tasks],
                "precedence": [list(row) for row in v.precedence],
                "tech_req": [list(row) for row in v.tech_req],
            }
            for v in inst.variants
        ],
    }


def instance_from_dict(data: dict) -> ProblemInstance:
    if data.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported scenario schema: {data.get('schema')!r}")
    variants = tuple(
        Variant(
            id=v["id"],
            tasks=tuple(Task(t["id"], t["nominal_time"]) for t in v["tasks"]),
            precedence=v["precedence"],
            tech_req=v["tech_req"],
        )
        for v in data["variants"]
    )
    s = data["stochastic"]
    return ProblemInstance(
        num_stations=data["num_stations"],
        variants=variants,
        total_resources=data["total_resources"],
        min_resources_per_ws=data["min_resources_per_ws"],
        max_resources_per_ws=data["max_resources_per_ws"],
        buffer_min=data["buffer_min"],
        buffer_max=data["buffer_max"],
        buffer_unit=data["buffer_unit"],
        stochastic=StochasticParams(
            availability=s["availability"],
            mttr=s["mttr"],
            task_time_cv=s["task_time_cv"],
            setup_time=s["setup_time"],
            handling_time=s["handling_time"],
        ),
        mix=ProductionMix(tuple(data["mix"])),
    )


def save_scenario(inst: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2, sort_keys=True) + "\n")


def load_scenario(path: str | Path) -> ProblemInstance:
    inst = instance_from_dict(json.loads(Path(path).read_text()))
    violations = validate_instance(inst)
    if violations:
        raise ValueError("invalid scenario: " + "; ".join(violations))
    return inst
