"""Discrete-event simulation of the serial multi-part flow line.

Line layout is source -> WS1 -> Bu1 -> WS2 -> ... -> WS_NS -> sink with
parallel identical resources per station.  Time unit is seconds.  Failures
use an operation-dependent clock: a resource accumulates busy time until an
exponentially distributed budget runs out, repairs take exponential time and
the interrupted part resumes afterwards.  Because a failure never interacts
with the rest of the line, repairs are folded into the service completion
time when service starts, which keeps the event list small.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np

from .genome import Chromosome, InfeasibleDecodeError, decode_chromosome
from .model import ProblemInstance, RmsConfiguration, check_configuration

_SVC_END = 0
_LOAD_END = 1

# resource states
_IDLE, _BUSY, _LOADING, _BLOCKED = 0, 1, 2, 3


@dataclass(frozen=True)
class SimulationConfig:
    horizon: float = 360_000.0  # 100 h
    warmup: float = 36_000.0  # 10 h
    replications: int = 3
    seed: int = 0
    task_time_distribution: str = "deterministic"  # deterministic | lognormal | triangular
    variant_stream: str = "interleave"  # interleave | random

    def __post_init__(self):
        if self.warmup >= self.horizon:
            raise ValueError("warmup must be strictly less than horizon")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.task_time_distribution not in ("deterministic", "lognormal", "triangular"):
            raise ValueError(f"unknown task_time_distribution {self.task_time_distribution!r}")
        if self.variant_stream not in ("interleave", "random"):
            raise ValueError(f"unknown variant_stream {self.variant_stream!r}")


@dataclass(frozen=True)
class EvaluationResult:
    thp: float  # jobs per hour, mean over replications
    thp_stderr: float
    tbc: int
    per_replication: tuple[float, ...]
    station_busy_fraction: tuple[float, ...] = ()

    @property
    def objectives(self) -> tuple[float, int]:
        return self.thp, self.tbc


class _InterleaveStream:
    """Largest-remainder interleave realizing the mix with low discrepancy."""

    def __init__(self, proportions):
        self.p = proportions
        self.counts = [0] * len(proportions)
        self.total = 0

    def next(self, rng) -> int:
        best, best_gap = 0, -1.0
        for v, p in enumerate(self.p):
            gap = p * (self.total + 1) - self.counts[v]
            if gap > best_gap + 1e-12:
                best, best_gap = v, gap
        self.counts[best] += 1
        self.total += 1
        return best


class _RandomStream:
    def __init__(self, proportions):
        self.p = np.asarray(proportions)

    def next(self, rng) -> int:
        return int(rng.choice(len(self.p), p=self.p))


def _noise_factory(kind: str, cv: float, rng):
    if cv <= 0 or kind == "deterministic":
        return None
    if kind == "lognormal":
        sigma2 = float(np.log1p(cv * cv))
        mu = -sigma2 / 2.0
        sigma = float(np.sqrt(sigma2))
        return lambda: rng.lognormal(mu, sigma)
    # symmetric triangular around 1 with matching coefficient of variation
    delta = min(1.0, cv * float(np.sqrt(6.0)))
    return lambda: rng.triangular(1.0 - delta, 1.0, 1.0 + delta)


def _run_replication(cfg: RmsConfiguration, inst: ProblemInstance, sim: SimulationConfig,
                     rng, trace: list | None = None):
    ns = inst.num_stations
    counts = cfg.resources_per_ws
    caps = cfg.buffers
    workload = cfg.station_workload
    st = inst.stochastic
    horizon, warmup = sim.horizon, sim.warmup

    noise = _noise_factory(sim.task_time_distribution, st.task_time_cv, rng)
    mtbf = st.mtbf
    failures = mtbf != float("inf")
    handling = st.handling_time
    setup = st.setup_time

    stream = (_RandomStream if sim.variant_stream == "random" else _InterleaveStream)(
        inst.mix.proportions
    )

    heap: list = []
    seq = 0
    state = [[_IDLE] * counts[j] for j in range(ns)]
    in_hand: list[list] = [[None] * counts[j] for j in range(ns)]  # (pid, variant)
    last_variant = [[-1] * counts[j] for j in range(ns)]
    fail_budget = [
        [rng.exponential(mtbf) if failures else 0.0 for _ in range(counts[j])]
        for j in range(ns)
    ]
    available: list[list] = [[] for _ in range(ns - 1)]  # parts ready per buffer
    occupancy = [0] * (ns - 1)  # ready parts + loads in flight
    waiting: list[list[int]] = [[] for _ in range(ns)]  # idle slots per station
    blocked: list[list[int]] = [[] for _ in range(ns - 1)]  # slots holding a done part

    entered = completed = in_window = 0
    busy_time = [0.0] * ns
    next_pid = 0

    def log(t, kind, j, pid):
        trace.append(f"{t:.6f}\t{kind}\t{j + 1}\t{pid}")

    def start_service(t, j, slot, part, extra):
        nonlocal seq
        pid, variant = part
        state[j][slot] = _BUSY
        in_hand[j][slot] = part
        dur = extra
        if setup > 0 and last_variant[j][slot] not in (-1, variant):
            dur += setup
        last_variant[j][slot] = variant
        base = workload[variant][j]
        if noise is not None:
            base *= noise()
        busy_time[j] += base
        if failures:
            remaining = base
            budget = fail_budget[j][slot]
            while budget < remaining:
                remaining -= budget
                dur += rng.exponential(st.mttr)
                budget = rng.exponential(mtbf)
            fail_budget[j][slot] = budget - remaining
        dur += base
        heappush(heap, (t + dur, seq, _SVC_END, j, slot))
        seq += 1
        if trace is not None:
            log(t, "service_start", j, pid)

    def claim_next(t, j, slot):
        nonlocal entered, next_pid
        if j == 0:
            variant = stream.next(rng)
            part = (next_pid, variant)
            next_pid += 1
            entered += 1
            start_service(t, j, slot, part, 0.0)
            return
        k = j - 1
        if available[k]:
            part = available[k].pop(0)
            occupancy[k] -= 1
            if blocked[k]:
                begin_load(t, k, blocked[k].pop(0))
            start_service(t, j, slot, part, handling)
        else:
            state[j][slot] = _IDLE
            in_hand[j][slot] = None
            waiting[j].append(slot)

    def begin_load(t, k, slot):
        nonlocal seq
        occupancy[k] += 1
        assert occupancy[k] <= caps[k], "buffer over capacity"
        state[k][slot] = _LOADING
        if handling > 0:
            heappush(heap, (t + handling, seq, _LOAD_END, k, slot))
            seq += 1
        else:
            finish_load(t, k, slot)

    def finish_load(t, k, slot):
        part = in_hand[k][slot]
        available[k].append(part)
        if trace is not None:
            log(t, "buffer_load", k, part[0])
        in_hand[k][slot] = None
        if waiting[k + 1]:
            claim_next(t, k + 1, waiting[k + 1].pop(0))
        claim_next(t, k, slot)

    def on_service_end(t, j, slot):
        nonlocal completed, in_window
        part = in_hand[j][slot]
        if trace is not None:
            log(t, "service_end", j, part[0])
        if j == ns - 1:
            completed += 1
            if warmup < t <= horizon:
                in_window += 1
            in_hand[j][slot] = None
            claim_next(t, j, slot)
        elif occupancy[j] < caps[j]:
            begin_load(t, j, slot)
        else:
            state[j][slot] = _BLOCKED
            blocked[j].append(slot)

    for j in range(ns):
        for slot in range(counts[j]):
            if j == 0:
                claim_next(0.0, j, slot)
            else:
                state[j][slot] = _IDLE
                waiting[j].append(slot)

    while heap and heap[0][0] <= horizon:
        t, _, kind, j, slot = heappop(heap)
        if kind == _SVC_END:
            on_service_end(t, j, slot)
        else:
            finish_load(t, j, slot)

    in_system = sum(len(a) for a in available) + sum(
        1 for j in range(ns) for slot in range(counts[j]) if in_hand[j][slot] is not None
    )
    assert entered == completed + in_system, "part conservation violated"

    thp = in_window * 3600.0 / (horizon - warmup)
    busy_fraction = tuple(busy_time[j] / (counts[j] * horizon) for j in range(ns))
    return thp, busy_fraction


def simulate(cfg: RmsConfiguration, inst: ProblemInstance, sim: SimulationConfig,
             trace_path=None) -> EvaluationResult:
    """Estimate throughput for a feasible configuration.

    Deterministic per (sim.seed, replication index).  TBC needs no
    simulation: it is the exact sum of the buffer capacities.
    """
    violations = check_configuration(inst, cfg)
    if violations:
        raise ValueError("infeasible configuration: " + "; ".join(violations))
    samples = []
    fractions = []
    trace: list[str] | None = [] if trace_path else None
    for rep in range(sim.replications):
        rng = np.random.default_rng([sim.seed, rep])
        if trace is not None:
            trace.append(f"# replication {rep}")
        thp, busy = _run_replication(cfg, inst, sim, rng, trace)
        samples.append(thp)
        fractions.append(busy)
    if trace_path:
        with open(trace_path, "w") as fh:
            fh.write("\n".join(trace) + "\n")
    arr = np.asarray(samples)
    stderr = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return EvaluationResult(
        thp=float(arr.mean()),
        thp_stderr=stderr,
        tbc=int(sum(cfg.buffers)),
        per_replication=tuple(samples),
        station_busy_fraction=tuple(float(np.mean(col)) for col in zip(*fractions)),
    )


def solution_seed(global_seed: int, chrom: Chromosome) -> int:
    """Stable per-solution stream: identical chromosomes always replay the
    same simulation regardless of their position in the population."""
    h = hashlib.sha256()
    h.update(str(int(global_seed)).encode())
    h.update(np.asarray(chrom.keys, dtype=np.float64).tobytes())
    return int.from_bytes(h.digest()[:8], "big")


def death_penalty(inst: ProblemInstance) -> EvaluationResult:
    thp, tbc = inst.death_penalty_objectives
    return EvaluationResult(thp=thp, thp_stderr=0.0, tbc=tbc, per_replication=())


def evaluate_chromosome(chrom: Chromosome, inst: ProblemInstance, sim: SimulationConfig):
    """(configuration or None, EvaluationResult) for one solution."""
    try:
        cfg = decode_chromosome(chrom, inst)
    except InfeasibleDecodeError:
        return None, death_penalty(inst)
    per_solution = SimulationConfig(
        horizon=sim.horizon,
        warmup=sim.warmup,
        replications=sim.replications,
        seed=solution_seed(sim.seed, chrom),
        task_time_distribution=sim.task_time_distribution,
        variant_stream=sim.variant_stream,
    )
    return cfg, simulate(cfg, inst, per_solution)


def evaluate_population(chroms, inst: ProblemInstance, sim: SimulationConfig,
                        jobs: int = 1) -> list[EvaluationResult]:
    """Element-wise encode -> decode -> simulate; order independent."""
    if jobs > 1 and len(chroms) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(evaluate_chromosome, chroms,
                                  [inst] * len(chroms), [sim] * len(chroms),
                                  chunksize=max(1, len(chroms) // (jobs * 4))))
    else:
        pairs = [evaluate_chromosome(c, inst, sim) for c in chroms]
    return [res for _, res in pairs]
