"""Customized NSGA-II over the priority-key genome, plus hypervolume metrics.

Two runners share one loop: `run_smo` uses the flexibility-aware
encode/decode pipeline, `run_baseline_smo` swaps in a naive key-rounding
decoder with greedy repair and serves as the comparison subject for
convergence studies.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .genome import (
    KEY_EPS,
    Chromosome,
    InfeasibleDecodeError,
    decode_chromosome,
    split_keys,
)
from .model import ProblemInstance, RmsConfiguration, compute_station_workload
from .simulation import (
    SimulationConfig,
    death_penalty,
    simulate,
    solution_seed,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlgorithmParams:
    population_size: int = 50
    max_generations: int = 500
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    tournament_size: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 4")
        if not (0 <= self.crossover_prob <= 1 and 0 <= self.mutation_prob <= 1):
            raise ValueError("probabilities must be in [0, 1]")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


@dataclass
class Individual:
    id: int
    chromosome: Chromosome
    objectives: tuple[float, float]  # (thp to maximize, tbc to minimize)
    thp_stderr: float
    sim_seed: int
    configuration: RmsConfiguration | None
    born_gen: int
    rank: int | None = None
    crowding: float = 0.0


@dataclass
class RunArchive:
    instance: ProblemInstance
    params: AlgorithmParams
    sim: SimulationConfig
    algorithm: str  # "smo" or "baseline"
    solutions: dict[int, Individual] = field(default_factory=dict)
    generations: list[list[int]] = field(default_factory=list)
    final_front: list[int] = field(default_factory=list)

    def generation_individuals(self, g: int) -> list[Individual]:
        return [self.solutions[i] for i in self.generations[g]]

    def final_front_individuals(self) -> list[Individual]:
        return [self.solutions[i] for i in self.final_front]


# ---------------------------------------------------------------------------
# NSGA-II primitives


def dominates(a, b) -> bool:
    """a no worse in both objectives (thp up, tbc down), better in one."""
    return a[0] >= b[0] and a[1] <= b[1] and (a[0] > b[0] or a[1] < b[1])


def fast_nondominated_sort(pop: list[Individual]) -> list[list[Individual]]:
    n = len(pop)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = [0] * n
    for p in range(n):
        for q in range(p + 1, n):
            if dominates(pop[p].objectives, pop[q].objectives):
                dominated_by[p].append(q)
                domination_count[q] += 1
            elif dominates(pop[q].objectives, pop[p].objectives):
                dominated_by[q].append(p)
                domination_count[p] += 1
    fronts: list[list[int]] = [[p for p in range(n) if domination_count[p] == 0]]
    i = 0
    while fronts[i]:
        nxt = []
        for p in fronts[i]:
            pop[p].rank = i + 1
            for q in dominated_by[p]:
                domination_count[q] -= 1
                if domination_count[q] == 0:
                    nxt.append(q)
        i += 1
        fronts.append(sorted(nxt))
    fronts.pop()
    return [[pop[p] for p in front] for front in fronts]


def crowding_distance(front: list[Individual]) -> list[float]:
    n = len(front)
    dist = [0.0] * n
    for obj in range(2):
        order = sorted(range(n), key=lambda i: front[i].objectives[obj])
        lo = front[order[0]].objectives[obj]
        hi = front[order[-1]].objectives[obj]
        dist[order[0]] = dist[order[-1]] = float("inf")
        span = hi - lo
        if span <= 0:
            continue
        for k in range(1, n - 1):
            gap = front[order[k + 1]].objectives[obj] - front[order[k - 1]].objectives[obj]
            dist[order[k]] += gap / span
    for i, d in enumerate(dist):
        front[i].crowding = d
    return dist


def tournament_select(pop: list[Individual], k: int, rng) -> Individual:
    """Best of k draws without replacement by (rank, crowding); draw order
    breaks exact ties."""
    idx = rng.choice(len(pop), size=min(k, len(pop)), replace=False)
    best = pop[int(idx[0])]
    for i in idx[1:]:
        cand = pop[int(i)]
        if cand.rank < best.rank or (cand.rank == best.rank and cand.crowding > best.crowding):
            best = cand
    return best


# ---------------------------------------------------------------------------
# genetic operators


def weight_mapping_crossover(p1: Chromosome, p2: Chromosome, rng):
    """Swap the priority-rank patterns of one random interval.

    Each child keeps its own parent's key values inside the interval but
    rearranged so that their ascending ranks follow the other parent's
    pattern (rank 1 = smallest key).  Outside the interval keys are copied.
    """
    if len(p1) != len(p2):
        raise ValueError("parents must have equal length")
    cuts = rng.integers(0, len(p1), size=2)
    a, b = int(min(cuts)), int(max(cuts))
    seg1 = list(p1.keys[a : b + 1])
    seg2 = list(p2.keys[a : b + 1])

    def rearranged(own, pattern):
        sorted_own = sorted(own)
        order = sorted(range(len(pattern)), key=lambda i: (pattern[i], i))
        ranks = [0] * len(pattern)
        for r, i in enumerate(order):
            ranks[i] = r
        return [sorted_own[ranks[i]] for i in range(len(pattern))]

    c1 = p1.keys[:a] + tuple(rearranged(seg1, seg2)) + p1.keys[b + 1 :]
    c2 = p2.keys[:a] + tuple(rearranged(seg2, seg1)) + p2.keys[b + 1 :]
    return Chromosome(c1), Chromosome(c2)


def swap_mutation(c: Chromosome, rng) -> Chromosome:
    n = len(c)
    if n < 2:
        raise ValueError("chromosome too short to mutate")
    i = int(rng.integers(0, n))
    j = int(rng.integers(0, n - 1))
    if j >= i:
        j += 1
    keys = list(c.keys)
    keys[i], keys[j] = keys[j], keys[i]
    return Chromosome(tuple(keys))


# ---------------------------------------------------------------------------
# baseline decoder (naive rounding + greedy repair)


def baseline_decode(chrom: Chromosome, inst: ProblemInstance) -> RmsConfiguration:
    """Round keys straight to stations/counts, then repair violations locally.

    Stands in for an off-the-shelf optimizer without the problem-specific
    decoder: no flexibility ordering, no eligibility windows.  The repair
    scans constraint violations in index order and pushes the offending task
    forward, the way a generic bolt-on repair operator would.
    """
    station_keys, task_keys, buffer_keys = split_keys(chrom, inst)
    ns = inst.num_stations
    lo, hi = inst.min_resources_per_ws, inst.max_resources_per_ws
    res = [min(hi, max(lo, round(lo + k * (hi - lo)))) for k in station_keys]
    while sum(res) > inst.total_resources:
        for j in range(ns):
            if res[j] > lo:
                res[j] -= 1
                break
    while sum(res) < inst.total_resources:
        for j in range(ns):
            if res[j] < hi:
                res[j] += 1
                break
    assignment = []
    for v, variant in enumerate(inst.variants):
        keys = task_keys[v]
        n = variant.num_tasks
        stations = [int(keys[i] * ns) for i in range(n)]
        for i in range(n):
            if not variant.tech_req[stations[i]][i]:
                eligible = [j for j in range(ns) if variant.tech_req[j][i]]
                stations[i] = min(eligible, key=lambda j: (abs(j - stations[i]), j))
        # pull the predecessor of each violated pair down until a fixpoint
        for _ in range(n * ns):
            dirty = False
            for i, r in variant.precedence_pairs:
                if stations[i] > stations[r]:
                    target = next(
                        (j for j in range(stations[r], -1, -1) if variant.tech_req[j][i]),
                        None,
                    )
                    if target is None:
                        raise InfeasibleDecodeError(
                            f"variant {variant.id} task {variant.tasks[i].id}: repair failed"
                        )
                    stations[i] = target
                    dirty = True
            if not dirty:
                break
        assignment.append(tuple(stations))
    assignment = tuple(assignment)
    # buffers share the main encoding so both algorithms reach the same TBC
    # values; the contrast under study is the station/task decode
    bmin, bmax = inst.buffer_min, inst.buffer_max
    buffers = tuple(int(np.ceil(bmin + k * (bmax - bmin))) for k in buffer_keys)
    return RmsConfiguration(
        resources_per_ws=tuple(res),
        assignment=assignment,
        buffers=buffers,
        station_workload=compute_station_workload(inst, assignment),
    )


# ---------------------------------------------------------------------------
# optimization loop


def _evaluate(chrom: Chromosome, inst, sim, decode_fn):
    seed = solution_seed(sim.seed, chrom)
    try:
        cfg = decode_fn(chrom, inst)
    except InfeasibleDecodeError:
        return None, death_penalty(inst), seed
    per_solution = SimulationConfig(
        horizon=sim.horizon,
        warmup=sim.warmup,
        replications=sim.replications,
        seed=seed,
        task_time_distribution=sim.task_time_distribution,
        variant_stream=sim.variant_stream,
    )
    return cfg, simulate(cfg, inst, per_solution), seed


def _run(inst: ProblemInstance, params: AlgorithmParams, sim: SimulationConfig,
         decode_fn, algorithm: str) -> RunArchive:
    rng = np.random.default_rng(params.seed)
    archive = RunArchive(instance=inst, params=params, sim=sim, algorithm=algorithm)
    next_id = 0

    def make_individual(chrom: Chromosome, gen: int) -> Individual:
        nonlocal next_id
        cfg, result, seed = _evaluate(chrom, inst, sim, decode_fn)
        ind = Individual(
            id=next_id,
            chromosome=chrom,
            objectives=(result.thp, float(result.tbc)),
            thp_stderr=result.thp_stderr,
            sim_seed=seed,
            configuration=cfg,
            born_gen=gen,
        )
        next_id += 1
        archive.solutions[ind.id] = ind
        return ind

    def sort_and_crowd(pop: list[Individual]) -> list[list[Individual]]:
        fronts = fast_nondominated_sort(pop)
        for front in fronts:
            crowding_distance(front)
        return fronts

    length = inst.chromosome_length
    pop = [
        make_individual(
            Chromosome(tuple(np.clip(rng.random(length), KEY_EPS, 1.0 - KEY_EPS).tolist())),
            gen=0,
        )
        for _ in range(params.population_size)
    ]
    sort_and_crowd(pop)
    archive.generations.append([ind.id for ind in pop])

    for gen in range(1, params.max_generations + 1):
        offspring: list[Chromosome] = []
        while len(offspring) < params.population_size:
            p1 = tournament_select(pop, params.tournament_size, rng)
            p2 = tournament_select(pop, params.tournament_size, rng)
            if rng.random() < params.crossover_prob:
                c1, c2 = weight_mapping_crossover(p1.chromosome, p2.chromosome, rng)
            else:
                c1, c2 = p1.chromosome, p2.chromosome
            for child in (c1, c2):
                if rng.random() < params.mutation_prob:
                    child = swap_mutation(child, rng)
                offspring.append(child)
        merged = pop + [make_individual(c, gen) for c in offspring[: params.population_size]]
        fronts = sort_and_crowd(merged)
        pop = []
        for front in fronts:
            if len(pop) + len(front) <= params.population_size:
                pop.extend(front)
            else:
                ordered = sorted(front, key=lambda ind: -ind.crowding)
                pop.extend(ordered[: params.population_size - len(pop)])
                break
        archive.generations.append([ind.id for ind in pop])

    archive.final_front = [ind.id for ind in pop if ind.rank == 1]
    return archive


def run_smo(inst: ProblemInstance, params: AlgorithmParams, sim: SimulationConfig) -> RunArchive:
    """The customized simulation-based NSGA-II with the repair decoder."""
    return _run(inst, params, sim, decode_chromosome, "smo")


def run_baseline_smo(inst: ProblemInstance, params: AlgorithmParams,
                     sim: SimulationConfig) -> RunArchive:
    """Same loop with the naive decoder; comparison subject for HV studies."""
    return _run(inst, params, sim, baseline_decode, "baseline")


# ---------------------------------------------------------------------------
# hypervolume


def hypervolume(points, ref, ideal=None, nadir=None) -> float:
    """Exact 2-D hypervolume of minimized points against `ref`.

    Optional ideal/nadir rescale points to [0,1] before the sweep; points not
    strictly dominating the reference are discarded (and counted in a
    warning).
    """
    pts = [tuple(p) for p in points]
    if ideal is not None and nadir is not None:
        pts = [
            tuple(
                (p[d] - ideal[d]) / (nadir[d] - ideal[d]) if nadir[d] > ideal[d] else 0.0
                for d in range(2)
            )
            for p in pts
        ]
    conforming = [p for p in pts if p[0] < ref[0] and p[1] < ref[1]]
    if len(conforming) < len(pts):
        log.warning("hypervolume: discarded %d points outside the reference box",
                    len(pts) - len(conforming))
    if not conforming:
        return 0.0
    conforming.sort()
    frontier = []
    best_y = float("inf")
    for x, y in conforming:
        if y < best_y:
            frontier.append((x, y))
            best_y = y
    total = 0.0
    for i, (x, y) in enumerate(frontier):
        next_x = frontier[i + 1][0] if i + 1 < len(frontier) else ref[0]
        total += (next_x - x) * (ref[1] - y)
    return total


def minimized_bounds(objective_sets):
    """(ideal, nadir) in minimized space over (thp, tbc) pairs."""
    f1 = [-thp for objs in objective_sets for thp, _ in objs]
    f2 = [tbc for objs in objective_sets for _, tbc in objs]
    return (min(f1), min(f2)), (max(f1), max(f2))


def objective_hypervolume(objectives, ref=(1.1, 1.1), ideal=None, nadir=None) -> float:
    """Hypervolume of (thp, tbc) pairs: thp negated, then normalized."""
    pts = [(-thp, tbc) for thp, tbc in objectives]
    if ideal is None or nadir is None:
        ideal, nadir = minimized_bounds([objectives])
    return hypervolume(pts, ref, ideal, nadir)


def hypervolume_curve(archive: RunArchive, ref=(1.1, 1.1), ideal=None, nadir=None) -> list[float]:
    """Per-generation HV of each snapshot's non-dominated subset."""
    if ideal is None or nadir is None:
        ideal, nadir = minimized_bounds(
            [[ind.objectives for ind in archive.generation_individuals(g)]
             for g in range(len(archive.generations))]
        )
    out = []
    for g in range(len(archive.generations)):
        objs = [ind.objectives for ind in archive.generation_individuals(g)]
        out.append(objective_hypervolume(objs, ref, ideal, nadir))
    return out
