"""Self-contained dataset files for optimization runs.

A dataset embeds the scenario, every evaluated solution with its decoded
configuration and objectives, per-generation membership and the hypervolume
series, so downstream mining and reporting never need the original scenario
file.  Files are canonical JSON: same run, same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .genome import Chromosome
from .mining import GroupReport, Rule, RuleInteraction
from .model import (
    SCHEMA_VERSION,
    ProblemInstance,
    RmsConfiguration,
    check_configuration,
    instance_from_dict,
    instance_to_dict,
)
from .moea import (
    AlgorithmParams,
    Individual,
    RunArchive,
    hypervolume_curve,
)
from .simulation import SimulationConfig


@dataclass
class Dataset:
    archive: RunArchive
    hv_series: list[float]

    @property
    def instance(self) -> ProblemInstance:
        return self.archive.instance


def _config_to_dict(cfg: RmsConfiguration | None):
    if cfg is None:
        return None
    return {
        "resources_per_ws": list(cfg.resources_per_ws),
        "assignment": [list(row) for row in cfg.assignment],
        "buffers": list(cfg.buffers),
        "station_workload": [list(row) for row in cfg.station_workload],
    }


def _config_from_dict(data) -> RmsConfiguration | None:
    if data is None:
        return None
    return RmsConfiguration(
        resources_per_ws=tuple(data["resources_per_ws"]),
        assignment=tuple(tuple(row) for row in data["assignment"]),
        buffers=tuple(data["buffers"]),
        station_workload=tuple(tuple(row) for row in data["station_workload"]),
    )


def dataset_to_dict(ds: Dataset) -> dict:
    archive = ds.archive
    final_pop = set(archive.generations[-1]) if archive.generations else set()
    solutions = []
    for sid in sorted(archive.solutions):
        ind = archive.solutions[sid]
        solutions.append(
            {
                "id": ind.id,
                "chromosome": list(ind.chromosome.keys),
                "configuration": _config_to_dict(ind.configuration),
                "thp": ind.objectives[0],
                "tbc": int(ind.objectives[1]),
                "thp_stderr": ind.thp_stderr,
                "sim_seed": ind.sim_seed,
                "born_gen": ind.born_gen,
                "rank_final": ind.rank if ind.id in final_pop else None,
            }
        )
    p, s = archive.params, archive.sim
    return {
        "schema": SCHEMA_VERSION,
        "kind": "dataset",
        "algorithm": archive.algorithm,
        "instance": instance_to_dict(archive.instance),
        "instance_hash": archive.instance.content_hash,
        "params": {
            "population_size": p.population_size,
            "max_generations": p.max_generations,
            "crossover_prob": p.crossover_prob,
            "mutation_prob": p.mutation_prob,
            "tournament_size": p.tournament_size,
            "seed": p.seed,
        },
        "sim": {
            "horizon": s.horizon,
            "warmup": s.warmup,
            "replications": s.replications,
            "seed": s.seed,
            "task_time_distribution": s.task_time_distribution,
            "variant_stream": s.variant_stream,
        },
        "solutions": solutions,
        "generations": [list(g) for g in archive.generations],
        "final_front": list(archive.final_front),
        "hv_series": list(ds.hv_series),
    }


def dataset_from_dict(data: dict, validate: bool = True) -> Dataset:
    if data.get("schema") != SCHEMA_VERSION or data.get("kind") != "dataset":
        raise ValueError("not a dataset file (schema/kind mismatch)")
    inst = instance_from_dict(data["instance"])
    if data["instance_hash"] != inst.content_hash:
        raise ValueError("instance hash mismatch: dataset corrupted")
    params = AlgorithmParams(**data["params"])
    sim = SimulationConfig(**data["sim"])
    archive = RunArchive(instance=inst, params=params, sim=sim, algorithm=data["algorithm"])
    for rec in data["solutions"]:
        cfg = _config_from_dict(rec["configuration"])
        if validate and cfg is not None:
            violations = check_configuration(inst, cfg)
            if violations:
                raise ValueError(
                    f"solution {rec['id']} fails feasibility on load: {violations[0]}"
                )
        archive.solutions[rec["id"]] = Individual(
            id=rec["id"],
            chromosome=Chromosome(tuple(rec["chromosome"])),
            objectives=(rec["thp"], float(rec["tbc"])),
            thp_stderr=rec["thp_stderr"],
            sim_seed=rec["sim_seed"],
            configuration=cfg,
            born_gen=rec["born_gen"],
            rank=rec["rank_final"],
        )
    archive.generations = [list(g) for g in data["generations"]]
    archive.final_front = list(data["final_front"])
    return Dataset(archive=archive, hv_series=list(data["hv_series"]))


def write_dataset(archive: RunArchive, path: str | Path,
                  hv_series: list[float] | None = None) -> Dataset:
    if hv_series is None:
        hv_series = hypervolume_curve(archive)
    ds = Dataset(archive=archive, hv_series=hv_series)
    Path(path).write_text(json.dumps(dataset_to_dict(ds), indent=2, sort_keys=True) + "\n")
    return ds


def load_dataset(path: str | Path, validate: bool = True) -> Dataset:
    return dataset_from_dict(json.loads(Path(path).read_text()), validate=validate)


# ---------------------------------------------------------------------------
# report tables


def _fmt_range(lo, hi, digits=2):
    if isinstance(lo, float) or isinstance(hi, float):
        a, b = f"{lo:.{digits}f}", f"{hi:.{digits}f}"
    else:
        a, b = str(lo), str(hi)
    return a if a == b else f"{a}-{b}"


def _mix_text(inst: ProblemInstance) -> str:
    return "/".join(str(int(round(p * 100))) for p in inst.mix.proportions)


def front_summary(archive: RunArchive) -> dict:
    """Objective and configuration ranges over the final non-dominated set."""
    front = archive.final_front_individuals()
    inst = archive.instance
    thp = [ind.objectives[0] for ind in front]
    tbc = [int(ind.objectives[1]) for ind in front]
    buffers = [ind.configuration.buffers for ind in front if ind.configuration]
    resources = [ind.configuration.resources_per_ws for ind in front if ind.configuration]
    task_counts = []
    for ind in front:
        if ind.configuration is None:
            continue
        counts = [0] * inst.num_stations
        for row in ind.configuration.assignment:
            for station in row:
                counts[station] += 1
        task_counts.append(counts)
    return {
        "operators": inst.total_resources,
        "mix": _mix_text(inst),
        "front_size": len(front),
        "thp": (min(thp), max(thp)),
        "tbc": (min(tbc), max(tbc)),
        "buffers": [
            (min(b[k] for b in buffers), max(b[k] for b in buffers))
            for k in range(inst.num_buffers)
        ],
        "resources": [
            (min(r[j] for r in resources), max(r[j] for r in resources))
            for j in range(inst.num_stations)
        ],
        "tasks_per_ws": [
            (min(c[j] for c in task_counts), max(c[j] for c in task_counts))
            for j in range(inst.num_stations)
        ],
    }


def format_summary_tables(summaries: list[dict]) -> str:
    """Two text tables: objective ranges, then configuration ranges."""
    if not summaries:
        return "(no results)\n"
    nb = len(summaries[0]["buffers"])
    ns = len(summaries[0]["resources"])
    lines = ["Throughput and buffer capacity ranges"]
    header = f"{'NO':>3} {'Proportion':>11} {'THP':>14}"
    header += "".join(f"{f'Bu_{k + 1}':>8}" for k in range(nb)) + f"{'TBC':>8}"
    lines.append(header)
    for s in summaries:
        row = f"{s['operators']:>3} {s['mix']:>11} {_fmt_range(*s['thp']):>14}"
        row += "".join(f"{_fmt_range(*b):>8}" for b in s["buffers"])
        row += f"{_fmt_range(*s['tbc']):>8}"
        lines.append(row)
    lines.append("")
    lines.append("Configuration and work task allocation")
    header = f"{'NO':>3} {'Proportion':>11}"
    header += "".join(f"{f'WS{j + 1}':>6}" for j in range(ns)) + f"  {'Tasks':<20}"
    lines.append(header)
    for s in summaries:
        row = f"{s['operators']:>3} {s['mix']:>11}"
        row += "".join(f"{_fmt_range(*r):>6}" for r in s["resources"])
        row += "  " + "/".join(_fmt_range(*t) for t in s["tasks_per_ws"])
        lines.append(row)
    lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# rules files


def rules_to_dict(reports: list[GroupReport], max_level: int, min_significance: float) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "rules",
        "params": {"max_level": max_level, "min_significance": min_significance},
        "groups": [
            {
                "label": rep.label,
                "archives": rep.archives,
                "selected": rep.selected,
                "unselected": rep.unselected,
                "interactions": [
                    {
                        "rules": [
                            {
                                "variable": r.variable,
                                "relation": r.relation,
                                "threshold": r.threshold,
                            }
                            for r in ri.rules
                        ],
                        "significance": ri.significance,
                        "unsignificance": ri.unsignificance,
                        "level": ri.level,
                    }
                    for ri in rep.interactions
                ],
            }
            for rep in reports
        ],
    }


def rules_from_dict(data: dict) -> list[GroupReport]:
    if data.get("kind") != "rules":
        raise ValueError("not a rules file")
    reports = []
    for g in data["groups"]:
        interactions = [
            RuleInteraction(
                rules=tuple(
                    Rule(r["variable"], r["relation"], r["threshold"]) for r in ri["rules"]
                ),
                significance=ri["significance"],
                unsignificance=ri["unsignificance"],
            )
            for ri in g["interactions"]
        ]
        reports.append(
            GroupReport(
                label=g["label"],
                archives=g["archives"],
                selected=g["selected"],
                unselected=g["unselected"],
                interactions=interactions,
            )
        )
    return reports


def write_rules(reports: list[GroupReport], path: str | Path,
                max_level: int, min_significance: float) -> None:
    Path(path).write_text(
        json.dumps(rules_to_dict(reports, max_level, min_significance),
                   indent=2, sort_keys=True) + "\n"
    )


def load_rules(path: str | Path) -> list[GroupReport]:
    return rules_from_dict(json.loads(Path(path).read_text()))
