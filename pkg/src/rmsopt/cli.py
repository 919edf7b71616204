"""Batch front door: scenario tooling, optimization runs, mining, reports.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 runtime
failure.  Every command with --seed produces byte-identical output files
across runs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import dataset as ds
from . import mining, moea
from .model import (
    CaseGenSpec,
    ProductionMix,
    StochasticParams,
    generate_case,
    instance_from_dict,
    load_scenario,
    reference_case,
    save_scenario,
    validate_instance,
)
from .simulation import SimulationConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_mix(text: str) -> tuple[float, ...]:
    parts = [float(x) for x in text.split("/")]
    total = sum(parts)
    if total <= 0:
        raise ValidationFailure(f"mix {text!r} sums to zero")
    return tuple(p / total for p in parts)


def _sim_from_args(args) -> SimulationConfig:
    return SimulationConfig(
        horizon=args.horizon,
        warmup=args.warmup,
        replications=args.replications,
        seed=args.seed,
        task_time_distribution=args.task_time_distribution,
        variant_stream=args.variant_stream,
    )


def _params_from_args(args) -> moea.AlgorithmParams:
    return moea.AlgorithmParams(
        population_size=args.population,
        max_generations=args.generations,
        crossover_prob=args.crossover_prob,
        mutation_prob=args.mutation_prob,
        tournament_size=args.tournament,
        seed=args.seed,
    )


def _add_run_flags(p):
    p.add_argument("--population", "--np", type=int, default=50)
    p.add_argument("--generations", "-g", type=int, default=100)
    p.add_argument("--crossover-prob", type=float, default=0.9)
    p.add_argument("--mutation-prob", type=float, default=0.1)
    p.add_argument("--tournament", type=int, default=2)
    p.add_argument("--horizon", type=float, default=360_000.0, help="simulated seconds")
    p.add_argument("--warmup", type=float, default=36_000.0)
    p.add_argument("--replications", type=int, default=3)
    p.add_argument("--task-time-distribution", default="deterministic",
                   choices=["deterministic", "lognormal", "triangular"])
    p.add_argument("--variant-stream", default="interleave", choices=["interleave", "random"])


def build_parser() -> _Parser:
    parser = _Parser(prog="rmsopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("validate", parents=[common], help="check a scenario file")
    p.add_argument("scenario")

    p = sub.add_parser("gen-case", parents=[common], help="generate a synthetic scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--stations", type=int, default=3)
    p.add_argument("--variants", type=int, default=2)
    p.add_argument("--tasks", type=int, default=8)
    p.add_argument("--resources", type=int, default=6)
    p.add_argument("--min-per-ws", type=int, default=1)
    p.add_argument("--max-per-ws", type=int, default=5)
    p.add_argument("--buffer-min", type=int, default=1)
    p.add_argument("--buffer-max", type=int, default=20)
    p.add_argument("--mix", type=str, default=None, help="e.g. 30/70")
    p.add_argument("--eligibility", type=float, default=1.0)
    p.add_argument("--availability", type=float, default=1.0)
    p.add_argument("--mttr", type=float, default=0.0)
    p.add_argument("--reference", action="store_true",
                   help="emit the built-in paper-shaped case instead")

    p = sub.add_parser("optimize", parents=[common], help="run the optimizer on a scenario")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--baseline", action="store_true", help="use the naive decoder")
    _add_run_flags(p)

    p = sub.add_parser("sweep", parents=[common],
                       help="optimize a grid of operator counts and mixes")
    p.add_argument("scenario")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--operators", required=True, help="comma list, e.g. 7,8,9")
    p.add_argument("--mix", required=True, help="comma list, e.g. 30/70,70/30")
    _add_run_flags(p)

    p = sub.add_parser("mine", parents=[common], help="mine decision rules from datasets")
    p.add_argument("datasets", nargs="+")
    p.add_argument("--out", required=True, help="output prefix (.json/.txt written)")
    p.add_argument("--group-by", default="operators",
                   choices=["operators", "proportion", "both"])
    p.add_argument("--max-level", type=int, default=5)
    p.add_argument("--min-sig", type=float, default=0.90)
    p.add_argument("--max-candidates", type=int, default=1_000_000)

    p = sub.add_parser("hv", parents=[common], help="hypervolume report and curves")
    p.add_argument("datasets", nargs="+")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--ref", default="1.1,1.1")
    p.add_argument("--no-normalize", dest="normalize", action="store_false")

    p = sub.add_parser("rule-match", parents=[common],
                       help="apply mined rules to a dataset")
    p.add_argument("dataset")
    p.add_argument("rules")
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", parents=[common], help="start the exploration API server")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--datasets", nargs="+", required=True)
    p.add_argument("--workers", type=int, default=2)
    p.add_argument("--static", default=None, help="directory with the UI bundle")
    return parser


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    try:
        data = json.loads(Path(args.scenario).read_text())
        inst = instance_from_dict(data)
    except Exception as exc:
        print(f"scenario unreadable: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    violations = validate_instance(inst)
    if violations:
        for v in violations:
            print(f"violation: {v}")
        return EXIT_VALIDATION
    print(f"ok: {inst.num_stations} stations, {inst.num_variants} variants, "
          f"{inst.total_resources} resources")
    return EXIT_OK


def cmd_gen_case(args) -> int:
    if args.reference:
        inst = reference_case()
    else:
        mix = _parse_mix(args.mix) if args.mix else None
        spec = CaseGenSpec(
            num_stations=args.stations,
            num_variants=args.variants,
            tasks_per_variant=args.tasks,
            total_resources=args.resources,
            min_resources_per_ws=args.min_per_ws,
            max_resources_per_ws=args.max_per_ws,
            buffer_min=args.buffer_min,
            buffer_max=args.buffer_max,
            eligibility=args.eligibility,
            proportions=mix,
            stochastic=StochasticParams(availability=args.availability, mttr=args.mttr),
        )
        inst = generate_case(spec, args.seed)
    save_scenario(inst, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _load_scenario_checked(path: str):
    try:
        return load_scenario(path)
    except (ValueError, OSError) as exc:
        raise ValidationFailure(str(exc)) from exc


def _run_one(inst, params, sim, baseline: bool):
    runner = moea.run_baseline_smo if baseline else moea.run_smo
    return runner(inst, params, sim)


def cmd_optimize(args) -> int:
    inst = _load_scenario_checked(args.scenario)
    archive = _run_one(inst, _params_from_args(args), _sim_from_args(args), args.baseline)
    ds.write_dataset(archive, args.out)
    print(ds.format_summary_tables([ds.front_summary(archive)]))
    print(f"wrote {args.out}")
    return EXIT_OK


def _sweep_job(work):
    inst, params, sim, baseline = work
    return _run_one(inst, params, sim, baseline)


def cmd_sweep(args) -> int:
    base = _load_scenario_checked(args.scenario)
    operators = [int(x) for x in args.operators.split(",")]
    mixes = [_parse_mix(m) for m in args.mix.split(",")]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = _params_from_args(args)
    sim = _sim_from_args(args)

    combos = []
    for ops in operators:
        for mix in mixes:
            inst = dataclasses.replace(
                base, total_resources=ops, mix=ProductionMix(mix)
            )
            if validate_instance(inst):
                print(f"warning: skipping infeasible combination NO={ops} mix={mix}",
                      file=sys.stderr)
                continue
            combos.append((ops, mix, inst))
    if not combos:
        raise ValidationFailure("no feasible (operators, mix) combination")

    work = [(inst, params, sim, False) for _, _, inst in combos]
    if args.jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            archives = list(pool.map(_sweep_job, work))
    else:
        archives = [_sweep_job(w) for w in work]

    summaries = []
    for (ops, mix, _), archive in zip(combos, archives):
        mix_tag = "-".join(str(int(round(p * 100))) for p in mix)
        path = out_dir / f"dataset_no{ops}_mix{mix_tag}.json"
        ds.write_dataset(archive, path)
        summaries.append(ds.front_summary(archive))
        print(f"wrote {path}")

    report = ds.format_summary_tables(summaries)
    # marginal throughput gained per extra operator, per mix
    lines = [report, "Marginal max-THP per added operator"]
    for mix in mixes:
        tag = "/".join(str(int(round(p * 100))) for p in mix)
        rows = sorted(
            (s for s in summaries if s["mix"] == tag), key=lambda s: s["operators"]
        )
        for a, b in zip(rows, rows[1:]):
            gain = (b["thp"][1] - a["thp"][1]) / (b["operators"] - a["operators"])
            lines.append(f"  mix {tag}: NO {a['operators']} -> {b['operators']}: "
                         f"{gain:+.2f} JPH/operator")
    text = "\n".join(lines) + "\n"
    (out_dir / "sweep_report.txt").write_text(text)
    print(text)
    return EXIT_OK


def _load_datasets(paths):
    try:
        return [ds.load_dataset(p) for p in paths]
    except (ValueError, OSError) as exc:
        raise ValidationFailure(str(exc)) from exc


def cmd_mine(args) -> int:
    datasets = _load_datasets(args.datasets)
    archives = [d.archive for d in datasets]
    groupings = ["operators", "proportion"] if args.group_by == "both" else [args.group_by]
    reports = []
    try:
        for grouping in groupings:
            reports.extend(
                mining.mine_scenario_groups(
                    archives, grouping,
                    max_level=args.max_level,
                    min_significance=args.min_sig,
                    max_candidates=args.max_candidates,
                )
            )
    except ValueError as exc:
        raise ValidationFailure(
            f"{exc} (the selected and unselected sets must both be non-empty; "
            "check that the datasets contain dominated solutions)"
        ) from exc
    text = mining.format_report(reports)
    ds.write_rules(reports, f"{args.out}.json", args.max_level, args.min_sig)
    Path(f"{args.out}.txt").write_text(text)
    print(text)
    print(f"wrote {args.out}.json and {args.out}.txt")
    return EXIT_OK


def cmd_hv(args) -> int:
    datasets = _load_datasets(args.datasets)
    ref = tuple(float(x) for x in args.ref.split(","))
    if len(ref) != 2:
        raise ValidationFailure("--ref must be two comma-separated numbers")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.normalize:
        ideal, nadir = moea.minimized_bounds(
            [
                [ind.objectives for ind in d.archive.solutions.values()]
                for d in datasets
            ]
        )
    else:
        ideal = nadir = None
    lines = ["dataset,algorithm,final_hv"]
    for path, d in zip(args.datasets, datasets):
        curve = moea.hypervolume_curve(d.archive, ref, ideal, nadir)
        stem = Path(path).stem
        csv = "generation,hv\n" + "\n".join(f"{g},{hv!r}" for g, hv in enumerate(curve))
        (out_dir / f"{stem}_hv.csv").write_text(csv + "\n")
        lines.append(f"{stem},{d.archive.algorithm},{curve[-1]!r}")
    report = "\n".join(lines) + "\n"
    (out_dir / "hv_summary.csv").write_text(report)
    print(report)
    return EXIT_OK


def cmd_rule_match(args) -> int:
    dataset = _load_datasets([args.dataset])[0]
    reports = ds.load_rules(args.rules)
    archive = dataset.archive
    table = mining.FeatureTable(
        mining.feature_columns(archive.instance),
        *mining._archive_rows(archive, set(archive.final_front)),
    )
    for rep in reports:
        for ri in rep.interactions:
            for rule in ri.rules:
                if rule.variable not in table.index:
                    raise ValidationFailure(f"unknown variable {rule.variable!r}")
    result = {"schema": 1, "kind": "rule-match", "dataset": Path(args.dataset).stem,
              "groups": []}
    for rep in reports:
        group = {"label": rep.label, "interactions": []}
        for ri in rep.interactions:
            matches = [
                all(rule.matches(row[table.index[rule.variable]]) for rule in ri.rules)
                for row in table.rows
            ]
            sel_matches = sum(m for m, s in zip(matches, table.selected) if s)
            group["interactions"].append(
                {
                    "rule": ri.text(),
                    "matched": sum(matches),
                    "total": len(matches),
                    "matched_selected": sel_matches,
                    "selected_total": table.num_selected,
                    "per_solution": [bool(m) for m in matches],
                }
            )
        result["groups"].append(group)
    Path(args.out).write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    for group in result["groups"]:
        for ri in group["interactions"]:
            print(f"[{group['label']}] {ri['rule']}: {ri['matched']}/{ri['total']} match "
                  f"({ri['matched_selected']}/{ri['selected_total']} of selected)")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.datasets, workers=args.workers, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "validate": cmd_validate,
    "gen-case": cmd_gen_case,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "mine": cmd_mine,
    "hv": cmd_hv,
    "rule-match": cmd_rule_match,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ValidationFailure as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
