"""HTTP facade over datasets: browse solutions, mine rules, what-if runs.

Read-only with respect to dataset files.  Mining requests above a row
threshold run on a worker pool and are polled via /api/jobs/{id}; results are
cached by input hash so repeated requests return identical bodies.
"""

from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .dataset import load_dataset
from .mining import (
    Rule,
    build_group_table,
    feature_columns,
    feature_row,
    mine,
)
from .model import RmsConfiguration, check_configuration, compute_station_workload
from .simulation import SimulationConfig, simulate


class MineRequest(BaseModel):
    dataset_ids: list[str]
    selected_solution_ids: list[str]
    max_level: int = 5
    min_significance: float = 0.9


class WhatIfRequest(BaseModel):
    dataset_id: str
    configuration: dict
    sim_overrides: dict = {}


class RuleMatchRequest(BaseModel):
    dataset_id: str
    interactions: list[dict]


@dataclass
class _Loaded:
    id: str
    dataset: object
    solution_order: list[int] = field(default_factory=list)

    @property
    def archive(self):
        return self.dataset.archive


@dataclass
class SessionStore:
    datasets: dict[str, _Loaded] = field(default_factory=dict)
    mine_cache: dict[str, list] = field(default_factory=dict)
    jobs: dict[str, dict] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _mix_text(inst) -> str:
    return "/".join(str(int(round(p * 100))) for p in inst.mix.proportions)


def _interaction_payload(interactions) -> list[dict]:
    return [
        {
            "rules": [
                {"variable": r.variable, "relation": r.relation, "threshold": r.threshold}
                for r in ri.rules
            ],
            "text": ri.text(),
            "significance": ri.significance,
            "unsignificance": ri.unsignificance,
            "level": ri.level,
        }
        for ri in interactions
    ]


def create_app(dataset_paths, workers: int = 2, static_dir: str | None = None,
               job_row_threshold: int = 4000,
               whatif_seconds_threshold: float = 4_000_000.0) -> FastAPI:
    app = FastAPI(title="rmsopt explorer API")
    store = SessionStore()
    executor = ThreadPoolExecutor(max_workers=max(1, workers))

    def submit_job(job_id: str, work):
        with store.lock:
            if job_id in store.jobs:
                return
            store.jobs[job_id] = {"status": "pending"}

        def run():
            try:
                result = work()
                with store.lock:
                    store.jobs[job_id] = {"status": "done", **result}
            except HTTPException as exc:
                with store.lock:
                    store.jobs[job_id] = {"status": "error", "detail": exc.detail}
            except Exception as exc:  # noqa: BLE001
                with store.lock:
                    store.jobs[job_id] = {"status": "error", "detail": str(exc)}

        executor.submit(run)

    used = set()
    for path in dataset_paths:
        stem = Path(path).stem
        ds_id = stem
        n = 1
        while ds_id in used:
            n += 1
            ds_id = f"{stem}-{n}"
        used.add(ds_id)
        loaded = _Loaded(id=ds_id, dataset=load_dataset(path))
        loaded.solution_order = [
            sid for sid in sorted(loaded.archive.solutions)
            if loaded.archive.solutions[sid].configuration is not None
        ]
        store.datasets[ds_id] = loaded

    def get_loaded(ds_id: str) -> _Loaded:
        if ds_id not in store.datasets:
            raise HTTPException(status_code=404, detail={"error": "unknown dataset", "id": ds_id})
        return store.datasets[ds_id]

    @app.get("/api/datasets")
    def list_datasets():
        out = []
        for ds_id in sorted(store.datasets):
            loaded = store.datasets[ds_id]
            inst = loaded.archive.instance
            out.append(
                {
                    "id": ds_id,
                    "algorithm": loaded.archive.algorithm,
                    "operators": inst.total_resources,
                    "mix": _mix_text(inst),
                    "solutions": len(loaded.solution_order),
                    "final_front": len(loaded.archive.final_front),
                    "generations": len(loaded.archive.generations),
                }
            )
        return out

    @app.get("/api/datasets/{ds_id}/solutions")
    def solutions(ds_id: str, offset: int = 0, limit: int | None = None):
        loaded = get_loaded(ds_id)
        archive = loaded.archive
        columns = feature_columns(archive.instance)
        ids = loaded.solution_order[offset:]
        if limit is not None:
            ids = ids[:limit]
        front = set(archive.final_front)
        records = []
        for sid in ids:
            ind = archive.solutions[sid]
            rec = {
                "uid": f"{ds_id}:{sid}",
                "id": sid,
                "thp": ind.objectives[0],
                "tbc": int(ind.objectives[1]),
                "thp_stderr": ind.thp_stderr,
                "sim_seed": ind.sim_seed,
                "rank": ind.rank,
                "in_final_front": sid in front,
                "born_gen": ind.born_gen,
            }
            rec.update(zip((c.name for c in columns),
                           feature_row(archive.instance, ind.configuration)))
            records.append(rec)
        return {
            "dataset": ds_id,
            "columns": [{"name": c.name, "kind": c.kind} for c in columns],
            "total": len(loaded.solution_order),
            "offset": offset,
            "solutions": records,
        }

    def _run_mine(req: MineRequest) -> list[dict]:
        loads = [get_loaded(i) for i in req.dataset_ids]
        selected = set(req.selected_solution_ids)
        per_archive = []
        known = set()
        for loaded in loads:
            ids = {
                sid for sid in loaded.archive.solutions
                if f"{loaded.id}:{sid}" in selected
            }
            known |= {f"{loaded.id}:{sid}" for sid in loaded.archive.solutions}
            per_archive.append(ids)
        unknown = selected - known
        if unknown:
            raise HTTPException(status_code=422,
                                detail={"error": "unknown solution ids",
                                        "ids": sorted(unknown)[:5]})
        try:
            table = build_group_table([l.archive for l in loads], per_archive)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail={"error": str(exc)})
        return _interaction_payload(
            mine(table, req.max_level, req.min_significance)
        )

    @app.post("/api/mine")
    def mine_endpoint(req: MineRequest):
        if not req.selected_solution_ids:
            raise HTTPException(status_code=422, detail={"error": "selection is empty"})
        if not req.dataset_ids:
            raise HTTPException(status_code=422, detail={"error": "no datasets given"})
        key = hashlib.sha256(
            json.dumps(
                [sorted(req.dataset_ids), sorted(req.selected_solution_ids),
                 req.max_level, req.min_significance],
                sort_keys=True,
            ).encode()
        ).hexdigest()
        with store.lock:
            if key in store.mine_cache:
                return {"status": "done", "cached": True,
                        "interactions": store.mine_cache[key]}
        total_rows = sum(
            len(get_loaded(i).solution_order) for i in req.dataset_ids
        )
        if total_rows <= job_row_threshold:
            result = _run_mine(req)
            with store.lock:
                store.mine_cache[key] = result
            return {"status": "done", "cached": False, "interactions": result}
        job_id = key[:16]

        def work():
            result = _run_mine(req)
            with store.lock:
                store.mine_cache[key] = result
            return {"interactions": result}

        submit_job(job_id, work)
        return {"status": "pending", "job_id": job_id}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        with store.lock:
            if job_id not in store.jobs:
                raise HTTPException(status_code=404, detail={"error": "unknown job", "id": job_id})
            return dict(store.jobs[job_id])

    @app.post("/api/whatif")
    def whatif(req: WhatIfRequest):
        loaded = get_loaded(req.dataset_id)
        inst = loaded.archive.instance
        body = req.configuration
        try:
            assignment = tuple(tuple(row) for row in body["assignment"])
            cfg = RmsConfiguration(
                resources_per_ws=tuple(body["resources_per_ws"]),
                assignment=assignment,
                buffers=tuple(body["buffers"]),
                station_workload=compute_station_workload(inst, assignment),
            )
            violations = check_configuration(inst, cfg)
        except (KeyError, ValueError, IndexError) as exc:
            raise HTTPException(status_code=422, detail={"error": f"malformed configuration: {exc}"})
        if violations:
            raise HTTPException(status_code=422, detail={"violations": violations})
        base = loaded.archive.sim
        over = req.sim_overrides
        sim = SimulationConfig(
            horizon=over.get("horizon", base.horizon),
            warmup=over.get("warmup", base.warmup),
            replications=over.get("replications", base.replications),
            seed=over.get("seed", base.seed),
            task_time_distribution=base.task_time_distribution,
            variant_stream=base.variant_stream,
        )

        def run():
            result = simulate(cfg, inst, sim)
            return {
                "result": {
                    "thp": result.thp,
                    "thp_stderr": result.thp_stderr,
                    "tbc": result.tbc,
                    "per_replication": list(result.per_replication),
                }
            }

        if sim.horizon * sim.replications <= whatif_seconds_threshold:
            return run()["result"]
        job_id = hashlib.sha256(
            json.dumps([req.dataset_id, req.configuration, req.sim_overrides],
                       sort_keys=True).encode()
        ).hexdigest()[:16]
        submit_job(job_id, run)
        return {"status": "pending", "job_id": job_id}

    @app.post("/api/rulematch")
    def rulematch(req: RuleMatchRequest):
        loaded = get_loaded(req.dataset_id)
        archive = loaded.archive
        columns = feature_columns(archive.instance)
        index = {c.name: i for i, c in enumerate(columns)}
        try:
            interactions = [
                [Rule(r["variable"], r["relation"], r["threshold"]) for r in ri["rules"]]
                for ri in req.interactions
            ]
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=422, detail={"error": f"malformed rules: {exc}"})
        for rules in interactions:
            for rule in rules:
                if rule.variable not in index:
                    raise HTTPException(
                        status_code=422,
                        detail={"error": "unknown variable", "variable": rule.variable},
                    )
        uids, matrix = [], []
        for sid in loaded.solution_order:
            ind = archive.solutions[sid]
            row = feature_row(archive.instance, ind.configuration)
            uids.append(f"{loaded.id}:{sid}")
            matrix.append(
                [all(rule.matches(row[index[rule.variable]]) for rule in rules)
                 for rules in interactions]
            )
        return {"solutions": uids, "matrix": matrix}

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
