import pytest
from fastapi.testclient import TestClient

from rmsopt.dataset import write_dataset
from rmsopt.mining import build_feature_table, mine
from rmsopt.moea import AlgorithmParams, run_baseline_smo, run_smo
from rmsopt.server import create_app


@pytest.fixture(scope="module")
def dataset_paths(toy_instance, toy_sim, tmp_path_factory):
    root = tmp_path_factory.mktemp("server_ds")
    paths = []
    for name, runner, seed in (("alpha", run_smo, 0), ("beta", run_baseline_smo, 1)):
        archive = runner(toy_instance, AlgorithmParams(population_size=6,
                                                       max_generations=4, seed=seed), toy_sim)
        path = root / f"{name}.json"
        write_dataset(archive, path)
        paths.append(str(path))
    return paths


@pytest.fixture(scope="module")
def client(dataset_paths):
    app = create_app(dataset_paths, workers=1)
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def archives(dataset_paths):
    from rmsopt.dataset import load_dataset

    return {p.split("/")[-1].removesuffix(".json"): load_dataset(p).archive
            for p in dataset_paths}


class TestDatasetEndpoints:
    def test_summaries(self, client):
        body = client.get("/api/datasets").json()
        assert [d["id"] for d in body] == ["alpha", "beta"]
        assert body[0]["algorithm"] == "smo"
        assert body[1]["algorithm"] == "baseline"
        assert all(d["operators"] == 3 and d["mix"] == "100" for d in body)
        assert all(d["solutions"] > 0 and d["final_front"] > 0 for d in body)

    def test_summaries_stable(self, client):
        assert client.get("/api/datasets").json() == client.get("/api/datasets").json()

    def test_solution_records(self, client, archives):
        body = client.get("/api/datasets/alpha/solutions").json()
        assert body["total"] == len(body["solutions"])
        rec = body["solutions"][0]
        for key in ("uid", "thp", "tbc", "rank", "sim_seed"):
            assert key in rec
        names = [c["name"] for c in body["columns"]]
        assert names == ["A_1", "A_2", "A_3", "A_4", "WS_1", "WS_2", "Bu_1"]
        assert all(name in rec for name in names)

    def test_pagination(self, client):
        body = client.get("/api/datasets/alpha/solutions?offset=2&limit=10").json()
        assert len(body["solutions"]) == 10
        assert body["solutions"][0]["id"] >= 2

    def test_unknown_dataset_404(self, client):
        resp = client.get("/api/datasets/nope/solutions")
        assert resp.status_code == 404
        assert resp.json()["detail"]["id"] == "nope"


class TestMineEndpoint:
    def selection(self, client, ds="alpha"):
        recs = client.get(f"/api/datasets/{ds}/solutions").json()["solutions"]
        return [r["uid"] for r in recs if r["in_final_front"]]

    def test_matches_library_mine(self, client, archives):
        selected = self.selection(client)
        resp = client.post("/api/mine", json={
            "dataset_ids": ["alpha"], "selected_solution_ids": selected,
            "max_level": 2, "min_significance": 0.8,
        })
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "done"
        archive = archives["alpha"]
        table = build_feature_table(archive, set(archive.final_front))
        expected = mine(table, 2, 0.8)
        assert len(body["interactions"]) == len(expected)
        for got, want in zip(body["interactions"], expected):
            assert got["significance"] == want.significance
            assert got["unsignificance"] == want.unsignificance
            assert got["text"] == want.text()

    def test_cache_hit_identical_body(self, client):
        req = {"dataset_ids": ["alpha"], "selected_solution_ids": self.selection(client),
               "max_level": 2, "min_significance": 0.8}
        first = client.post("/api/mine", json=req).json()
        second = client.post("/api/mine", json=req).json()
        assert second["cached"] is True
        assert first["interactions"] == second["interactions"]

    def test_empty_selection_rejected(self, client):
        resp = client.post("/api/mine", json={
            "dataset_ids": ["alpha"], "selected_solution_ids": [],
        })
        assert resp.status_code == 422

    def test_select_everything_rejected(self, client):
        recs = client.get("/api/datasets/alpha/solutions").json()["solutions"]
        resp = client.post("/api/mine", json={
            "dataset_ids": ["alpha"],
            "selected_solution_ids": [r["uid"] for r in recs],
        })
        assert resp.status_code == 422

    def test_unknown_ids_rejected(self, client):
        resp = client.post("/api/mine", json={
            "dataset_ids": ["alpha"], "selected_solution_ids": ["alpha:999999"],
        })
        assert resp.status_code == 422

    def test_cross_dataset_mining(self, client):
        selected = self.selection(client, "alpha") + self.selection(client, "beta")
        resp = client.post("/api/mine", json={
            "dataset_ids": ["alpha", "beta"], "selected_solution_ids": selected,
            "max_level": 1, "min_significance": 0.6,
        })
        assert resp.status_code == 200


class TestJobFlow:
    def test_polled_job_returns_same_results(self, dataset_paths):
        app = create_app(dataset_paths, workers=1, job_row_threshold=0)
        with TestClient(app) as client:
            recs = client.get("/api/datasets/alpha/solutions").json()["solutions"]
            selected = [r["uid"] for r in recs if r["in_final_front"]]
            req = {"dataset_ids": ["alpha"], "selected_solution_ids": selected,
                   "max_level": 2, "min_significance": 0.8}
            resp = client.post("/api/mine", json=req).json()
            assert resp["status"] == "pending"
            job = resp["job_id"]
            import time
            for _ in range(100):
                status = client.get(f"/api/jobs/{job}").json()
                if status["status"] == "done":
                    break
                time.sleep(0.02)
            assert status["status"] == "done"
            # sync app gives bit-identical interactions
            sync = create_app(dataset_paths, workers=1)
            with TestClient(sync) as c2:
                direct = c2.post("/api/mine", json=req).json()
            assert status["interactions"] == direct["interactions"]

    def test_unknown_job_404(self, client):
        assert client.get("/api/jobs/zzz").status_code == 404

    def test_long_whatif_becomes_job(self, dataset_paths):
        app = create_app(dataset_paths, workers=1, whatif_seconds_threshold=0)
        with TestClient(app) as client:
            body = {
                "dataset_id": "alpha",
                "configuration": {"resources_per_ws": [1, 2],
                                  "assignment": [[0, 0, 1, 1]], "buffers": [3]},
            }
            resp = client.post("/api/whatif", json=body).json()
            assert resp["status"] == "pending"
            import time
            for _ in range(100):
                status = client.get(f"/api/jobs/{resp['job_id']}").json()
                if status["status"] == "done":
                    break
                time.sleep(0.02)
            assert status["status"] == "done"
            sync = create_app(dataset_paths, workers=1)
            with TestClient(sync) as c2:
                direct = c2.post("/api/whatif", json=body).json()
            assert status["result"] == direct


class TestWhatIf:
    def test_reproduces_stored_objectives(self, client):
        recs = client.get("/api/datasets/alpha/solutions").json()["solutions"]
        rec = recs[0]
        ns = 2
        resources = [rec[f"WS_{j + 1}"] for j in range(ns)]
        assignment = [[rec[f"A_{i + 1}"] - 1 for i in range(4)]]
        buffers = [rec["Bu_1"]]
        resp = client.post("/api/whatif", json={
            "dataset_id": "alpha",
            "configuration": {"resources_per_ws": resources,
                              "assignment": assignment, "buffers": buffers},
            "sim_overrides": {"seed": rec["sim_seed"]},
        })
        assert resp.status_code == 200
        body = resp.json()
        assert body["thp"] == rec["thp"]
        assert body["tbc"] == rec["tbc"]

    def test_buffer_violation_reported(self, client):
        resp = client.post("/api/whatif", json={
            "dataset_id": "alpha",
            "configuration": {"resources_per_ws": [1, 2],
                              "assignment": [[0, 0, 1, 1]], "buffers": [999]},
        })
        assert resp.status_code == 422
        assert any("Eq. 9" in v for v in resp.json()["detail"]["violations"])

    def test_comparable_estimates(self, client):
        def run(resources, assignment):
            return client.post("/api/whatif", json={
                "dataset_id": "alpha",
                "configuration": {"resources_per_ws": resources,
                                  "assignment": [assignment], "buffers": [3]},
            }).json()

        a = run([1, 2], [0, 0, 0, 1])
        b = run([2, 1], [0, 0, 1, 1])
        assert a["thp"] > 0 and b["thp"] > 0
        assert a["tbc"] == b["tbc"] == 3


class TestRuleMatch:
    def test_matrix_aligns_with_solutions(self, client, archives):
        recs = client.get("/api/datasets/alpha/solutions").json()["solutions"]
        selected = [r["uid"] for r in recs if r["in_final_front"]]
        mined = client.post("/api/mine", json={
            "dataset_ids": ["alpha"], "selected_solution_ids": selected,
            "max_level": 1, "min_significance": 1.0,
        }).json()["interactions"]
        assert mined
        resp = client.post("/api/rulematch", json={
            "dataset_id": "alpha",
            "interactions": [{"rules": mined[0]["rules"]}],
        })
        body = resp.json()
        assert body["solutions"] == [r["uid"] for r in recs]
        # significance 1.0 rule matches every selected solution
        by_uid = dict(zip(body["solutions"], body["matrix"]))
        for uid in selected:
            assert by_uid[uid][0] is True

    def test_empty_interactions(self, client):
        resp = client.post("/api/rulematch", json={"dataset_id": "alpha",
                                                   "interactions": []})
        assert resp.status_code == 200
        assert all(row == [] for row in resp.json()["matrix"])

    def test_unknown_variable(self, client):
        resp = client.post("/api/rulematch", json={
            "dataset_id": "alpha",
            "interactions": [{"rules": [{"variable": "Z_1", "relation": "=",
                                         "threshold": 1}]}],
        })
        assert resp.status_code == 422
        assert resp.json()["detail"]["variable"] == "Z_1"


def test_cross_dataset_rule_overlay(client):
    """Rules mined on one dataset can be applied to the other (Fig. 9 style)."""
    recs = client.get("/api/datasets/alpha/solutions").json()["solutions"]
    selected = [r["uid"] for r in recs if r["in_final_front"]]
    mined = client.post("/api/mine", json={
        "dataset_ids": ["alpha"], "selected_solution_ids": selected,
        "max_level": 1, "min_significance": 0.9,
    }).json()["interactions"]
    if not mined:
        pytest.skip("toy front produced no >=0.9 rules")
    resp = client.post("/api/rulematch", json={
        "dataset_id": "beta",
        "interactions": [{"rules": mined[0]["rules"]}],
    })
    assert resp.status_code == 200
    assert len(resp.json()["matrix"]) == len(resp.json()["solutions"])
