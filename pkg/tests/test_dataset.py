import json

import pytest

from rmsopt.dataset import (
    dataset_from_dict,
    format_summary_tables,
    front_summary,
    load_dataset,
    load_rules,
    write_dataset,
    write_rules,
)
from rmsopt.mining import mine_scenario_groups
from rmsopt.moea import AlgorithmParams, run_smo


@pytest.fixture(scope="module")
def toy_archive(toy_instance, toy_sim):
    params = AlgorithmParams(population_size=6, max_generations=5, seed=2)
    return run_smo(toy_instance, params, toy_sim)


class TestDatasetRoundTrip:
    def test_bytes_stable(self, toy_archive, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        ds = write_dataset(toy_archive, p1)
        loaded = load_dataset(p1)
        write_dataset(loaded.archive, p2, hv_series=loaded.hv_series)
        assert p1.read_bytes() == p2.read_bytes()

    def test_structures_identical(self, toy_archive, tmp_path):
        path = tmp_path / "ds.json"
        ds = write_dataset(toy_archive, path)
        loaded = load_dataset(path)
        assert loaded.instance == toy_archive.instance
        assert loaded.archive.generations == toy_archive.generations
        assert loaded.archive.final_front == toy_archive.final_front
        assert loaded.hv_series == ds.hv_series
        for sid, ind in toy_archive.solutions.items():
            other = loaded.archive.solutions[sid]
            assert other.chromosome == ind.chromosome
            assert other.objectives == ind.objectives
            assert other.configuration == ind.configuration
            assert other.sim_seed == ind.sim_seed
            assert other.born_gen == ind.born_gen

    def test_corrupted_configuration_rejected(self, toy_archive, tmp_path):
        path = tmp_path / "ds.json"
        write_dataset(toy_archive, path)
        data = json.loads(path.read_text())
        data["solutions"][0]["configuration"]["buffers"] = [0]  # below B_min
        with pytest.raises(ValueError, match="feasibility"):
            dataset_from_dict(data)

    def test_hash_mismatch_rejected(self, toy_archive, tmp_path):
        path = tmp_path / "ds.json"
        write_dataset(toy_archive, path)
        data = json.loads(path.read_text())
        data["instance_hash"] = "0" * 64
        with pytest.raises(ValueError, match="hash"):
            dataset_from_dict(data)

    def test_kind_checked(self):
        with pytest.raises(ValueError, match="dataset"):
            dataset_from_dict({"schema": 1, "kind": "other"})


class TestSummaries:
    def test_front_summary_ranges(self, toy_archive):
        s = front_summary(toy_archive)
        assert s["operators"] == 3
        assert s["mix"] == "100"
        assert s["thp"][0] <= s["thp"][1]
        assert s["tbc"][0] <= s["tbc"][1]
        assert len(s["buffers"]) == 1
        assert len(s["resources"]) == 2
        assert sum(t for t, _ in s["tasks_per_ws"]) <= 4 <= sum(t for _, t in s["tasks_per_ws"])

    def test_table_layout(self, toy_archive):
        text = format_summary_tables([front_summary(toy_archive)])
        assert "NO" in text and "Proportion" in text and "THP" in text
        assert "Bu_1" in text and "TBC" in text
        assert "Configuration and work task allocation" in text
        assert "WS1" in text and "Tasks" in text


class TestRulesFiles:
    def test_round_trip(self, toy_archive, tmp_path):
        reports = mine_scenario_groups([toy_archive], "operators",
                                       max_level=2, min_significance=0.8)
        path = tmp_path / "rules.json"
        write_rules(reports, path, 2, 0.8)
        loaded = load_rules(path)
        assert [r.label for r in loaded] == [r.label for r in reports]
        assert [r.interactions for r in loaded] == [r.interactions for r in reports]

    def test_kind_checked(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text(json.dumps({"schema": 1, "kind": "dataset", "groups": []}))
        with pytest.raises(ValueError, match="rules"):
            load_rules(path)
