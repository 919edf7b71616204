import json
from pathlib import Path

import pytest

from rmsopt.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_VALIDATION, main
from rmsopt.dataset import load_dataset
from rmsopt.model import instance_to_dict, save_scenario


@pytest.fixture(scope="module")
def toy_scenario(tmp_path_factory, toy_instance):
    path = tmp_path_factory.mktemp("scenario") / "toy.json"
    save_scenario(toy_instance, path)
    return str(path)


RUN_FLAGS = ["--horizon", "7200", "--warmup", "600", "--replications", "1"]


def run_optimize(scenario, out, extra=()):
    return main(
        ["optimize", scenario, "--out", out, "--population", "6",
         "--generations", "3", "--seed", "1", *RUN_FLAGS, *extra]
    )


class TestValidateCommand:
    def test_valid_scenario(self, toy_scenario, capsys):
        assert main(["validate", toy_scenario]) == EXIT_OK
        assert "ok:" in capsys.readouterr().out

    def test_invalid_scenario(self, tmp_path, toy_instance, capsys):
        data = instance_to_dict(toy_instance)
        data["total_resources"] = 100
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        assert main(["validate", str(path)]) == EXIT_VALIDATION
        assert "TNM" in capsys.readouterr().out

    def test_unreadable_scenario(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{not json")
        assert main(["validate", str(path)]) == EXIT_VALIDATION

    def test_usage_error(self, capsys):
        assert main(["validate"]) == EXIT_USAGE
        assert main(["frobnicate"]) == EXIT_USAGE
        capsys.readouterr()


class TestGenCase:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["gen-case", "--stations", "2", "--variants", "2", "--tasks", "5",
                "--resources", "4", "--max-per-ws", "3", "--mix", "30/70", "--seed", "9"]
        assert main(args + ["--out", str(a)]) == EXIT_OK
        assert main(args + ["--out", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_generated_case_validates(self, tmp_path):
        out = tmp_path / "case.json"
        main(["gen-case", "--out", str(out), "--seed", "3"])
        assert main(["validate", str(out)]) == EXIT_OK

    def test_reference_flag(self, tmp_path):
        out = tmp_path / "ref.json"
        assert main(["gen-case", "--reference", "--out", str(out)]) == EXIT_OK
        data = json.loads(out.read_text())
        assert len(data["variants"][0]["tasks"]) == 29

    def test_infeasible_spec_is_runtime_error(self, tmp_path):
        out = tmp_path / "x.json"
        code = main(["gen-case", "--out", str(out), "--resources", "999"])
        assert code == EXIT_RUNTIME


class TestOptimize:
    def test_writes_dataset_and_summary(self, toy_scenario, tmp_path, capsys):
        out = tmp_path / "ds.json"
        assert run_optimize(toy_scenario, str(out)) == EXIT_OK
        text = capsys.readouterr().out
        assert "Throughput and buffer capacity ranges" in text
        assert "TBC" in text
        ds = load_dataset(out)
        assert len(ds.archive.generations) == 4
        assert ds.archive.algorithm == "smo"

    def test_seed_reproducible_bytes(self, toy_scenario, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_optimize(toy_scenario, str(a)) == EXIT_OK
        assert run_optimize(toy_scenario, str(b)) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_zero_generations(self, toy_scenario, tmp_path):
        out = tmp_path / "g0.json"
        assert main(["optimize", toy_scenario, "--out", str(out), "--population", "4",
                     "--generations", "0", *RUN_FLAGS]) == EXIT_OK
        ds = load_dataset(out)
        assert len(ds.archive.generations) == 1
        assert len(ds.archive.solutions) == 4

    def test_baseline_flag(self, toy_scenario, tmp_path):
        out = tmp_path / "base.json"
        assert run_optimize(toy_scenario, str(out), extra=["--baseline"]) == EXIT_OK
        assert load_dataset(out).archive.algorithm == "baseline"

    def test_missing_scenario_is_validation_error(self, tmp_path):
        code = main(["optimize", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o.json")])
        assert code == EXIT_VALIDATION


@pytest.fixture(scope="module")
def sweep_dir(toy_scenario, tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    code = main(["sweep", toy_scenario, "--out-dir", str(out),
                 "--operators", "2,3", "--mix", "100",
                 "--population", "6", "--generations", "3", "--seed", "0", *RUN_FLAGS])
    assert code == EXIT_OK
    return out


class TestSweep:
    def test_one_dataset_per_combination(self, sweep_dir):
        files = sorted(p.name for p in sweep_dir.glob("dataset_*.json"))
        assert files == ["dataset_no2_mix100.json", "dataset_no3_mix100.json"]

    def test_report_written(self, sweep_dir):
        report = (sweep_dir / "sweep_report.txt").read_text()
        assert "Marginal max-THP per added operator" in report
        assert "NO 2 -> 3" in report

    def test_max_thp_nondecreasing_in_operators(self, sweep_dir):
        ds2 = load_dataset(sweep_dir / "dataset_no2_mix100.json")
        ds3 = load_dataset(sweep_dir / "dataset_no3_mix100.json")
        best = lambda d: max(i.objectives[0] for i in d.archive.final_front_individuals())
        assert best(ds3) >= best(ds2)

    def test_infeasible_combo_skipped(self, toy_scenario, tmp_path, capsys):
        out = tmp_path / "s2"
        code = main(["sweep", toy_scenario, "--out-dir", str(out),
                     "--operators", "3,99", "--mix", "100",
                     "--population", "4", "--generations", "1", "--seed", "0", *RUN_FLAGS])
        assert code == EXIT_OK
        assert "skipping infeasible" in capsys.readouterr().err
        assert len(list(out.glob("dataset_*.json"))) == 1


class TestMineHvRulematch:
    def test_mine_outputs(self, sweep_dir, tmp_path, capsys):
        out = tmp_path / "rules"
        datasets = sorted(str(p) for p in sweep_dir.glob("dataset_*.json"))
        code = main(["mine", *datasets, "--out", str(out), "--group-by", "operators",
                     "--max-level", "2", "--min-sig", "0.8"])
        assert code == EXIT_OK
        data = json.loads(Path(f"{out}.json").read_text())
        assert data["kind"] == "rules"
        assert [g["label"] for g in data["groups"]] == ["NO=2", "NO=3"]
        text = Path(f"{out}.txt").read_text()
        assert "Rule-interaction" in text

    def test_mine_min_sig_1_rules_cover_selected(self, sweep_dir, tmp_path):
        out = tmp_path / "strict"
        datasets = sorted(str(p) for p in sweep_dir.glob("dataset_*.json"))
        code = main(["mine", *datasets, "--out", str(out), "--group-by", "operators",
                     "--max-level", "1", "--min-sig", "1.0"])
        assert code == EXIT_OK
        data = json.loads(Path(f"{out}.json").read_text())
        for group in data["groups"]:
            for ri in group["interactions"]:
                assert ri["significance"] == 1.0
                assert ri["level"] == 1

    def test_hv_outputs(self, sweep_dir, tmp_path):
        out = tmp_path / "hv"
        datasets = sorted(str(p) for p in sweep_dir.glob("dataset_*.json"))
        assert main(["hv", *datasets, "--out-dir", str(out)]) == EXIT_OK
        summary = (out / "hv_summary.csv").read_text().splitlines()
        assert summary[0] == "dataset,algorithm,final_hv"
        assert len(summary) == 3
        curve = (out / "dataset_no2_mix100_hv.csv").read_text().splitlines()
        assert curve[0] == "generation,hv"
        assert len(curve) == 5  # generations 0..3 plus header

    def test_hv_identical_datasets_identical_values(self, sweep_dir, tmp_path):
        out = tmp_path / "hv2"
        d = str(sorted(sweep_dir.glob("dataset_no2*.json"))[0])
        assert main(["hv", d, d, "--out-dir", str(out)]) == EXIT_OK
        lines = (out / "hv_summary.csv").read_text().splitlines()[1:]
        assert lines[0].split(",")[2] == lines[1].split(",")[2]

    def test_rule_match_counts(self, sweep_dir, tmp_path, capsys):
        rules_prefix = tmp_path / "rules"
        d2 = str(sorted(sweep_dir.glob("dataset_no2*.json"))[0])
        main(["mine", d2, "--out", str(rules_prefix), "--group-by", "operators",
              "--max-level", "1", "--min-sig", "1.0"])
        out = tmp_path / "match.json"
        code = main(["rule-match", d2, f"{rules_prefix}.json", "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads(out.read_text())
        ds = load_dataset(d2)
        table_selected = report["groups"][0]["interactions"][0]
        # 100%-significance rules match every selected row
        assert table_selected["matched_selected"] == table_selected["selected_total"]

    def test_rule_match_unknown_variable(self, sweep_dir, tmp_path):
        d2 = str(sorted(sweep_dir.glob("dataset_no2*.json"))[0])
        bad = tmp_path / "bad_rules.json"
        bad.write_text(json.dumps({
            "schema": 1, "kind": "rules", "params": {},
            "groups": [{"label": "x", "archives": 1, "selected": 1, "unselected": 1,
                        "interactions": [{"rules": [{"variable": "Q_9", "relation": "=",
                                                     "threshold": 1}],
                                          "significance": 1, "unsignificance": 0,
                                          "level": 1}]}],
        }))
        out = tmp_path / "match.json"
        assert main(["rule-match", d2, str(bad), "--out", str(out)]) == EXIT_VALIDATION


class TestReproducibilityAcrossCommands:
    def test_mine_bytes_stable(self, sweep_dir, tmp_path):
        datasets = sorted(str(p) for p in sweep_dir.glob("dataset_*.json"))
        a, b = tmp_path / "ra", tmp_path / "rb"
        for prefix in (a, b):
            main(["mine", *datasets, "--out", str(prefix), "--group-by", "operators",
                  "--max-level", "2", "--min-sig", "0.8"])
        assert Path(f"{a}.json").read_bytes() == Path(f"{b}.json").read_bytes()
        assert Path(f"{a}.txt").read_bytes() == Path(f"{b}.txt").read_bytes()
