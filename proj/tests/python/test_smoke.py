import json
import os

import bmtkit

DATA = os.environ.get("BMT_DATA", "data/bone_marrow.arff")


def test_summarize_matches_known_columns():
    rows = bmtkit.summarize(DATA)
    assert len(rows) == 10
    by_name = {r["column"]: r for r in rows}
    assert abs(by_name["donor_age"]["mean"] - 33.4721) < 1e-3
    assert abs(by_name["donor_age"]["std"] - 8.2718) < 1e-3
    assert by_name["PLT_recovery"]["max"] == 1000000.0


def test_rank_puts_recovery_indicators_first():
    ranking = bmtkit.rank(DATA)
    assert len(ranking) == 58
    assert ranking[0]["attribute"] == "PLT_recovery"
    assert abs(ranking[0]["score"] / 20390478.33 - 1) < 0.05
    assert ranking[1]["attribute"] == "ANC_recovery"

    reduced = bmtkit.rank(DATA, drop_leaky=True)
    names = {r["attribute"] for r in reduced}
    assert "PLT_recovery" not in names
    assert "survival_time" not in names


def test_run_compare_emit(tmp_path):
    cfg = bmtkit.preset("A", DATA)
    cfg["models"] = ["DT", "KNN"]
    report = bmtkit.run(cfg)
    env = report["environment"]
    assert env["n_train"] == 149
    assert env["n_test"] == 38
    assert env["n_features"] == 58
    for m in report["models"]:
        assert 0.0 < m["metrics"]["accuracy"] <= 1.0

    cfg_c = bmtkit.preset("C", DATA)
    cfg_c["models"] = ["DT", "KNN"]
    report_c = bmtkit.run(cfg_c)
    assert report_c["environment"]["n_features"] == 11

    table = bmtkit.compare([report, report_c])
    assert [row["experiment"] for row in table["best_metrics"]] == ["A", "C"]

    written = bmtkit.emit(report, ["json", "csv"], str(tmp_path))
    assert str(tmp_path / "report.json") in written
    with open(tmp_path / "report.json") as fh:
        parsed = json.load(fh)
    assert parsed["format"] == "bmtkit-report"
    assert (tmp_path / "metrics.csv").exists()
