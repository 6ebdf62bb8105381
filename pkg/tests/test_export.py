import csv

import numpy as np
import pytest

from patrolsim.cli import main
from patrolsim.export import (
    read_events,
    replay_events,
    verify_artifacts,
    write_run_artifacts,
)
from patrolsim.scenario import ScenarioConfig, run_trial

CFG = ScenarioConfig(
    n_robots=4,
    width_grids=8,
    height_grids=8,
    mission_steps=500,
    warmup_t0=100,
    d_c=120.0,
    delta=120.0,
    eta=0.5,
    p_max=200.0,
    sigma=150.0,
    bandwidth_s=64,
)


@pytest.fixture(scope="module")
def trial(tmp_path_factory):
    result = run_trial(CFG, 21)
    out = tmp_path_factory.mktemp("artifacts")
    write_run_artifacts(result, out)
    return result, out


class TestArtifacts:
    def test_file_set(self, trial):
        _, out = trial
        names = {p.name for p in out.iterdir()}
        expected = {"metrics.csv", "timeseries.csv", "events.log", "heatmap_total.csv"}
        expected |= {f"heatmap_robot_{i}.csv" for i in (2, 3, 4)}
        assert names == expected

    def test_events_rows(self, trial):
        result, out = trial
        events = read_events(out / "events.log")
        assert len(events) == len(result.events)
        assert events == result.events

    def test_heatmap_total_is_sum(self, trial):
        result, out = trial
        total = np.loadtxt(out / "heatmap_total.csv", delimiter=",", dtype=np.int64)
        parts = sum(
            np.loadtxt(out / f"heatmap_robot_{i}.csv", delimiter=",", dtype=np.int64)
            for i in (2, 3, 4)
        )
        assert np.array_equal(total, parts)
        assert total.shape == (CFG.height_grids, CFG.width_grids)

    def test_metrics_round_trip_exact(self, trial):
        result, out = trial
        with open(out / "metrics.csv", newline="") as fh:
            row = next(csv.DictReader(fh))
        assert int(row["seed"]) == result.seed
        assert float(row["I_G"]) == result.I_G
        assert int(row["I_W"]) == result.I_W
        assert float(row["norm_D_MSA"]) == result.normalized["D_MSA"]

    def test_timeseries_length(self, trial):
        _, out = trial
        with open(out / "timeseries.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == CFG.mission_steps
        assert rows[0]["t"] == "1"


class TestVerify:
    def test_untampered_output_verifies(self, trial):
        _, out = trial
        assert verify_artifacts(out / "events.log", CFG) == []

    def test_replay_is_independent_oracle(self, trial):
        result, out = trial
        i_g, i_w, counts = replay_events(read_events(out / "events.log"), CFG)
        assert i_g == pytest.approx(result.I_G, rel=1e-12)
        assert i_w == result.I_W
        assert np.array_equal(counts, result.visit_counts)

    def test_tampered_events_detected(self, trial, tmp_path):
        result, out = trial
        lines = (out / "events.log").read_text().splitlines()
        broken = tmp_path / "broken"
        broken.mkdir()
        for p in out.iterdir():
            (broken / p.name).write_bytes(p.read_bytes())
        (broken / "events.log").write_text("\n".join(lines[:-5]) + "\n")
        assert verify_artifacts(broken / "events.log", CFG) != []


class TestCli:
    def test_run_and_verify_exit_codes(self, tmp_path):
        cfg_path = tmp_path / "mission.cfg"
        cfg_path.write_text(
            "n_robots = 4\nwidth_grids = 8\nheight_grids = 8\n"
            "mission_steps = 400\nwarmup_t0 = 100\nd_c = 120\ndelta = 120\n"
            "eta = 0.5\np_max = 200\nsigma = 150\nbandwidth_s = 64\n"
        )
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg_path), "--seed", "1",
                     "--out", str(out)]) == 0
        assert main(["verify", str(out / "events.log"),
                     "--config", str(cfg_path)]) == 0

    def test_config_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nonsense = 1\n")
        assert main(["run", "--config", str(bad)]) == 2

    def test_unknown_flag_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--bogus"])
        assert exc.value.code == 2

    def test_verify_mismatch_exit_3(self, tmp_path):
        cfg_path = tmp_path / "mission.cfg"
        cfg_path.write_text(
            "n_robots = 4\nwidth_grids = 8\nheight_grids = 8\n"
            "mission_steps = 400\nwarmup_t0 = 100\nd_c = 120\ndelta = 120\n"
            "eta = 0.5\np_max = 200\nsigma = 150\nbandwidth_s = 64\n"
        )
        out = tmp_path / "out"
        main(["run", "--config", str(cfg_path), "--seed", "1", "--out", str(out)])
        events = out / "events.log"
        lines = events.read_text().splitlines()
        events.write_text("\n".join(lines[:-3]) + "\n")
        assert main(["verify", str(events), "--config", str(cfg_path)]) == 3

    def test_batch_metrics_rows(self, tmp_path):
        cfg_path = tmp_path / "mission.cfg"
        cfg_path.write_text(
            "n_robots = 4\nwidth_grids = 8\nheight_grids = 8\n"
            "mission_steps = 300\nwarmup_t0 = 50\nd_c = 120\ndelta = 120\n"
            "eta = 0.5\np_max = 200\nsigma = 150\nbandwidth_s = 64\n"
        )
        out = tmp_path / "batch"
        assert main(["batch", "--config", str(cfg_path), "--trials", "3",
                     "--base-seed", "5", "--out", str(out)]) == 0
        with open(out / "metrics.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3
        assert (out / "trial_000" / "events.log").exists()

    def test_override_flags(self, tmp_path):
        out = tmp_path / "out"
        cfg_path = tmp_path / "mission.cfg"
        cfg_path.write_text(
            "n_robots = 4\nwidth_grids = 8\nheight_grids = 8\n"
            "mission_steps = 300\nwarmup_t0 = 50\nd_c = 120\ndelta = 120\n"
            "eta = 0.5\np_max = 200\nsigma = 150\nbandwidth_s = 64\n"
        )
        assert main(["run", "--config", str(cfg_path), "--seed", "1",
                     "--out", str(out), "--n-robots", "3", "--strategy", "er"]) == 0
        with open(out / "metrics.csv", newline="") as fh:
            row = next(csv.DictReader(fh))
        assert row["n_robots"] == "3"
        assert row["strategy"] == "er"
