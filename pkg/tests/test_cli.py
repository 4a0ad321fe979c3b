import csv
import math

import pytest

from satlae import cli, report
from satlae.engine import ExperimentResult

HEADERS = {
    "run": "slot,serving,sinr_fleet1,sinr_fleet2,rate_fleet1,rate_fleet2,sum_rate,beam_lat,beam_lon,handover,fingerprint",
    "sweep-power": "policy,power_w,mean_sum_rate,mean_rate_fleet1,mean_rate_fleet2,fingerprint",
    "min-power": "transmitter,policy,target_bps_hz,min_power_w,reachable,fingerprint",
    "service": "receiver,policy,target_bps_hz,service_duration_slots,handovers,na_flag,fingerprint",
    "compare-timescales": "scheme,slot,sum_rate,fingerprint",
}


def rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def scenario(tmp_path):
    p = tmp_path / "scenario.txt"
    p.write_text("sim.slots = 4\nservice.frame_slots = 5\nminpower.stride = 2\n")
    return p


class TestFormat:
    @pytest.mark.parametrize("v,s", [(1 / 3, "0.333333333"), (2.0, "2"), (1e-14, "1e-14"),
                                     (True, "true"), (7, "7"), (math.nan, "nan"), ("a;b", "a;b")])
    def test_values(self, v, s):
        assert report.format_value(v) == s

    def test_line_endings(self, tmp_path):
        p = report.write_csv(tmp_path / "x.csv", ("a", "b"), [(1, 2.5)])
        assert p.read_bytes() == b"a,b\n1,2.5\n"

    def test_row_width_checked(self):
        with pytest.raises(ValueError):
            report.render_csv(("a", "b"), [(1,)])

    def test_summary_path(self, tmp_path):
        assert report.summary_path(tmp_path / "t.csv").name == "t_summary.csv"


class TestCommands:
    @pytest.mark.parametrize("cmd,extra", [
        ("run", []),
        ("sweep-power", ["--powers", "20"]),
        ("min-power", ["--targets", "2"]),
        ("service", ["--targets", "1"]),
        ("compare-timescales", ["--frames", "2"]),
    ])
    def test_golden_headers(self, tmp_path, scenario, cmd, extra):
        out = tmp_path / "o.csv"
        assert cli.main([cmd, "--scenario", str(scenario), "--out", str(out), *extra]) == 0
        data = rows(out)
        assert ",".join(data[0]) == HEADERS[cmd]
        fp = data[1][-1]
        assert len(fp) == 16 and all(r[-1] == fp for r in data[1:])

    def test_run_one_slot(self, tmp_path):
        scen = tmp_path / "s.txt"
        scen.write_text("sim.slots = 1\n")
        out = tmp_path / "run.csv"
        assert cli.main(["run", "--scenario", str(scen), "--out", str(out)]) == 0
        assert len(rows(out)) == 2

    def test_sweep_one_power(self, tmp_path, scenario):
        out = tmp_path / "p.csv"
        cli.main(["sweep-power", "--scenario", str(scenario), "--out", str(out), "--powers", "5"])
        assert len(rows(out)) == 1 + 4

    def test_service_defaults_schema(self, tmp_path):
        out = tmp_path / "svc.csv"
        assert cli.main(["service", "--targets", "18", "--out", str(out)]) == 0
        data = rows(out)
        assert ",".join(data[0]) == HEADERS["service"]
        assert [r[0] for r in data[1:]] == ["dist-sat", "colocated-sat", "single-sat"]
        assert all(r[5] in ("true", "false") for r in data[1:])

    def test_timescale_summary(self, tmp_path, scenario):
        out = tmp_path / "ts.csv"
        cli.main(["compare-timescales", "--scenario", str(scenario), "--out", str(out), "--frames", "2"])
        summary = rows(tmp_path / "ts_summary.csv")
        assert summary[0] == ["scheme", "mean_sum_rate", "position_reports", "fingerprint"]
        assert [r[0] for r in summary[1:]] == ["slot-level", "fixed-initial", "earth-center", "N=2"]

    def test_plot(self, tmp_path, scenario):
        out = tmp_path / "sweep.csv"
        assert cli.main(["sweep-power", "--scenario", str(scenario), "--out", str(out),
                         "--powers", "1,20", "--plot"]) == 0
        assert (tmp_path / "sweep.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_seed_override(self, tmp_path, scenario):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["run", "--scenario", str(scenario), "--out", str(a)])
        cli.main(["run", "--scenario", str(scenario), "--out", str(b), "--seed", "9"])
        assert rows(a)[1][-1] != rows(b)[1][-1]

    def test_show_scenario(self, capsys):
        assert cli.main(["show-scenario", "--seed", "5"]) == 0
        assert "sim.seed = 5" in capsys.readouterr().out


class TestErrors:
    def test_bad_scenario(self, tmp_path, capsys):
        scen = tmp_path / "bad.txt"
        scen.write_text("shell.altitude_km = -1\n")
        assert cli.main(["run", "--scenario", str(scen), "--out", str(tmp_path / "o.csv")]) != 0
        err = capsys.readouterr().err
        assert "shell.altitude_km" in err and "error" in err
        assert not (tmp_path / "o.csv").exists()

    def test_missing_scenario(self, tmp_path, capsys):
        assert cli.main(["run", "--scenario", str(tmp_path / "none"), "--out", str(tmp_path / "o.csv")]) != 0
        assert capsys.readouterr().err

    def test_unwritable_output(self, tmp_path, scenario, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert cli.main(["run", "--scenario", str(scenario), "--out", str(blocker / "o.csv")]) != 0
        assert capsys.readouterr().err

    def test_visibility_error_has_slot(self, tmp_path, capsys):
        scen = tmp_path / "s.txt"
        scen.write_text("sim.min_elev_deg = 89\nsim.slots = 2\n")
        assert cli.main(["run", "--scenario", str(scen), "--out", str(tmp_path / "o.csv")]) != 0
        assert "slot 0" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [["run"], ["sweep-power", "--out", "x", "--powers", "a,b"],
                                      ["compare-timescales", "--out", "x", "--frames", "0"], []])
    def test_usage_errors(self, argv):
        with pytest.raises(SystemExit) as e:
            cli.main(argv)
        assert e.value.code != 0

    def test_unknown_plot_kind(self, tmp_path):
        from satlae import plotting

        with pytest.raises(ValueError):
            plotting.render(ExperimentResult("Nope", ("a",), [], "x"), tmp_path / "n.png")
