"""Scenario parsing, report rendering and the command line entry point."""

import json
import math

import numpy as np
import pytest

from envelope import cli


ANNULUS = {
    "outer": {"circle": {"center": [0.0, 0.0], "radius": 2.0}},
    "holes": [{"circle": {"center": [0.0, 0.0], "radius": 0.5}}],
}


def circle_csv(intervals=128, data="conj"):
    t = np.linspace(0.0, 1.0, intervals + 1)
    z = np.exp(2j * math.pi * t)
    z[-1] = z[0]
    g = np.conj(z) if data == "conj" else z
    lines = []
    for row in zip(t, z.real, z.imag, g.real, g.imag):
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def write_scenario(tmp_path, raw, name="scenario.json"):
    p = tmp_path / name
    p.write_text(json.dumps(raw))
    return p


class TestValidate:
    def test_runnable_scenario_passes(self):
        raw = {"function": "1/z^2", "domain": ANNULUS,
               "checks": ["primitive_order"]}
        assert cli.validate(raw) == []

    def test_domain_check_needs_function(self):
        raw = {"domain": ANNULUS, "checks": ["moments"]}
        diags = cli.validate(raw)
        assert any("'moments' needs a function" in d for d in diags)

    def test_curve_check_needs_curve(self):
        raw = {"function": "z", "checks": ["boundary_tower"]}
        diags = cli.validate(raw)
        assert any("'boundary_tower' needs a curve" in d for d in diags)

    def test_unknown_check_is_reported(self):
        raw = {"function": "z", "domain": ANNULUS, "checks": ["sorcery"]}
        diags = cli.validate(raw)
        assert any("unknown check 'sorcery'" in d for d in diags)

    def test_bad_max_degree(self):
        raw = {"function": "1/z", "domain": ANNULUS,
               "checks": ["moments"], "max_degree": -1}
        diags = cli.validate(raw)
        assert any(d.startswith("max_degree:") for d in diags)

    def test_parse_error_carries_field_path(self):
        raw = {"function": "1/(z-", "domain": ANNULUS,
               "checks": ["moments"]}
        diags = cli.validate(raw)
        assert any(d.startswith("function:") for d in diags)

    def test_bad_polygon_path(self):
        raw = {"function": "z", "checks": ["moments"],
               "domain": {"outer": {"polygon": {"vertices": [[0, 0],
                                                             [1, 0]]}}}}
        diags = cli.validate(raw)
        assert any("domain.outer.polygon" in d for d in diags)

    def test_cauchy_requires_points(self, tmp_path):
        (tmp_path / "c.csv").write_text(circle_csv())
        raw = {"checks": ["cauchy"], "curve": {"csv": "c.csv"}}
        diags = cli.validate(raw, tmp_path)
        assert any(d.startswith("points:") for d in diags)

    def test_radii_order_checked(self, tmp_path):
        (tmp_path / "c.csv").write_text(circle_csv())
        raw = {"checks": ["chord_arc"], "curve": {"csv": "c.csv"},
               "radii": [1e-3, 1e-2]}
        diags = cli.validate(raw, tmp_path)
        assert any("radii: must decrease" in d for d in diags)

    def test_missing_csv_reported_with_path(self, tmp_path):
        raw = {"checks": ["chord_arc"], "curve": {"csv": "absent.csv"}}
        diags = cli.validate(raw, tmp_path)
        assert any(d.startswith("curve.csv: file not found") for d in diags)

    def test_non_object_scenario(self):
        assert cli.validate([1, 2, 3]) == ["scenario: expected a JSON object"]


class TestBuildConfig:
    def test_overrides_merge(self):
        raw = {"function": "1/z", "domain": ANNULUS, "checks": ["moments"],
               "max_degree": 4}
        cfg, diags = cli.build_config(raw, overrides={"max_degree": 9})
        assert diags == []
        assert cfg.max_degree == 9

    def test_none_overrides_are_ignored(self):
        raw = {"function": "1/z", "domain": ANNULUS, "checks": ["moments"],
               "max_degree": 4}
        cfg, _ = cli.build_config(raw, overrides={"max_degree": None})
        assert cfg.max_degree == 4

    def test_defaults(self):
        raw = {"function": "z", "domain": ANNULUS, "checks": ["moments"]}
        cfg, _ = cli.build_config(raw)
        assert cfg.zero_tol.abs_tol == 1e-9
        assert cfg.zero_tol.rel_tol == 1e-10
        assert cfg.quad_tol == cli.DEFAULT_QUAD_TOL
        assert cfg.fmt == "json"


class TestReport:
    def rows(self, *statuses):
        return tuple({"check": f"c{i}", "status": s, "values": {"x": 1},
                      "tolerance_used": {}}
                     for i, s in enumerate(statuses))

    def test_exit_codes(self):
        mk = lambda *s: cli.Report("0", {}, self.rows(*s),
                                   {"total_s": 0.0}).exit_code
        assert mk("ok", "ok") == 0
        assert mk("ok", "inconsistent") == 2
        assert mk("inconsistent", "error") == 1
        assert mk("error",) == 1

    def test_json_serializes_complex_and_arrays(self):
        rows = ({"check": "c", "status": "ok",
                 "values": {"z": 1 + 2j, "arr": np.array([1.0, 2.0]),
                            "bad": float("inf")},
                 "tolerance_used": {}},)
        rep = cli.Report("0", {}, rows, {"total_s": 0.0})
        payload = json.loads(rep.to_json())
        vals = payload["results"][0]["values"]
        assert vals["z"] == [1.0, 2.0]
        assert vals["arr"] == [1.0, 2.0]
        assert vals["bad"] == "inf"

    def test_text_format_lists_checks(self):
        rep = cli.Report("0", {}, self.rows("ok", "inconsistent"),
                         {"total_s": 0.25})
        text = rep.to_text()
        assert "[ok] c0" in text
        assert "[inconsistent] c1" in text
        assert "total time" in text


class TestRunScenario:
    def test_primitive_order_values(self):
        raw = {"function": "1/z^2", "domain": ANNULUS,
               "checks": ["primitive_order"], "max_degree": 8}
        cfg, diags = cli.build_config(raw)
        assert diags == []
        rep = cli.run_scenario(cfg)
        assert rep.exit_code == 0
        row = rep.results[0]
        assert row["check"] == "primitive_order"
        assert row["status"] == "ok"
        assert row["values"]["max_order"] == 1
        assert row["values"]["all_orders"] is False

    def test_error_row_does_not_stop_later_checks(self, tmp_path):
        # 16 intervals is enough for the tower but not for chord-arc
        (tmp_path / "c.csv").write_text(circle_csv(16))
        raw = {"checks": ["chord_arc", "boundary_tower"],
               "curve": {"csv": "c.csv"}}
        cfg, diags = cli.build_config(raw, tmp_path)
        assert diags == []
        rep = cli.run_scenario(cfg)
        assert rep.results[0]["status"] == "error"
        assert "error_type" in rep.results[0]["values"]
        assert rep.results[1]["status"] == "ok"
        assert rep.exit_code == 1

    def test_determinism_modulo_timings(self):
        raw = {"function": "1/z^2", "domain": ANNULUS,
               "checks": ["moments", "primitive_order"], "max_degree": 6}
        cfg, _ = cli.build_config(raw)
        a = json.loads(cli.run_scenario(cfg).to_json())
        b = json.loads(cli.run_scenario(cfg).to_json())
        a.pop("timings")
        b.pop("timings")
        assert a == b


class TestMain:
    def test_run_json_output(self, tmp_path, capsys):
        scenario = write_scenario(tmp_path, {
            "function": "1/z^2", "domain": ANNULUS,
            "checks": ["primitive_order"], "max_degree": 8})
        code = cli.main(["run", "--scenario", str(scenario)])
        out = capsys.readouterr().out
        assert code == 0
        payload = json.loads(out)
        assert payload["results"][0]["values"]["max_order"] == 1
        assert "version" in payload and "timings" in payload

    def test_run_text_format_flag(self, tmp_path, capsys):
        scenario = write_scenario(tmp_path, {
            "function": "1/(z-5)", "domain": ANNULUS,
            "checks": ["primitive_order"], "max_degree": 8})
        code = cli.main(["run", "--scenario", str(scenario),
                         "--format", "text"])
        out = capsys.readouterr().out
        assert code == 0
        assert "[ok] primitive_order" in out

    def test_run_out_file(self, tmp_path, capsys):
        scenario = write_scenario(tmp_path, {
            "function": "1/z^2", "domain": ANNULUS,
            "checks": ["primitive_order"], "max_degree": 8})
        target = tmp_path / "report.json"
        code = cli.main(["run", "--scenario", str(scenario),
                         "--out", str(target)])
        assert code == 0
        assert capsys.readouterr().out == ""
        assert json.loads(target.read_text())["results"]

    def test_max_degree_flag_overrides(self, tmp_path, capsys):
        scenario = write_scenario(tmp_path, {
            "function": "z", "domain": ANNULUS,
            "checks": ["moments"], "max_degree": 12})
        code = cli.main(["run", "--scenario", str(scenario),
                         "--max-degree", "5"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["results"][0]["values"]["degree_cutoff"] == 5

    def test_tolerance_flags_reach_report(self, tmp_path, capsys):
        scenario = write_scenario(tmp_path, {
            "function": "z", "domain": ANNULUS,
            "checks": ["moments"], "max_degree": 4})
        code = cli.main(["run", "--scenario", str(scenario),
                         "--tol-abs", "1e-7", "--tol-rel", "1e-8"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["results"][0]["tolerance_used"]["abs"] == 1e-7
        assert payload["results"][0]["tolerance_used"]["rel"] == 1e-8

    def test_csv_scenario_runs_boundary_checks(self, tmp_path, capsys):
        (tmp_path / "curve.csv").write_text(circle_csv(128, data="conj"))
        scenario = write_scenario(tmp_path, {
            "checks": ["boundary_tower", "chord_arc"],
            "curve": {"csv": "curve.csv"}})
        code = cli.main(["run", "--scenario", str(scenario)])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        tower = payload["results"][0]["values"]
        assert tower["pass_depth"] == 0
        assert tower["depth_matches"] is True
        arc = payload["results"][1]["values"]
        assert arc["constant"] == pytest.approx(math.pi / 2, rel=0.05)

    def test_sampled_path_scenario_with_points(self, tmp_path, capsys):
        scenario = write_scenario(tmp_path, {
            "function": "z^2",
            "curve": {"path": {"circle": {"center": [0, 0], "radius": 1.0}},
                      "samples": 64},
            "points": [[0.3, 0.2]],
            "checks": ["cauchy", "nontangential"]})
        code = cli.main(["run", "--scenario", str(scenario)])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        w = complex(0.3, 0.2)
        got = payload["results"][0]["values"]["values"][0]
        assert complex(got[0], got[1]) == pytest.approx(w ** 2, abs=1e-10)
        assert payload["results"][1]["values"]["matches_boundary"] is True

    def test_validate_subcommand(self, tmp_path, capsys):
        good = write_scenario(tmp_path, {
            "function": "1/z", "domain": ANNULUS, "checks": ["moments"]},
            "good.json")
        assert cli.main(["validate", "--scenario", str(good)]) == 0
        assert "runnable" in capsys.readouterr().out
        bad = write_scenario(tmp_path, {"checks": ["moments"]}, "bad.json")
        assert cli.main(["validate", "--scenario", str(bad)]) == 1
        assert "needs a" in capsys.readouterr().out

    def test_missing_file(self, tmp_path, capsys):
        code = cli.main(["run", "--scenario", str(tmp_path / "nope.json")])
        assert code == 1
        assert "not found" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        code = cli.main(["run", "--scenario", str(p)])
        assert code == 1
        assert "not valid JSON" in capsys.readouterr().err

    def test_unrunnable_scenario_exits_one(self, tmp_path, capsys):
        scenario = write_scenario(tmp_path, {"checks": ["moments"]})
        code = cli.main(["run", "--scenario", str(scenario)])
        assert code == 1
        assert "needs a" in capsys.readouterr().err
