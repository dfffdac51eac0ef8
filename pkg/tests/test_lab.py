from __future__ import annotations

import json
import math

import numpy as np
import pytest

from bilap.lab import cli
from bilap.lab.config import DEFAULTS, exponent_tuple, load_config, merge
from bilap.lab.families import (
    FamilySpec,
    GaussianSpec,
    build_family,
    build_pairs,
    bump_tensor_field,
    gaussian_field,
    mode_field,
    random_band_limited,
)
from bilap.lab.report import Row, SweepReport, emit_report, load_report, write_summary
from bilap.lab.suites import SUITES, run_suite
from bilap.spectral_core import TorusGrid

ROOT_CONFIG = __import__("pathlib").Path(__file__).resolve().parents[1] / "configs" / "default.toml"


# -------------------------------------------------------------------- config

class TestConfig:
    def test_defaults_without_file(self):
        assert load_config() == DEFAULTS

    def test_shipped_file_matches_defaults(self):
        assert load_config(ROOT_CONFIG) == DEFAULTS

    def test_toml_override(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text('seed = 7\n[decay]\ns = [0.25]\n[symbol.algebra]\npairs = 3\n')
        cfg = load_config(path)
        assert cfg["seed"] == 7 and cfg["decay"]["s"] == [0.25]
        assert cfg["symbol"]["algebra"]["pairs"] == 3 and cfg["symbol"]["algebra"]["r"] == 1.0
        assert cfg["decay"]["m_max"] == DEFAULTS["decay"]["m_max"]

    def test_json_override(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"maximal": {"fields": 2}}))
        assert load_config(path)["maximal"]["fields"] == 2

    def test_merge_leaves_base(self):
        base = {"a": {"b": 1, "c": [1]}}
        out = merge(base, {"a": {"b": 2}})
        out["a"]["c"].append(2)
        assert base == {"a": {"b": 1, "c": [1]}} and out["a"]["b"] == 2

    def test_gate_violation_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('[[leibniz.tuples]]\nsymbol = "one"\ns = 0.1\np1 = 1.1\np2 = 1.1\n')
        with pytest.raises(ValueError, match=r"leibniz.tuples\[0\]"):
            load_config(path)

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('[[leibniz.tuples]]\nsymbol = "one"\ns = 1.0\n')
        with pytest.raises(ValueError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError, match="cannot read config"):
            load_config(tmp_path / "nope.toml")

    def test_exponent_tuple_mixed(self):
        et = exponent_tuple({"p1": 2, "p2": 2, "s": 1, "q1": 1.5, "q2": 1.5, "mode": "mixed"})
        assert et.dim == 2 and et.q1 == 1.5 and et.nu == 0.0


# ------------------------------------------------------------------- families

class TestFamilies:
    def test_gaussian_matches_samples(self):
        g = TorusGrid(1, 256, 32.0)
        spec = GaussianSpec((14.0,), 1.3, (0.9,), 1.7)
        f = gaussian_field(g, spec, band=127)
        (x,) = g.coordinates()
        exact = 1.7 * np.exp(-((x - 14.0) ** 2) / (2 * 1.3**2)) * np.cos(0.9 * (x - 14.0))
        assert np.max(np.abs(f.space - exact)) < 1e-12

    def test_gaussian_2d(self):
        g = TorusGrid(2, 64, 16.0)
        spec = GaussianSpec((8.0, 7.0), 1.0, (0.5, 1.0))
        f = gaussian_field(g, spec, band=31)
        t, x = g.coordinates()
        exact = np.exp(-((t - 8) ** 2 + (x - 7) ** 2) / 2) * np.cos(0.5 * (t - 8) + (x - 7))
        assert np.max(np.abs(f.space - exact)) < 1e-10

    def test_gaussian_dilation(self):
        spec = GaussianSpec((2.0,), 0.5, (3.0,), 2.0)
        lam = 4.0
        s = spec.scaled(lam)
        x = np.linspace(-3, 3, 101)

        def ev(p, x):
            return p.amp * np.exp(-((x - p.center[0]) ** 2) / (2 * p.width**2)) * np.cos(p.modulation[0] * (x - p.center[0]))

        assert np.allclose(ev(s, x), ev(spec, lam * x), atol=1e-14)

    def test_bump_matches_samples(self):
        g = TorusGrid(1, 256, 16.0)
        f = bump_tensor_field(g, 8.0, 3.0, amp=2.0, band=127)
        (x,) = g.coordinates()
        t = (x - 8.0) / 3.0
        with np.errstate(divide="ignore"):
            exact = 2.0 * np.where(np.abs(t) < 1, np.exp(-1 / (1 - t * t)), 0.0)
        assert np.max(np.abs(f.space - exact)) < 1e-5

    def test_bump_independent_of_resolution(self):
        a = bump_tensor_field(TorusGrid(1, 64, 16.0), 8.0, 3.0, band=15)
        b = bump_tensor_field(TorusGrid(1, 128, 16.0), 8.0, 3.0, band=15)
        assert np.max(np.abs(a.space - b.space[::2])) < 1e-14

    def test_random_band(self, rng):
        g = TorusGrid(2, 32)
        f = random_band_limited(g, rng, band=3)
        k = g.wavenumbers()
        outside = np.any(np.abs(k) > 3, axis=0)
        assert np.all(f.freq[outside] == 0) and f.freq.flat[0] == 0
        assert f.max_abs() == pytest.approx(1.0)

    def test_mode(self):
        g = TorusGrid(1, 16, 2 * np.pi)
        (x,) = g.coordinates()
        assert np.allclose(mode_field(g, -3).space, np.exp(-3j * x), atol=1e-14)

    @pytest.mark.parametrize("kind", ["gaussian", "nonnegative", "bump", "random"])
    def test_deterministic(self, kind):
        g = TorusGrid(1, 64, 16.0)
        a = build_family(FamilySpec(kind, 4, 3), g)
        b = build_family(FamilySpec(kind, 4, 3), g)
        assert len(a) == 4 and all(np.array_equal(x.freq, y.freq) for x, y in zip(a, b))

    def test_nonnegative(self):
        g = TorusGrid(1, 128, 16.0)
        for f in build_family(FamilySpec("nonnegative", 5, 0), g, band=63):
            assert f.space.real.min() > -1e-10

    def test_pairs(self):
        g = TorusGrid(1, 64, 16.0)
        pairs = build_pairs(FamilySpec("gaussian", 3, 1), g)
        flat = build_family(FamilySpec("gaussian", 6, 1), g)
        assert len(pairs) == 3 and np.array_equal(pairs[1][1].freq, flat[3].freq)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown family"):
            build_family(FamilySpec("sawtooth"), TorusGrid(1, 16))


# -------------------------------------------------------------------- reports

def sample_report():
    rep = SweepReport("demo", meta={"seed": 0})
    rep.add(Row.measured("a", {"p": 1.5, "tag": "x"}, 1.0, 3.0, upper=1.0))
    rep.add(Row.measured("b", {"pair": [1, 2]}, 2.0, 1.0, upper=1.0))
    rep.add(Row.measured("c", {}, 0.1, 0.0, assert_=False))
    rep.add(Row.failed("d", {"n": 4}, ValueError("boom")))
    rep.fits["line"] = {"C": 0.5}
    return rep


class TestReport:
    def test_verdicts(self):
        rep = sample_report()
        assert [r.verdict for r in rep.rows] == ["PASS", "FAIL", "INFO", "FAILED"]
        assert rep.rows[0].ratio == 1 / 3 and math.isinf(rep.rows[2].ratio)
        assert rep.counts() == {"PASS": 1, "FAIL": 1, "FAILED": 1, "INFO": 1}
        assert not rep.all_pass
        assert "ValueError: boom" in rep.rows[3].note

    def test_zero_over_zero(self):
        assert Row.measured("z", {}, 0.0, 0.0, upper=0.5).verdict == "PASS"

    def test_json_round_trip(self, tmp_path):
        rep = sample_report()
        path = emit_report(rep, "json", tmp_path)
        back = load_report(path)
        assert back.suite == "demo" and back.fits == rep.fits
        assert [r.verdict for r in back.rows] == [r.verdict for r in rep.rows]
        assert back.rows[0].ratio == rep.rows[0].ratio and math.isnan(back.rows[3].lhs)

    @pytest.mark.parametrize("fmt", ["csv", "json", "plotdata"])
    def test_byte_identical(self, tmp_path, fmt):
        a = emit_report(sample_report(), fmt, tmp_path / "a").read_bytes()
        b = emit_report(sample_report(), fmt, tmp_path / "b").read_bytes()
        assert a == b

    def test_csv_content(self, tmp_path):
        text = emit_report(sample_report(), "csv", tmp_path).read_text().splitlines()
        assert text[0] == "index,check,point,lhs,rhs,ratio,lower,upper,verdict,note"
        assert text[1].startswith("0,a,p=1.5;tag=x,1.0,3.0,0.3333333333333333,-inf,1.0,PASS")
        assert "pair=[1,2]" in text[2]

    def test_empty_report_header_only(self, tmp_path):
        text = emit_report(SweepReport("empty"), "csv", tmp_path).read_text()
        assert text == "index,check,point,lhs,rhs,ratio,lower,upper,verdict,note\n"
        plot = emit_report(SweepReport("empty"), "plotdata", tmp_path).read_text()
        assert plot.count("\n") == 2

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="unknown report format"):
            emit_report(sample_report(), "xml", tmp_path)

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OSError, match="cannot write"):
            emit_report(sample_report(), "csv", blocker / "sub")

    def test_summary(self, tmp_path):
        ok = SweepReport("ok", [Row.measured("a", {}, 1, 2, upper=1)])
        data = json.loads(write_summary([ok, sample_report()], tmp_path).read_text())
        assert data["all_pass"] is False
        assert data["suites"]["ok"] == {"PASS": 1, "FAIL": 0, "FAILED": 0, "INFO": 0, "all_pass": True}


# --------------------------------------------------------------------- suites

SMALL = merge(DEFAULTS, {
    "identities": {"n": 32, "fields": 3, "pairs": 2, "paraproduct": [[1.0, 0.5]]},
    "decay": {"s": [0.5], "m_max": 64, "curve": [16, 32, 64], "test_points": 50},
    "maximal": {"fields": 3},
    "loglemma": {"cases": [{"dim": 1, "p": 2.0}], "max_log2_m": 7},
})


class TestSuites:
    def test_registry(self):
        assert set(SUITES) == {"identities", "leibniz", "loglemma", "decay", "embedding", "symbol", "maximal"}

    @pytest.mark.parametrize("name", ["identities", "decay", "maximal", "loglemma"])
    def test_small_runs_pass(self, name):
        rep = run_suite(name, SMALL, seed=0)
        assert rep.rows and rep.all_pass, [r for r in rep.rows if r.verdict in ("FAIL", "FAILED")]

    def test_aliased_probe_is_recorded(self):
        cfg = merge(SMALL, {"identities": {"aliased_probe": True}})
        rep = run_suite("identities", cfg, seed=0)
        bad = [r for r in rep.rows if r.verdict == "FAILED"]
        assert len(bad) == 1 and "BandLimitExceeded" in bad[0].note

    def test_seed_determinism(self):
        a = run_suite("maximal", SMALL, seed=3).to_dict()
        b = run_suite("maximal", SMALL, seed=3).to_dict()
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


# ------------------------------------------------------------------------ cli

def write_small(tmp_path, extra=""):
    path = tmp_path / "small.toml"
    path.write_text(
        "[decay]\ns = [0.5]\nm_max = 64\ncurve = [16, 32, 64]\ntest_points = 50\n"
        "[identities]\nn = 32\nfields = 3\npairs = 2\nparaproduct = [[1.0, 0.5]]\n" + extra)
    return path


class TestCli:
    def test_success(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = cli.main(["decay", "--config", str(write_small(tmp_path)), "--out", str(out)])
        assert code == 0
        assert {p.name for p in out.iterdir()} == {"decay.csv", "decay.json", "decay.dat", "summary.json"}
        assert "decay" in capsys.readouterr().out

    def test_format_selection(self, tmp_path):
        out = tmp_path / "out"
        cli.main(["decay", "--config", str(write_small(tmp_path)), "--out", str(out), "--format", "csv"])
        assert {p.name for p in out.iterdir()} == {"decay.csv", "summary.json"}

    def test_identical_reruns(self, tmp_path):
        cfg = str(write_small(tmp_path))
        for d in ("a", "b"):
            cli.main(["identities", "--config", cfg, "--out", str(tmp_path / d), "--seed", "4"])
        for name in ("identities.csv", "identities.json", "identities.dat"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_failure_exit_code(self, tmp_path, capsys):
        cfg = write_small(tmp_path, "aliased_probe = true\n")
        assert cli.main(["identities", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
        assert "FAILED" in capsys.readouterr().out

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text('[[leibniz.tuples]]\nsymbol = "one"\ns = 0.1\np1 = 1.1\np2 = 1.1\n')
        assert cli.main(["decay", "--config", str(bad), "--out", str(tmp_path)]) == 2
        assert capsys.readouterr().err.startswith("bilap: error:")

    def test_report_subcommand(self, tmp_path, capsys):
        out = tmp_path / "out"
        cli.main(["decay", "--config", str(write_small(tmp_path)), "--out", str(out)])
        capsys.readouterr()
        assert cli.main(["report", "--out", str(out)]) == 0
        assert capsys.readouterr().out.startswith("decay")
        assert cli.main(["report", "--out", str(tmp_path / "empty")]) == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            cli.main(["nonsense"])
