import csv
import json
from itertools import pairwise

import numpy as np
import pytest
from loguru import logger
from pydantic import ValidationError
from typer.testing import CliRunner

from spheig.__main__ import app, run
from spheig.cli.cone import SHELL_COLUMNS, check_ratio, shell_rows
from spheig.cli.exponent import BRACKET_COLUMNS
from spheig.cli.shared import get_msg, parse_values, to_csv
from spheig.cone import ConeDomain, ContractionReport, DecayFit
from spheig.errors import ConfigError, FitError
from spheig.exponent import BracketResult
from spheig.geometry import SphericalDomain
from spheig.models import Branch
from spheig.settings import Settings, settings

runner = CliRunner()

QUARTER = repr(np.pi / 2.0)


@pytest.fixture(autouse=True)
def quiet_logger():
    yield
    logger.remove()
    logger.disable("spheig")


def read_rows(path):
    with path.open() as f:
        return list(csv.DictReader(f))


class TestParsing:
    """Value lists and CSV cells."""

    def test_ranges(self):
        assert parse_values("1:0.5:2") == (1.0, 1.5, 2.0)
        assert parse_values("3:1:2") == ()
        assert parse_values("0.1:0.1:0.3") == (0.1, 0.2, 0.3)

    def test_lists(self):
        assert parse_values("1, 2.5") == (1.0, 2.5)
        assert parse_values(None) == ()

    @pytest.mark.parametrize("text", ["1:2", "1:0:2", "1:-1:0"])
    def test_bad_ranges(self, text):
        with pytest.raises(ValueError):
            parse_values(text)

    def test_csv_cells(self):
        text = to_csv(("a", "b"), [{"a": 0.1, "b": None}])
        assert text == "a,b\n0.1,\n"

    def test_error_messages(self):
        assert get_msg(FitError("no samples", radii=2)) == "no samples"
        assert get_msg(ValueError("could not convert string to float: 'x'")) == "Invalid number in value list: 'x'"


class TestExponentCommand:
    """``spheig exponent``"""

    def test_quarter_arc_json(self, tmp_path):
        out = tmp_path / "exp.json"
        result = runner.invoke(app, ["exponent", "--p", "2", "--domain", "arc", "--alpha", QUARTER, "--out", str(out)])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["beta"] == pytest.approx(2.0, abs=1e-8)
        assert data["normalization"] == pytest.approx(1.0, rel=1e-8)
        assert data["maximality"]["holds"]
        assert len(data["bracket"]) == 5
        assert set(data["tolerances"]) == {"tol", "ode_rtol", "ode_atol"}

    def test_bracket_csv(self, tmp_path):
        out = tmp_path / "exp.csv"
        args = ["exponent", "--alpha", QUARTER, "--steps", "0.2,0.1,0.05", "--format", "csv", "--out", str(out)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        rows = read_rows(out)
        assert [r["k"] for r in rows] == ["0", "1", "2"]
        assert all(float(r["beta_inner"]) > float(r["beta_outer"]) for r in rows)
        assert list(rows[0]) == list(BRACKET_COLUMNS)
        assert all(float(r["tol"]) == 1e-10 for r in rows)

    def test_missing_alpha(self):
        result = runner.invoke(app, ["exponent", "--p", "2"])
        assert result.exit_code == 1

    def test_small_arc_scales_default_steps(self, tmp_path):
        out = tmp_path / "exp.json"
        result = runner.invoke(app, ["exponent", "--alpha", "0.3", "--out", str(out)])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["beta"] == pytest.approx(np.pi / 0.3, abs=1e-7)
        assert data["steps"][0] == pytest.approx(0.075)
        assert data["consistent"]
        assert data["bracket_error"] is None

    def test_cap_close_to_the_sphere(self, tmp_path):
        out = tmp_path / "exp.json"
        args = ["exponent", "--domain", "cap", "--alpha", "3.0", "--dim", "3", "--out", str(out)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["steps"][0] == pytest.approx((np.pi - 3.0) / 2.0)
        assert len(data["bracket"]) == 5

    def test_oversized_steps_keep_the_exponent(self, tmp_path):
        out = tmp_path / "exp.json"
        args = ["exponent", "--alpha", "0.3", "--steps", "0.2,0.1", "--out", str(out)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["beta"] == pytest.approx(np.pi / 0.3, abs=1e-7)
        assert data["bracket"] is None
        assert data["bracket_error"]["error"] == "EmptyDomain"

    def test_oversized_steps_fail_for_csv(self, tmp_path):
        args = ["exponent", "--alpha", "0.3", "--steps", "0.2,0.1", "--format", "csv", "--out", str(tmp_path / "b.csv")]
        assert runner.invoke(app, args).exit_code == 2

    def test_inconsistent_bracket_is_written(self, tmp_path, mocker):
        mocker.patch(
            "spheig.exponent.bracket.approximate_from_outside",
            return_value=BracketResult(
                branch=Branch.SINGULAR,
                steps=[0.2, 0.1, 0.05],
                beta_outer=[3.0, 3.0, 3.0],
                residual_outer=[0.0, 0.0, 0.0],
                beta_out_limit=3.0,
            ),
        )
        out = tmp_path / "exp.json"
        args = ["exponent", "--alpha", QUARTER, "--steps", "0.2,0.1,0.05", "--out", str(out)]
        result = runner.invoke(app, args)
        assert result.exit_code == 2
        data = json.loads(out.read_text())
        assert data["consistent"] is False
        assert data["gap"] < 0.0
        assert data["beta"] == pytest.approx(2.0, abs=1e-8)

    @pytest.mark.slow
    def test_cap_p15_bracket_gap(self, tmp_path):
        out = tmp_path / "exp.json"
        args = ["exponent", "--p", "1.5", "--domain", "cap", "--alpha", "2.0", "--dim", "3", "--out", str(out)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["beta"] > 0.0
        assert abs(data["gap"]) < 1e-3

    def test_same_config_same_run_id(self, tmp_path):
        ids = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            runner.invoke(app, ["exponent", "--alpha", "1.0", "--steps", "0.1,0.05,0.025", "--out", str(out)])
            ids.append(json.loads(out.read_text())["run_id"])
        assert ids[0] == ids[1]


class TestSweepCommand:
    """``spheig sweep``"""

    def test_sector_exponents(self, tmp_path):
        out = tmp_path / "sweep.csv"
        alphas = ",".join(repr(a) for a in (np.pi / 4.0, np.pi / 2.0, np.pi))
        result = runner.invoke(app, ["sweep", "--p", "2", "--alpha", alphas, "--out", str(out)])
        assert result.exit_code == 0, result.output
        rows = read_rows(out)
        assert [float(r["beta"]) for r in rows] == pytest.approx([4.0, 2.0, 1.0], abs=1e-8)
        assert all(r["error"] == "" for r in rows)

    def test_empty_range_writes_header(self, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(app, ["sweep", "--p", "3:1:2", "--alpha", "1.0", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.read_text().splitlines() == [
            "p,alpha,dim,branch,beta,residual,iterations,wall_ms,tol,ode_rtol,ode_atol,error"
        ]

    def test_deterministic_without_timing(self, tmp_path):
        texts = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            args = ["sweep", "--p", "1.5:0.5:2.5", "--alpha", "1.0", "--no-timing", "--out", str(out)]
            runner.invoke(app, args)
            texts.append(out.read_text())
        assert texts[0] == texts[1]
        assert all(r["wall_ms"] == "" for r in read_rows(tmp_path / "a.csv"))

    def test_svg_is_reproducible(self, tmp_path):
        for name in ("a", "b"):
            args = ["sweep", "--p", "2,3", "--alpha", "1.0", "--svg", str(tmp_path / f"{name}.svg")]
            args += ["--out", str(tmp_path / f"{name}.csv")]
            result = runner.invoke(app, args)
            assert result.exit_code == 0, result.output
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_missing_alpha(self):
        assert runner.invoke(app, ["sweep", "--p", "2"]).exit_code == 1

    def test_polygon_rejected(self):
        assert runner.invoke(app, ["sweep", "--alpha", "1.0", "--domain", "polygon"]).exit_code == 1


class TestConeCommand:
    """``spheig cone``"""

    def test_ratio_guard(self):
        cone = ConeDomain(section=SphericalDomain.arc(1.0), a=1.0, b=8.0)
        with pytest.raises(ConfigError, match="b/a"):
            check_ratio(cone)
        check_ratio(cone.model_copy(update={"b": 16.0}))

    def test_small_ratio_exits_with_record(self):
        result = runner.invoke(app, ["cone", "--alpha", QUARTER, "--b", "8"])
        assert result.exit_code == 2

    def test_bad_tau_grid(self):
        result = runner.invoke(app, ["cone", "--alpha", QUARTER, "--tau-grid", "0.5"])
        assert result.exit_code == 1

    def test_shell_rows_carry_run_constants(self):
        report = ContractionReport(
            shells=[1.0, 2.0],
            M=[1.2, 1.1],
            m=[0.8, 0.9],
            osc=[0.4, 0.2],
            c_hat_est=2.0,
            c_hat_alt=2.5,
            theta_fit=0.5,
            bound=0.6,
            boundary_case=False,
            passed=True,
        )
        fit = DecayFit(beta_fit=2.01, r_min=2.0, r_max=16.0, theta0=0.78)
        tolerances = {"tol": 1e-10, "ode_rtol": 1e-11, "ode_atol": 1e-13}
        rows = shell_rows(report, fit, 0.7, tolerances)
        assert [r["j"] for r in rows] == [0, 1]
        assert all(r["beta_fit"] == 2.01 and r["delta1"] == 0.7 and r["tol"] == 1e-10 for r in rows)
        header = to_csv(SHELL_COLUMNS, rows).splitlines()[0]
        assert header == ",".join(SHELL_COLUMNS)
        assert "c_hat_est" in header and "theta_fit" in header

    @pytest.mark.slow
    def test_quarter_plane_csv(self, tmp_path):
        out = tmp_path / "cone.csv"
        args = ["cone", "--p", "2", "--alpha", QUARTER, "--tau-grid", "0,0.5,1", "--format", "csv", "--out", str(out)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        rows = read_rows(out)
        assert list(rows[0]) == list(SHELL_COLUMNS)
        assert len(rows) >= 2
        assert float(rows[0]["beta_fit"]) == pytest.approx(2.0, rel=2e-2)
        assert all(float(r["tol"]) == 1e-10 for r in rows)

    @pytest.mark.slow
    def test_hemisphere_oscillation_decreases(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "cone_n_r", 128)
        out = tmp_path / "cone.json"
        args = ["cone", "--p", "2.5", "--domain", "cap", "--alpha", QUARTER, "--dim", "3"]
        result = runner.invoke(app, [*args, "--b", "65536", "--out", str(out)])
        assert result.exit_code == 0, result.output
        osc = json.loads(out.read_text())["contraction"]["osc"]
        assert len(osc) >= 4
        assert all(later <= earlier * (1.0 + 1e-2) for earlier, later in pairwise(osc))
        assert osc[-1] < osc[0]


class TestVerifyCommand:
    """``spheig verify``"""

    def test_seeded_runs_match(self, tmp_path):
        texts = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            args = ["verify", "--only", "vector-inequality", "--trials", "100", "--seed", "5", "-f", "json"]
            result = runner.invoke(app, [*args, "--out", str(out)])
            assert result.exit_code == 0, result.output
            texts.append(out.read_text())
        assert texts[0] == texts[1]
        data = json.loads(texts[0])
        assert data["passed"]
        assert len(data["checks"]) == 6

    def test_text_report(self, tmp_path):
        out = tmp_path / "verify.txt"
        result = runner.invoke(app, ["verify", "--only", "convexity-bound", "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "# spheig verify seed=0 checks=1"
        assert lines[1].startswith("PASS convexity-bound")

    def test_unknown_check(self):
        assert runner.invoke(app, ["verify", "--only", "nope"]).exit_code == 1


class TestSettings:
    """Solver limits are validated on load."""

    @pytest.mark.parametrize("field", ["newton_max_iter", "picard_max_iter", "picard_retries"])
    def test_iteration_limits_must_be_positive(self, field):
        with pytest.raises(ValidationError):
            Settings(**{field: 0})


def test_run_reports_unhandled_errors(mocker, capsys):
    mocker.patch("spheig.__main__.app", side_effect=ValueError("boom"))
    with pytest.raises(SystemExit) as exc:
        run()
    assert exc.value.code == 1
    assert "Error: boom" in capsys.readouterr().err
