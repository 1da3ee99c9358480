import json
import logging
import subprocess
import sys

import pytest

from censpred import cli, regions
from censpred.cli import ParseError, ingest, main
from censpred.exceptions import NumericalError
from censpred.verify import CoverageReport


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestIngest:
    def test_murthy_statistic(self):
        sample = ingest("murthy", 20, 30)
        assert sample.n == 30 and sample.m == 20
        assert sum(sample.values) + 10 * sample.last == pytest.approx(35.79, abs=1e-10)

    def test_one_per_line(self, tmp_path):
        f = tmp_path / "d.txt"
        f.write_text("0.5\n0.2\n\n0.9  # comment\n")
        sample = ingest(f, 2)
        assert sample.values == (0.2, 0.5) and sample.n == 3

    def test_empty_file(self, tmp_path):
        f = tmp_path / "empty.csv"
        f.write_text("\n# nothing\n")
        with pytest.raises(ParseError, match="no values"):
            ingest(f, 1)

    def test_unsorted_is_sorted_with_notice(self, tmp_path, caplog):
        f = tmp_path / "u.csv"
        f.write_text("0.9,0.1,0.5\n")
        with caplog.at_level(logging.WARNING, logger="censpred"):
            sample = ingest(f, 3, 5)
        assert sample.values == (0.1, 0.5, 0.9)
        assert "not sorted" in caplog.text

    @pytest.mark.parametrize("body,pattern", [
        ("0.1\n0.2\nabc\n", ":3: non-numeric"),
        ("0.1,0.2\n-0.3\n", ":2: value"),
        ("0.1\n0\n", ":2: value"),
    ])
    def test_bad_tokens_report_line(self, tmp_path, body, pattern):
        f = tmp_path / "bad.csv"
        f.write_text(body)
        with pytest.raises(ParseError, match=pattern):
            ingest(f, 1)

    def test_m_exceeds_count(self, tmp_path):
        f = tmp_path / "few.csv"
        f.write_text("0.1,0.2\n")
        with pytest.raises(ParseError, match="exceeds"):
            ingest(f, 3)


class TestHpd:
    def test_murthy_inequality(self, capsys, tmp_path):
        out = tmp_path / "hpd.json"
        code, text = run(capsys, "hpd", "--data", "murthy", "--n", "30", "--m", "20", "--out", str(out))
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["inequality"] == "0.2794 z1 + 0.2515 z2 <= 0.2606"
        assert "0.2794 z1 + 0.2515 z2 <= 0.2606" in text
        region = regions.region_from_dict(payload["region"])
        assert region.bound == pytest.approx(0.2606, abs=5e-4)

    def test_three_dimensional_skips_svg(self, capsys, tmp_path, caplog):
        svg = tmp_path / "r.svg"
        code, text = run(capsys, "hpd", "--data", "murthy", "--n", "30", "--m", "20", "--next", "3",
                         "--svg", str(svg), "--json")
        assert code == 0
        payload = json.loads(text)
        assert payload["svg"] == "skipped: SVG is 2D-only"
        assert len(payload["region"]["coefficients"]) == 3
        assert not svg.exists()

    def test_two_dimensional_svg(self, capsys, tmp_path):
        svg = tmp_path / "r.svg"
        code, _ = run(capsys, "hpd", "--data", "murthy", "--n", "30", "--m", "20", "--svg", str(svg))
        assert code == 0
        body = svg.read_text()
        assert body.startswith("<svg") and 'viewBox="0 0 600 600"' in body and "<polygon" in body

    def test_bound_decreases_with_lambda(self, capsys):
        bounds = []
        for lam in ("0.05", "0.5"):
            code, text = run(capsys, "hpd", "--data", "murthy", "--n", "30", "--m", "20", "--lambda", lam, "--json")
            assert code == 0
            bounds.append(json.loads(text)["region"]["bound"])
        assert bounds[1] < bounds[0]


class TestRegion2d:
    def test_murthy_table(self, capsys, tmp_path):
        out = tmp_path / "band.json"
        svg = tmp_path / "band.svg"
        code, text = run(capsys, "region2d", "--data", "murthy", "--n", "30", "--m", "20", "--r", "21",
                         "--s", "30", "--out", str(out), "--svg", str(svg))
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["A"][0] == 0.0 and payload["A"][1] == pytest.approx(0.722, abs=2e-3)
        row = next(r for r in payload["slices"] if r["y1"] == 0.5)
        assert row["B"][0] == 0.0 and row["B"][1] == pytest.approx(13.059, abs=5e-3)
        assert "A = [0.0000, 0.7222]" in text
        for name in ("band-spacings.svg", "band-order.svg"):
            body = (tmp_path / name).read_text()
            assert 'stroke-dasharray' in body and "<polygon" in body

    def test_order_statistic_offset(self, capsys):
        code, text = run(capsys, "region2d", "--data", "murthy", "--n", "30", "--m", "20", "--json")
        assert code == 0
        payload = json.loads(text)
        spacing, order = payload["region"], payload["region_order_statistics"]
        assert order["A"][0] == pytest.approx(spacing["A"][0] + 1.74, abs=1e-12)
        assert order["A"][1] == pytest.approx(spacing["A"][1] + 1.74, abs=1e-12)

    def test_lambda_020_positive_lower_bounds(self, capsys):
        code, text = run(capsys, "region2d", "--data", "murthy", "--n", "30", "--m", "20",
                         "--lambda", "0.2", "--json")
        assert code == 0
        payload = json.loads(text)
        assert payload["A"][1] == pytest.approx(0.4258, abs=5e-4)
        assert all(r["B"][0] > 0 for r in payload["slices"])
        region = regions.region_from_dict(payload["region"])
        assert (region.lo > 0).all()


class TestCoverageCommand:
    def test_byte_identical_csv(self, capsys, tmp_path):
        paths = []
        for k in range(2):
            out = tmp_path / f"cov{k}.json"
            code, text = run(capsys, "coverage", "--n", "30", "--m", "20", "--next", "2", "--trials", "1000",
                             "--seed", "5", "--out", str(out))
            assert code == 0
            paths.append(out)
        assert "target 0.9500" in text
        a, b = (p.with_suffix(".csv").read_bytes() for p in paths)
        assert a == b
        assert paths[0].read_bytes() == paths[1].read_bytes()
        report = CoverageReport.from_json(paths[0].read_text())
        assert report.thetas == [0.5, 1.0, 2.0]

    def test_single_theta(self, capsys):
        code, text = run(capsys, "coverage", "--n", "30", "--m", "20", "--next", "2", "--trials", "1000",
                         "--theta", "1.5", "--json")
        assert code == 0
        report = CoverageReport.from_json(text)
        assert report.thetas == [1.5] and len(report.coverage) == 1


class TestConfigAndExitCodes:
    def test_config_file_with_override(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"data": "murthy", "n": 30, "m": 20, "lambda": 0.5}))
        code, text = run(capsys, "hpd", "--config", str(cfg), "--json")
        assert code == 0
        assert json.loads(text)["lambda"] == 0.5
        code, text = run(capsys, "hpd", "--config", str(cfg), "--lambda", "0.05", "--json")
        assert json.loads(text)["inequality"].endswith("0.2606")

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"data": "murthy", "m": 20, "colour": "red"}))
        assert run(capsys, "hpd", "--config", str(cfg))[0] == 2

    @pytest.mark.parametrize("argv", [
        ["hpd", "--data", "murthy", "--n", "30", "--m", "40"],
        ["hpd", "--data", "murthy", "--n", "30", "--m", "20", "--lambda", "1.5"],
        ["region2d", "--data", "murthy", "--n", "30", "--m", "20", "--r", "20", "--s", "30"],
        ["hpd", "--data", "/nonexistent/file.csv", "--m", "2"],
        ["density", "--data", "murthy", "--n", "30", "--m", "20", "--at", "0.1"],
    ])
    def test_validation_exit_code(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_numerical_exit_code(self, capsys, monkeypatch):
        def boom(*args, **kwargs):
            raise NumericalError("did not converge")

        monkeypatch.setattr(regions, "hpd_region", boom)
        assert run(capsys, "hpd", "--data", "murthy", "--n", "30", "--m", "20")[0] == 3

    def test_density_command(self, capsys):
        code, text = run(capsys, "density", "--data", "murthy", "--n", "30", "--m", "20", "--at", "0.1,0.2", "--json")
        assert code == 0
        assert json.loads(text)["density"] > 0

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "censpred", "hpd", "--data", "murthy", "--n", "30", "--m", "20"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert "0.2794 z1 + 0.2515 z2 <= 0.2606" in proc.stdout

    def test_default_config_values(self):
        cfg = cli.AnalysisConfig()
        assert (cfg.alpha, cfg.beta, cfg.lam, cfg.grid) == (0.0, 0.0, 0.05, 256)
