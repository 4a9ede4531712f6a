import math

import numpy as np
import pytest

from covertlab import cli
from covertlab.cli import CSV_HEADER, bundled_link_table, main, read_link_table


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    return header, rows


def cell(row, key):
    return float(row[key]) if row[key] != "" else None


class TestSweepNbar:
    def test_deterministic_output(self, capsys):
        argv = ["sweep-nbar", "--eta", "0.8", "--n", "1e8", "--grid", "1e-3:1:5:log"]
        code1, out1, _ = run_cli(capsys, *argv)
        code2, out2, _ = run_cli(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_header_and_asymptote_column(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep-nbar", "--preset", "fig4a", "--grid", "1e-3:1:5:log"
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert ",".join(header) == CSV_HEADER + ",asymptote_ebits"
        assert len(rows) == 5
        asymptote = {row["asymptote_ebits"] for row in rows}
        assert len(asymptote) == 1  # constant column

    def test_practical_cutoff_and_ordering(self, capsys):
        _, out, _ = run_cli(capsys, "sweep-nbar", "--preset", "fig4a")
        _, rows = parse_csv(out)
        saw_zero_sr = False
        for row in rows:
            optimal = cell(row, "optimal_ebits")
            single = cell(row, "single_rail_ebits")
            dual = cell(row, "dual_rail_ebits")
            assert optimal is not None and optimal > 0
            if single and single > 0:
                assert optimal > single > dual >= 0 or dual == 0
            if cell(row, "r_sr") == 0.0:
                saw_zero_sr = True
                assert single == 0.0
        assert saw_zero_sr

    def test_missing_eta_is_an_error(self, capsys):
        code, _, err = run_cli(capsys, "sweep-nbar", "--grid", "1e-3:1:3:log")
        assert code == 2
        assert "--eta" in err

    def test_config_file_and_flag_precedence(self, capsys, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("eta=0.5\nn=1e8\ngrid=1e-3:1:3:log\n", encoding="utf-8")
        _, out_cfg, _ = run_cli(capsys, "sweep-nbar", "--config", str(config))
        assert "# eta=0.5" in out_cfg
        _, out_flag, _ = run_cli(
            capsys, "sweep-nbar", "--config", str(config), "--eta", "0.8"
        )
        assert "# eta=0.8" in out_flag

    def test_bad_grid_is_an_error(self, capsys):
        code, _, err = run_cli(
            capsys, "sweep-nbar", "--eta", "0.5", "--n", "1e8", "--grid", "0:1:5:log"
        )
        assert code == 2 and "grid" in err


class TestSweepEta:
    def test_preset_fig5b(self, capsys):
        code, out, _ = run_cli(capsys, "sweep-eta", "--preset", "fig5b")
        assert code == 0
        header, rows = parse_csv(out)
        assert ",".join(header) == CSV_HEADER
        low = [r for r in rows if float(r["abscissa"]) < 0.3]
        assert low and all(cell(r, "single_rail_ebits") == 0.0 for r in low)
        assert all(cell(r, "optimal_ebits") > 0 for r in low)
        high = [r for r in rows if float(r["abscissa"]) > 0.9]
        assert high and all(cell(r, "single_rail_ebits") > 0 for r in high)

    def test_eta_of_one_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "sweep-eta", "--nbar-b", "1e-3", "--n", "1e8", "--grid", "0.5:1.0:3:lin"
        )
        assert code == 2 and "eta" in err

    def test_sqrt_n_scaling_between_runs(self, capsys):
        argv = ["sweep-eta", "--nbar-b", "1e-3", "--grid", "0.5:0.9:3:lin"]
        _, out1, _ = run_cli(capsys, *argv, "--n", "1e9")
        _, out2, _ = run_cli(capsys, *argv, "--n", "2e9")
        _, rows1 = parse_csv(out1)
        _, rows2 = parse_csv(out2)
        for r1, r2 in zip(rows1, rows2):
            for key in ("optimal_ebits", "single_rail_ebits", "dual_rail_ebits"):
                assert cell(r2, key) == pytest.approx(math.sqrt(2.0) * cell(r1, key), rel=1e-12)


class TestSweepFso:
    def test_bundled_table(self, capsys):
        code, out, _ = run_cli(capsys, "sweep-fso")
        assert code == 0
        header, rows = parse_csv(out)
        assert ",".join(header) == CSV_HEADER
        assert len(rows) == 5
        assert "# n_modes=60000000000.0" in out
        practical = [r for r in rows if cell(r, "single_rail_ebits")]
        assert practical and all(float(r["abscissa"]) >= 1550.0 for r in practical)

    def test_preset_fig6_n_modes(self, capsys):
        _, out, _ = run_cli(capsys, "sweep-fso", "--preset", "fig6")
        assert "# n_modes=60000000000.0" in out
        _, out10, _ = run_cli(capsys, "sweep-fso", "--preset", "fig6w10")
        assert "# n_modes=600000000000.0" in out10

    def test_malformed_rows_are_named(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("wavelength_nm,eta,nbar_b\n500,0.5,1e-6\n600,oops,1e-6\n", encoding="utf-8")
        code, _, err = run_cli(capsys, "sweep-fso", "--link-table", str(bad))
        assert code == 2 and ":3:" in err

        bad.write_text("wavelength_nm,eta,nbar_b\n500,0.5,1e-6\n400,0.5,1e-6\n", encoding="utf-8")
        code, _, err = run_cli(capsys, "sweep-fso", "--link-table", str(bad))
        assert code == 2 and "increasing" in err

        bad.write_text("wavelength,eta,nbar\n500,0.5,1e-6\n", encoding="utf-8")
        code, _, err = run_cli(capsys, "sweep-fso", "--link-table", str(bad))
        assert code == 2 and "header" in err

    def test_read_link_table_validates(self, tmp_path):
        table = read_link_table(bundled_link_table())
        assert len(table) == 5
        with pytest.raises(cli.CliError):
            bad = tmp_path / "neg.csv"
            bad.write_text("wavelength_nm,eta,nbar_b\n500,0.5,-1\n", encoding="utf-8")
            read_link_table(str(bad))


class TestPlan:
    def test_plan_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "plan", "--eta", "0.95", "--nbar-b", "1e-3", "--n", "1e8", "--delta", "0.05"
        )
        assert code == 0
        values = dict(
            line.split("=", 1) for line in out.splitlines() if line and not line.startswith("#")
        )
        assert float(values["total_optimal"]) > float(values["total_single_rail"])
        assert float(values["q"]) < 1.0

    def test_zero_rate_reason(self, capsys):
        _, out, _ = run_cli(
            capsys, "plan", "--eta", "0.3", "--nbar-b", "1.0", "--n", "1e8", "--delta", "0.05"
        )
        assert "reason=" in out


class TestVerifyCommand:
    def test_twirl_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "twirl", "--seed", "3")
        assert code == 0
        assert out.count("PASS") == 3
        assert "# 3/3 reports passed" in out

    def test_failure_gives_nonzero_exit(self, capsys, monkeypatch):
        from covertlab import oracles

        monkeypatch.setitem(oracles.TOLERANCES, "twirl_component", 1e-18)
        code, out, _ = run_cli(capsys, "verify", "--suite", "twirl")
        assert code == 1
        assert "FAIL" in out

    def test_byte_identical_given_seed(self, capsys):
        _, out1, _ = run_cli(capsys, "verify", "--suite", "chi2", "--seed", "9")
        _, out2, _ = run_cli(capsys, "verify", "--suite", "chi2", "--seed", "9")
        assert out1 == out2


class TestSampleSecret:
    def test_deterministic_and_well_formed(self, capsys):
        argv = ["sample-secret", "--n", "40", "--q", "0.3", "--vartheta", "0.15", "--seed", "5"]
        code, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        assert code == 0 and out1 == out2
        lines = [l for l in out1.splitlines() if not l.startswith("#")]
        bits, symbols = lines
        assert set(bits) <= {"0", "1"} and len(bits) == 40
        assert len(symbols) == bits.count("1")
        assert "# seed=5" in out1

    def test_q_derived_from_budget(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "sample-secret",
            "--n", "1000000",
            "--eta", "0.8",
            "--nbar-b", "0.01",
            "--delta", "0.05",
            "--seed", "2",
        )
        assert code == 0
        assert "# q=" in out

    def test_writes_to_file(self, capsys, tmp_path):
        out_path = tmp_path / "secret.txt"
        code, out, _ = run_cli(
            capsys, "sample-secret", "--n", "20", "--q", "0.4", "--vartheta", "0.3",
            "--seed", "1", "--out", str(out_path),
        )
        assert code == 0 and out == ""
        assert out_path.read_text().startswith("# command=sample-secret")
