import math
from pathlib import Path

import numpy as np
import pytest

from figplots.cli import main
from figplots.render import FIGURES, SchemaError, build_figure, load_rows, render

GOLDEN_DIR = Path(__file__).resolve().parents[2] / "golden"


@pytest.mark.parametrize("figure,csv_name", [("fig4a", "fig4a"), ("fig5b", "fig5b"), ("fig6", "fig6")])
def test_render_golden_deterministically(figure, csv_name, tmp_path):
    csv_path = GOLDEN_DIR / f"{csv_name}.csv"
    first = tmp_path / "first.png"
    second = tmp_path / "second.png"
    render(figure, csv_path, first)
    render(figure, csv_path, second)
    assert first.stat().st_size > 0
    assert first.read_bytes() == second.read_bytes()


def test_cli_round_trip(tmp_path):
    out = tmp_path / "fig4a.png"
    code = main(["render", "fig4a", "--in", str(GOLDEN_DIR / "fig4a.csv"), "--out", str(out)])
    assert code == 0
    assert out.exists()


def test_empty_cells_break_the_curve(tmp_path):
    csv_path = tmp_path / "gappy.csv"
    csv_path.write_text(
        "abscissa,optimal_ebits,single_rail_ebits,dual_rail_ebits,c_cov,c_rel,r_sr,r_dr,q_max\n"
        "0.1,10.0,5.0,2.0,1,1,0.5,0.4,0.01\n"
        "0.2,11.0,,2.1,1,1,0.5,0.4,0.01\n"
        "0.3,12.0,6.0,2.2,1,1,0.5,0.4,0.01\n",
        encoding="utf-8",
    )
    header, rows = load_rows(csv_path)
    fig = build_figure(FIGURES["fig5b"], header, rows)
    try:
        lines = {line.get_label(): line for line in fig.axes[0].lines}
        ydata = np.asarray(lines["single-rail"].get_ydata(), dtype=float)
        assert math.isnan(ydata[1]) and not math.isnan(ydata[0])
    finally:
        import matplotlib.pyplot as plt

        plt.close(fig)


def test_schema_mismatch_names_the_column(tmp_path):
    csv_path = tmp_path / "bad.csv"
    csv_path.write_text("abscissa,optimal_ebits\n0.1,10.0\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="single_rail_ebits"):
        render("fig5b", csv_path, tmp_path / "out.png")


def test_fig4_requires_asymptote_column(tmp_path):
    # the eta-sweep schema lacks the asymptote column fig4 figures use
    with pytest.raises(SchemaError, match="asymptote_ebits"):
        render("fig4a", GOLDEN_DIR / "fig5b.csv", tmp_path / "out.png")


def test_cli_schema_error_exit_code(tmp_path):
    csv_path = tmp_path / "bad.csv"
    csv_path.write_text("abscissa\n1\n", encoding="utf-8")
    code = main(["render", "fig6", "--in", str(csv_path), "--out", str(tmp_path / "o.png")])
    assert code == 2


def test_unknown_figure_rejected(tmp_path):
    with pytest.raises(SchemaError):
        render("fig9z", GOLDEN_DIR / "fig6.csv", tmp_path / "out.png")
