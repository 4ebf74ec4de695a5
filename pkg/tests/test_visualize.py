from fractions import Fraction

from experiments import STATUS_BUDGET, ReportRow
from visualize import ratio_frame, save_ratio_chart


def rows():
    return [ReportRow("grid-rowcol-3", measured=Fraction(3, 2), bound=Fraction(3, 2)),
            ReportRow("grid-rowcol-4", measured=Fraction(2), bound=Fraction(2)),
            ReportRow("tau-06-1"),
            ReportRow("lazy", status=STATUS_BUDGET)]


def test_ratio_frame_keeps_rows_with_a_bound():
    df = ratio_frame(rows())
    assert list(df["instance"].unique()) == ["grid-rowcol-3", "grid-rowcol-4"]
    assert list(df["series"]) == ["measured", "bound", "measured", "bound"]
    assert df["value"].iloc[0] == 1.5


def test_save_ratio_chart(tmp_path, capsys):
    path = str(tmp_path / "charts" / "dual-grid.pdf")
    assert save_ratio_chart(rows(), "dual-grid", path) == path
    assert (tmp_path / "charts" / "dual-grid.pdf").stat().st_size > 0
    assert "Saved:" in capsys.readouterr().err


def test_save_ratio_chart_without_ratios(tmp_path):
    assert save_ratio_chart(rows()[2:], "trees", str(tmp_path / "trees.pdf")) is None
    assert not (tmp_path / "trees.pdf").exists()
