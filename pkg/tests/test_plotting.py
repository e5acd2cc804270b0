"""SVG plot rendering."""

import pytest

from hypertrack.evaluate import compute_metrics, curves_to_csv, read_curves_csv
from hypertrack.plotting import render_metrics_svg


def _curves(tmp_path, name, pred, gt):
    path = tmp_path / f"{name}.curves.csv"
    path.write_text(curves_to_csv(compute_metrics(pred, gt)), encoding="utf-8")
    return read_curves_csv(path)


def test_single_run_renders_flat_curve(tmp_path):
    gt = [(10.0, 20.0, 30.0, 40.0)] * 5
    curves = _curves(tmp_path, "perfect", gt, gt)
    svg = render_metrics_svg([("perfect", curves)])
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 2
    assert "perfect" in svg


def test_two_runs_two_legend_entries(tmp_path):
    gt = [(10.0 + t, 20.0, 30.0, 40.0) for t in range(6)]
    off = [(b[0] + 8, b[1], b[2], b[3]) for b in gt]
    a = _curves(tmp_path, "run_a", gt, gt)
    b = _curves(tmp_path, "run_b", off, gt)
    svg = render_metrics_svg([("run_a", a), ("run_b", b)])
    assert svg.count("<polyline") == 4
    assert "run_a" in svg and "run_b" in svg
    assert "#1f77b4" in svg and "#d62728" in svg


def test_svg_deterministic(tmp_path):
    gt = [(10.0, 20.0, 30.0, 40.0)] * 4
    curves = _curves(tmp_path, "x", gt, gt)
    assert render_metrics_svg([("x", curves)]) == render_metrics_svg([("x", curves)])


def test_empty_series_rejected():
    with pytest.raises(ValueError, match="no metrics"):
        render_metrics_svg([])
