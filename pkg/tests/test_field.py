import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schwarzfun.field import LABELS, FieldGrid, classify, default_box, evaluate_field, export, to_svg
from schwarzfun.ratcore import BarycentricRational
from schwarzfun.schwarz import SchwarzApprox, involution_error


@pytest.fixture(scope="module")
def grid(ellipse_fit):
    return evaluate_field(ellipse_fit, "involution", (-2.5, 2.5), (-2.5, 2.5), 41, 37)


def test_classify_thresholds():
    v = np.array([0, 1e-9, 1e-8, 5e-3, 0.1, 0.2, np.inf, np.nan])
    lab = classify(v, (1e-8, 1e-1))
    assert [LABELS[c] for c in lab] == ["dark", "dark", "dark", "light", "light", "white", "pole", "pole"]
    with pytest.raises(ValueError):
        classify(v, (0.1, 0.01))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=1, max_size=50), st.floats(1e-12, 1), st.floats(1e-12, 1))
def test_levels_monotone(values, d1, d2):
    lo, hi = sorted((d1, d2))
    if lo == hi:
        return
    a = classify(values, (lo, 2.0)) == 0
    b = classify(values, (hi, 2.0)) == 0
    assert np.all(b[a])
    lab = classify(values, (lo, 2.0))
    assert np.all(np.isin(lab, range(len(LABELS))))


def test_grid_shape_and_partition(grid):
    assert grid.values.shape == grid.labels.shape == (41, 37)
    total = sum(grid.mask(n).sum() for n in LABELS)
    assert total == 41 * 37
    assert grid.x[0] == -2.5 and grid.y[-1] == 2.5
    assert grid.points()[3, 5] == complex(grid.x[3], grid.y[5])


def test_values_independent_of_workers(ellipse_fit):
    a = evaluate_field(ellipse_fit, "involution", (-2, 2), (-2, 2), 30, 33, workers=1)
    b = evaluate_field(ellipse_fit, "involution", (-2, 2), (-2, 2), 30, 33, workers=4)
    assert np.array_equal(a.values, b.values)
    # evaluation order: the same points shuffled give the same numbers
    pts = a.points().ravel()
    perm = np.random.default_rng(1).permutation(pts.size)
    shuffled = involution_error(ellipse_fit, pts[perm])
    back = np.empty_like(shuffled)
    back[perm] = shuffled
    assert np.array_equal(back.reshape(a.values.shape), a.values)


def test_branch_metric_needs_oracle():
    r = BarycentricRational([1, -1], [1, -1], [1, 1])
    from schwarzfun.aaafit import FitReport
    s = SchwarzApprox(r, "squiggle", FitReport(1, 0.0, True), 1e-13)
    with pytest.raises(ValueError, match="oracle"):
        evaluate_field(s, "branch_vs_oracle", nx=3, ny=3)
    with pytest.raises(ValueError, match="metric"):
        evaluate_field(s, "bogus", nx=3, ny=3)
    # a pole exactly on a grid node gets the pole label
    g = evaluate_field(s, "involution", (-1, 1), (-1, 1), 3, 3)
    assert LABELS[g.labels[1, 1]] == "pole"


def test_json_roundtrip_and_no_nonfinite(tmp_path, grid):
    g = FieldGrid(grid.x_range, grid.y_range, 2, 2, np.array([[1e-9, np.inf], [0.5, 1e-3]]),
                  classify(np.array([[1e-9, np.inf], [0.5, 1e-3]]), (1e-8, 1e-1)), (1e-8, 1e-1))
    p = tmp_path / "g.json"
    export(g, "json", p)
    text = p.read_text()
    assert "Infinity" not in text and "NaN" not in text
    back = FieldGrid.from_dict(json.loads(text))
    assert np.array_equal(back.values, g.values) and np.array_equal(back.labels, g.labels)
    export(grid, "json", p)
    back = FieldGrid.from_dict(json.loads(p.read_text()))
    assert np.array_equal(back.labels, grid.labels)


def test_csv_export(tmp_path, grid):
    p = tmp_path / "g.csv"
    export(grid, "csv", p)
    rows = list(csv.DictReader(p.open()))
    assert len(rows) == 41 * 37
    assert set(r["label"] for r in rows) <= set(LABELS)
    assert float(rows[0]["x"]) == -2.5 and float(rows[0]["y"]) == -2.5


def test_svg_is_wellformed(tmp_path, grid, ellipse_samples):
    svg = to_svg(grid, ellipse_samples.Z)
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    cells = root.findall(f"{ns}rect")
    assert len(cells) - 1 == int((grid.labels != LABELS.index("white")).sum())
    assert len(root.findall(f"{ns}polyline")) == 1
    inside = [p for p in grid.poles if -2.5 <= p.real <= 2.5 and -2.5 <= p.imag <= 2.5]
    assert len(root.findall(f"{ns}circle")) == len(inside) > 0


def test_export_errors(tmp_path, grid):
    with pytest.raises(ValueError):
        export(grid, "png", tmp_path / "g.png")
    with pytest.raises(OSError):
        export(grid, "csv", tmp_path / "missing" / "g.csv")


def test_default_box():
    xr, yr = default_box(np.array([0, 2, 1j]))
    assert xr == (-0.5, 2.5) and yr == (-1.0, 2.0)


def test_near_curve_is_accurate(ellipse_fit):
    g = evaluate_field(ellipse_fit, "involution", (-2.5, 2.5), (-2.5, 2.5), 60, 60)
    z = g.points()
    a1, b1 = 1.25, 0.75
    near = np.abs((z.real / a1) ** 2 + (z.imag / b1) ** 2 - 1) < 0.05
    assert near.any()
    assert np.all(g.mask("dark", "light")[near])
