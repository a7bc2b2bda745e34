"""Error fields on rectangular grids, region labels, and CSV/JSON/SVG export."""

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from xml.sax.saxutils import quoteattr

import numpy as np

from .ratcore import poles_and_residues
from .schwarz import branch_error, involution_error, oracle_for

LABELS = ("dark", "light", "white", "pole")
DARK, LIGHT, WHITE, POLE_CELL = range(4)
METRICS = ("involution", "branch_vs_oracle")

_FILL = {DARK: "#1b7837", LIGHT: "#a6dba0", POLE_CELL: "#2166ac"}
_FILL_BRANCH = {DARK: "#08519c", LIGHT: "#9ecae1", POLE_CELL: "#d95f02"}


@dataclass(frozen=True, eq=False)
class FieldGrid:
    x_range: tuple
    y_range: tuple
    nx: int
    ny: int
    values: np.ndarray
    labels: np.ndarray
    levels: tuple
    metric: str = "involution"
    provenance: dict = field(default_factory=dict)
    poles: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))

    @property
    def x(self):
        return np.linspace(*self.x_range, self.nx)

    @property
    def y(self):
        return np.linspace(*self.y_range, self.ny)

    def points(self):
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        return X + 1j * Y

    def mask(self, *names):
        codes = [LABELS.index(n) for n in names]
        return np.isin(self.labels, codes)

    def to_dict(self):
        return {
            "metric": self.metric,
            "x_range": list(map(float, self.x_range)),
            "y_range": list(map(float, self.y_range)),
            "nx": self.nx,
            "ny": self.ny,
            "levels": list(map(float, self.levels)),
            # pole cells carry null; their label already says "pole"
            "values": [[v if np.isfinite(v) else None for v in row] for row in self.values.tolist()],
            "labels": [[LABELS[c] for c in row] for row in self.labels],
            "poles": [[float(p.real), float(p.imag)] for p in self.poles],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, doc):
        nx, ny = int(doc["nx"]), int(doc["ny"])
        values = np.array([[np.inf if v is None else v for v in row] for row in doc["values"]],
                          dtype=float).reshape(nx, ny)
        labels = np.array([[LABELS.index(c) for c in row] for row in doc["labels"]], dtype=np.int8).reshape(nx, ny)
        poles = np.array([complex(a, b) for a, b in doc.get("poles", [])], dtype=np.complex128)
        return cls(tuple(doc["x_range"]), tuple(doc["y_range"]), nx, ny, values, labels,
                   tuple(doc["levels"]), doc.get("metric", "involution"), doc.get("provenance", {}), poles)


def classify(values, levels):
    """Label codes for metric values at thresholds ``(level_dark, level_light)``."""
    dark, light = levels
    if not 0 < dark < light:
        raise ValueError(f"levels must satisfy 0 < dark < light, got {levels}")
    v = np.asarray(values, dtype=float)
    lab = np.full(v.shape, WHITE, dtype=np.int8)
    lab[v <= light] = LIGHT
    lab[v <= dark] = DARK
    lab[~np.isfinite(v)] = POLE_CELL
    return lab


def default_box(Z, factor=1.5):
    """Square box ``factor`` times the extent of the points, same center."""
    Z = np.asarray(Z)
    cx = (Z.real.min() + Z.real.max()) / 2
    cy = (Z.imag.min() + Z.imag.max()) / 2
    half = factor * max(np.ptp(Z.real), np.ptp(Z.imag)) / 2
    return (cx - half, cx + half), (cy - half, cy + half)


def evaluate_field(s, metric="involution", x_range=(-2.5, 2.5), y_range=(-2.5, 2.5),
                   nx=400, ny=400, levels=(1e-8, 1e-1), oracle=None, workers=1):
    """Evaluate an error metric of ``s`` on an nx-by-ny grid and label it.

    ``involution`` is |conj(r(conj(r(z)))) - z|; ``branch_vs_oracle`` is the
    distance from r(z) to the closer exact ellipse branch and needs an
    oracle (taken from the fit's curve id when not given).  With
    ``workers > 1`` grid columns are evaluated on a thread pool; every point
    is independent, so the result does not depend on ``workers``.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    nx, ny = int(nx), int(ny)
    if nx < 1 or ny < 1:
        raise ValueError(f"grid must be non-empty, got {nx}x{ny}")
    xs = np.linspace(*x_range, nx)
    ys = np.linspace(*y_range, ny)
    Zg = xs[:, None] + 1j * ys[None, :]
    if metric == "involution":
        fn = lambda Z: involution_error(s, Z)  # noqa: E731
    else:
        oracle = oracle or oracle_for(s.curve_id)
        if oracle is None:
            raise ValueError(f"metric 'branch_vs_oracle' needs an ellipse oracle; curve is {s.curve_id!r}")
        fn = lambda Z: branch_error(oracle, s, Z)  # noqa: E731
    if workers > 1 and ny > 1:
        blocks = np.array_split(np.arange(ny), min(int(workers), ny))
        with ThreadPoolExecutor(int(workers)) as ex:
            parts = list(ex.map(lambda b: np.asarray(fn(Zg[:, b]), dtype=float), blocks))
        vals = np.concatenate(parts, axis=1)
    else:
        vals = np.asarray(fn(Zg), dtype=float).reshape(nx, ny)
    lab = classify(vals, levels)
    poles = poles_and_residues(s.rat).poles if s.rat.m >= 2 else np.zeros(0, dtype=np.complex128)
    prov = {"curve": s.curve_id, "degree": s.rat.degree, "tol": s.tol_used}
    return FieldGrid((float(x_range[0]), float(x_range[1])), (float(y_range[0]), float(y_range[1])),
                     nx, ny, vals, lab, tuple(map(float, levels)), metric, prov, poles)


def export(g, fmt, path, samples=None):
    """Write ``g`` as csv, json or svg.  ``samples`` adds the curve to the svg."""
    try:
        if fmt == "csv":
            _write_csv(g, path)
        elif fmt == "json":
            with open(path, "w") as fh:
                json.dump(g.to_dict(), fh)
        elif fmt == "svg":
            with open(path, "w") as fh:
                fh.write(to_svg(g, samples))
        else:
            raise ValueError(f"unknown export format {fmt!r}; use csv, json or svg")
    except OSError as exc:
        raise OSError(f"cannot write field to {path}: {exc.strerror or exc}") from exc


def _write_csv(g, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value", "label"])
        xs, ys = g.x, g.y
        for i in range(g.nx):
            for j in range(g.ny):
                v = float(g.values[i, j])
                w.writerow([repr(float(xs[i])), repr(float(ys[j])), repr(v) if np.isfinite(v) else "",
                            LABELS[g.labels[i, j]]])


def to_svg(g, samples=None, size=600):
    x0, x1 = g.x_range
    y0, y1 = g.y_range
    span = max(x1 - x0, y1 - y0) or 1.0
    k = size / span
    dx = (x1 - x0) / max(g.nx - 1, 1)
    dy = (y1 - y0) / max(g.ny - 1, 1)
    W, H = (x1 - x0 + dx) * k, (y1 - y0 + dy) * k

    def px(x):
        return (x - x0 + dx / 2) * k

    def py(y):
        return (y1 - y + dy / 2) * k

    fills = _FILL_BRANCH if g.metric == "branch_vs_oracle" else _FILL
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.1f}" height="{H:.1f}" '
           f'viewBox="0 0 {W:.3f} {H:.3f}">',
           f'<rect class="background" x="0" y="0" width="{W:.3f}" height="{H:.3f}" fill="white"/>']
    xs, ys = g.x, g.y
    cw, ch = dx * k, dy * k
    for i in range(g.nx):
        for j in range(g.ny):
            c = int(g.labels[i, j])
            if c == WHITE:
                continue
            out.append(f'<rect class="cell {LABELS[c]}" x="{px(xs[i]) - cw / 2:.3f}" '
                       f'y="{py(ys[j]) - ch / 2:.3f}" width="{cw:.3f}" height="{ch:.3f}" fill="{fills[c]}"/>')
    if samples is not None and len(samples):
        pts = " ".join(f"{px(z.real):.3f},{py(z.imag):.3f}" for z in np.asarray(samples))
        out.append(f'<polyline class="curve" points={quoteattr(pts)} fill="none" stroke="black" '
                   f'stroke-width="1"/>')
    r = max(1.5, 0.004 * size)
    for p in g.poles:
        if x0 <= p.real <= x1 and y0 <= p.imag <= y1:
            out.append(f'<circle class="pole" cx="{px(p.real):.3f}" cy="{py(p.imag):.3f}" r="{r:.2f}" fill="#d7191c"/>')
    out.append("</svg>")
    return "\n".join(out)
