"""Boundary curves and the samplers that discretize them.

Each curve is a chain of parametric pieces ``t in [0, 1] -> z``.  Piece
endpoints are stored explicitly so adjacent pieces share them bit for bit.
Junctions between pieces are never sampled; corners can attract
root-exponentially clustered samples.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ratcore import _pairs, _unpairs

DEFAULT_SIGMA = 1.5
# clustered offsets below this fraction of the piece are dropped
_UNDERFLOW = 1e-15


@dataclass(frozen=True)
class Piece:
    func: Callable[[np.ndarray], np.ndarray]
    start: complex
    end: complex
    analytic: bool = True

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        z = np.asarray(self.func(t), dtype=np.complex128)
        z = np.where(t == 0.0, self.start, z)
        return np.where(t == 1.0, self.end, z)


@dataclass(frozen=True)
class Curve:
    kind: str
    params: dict
    pieces: tuple
    closed: bool
    corner_params: tuple = ()
    piece_weights: tuple = ()

    @property
    def spec(self):
        if not self.params:
            return _CANONICAL[self.kind]
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{_CANONICAL[self.kind]}:{args}"

    @property
    def npieces(self):
        return len(self.pieces)

    def _is_corner(self, s):
        if self.closed:
            s = s % self.npieces
        return any(math.isclose(s, c) for c in self.corner_params)

    def piece_ends(self, i):
        """Flags ``(start_junction, end_junction, start_corner, end_corner)``."""
        n = self.npieces
        if self.closed and n == 1:
            return True, True, False, False
        start_j = self.closed or i > 0
        end_j = self.closed or i < n - 1
        return start_j, end_j, start_j and self._is_corner(i), end_j and self._is_corner(i + 1)

    def split_total(self, total):
        """Distribute ``total`` samples over the pieces by ``piece_weights``."""
        w = np.asarray(self.piece_weights or [1.0] * self.npieces, dtype=float)
        counts = np.floor(total * w / w.sum()).astype(int)
        counts[np.argmax(w)] += total - counts.sum()
        return [int(c) for c in counts]


@dataclass(frozen=True, eq=False)
class SampleSet:
    Z: np.ndarray
    F: np.ndarray
    curve_id: str
    clustering: dict = field(default_factory=dict)

    def __post_init__(self):
        Z = np.asarray(self.Z, dtype=np.complex128).ravel()
        F = np.asarray(self.F, dtype=np.complex128).ravel()
        if Z.size != F.size:
            raise ValueError("Z and F must have equal length")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "F", F)

    def __len__(self):
        return self.Z.size

    def to_dict(self):
        return {"curve": self.curve_id, "clustering": self.clustering,
                "Z": _pairs(self.Z), "F": _pairs(self.F)}

    @classmethod
    def from_dict(cls, doc):
        try:
            Z = _unpairs(doc["Z"])
            F = _unpairs(doc["F"]) if "F" in doc else np.conj(Z)
        except KeyError as exc:
            raise ValueError(f"sample document lacks field {exc}") from None
        return cls(Z, F, doc.get("curve", "points"), doc.get("clustering", {}))


# ------------------------------------------------------------------ catalog


def _closed_param(fn):
    def func(t):
        return fn(2 * np.pi * t)
    return func


def circle():
    p = Piece(_closed_param(lambda th: np.exp(1j * th)), 1 + 0j, 1 + 0j)
    return Curve("circle", {}, (p,), closed=True)


def rho_ellipse(rho=2.0):
    if not rho > 1:
        raise ValueError("rho must exceed 1")

    def func(t):
        w = rho * np.exp(2j * np.pi * t)
        return (w + 1 / w) / 2

    z0 = complex((rho + 1 / rho) / 2)
    return Curve("rho_ellipse", {"rho": float(rho)}, (Piece(func, z0, z0),), closed=True)


def half_ellipse(rho=2.0):
    if not rho > 1:
        raise ValueError("rho must exceed 1")

    def func(t):
        w = rho * np.exp(1j * np.pi * t)
        return (w + 1 / w) / 2

    a = (rho + 1 / rho) / 2
    return Curve("half_ellipse", {"rho": float(rho)}, (Piece(func, complex(a), complex(-a)),), closed=False)


def polar_squiggle(amp=0.2, freq=5):
    def func(t):
        th = 2 * np.pi * t
        return (1 + amp * np.sin(freq * th)) * np.exp(1j * th)

    return Curve("polar_squiggle", {"amp": float(amp), "freq": float(freq)},
                 (Piece(func, 1 + 0j, 1 + 0j),), closed=True)


def superellipse6():
    def func(t):
        th = 2 * np.pi * t
        rad = (np.cos(th) ** 6 + np.sin(th) ** 6) ** (-1 / 6)
        return rad * np.exp(1j * th)

    return Curve("superellipse6", {}, (Piece(func, 1 + 0j, 1 + 0j),), closed=True)


def _segment(a, b):
    return Piece(lambda t: a + (b - a) * t, a, b)


def inlet(width=0.1, depth=0.7):
    """Unit disk with a rectangular slot cut in along the positive real axis."""
    h = width / 2
    th0 = math.asin(h)
    mouth_top = complex(math.cos(th0), h)
    mouth_bot = complex(math.cos(th0), -h)
    x_tip = 1.0 - depth
    tip_bot = complex(x_tip, -h)
    tip_top = complex(x_tip, h)
    arc = Piece(lambda t: np.exp(1j * (th0 + (2 * np.pi - 2 * th0) * t)), mouth_top, mouth_bot)
    pieces = (arc, _segment(mouth_bot, tip_bot), _segment(tip_bot, tip_top), _segment(tip_top, mouth_top))
    return Curve("inlet", {"width": float(width), "depth": float(depth)}, pieces, closed=True,
                 corner_params=(0.0, 1.0, 2.0, 3.0), piece_weights=(0.5, 0.2, 0.1, 0.2))


def semicircle_pair():
    """Right half of |z - i| = 1 from 2i down to 0, then left half of |z + i| = 1 on to -2i."""
    upper = Piece(lambda t: 1j + np.exp(1j * (np.pi / 2 - np.pi * t)), 2j, 0j)
    lower = Piece(lambda t: -1j + np.exp(1j * (np.pi / 2 + np.pi * t)), 0j, -2j)
    return Curve("semicircle_pair", {}, (upper, lower), closed=False, corner_params=(1.0,))


LSHAPE_VERTICES = (0j, 2 + 0j, 2 + 1j, 1 + 1j, 1 + 2j, 2j)


def lshape():
    v = LSHAPE_VERTICES
    pieces = tuple(_segment(v[i], v[(i + 1) % 6]) for i in range(6))
    return Curve("lshape", {}, pieces, closed=True, corner_params=tuple(float(i) for i in range(6)))


CATALOG = {
    "circle": circle,
    "rho_ellipse": rho_ellipse,
    "half_ellipse": half_ellipse,
    "polar_squiggle": polar_squiggle,
    "superellipse6": superellipse6,
    "inlet": inlet,
    "semicircle_pair": semicircle_pair,
    "lshape": lshape,
}

_CANONICAL = {
    "circle": "circle",
    "rho_ellipse": "ellipse",
    "half_ellipse": "halfellipse",
    "polar_squiggle": "squiggle",
    "superellipse6": "superellipse6",
    "inlet": "inlet",
    "semicircle_pair": "semis",
    "lshape": "lshape",
}

_ALIASES = {alias: kind for kind, alias in _CANONICAL.items()}
_ALIASES.update({kind: kind for kind in CATALOG})
_ALIASES.update({"superellipse": "superellipse6", "semicircles": "semicircle_pair",
                 "half-ellipse": "half_ellipse"})


def parse_curve(spec):
    """Build a curve from a spec string such as ``"ellipse:rho=2"`` or ``"lshape"``."""
    name, _, argstr = spec.strip().partition(":")
    kind = _ALIASES.get(name.strip().lower())
    if kind is None:
        raise ValueError(f"unknown curve {name!r}; known: {', '.join(sorted(_CANONICAL.values()))}")
    kwargs = {}
    for item in filter(None, (a.strip() for a in argstr.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"curve parameter {item!r} is not of the form key=value")
        try:
            kwargs[key.strip()] = float(val)
        except ValueError:
            raise ValueError(f"curve parameter {key!r} needs a number, got {val!r}") from None
    try:
        return CATALOG[kind](**kwargs)
    except TypeError:
        raise ValueError(f"curve {name!r} does not accept parameters {sorted(kwargs)}") from None


# ----------------------------------------------------------------- sampling


def point_at(c, piece, t):
    if not 0 <= piece < c.npieces:
        raise ValueError(f"piece index {piece} out of range for {c.kind} ({c.npieces} pieces)")
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"parameter t={t} outside [0, 1]")
    return complex(c.pieces[piece](t))


def _uniform_params(n, start_j, end_j, periodic):
    k = np.arange(n, dtype=float)
    if periodic:
        return k / n
    if start_j and end_j:
        return (k + 0.5) / n
    if start_j:
        return (k + 1) / n
    if end_j:
        return k / n
    return np.linspace(0.0, 1.0, n)


def clustered_offsets(n, sigma, ends=1, reach_end=True):
    """Root-exponentially graded offsets from a corner.

    With one clustered end the offsets are exp(-sigma (sqrt(n) - sqrt(k))),
    k = 1..n, the last one reaching the far end (or stopping short of it when
    ``reach_end`` is false).  With two ends each half gets n // 2 offsets
    graded toward its own end and mirrored; the midpoint sits at virtual index
    n//2 + 1/2 and is only sampled for odd n.  Returns parameters in (0, 1].
    """
    if ends == 1:
        k = np.arange(1, n + 1, dtype=float)
        top = n if reach_end else n + 0.5
        return np.exp(-sigma * (math.sqrt(top) - np.sqrt(k)))
    m = n // 2
    k = np.arange(1, m + 1, dtype=float)
    d = 0.5 * np.exp(-sigma * (math.sqrt(m + 0.5) - np.sqrt(k)))
    mid = [0.5] if n % 2 else []
    return np.concatenate([d, mid, (1.0 - d)[::-1]])


def _piece_counts(c, n_per_piece):
    if np.ndim(n_per_piece) == 0:
        counts = [int(n_per_piece)] * c.npieces
    else:
        counts = [int(v) for v in n_per_piece]
        if len(counts) != c.npieces:
            raise ValueError(f"{c.kind} has {c.npieces} pieces, got {len(counts)} counts")
    return counts


def _dedupe(Z, curve_id):
    _, first = np.unique(Z, return_index=True)
    first = np.sort(first)
    dropped = Z.size - first.size
    if dropped:
        warnings.warn(f"{curve_id}: removed {dropped} duplicate sample points", RuntimeWarning, stacklevel=3)
    return Z[first], dropped


def sample_uniform(c, n_per_piece):
    """Equispaced parameter samples on every piece; junctions are skipped."""
    counts = _piece_counts(c, n_per_piece)
    if min(counts) < 2:
        raise ValueError("need at least 2 samples per piece")
    chunks = []
    for i, (piece, n) in enumerate(zip(c.pieces, counts)):
        sj, ej, _, _ = c.piece_ends(i)
        periodic = c.closed and c.npieces == 1
        chunks.append(piece(_uniform_params(n, sj, ej, periodic)))
    Z, dropped = _dedupe(np.concatenate(chunks), c.spec)
    return SampleSet(Z, np.conj(Z), c.spec, {"law": "uniform", "n_per_piece": counts, "dropped": dropped})


def sample_clustered(c, n_per_piece, sigma=DEFAULT_SIGMA):
    """Samples graded root-exponentially toward corners.

    Pieces without corner ends fall back to uniform spacing.  Offsets that
    underflow below 1e-15 of the piece are dropped with a warning.
    """
    counts = _piece_counts(c, n_per_piece)
    if min(counts) < 4:
        raise ValueError("clustered sampling needs at least 4 samples per piece")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    chunks = []
    underflow = 0
    for i, (piece, n) in enumerate(zip(c.pieces, counts)):
        sj, ej, sc, ec = c.piece_ends(i)
        if sc and ec:
            t = clustered_offsets(n, sigma, ends=2)
        elif sc or ec:
            far_junction = ej if sc else sj
            d = clustered_offsets(n, sigma, ends=1, reach_end=not far_junction)
            t = d if sc else 1.0 - d
        else:
            t = _uniform_params(n, sj, ej, c.closed and c.npieces == 1)
        off = np.minimum(t, 1.0 - t) if (sc and ec) else (t if sc else (1.0 - t if ec else np.ones_like(t)))
        ok = off >= _UNDERFLOW
        # 1 - d can round to exactly 1 for tiny d
        if sc:
            ok &= t > 0.0
        if ec:
            ok &= t < 1.0
        underflow += int((~ok).sum())
        chunks.append(piece(t[ok]))
    if underflow:
        warnings.warn(f"{c.spec}: dropped {underflow} clustered samples below spacing floor",
                      RuntimeWarning, stacklevel=2)
    Z, dropped = _dedupe(np.concatenate(chunks), c.spec)
    return SampleSet(Z, np.conj(Z), c.spec, {"law": "root_exponential", "sigma": float(sigma),
                                              "n_per_piece": counts, "dropped": dropped + underflow})


def sample_points(Z, curve_id="points"):
    """Wrap user-supplied boundary points as a Schwarz sample set."""
    Z = np.asarray(Z, dtype=np.complex128).ravel()
    return SampleSet(Z, np.conj(Z), curve_id, {"law": "explicit"})
