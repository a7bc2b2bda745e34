"""Schwarz functions by rational fitting, plus reflection and continuation.

A curve's Schwarz function S is analytic near the curve and equals conj(z)
on it.  We fit r ~ S with AAA on samples F = conj(Z) and use
z -> conj(r(z)) as the reflection across the curve.
"""

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .aaafit import FitConfig, FitReport, aaa_fit
from .ratcore import POLE, BarycentricRational, evaluate, is_pole

ORBIT_ESCAPE = 1e8
CYCLE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SchwarzApprox:
    rat: BarycentricRational
    curve_id: str
    fit: FitReport
    tol_used: float

    def __call__(self, z):
        return evaluate(self.rat, z)

    def to_dict(self):
        doc = self.rat.to_dict()
        doc.update(curve=self.curve_id, tol=self.tol_used, report=self.fit.to_dict())
        return doc

    @classmethod
    def from_dict(cls, doc):
        rat = BarycentricRational.from_dict(doc)
        report = FitReport.from_dict(doc["report"]) if "report" in doc else FitReport(0, float("nan"), False)
        return cls(rat, doc.get("curve", "points"), report, float(doc.get("tol", float("nan"))))

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def fit_schwarz(samples, cfg=None):
    """Fit the Schwarz function of the sampled curve."""
    cfg = cfg or FitConfig()
    if not np.array_equal(samples.F, np.conj(samples.Z)):
        raise ValueError("Schwarz samples need F == conj(Z)")
    rat, report = aaa_fit(samples.Z, samples.F, cfg)
    return SchwarzApprox(rat, samples.curve_id, report, cfg.rel_tol)


def reflect(s, z):
    """z -> conj(r(z)); vectorized, pole hits propagate as the sentinel."""
    w = s(z)
    return np.conj(w) if np.ndim(w) else complex(np.conj(w))


@dataclass
class Orbit:
    points: list
    two_cycle: bool
    escaped: bool = False

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def orbit(s, z0, k, cycle_tol=CYCLE_TOL):
    """Iterate the reflection ``k`` times from ``z0``.

    ``two_cycle`` is set when the last two pairs of iterates agree to within
    ``cycle_tol``.  An orbit that hits a pole or grows beyond 1e8 stops early
    with ``escaped=True``.
    """
    if k < 1:
        raise ValueError("orbit needs k >= 1")
    pts = []
    z = complex(z0)
    escaped = False
    for _ in range(k):
        z = reflect(s, z)
        if is_pole(z) or abs(z) > ORBIT_ESCAPE:
            escaped = True
            break
        pts.append(z)
    seq = [complex(z0)] + pts
    two_cycle = (not escaped and len(seq) >= 3
                 and abs(seq[-1] - seq[-3]) <= cycle_tol
                 and (len(seq) < 4 or abs(seq[-2] - seq[-4]) <= cycle_tol))
    return Orbit(pts, bool(two_cycle), escaped)


class Parity(str, Enum):
    REAL_ON_GAMMA = "real_on_gamma"
    IMAG_ON_GAMMA = "imag_on_gamma"


def continue_function(s, f, z, parity=Parity.REAL_ON_GAMMA):
    """Continue ``f`` across the curve by reflection.

    For f real on the curve this is conj(f(conj(r(z)))); for f imaginary on
    the curve the sign flips.  The caller guarantees that f is analytic at the
    reflected point.
    """
    parity = Parity(parity)
    zr = reflect(s, z)
    if np.ndim(zr) == 0 and is_pole(zr):
        return POLE
    val = np.conj(f(zr))
    if parity is Parity.IMAG_ON_GAMMA:
        val = -val
    if np.ndim(val) == 0:
        return complex(val)
    return np.where(is_pole(zr), POLE, val)


def involution_error(s, z):
    """|conj(r(conj(r(z)))) - z|, or +inf where a pole is hit."""
    z = np.asarray(z, dtype=np.complex128)
    back = reflect(s, reflect(s, z))
    with np.errstate(invalid="ignore"):
        err = np.abs(back - z)
    err = np.where(is_pole(back), np.inf, err)
    return float(err) if err.ndim == 0 else err


# ------------------------------------------------------------------ oracles


def oracle_circle(z):
    """Exact Schwarz function of the unit circle, 1/z."""
    z = complex(z)
    if z == 0:
        raise ValueError("the unit circle's Schwarz function is singular at 0")
    return 1 / z


def _sqrt_from_above(w):
    # on the negative real axis take the +0j side regardless of the zero's sign
    w = np.asarray(w, dtype=np.complex128)
    w = np.where(w.imag == 0, w.real + 0j, w)
    return np.sqrt(w)


@dataclass(frozen=True)
class EllipseOracle:
    """Closed-form Schwarz function of the rho-ellipse and its two branches.

    S1, S2 = a z -/+ b sqrt(z^2 - 1), with the principal square root (its cut
    taken from above).  ``principal`` is the determination with its cut on
    [-1, 1] only, which equals conj(z) along the whole ellipse.
    """

    rho: float
    a: float = field(init=False)
    b: float = field(init=False)

    def __post_init__(self):
        if not self.rho > 1:
            raise ValueError("rho must exceed 1")
        r2 = self.rho ** 2
        object.__setattr__(self, "a", (r2 + 1 / r2) / 2)
        object.__setattr__(self, "b", (r2 - 1 / r2) / 2)

    @property
    def reflection_cut(self):
        """Real-axis rays (-inf, -a] and [a, inf) reflected from [-1, 1]."""
        return self.a

    def root(self, z):
        return _sqrt_from_above(np.asarray(z, dtype=np.complex128) ** 2 - 1)

    def s1(self, z):
        out = self.a * np.asarray(z, dtype=np.complex128) - self.b * self.root(z)
        return complex(out) if out.ndim == 0 else out

    def s2(self, z):
        out = self.a * np.asarray(z, dtype=np.complex128) + self.b * self.root(z)
        return complex(out) if out.ndim == 0 else out

    def principal(self, z):
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore"):
            root = z * _sqrt_from_above(1 - 1 / z**2)
        out = self.a * z - self.b * root
        return complex(out) if out.ndim == 0 else out


def oracle_ellipse(o, z, branch="S1"):
    if branch == "S1":
        return o.s1(z)
    if branch == "S2":
        return o.s2(z)
    raise ValueError(f"branch must be 'S1' or 'S2', got {branch!r}")


def branch_error(o, s, z):
    """Distance from r(z) to the closer of the two exact ellipse branches."""
    rz = s(z)
    with np.errstate(invalid="ignore"):
        err = np.minimum(np.abs(rz - o.s1(z)), np.abs(rz - o.s2(z)))
    err = np.where(is_pole(rz), np.inf, err)
    return float(err) if np.ndim(err) == 0 else err


def oracle_for(curve_id):
    """Ellipse oracle for ellipse-family curve ids, else None."""
    name, _, args = curve_id.partition(":")
    if name not in ("ellipse", "halfellipse", "rho_ellipse", "half_ellipse"):
        return None
    rho = 2.0
    for item in filter(None, args.split(",")):
        key, _, val = item.partition("=")
        if key.strip() == "rho":
            rho = float(val)
    return EllipseOracle(rho)
