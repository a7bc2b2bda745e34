"""Rational functions in barycentric form.

    r(z) = sum_j w_j f_j / (z - z_j)  /  sum_j w_j / (z - z_j)

The representation interpolates f_j at every support point z_j whose weight
is nonzero.  Poles and zeros come from the (m+1)x(m+1) arrowhead pencil.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from ._kernels import POLE

#: Relative radius below which a point counts as sitting on a support point.
NEAR_SUPPORT = 1e-13
#: Poles beyond this multiple of the support diameter are flagged off-scale.
OFFSCALE_FACTOR = 1e6
# eigenvalues of the pencil beyond this relative size are treated as infinite
_INFINITE_EIG = 1e14
# |r| at a numerator root, relative to max|f_j|, below which it counts as a zero
_ZERO_TOL = 1e-8


def is_pole(value):
    """True where ``value`` is the pole sentinel (any nonfinite complex)."""
    return ~np.isfinite(value)


def _as_complex_vector(x):
    a = np.array(x, dtype=np.complex128).ravel()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BarycentricRational:
    """Support points, values and weights of a barycentric rational.

    Instances are callable: ``r(z)`` accepts a scalar or any array shape.
    """

    support: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        zj = _as_complex_vector(self.support)
        fj = _as_complex_vector(self.values)
        wj = _as_complex_vector(self.weights)
        if not (zj.size == fj.size == wj.size):
            raise ValueError("support, values and weights must have equal length")
        if zj.size < 1:
            raise ValueError("a barycentric rational needs at least one support point")
        if not (np.all(np.isfinite(zj)) and np.all(np.isfinite(fj)) and np.all(np.isfinite(wj))):
            raise ValueError("support, values and weights must be finite")
        if not np.any(wj != 0):
            raise ValueError("weight vector is identically zero")
        if zj.size > 1:
            diffs = np.abs(zj[:, None] - zj[None, :])
            np.fill_diagonal(diffs, np.inf)
            if diffs.min() == 0:
                raise ValueError("support points must be pairwise distinct")
        object.__setattr__(self, "support", zj)
        object.__setattr__(self, "values", fj)
        object.__setattr__(self, "weights", wj)

    @property
    def m(self):
        return self.support.size

    @property
    def degree(self):
        """Nominal type (m-1, m-1) degree."""
        return self.m - 1

    @property
    def scale(self):
        s = float(np.max(np.abs(self.support)))
        return s if s > 0 else 1.0

    @property
    def diameter(self):
        zj = self.support
        if zj.size < 2:
            return 0.0
        return float(np.max(np.abs(zj[:, None] - zj[None, :])))

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self):
        return f"BarycentricRational(m={self.m})"

    def to_dict(self):
        return {
            "support": _pairs(self.support),
            "values": _pairs(self.values),
            "weights": _pairs(self.weights),
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(_unpairs(doc["support"]), _unpairs(doc["values"]), _unpairs(doc["weights"]))
        except KeyError as exc:
            raise ValueError(f"rational document lacks field {exc}") from None

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _pairs(a):
    return [[float(v.real), float(v.imag)] for v in a]


def _unpairs(rows):
    a = np.asarray(rows, dtype=float)
    if a.size == 0:
        return np.zeros(0, dtype=np.complex128)
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("complex arrays are serialized as [[re, im], ...]")
    return a[:, 0] + 1j * a[:, 1]


def evaluate(r, z):
    """Evaluate ``r`` at ``z`` (scalar or array).

    Exact support hits return f_j.  Points within ``NEAR_SUPPORT * scale`` of
    a support point use f_j plus the first-order correction.  Pole hits and
    nonfinite inputs give :data:`POLE`.
    """
    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=np.complex128)
    out = _kernels.bary_eval(zz.ravel(), r.support, r.values, r.weights, NEAR_SUPPORT * r.scale)
    if scalar:
        return complex(out[0])
    return out.reshape(zz.shape)


@dataclass(frozen=True, eq=False)
class PoleReport:
    poles: np.ndarray
    residues: np.ndarray
    offscale_mask: np.ndarray
    offscale_radius: float = field(default=np.inf)

    @property
    def onscale(self):
        return self.poles[~self.offscale_mask]

    def __len__(self):
        return self.poles.size


def _pencil_roots(zj, coeffs):
    """Finite roots of sum_j c_j prod_{k != j} (z - z_k)."""
    m = zj.size
    # roots do not depend on the scale of the coefficients
    coeffs = coeffs / np.max(np.abs(coeffs))
    E = np.zeros((m + 1, m + 1), dtype=np.complex128)
    E[0, 1:] = coeffs
    E[1:, 0] = 1.0
    E[1:, 1:] = np.diag(zj)
    B = np.eye(m + 1, dtype=np.complex128)
    B[0, 0] = 0.0
    (alpha, beta) = scipy.linalg.eigvals(E, B, homogeneous_eigvals=True)
    big = _INFINITE_EIG * max(1.0, float(np.max(np.abs(zj))))
    finite = np.abs(alpha) < big * np.abs(beta)
    lam = alpha[finite] / beta[finite]
    if lam.size > m - 1:
        lam = lam[np.argsort(np.abs(lam), kind="stable")][: m - 1]
    return np.sort_complex(lam)


def denominator(r, z):
    z = np.asarray(z, dtype=np.complex128)
    return np.sum(r.weights / (z[..., None] - r.support), axis=-1)


def numerator(r, z):
    z = np.asarray(z, dtype=np.complex128)
    return np.sum(r.weights * r.values / (z[..., None] - r.support), axis=-1)


def denominator_residual(r, p):
    """Scaled size of the denominator at ``p``: |D(p)| min_j |p - z_j|."""
    p = np.asarray(p, dtype=np.complex128)
    dist = np.abs(p[..., None] - r.support)
    return np.abs(denominator(r, p)) * dist.min(axis=-1)


def poles_and_residues(r, offscale_radius=None):
    """All finite poles of ``r`` with residues N(p)/D'(p).

    Poles with modulus above ``offscale_radius`` (default 1e6 times the
    support diameter) are flagged in ``offscale_mask`` but kept.
    """
    if r.m < 2:
        raise ValueError("poles need at least two support points")
    if not np.any(r.weights != 0):
        raise ValueError("weight vector is identically zero")
    # supports with zero weight drop out of both N and D; left in the pencil
    # they would show up as fake roots at z_j
    live = r.weights != 0
    zj, fj, wj = r.support[live], r.values[live], r.weights[live]
    pol = _pencil_roots(zj, wj) if zj.size >= 2 else np.zeros(0, dtype=np.complex128)
    with np.errstate(divide="ignore", invalid="ignore"):
        dz = pol[:, None] - zj[None, :]
        N = (wj * fj / dz).sum(axis=1)
        dD = -(wj / dz**2).sum(axis=1)
        res = N / dD
    if offscale_radius is None:
        offscale_radius = OFFSCALE_FACTOR * max(r.diameter, np.finfo(float).tiny)
    mask = np.abs(pol) > offscale_radius
    return PoleReport(pol, res, mask, float(offscale_radius))


def zeros(r):
    """Finite zeros of ``r``: roots of the weighted numerator where r vanishes.

    Roots shared with the denominator cancel and are not reported.
    """
    if r.m < 2:
        raise ValueError("zeros need at least two support points")
    live = r.weights != 0
    c = (r.weights[live] / np.max(np.abs(r.weights))) * r.values[live]
    if not np.any(c != 0):
        warnings.warn("numerator vanishes identically; no zeros reported", RuntimeWarning, stacklevel=2)
        return np.zeros(0, dtype=np.complex128)
    if c.size < 2:
        return np.zeros(0, dtype=np.complex128)
    roots = _pencil_roots(r.support[live], c)
    # a numerator root that is also a denominator root cancels (r = 1 has
    # N = D); keep only the roots where r really vanishes
    vals = np.abs(evaluate(r, roots)) if roots.size else roots.real
    keep = vals <= _ZERO_TOL * max(float(np.max(np.abs(r.values))), np.finfo(float).tiny)
    return roots[keep]
