"""Greedy AAA fitting of barycentric rationals to sampled data."""

import logging
import warnings
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from . import _kernels
from .ratcore import BarycentricRational, poles_and_residues

log = logging.getLogger(__name__)


class FitMode(str, Enum):
    STANDARD = "standard"
    SIGN_RESERVED = "sign_reserved"


@dataclass(frozen=True)
class FitConfig:
    rel_tol: float = 1e-13
    max_degree: int = 150
    cleanup_residue_tol: float = 1e-13
    mode: FitMode = FitMode.STANDARD

    def __post_init__(self):
        if not (0.0 < float(self.rel_tol) < 1.0):
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if int(self.max_degree) != self.max_degree or self.max_degree < 1:
            raise ValueError(f"max_degree must be a positive integer, got {self.max_degree}")
        if not self.cleanup_residue_tol > 0:
            raise ValueError("cleanup_residue_tol must be positive")
        try:
            mode = FitMode(self.mode)
        except ValueError:
            raise ValueError(f"unknown fit mode {self.mode!r}") from None
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "rel_tol", float(self.rel_tol))
        object.__setattr__(self, "max_degree", int(self.max_degree))
        object.__setattr__(self, "cleanup_residue_tol", float(self.cleanup_residue_tol))

    def to_dict(self):
        d = asdict(self)
        d["mode"] = self.mode.value
        return d

    @classmethod
    def from_dict(cls, doc):
        unknown = set(doc) - {"rel_tol", "max_degree", "cleanup_residue_tol", "mode"}
        if unknown:
            raise ValueError(f"unknown FitConfig keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class FitReport:
    iterations: int
    final_rel_error: float
    converged: bool
    cleaned_pole_count: int = 0
    degree: int = 0
    finite_poles: int = 0
    history: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        return cls(**doc)


def _check_samples(Z, F):
    Z = np.asarray(Z, dtype=np.complex128).ravel()
    F = np.asarray(F, dtype=np.complex128).ravel()
    if Z.size != F.size:
        raise ValueError(f"Z and F differ in length ({Z.size} vs {F.size})")
    if Z.size < 2:
        raise ValueError("need at least two samples")
    if not np.all(np.isfinite(Z)):
        raise ValueError("sample points must be finite")
    if not np.all(np.isfinite(F)):
        raise ValueError("function values must be finite; nonfinite samples are not skipped")
    if np.unique(Z).size != Z.size:
        raise ValueError("sample points must be pairwise distinct")
    return Z, F


def _null_vector(L):
    """Right singular vector of the smallest singular value, and that value."""
    rows, cols = L.shape
    full = rows < cols
    try:
        _, s, Vh = np.linalg.svd(L, full_matrices=full)
    except np.linalg.LinAlgError:
        _, s, Vh = scipy.linalg.svd(L, full_matrices=full, lapack_driver="gesvd")
    smin = s[-1] if rows >= cols else 0.0
    return Vh[-1].conj(), float(smin)


def loewner_weights(Z, F, support_idx):
    """Least-squares barycentric weights for supports ``Z[support_idx]``.

    Rows of the Loewner matrix are the remaining samples.  Returns
    ``(weights, sigma_min, rational)``.
    """
    Z = np.asarray(Z, dtype=np.complex128)
    F = np.asarray(F, dtype=np.complex128)
    support_idx = np.asarray(support_idx, dtype=np.intp)
    mask = np.ones(Z.size, dtype=bool)
    mask[support_idx] = False
    zj, fj = Z[support_idx], F[support_idx]
    _, L = _kernels.loewner(Z[mask], F[mask], zj, fj)
    w, smin = _null_vector(L)
    return w, smin, BarycentricRational(zj, fj, w)


def _residual_error(r, Z, F):
    return float(np.max(np.abs(F - r(Z))))


def aaa_fit(Z, F, cfg=None):
    """Fit a barycentric rational to ``F`` sampled at ``Z`` by the AAA greedy loop.

    Starting from r = mean(F), each step promotes the sample with the largest
    residual (lowest index on ties) to a support point and takes the weights
    from the smallest right singular vector of the Loewner matrix.  Stops once
    ``max|F - r(Z)| <= rel_tol * max|F|`` or the degree reaches
    ``max_degree``.  Support points never exceed half the samples, so the
    least-squares problem stays overdetermined.  Without convergence the best
    iterate is returned with ``converged=False``.  Spurious poles are cleaned afterwards.

    Returns ``(rational, FitReport)``.
    """
    cfg = cfg or FitConfig()
    Z, F = _check_samples(Z, F)
    if cfg.mode is FitMode.SIGN_RESERVED:
        warnings.warn("mode 'sign_reserved' is not implemented; fitting in standard mode",
                      RuntimeWarning, stacklevel=2)
    n = Z.size
    fscale = float(np.max(np.abs(F)))
    abstol = cfg.rel_tol * fscale

    mask = np.ones(n, dtype=bool)
    R = np.full(n, F.mean())
    order = []
    history = []
    best = None  # (err, support count, weights)
    # keep the Loewner matrix at least square: with fewer rows than columns a
    # zero-residual null vector always exists and "convergence" means nothing
    mmax = max(1, min(cfg.max_degree + 1, n // 2))

    # Cauchy/Loewner columns are filled in as supports are added
    C = np.zeros((n, mmax), dtype=np.complex128)
    Lfull = np.zeros((n, mmax), dtype=np.complex128)
    converged = False
    for m in range(1, mmax + 1):
        resid = np.abs(F - R)
        resid[~mask] = -1.0
        j = int(np.argmax(resid))
        order.append(j)
        mask[j] = False
        Cj, Lj = _kernels.loewner(Z[mask], F[mask], Z[j:j + 1], F[j:j + 1])
        C[mask, m - 1] = Cj[:, 0]
        Lfull[mask, m - 1] = Lj[:, 0]
        w, _ = _null_vector(Lfull[mask, :m])
        fj = F[order]
        Cm = C[mask, :m]
        N = Cm @ (w * fj)
        D = Cm @ w
        R = F.copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            R[mask] = N / D
        dead = w == 0
        if dead.any():
            # a zero weight drops the interpolation property at that support
            rows = np.array(order)[dead]
            R[rows] = _kernels.bary_eval(Z[rows], Z[order], fj, w, 0.0)
        err = float(np.max(np.abs(F - R))) if np.all(np.isfinite(R)) else np.inf
        history.append(err / fscale if fscale > 0 else err)
        if best is None or err < best[0]:
            best = (err, m, w.copy())
        if err <= abstol:
            converged = True
            break

    if converged:
        m_use, w_use = len(order), w
    else:
        m_use, w_use = best[1], best[2]
    idx = np.array(order[:m_use])
    r = BarycentricRational(Z[idx], F[idx], w_use)
    r, removed = _cleanup(r, Z, F, cfg, fscale)
    err = _residual_error(r, Z, F)
    rel = err / fscale if fscale > 0 else err
    finite = 0
    if r.m >= 2:
        finite = int(poles_and_residues(r).poles.size)
    report = FitReport(
        iterations=len(order),
        final_rel_error=rel,
        converged=bool(rel <= cfg.rel_tol),
        cleaned_pole_count=removed,
        degree=r.degree,
        finite_poles=finite,
        history=history,
    )
    if not report.converged:
        log.info("AAA did not reach rel_tol %.1e (best %.2e at degree %d)", cfg.rel_tol, rel, r.degree)
    return r, report


def _cleanup(r, Z, F, cfg, fscale, max_rounds=10):
    abstol = cfg.rel_tol * fscale
    removed = 0
    err = _residual_error(r, Z, F)
    index_of = {complex(z): i for i, z in enumerate(Z)}
    for _ in range(max_rounds):
        if r.m < 2:
            break
        rep = poles_and_residues(r)
        bad = np.abs(rep.residues) < cfg.cleanup_residue_tol * fscale
        if not bad.any():
            break
        drop = set()
        for p in rep.poles[bad]:
            drop.add(int(np.argmin(np.abs(r.support - p))))
        keep = [i for i in range(r.m) if i not in drop]
        if not keep:
            break
        support_idx = [index_of[complex(z)] for z in r.support[keep]]
        _, _, r_new = loewner_weights(Z, F, support_idx)
        err_new = _residual_error(r_new, Z, F)
        if not err_new <= max(abstol, err):
            break
        r, err = r_new, err_new
        removed += len(drop)
    return r, removed


def cleanup_spurious(r, Z, F, cfg=None):
    """Remove poles with residue below ``cleanup_residue_tol * max|F|``.

    Each such pole takes its nearest support point with it; weights are then
    re-solved on the remaining supports.  A round that would push the sample
    error above both the tolerance and its current value is rejected, so the
    worst case hands back ``r`` unchanged.
    """
    cfg = cfg or FitConfig()
    Z, F = _check_samples(Z, F)
    fscale = float(np.max(np.abs(F)))
    out, _ = _cleanup(r, Z, F, cfg, fscale)
    return out
