"""Hot loops for barycentric evaluation and Loewner assembly.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version.  The numba path is used when numba imports cleanly and the
environment variable ``SCHWARZFUN_DISABLE_NUMBA`` is unset (or ``0``).
Both paths share one contract and are cross-checked in the test suite.
"""

import os

import numpy as np

#: Value returned when an evaluation lands on a pole (or is fed a pole).
POLE = complex(np.inf, 0.0)

_CHUNK = 4096


def _numba_requested():
    flag = os.environ.get("SCHWARZFUN_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


# ---------------------------------------------------------------- numpy path


def support_derivatives(zj, fj, wj):
    """Derivative of r at each support point with nonzero weight.

    Uses r'(z_j) = sum_{k != j} w_k (f_k - f_j) / (z_j - z_k) / w_j.
    Entries for zero-weight supports are 0.
    """
    m = zj.size
    out = np.zeros(m, dtype=np.complex128)
    for j in range(m):
        if wj[j] == 0:
            continue
        dz = zj[j] - zj
        dz[j] = 1.0
        terms = wj * (fj - fj[j]) / dz
        terms[j] = 0.0
        out[j] = terms.sum() / wj[j]
    return out


def bary_eval_numpy(z, zj, fj, wj, near):
    z = np.asarray(z, dtype=np.complex128).ravel()
    out = np.empty(z.size, dtype=np.complex128)
    live = wj != 0
    zl, fl, wl = zj[live], fj[live], wj[live]
    deriv = None
    for start in range(0, z.size, _CHUNK):
        zc = z[start:start + _CHUNK]
        D = zc[:, None] - zl[None, :]
        absd = np.abs(D)
        close = absd <= near
        hit_rows = close.any(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            C = wl / np.where(close, 1.0, D)
            C[close] = 0.0
            num = C @ fl
            den = C.sum(axis=1)
            res = num / den
        res[den == 0] = POLE
        if hit_rows.any():
            if deriv is None:
                deriv = support_derivatives(zl, fl, wl)
            rows = np.flatnonzero(hit_rows)
            cols = np.argmax(close[rows], axis=1)
            eps = zc[rows] - zl[cols]
            res[rows] = fl[cols] + np.where(eps == 0, 0.0, deriv[cols] * eps)
        bad = ~np.isfinite(zc)
        res[bad] = POLE
        out[start:start + _CHUNK] = res
    return out


def loewner_numpy(Z, F, zj, fj):
    # reciprocal spelled out as conj(d)/|d|^2 in both paths so they agree bitwise
    d = Z[:, None] - zj[None, :]
    q = d.real * d.real + d.imag * d.imag
    C = (d.real / q) - 1j * (d.imag / q)
    dF = F[:, None] - fj[None, :]
    L = (dF.real * C.real - dF.imag * C.imag) + 1j * (dF.real * C.imag + dF.imag * C.real)
    return C, L


# ---------------------------------------------------------------- numba path

HAVE_NUMBA = False
if _numba_requested():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        njit = None
    if njit is not None:
        HAVE_NUMBA = True

        @njit(cache=True)
        def _deriv_at(j, zj, fj, wj):
            acc = 0j
            for k in range(zj.size):
                if k != j:
                    acc += wj[k] * (fj[k] - fj[j]) / (zj[j] - zj[k])
            return acc / wj[j]

        @njit(cache=True)
        def _bary_eval_nb(z, zj, fj, wj, near):
            n = z.size
            m = zj.size
            near2 = near * near
            out = np.empty(n, dtype=np.complex128)
            for i in range(n):
                zi = z[i]
                if not (np.isfinite(zi.real) and np.isfinite(zi.imag)):
                    out[i] = complex(np.inf, 0.0)
                    continue
                num = 0j
                den = 0j
                hit = -1
                for j in range(m):
                    if wj[j] == 0:
                        continue
                    d = zi - zj[j]
                    q = d.real * d.real + d.imag * d.imag
                    if q <= near2:
                        hit = j
                        break
                    c = wj[j] * complex(d.real / q, -d.imag / q)
                    num += c * fj[j]
                    den += c
                if hit >= 0:
                    eps = zi - zj[hit]
                    if eps == 0:
                        out[i] = fj[hit]
                    else:
                        out[i] = fj[hit] + _deriv_at(hit, zj, fj, wj) * eps
                elif den == 0:
                    out[i] = complex(np.inf, 0.0)
                else:
                    out[i] = num / den
            return out

        @njit(cache=True)
        def _loewner_nb(Z, F, zj, fj):
            n = Z.size
            m = zj.size
            C = np.empty((n, m), dtype=np.complex128)
            L = np.empty((n, m), dtype=np.complex128)
            for i in range(n):
                for j in range(m):
                    d = Z[i] - zj[j]
                    q = d.real * d.real + d.imag * d.imag
                    cr = d.real / q
                    ci = -(d.imag / q)
                    e = F[i] - fj[j]
                    C[i, j] = complex(cr, ci)
                    L[i, j] = complex(e.real * cr - e.imag * ci, e.real * ci + e.imag * cr)
            return C, L


def bary_eval_numba(z, zj, fj, wj, near):
    if not HAVE_NUMBA:
        raise RuntimeError("numba backend unavailable")
    z = np.ascontiguousarray(np.asarray(z, dtype=np.complex128).ravel())
    return _bary_eval_nb(z, zj, fj, wj, float(near))


def loewner_numba(Z, F, zj, fj):
    if not HAVE_NUMBA:
        raise RuntimeError("numba backend unavailable")
    return _loewner_nb(Z, F, zj, fj)


if HAVE_NUMBA:
    BACKEND = "numba"
    bary_eval = bary_eval_numba
    loewner = loewner_numba
else:
    BACKEND = "numpy"
    bary_eval = bary_eval_numpy
    loewner = loewner_numpy


def warmup():
    """Trigger JIT compilation so later timings exclude it."""
    zj = np.array([1.0, -1.0], dtype=np.complex128)
    fj = np.array([1.0, -1.0], dtype=np.complex128)
    wj = np.array([1.0, -1.0], dtype=np.complex128)
    bary_eval(np.array([0.5j, 1.0]), zj, fj, wj, 1e-13)
    loewner(np.array([0.5j]), np.array([0.1 + 0j]), zj, fj)
