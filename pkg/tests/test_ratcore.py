import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P
from scipy.optimize import linear_sum_assignment

from schwarzfun.ratcore import (POLE, BarycentricRational, denominator_residual, evaluate, is_pole,
                                poles_and_residues, zeros)


def from_poly(support, num, den):
    """Barycentric form of num/den (coefficients low to high) on ``support``.

    With l(z) = prod (z - z_j), den/l has partial fractions w_j/(z - z_j) where
    w_j = den(z_j) / prod_{k != j} (z_j - z_k); values are num/den at z_j.
    """
    z = np.asarray(support, dtype=complex)
    w = np.array([P.polyval(zj, den) / np.prod(zj - np.delete(z, j)) for j, zj in enumerate(z)])
    f = P.polyval(z, num) / P.polyval(z, den)
    return BarycentricRational(z, f, w)


def expanded_denominator_roots(r):
    """Roots of sum_j w_j prod_{k != j} (z - z_k), expanded and fed to a companion solver."""
    coeffs = np.zeros(r.m, dtype=complex)
    for j in range(r.m):
        coeffs = coeffs + r.weights[j] * P.polyfromroots(np.delete(r.support, j))
    coeffs = np.trim_zeros(coeffs, "b")
    return P.polyroots(coeffs) if coeffs.size > 1 else np.zeros(0, complex)


def matched_distance(a, b):
    if a.size != b.size:
        return np.inf
    if a.size == 0:
        return 0.0
    D = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(D)
    return D[i, j].max()


# ---------------------------------------------------------------- evaluation


def test_two_point_examples():
    # N = 1/(z-1) - 1/(z+1), D = 1/(z-1) + 1/(z+1)  ->  r = 1/z
    r = BarycentricRational([1, -1], [1, -1], [1, 1])
    assert evaluate(r, 3) == pytest.approx(1 / 3, rel=1e-15)
    # weights of opposite sign give the identity
    r = BarycentricRational([1, -1], [1, -1], [1, -1])
    assert evaluate(r, 3) == pytest.approx(3, rel=1e-15)
    np.testing.assert_allclose(zeros(r), [0], atol=1e-15)


def test_interpolates_exactly_at_support(rng):
    z = rng.normal(size=7) + 1j * rng.normal(size=7)
    f = rng.normal(size=7) + 1j * rng.normal(size=7)
    w = rng.normal(size=7) + 1j * rng.normal(size=7)
    r = BarycentricRational(z, f, w)
    out = evaluate(r, z)
    assert np.array_equal(out, f)
    for zj, fj in zip(z, f):
        assert evaluate(r, zj) == fj


def test_near_support_uses_first_order_correction():
    r = BarycentricRational([1, -1], [1, -1], [1, 1])  # 1/z
    z = 1 + 3e-15
    assert abs(evaluate(r, z) - 1 / z) < 1e-15


def test_matches_closed_form(rng):
    num = [2, -1, 0.5j]
    den = P.polyfromroots([0.3 + 0.2j, -1.5])
    r = from_poly(np.exp(2j * np.pi * np.arange(6) / 6) * 1.2, num, den)
    z = rng.normal(size=50) + 1j * rng.normal(size=50)
    np.testing.assert_allclose(evaluate(r, z), P.polyval(z, num) / P.polyval(z, den), rtol=1e-12)


def test_pole_hit_and_nonfinite_input_give_sentinel():
    r = BarycentricRational([1, -1], [1, -1], [1, 1])
    assert is_pole(evaluate(r, 0))
    assert evaluate(r, 0) == POLE
    assert is_pole(evaluate(r, complex(np.nan, 0)))
    out = evaluate(r, np.array([0, 2, np.inf]))
    assert list(is_pole(out)) == [True, False, True]


def test_array_shape_preserved(rng):
    r = BarycentricRational([1, -1, 1j], [0, 1, 2], [1, 2, 3])
    Z = rng.normal(size=(4, 5)) + 0j
    assert evaluate(r, Z).shape == (4, 5)


@pytest.mark.parametrize("args, msg", [
    (([1, 2], [1], [1, 1]), "length"),
    (([1, 1], [1, 2], [1, 1]), "distinct"),
    (([1, 2], [1, 2], [0, 0]), "zero"),
    (([1, np.nan], [1, 2], [1, 1]), "finite"),
    (([], [], []), "at least one"),
])
def test_rejects_malformed(args, msg):
    with pytest.raises(ValueError, match=msg):
        BarycentricRational(*args)


def test_json_roundtrip_is_bitwise(rng):
    z, f, w = (rng.normal(size=5) + 1j * rng.normal(size=5) for _ in range(3))
    r = BarycentricRational(z, f, w)
    back = BarycentricRational.from_json(r.to_json())
    for a, b in ((r.support, back.support), (r.values, back.values), (r.weights, back.weights)):
        assert np.array_equal(a, b)
    assert json.loads(r.to_json())["support"][0] == [z[0].real, z[0].imag]


# -------------------------------------------------------- poles and zeros


def test_poles_residues_zeros_of_known_rational():
    # (z - 0.5) / ((z - 2)(z + 1j)): residue at 2 is 1.5/(2+1j), at -1j is (-1j-0.5)/(-1j-2)
    num = P.polyfromroots([0.5])
    den = P.polyfromroots([2, -1j])
    r = from_poly([0, 1, -1, 3j], num, den)
    rep = poles_and_residues(r)
    order = np.argsort(rep.poles.real)
    np.testing.assert_allclose(rep.poles[order], [-1j, 2], atol=1e-12)
    np.testing.assert_allclose(rep.residues[order], [(-1j - 0.5) / (-1j - 2), 1.5 / (2 + 1j)], atol=1e-12)
    assert not rep.offscale_mask.any()
    zz = zeros(r)
    # type (3, 3) representation of a (1, 2) function: zero at 0.5, the rest at infinity
    assert np.min(np.abs(zz - 0.5)) < 1e-12
    assert np.all(denominator_residual(r, rep.poles) < 1e-12)


def test_residue_matches_contour_integral():
    num = [1, 1j, -0.3]
    den = P.polyfromroots([0.2 + 0.1j, -0.7, 1.1j])
    r = from_poly(np.linspace(-2, 2, 4) + 0.5j, num, den)
    rep = poles_and_residues(r)
    t = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    for p, res in zip(rep.poles, rep.residues):
        c = p + 0.05 * np.exp(1j * t)
        integral = np.mean(evaluate(r, c) * 0.05 * np.exp(1j * t))  # (1/2πi)∮ r dz
        assert abs(integral - res) < 1e-10


def test_offscale_pole_flagged():
    r = from_poly([0, 1, -1], [1], P.polyfromroots([1e9, 0.5j]))
    rep = poles_and_residues(r)
    assert rep.offscale_mask.sum() == 1
    assert abs(rep.poles[rep.offscale_mask][0] - 1e9) < 1e-3 * 1e9
    assert np.allclose(rep.onscale, [0.5j])


def test_zeros_warns_when_numerator_vanishes():
    r = BarycentricRational([1, 2], [0, 0], [1, 1])
    with pytest.warns(RuntimeWarning):
        assert zeros(r).size == 0


def test_single_support_has_no_pole_report():
    with pytest.raises(ValueError):
        poles_and_residues(BarycentricRational([1], [2], [1]))


# ------------------------------------------------------------- properties

_cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def _distinct(zs, sep=0.05):
    zs = np.asarray(zs)
    return zs.size < 2 or np.min(np.abs(zs[:, None] - zs[None, :]) + np.eye(zs.size) * 10) > sep


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(lambda m: st.tuples(
    st.lists(_cplx, min_size=m, max_size=m), st.lists(_cplx, min_size=m, max_size=m),
    st.lists(_cplx, min_size=m, max_size=m))))
def test_pencil_poles_match_expanded_polynomial(data):
    z, f, w = (np.array(v, dtype=complex) for v in data)
    if not _distinct(z) or np.min(np.abs(w)) < 0.05:
        return
    r = BarycentricRational(z, f, w)
    pol = poles_and_residues(r).poles
    ref = expanded_denominator_roots(r)
    assert pol.size <= r.m - 1
    assert matched_distance(pol, ref) <= 1e-8 * max(1.0, np.abs(ref).max(initial=0))


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 8).flatmap(lambda m: st.tuples(
    st.lists(_cplx, min_size=m, max_size=m), st.lists(_cplx, min_size=m, max_size=m),
    st.lists(_cplx, min_size=m, max_size=m))))
def test_interpolation_and_degree_bounds(data):
    z, f, w = (np.array(v, dtype=complex) for v in data)
    if not _distinct(z, 1e-3) or not np.any(w != 0):
        return
    r = BarycentricRational(z, f, w)
    hit = w != 0
    assert np.array_equal(evaluate(r, z[hit]), f[hit])
    if r.m >= 2:
        assert poles_and_residues(r).poles.size <= r.m - 1
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            assert zeros(r).size <= r.m - 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_value_blows_up_near_poles(seed):
    g = np.random.default_rng(seed)
    m = 6
    z = np.exp(2j * np.pi * np.arange(m) / m) * (1 + 0.1 * g.random(m))
    f = g.normal(size=m) + 1j * g.normal(size=m)
    w = g.normal(size=m) + 1j * g.normal(size=m)
    r = BarycentricRational(z, f, w)
    rep = poles_and_residues(r)
    u = np.exp(2j * np.pi * g.random())
    big = 1e3 * np.median(np.abs(f))
    for p, res in zip(rep.onscale, rep.residues[~rep.offscale_mask]):
        if abs(res) < 1e-13 * np.abs(f).max():
            continue
        assert abs(evaluate(r, p + 1e-6 * u)) > big


def test_zero_weight_support_is_not_a_pole():
    # the 0-weight support drops out: r = 1/z from the other two
    r = BarycentricRational([1, -1, 2j], [1, -1, 5], [1, 1, 0])
    rep = poles_and_residues(r)
    np.testing.assert_allclose(rep.poles, [0], atol=1e-15)
    assert np.all(np.isfinite(rep.residues))
    assert evaluate(r, 2j) == pytest.approx(1 / 2j)
