from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from weylpat.exactlin import (
    DimensionError,
    DistortionBound,
    RationalMatrix,
    SingularMatrixError,
    charpoly,
    count_roots,
    determinant,
    distortion,
    extreme_eigen_brackets,
    gram_form,
    is_conformal,
    kernel,
    poly_eval,
    rank,
    rref,
    solve,
    sturm_sequence,
)

EPS = Fraction(1, 10**6)

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(n, m=None):
    m = n if m is None else m
    return st.lists(st.lists(small, min_size=m, max_size=m), min_size=n, max_size=n).map(RationalMatrix)


def invertible(n):
    return matrices(n).filter(lambda a: a.det() != 0)


def sympy_K(t: RationalMatrix, gram_src=None, gram_dst=None):
    """Distortion via sympy: exact eigenvalues of G_s^-1 T^t G_d T, then sqrt of their ratio."""
    T = sympy.Matrix(t.rows, t.cols, [sympy.Rational(x.numerator, x.denominator) for r in t.entries for x in r])
    gs = sympy.eye(t.cols) if gram_src is None else sympy.Matrix(gram_src.to_lists())
    gd = sympy.eye(t.rows) if gram_dst is None else sympy.Matrix(gram_dst.to_lists())
    s = gs.inv() * T.T * gd * T
    lam = sympy.symbols("lam")
    roots = sympy.Poly(s.charpoly(lam).as_expr(), lam).real_roots()
    return sympy.sqrt(max(roots) / min(roots))


def test_rank_identity_and_kernel_of_ones():
    assert rank(RationalMatrix.identity(3).entries) == 3
    assert len(kernel([[1, 1, 1]])) == 2


def test_kernel_vectors_are_annihilated():
    rows = [[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 0, 1]]
    ker = kernel(rows)
    assert len(ker) == 2
    for v in ker:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


def test_solve_signals_inconsistency():
    assert solve([[1, 1], [2, 2]], [1, 3]) is None
    assert solve([[1, 1], [1, -1]], [3, 1]) == (Fraction(2), Fraction(1))


def test_dimension_errors():
    with pytest.raises(DimensionError):
        RationalMatrix([[1, 2], [3]])
    with pytest.raises(DimensionError):
        RationalMatrix.identity(2) @ RationalMatrix.identity(3)
    with pytest.raises(TypeError):
        RationalMatrix([[0.5]])


def test_entries_are_canonical_fractions():
    m = RationalMatrix([[Fraction(2, 4), 3]])
    assert m[0, 0] == Fraction(1, 2) and m[0, 0].denominator == 2
    assert RationalMatrix.from_strings(m.to_strings()) == m


@settings(max_examples=60, deadline=None)
@given(matrices(3, 4))
def test_rank_agrees_with_rref(m):
    red, pivots = rref(m.entries)
    assert rank(m.entries) == len(pivots)
    sym = sympy.Matrix(m.rows, m.cols, [sympy.Rational(x.numerator, x.denominator) for r in m.entries for x in r])
    assert rank(m.entries) == sym.rank()


@settings(max_examples=60, deadline=None)
@given(matrices(3))
def test_determinant_matches_sympy(m):
    sym = sympy.Matrix(3, 3, [sympy.Rational(x.numerator, x.denominator) for r in m.entries for x in r])
    assert determinant(m.entries) == Fraction(str(sym.det()))


@settings(max_examples=40, deadline=None)
@given(invertible(3))
def test_inverse_roundtrip(m):
    assert m @ m.inverse() == RationalMatrix.identity(3)


def test_singular_inverse_rejected():
    with pytest.raises(SingularMatrixError):
        RationalMatrix([[1, 2], [2, 4]]).inverse()


@settings(max_examples=40, deadline=None)
@given(matrices(3))
def test_charpoly_matches_sympy(m):
    lam = sympy.symbols("lam")
    sym = sympy.Matrix(3, 3, [sympy.Rational(x.numerator, x.denominator) for r in m.entries for x in r])
    want = sympy.Poly(sym.charpoly(lam).as_expr(), lam).all_coeffs()[::-1]
    assert charpoly(m) == [Fraction(str(c)) for c in want]


def test_sturm_counts_roots():
    # (x-1)(x-2)(x-3)
    p = [Fraction(-6), Fraction(11), Fraction(-6), Fraction(1)]
    seq = sturm_sequence(p)
    assert count_roots(seq, Fraction(0), Fraction(10)) == 3
    assert count_roots(seq, Fraction(3, 2), Fraction(5, 2)) == 1
    assert poly_eval(p, Fraction(2)) == 0


def test_is_conformal_examples():
    assert is_conformal(RationalMatrix.identity(3)) == 1
    assert is_conformal(RationalMatrix([[1, -1], [1, 1]])) == 2
    assert is_conformal(RationalMatrix.diagonal([2, 1])) is None
    with pytest.raises(SingularMatrixError):
        is_conformal(RationalMatrix([[1, 1], [1, 1]]))


def test_distortion_trivial_examples():
    assert distortion(RationalMatrix.identity(3)) == DistortionBound(Fraction(1), Fraction(1), Fraction(1))
    d = distortion(RationalMatrix.diagonal([2, 1]), EPS)
    assert d.lower <= 2 <= d.upper and d.upper - d.lower < EPS
    with pytest.raises(SingularMatrixError):
        distortion(RationalMatrix([[1, 2], [2, 4]]))
    with pytest.raises(ValueError):
        distortion(RationalMatrix.identity(2), Fraction(0))


def test_distortion_of_first_form_rank_two_against_sympy():
    from weylpat.embedsearch import first_form

    e = first_form(2)
    d = e.distortion(EPS)
    k = sympy_K(e.matrix, e.src.gram, e.dst.gram)
    assert sympy.simplify(k - sympy.sqrt(3)) == 0
    assert d.lower <= k <= d.upper and d.upper - d.lower < EPS


@settings(max_examples=30, deadline=None)
@given(invertible(3))
def test_distortion_brackets_sympy_value(m):
    d = distortion(m, EPS)
    k = sympy_K(m)
    assert sympy.Rational(d.lower.numerator, d.lower.denominator) <= k + sympy.Rational(1, 10**12)
    assert k <= sympy.Rational(d.upper.numerator, d.upper.denominator) + sympy.Rational(1, 10**12)
    assert d.upper - d.lower < EPS


@settings(max_examples=30, deadline=None)
@given(invertible(2), st.fractions(min_value=-7, max_value=7, max_denominator=5).filter(lambda c: c != 0))
def test_distortion_is_scale_invariant(m, c):
    a, b = distortion(m * c, EPS), distortion(m, EPS)
    assert (a.lower, a.upper) == (b.lower, b.upper)


@settings(max_examples=30, deadline=None)
@given(invertible(3))
def test_distortion_of_inverse(m):
    a, b = distortion(m, EPS), distortion(m.inverse(), EPS)
    assert abs(a.lower - b.lower) < 2 * EPS and abs(a.upper - b.upper) < 2 * EPS


@settings(max_examples=30, deadline=None)
@given(invertible(3))
def test_conformal_iff_collapsed_interval(m):
    d = distortion(m, EPS)
    assert (is_conformal(m) is not None) == (d.lower == d.upper == 1)


def test_conformal_battery_collapses():
    battery = [
        RationalMatrix([[0, 1], [1, 0]]) * 3,
        RationalMatrix([[3, -4], [4, 3]]),
        RationalMatrix([[1, 2, 2], [2, 1, -2], [2, -2, 1]]),
    ]
    for m in battery:
        d = distortion(m, EPS)
        assert d.lower == d.upper == 1 and d.exact_conformal == is_conformal(m)


@settings(max_examples=20, deadline=None)
@given(invertible(3))
def test_brackets_contain_sign_change(m):
    s = gram_form(m)
    (mlo, mhi), (xlo, xhi), q = extreme_eigen_brackets(s, Fraction(1, 1000))
    seq = sturm_sequence(q)
    assert count_roots(seq, mlo, mhi) >= 1 or poly_eval(q, mhi) == 0
    assert count_roots(seq, xlo, xhi) >= 1 or poly_eval(q, xhi) == 0


def test_distortion_json_roundtrip():
    d = distortion(RationalMatrix.diagonal([3, 1]), EPS)
    assert DistortionBound.from_json(d.to_json()) == d
    c = distortion(RationalMatrix.identity(2) * 2)
    assert c.to_json()["conformal_scalar"] == "4"
    assert DistortionBound.from_json(c.to_json()) == c
