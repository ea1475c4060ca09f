"""Exact rational linear algebra and conformality/distortion of linear maps.

Everything here works over :class:`fractions.Fraction`; nothing is ever
converted to floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Optional, Sequence

Vector = tuple  # tuple of Fraction / int


class DimensionError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point entries are not accepted")
    return Fraction(x)


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable dense matrix of Fractions."""

    entries: tuple

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(_frac(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise DimensionError("matrix must have at least one row and column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise DimensionError("ragged rows")
        object.__setattr__(self, "entries", data)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int) -> "RationalMatrix":
        return cls([[0] * n for _ in range(m)])

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(zip(*self.entries))

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            cols = list(zip(*other.entries))
            return RationalMatrix(
                [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.entries]
            )
        v = tuple(other)
        if len(v) != self.cols:
            raise DimensionError(f"cannot apply {self.shape} matrix to length-{len(v)} vector")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def __mul__(self, scalar) -> "RationalMatrix":
        s = _frac(scalar)
        return RationalMatrix([[s * x for x in r] for r in self.entries])

    __rmul__ = __mul__

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return RationalMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + other * -1

    def __neg__(self) -> "RationalMatrix":
        return self * -1

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def to_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]

    def to_strings(self) -> list[list[str]]:
        return [[fraction_to_str(x) for x in r] for r in self.entries]

    @classmethod
    def from_strings(cls, rows) -> "RationalMatrix":
        return cls([[Fraction(str(x)) for x in r] for r in rows])

    def det(self) -> Fraction:
        return determinant(self.entries)

    def rank(self) -> int:
        return rank(self.entries)

    def inverse(self) -> "RationalMatrix":
        return RationalMatrix(inverse(self.entries))

    def trace(self) -> Fraction:
        if not self.is_square():
            raise DimensionError("trace of a non-square matrix")
        return sum((self.entries[i][i] for i in range(self.rows)), Fraction(0))

    def scale_normalized(self) -> "RationalMatrix":
        """Rescale so the first nonzero entry of the first nonzero row is 1."""
        for r in self.entries:
            for x in r:
                if x != 0:
                    return self * (1 / x)
        return self

    def __repr__(self) -> str:
        return f"RationalMatrix({self.to_strings()!r})"


def fraction_to_str(x: Fraction) -> str:
    x = _frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Elimination primitives on plain nested sequences


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = [[_frac(x) for x in r] for r in rows]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    """Rank by fraction-free (Bareiss) elimination."""
    m = [[_frac(x) for x in r] for r in rows]
    if not m or not m[0]:
        return 0
    # clear denominators row by row so Bareiss stays in the integers
    im = []
    for r in m:
        den = 1
        for x in r:
            den = den * x.denominator // gcd(den, x.denominator)
        im.append([int(x * den) for x in r])
    nrows, ncols = len(im), len(im[0])
    rk = 0
    prev = 1
    for c in range(ncols):
        p = next((i for i in range(rk, nrows) if im[i][c] != 0), None)
        if p is None:
            continue
        im[rk], im[p] = im[p], im[rk]
        piv = im[rk][c]
        for i in range(rk + 1, nrows):
            a = im[i][c]
            im[i] = [(piv * im[i][j] - a * im[rk][j]) // prev for j in range(ncols)]
        prev = piv
        rk += 1
        if rk == nrows:
            break
    return rk


def determinant(rows: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-free Bareiss elimination."""
    m = [[_frac(x) for x in r] for r in rows]
    n = len(m)
    if any(len(r) != n for r in m):
        raise DimensionError("determinant of a non-square matrix")
    scale = Fraction(1)
    im = []
    for r in m:
        den = 1
        for x in r:
            den = den * x.denominator // gcd(den, x.denominator)
        scale /= den
        im.append([int(x * den) for x in r])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if im[k][k] == 0:
            p = next((i for i in range(k + 1, n) if im[i][k] != 0), None)
            if p is None:
                return Fraction(0)
            im[k], im[p] = im[p], im[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                im[i][j] = (im[i][j] * im[k][k] - im[i][k] * im[k][j]) // prev
        prev = im[k][k]
    return sign * scale * im[n - 1][n - 1] if n else Fraction(1)


def kernel(rows: Sequence[Sequence], ncols: Optional[int] = None) -> list[tuple[Fraction, ...]]:
    """Rational basis of the right null space."""
    if not rows:
        if ncols is None:
            raise DimensionError("number of columns unknown for an empty system")
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    m, pivots = rref(rows)
    n = len(m[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][f]
        basis.append(tuple(v))
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """One solution of ``a x = b``, or ``None`` when the system is inconsistent."""
    if len(a) != len(b):
        raise DimensionError("right-hand side length does not match the row count")
    aug = [list(r) + [y] for r, y in zip(a, b)]
    m, pivots = rref(aug)
    n = len(aug[0]) - 1
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        x[pc] = m[r][n]
    return tuple(x)


def inverse(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionError("inverse of a non-square matrix")
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    return [r[n:] for r in m]


def primitive_integer(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector, first nonzero entry positive."""
    fr = [_frac(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive normal")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


# ---------------------------------------------------------------------------
# Polynomials (coefficient lists, lowest degree first)


def charpoly(m: RationalMatrix) -> list[Fraction]:
    """Characteristic polynomial det(tI - M) via Faddeev-LeVerrier."""
    if not m.is_square():
        raise DimensionError("characteristic polynomial of a non-square matrix")
    n = m.rows
    a = m.entries
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [[Fraction(0)] * n for _ in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        mk = [
            [sum(a[i][t] * mk[t][j] for t in range(n)) + (c if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
        am = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs[n - k] = c
    return coeffs


def poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_derivative(p: Sequence[Fraction]) -> list[Fraction]:
    return _trim([i * p[i] for i in range(1, len(p))] or [Fraction(0)])


def poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = _trim(list(a))
    b = _trim(list(b))
    if b == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    r = a[:]
    while len(r) >= len(b) and r != [0]:
        shift = len(r) - len(b)
        f = r[-1] / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            r[i + shift] -= f * c
        r.pop()
        r = _trim(r) if r else [Fraction(0)]
    return _trim(q), r


def poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a = _trim(list(a))
    b = _trim(list(b))
    while b != [0]:
        _, r = poly_divmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a]


def squarefree_part(p: Sequence[Fraction]) -> list[Fraction]:
    g = poly_gcd(p, poly_derivative(p))
    q, _ = poly_divmod(p, g)
    return q


def sturm_sequence(p: Sequence[Fraction]) -> list[list[Fraction]]:
    seq = [_trim(list(p)), poly_derivative(p)]
    while seq[-1] != [0]:
        _, r = poly_divmod(seq[-2], seq[-1])
        seq.append([-c for c in r])
    return seq[:-1]


def _sign_changes(seq, x: Fraction) -> int:
    signs = [v for v in (poly_eval(p, x) for p in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(seq, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


# ---------------------------------------------------------------------------
# Conformality and distortion


def gram_form(t: RationalMatrix, gram_src=None, gram_dst=None) -> RationalMatrix:
    """Pull back of the range inner product along ``t``: T^t G_dst T."""
    g_dst = gram_dst if gram_dst is not None else RationalMatrix.identity(t.rows)
    return t.T @ g_dst @ t


def is_conformal(t: RationalMatrix, gram_src=None, gram_dst=None) -> Optional[Fraction]:
    """Return ``c`` with ``T^t G_dst T = c G_src`` or ``None``.

    With the default identity Gram matrices this is the test ``T^t T = c I``.
    """
    if not t.is_square():
        raise DimensionError("conformality needs a square matrix")
    if t.det() == 0:
        raise SingularMatrixError("conformality of a singular map is undefined")
    g_src = gram_src if gram_src is not None else RationalMatrix.identity(t.cols)
    pulled = gram_form(t, gram_src, gram_dst)
    c = None
    for i in range(t.cols):
        for j in range(t.cols):
            a, b = pulled[i, j], g_src[i, j]
            if b == 0:
                if a != 0:
                    return None
            elif c is None:
                c = a / b
            elif a != c * b:
                return None
    return c


@dataclass(frozen=True)
class DistortionBound:
    """Rational bracket ``lower <= K <= upper`` of the distortion K."""

    lower: Fraction
    upper: Fraction
    exact_conformal: Optional[Fraction] = None

    def to_json(self) -> dict:
        out = {"lower": fraction_to_str(self.lower), "upper": fraction_to_str(self.upper)}
        if self.exact_conformal is not None:
            out["conformal_scalar"] = fraction_to_str(self.exact_conformal)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DistortionBound":
        c = data.get("conformal_scalar")
        return cls(
            Fraction(data["lower"]),
            Fraction(data["upper"]),
            None if c is None else Fraction(c),
        )


def _sqrt_bounds(x: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(x) <= hi with hi - lo <= eps (exact when x is a square)."""
    if x < 0:
        raise ValueError("negative radicand")
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        r = Fraction(rn, rd)
        return r, r
    scale = 1
    while True:
        s = scale * scale
        # sqrt(x) = sqrt(num*den*s) / (den*scale)
        root = isqrt(num * den * s)
        lo = Fraction(root, den * scale)
        hi = Fraction(root + 1, den * scale)
        if hi - lo <= eps:
            return lo, hi
        scale *= 16


def extreme_eigen_brackets(
    s: RationalMatrix, eps: Fraction, check=None
) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction], list[Fraction]]:
    """Brackets of the smallest and largest roots of the characteristic polynomial.

    ``s`` must have only real positive eigenvalues. Bisection runs on the
    squarefree part of the characteristic polynomial using exact Sturm counts,
    so every bracket contains a sign change (or collapses onto an exact root).
    ``check``, if given, is called with ``(poly, lo, hi)`` after every step.
    """
    p = charpoly(s)
    q = squarefree_part(p)
    seq = sturm_sequence(q)
    bound = 1 + max(abs(c / q[-1]) for c in q[:-1]) if len(q) > 1 else Fraction(1)

    def bracket(lowest: bool) -> tuple[Fraction, Fraction]:
        lo, hi = Fraction(0), bound
        if poly_eval(q, lo) == 0:
            raise SingularMatrixError("zero eigenvalue")
        while hi - lo > eps:
            mid = (lo + hi) / 2
            if poly_eval(q, mid) == 0:
                # mid is an exact root; decide whether it is the extreme one
                if lowest and count_roots(seq, lo, mid) == 1:
                    return mid, mid
                if not lowest and count_roots(seq, mid, hi) == 0:
                    return mid, mid
            left = count_roots(seq, lo, mid)
            if lowest:
                if left > 0:
                    hi = mid
                else:
                    lo = mid
            else:
                right = count_roots(seq, mid, hi)
                if right > 0:
                    lo = mid
                else:
                    hi = mid
            if check is not None:
                check(q, lo, hi)
        return lo, hi

    return bracket(True), bracket(False), q


def _snap_rational_root(q, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Collapse a root bracket onto an exact rational root with a small denominator, if there is one."""
    if lo == hi:
        return lo, hi
    mid = (lo + hi) / 2
    for den in (10, 100, 1000, 10**4, 10**5):
        c = mid.limit_denominator(den)
        if lo <= c <= hi and poly_eval(q, c) == 0:
            return c, c
    return lo, hi


def distortion(
    t: RationalMatrix, precision=Fraction(1, 10**6), gram_src=None, gram_dst=None
) -> DistortionBound:
    """Bracket K = (largest singular value)/(smallest singular value) to width < precision.

    Singular values are taken with respect to the inner products given by the
    Gram matrices (identity by default). The result is invariant under scaling
    ``t`` because the pulled-back form is normalized by its trace first.
    """
    eps = _frac(precision)
    if eps <= 0:
        raise ValueError("precision must be positive")
    if not t.is_square():
        raise DimensionError("distortion needs a square matrix")
    if t.det() == 0:
        raise SingularMatrixError("distortion of a singular map is undefined")
    c = is_conformal(t, gram_src, gram_dst)
    if c is not None:
        return DistortionBound(Fraction(1), Fraction(1), c)
    g_src = gram_src if gram_src is not None else RationalMatrix.identity(t.cols)
    s = g_src.inverse() @ gram_form(t, gram_src, gram_dst)
    s = s * (s.cols / s.trace())
    lam_eps = eps
    while True:
        (mlo, mhi), (xlo, xhi), q = extreme_eigen_brackets(s, lam_eps)
        mlo, mhi = _snap_rational_root(q, mlo, mhi)
        xlo, xhi = _snap_rational_root(q, xlo, xhi)
        k2_lo, k2_hi = xlo / mhi, xhi / mlo
        lo, _ = _sqrt_bounds(k2_lo, eps / 4)
        _, hi = _sqrt_bounds(k2_hi, eps / 4)
        lo = max(lo, Fraction(1))
        if hi - lo < eps:
            return DistortionBound(lo, hi)
        lam_eps /= 8
