"""Classical root systems with exact rational coordinates.

Conventions
-----------
``A_n`` lives in the sum-zero hyperplane of Q^{n+1} with coordinates
``x_0 .. x_n`` and positive roots ``x_i - x_j`` for ``i > j``.

``B_n``, ``C_n``, ``BC_n`` and ``D_n`` live in Q^n with coordinates
``y_1 .. y_n`` (stored at indices ``0 .. n-1``). A root ``y_i - y_j`` is
positive when ``i > j``; ``y_i + y_j``, ``y_i`` and ``2 y_i`` are positive.

``G_2`` is modelled inside the sum-zero plane of Q^3 (short roots
``e_i - e_j``, long roots ``2e_i - e_j - e_k``) so that the standard inner
product restricts to the correct metric with rational coordinates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactlin import RationalMatrix, fraction_to_str, solve

FAMILIES = ("A", "B", "C", "BC", "D", "G2")


class UnsupportedRootSystem(ValueError):
    pass


def _unit(n: int, i: int, scale: int = 1) -> list[int]:
    v = [0] * n
    v[i] = scale
    return v


def sum_zero_basis(dim: int) -> list[tuple[Fraction, ...]]:
    """Orthogonal rational basis of the sum-zero hyperplane in Q^dim.

    The k-th vector (k = 1 .. dim-1) is ``e_k - (e_0 + ... + e_{k-1})/k``
    scaled to integers: ``(-1, ..., -1, k, 0, ..., 0)`` with k leading -1's.
    """
    basis = []
    for k in range(1, dim):
        v = [Fraction(-1)] * k + [Fraction(k)] + [Fraction(0)] * (dim - k - 1)
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class RootSystem:
    """Positive roots of a classical root system, in ambient coordinates."""

    family: str
    rank: int
    ambient_dim: int
    positive_roots: tuple[tuple[Fraction, ...], ...]
    simple_roots: tuple[tuple[Fraction, ...], ...]

    @property
    def name(self) -> str:
        return self.family if self.family == "G2" else f"{self.family}{self.rank}"

    @property
    def reduced(self) -> bool:
        return self.family != "BC"

    @property
    def is_sum_zero_model(self) -> bool:
        return self.family in ("A", "G2")

    @property
    def flags(self) -> tuple[str, ...]:
        if self.family == "D" and self.rank == 2:
            return ("reducible",)
        if self.family == "D" and self.rank == 3:
            return ("coincides-with-A3",)
        return ()

    @property
    def basis(self) -> RationalMatrix:
        """Columns span the space the roots live in (ambient_dim x rank)."""
        return _basis(self.family, self.rank, self.ambient_dim)

    @property
    def gram(self) -> RationalMatrix:
        b = self.basis
        return b.T @ b

    def __contains__(self, v) -> bool:
        return tuple(Fraction(x) for x in v) in self._root_set

    @property
    def _root_set(self) -> frozenset:
        return _root_index(self)[0]

    def index(self, v) -> int:
        try:
            return _root_index(self)[1][tuple(Fraction(x) for x in v)]
        except KeyError:
            raise ValueError(f"{v!r} is not a positive root of {self.name}") from None

    def simple_coefficients(self, v) -> tuple[Fraction, ...]:
        """Coefficients of ``v`` in the basis of simple roots."""
        cols = list(zip(*self.simple_roots))
        sol = solve([list(r) for r in cols], list(v))
        if sol is None:
            raise ValueError(f"{v!r} is not in the span of the simple roots")
        return sol

    def intrinsic(self, v) -> tuple[Fraction, ...]:
        """Covector of the functional ``x -> <v, x>`` in the stored basis."""
        return self.basis.T @ v

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "rank": self.rank,
            "positive_roots": [[fraction_to_str(x) for x in r] for r in self.positive_roots],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RootSystem":
        rs = build_root_system(data["family"], int(data["rank"]))
        roots = tuple(tuple(Fraction(x) for x in r) for r in data["positive_roots"])
        if roots != rs.positive_roots:
            raise ValueError("serialized roots do not match the constructed system")
        return rs


@lru_cache(maxsize=None)
def _basis(family: str, rank: int, ambient_dim: int) -> RationalMatrix:
    if family in ("A", "G2"):
        return RationalMatrix(zip(*sum_zero_basis(ambient_dim)))
    return RationalMatrix.identity(rank)


@lru_cache(maxsize=None)
def _root_index(rs: RootSystem):
    idx = {r: i for i, r in enumerate(rs.positive_roots)}
    return frozenset(idx), idx


def _check_rank(family: str, rank: int) -> None:
    if not isinstance(rank, int) or rank < 1:
        raise UnsupportedRootSystem(f"rank must be a positive integer, got {rank!r}")
    if family == "G2":
        if rank != 2:
            raise UnsupportedRootSystem("G2 exists only in rank 2")
    elif family == "D":
        if rank < 2:
            raise UnsupportedRootSystem("D_n needs rank >= 2 (rank >= 4 to be irreducible and new)")
    elif family in ("A", "B", "C", "BC"):
        if rank < 2:
            raise UnsupportedRootSystem(f"{family}_n is supported for rank >= 2")
    else:
        raise UnsupportedRootSystem(f"unknown family {family!r}; expected one of {FAMILIES}")


def build_root_system(family: str, rank: int) -> RootSystem:
    """Construct the positive and simple roots of ``family`` at ``rank``."""
    family = family.upper()
    _check_rank(family, rank)
    return _build(family, rank)


@lru_cache(maxsize=None)
def _build(family: str, n: int) -> RootSystem:
    roots: list[list[int]] = []
    simple: list[list[int]] = []
    if family == "A":
        dim = n + 1
        for i in range(dim):
            for j in range(i):
                v = [0] * dim
                v[i], v[j] = 1, -1
                roots.append(v)
        for i in range(n):
            v = [0] * dim
            v[i + 1], v[i] = 1, -1
            simple.append(v)
    elif family == "G2":
        dim = 3
        for i in range(3):
            for j in range(i):
                v = [0] * 3
                v[i], v[j] = 1, -1
                roots.append(v)
        for i in range(3):
            v = [-1, -1, -1]
            v[i] = 2
            roots.append(v)
        simple = [[-1, 1, 0], [1, -2, 1]]
    else:
        dim = n
        for i in range(n):
            for j in range(i):
                v = [0] * n
                v[i], v[j] = 1, -1
                roots.append(v)
                w = [0] * n
                w[i], w[j] = 1, 1
                roots.append(w)
        if family in ("B", "BC"):
            roots += [_unit(n, i) for i in range(n)]
        if family in ("C", "BC"):
            roots += [_unit(n, i, 2) for i in range(n)]
        for i in range(n - 1):
            v = [0] * n
            v[i + 1], v[i] = 1, -1
            simple.append(v)
        if family in ("B", "BC"):
            simple.insert(0, _unit(n, 0))
        elif family == "C":
            simple.insert(0, _unit(n, 0, 2))
        else:  # D
            v = [0] * n
            v[0], v[1] = 1, 1
            simple.insert(0, v)
    if family == "G2":
        roots = _orient_g2(roots, simple)
    pos = tuple(sorted(tuple(Fraction(x) for x in r) for r in roots))
    simp = tuple(tuple(Fraction(x) for x in r) for r in simple)
    return RootSystem(family, n, dim, pos, simp)


def _orient_g2(roots, simple):
    """Flip each G2 root to the sign that is a nonnegative combination of the simple roots."""
    a, b = simple
    out = []
    for r in roots:
        cols = [[a[k], b[k]] for k in range(3)]
        c = solve(cols, r)
        if c is None:
            raise AssertionError("G2 root outside the simple-root span")
        out.append(r if all(x >= 0 for x in c) else [-x for x in r])
    return out


_SPEC_RE = re.compile(r"^\s*(BC|[ABCD]|G)\s*(\d+)\s*$", re.IGNORECASE)


def parse_spec(text: str) -> tuple[str, int]:
    """Parse strings like ``"A3"``, ``"bc4"``, ``"G2"``."""
    m = _SPEC_RE.match(text)
    if not m:
        raise UnsupportedRootSystem(f"cannot parse root system {text!r}; expected e.g. A3, BC4, D4, G2")
    fam, rank = m.group(1).upper(), int(m.group(2))
    if fam == "G":
        if rank != 2:
            raise UnsupportedRootSystem("G2 exists only in rank 2")
        fam = "G2"
    return fam, rank


def from_spec(text: str) -> RootSystem:
    return build_root_system(*parse_spec(text))


def is_root_sum(rs: RootSystem, a, b) -> bool:
    """True iff ``a + b`` is a positive root of ``rs``; ``a`` and ``b`` must be positive roots."""
    for v in (a, b):
        if v not in rs:
            raise ValueError(f"{v!r} is not a positive root of {rs.name}")
    s = tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b))
    return s in rs


def expected_root_count(family: str, n: int) -> int:
    return {
        "A": n * (n + 1) // 2,
        "B": n * n,
        "C": n * n,
        "BC": n * n + n,
        "D": n * (n - 1),
        "G2": 6,
    }[family]
