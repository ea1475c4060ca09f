"""AN-maps: linear maps of flats whose action on roots carries positive roots
to positive roots and preserves "sums to a root" in both directions.

Roots are linear functionals on the flat. A linear map T of flats acts on
them by pullback, so the root η of the target corresponds to the root λ of
the source with ``λ = η ∘ T``. In basis coordinates: ``T^t η = λ``.

Only abstract root data is modelled. For R-split or complex groups this
criterion is equivalent to an embedding of the solvable groups AN; for
non-split groups root-space dimensions matter and are not represented here,
so a map this module rejects might still be realized there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Optional

from .exactlin import RationalMatrix, fraction_to_str
from .embedsearch import to_ambient, to_intrinsic
from .pattern import Pattern, pattern_of
from .rootsystem import RootSystem, build_root_system, from_spec, is_root_sum


class RankMismatch(ValueError):
    pass


def _key(v) -> tuple:
    return tuple(Fraction(x) for x in v)


def _covectors(rs: RootSystem) -> dict:
    """Positive roots keyed by their covector in basis coordinates."""
    return {_key(rs.intrinsic(r)): r for r in rs.positive_roots}


@dataclass(frozen=True)
class ANMap:
    """Linear map of flats (basis coordinates) with its root correspondence.

    ``correspondence`` pairs each positive root of the source with the
    positive root of the target it corresponds to, both in ambient
    coordinates, in the order of ``src.positive_roots``.
    """

    matrix: RationalMatrix
    correspondence: tuple[tuple[tuple, tuple], ...]
    src: RootSystem = field(compare=False, repr=False)
    dst: RootSystem = field(compare=False, repr=False)

    @property
    def T(self) -> RationalMatrix:
        return self.matrix

    @property
    def ambient_matrix(self) -> RationalMatrix:
        return to_ambient(self.matrix, pattern_of(self.src), pattern_of(self.dst))

    def image(self, root) -> tuple:
        for lam, eta in self.correspondence:
            if lam == _key(root):
                return eta
        raise KeyError(root)

    def to_json(self) -> dict:
        def vec(v):
            return [fraction_to_str(x) for x in v]

        return {
            "src": self.src.name,
            "dst": self.dst.name,
            "matrix": self.ambient_matrix.to_strings(),
            "basis_matrix": self.matrix.to_strings(),
            "correspondence": [[vec(a), vec(b)] for a, b in self.correspondence],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ANMap":
        src, dst = from_spec(data["src"]), from_spec(data["dst"])
        corr = tuple((_key(Fraction(x) for x in a), _key(Fraction(x) for x in b)) for a, b in data["correspondence"])
        return cls(RationalMatrix.from_strings(data["basis_matrix"]), corr, src, dst)


@dataclass(frozen=True)
class ANVerdict:
    roots_to_roots: bool
    invertible: bool
    sum_iff: bool
    bad_roots: tuple = ()
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return self.roots_to_roots and self.invertible and self.sum_iff

    def to_json(self) -> dict:
        def vec(v):
            return [fraction_to_str(x) for x in v]

        return {
            "roots_to_roots": self.roots_to_roots,
            "invertible": self.invertible,
            "sum_iff": self.sum_iff,
            "bad_roots": [vec(r) for r in self.bad_roots],
            "violations": [[vec(a), vec(b)] for a, b in self.violations],
        }


def _basis_matrix(t: RationalMatrix, src: RootSystem, dst: RootSystem) -> Optional[RationalMatrix]:
    if t.shape == (dst.rank, src.rank):
        return t
    return to_intrinsic(t, pattern_of(src), pattern_of(dst))


def verify_an_map(t: RationalMatrix, src: RootSystem, dst: RootSystem) -> ANVerdict:
    """Check the three AN-map conditions and list every violation.

    ``t`` may be in basis coordinates or in ambient coordinates.
    """
    m = _basis_matrix(t, src, dst)
    if m is None:
        return ANVerdict(False, False, False)
    invertible = m.det() != 0
    corr = _correspondence(m, src, dst) if invertible else None
    if corr is None:
        return ANVerdict(False, invertible, False)
    bad = tuple(lam for lam, eta in corr.items() if eta is None)
    if bad:
        return ANVerdict(False, invertible, False, bad_roots=bad)
    violations = []
    for a, b in combinations_with_replacement(src.positive_roots, 2):
        if is_root_sum(src, a, b) != is_root_sum(dst, corr[a], corr[b]):
            violations.append((a, b))
    return ANVerdict(True, invertible, not violations, violations=tuple(violations))


def _correspondence(m: RationalMatrix, src: RootSystem, dst: RootSystem) -> dict:
    """For each source root λ, the target root η with ``T^t η = λ`` (or None)."""
    cov = _covectors(dst)
    mt_inv = m.T.inverse()
    out = {}
    for lam in src.positive_roots:
        eta_cov = _key(mt_inv @ src.intrinsic(lam))
        out[lam] = cov.get(eta_cov)
    return out


def make_an_map(t: RationalMatrix, src: RootSystem, dst: RootSystem) -> ANMap:
    verdict = verify_an_map(t, src, dst)
    if not verdict.ok:
        raise ValueError(f"not an AN-map: {verdict}")
    m = _basis_matrix(t, src, dst)
    corr = _correspondence(m, src, dst)
    return ANMap(m, tuple((lam, corr[lam]) for lam in src.positive_roots), src, dst)


def find_an_maps(src: RootSystem, dst: RootSystem) -> list[ANMap]:
    """Every AN-map from ``src`` to ``dst``.

    Each simple root of ``src`` is sent to some positive root of ``dst`` (not
    necessarily simple); linearity then forces the image of every positive
    root through its simple-root expansion, and the candidate is kept when
    all images are positive roots, the map is invertible and sums to roots
    are preserved and reflected.
    """
    if src.rank != dst.rank:
        raise RankMismatch(f"{src.name} and {dst.name} have different ranks")
    r = src.rank
    simple = [src.intrinsic(a) for a in src.simple_roots]
    coeffs = [src.simple_coefficients(lam) for lam in src.positive_roots]
    dst_cov = _covectors(dst)
    dst_roots = list(dst_cov)
    # L maps source covectors to target covectors: L(simple_i) = eta_i, and T^t = L^{-1}
    s_inv = RationalMatrix(zip(*simple)).inverse()
    found = []
    for etas in product(dst_roots, repeat=r):
        if len(set(etas)) < r:
            continue
        images = []
        for c in coeffs:
            v = tuple(sum(ci * e[k] for ci, e in zip(c, etas)) for k in range(r))
            if v not in dst_cov:
                break
            images.append(v)
        else:
            l_mat = RationalMatrix(zip(*etas)) @ s_inv
            if l_mat.det() == 0:
                continue
            m = l_mat.inverse().T
            verdict = verify_an_map(m, src, dst)
            if verdict.ok:
                found.append(make_an_map(m, src, dst))
    found.sort(key=lambda a: a.matrix.entries)
    return found


def paper_t_ambient(n: int) -> RationalMatrix:
    """``T(x_0..x_n) = ½(2x_1 − (x_0+x_n), .., 2x_{n−1} − (x_0+x_n), x_n − x_0)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    half = Fraction(1, 2)
    rows = []
    for k in range(1, n):
        r = [Fraction(0)] * (n + 1)
        r[k] += 1
        r[0] -= half
        r[n] -= half
        rows.append(r)
    r = [Fraction(0)] * (n + 1)
    r[n], r[0] = half, -half
    rows.append(r)
    return RationalMatrix(rows)


def paper_t(n: int) -> ANMap:
    """The A_n -> C_n AN-map, in A_n sum-zero coordinates and C_n coordinates."""
    return make_an_map(paper_t_ambient(n), build_root_system("A", n), build_root_system("C", n))


def underlying_pattern_map(a: ANMap) -> tuple[RationalMatrix, Pattern, Pattern]:
    return a.matrix, pattern_of(a.src), pattern_of(a.dst)
