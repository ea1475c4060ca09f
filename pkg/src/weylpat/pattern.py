"""Weyl hyperplane patterns and their relatedness/triad/family combinatorics.

Two hyperplanes U, V are *related* when a third pattern hyperplane W contains
U ∩ V. For central hyperplanes this is a statement about normals: U ∩ V is
the annihilator of span(u, v), so W ⊇ U ∩ V exactly when w ∈ span(u, v). We
therefore test relatedness by the rank of {u, v, w} rather than by
intersecting subspaces.

Note on naming: the stars ``S_i = {x_i = x_j : j != i}`` of an A_n pattern are
sometimes also written ``F_i``; here they are one and the same object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Optional

import networkx as nx

from .exactlin import RationalMatrix, primitive_integer, rank
from .rootsystem import RootSystem, build_root_system, parse_spec

LARGE_FAMILY = 4


@dataclass(frozen=True, order=True)
class Hyperplane:
    """Central hyperplane given by a primitive integer normal (first nonzero entry positive)."""

    normal: tuple[int, ...]

    def __post_init__(self):
        if primitive_integer(self.normal) != tuple(self.normal):
            raise ValueError(f"normal {self.normal!r} is not primitive and sign-normalized")

    @classmethod
    def from_vector(cls, v) -> "Hyperplane":
        return cls(primitive_integer(v))

    def label(self, sum_zero: bool = False) -> str:
        return hyperplane_label(self.normal, sum_zero)


def hyperplane_label(normal, sum_zero: bool = False) -> str:
    """Readable equation: ``x0=x1`` in sum-zero models, ``y1=-y2`` or ``y3=0`` otherwise."""
    var, off = ("x", 0) if sum_zero else ("y", 1)
    nz = [(i, c) for i, c in enumerate(normal) if c != 0]
    if len(nz) == 1:
        return f"{var}{nz[0][0] + off}=0"
    if len(nz) == 2 and abs(nz[0][1]) == abs(nz[1][1]) == 1:
        (i, a), (j, b) = nz
        rhs = f"{var}{j + off}" if a == -b else f"-{var}{j + off}"
        return f"{var}{i + off}={rhs}"
    terms = []
    for i, c in nz:
        coef = "" if abs(c) == 1 else str(abs(c))
        sign = "-" if c < 0 else ("+" if terms else "")
        terms.append(f"{sign}{coef}{var}{i + off}")
    return "".join(terms) + "=0"


@dataclass(frozen=True)
class Pattern:
    """Finite set of central hyperplanes in a rank-r space.

    ``basis`` has the ambient coordinates of a basis of the space as its
    columns; normals are stored in ambient coordinates and
    :attr:`covectors` gives them in basis coordinates.
    """

    family: str
    rank: int
    ambient_dim: int
    hyperplanes: tuple[Hyperplane, ...]
    basis: RationalMatrix
    origin_system: Optional[RootSystem] = field(default=None, compare=False, repr=False)

    @property
    def name(self) -> str:
        return self.family if self.family == "G2" else f"{self.family}{self.rank}"

    @property
    def sum_zero(self) -> bool:
        return self.ambient_dim == self.rank + 1

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def __iter__(self):
        return iter(self.hyperplanes)

    @cached_property
    def gram(self) -> RationalMatrix:
        return self.basis.T @ self.basis

    @cached_property
    def _index(self) -> dict:
        return {h.normal: i for i, h in enumerate(self.hyperplanes)}

    def index(self, h) -> int:
        key = h.normal if isinstance(h, Hyperplane) else primitive_integer(h)
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(f"{h!r} is not a hyperplane of {self.name}") from None

    def find(self, normal) -> Optional[int]:
        """Index of the hyperplane with the given (not necessarily primitive) normal, if present."""
        try:
            return self._index.get(primitive_integer(normal))
        except ValueError:
            return None

    @cached_property
    def covectors(self) -> tuple[tuple[Fraction, ...], ...]:
        """Normals as linear functionals in basis coordinates (primitive integers)."""
        bt = self.basis.T
        return tuple(primitive_integer(bt @ h.normal) for h in self.hyperplanes)

    def find_covector(self, cov) -> Optional[int]:
        try:
            key = primitive_integer(cov)
        except ValueError:
            return None
        return self._cov_index.get(key)

    @cached_property
    def _cov_index(self) -> dict:
        return {c: i for i, c in enumerate(self.covectors)}

    def labels(self) -> list[str]:
        return [h.label(self.sum_zero) for h in self.hyperplanes]

    def to_ambient_point(self, coords) -> tuple[Fraction, ...]:
        return self.basis @ coords

    def to_basis_coords(self, point) -> tuple[Fraction, ...]:
        """Basis coordinates of an ambient point (orthogonal projection onto the space)."""
        g_inv = self.gram.inverse()
        return g_inv @ (self.basis.T @ point)

    def relabeled(self, order: Iterable[int]) -> "Pattern":
        order = list(order)
        if sorted(order) != list(range(len(self))):
            raise ValueError("relabeling must be a permutation of hyperplane indices")
        hs = tuple(self.hyperplanes[i] for i in order)
        return Pattern(self.family, self.rank, self.ambient_dim, hs, self.basis, self.origin_system)


@dataclass(frozen=True)
class Family:
    """Set of pairwise related hyperplanes."""

    members: frozenset
    maximal: bool = False

    @property
    def large(self) -> bool:
        return len(self.members) >= LARGE_FAMILY

    def __len__(self) -> int:
        return len(self.members)

    def sorted_normals(self) -> list[list[int]]:
        return [list(h.normal) for h in sorted(self.members)]

    def to_json(self) -> dict:
        return {"members": self.sorted_normals(), "maximal": self.maximal, "large": self.large}

    @classmethod
    def from_json(cls, data: dict) -> "Family":
        return cls(frozenset(Hyperplane(tuple(n)) for n in data["members"]), bool(data["maximal"]))


def pattern_family(family: str) -> str:
    return "BC" if family in ("B", "C", "BC") else family


def pattern_of(rs: RootSystem) -> Pattern:
    """Hyperplanes orthogonal to the roots of ``rs``, deduplicated projectively."""
    normals = sorted({primitive_integer(r) for r in rs.positive_roots}, key=_hyperplane_order)
    return Pattern(
        pattern_family(rs.family),
        rs.rank,
        rs.ambient_dim,
        tuple(Hyperplane(n) for n in normals),
        rs.basis,
        rs,
    )


def _hyperplane_order(normal):
    return [i for i, x in enumerate(normal) if x], normal


def pattern_from_spec(text: str) -> Pattern:
    return pattern_of(build_root_system(*parse_spec(text)))


def expected_hyperplane_count(family: str, n: int) -> int:
    return {"A": n * (n + 1) // 2, "BC": n * n, "D": n * (n - 1), "G2": 6}[pattern_family(family)]


# ---------------------------------------------------------------------------
# Relatedness, triads, families


@lru_cache(maxsize=64)
def _triad_table(p: Pattern) -> tuple[frozenset, tuple[frozenset, ...]]:
    """All triads as index triples, and for each index the set of related indices."""
    covs = p.covectors
    n = len(covs)
    dependent = set()
    related = [set() for _ in range(n)]
    for i, j, k in combinations(range(n), 3):
        if rank([covs[i], covs[j], covs[k]]) == 2:
            dependent.add((i, j, k))
            for a, b in ((i, j), (i, k), (j, k)):
                related[a].add(b)
                related[b].add(a)
    return frozenset(dependent), tuple(frozenset(s) for s in related)


def _as_index(p: Pattern, h) -> int:
    return h if isinstance(h, int) else p.index(h)


def related(p: Pattern, u, v) -> bool:
    """True iff some third hyperplane of ``p`` has its normal in span(u, v)."""
    i, j = _as_index(p, u), _as_index(p, v)
    if i == j:
        raise ValueError("relatedness is defined for two distinct hyperplanes")
    return j in _triad_table(p)[1][i]


def related_witness(p: Pattern, u, v) -> Optional[Hyperplane]:
    """A hyperplane W completing ``{u, v}`` to a triad, or ``None``."""
    i, j = _as_index(p, u), _as_index(p, v)
    if i == j:
        raise ValueError("relatedness is defined for two distinct hyperplanes")
    for t in _triad_table(p)[0]:
        if i in t and j in t:
            (k,) = set(t) - {i, j}
            return p.hyperplanes[k]
    return None


def triad_indices(p: Pattern) -> list[tuple[int, int, int]]:
    return sorted(_triad_table(p)[0])


def triads(p: Pattern) -> set[frozenset]:
    """All triples of hyperplanes whose three normals span a 2-dimensional space."""
    hs = p.hyperplanes
    return {frozenset((hs[i], hs[j], hs[k])) for i, j, k in _triad_table(p)[0]}


def relatedness_graph(p: Pattern) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(len(p)))
    for i, nbrs in enumerate(_triad_table(p)[1]):
        g.add_edges_from((i, j) for j in nbrs if j > i)
    return g


def is_family(p: Pattern, members: Iterable) -> bool:
    idx = [_as_index(p, h) for h in members]
    rel = _triad_table(p)[1]
    return all(b in rel[a] for a, b in combinations(idx, 2))


def maximal_families(p: Pattern) -> list[Family]:
    """All inclusion-maximal families (maximal cliques of the relatedness graph).

    Sorted by decreasing size, then by the sorted list of member normals, so
    the result does not depend on the order hyperplanes are listed in.
    """
    g = relatedness_graph(p)
    hs = p.hyperplanes
    fams = [Family(frozenset(hs[i] for i in clique), True) for clique in nx.find_cliques(g)]
    fams.sort(key=lambda f: (-len(f), f.sorted_normals()))
    return fams


def triad_membership(p: Pattern) -> list[int]:
    counts = [0] * len(p)
    for t in _triad_table(p)[0]:
        for i in t:
            counts[i] += 1
    return counts
