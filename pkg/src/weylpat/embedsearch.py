"""Exhaustive search and classification of linear pattern embeddings.

A linear map M (basis coordinates of the source space to basis coordinates
of the target) sends the hyperplane ker(u) onto ker(v) exactly when
M^t v is a nonzero multiple of u. The search assigns source hyperplanes to
target hyperplanes one at a time and keeps the space of matrices X = M^t
satisfying ``X v_σ(i) ∥ u_i`` for every assignment so far as an explicit
rational basis. Two prunes cut the tree:

* triads go to triads and independent triples to independent triples
  (X is invertible, so it preserves the rank of any set of normals);
* the solution space must be nonzero and, once it is one-dimensional,
  its generator must be invertible. From that point the rest of the
  assignment is forced and is read off from M directly.

The first source hyperplane is only sent to one representative per orbit
of the target Weyl group; the full list is then recovered by letting the
target Weyl group act on the results.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .exactlin import (
    DistortionBound,
    RationalMatrix,
    determinant,
    distortion,
    fraction_to_str,
    is_conformal,
    kernel,
    primitive_integer,
    rank,
)
from .pattern import Pattern, pattern_from_spec, triad_indices, triad_membership
from .weylgroup import WeylGroup, generate, orbit, orbit_canonical

log = logging.getLogger(__name__)

DEFAULT_RANK_CAP = 6


class RankMismatch(ValueError):
    pass


class RankCapExceeded(ValueError):
    pass


# ---------------------------------------------------------------------------
# Coordinate changes between ambient and basis coordinates


def to_intrinsic(ambient: RationalMatrix, src: Pattern, dst: Pattern) -> Optional[RationalMatrix]:
    """Basis-coordinate matrix of an ambient linear map, or ``None`` if it leaves the target space."""
    if ambient.shape != (dst.ambient_dim, src.ambient_dim):
        raise ValueError(
            f"expected a {dst.ambient_dim}x{src.ambient_dim} ambient matrix, got {ambient.shape}"
        )
    image = ambient @ src.basis
    m = dst.gram.inverse() @ dst.basis.T @ image
    if dst.basis @ m != image:
        return None
    return m


def to_ambient(m: RationalMatrix, src: Pattern, dst: Pattern) -> RationalMatrix:
    """Ambient matrix acting as ``m`` on the source space and as zero on its orthogonal complement."""
    return dst.basis @ m @ src.gram.inverse() @ src.basis.T


def _coerce(t: RationalMatrix, src: Pattern, dst: Pattern) -> Optional[RationalMatrix]:
    if t.shape == (dst.rank, src.rank):
        return t
    return to_intrinsic(t, src, dst)


# ---------------------------------------------------------------------------
# Embedding objects


@dataclass(frozen=True)
class PatternEmbedding:
    """Invertible linear map together with the hyperplane injection it induces.

    ``matrix`` is in basis coordinates and scale-normalized; ``assignment[i]``
    is the index of the target hyperplane that source hyperplane ``i`` maps to.
    """

    matrix: RationalMatrix
    assignment: tuple[int, ...]
    src: Pattern = field(compare=False, repr=False)
    dst: Pattern = field(compare=False, repr=False)
    class_id: Optional[tuple[int, ...]] = field(default=None, compare=False)

    @property
    def T(self) -> RationalMatrix:
        return self.matrix

    @property
    def ambient_matrix(self) -> RationalMatrix:
        return to_ambient(self.matrix, self.src, self.dst)

    @property
    def conformal(self) -> bool:
        return self.conformal_scalar is not None

    @property
    def conformal_scalar(self) -> Optional[Fraction]:
        return is_conformal(self.matrix, self.src.gram, self.dst.gram)

    def distortion(self, precision=Fraction(1, 10**6)) -> DistortionBound:
        return distortion(self.matrix, precision, self.src.gram, self.dst.gram)

    @property
    def image(self) -> frozenset:
        return frozenset(self.assignment)

    def image_labels(self) -> list[str]:
        labels = self.dst.labels()
        return [labels[j] for j in sorted(self.image)]

    def with_class(self, class_id) -> "PatternEmbedding":
        return PatternEmbedding(self.matrix, self.assignment, self.src, self.dst, tuple(class_id))


def _normalized(m: RationalMatrix) -> RationalMatrix:
    return m.scale_normalized()


def make_embedding(t: RationalMatrix, src: Pattern, dst: Pattern) -> PatternEmbedding:
    """Wrap a (basis or ambient coordinate) matrix known to be an embedding."""
    m = _coerce(t, src, dst)
    a = verify_embedding(t, src, dst)
    if m is None or a is None:
        raise ValueError("matrix is not a pattern embedding")
    return PatternEmbedding(_normalized(m), a, src, dst)


def verify_embedding(t: RationalMatrix, src: Pattern, dst: Pattern) -> Optional[tuple[int, ...]]:
    """Induced assignment if ``t`` is invertible and maps every source hyperplane into the target pattern.

    ``t`` may be given in basis coordinates (rank x rank) or in ambient
    coordinates (e.g. ``x_0 .. x_n`` for A_n).
    """
    if src.rank != dst.rank:
        return None
    m = _coerce(t, src, dst)
    if m is None or m.det() == 0:
        return None
    minv_t = m.inverse().T
    out = []
    for u in src.covectors:
        j = dst.find_covector(minv_t @ u)
        if j is None:
            return None
        out.append(j)
    if len(set(out)) != len(out):
        return None
    return tuple(out)


# ---------------------------------------------------------------------------
# The explicit A_n -> BC_n maps


def first_form_ambient(n: int) -> RationalMatrix:
    """``(x_0, .., x_n) -> (x_1 - x_0, .., x_n - x_0)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rows = []
    for k in range(1, n + 1):
        r = [0] * (n + 1)
        r[k] += 1
        r[0] -= 1
        rows.append(r)
    return RationalMatrix(rows)


def second_form_ambient(n: int) -> RationalMatrix:
    """``(x_0, .., x_n) -> (2x_1 - (x_0 + x_n), .., 2x_{n-1} - (x_0 + x_n), x_n - x_0)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rows = []
    for k in range(1, n):
        r = [0] * (n + 1)
        r[k] += 2
        r[0] -= 1
        r[n] -= 1
        rows.append(r)
    r = [0] * (n + 1)
    r[n], r[0] = 1, -1
    rows.append(r)
    return RationalMatrix(rows)


def first_form(n: int) -> PatternEmbedding:
    return make_embedding(first_form_ambient(n), pattern_from_spec(f"A{n}"), pattern_from_spec(f"BC{n}"))


def second_form(n: int) -> PatternEmbedding:
    return make_embedding(second_form_ambient(n), pattern_from_spec(f"A{n}"), pattern_from_spec(f"BC{n}"))


# ---------------------------------------------------------------------------
# Solution spaces of matrices


def _det_of_combination(basis, coeffs, r):
    flat = [sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(r * r)]
    return determinant([flat[i * r:(i + 1) * r] for i in range(r)])


def invertible_element(basis: Sequence[Sequence[Fraction]], r: int, rng=None, tries: int = 12):
    """Decide whether span(basis) (flattened r x r matrices) contains an invertible matrix.

    Returns ``(verdict, witness)``: ``(True, coeffs)`` with a certified
    witness, ``(False, None)`` when the determinant polynomial is proved to
    vanish identically, or ``(None, None)`` if the proof would be too costly.

    Witnesses come from a small integer grid search. The vanishing proof uses
    the Kronecker substitution t_i = s^(D^i), D = r + 1: the determinant is a
    form of degree r in the coefficients, so distinct monomials map to
    distinct powers of s and it suffices to evaluate at r·D^(k-1) + 1 points.
    """
    k = len(basis)
    if k == 0:
        return False, None
    if k == 1:
        return (True, (Fraction(1),)) if _det_of_combination(basis, [1], r) != 0 else (False, None)
    rng = rng or random.Random(0x5EED)
    for _ in range(tries):
        c = [rng.randint(-9, 9) for _ in range(k)]
        if _det_of_combination(basis, c, r) != 0:
            return True, tuple(Fraction(x) for x in c)
    d = r + 1
    npoints = r * d ** (k - 1) + 1
    if npoints > 20000:
        return None, None
    for s in range(1, npoints + 1):
        c = [s ** (d**i) for i in range(k)]
        if _det_of_combination(basis, c, r) != 0:
            return True, tuple(Fraction(x) for x in c)
    return False, None


class _Search:
    """Backtracking state for one (src, dst) pair."""

    def __init__(self, src: Pattern, dst: Pattern):
        self.src, self.dst = src, dst
        self.r = src.rank
        self.U = [tuple(Fraction(x) for x in u) for u in src.covectors]
        self.V = [tuple(Fraction(x) for x in v) for v in dst.covectors]
        self.perp = [kernel([u]) for u in self.U]
        self.src_dep = set(triad_indices(src))
        self.dst_dep = set(triad_indices(dst))
        self.order = self._order()
        pos = {h: k for k, h in enumerate(self.order)}
        # for each position, the earlier pairs forming a triple with it
        self.triples = []
        for k, h in enumerate(self.order):
            items = []
            for a, b in combinations(self.order[:k], 2):
                dep = tuple(sorted((h, a, b))) in self.src_dep
                items.append((a, b, dep))
            self.triples.append(items)
        self.pos = pos
        self.nodes = 0

    def _order(self) -> list[int]:
        counts = triad_membership(self.src)
        n = len(self.src)
        remaining = set(range(n))
        first = max(remaining, key=lambda i: (counts[i], -i))
        order = [first]
        remaining.discard(first)
        while remaining:
            chosen = set(order)

            def score(i):
                closing = sum(
                    1 for t in self.src_dep if i in t and all(x in chosen for x in t if x != i)
                )
                span = rank([self.U[j] for j in order] + [self.U[i]])
                return (closing, span, counts[i], -i)

            nxt = max(remaining, key=score)
            order.append(nxt)
            remaining.discard(nxt)
        return order

    def _dst_dependent(self, a, b, c) -> bool:
        return tuple(sorted((a, b, c))) in self.dst_dep

    def _restrict(self, basis, i, j):
        """Subspace of span(basis) with X v_j ∥ u_i."""
        r = self.r
        v = self.V[j]
        rows = []
        for w in self.perp[i]:
            row = []
            for b in basis:
                s = Fraction(0)
                for a in range(r):
                    if w[a] == 0:
                        continue
                    off = a * r
                    s += w[a] * sum(b[off + c] * v[c] for c in range(r) if v[c] != 0)
                row.append(s)
            rows.append(row)
        lam = kernel(rows, len(basis))
        return [
            [sum(l[t] * basis[t][x] for t in range(len(basis)) if l[t] != 0) for x in range(r * r)]
            for l in lam
        ]

    def _forced_completion(self, x_flat, assigned: dict):
        r = self.r
        x = RationalMatrix([x_flat[i * r:(i + 1) * r] for i in range(r)])
        if x.det() == 0:
            return None
        xinv = x.inverse()
        used = set(assigned.values())
        full = dict(assigned)
        for i in self.order:
            if i in full:
                continue
            j = self.dst.find_covector(xinv @ self.U[i])
            if j is None or j in used:
                return None
            used.add(j)
            full[i] = j
        return x, full

    def run(self, first_choices: Optional[Iterable[int]] = None, second_choices=None):
        r = self.r
        start = [[Fraction(int(x == y)) for y in range(r * r)] for x in range(r * r)]
        results = []
        n_src = len(self.order)
        used = [False] * len(self.V)
        assigned: dict[int, int] = {}
        rng = random.Random(0xC0FFEE)

        def extend(depth, basis):
            self.nodes += 1
            if len(basis) == 1:
                done = self._forced_completion(basis[0], assigned)
                if done is not None:
                    results.append(done)
                return
            if depth == n_src:
                verdict, coeffs = invertible_element(basis, r, rng)
                if verdict is None:
                    raise RuntimeError("could not decide invertibility of the solution space")
                if verdict:
                    flat = [sum(c * b[x] for c, b in zip(coeffs, basis)) for x in range(r * r)]
                    done = self._forced_completion(flat, assigned)
                    if done is not None:
                        results.append(done)
                return
            h = self.order[depth]
            if depth == 0 and first_choices is not None:
                candidates = list(first_choices)
            elif depth == 1 and second_choices is not None:
                candidates = list(second_choices)
            else:
                candidates = range(len(self.V))
            for j in candidates:
                if used[j]:
                    continue
                ok = True
                for a, b, dep in self.triples[depth]:
                    if self._dst_dependent(j, assigned[a], assigned[b]) != dep:
                        ok = False
                        break
                if not ok:
                    continue
                nb = self._restrict(basis, h, j)
                if not nb:
                    continue
                if len(nb) > 1 and len(nb) < len(basis):
                    verdict, _ = invertible_element(nb, r, rng, tries=4)
                    if verdict is False:
                        continue
                used[j] = True
                assigned[h] = j
                extend(depth + 1, nb)
                del assigned[h]
                used[j] = False

        extend(0, start)
        out = []
        for x, full in results:
            m = _normalized(x.T)
            out.append((m, tuple(full[i] for i in range(n_src))))
        return out


def _search_branch(args):
    src, dst, first, second = args
    return _Search(src, dst).run(first, second)


def _expand_by_target_group(found, w_dst: WeylGroup, src: Pattern, dst: Pattern):
    """Close a set of (matrix, assignment) pairs under the target Weyl group."""
    gens = [(w_dst.hyperplane_permutation(g), w_dst.intrinsic(g)) for g in w_dst.generators]
    seen = {}
    queue = deque()
    for m, a in found:
        if a not in seen:
            seen[a] = m
            queue.append(a)
    while queue:
        a = queue.popleft()
        m = seen[a]
        for perm, g in gens:
            b = tuple(perm[x] for x in a)
            if b not in seen:
                seen[b] = _normalized(g @ m)
                queue.append(b)
    return seen


def find_embeddings(
    src: Pattern,
    dst: Pattern,
    *,
    symmetry: bool = True,
    rank_cap: int = DEFAULT_RANK_CAP,
    workers: int = 1,
) -> list[PatternEmbedding]:
    """All pattern embeddings of ``src`` into ``dst``, up to scaling, sorted by assignment."""
    if src.rank != dst.rank:
        raise RankMismatch(f"{src.name} and {dst.name} have different ranks")
    if src.rank > rank_cap:
        raise RankCapExceeded(f"rank {src.rank} exceeds the search cap {rank_cap}")
    if src.rank < 2:
        raise ValueError("rank must be at least 2")
    if len(src) > len(dst):
        return []
    search = _Search(src, dst)
    first_choices = None
    w_dst = None
    if symmetry and dst.origin_system is not None:
        w_dst = generate(dst)
        first_choices = [orb[0] for orb in w_dst.hyperplane_orbits]
    tasks = []
    if workers > 1:
        firsts = first_choices if first_choices is not None else list(range(len(dst)))
        for f in firsts:
            for s in range(len(dst)):
                if s != f:
                    tasks.append((src, dst, [f], [s]))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            found = [x for part in pool.map(_search_branch, tasks) for x in part]
    else:
        found = search.run(first_choices)
        log.debug("%s -> %s: %d search nodes, %d raw", src.name, dst.name, search.nodes, len(found))
    if w_dst is not None:
        table = _expand_by_target_group(found, w_dst, src, dst)
    else:
        table = {}
        for m, a in found:
            table.setdefault(a, m)
    return [PatternEmbedding(table[a], a, src, dst) for a in sorted(table)]


# ---------------------------------------------------------------------------
# Classification up to Weyl groups and scaling


@dataclass(frozen=True)
class EmbeddingClass:
    class_id: tuple[int, ...]
    representative: PatternEmbedding
    size: int
    conformal: bool
    distortion: DistortionBound

    def to_json(self) -> dict:
        rep = self.representative
        return {
            "matrix": rep.ambient_matrix.to_strings(),
            "basis_matrix": rep.matrix.to_strings(),
            "assignment": list(rep.assignment),
            "image": rep.image_labels(),
            "conformal": self.conformal,
            "distortion": self.distortion.to_json(),
            "class_id": list(self.class_id),
            "size": self.size,
            "src": rep.src.name,
            "dst": rep.dst.name,
        }

    @classmethod
    def from_json(cls, data: dict) -> "EmbeddingClass":
        src, dst = pattern_from_spec(data["src"]), pattern_from_spec(data["dst"])
        cid = tuple(data["class_id"])
        rep = PatternEmbedding(
            RationalMatrix.from_strings(data["basis_matrix"]), tuple(data["assignment"]), src, dst, cid
        )
        return cls(cid, rep, int(data["size"]), bool(data["conformal"]), DistortionBound.from_json(data["distortion"]))


def classify(
    embeddings: Sequence[PatternEmbedding],
    w_src: Optional[WeylGroup] = None,
    w_dst: Optional[WeylGroup] = None,
    precision=Fraction(1, 10**6),
) -> list[EmbeddingClass]:
    """Partition embeddings into orbits of W_src x W_dst; one representative per class."""
    if not embeddings:
        return []
    src, dst = embeddings[0].src, embeddings[0].dst
    w_src = w_src if w_src is not None else generate(src)
    w_dst = w_dst if w_dst is not None else generate(dst)
    canon_of: dict[tuple, tuple] = {}
    members: dict[tuple, list[PatternEmbedding]] = {}
    for e in embeddings:
        cid = canon_of.get(e.assignment)
        if cid is None:
            orb = orbit(e.assignment, w_src, w_dst)
            cid = min(orb)
            for a in orb:
                canon_of[a] = cid
        members.setdefault(cid, []).append(e)
    out = []
    for cid in sorted(members):
        group = members[cid]
        rep = next((e for e in group if e.assignment == cid), group[0]).with_class(cid)
        out.append(
            EmbeddingClass(cid, rep, len(group), rep.conformal, rep.distortion(precision))
        )
    return out


def class_of(e: PatternEmbedding, w_src: Optional[WeylGroup] = None, w_dst: Optional[WeylGroup] = None):
    return orbit_canonical(e.assignment, w_src or generate(e.src), w_dst or generate(e.dst))
