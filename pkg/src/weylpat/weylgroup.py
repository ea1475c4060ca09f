"""Finite Weyl groups of patterns as explicit lists of exact matrices."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial
from typing import Optional, Sequence

from .exactlin import RationalMatrix
from .pattern import Pattern

DEFAULT_CAP = 10**6


class GroupTooLarge(RuntimeError):
    pass


def _normalize(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def reflection_matrix(normal: Sequence[int]) -> tuple[tuple, ...]:
    """Ambient reflection I - 2 n n^t / (n . n) in the hyperplane orthogonal to ``normal``."""
    nn = sum(x * x for x in normal)
    d = len(normal)
    return tuple(
        tuple(_normalize(Fraction(int(i == j)) - Fraction(2 * normal[i] * normal[j], nn)) for j in range(d))
        for i in range(d)
    )


def _mul(a, b):
    cols = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in cols) for r in a)


def _apply(m, v):
    return tuple(sum(x * y for x, y in zip(r, v)) for r in m)


def expected_order(family: str, n: int) -> int:
    return {
        "A": factorial(n + 1),
        "BC": 2**n * factorial(n),
        "D": 2 ** (n - 1) * factorial(n),
        "G2": 12,
    }[family]


@dataclass(frozen=True, eq=False)
class WeylGroup:
    """Weyl group of a pattern.

    ``elements`` are ambient matrices (integer signed permutations for the
    classical families); ``generators`` are the reflections used for closure.
    """

    pattern: Pattern
    elements: tuple[tuple[tuple, ...], ...]
    generators: tuple[tuple[tuple, ...], ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def matrices(self) -> list[RationalMatrix]:
        return [RationalMatrix(e) for e in self.elements]

    def hyperplane_permutation(self, m) -> tuple[int, ...]:
        """Induced permutation of hyperplane labels: ``perm[i]`` is the index of ``m(H_i)``."""
        p = self.pattern
        out = []
        for h in p.hyperplanes:
            j = p.find(_apply(m, h.normal))
            if j is None:
                raise ValueError("matrix does not preserve the pattern")
            out.append(j)
        return tuple(out)

    @cached_property
    def permutations(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.hyperplane_permutation(m) for m in self.elements)

    @cached_property
    def generator_permutations(self) -> tuple[tuple[int, ...], ...]:
        return tuple(dict.fromkeys(self.hyperplane_permutation(g) for g in self.generators))

    def intrinsic(self, m) -> RationalMatrix:
        """Matrix of an element in the pattern's basis coordinates."""
        p = self.pattern
        b = p.basis
        return p.gram.inverse() @ b.T @ RationalMatrix(m) @ b

    @cached_property
    def hyperplane_orbits(self) -> list[list[int]]:
        n = len(self.pattern)
        seen = [False] * n
        orbits = []
        for start in range(n):
            if seen[start]:
                continue
            orb = [start]
            seen[start] = True
            queue = deque([start])
            while queue:
                i = queue.popleft()
                for g in self.generator_permutations:
                    j = g[i]
                    if not seen[j]:
                        seen[j] = True
                        orb.append(j)
                        queue.append(j)
            orbits.append(sorted(orb))
        return orbits


def generate(p: Pattern, cap: int = DEFAULT_CAP) -> WeylGroup:
    """Close the set of reflections in the pattern's simple-root hyperplanes under products.

    When the pattern was not derived from a root system all of its
    hyperplane reflections are used as generators.
    """
    return _generate(p, cap)


@lru_cache(maxsize=32)
def _generate(p: Pattern, cap: int) -> WeylGroup:
    if p.origin_system is not None:
        gens_normals = [h for h in {tuple(x) for x in p.origin_system.simple_roots}]
        gens_normals.sort()
    else:
        gens_normals = [h.normal for h in p.hyperplanes]
    gens = tuple(reflection_matrix([int(x) for x in n]) for n in gens_normals)
    d = p.ambient_dim
    ident = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    seen = {ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        m = queue.popleft()
        for g in gens:
            x = _mul(g, m)
            if x not in seen:
                seen.add(x)
                order.append(x)
                if len(order) > cap:
                    raise GroupTooLarge(f"Weyl group of {p.name} exceeds the cap of {cap} elements")
                queue.append(x)
    order.sort()
    return WeylGroup(p, tuple(order), gens)


# ---------------------------------------------------------------------------
# Orbits of hyperplane assignments under W_src x W_dst


def act(assignment: Sequence[int], src_perm: Optional[Sequence[int]], dst_perm: Optional[Sequence[int]]):
    """``dst_perm ∘ assignment ∘ src_perm`` as a tuple."""
    a = tuple(assignment)
    if src_perm is not None:
        a = tuple(a[src_perm[i]] for i in range(len(a)))
    if dst_perm is not None:
        a = tuple(dst_perm[x] for x in a)
    return a


def orbit(assignment: Sequence[int], w_src: Optional[WeylGroup], w_dst: Optional[WeylGroup]) -> set:
    """All injections ``σ_w2 ∘ assignment ∘ σ_w1``, by breadth-first search over generators."""
    start = tuple(assignment)
    src_gens = w_src.generator_permutations if w_src is not None else ()
    dst_gens = w_dst.generator_permutations if w_dst is not None else ()
    seen = {start}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for g in src_gens:
            b = tuple(a[g[i]] for i in range(len(a)))
            if b not in seen:
                seen.add(b)
                queue.append(b)
        for g in dst_gens:
            b = tuple(g[x] for x in a)
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return seen


def orbit_canonical(assignment: Sequence[int], w_src: Optional[WeylGroup], w_dst: Optional[WeylGroup]):
    """Lexicographically least injection in the orbit of ``assignment``."""
    return min(orbit(assignment, w_src, w_dst))
