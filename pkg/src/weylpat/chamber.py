"""Weyl chambers of patterns and how a linear map subdivides them.

A chamber is an open cone cut out by one sign per pattern hyperplane. For
A_n chambers are also named by the ordering of the coordinates
``x_0 .. x_n`` at any interior point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exactlin import RationalMatrix, fraction_to_str
from .feasibility import Feasibility, satisfies_strictly, strict_feasible
from .pattern import Pattern

DEFAULT_RANK_CAP = 5


class RankCapExceeded(ValueError):
    pass


@dataclass
class FeasibilityLog:
    """Counts of exact verdicts issued while enumerating regions."""

    by_hint: int = 0
    by_elimination_feasible: int = 0
    by_elimination_empty: int = 0
    certificates: list = field(default_factory=list)


def functionals(p: Pattern) -> list[tuple[Fraction, ...]]:
    """Hyperplane normals as functionals in basis coordinates, keeping the ambient orientation."""
    bt = p.basis.T
    return [bt @ h.normal for h in p.hyperplanes]


@dataclass(frozen=True)
class Chamber:
    pattern: Pattern = field(repr=False, compare=False)
    signs: tuple[int, ...]
    witness: tuple[Fraction, ...]

    @property
    def ambient_witness(self) -> tuple[Fraction, ...]:
        return self.pattern.to_ambient_point(self.witness)

    def constraints(self) -> list[tuple[Fraction, ...]]:
        return [tuple(s * x for x in f) for s, f in zip(self.signs, functionals(self.pattern))]

    @property
    def ordering(self) -> Optional[tuple[int, ...]]:
        """Indices of ``x_0 .. x_n`` from smallest to largest (sum-zero patterns only)."""
        if not self.pattern.sum_zero:
            return None
        pt = self.ambient_witness
        return tuple(sorted(range(len(pt)), key=lambda i: pt[i]))

    def label(self) -> str:
        order = self.ordering
        if order is not None:
            return "<".join(f"x{i}" for i in order)
        return "".join("+" if s > 0 else "-" for s in self.signs)


def _hints(w, f):
    """Candidate points on the far side of ker(f) from ``w``: reflections pushed slightly past it."""
    ff = sum(x * x for x in f)
    fw = sum(a * b for a, b in zip(f, w))
    out = []
    for push in (Fraction(3, 2), Fraction(17, 16), Fraction(257, 256)):
        t = push * fw / ff
        out.append(tuple(a - t * b for a, b in zip(w, f)))
    return out


def regions(
    base: Sequence[Sequence],
    cuts: Sequence[Sequence],
    dim: int,
    log: Optional[FeasibilityLog] = None,
) -> list[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
    """Nonempty sign patterns of ``cuts`` inside the open cone ``base · x > 0``.

    Returns (signs, witness) pairs. Hyperplanes are added one at a time and
    every region is split when both sides are nonempty.
    """
    base = [tuple(Fraction(x) for x in r) for r in base]
    start = strict_feasible(base) if base else Feasibility(True, witness=tuple(Fraction(0) for _ in range(dim)))
    if not start.feasible:
        return []
    current = [((), start.witness, list(base))]
    for f in cuts:
        f = tuple(Fraction(x) for x in f)
        neg_f = tuple(-x for x in f)
        nxt = []
        for signs, w, cons in current:
            fw = sum(a * b for a, b in zip(f, w))
            for side, row in ((1, f), (-1, neg_f)):
                new_cons = cons + [row]
                if fw * side > 0:
                    nxt.append((signs + (side,), w, new_cons))
                    continue
                hint = next((h for h in (_hints(w, f) if fw != 0 else []) if satisfies_strictly(new_cons, h)), None)
                if hint is not None:
                    res = Feasibility(True, witness=hint)
                else:
                    res = strict_feasible(new_cons)
                if log is not None:
                    if hint is not None:
                        log.by_hint += 1
                    elif res.feasible:
                        log.by_elimination_feasible += 1
                    else:
                        log.by_elimination_empty += 1
                        log.certificates.append((tuple(new_cons), res.certificate))
                if res.feasible:
                    nxt.append((signs + (side,), res.witness, new_cons))
        current = nxt
    return [(s, w) for s, w, _ in current]


def chambers(p: Pattern, rank_cap: int = DEFAULT_RANK_CAP, log: Optional[FeasibilityLog] = None) -> list[Chamber]:
    """All chambers of ``p`` with exact interior witnesses, sorted by sign vector (descending)."""
    if p.rank > rank_cap:
        raise RankCapExceeded(f"chamber enumeration is capped at rank {rank_cap}")
    regs = regions([], functionals(p), p.rank, log)
    out = [Chamber(p, s, w) for s, w in regs]
    out.sort(key=lambda c: tuple(-s for s in c.signs))
    return out


def chamber_by_ordering(p: Pattern, ordering: Sequence[int]) -> Chamber:
    """The A_n chamber ``x_{o_0} < x_{o_1} < ... < x_{o_n}``."""
    if not p.sum_zero:
        raise ValueError("orderings only name chambers of sum-zero patterns")
    rank_of = {idx: pos for pos, idx in enumerate(ordering)}
    signs = []
    for h in p.hyperplanes:
        i, j = [k for k, x in enumerate(h.normal) if x]
        # normal e_i - e_j: positive side is x_i > x_j
        sgn = 1 if rank_of[i] > rank_of[j] else -1
        signs.append(sgn if h.normal[i] > 0 else -sgn)
    signs = tuple(signs)
    pt = [Fraction(rank_of[k]) for k in range(p.ambient_dim)]
    mean = sum(pt) / len(pt)
    witness = p.to_basis_coords([x - mean for x in pt])
    c = Chamber(p, signs, witness)
    if not satisfies_strictly(c.constraints(), witness):
        raise AssertionError("ordering witness is not interior")
    return c


def _coerce(t: RationalMatrix, src: Pattern, dst: Pattern) -> RationalMatrix:
    from .embedsearch import to_intrinsic

    if t.shape == (dst.rank, src.rank):
        return t
    m = to_intrinsic(t, src, dst)
    if m is None:
        raise ValueError("map does not take the source flat into the target flat")
    return m


def pulled_back(t: RationalMatrix, src: Pattern, dst: Pattern) -> list[tuple[Fraction, ...]]:
    m = _coerce(t, src, dst)
    mt = m.T
    return [mt @ f for f in functionals(dst)]


def subdivision_count(
    t: RationalMatrix, c: Chamber, dst: Pattern, log: Optional[FeasibilityLog] = None
) -> int:
    """Number of target chambers met by the image of chamber ``c`` under ``t``."""
    m = _coerce(t, c.pattern, dst)
    if m.det() == 0:
        raise ValueError("subdivision counts need an invertible map")
    cuts = pulled_back(m, c.pattern, dst)
    return len(regions(c.constraints(), cuts, c.pattern.rank, log))


@dataclass(frozen=True)
class SubdivisionReport:
    labels: tuple[str, ...]
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def average(self) -> Fraction:
        return Fraction(self.total, len(self.counts))

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.labels, self.counts))

    def to_json(self) -> dict:
        return {
            "chambers": [{"chamber": l, "count": c} for l, c in zip(self.labels, self.counts)],
            "total": self.total,
            "average": fraction_to_str(self.average),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SubdivisionReport":
        rows = data["chambers"]
        rep = cls(tuple(r["chamber"] for r in rows), tuple(int(r["count"]) for r in rows))
        if rep.total != data["total"] or fraction_to_str(rep.average) != data["average"]:
            raise ValueError("inconsistent subdivision report")
        return rep


def subdivision_report(t: RationalMatrix, src: Pattern, dst: Pattern) -> SubdivisionReport:
    cs = chambers(src)
    counts = tuple(subdivision_count(t, c, dst) for c in cs)
    return SubdivisionReport(tuple(c.label() for c in cs), counts)


# ---------------------------------------------------------------------------
# SL_3 -> Sp_4 flat profiles

C0_ORDERING = (0, 1, 2)

# how many chambers of a flat of each type carry each label
FLAT_TYPES = {
    "through_C0": [{"C0": 1, "adjacent": 2, "adjacent_to_opposite": 2, "opposite": 1}],
    "type2": [{"opposite": 2, "adjacent_to_opposite": 2, "adjacent": 2}],
    "type3": [{"adjacent": 2, "opposite": 4}, {"adjacent_to_opposite": 2, "opposite": 4}],
    "generic": [{"opposite": 6}],
}

_LABEL_BY_DISTANCE = {0: "C0", 1: "adjacent", 2: "adjacent_to_opposite", 3: "opposite"}


def chamber_label_table(t: Optional[RationalMatrix] = None) -> dict[str, int]:
    """Per-label subdivision counts read off the flat through C_0.

    Chambers of that flat are labelled by their gallery distance to C_0
    (number of separating hyperplanes); the count must be constant on each
    label.
    """
    from .anmap import paper_t_ambient
    from .pattern import pattern_from_spec

    src, dst = pattern_from_spec("A2"), pattern_from_spec("C2")
    t = t if t is not None else paper_t_ambient(2)
    c0 = chamber_by_ordering(src, C0_ORDERING)
    table: dict[str, int] = {}
    for c in chambers(src):
        dist = sum(1 for a, b in zip(c.signs, c0.signs) if a != b)
        label = _LABEL_BY_DISTANCE[dist]
        n = subdivision_count(t, c, dst)
        if table.setdefault(label, n) != n:
            raise AssertionError(f"label {label} has inconsistent subdivision counts")
    return table


def sl3_flat_profile(flat_type: str, table: Optional[dict[str, int]] = None) -> int:
    """Total number of target chambers met by the image of a flat of the given type."""
    if flat_type not in FLAT_TYPES:
        raise ValueError(f"unknown flat type {flat_type!r}; expected one of {sorted(FLAT_TYPES)}")
    table = table if table is not None else chamber_label_table()
    totals = {sum(table[k] * v for k, v in ms.items()) for ms in FLAT_TYPES[flat_type]}
    if len(totals) != 1:
        raise AssertionError(f"label multisets of {flat_type} disagree: {sorted(totals)}")
    for ms in FLAT_TYPES[flat_type]:
        assert sum(ms.values()) == 6
    return totals.pop()
