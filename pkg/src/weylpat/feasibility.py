"""Exact feasibility of homogeneous strict linear inequality systems.

``a_i · x > 0 for all i`` has a solution iff ``a_i · x >= 1`` does (scale any
strict solution). We decide the latter by Fourier-Motzkin elimination over
the rationals, pruned with Chernikov's rule. Every verdict is certified:
feasible systems come with a witness point, infeasible ones with
nonnegative multipliers ``λ != 0`` such that ``Σ λ_i a_i = 0`` (Gordan's
alternative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    witness: Optional[tuple[Fraction, ...]] = None
    certificate: Optional[tuple[Fraction, ...]] = None

    def __bool__(self) -> bool:
        return self.feasible


def satisfies_strictly(rows: Sequence[Sequence], x: Sequence) -> bool:
    return all(sum(a * b for a, b in zip(r, x)) > 0 for r in rows)


def is_certificate(rows: Sequence[Sequence], lam: Sequence) -> bool:
    """Check ``λ >= 0``, ``λ != 0`` and ``Σ λ_i a_i = 0`` exactly."""
    if len(lam) != len(rows) or any(x < 0 for x in lam) or all(x == 0 for x in lam):
        return False
    dim = len(rows[0]) if rows else 0
    return all(sum(l * r[k] for l, r in zip(lam, rows)) == 0 for k in range(dim))


class _Ineq:
    __slots__ = ("a", "b", "hist", "mult")

    def __init__(self, a, b, hist, mult):
        self.a = a  # tuple of Fraction
        self.b = b  # Fraction; the inequality is a . x >= b
        self.hist = hist  # frozenset of original indices
        self.mult = mult  # dict original index -> multiplier


def _scaled(ineq: _Ineq) -> _Ineq:
    lead = next((abs(x) for x in ineq.a if x != 0), None)
    if lead is None or lead == 1:
        return ineq
    return _Ineq(
        tuple(x / lead for x in ineq.a),
        ineq.b / lead,
        ineq.hist,
        {k: v / lead for k, v in ineq.mult.items()},
    )


def _dedupe(ineqs: list[_Ineq]) -> list[_Ineq]:
    """Drop inequalities dominated by another with the same normal: stronger bound, smaller history.

    Keeping only the strongest bound would break Chernikov's rule, which
    relies on the small-history members surviving.
    """
    kept: dict = {}
    for q in ineqs:
        q = _scaled(q)
        bucket = kept.setdefault(q.a, [])
        if any(k.b >= q.b and k.hist <= q.hist for k in bucket):
            continue
        bucket[:] = [k for k in bucket if not (q.b >= k.b and q.hist <= k.hist)]
        bucket.append(q)
    return [q for bucket in kept.values() for q in bucket]


def fourier_motzkin(rows: Sequence[Sequence], rhs: Optional[Sequence] = None) -> Feasibility:
    """Decide ``rows · x >= rhs`` (``rhs`` defaults to all ones)."""
    rows = [tuple(Fraction(x) for x in r) for r in rows]
    m = len(rows)
    if m == 0:
        return Feasibility(True, witness=())
    n = len(rows[0])
    b = [Fraction(1)] * m if rhs is None else [Fraction(x) for x in rhs]
    system = _dedupe([_Ineq(r, bi, frozenset([i]), {i: Fraction(1)}) for i, (r, bi) in enumerate(zip(rows, b))])
    levels = []
    for k in range(n):
        levels.append(system)
        pos = [q for q in system if q.a[k] > 0]
        neg = [q for q in system if q.a[k] < 0]
        nxt = [q for q in system if q.a[k] == 0]
        for p in pos:
            for q in neg:
                hist = p.hist | q.hist
                if len(hist) > k + 2:
                    continue  # Chernikov: redundant
                cp, cq = p.a[k], -q.a[k]
                a = tuple(cq * x + cp * y for x, y in zip(p.a, q.a))
                mult = dict()
                for idx, v in p.mult.items():
                    mult[idx] = mult.get(idx, 0) + cq * v
                for idx, v in q.mult.items():
                    mult[idx] = mult.get(idx, 0) + cp * v
                nxt.append(_Ineq(a, cq * p.b + cp * q.b, hist, mult))
        system = _dedupe(nxt)
        for q in system:
            if all(x == 0 for x in q.a) and q.b > 0:
                lam = tuple(q.mult.get(i, Fraction(0)) for i in range(m))
                return Feasibility(False, certificate=lam)
    # back-substitution, last eliminated variable first
    x = [Fraction(0)] * n
    for k in reversed(range(n)):
        lo = hi = None
        for q in levels[k]:
            c = q.a[k]
            if c == 0:
                continue
            rest = sum(q.a[t] * x[t] for t in range(k + 1, n))
            bound = (q.b - rest) / c
            if c > 0:
                lo = bound if lo is None or bound > lo else lo
            else:
                hi = bound if hi is None or bound < hi else hi
        if lo is not None and hi is not None:
            if lo > hi:
                raise AssertionError("Fourier-Motzkin back-substitution found an empty interval")
            x[k] = (lo + hi) / 2
        elif lo is not None:
            x[k] = Fraction(math.ceil(lo))
        elif hi is not None:
            x[k] = Fraction(math.floor(hi))
        else:
            x[k] = Fraction(0)
    for r, bi in zip(rows, b):
        if sum(a * y for a, y in zip(r, x)) < bi:
            raise AssertionError("Fourier-Motzkin witness violates the system")
    return Feasibility(True, witness=tuple(x))


def strict_feasible(rows: Sequence[Sequence], hints: Sequence[Sequence] = ()) -> Feasibility:
    """Decide whether ``rows · x > 0`` has a solution.

    ``hints`` are candidate points tried first; elimination remains the
    authority whenever none of them works.
    """
    rows = [tuple(Fraction(x) for x in r) for r in rows]
    for h in hints:
        if satisfies_strictly(rows, h):
            return Feasibility(True, witness=tuple(Fraction(x) for x in h))
    res = fourier_motzkin(rows)
    if res.feasible:
        assert satisfies_strictly(rows, res.witness)
    else:
        assert is_certificate(rows, res.certificate)
    return res
