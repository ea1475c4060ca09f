from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylpat.pattern import (
    Family,
    Hyperplane,
    expected_hyperplane_count,
    is_family,
    maximal_families,
    pattern_from_spec,
    pattern_of,
    related,
    related_witness,
    triad_membership,
    triads,
)
from weylpat.rootsystem import build_root_system


def index_rule(family, h1, h2):
    """Relatedness read off the indices of the hyperplane equations."""
    s1 = {i for i, x in enumerate(h1.normal) if x}
    s2 = {i for i, x in enumerate(h2.normal) if x}
    if family in ("A", "D"):
        return len(s1 | s2) == 3
    if len(s1) == 1 and len(s2) == 1:
        return True
    if len(s1) == 1 or len(s2) == 1:
        coord, other = (s1, s2) if len(s1) == 1 else (s2, s1)
        return coord <= other
    return len(s1 | s2) in (2, 3)


@pytest.mark.parametrize("fam,n", [("A", n) for n in range(2, 9)] + [("BC", n) for n in range(2, 9)] + [("D", n) for n in range(4, 9)])
def test_hyperplane_counts(fam, n):
    assert len(pattern_from_spec(f"{fam}{n}")) == expected_hyperplane_count(fam, n)


def test_b_c_bc_share_one_pattern():
    pats = [pattern_of(build_root_system(f, 3)) for f in ("B", "C", "BC")]
    assert pats[0] == pats[1] == pats[2]
    assert len(pats[0]) == 9


def test_hyperplane_normalization():
    assert Hyperplane.from_vector([0, -2, 4]) == Hyperplane((0, 1, -2))
    with pytest.raises(ValueError):
        Hyperplane((2, 4))
    with pytest.raises(ValueError):
        Hyperplane((-1, 1))


@pytest.mark.parametrize("spec", ["A2", "A3", "A4", "A5", "BC2", "BC3", "BC4", "BC5", "D4", "D5"])
def test_relatedness_matches_index_rule(spec):
    p = pattern_from_spec(spec)
    fam = p.family
    for u, v in combinations(p.hyperplanes, 2):
        assert related(p, u, v) == index_rule(fam, u, v), (u, v)


def test_relatedness_examples():
    p = pattern_from_spec("A3")
    x01, x02, x12, x23 = (Hyperplane.from_vector(v) for v in ([1, -1, 0, 0], [1, 0, -1, 0], [0, 1, -1, 0], [0, 0, 1, -1]))
    assert related(p, x01, x02)
    assert related_witness(p, x01, x02) == x12
    assert not related(p, x01, x23)
    assert related_witness(p, x01, x23) is None
    with pytest.raises(ValueError):
        related(p, x01, x01)
    bc2 = pattern_from_spec("BC2")
    assert all(related(bc2, u, v) for u, v in combinations(bc2.hyperplanes, 2))


def brute_triads(p):
    from weylpat.exactlin import rank

    out = set()
    for t in combinations(p.hyperplanes, 3):
        normals = [h.normal for h in t]
        if all(rank([a, b]) == 2 for a, b in combinations(normals, 2)) and rank(normals) == 2:
            out.add(frozenset(t))
    return out


@pytest.mark.parametrize("spec", ["A2", "BC2", "A3", "BC3", "D4", "G2"])
def test_triads_against_brute_force(spec):
    p = pattern_from_spec(spec)
    assert triads(p) == brute_triads(p)


def test_triad_examples():
    assert len(triads(pattern_from_spec("A2"))) == 1
    assert len(triads(pattern_from_spec("BC2"))) == 4
    bc3 = pattern_from_spec("BC3")
    want = frozenset(Hyperplane.from_vector(v) for v in ([1, 0, 0], [0, 1, 0], [1, -1, 0]))
    assert want in triads(bc3)


@pytest.mark.parametrize("spec", ["A4", "BC3", "D4"])
def test_every_triad_is_a_family(spec):
    p = pattern_from_spec(spec)
    assert all(is_family(p, t) for t in triads(p))
    assert sum(triad_membership(p)) == 3 * len(triads(p))


def test_family_examples():
    a4 = maximal_families(pattern_from_spec("A4"))
    large = [f for f in a4 if f.large]
    assert len(large) == 5 and all(len(f) == 4 for f in large)
    d5 = [f for f in maximal_families(pattern_from_spec("D5")) if f.large]
    assert d5 and all(len(f) == 4 for f in d5)
    bc4 = pattern_from_spec("BC4")
    fams = {f.members for f in maximal_families(bc4)}
    v = frozenset(Hyperplane.from_vector(e) for e in ([1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]))
    assert v in fams
    assert sum(1 for f in fams if len(f) == 7) == 4


@pytest.mark.parametrize("n", [3, 4, 5])
def test_family_sizes(n):
    bc = maximal_families(pattern_from_spec(f"BC{n}"))
    assert max(len(f) for f in bc) == max(2 * n - 1, 6)
    a = maximal_families(pattern_from_spec(f"A{n}"))
    assert max(len(f) for f in a) == n
    if n >= 4:
        d = maximal_families(pattern_from_spec(f"D{n}"))
        assert max(len(f) for f in d) == n - 1


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["A3", "A4", "BC3", "BC4", "D4", "G2"]), st.randoms(use_true_random=False))
def test_maximal_families_relabel_invariant(spec, rnd):
    p = pattern_from_spec(spec)
    order = list(range(len(p)))
    rnd.shuffle(order)
    q = p.relabeled(order)
    assert maximal_families(q) == maximal_families(p)


def test_family_json_roundtrip():
    for f in maximal_families(pattern_from_spec("BC3")):
        assert Family.from_json(f.to_json()) == f


def test_labels():
    assert pattern_from_spec("A2").labels() == ["x0=x1", "x0=x2", "x1=x2"]
    assert set(pattern_from_spec("BC2").labels()) == {"y1=0", "y2=0", "y1=y2", "y1=-y2"}
