import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylpat.exactlin import RationalMatrix
from weylpat.pattern import pattern_from_spec
from weylpat.weylgroup import GroupTooLarge, act, expected_order, generate, orbit, orbit_canonical

CASES = [("A", n) for n in range(2, 6)] + [("BC", n) for n in range(2, 6)] + [("D", n) for n in (4, 5)]


@pytest.mark.parametrize("fam,n", CASES)
def test_orders(fam, n):
    assert generate(pattern_from_spec(f"{fam}{n}")).order == expected_order(fam, n)


def test_order_examples():
    assert generate(pattern_from_spec("A2")).order == 6
    assert generate(pattern_from_spec("BC3")).order == 48
    assert generate(pattern_from_spec("D4")).order == 192
    assert generate(pattern_from_spec("G2")).order == 12


@pytest.mark.parametrize("spec", ["A3", "BC3", "D4", "G2"])
def test_group_axioms_and_pattern_preservation(spec):
    w = generate(pattern_from_spec(spec))
    elems = set(w.elements)
    mats = w.matrices()
    ident = RationalMatrix.identity(w.pattern.ambient_dim)
    assert ident.entries in {m.entries for m in mats}
    for m in mats[:: max(1, len(mats) // 12)]:
        assert (m.T @ m) == ident  # orthogonal, so the inverse is the transpose
        assert m.T.entries in elems
        for g in mats[:: max(1, len(mats) // 6)]:
            assert (m @ g).entries in elems
    for perm in w.permutations:
        assert sorted(perm) == list(range(len(w.pattern)))


def test_cap():
    with pytest.raises(GroupTooLarge):
        generate(pattern_from_spec("BC4"), cap=100)


def test_orbit_canonical_trivial_groups():
    assert orbit_canonical((2, 0, 1), None, None) == (2, 0, 1)


def test_sign_flip_gives_same_class():
    bc2 = pattern_from_spec("BC2")
    w = generate(bc2)
    ident = tuple(range(len(bc2)))
    flip = RationalMatrix([[-1, 0], [0, 1]])
    perm = w.hyperplane_permutation(flip.entries)
    moved = act(ident, None, perm)
    assert moved != ident
    assert orbit_canonical(moved, w, w) == orbit_canonical(ident, w, w)


def test_two_forms_have_distinct_classes():
    from weylpat.embedsearch import class_of, first_form, second_form

    assert class_of(first_form(4)) != class_of(second_form(4))


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_orbit_canonical_idempotent_and_constant(data):
    src, dst = pattern_from_spec("A3"), pattern_from_spec("BC3")
    ws, wd = generate(src), generate(dst)
    a = tuple(data.draw(st.permutations(range(len(dst))))[: len(src)])
    c = orbit_canonical(a, ws, wd)
    assert orbit_canonical(c, ws, wd) == c
    g1 = data.draw(st.sampled_from(ws.permutations))
    g2 = data.draw(st.sampled_from(wd.permutations))
    b = act(a, g1, g2)
    assert orbit_canonical(b, ws, wd) == c
    assert b in orbit(a, ws, wd)
