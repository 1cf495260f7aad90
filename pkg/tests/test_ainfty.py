import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plk.ainfty import (AInftyCategory, AInftyFunctor, Gen, a2_quiver, category_from_json, check_functor,
                        cohomological_category, cyclic_rotate, full_order_category, mutation_slots, opposite,
                        random_category, toggle_entry, validate_category)
from plk.amod import diagonal_shape_category

seeds = st.integers(0, 2 ** 31)


def oracle_relations_hold(cat: AInftyCategory) -> bool:
    """Evaluate every A-infinity relation straight from the stored tables.

    Units never enter: hom(X, X) is spanned by the unit and no stored output is a unit.
    """
    tables = cat.mus
    gens = list(cat.gens.values())

    def mu(ch):
        return tables.get(len(ch), {}).get(ch, frozenset())

    def chains(ch):
        yield ch
        for g in gens:
            if g.src == cat.gens[ch[0]].dst:
                yield from chains((g.label,) + ch)

    for g in gens:
        for ch in chains((g.label,)):
            d = len(ch)
            acc = set()
            for lo in range(d):
                for hi in range(lo + 1, d + 1):
                    for o in mu(ch[lo:hi]):
                        acc ^= set(mu(ch[:lo] + (o,) + ch[hi:]))
            if acc:
                return False
    return True


def test_a2_and_diagonal_shape_validate():
    assert validate_category(a2_quiver()).ok
    for m in (2, 3, 4):
        e = diagonal_shape_category(m)
        assert validate_category(e).ok
        # hom(S_k, U_k) is one-dimensional, hom(S_j, U_k) = 0 otherwise
        for j in range(1, m + 1):
            for k in range(1, m + 1):
                assert len(e.hom(f"S{j}", f"U{k}")) == (j == k)


def test_poset_category_is_associative():
    c = full_order_category(["A", "B", "C", "D"])
    assert validate_category(c).ok and oracle_relations_hold(c)


def test_a2_mutation_is_a_degree_violation():
    (slot,) = mutation_slots(a2_quiver(), degree_compatible=False)
    rep = validate_category(toggle_entry(a2_quiver(), *slot))
    assert not rep.ok and rep.malformed


def test_three_object_poset_toggle_stays_valid():
    # without chains of length three a mu^2 toggle is another valid structure
    e = diagonal_shape_category(3)
    ok = [validate_category(toggle_entry(e, *s)).ok for s in mutation_slots(e)]
    assert ok == [True] * len(ok)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_random_categories_validate(seed):
    c = random_category(np.random.default_rng(seed), 3, 2)
    assert validate_category(c).ok
    assert oracle_relations_hold(c)


@given(seeds, st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_relation_checker_matches_oracle_on_toggles(seed, pick):
    c = random_category(np.random.default_rng(seed), 3, 2)
    slots = mutation_slots(c)
    if not slots:
        return
    mc = toggle_entry(c, *slots[pick % len(slots)])
    assert validate_category(mc).ok == oracle_relations_hold(mc)


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_opposite_and_rotation_validate(seed):
    c = random_category(np.random.default_rng(seed), 3, 2)
    assert validate_category(opposite(c)).ok
    r = cyclic_rotate(c)
    assert validate_category(r).ok
    assert r.objects == c.objects[1:] + c.objects[:1]


def test_rotation_of_diagonal_free_category_relabels():
    c = AInftyCategory(["X", "Y"], [])
    r = cyclic_rotate(c)
    assert r.objects == ("Y", "X") and not r.gens


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_json_roundtrip(seed):
    c = random_category(np.random.default_rng(seed), 3, 2)
    c2 = category_from_json(c.to_json())
    assert c2.same_as(c)


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_cohomology_category_is_associative(seed):
    c = random_category(np.random.default_rng(seed), 3, 2)
    assert not cohomological_category(c).associativity_failures()


def test_identity_functor():
    c = full_order_category(["A", "B", "C"])
    assert check_functor(AInftyFunctor.identity(c), c, c).ok


def test_bad_schema_raises():
    with pytest.raises(ValueError):
        category_from_json({"objects": ["A", "B"], "homs": {"AB": {"x": 0}}})
    with pytest.raises(ValueError):
        AInftyCategory(["A", "A"], [])
    with pytest.raises(ValueError):
        AInftyCategory(["A", "B"], [Gen("x", "A", "B", 0), Gen("x", "A", "B", 1)])
