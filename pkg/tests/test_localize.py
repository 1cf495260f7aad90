import numpy as np
from hypothesis import given, settings, strategies as st

from plk.ainfty import AInftyCategory, Gen, a2_quiver, random_category
from plk.amod import PreModHom, yoneda
from plk.gf2chain import cohomology_dims
from plk.localize import dg_quotient, invert_quasi_unit, orthogonality, orthogonality_oracle


def _a2_generator_hom():
    a2 = a2_quiver()
    y1, y2 = yoneda(a2, "S1"), yoneda(a2, "S2")
    return PreModHom(y1, y2, {("<1_S1>",): {"<a>"}}, 0), y1, y2


def test_a2_generator_inverse_certificate():
    t, _, _ = _a2_generator_hom()
    cert = invert_quasi_unit(t)
    assert cert.identities_hold and cert.ok, cert.to_json()


def test_zero_hom_is_not_invertible():
    _, y1, y2 = _a2_generator_hom()
    cert = invert_quasi_unit(PreModHom(y1, y2, {}, 0))
    assert not cert.ok


def test_quotient_by_nothing_keeps_cohomology():
    a2 = a2_quiver()
    q = dg_quotient(a2, [])
    assert q.cohomology_dims("S1", "S2") == {0: 1}


def test_quotient_by_everything_is_zero():
    a2 = a2_quiver()
    q = dg_quotient(a2, ["S1", "S2"])
    assert not any(q.cohomology_dims("S1", "S2").values())
    assert not any(q.cohomology_dims("S2", "S2").values())


def test_acyclic_hom_gives_right_orthogonal():
    b = AInftyCategory(["Y1", "Y2"], [Gen("a", "Y1", "Y2", 0), Gen("b", "Y1", "Y2", 1)], {1: {("a",): {"b"}}})
    assert not any(cohomology_dims(b.hom_complex("Y1", "Y2")).values())
    q = dg_quotient(b, ["Y1"])
    assert orthogonality(q.b, "Y2", ["Y1"]) in ("right", "both")
    res = orthogonality_oracle(q, "Y2")
    assert res and all(res.values())


@given(st.integers(0, 2 ** 31))
@settings(max_examples=8, deadline=None)
def test_random_quotients(seed):
    rng = np.random.default_rng(seed)
    b = random_category(rng, 3, 2, dg=True)
    for sub in (["X1"], ["X2"], ["X1", "X3"]):
        q = dg_quotient(b, sub)
        for x in b.objects:
            for y in b.objects:
                assert not q.dd_failures(x, y)
                assert q.stable(x, y)
        assert not q.leibniz_failures(200)
        assert not q.associativity_failures(200)
        for y in b.objects:
            assert all(orthogonality_oracle(q, y).values())
        # objects of the subcategory become zero
        for x in sub:
            assert not any(q.cohomology_dims(x, x).values())
