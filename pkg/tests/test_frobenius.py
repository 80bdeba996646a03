from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from h2xr_packing.frobenius import (
    KernelSite,
    Site,
    TranslationClass,
    brute_force_congruences,
    canonical,
    dedupe_equivariant,
    enumerate_multiply,
    enumerate_simply,
    reduce_half,
)
from h2xr_packing.exceptions import NonHyperbolicSignatureError
from h2xr_packing.reference_data import EXAMPLE_264_CLASSES
from h2xr_packing.screw_group import GroupContext

H = F(1, 2)


def hyperbolic(p1, p2):
    return 2 * (p1 + p2) < p1 * p2


def test_parse_and_format():
    c = TranslationClass.parse("(±1/2, 0, ±1/2)")
    assert c.parts == (H, 0, H)
    assert str(c) == "1/2,0,1/2"
    assert TranslationClass.parse("0,-1/3,2/3") == TranslationClass(0, F(-1, 3), F(-1, 3))
    with pytest.raises(ValueError):
        TranslationClass.parse("0,1/2")


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        TranslationClass(0.5, 0, 0.5)


@given(st.fractions())
def test_reduce_half_range(x):
    r = reduce_half(x)
    assert -H < r <= H and (r - x).denominator == 1


def test_example_classes_for_264():
    assert enumerate_simply(6, 4) == EXAMPLE_264_CLASSES
    assert enumerate_simply(6, 4) == {
        TranslationClass(0, 0, 0),
        TranslationClass(0, H, H),
        TranslationClass(H, 0, H),
        TranslationClass(H, H, 0),
    }


def test_enumeration_matches_brute_force_up_to_40():
    for p1 in range(3, 41):
        for p2 in range(3, 41):
            if hyperbolic(p1, p2):
                assert enumerate_simply(p1, p2) == brute_force_congruences(p1, p2), (p1, p2)


def test_odd_p2_even_p1_family():
    # p2 odd, p1 even: r0 = 1/2 forces r1 to carry the half
    assert TranslationClass(H, H, 0) in enumerate_simply(8, 3)
    assert not any(c.r0 == H for c in enumerate_simply(7, 3))


def test_non_hyperbolic_rejected():
    with pytest.raises(NonHyperbolicSignatureError):
        enumerate_simply(4, 4)


@pytest.mark.parametrize("p1,p2", [(6, 4), (7, 3), (20, 4), (9, 6), (12, 5)])
def test_every_class_closes_the_relations(p1, p2):
    for cls in enumerate_simply(p1, p2):
        ctx = GroupContext.build(p1, p2, cls, 1.0)
        for word, (lin, fib) in ctx.relation_defects().items():
            assert lin < 1e-8, word
            assert fib == pytest.approx(round(fib), abs=1e-9), (cls, word)


def test_multiply_classes_need_trivial_vertex_translation():
    assert enumerate_multiply(20, 4, "B") == {TranslationClass(0, 0, 0), TranslationClass(H, 0, H)}
    assert all(c.r2 == 0 for c in enumerate_multiply(6, 5, "C"))
    with pytest.raises(ValueError):
        enumerate_multiply(6, 4, "Interior")


def test_kernel_site_orders():
    assert KernelSite.of("b", 20, 4).stabilizer_order == 20
    assert KernelSite.of("A", 20, 4).stabilizer_order == 2
    assert KernelSite.of("C", 20, 4).stabilizer_order == 4
    assert KernelSite.of("interior", 20, 4).site is Site.INTERIOR
    with pytest.raises(ValueError):
        KernelSite.of("D", 6, 4)


def test_equivariant_dedupe():
    classes = enumerate_simply(12, 9)
    reps = dedupe_equivariant(classes)
    assert {canonical(c) for c in classes} == reps
    assert all(c in reps or c.negated() in reps for c in classes)
    assert len(reps) < len(classes)
