from fractions import Fraction as F
from math import pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h2xr_packing.frobenius import TranslationClass, enumerate_simply
from h2xr_packing.h2xr_geometry import H2xRPoint, h2xr_distance
from h2xr_packing.hyperbolic_plane import H2Isometry, H2Point, boost_matrix, rotation_at_origin, triangle_vertices
from h2xr_packing.screw_group import (
    GroupContext,
    ScrewElement,
    appendix_image,
    base_generators,
    compose,
    compress_word,
    orbit_neighbors,
)

H = F(1, 2)
CLS_264 = TranslationClass(0, H, H)
K_264 = H2xRPoint(H2Point.from_polar(0.489201, -0.938184))
XI_264 = 0.814141


def test_generator_relation_g0_g1_is_g2():
    g0, g1, g2 = base_generators(triangle_vertices(7, 3))
    a, b = ScrewElement(g0), ScrewElement(g1)
    assert compose(a, b).linear.is_close(g2)


def test_generators_fix_their_vertices():
    tri = triangle_vertices(9, 4)
    for g, name in zip(base_generators(tri), "ABC"):
        assert g(tri.vertex(name)).vec == pytest.approx(tri.vertex(name).vec, abs=1e-10)


def test_compose_is_right_action():
    ctx = GroupContext.build(6, 4, CLS_264, XI_264)
    g0, g1 = ctx.g0_hat, ctx.g1_hat
    assert compose(g0, g1).act(K_264).base.vec == pytest.approx(g1.act(g0.act(K_264)).base.vec)
    assert compose(g0, g1).tau == pytest.approx(g0.tau + g1.tau)


def test_compress_word():
    assert compress_word("g1 g1 g1 g0") == "g1^3 g0"
    assert compress_word("g2^-1 g2^-1 L^1") == "g2^-2 L"


def random_element(rng):
    m = boost_matrix(rng.uniform(0, 1.2), rng.uniform(-pi, pi)) @ rotation_at_origin(rng.uniform(-pi, pi))
    return ScrewElement(H2Isometry(m), float(rng.uniform(-1, 1)))


def test_neighbor_distances_are_conjugation_invariant():
    rng = np.random.default_rng(11)
    ctx = GroupContext.build(6, 4, CLS_264, XI_264)
    base = orbit_neighbors(ctx, K_264, word_len=4)
    sigma = random_element(rng)
    moved = orbit_neighbors(ctx.conjugated(sigma), sigma.act(K_264), word_len=4)
    d0 = sorted(round(n.distance, 7) for n in base.neighbors)
    d1 = sorted(round(n.distance, 7) for n in moved.neighbors)
    assert d0 == d1


def test_neighbor_distances_are_true_distances():
    ctx = GroupContext.build(6, 4, CLS_264, XI_264)
    scan = orbit_neighbors(ctx, K_264, word_len=4)
    for n in scan.neighbors:
        assert h2xr_distance(K_264, n.point) == pytest.approx(n.distance, abs=1e-9)
        assert n.distance <= scan.radius_cap
    assert scan.nearest().distance == pytest.approx(XI_264, abs=1e-5)


def test_stabilizer_order_at_vertices():
    tri = triangle_vertices(20, 4)
    ctx = GroupContext.build(20, 4, TranslationClass(H, 0, H), 5.0)
    for name, order in (("A", 1), ("B", 20)):
        scan = orbit_neighbors(ctx, H2xRPoint(tri.vertex(name)), word_len=6)
        assert scan.stabilizer_count == order
    ctx0 = GroupContext.build(20, 4, TranslationClass(0, 0, 0), 5.0)
    assert orbit_neighbors(ctx0, H2xRPoint(tri.A), word_len=4).stabilizer_count == 2


def test_interior_kernel_has_trivial_stabilizer():
    ctx = GroupContext.build(6, 4, CLS_264, XI_264)
    scan = orbit_neighbors(ctx, K_264, word_len=6)
    assert scan.stabilizer_count == 1 and not scan.stabilizer_words


def test_appendix_matches_matrix_action_on_example():
    ctx = GroupContext.build(6, 4, CLS_264, XI_264)
    for i, g in enumerate(ctx.generators):
        closed = appendix_image((0.489201, -0.938184), i, 6, 4, CLS_264.parts[i], XI_264)
        assert closed == pytest.approx(g.act(K_264).projective(), abs=1e-12)


def test_appendix_matches_matrix_action_on_random_tuples():
    rng = np.random.default_rng(2024)
    pairs = [(p1, p2) for p1 in range(3, 25) for p2 in range(3, 13) if 2 * (p1 + p2) < p1 * p2]
    worst = 0.0
    for _ in range(1000):
        p1, p2 = pairs[rng.integers(len(pairs))]
        classes = sorted(enumerate_simply(p1, p2), key=lambda c: c.parts)
        cls = classes[rng.integers(len(classes))]
        xi = rng.uniform(0.1, 3.0)
        r, alpha = rng.uniform(0, 2.0), rng.uniform(-pi, pi)
        ctx = GroupContext.build(p1, p2, cls, xi)
        K = H2xRPoint(H2Point.from_polar(r, alpha))
        for i, g in enumerate(ctx.generators):
            closed = np.array(appendix_image((r, alpha), i, p1, p2, cls.parts[i], xi))
            ref = np.array(g.act(K).projective())
            worst = max(worst, float(np.abs(closed - ref).max() / max(1.0, np.abs(ref).max())))
    assert worst < 1e-9


def test_appendix_requires_exact_fraction():
    with pytest.raises(TypeError):
        appendix_image((0.3, 0.1), 0, 6, 4, 0.5, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-pi, pi), st.floats(-2, 2))
def test_group_elements_are_isometries(r, a, t):
    ctx = GroupContext.build(7, 3, TranslationClass(0, F(1, 7), F(1, 7)), 1.3)
    P = H2xRPoint(H2Point.from_polar(r, a), t)
    Q = H2xRPoint(H2Point.from_polar(0.5, 0.2), -0.3)
    for g in ctx.generators:
        assert h2xr_distance(g.act(P), g.act(Q)) == pytest.approx(h2xr_distance(P, Q), rel=1e-8, abs=1e-9)


def test_screw_element_rejects_reflections():
    with pytest.raises(ValueError):
        ScrewElement(H2Isometry(np.diag([1.0, 1.0, -1.0])))
