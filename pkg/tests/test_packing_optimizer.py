import json
from fractions import Fraction as F
from math import pi

import numpy as np
import pytest

from h2xr_packing.exceptions import OverlapError
from h2xr_packing.frobenius import TranslationClass
from h2xr_packing.h2xr_geometry import H2xRPoint, ball_volume
from h2xr_packing.hyperbolic_plane import H2Point, fundamental_domain_area
from h2xr_packing.packing_optimizer import (
    PackingSolution,
    full_system_residual,
    generator_base_distances,
    global_optimum,
    limit_case,
    simply_candidates,
    solve_case,
    solve_multiply,
    solve_simply,
    validate_packing,
    vertex_lattice_parameter,
)
from h2xr_packing.reference_data import EXAMPLE_264_STATE, table_rows
from h2xr_packing.screw_group import GroupContext, orbit_neighbors

H = F(1, 2)


@pytest.fixture(scope="module")
def sol_264():
    return solve_simply(6, 4, TranslationClass(0, H, H))


def test_example_solution(sol_264):
    assert sol_264.validated
    assert sol_264.rho == pytest.approx(0.40707, abs=5e-5)
    assert sol_264.density == pytest.approx(0.67018, abs=5e-5)
    r, alpha = sol_264.kernel_polar
    assert (r, alpha, sol_264.xi) == pytest.approx(
        (EXAMPLE_264_STATE["r"], EXAMPLE_264_STATE["alpha"], EXAMPLE_264_STATE["xi"]), abs=5e-5
    )
    assert sol_264.full_residual < 1e-10


def test_density_identity(sol_264):
    s = sol_264
    assert s.vol_ball == pytest.approx(ball_volume(s.rho))
    assert s.vol_dv == pytest.approx(fundamental_domain_area(6, 4) * s.xi)
    assert s.density == pytest.approx(s.vol_ball / s.vol_dv)
    assert s.xi == pytest.approx(2 * s.rho)


def test_equal_distance_conditions(sol_264):
    r, alpha = sol_264.kernel_polar
    h = generator_base_distances(6, 4, r, alpha)
    f = np.array([0.0, 0.5, 0.5])
    assert np.sqrt(h ** 2 + (f * sol_264.xi) ** 2) == pytest.approx(sol_264.xi, abs=1e-10)


def test_shots_land_on_generator_images(sol_264):
    x = [c for s in sol_264.shots for c in (s.u, s.v)] + [*sol_264.kernel_polar, sol_264.xi]
    assert np.abs(full_system_residual(6, 4, sol_264.translation_class, x)).max() < 1e-10
    assert all(s.length == pytest.approx(sol_264.xi, abs=1e-9) for s in sol_264.shots)


@pytest.mark.parametrize("row", table_rows(1), ids=lambda r: r.class_text)
def test_table_one(row):
    sol = solve_case(row.p1, row.p2, row.site, row.translation_class)
    assert sol.rho == pytest.approx(row.rho, abs=5e-5)
    assert sol.density == pytest.approx(row.density, abs=5e-5)
    assert sol.vol_ball == pytest.approx(row.vol_ball, rel=1e-4, abs=1e-5)


def test_sign_equivariance():
    a = solve_simply(7, 3, TranslationClass(0, F(0), F(0)))
    c = TranslationClass.parse("1/2,0,1/2")
    b1, b2 = solve_simply(9, 4, c), solve_simply(9, 4, c.negated())
    assert b1.density == pytest.approx(b2.density, abs=1e-10)
    assert a.validated


def test_perturbing_the_optimum_creates_overlap(sol_264):
    """Any larger xi at the optimal kernel, or a small move of the kernel at the same xi, overlaps."""
    ctx = GroupContext.build(6, 4, sol_264.translation_class, sol_264.xi * 1.001)
    scan = orbit_neighbors(ctx, sol_264.K, word_len=4)
    assert scan.nearest().distance < ctx.xi - 1e-7
    rng = np.random.default_rng(5)
    r, alpha = sol_264.kernel_polar
    for _ in range(20):
        dr, da = rng.normal(scale=1e-3, size=2)
        K = H2xRPoint(H2Point.from_polar(r + dr, alpha + da))
        scan = orbit_neighbors(GroupContext.build(6, 4, sol_264.translation_class, sol_264.xi), K, word_len=4)
        assert scan.nearest().distance < sol_264.xi


def test_candidates_sorted_by_xi():
    roots = simply_candidates(8, 3, TranslationClass(H, H, 0))
    xis = [q[2] for q in roots]
    assert xis == sorted(xis, reverse=True) and len(xis) >= 1


def test_vertex_parameter_root_matches_closed_form():
    for p1, p2, site, cls in [(20, 4, "B", "1/2,0,1/2"), (9, 3, "B", "0,0,0"), (6, 5, "C", "1/2,1/2,0")]:
        root, closed = vertex_lattice_parameter(p1, p2, site, TranslationClass.parse(cls))
        assert root == pytest.approx(closed, rel=1e-12)


def test_multiply_record():
    sol = solve_multiply(20, 4, "B", TranslationClass(H, 0, H))
    assert sol.rho == pytest.approx(2.52789, abs=5e-5)
    assert sol.vol_ball == pytest.approx(102.32545, abs=1e-2)
    assert sol.density == pytest.approx(0.80529, abs=5e-5)
    assert sol.kernel_site.stabilizer_order == 20


def test_overlap_rejection_names_word():
    raw = solve_multiply(21, 4, "B", TranslationClass(H, 0, H), validate=False)
    with pytest.raises(OverlapError) as info:
        validate_packing(raw)
    assert info.value.word and info.value.distance < info.value.required


def test_inadmissible_class_rejected():
    with pytest.raises(ValueError):
        solve_simply(6, 4, TranslationClass(0, F(1, 3), F(1, 3)))
    with pytest.raises(ValueError):
        solve_multiply(20, 4, "C", TranslationClass(H, 0, H))


def test_round_trip(sol_264):
    back = PackingSolution.from_dict(json.loads(json.dumps(sol_264.to_dict())))
    assert back.to_dict() == sol_264.to_dict()


def test_rho_above_pi_is_noted():
    sol = solve_multiply(62, 6, "B", TranslationClass(H, 0, H))
    assert sol.rho > pi and "rho exceeds pi" in sol.notes


def test_sweep_is_deterministic_and_skips_euclidean():
    a = global_optimum(4, range(3, 9), mode="simply")
    b = global_optimum(4, reversed(range(3, 9)), mode="simply")
    assert [r.sort_key() for r in a.rows] == [r.sort_key() for r in b.rows]
    assert a.best_row.p1 == 6 and a.best_row.density == pytest.approx(0.67018, abs=5e-5)
    assert a.parameters["skipped_p1"] == [3, 4]
    with pytest.raises(ValueError):
        global_optimum(4, [], mode="simply")


def test_limit_estimate_is_stable_under_resampling():
    c = TranslationClass(0, 0, 0)
    a = limit_case(4, c, p1_values=(60, 120, 240))
    b = limit_case(4, c, p1_values=(100, 200, 400))
    assert a.density == pytest.approx(b.density, abs=1e-4)
    assert a.rho == pytest.approx(b.rho, abs=1e-4)
    # density decreases towards the limit, so every sample lies above it
    assert all(d > b.density for _, _, _, d in b.samples)
    assert b.density_err < 1e-3


@pytest.mark.parametrize("p1,p2,cls", [(6, 4, "0,1/2,1/2"), (8, 3, "1/2,1/2,0"), (7, 4, "1/2,0,1/2")])
def test_optimum_is_local_maximum(p1, p2, cls):
    """Moving the kernel by 1e-3 with xi re-optimized never increases the density.

    The generator constraints alone give xi <= min h_i / sqrt(1 - f_i**2); the
    density at that upper bound already cannot beat the optimum.
    """
    c = TranslationClass.parse(cls)
    sol = solve_simply(p1, p2, c)
    f = np.array([abs(float(x)) for x in c.parts])
    r, alpha = sol.kernel_polar
    area = fundamental_domain_area(p1, p2)
    for dr in (-1e-3, 0.0, 1e-3):
        for da in (-1e-3, 0.0, 1e-3):
            h = generator_base_distances(p1, p2, r + dr, alpha + da)
            xi = float(np.min(h / np.sqrt(1 - f ** 2)))
            assert ball_volume(xi / 2) / (area * xi) <= sol.density + 1e-6
