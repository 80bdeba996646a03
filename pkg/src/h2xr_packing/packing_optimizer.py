"""Optimal geodesic ball packings for screw-motion groups over (2, p1, p2).

Two kernel placements are handled.  An interior kernel (trivial stabilizer)
is found by equalising the distances to its three generator images with the
fibre lattice parameter xi; a vertex kernel sits at A, B or C and only xi is
free.  In both cases the ball radius is rho = xi / 2 and the Dirichlet-Voronoi
cell is a prism of volume area * xi * |stabilizer|.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from math import cos, cosh, pi, sin, sinh
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .exceptions import NoConvergenceError, OverlapError, UnsolvedCaseError
from .frobenius import (
    KernelSite,
    Site,
    TranslationClass,
    dedupe_equivariant,
    enumerate_multiply,
    enumerate_simply,
    sorted_classes,
)
from .h2xr_geometry import GeodesicShot, H2xRPoint, ball_volume, geodesic_coordinates, solve_shot
from .hyperbolic_plane import (
    H2Point,
    check_signature,
    distance_arrays,
    fundamental_domain_area,
    normalize_vector,
    polar_arrays,
    translate_to_origin,
    triangle_vertices,
)
from .newton import damped_newton
from .screw_group import GroupContext, base_generators, orbit_neighbors

log = logging.getLogger(__name__)

OVERLAP_TOL = 1e-7
DEFAULT_WORD_LEN = 8


@dataclass(frozen=True)
class PackingSolution:
    signature: tuple[int, int, int]
    kernel_site: KernelSite
    translation_class: TranslationClass
    K: H2xRPoint
    rho: float
    xi: float
    vol_ball: float
    vol_dv: float
    density: float
    active_constraints: tuple[str, ...] = ()
    validated: bool = False
    shots: tuple[GeodesicShot, ...] = ()
    full_residual: Optional[float] = None

    @property
    def p1(self) -> int:
        return self.signature[1]

    @property
    def p2(self) -> int:
        return self.signature[2]

    @property
    def kernel_polar(self) -> tuple[float, float]:
        return self.K.base.polar()

    @property
    def notes(self) -> tuple[str, ...]:
        out = []
        if self.rho > pi:
            out.append("rho exceeds pi")
        return tuple(out)

    def to_dict(self) -> dict:
        r, alpha = self.kernel_polar
        return {
            "signature": list(self.signature),
            "site": self.kernel_site.name,
            "stabilizer_order": self.kernel_site.stabilizer_order,
            "class": str(self.translation_class),
            "kernel": {"r": r, "alpha": alpha, "t": self.K.t, "projective": list(self.K.projective())},
            "rho": self.rho,
            "xi": self.xi,
            "vol_ball": self.vol_ball,
            "vol_dv": self.vol_dv,
            "density": self.density,
            "active_constraints": list(self.active_constraints),
            "validated": self.validated,
            "shots": [asdict(s) for s in self.shots],
            "full_residual": self.full_residual,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PackingSolution":
        sig = tuple(int(x) for x in data["signature"])
        kern = data["kernel"]
        K = H2xRPoint(H2Point.from_polar(kern["r"], kern["alpha"]), kern["t"])
        return cls(
            signature=sig,
            kernel_site=KernelSite.of(data["site"], sig[1], sig[2]),
            translation_class=TranslationClass.parse(data["class"]),
            K=K,
            rho=float(data["rho"]),
            xi=float(data["xi"]),
            vol_ball=float(data["vol_ball"]),
            vol_dv=float(data["vol_dv"]),
            density=float(data["density"]),
            active_constraints=tuple(data.get("active_constraints", ())),
            validated=bool(data.get("validated", False)),
            shots=tuple(GeodesicShot(**s) for s in data.get("shots", ())),
            full_residual=data.get("full_residual"),
        )


def _solution(
    p1, p2, site: KernelSite, cls: TranslationClass, K: H2xRPoint, xi: float, quad_tol: float = 1e-8, **extra
) -> PackingSolution:
    xi = float(xi)
    rho = xi / 2
    vol_ball = ball_volume(rho, quad_tol)
    vol_dv = fundamental_domain_area(p1, p2) * xi * site.stabilizer_order
    return PackingSolution((2, p1, p2), site, cls, K, rho, xi, vol_ball, vol_dv, vol_ball / vol_dv, **extra)


def _fibre_fractions(cls: TranslationClass) -> np.ndarray:
    # distance of r_i to the nearest integer; r_i already lies in (-1/2, 1/2]
    return np.array([abs(float(r)) for r in cls.parts])


def _generator_mats(p1: int, p2: int) -> np.ndarray:
    return np.array([g.m for g in base_generators(triangle_vertices(p1, p2))])


def generator_base_distances(p1: int, p2: int, r, alpha) -> np.ndarray:
    """Base distances d(K, g_i K) for K with polar coordinates (r, alpha); shape (..., 3)."""
    mats = _generator_mats(p1, p2)
    K = polar_arrays(r, alpha)
    imgs = np.einsum("gij,...j->...gi", mats, K)
    return distance_arrays(imgs, K[..., None, :])


# ---------------------------------------------------------------- validation


def validate_packing(
    sol: PackingSolution, word_len: int = DEFAULT_WORD_LEN, radius_cap: Optional[float] = None
) -> PackingSolution:
    """Check that no orbit image of the kernel comes closer than 2 rho.

    Raises OverlapError naming the offending word; otherwise returns the
    solution marked validated with the touching words recorded.
    """
    ctx = GroupContext.build(sol.p1, sol.p2, sol.translation_class, sol.xi)
    scan = orbit_neighbors(ctx, sol.K, word_len=word_len, radius_cap=radius_cap)
    if scan.stabilizer_count != sol.kernel_site.stabilizer_order:
        raise OverlapError(
            scan.stabilizer_words[0] if scan.stabilizer_words else "e",
            0.0,
            2 * sol.rho,
        )
    diameter = 2 * sol.rho
    if scan.neighbors:
        nearest = scan.nearest()
        if nearest.distance < diameter - OVERLAP_TOL:
            raise OverlapError(nearest.word, nearest.distance, diameter)
    active = tuple(n.word for n in scan.neighbors if n.distance <= diameter + OVERLAP_TOL)
    return replace(sol, validated=True, active_constraints=active)


# ------------------------------------------------------- simply transitive


def full_system_residual(p1: int, p2: int, cls: TranslationClass, x: Sequence[float]) -> np.ndarray:
    """The nine-equation endpoint system in (u0, v0, u1, v1, u2, v2, r, alpha, xi).

    After translating K to the origin, the unit-speed geodesic with direction
    (u_i, v_i) run for arc length xi must land on the translated image
    K^(g_i, r_i xi).
    """
    x = np.asarray(x, dtype=float)
    r, alpha, xi = x[6:]
    K = H2Point.from_polar(abs(r), alpha if r >= 0 else alpha + pi)
    T = translate_to_origin(K).m
    mats = _generator_mats(p1, p2)
    out = []
    for i in range(3):
        target = np.exp(float(cls.parts[i]) * xi) * (T @ mats[i] @ K.vec)
        gamma = geodesic_coordinates(x[2 * i], x[2 * i + 1], xi)[1:]
        out.append(gamma - target)
    return np.concatenate(out)


def solve_full_system(p1: int, p2: int, cls: TranslationClass, x0: Sequence[float], tol: float = 1e-12):
    """Damped Newton on the nine-equation endpoint system; returns the NewtonResult."""
    return damped_newton(lambda x: full_system_residual(p1, p2, cls, x), x0, tol=tol, max_iter=60, fd_step=1e-8)


def _reduced_residual(mats: np.ndarray, fr: np.ndarray, x: np.ndarray) -> np.ndarray:
    r, alpha, xi = x
    K = np.array([cosh(r), sinh(r) * cos(alpha), sinh(r) * sin(alpha)])
    h = distance_arrays(mats @ K, K)
    return np.sqrt(h * h + (fr * xi) ** 2) - xi


def _triangle_seeds(p1: int, p2: int, n: int) -> list[tuple[float, float]]:
    tri = triangle_vertices(p1, p2)
    A, B, C = tri.A.vec, tri.B.vec, tri.C.vec
    seeds = []
    for w in np.linspace(0.1, 0.9, n):
        for w2 in np.linspace(0.1, 0.9, n):
            P = H2Point.from_vector(normalize_vector((1 - w) * C + w * ((1 - w2) * A + w2 * B)))
            seeds.append(P.polar())
    return seeds


def simply_candidates(p1: int, p2: int, cls: TranslationClass, seeds: int = 8, tol: float = 1e-12) -> list[np.ndarray]:
    """Distinct roots (r, alpha, xi) of the equal-distance system from a seed grid, largest xi first."""
    check_signature(p1, p2)
    mats = _generator_mats(p1, p2)
    fr = _fibre_fractions(cls)
    roots: list[np.ndarray] = []
    for r0, a0 in _triangle_seeds(p1, p2, seeds):
        K = polar_arrays(r0, a0)
        h = distance_arrays(mats @ K, K)
        xi0 = float(np.mean(h / np.sqrt(1 - fr ** 2)))
        try:
            res = damped_newton(lambda x: _reduced_residual(mats, fr, x), (r0, a0, xi0), tol=tol, max_iter=60)
        except NoConvergenceError:
            continue
        r, alpha, xi = res.x
        if r < 0:
            r, alpha = -r, alpha + pi
        alpha = (alpha + pi) % (2 * pi) - pi
        if xi <= 1e-6:
            continue
        K = polar_arrays(r, alpha)
        if distance_arrays(mats @ K, K).min() < 1e-6:
            continue  # kernel on a rotation centre
        if any(abs(xi - q[2]) < 1e-9 and distance_arrays(polar_arrays(r, alpha), polar_arrays(q[0], q[1])) < 1e-7 for q in roots):
            continue
        roots.append(np.array([r, alpha, xi]))
    roots.sort(key=lambda q: -q[2])
    return roots


def solve_simply(
    p1: int,
    p2: int,
    cls: TranslationClass,
    seeds: int = 8,
    validate: bool = True,
    word_len: int = DEFAULT_WORD_LEN,
    newton_tol: float = 1e-12,
    quad_tol: float = 1e-8,
) -> PackingSolution:
    """Optimal packing with an interior kernel point for one translation class.

    Every converged root of the equal-distance system is a candidate; they
    are tried in order of decreasing xi (density grows with xi) and the
    first one whose orbit passes the overlap check is returned.
    """
    cls = cls if isinstance(cls, TranslationClass) else TranslationClass.parse(str(cls))
    if not cls.satisfies(p1, p2):
        raise ValueError(f"class {cls} does not satisfy the congruences for (2, {p1}, {p2})")
    site = KernelSite.of(Site.INTERIOR, p1, p2)
    roots = simply_candidates(p1, p2, cls, seeds=seeds, tol=newton_tol)
    if not roots:
        raise UnsolvedCaseError(f"no root of the equal-distance system for (2, {p1}, {p2}) class {cls}")
    first_error: Optional[OverlapError] = None
    for r, alpha, xi in roots:
        K = H2xRPoint(H2Point.from_polar(r, alpha), 0.0)
        sol = _attach_shots(_solution(p1, p2, site, cls, K, xi, quad_tol))
        if not validate:
            return sol
        try:
            return validate_packing(sol, word_len=word_len)
        except OverlapError as exc:
            first_error = first_error or exc
            log.debug("candidate xi=%.6f rejected: %s", xi, exc)
    assert first_error is not None
    raise first_error


def _attach_shots(sol: PackingSolution) -> PackingSolution:
    """Shoot geodesics to the three generator images and evaluate the nine-equation residual."""
    ctx = GroupContext.build(sol.p1, sol.p2, sol.translation_class, sol.xi)
    shots = tuple(solve_shot(sol.K, g.act(sol.K)) for g in ctx.generators)
    r, alpha = sol.kernel_polar
    x = [c for s in shots for c in (s.u, s.v)] + [r, alpha, sol.xi]
    res = float(np.abs(full_system_residual(sol.p1, sol.p2, sol.translation_class, x)).max())
    return replace(sol, shots=shots, full_residual=res)


# ------------------------------------------------------ multiply transitive


def vertex_lattice_parameter(p1: int, p2: int, site, cls: TranslationClass) -> tuple[float, float]:
    """Largest admissible xi for a vertex kernel, by root finding and by closed form.

    A generator image at base distance h with fibre fraction f stays at
    distance >= xi exactly while xi <= h / sqrt(1 - f**2).  The density
    V(xi/2) / (area xi stab) increases with xi, so the optimum is the
    first xi at which one of these constraints becomes active.
    """
    ks = site if isinstance(site, KernelSite) else KernelSite.of(site, p1, p2)
    tri = triangle_vertices(p1, p2)
    K = tri.vertex(ks.name).vec
    mats = _generator_mats(p1, p2)
    h = distance_arrays(mats @ K, K)
    fr = _fibre_fractions(cls)
    moving = h > 1e-9
    h, fr = h[moving], fr[moving]
    closed = float(np.min(h / np.sqrt(1 - fr ** 2)))

    def slack(xi):
        return float(np.min(np.sqrt(h * h + (fr * xi) ** 2))) - xi

    lo = 1e-3
    hi = max(4 * float(distance_arrays(tri.A.vec, tri.B.vec)), 2 * float(h.max()))
    root = brentq(slack, lo, hi, xtol=1e-14, rtol=1e-15)
    return root, closed


def solve_multiply(
    p1: int,
    p2: int,
    site,
    cls: TranslationClass,
    validate: bool = True,
    word_len: int = DEFAULT_WORD_LEN,
    quad_tol: float = 1e-8,
    newton_tol: float = 1e-12,
) -> PackingSolution:
    """Optimal packing with the kernel at vertex A, B or C for one translation class.

    ``newton_tol`` is accepted for a uniform interface with solve_simply; the
    vertex case is a one-dimensional bracketed root.
    """
    cls = cls if isinstance(cls, TranslationClass) else TranslationClass.parse(str(cls))
    ks = site if isinstance(site, KernelSite) else KernelSite.of(site, p1, p2)
    if not ks.is_vertex:
        raise ValueError("solve_multiply needs a vertex site")
    if cls not in enumerate_multiply(p1, p2, ks):
        raise ValueError(f"class {cls} is not admissible at vertex {ks.name} of (2, {p1}, {p2})")
    xi, closed = vertex_lattice_parameter(p1, p2, ks, cls)
    if abs(xi - closed) > 1e-9 * max(1.0, closed):
        raise UnsolvedCaseError(f"root {xi} disagrees with closed form {closed}")
    K = H2xRPoint(triangle_vertices(p1, p2).vertex(ks.name), 0.0)
    sol = _solution(p1, p2, ks, cls, K, xi, quad_tol)
    return validate_packing(sol, word_len=word_len) if validate else sol


def solve_case(p1: int, p2: int, site, cls: TranslationClass, **kw) -> PackingSolution:
    ks = site if isinstance(site, KernelSite) else KernelSite.of(site, p1, p2)
    if ks.is_vertex:
        return solve_multiply(p1, p2, ks, cls, **kw)
    return solve_simply(p1, p2, cls, **kw)


# ------------------------------------------------------------------ sweeps


@dataclass(frozen=True)
class SweepRow:
    p1: int
    p2: int
    site: str
    translation_class: TranslationClass
    status: str  # "ok", "overlap" or "unsolved"
    solution: Optional[PackingSolution] = None
    detail: str = ""

    @property
    def density(self) -> float:
        return self.solution.density if self.solution is not None else float("nan")

    def sort_key(self):
        return (self.p1, _SITE_ORDER[self.site], self.translation_class.parts)


_SITE_ORDER = {"Interior": 0, "A": 1, "B": 2, "C": 3}


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    best: Optional[int]
    parameters: dict = field(default_factory=dict)

    @property
    def best_row(self) -> Optional[SweepRow]:
        return None if self.best is None else self.rows[self.best]

    def per_p1_best(self) -> list[int]:
        """Index of the densest validated row for each p1, in p1 order."""
        out: dict[int, int] = {}
        for i, row in enumerate(self.rows):
            if row.status != "ok":
                continue
            j = out.get(row.p1)
            if j is None or row.density > self.rows[j].density + 1e-8:
                out[row.p1] = i
        return [out[p] for p in sorted(out)]

    def ties(self, index: int) -> list[int]:
        """Other validated rows with the same p1 whose density equals row ``index`` within 1e-8."""
        ref = self.rows[index]
        return [
            i
            for i, row in enumerate(self.rows)
            if i != index and row.status == "ok" and row.p1 == ref.p1 and abs(row.density - ref.density) <= 1e-8
        ]


def _run_case(args) -> SweepRow:
    p1, p2, site, cls, kw = args
    try:
        sol = solve_case(p1, p2, site, cls, **kw)
        return SweepRow(p1, p2, site, cls, "ok", sol)
    except OverlapError as exc:
        return SweepRow(p1, p2, site, cls, "overlap", None, exc.word)
    except (UnsolvedCaseError, NoConvergenceError, ValueError) as exc:
        return SweepRow(p1, p2, site, cls, "unsolved", None, str(exc))


def sweep_cases(p2: int, p1_range: Iterable[int], sites: Iterable[str], mode: str) -> list[tuple]:
    """The (p1, p2, site, class) cases of a sweep, one representative per equivariance class.

    Values of p1 that do not give a hyperbolic signature are skipped.
    """
    cases = []
    for p1 in p1_range:
        if 2 * (p1 + p2) >= p1 * p2:
            continue  # not a hyperbolic signature
        if mode == "simply":
            for cls in sorted_classes(dedupe_equivariant(enumerate_simply(p1, p2))):
                cases.append((p1, p2, "Interior", cls))
        elif mode == "multiply":
            for site in sorted(set(sites), key=lambda s: _SITE_ORDER[s]):
                for cls in sorted_classes(dedupe_equivariant(enumerate_multiply(p1, p2, site))):
                    cases.append((p1, p2, site, cls))
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return cases


def global_optimum(
    p2: int,
    p1_range: Iterable[int],
    sites: Iterable[str] = ("A", "B", "C"),
    mode: str = "simply",
    workers: Optional[int] = None,
    word_len: int = DEFAULT_WORD_LEN,
    quad_tol: float = 1e-8,
    newton_tol: float = 1e-12,
) -> SweepReport:
    """Solve every case of a sweep and locate the densest validated packing.

    Cases run in a process pool when ``workers`` > 1; rows are sorted
    afterwards, so the report does not depend on completion order.
    """
    p1_list = sorted(set(int(p) for p in p1_range))
    if not p1_list:
        raise ValueError("empty p1 range")
    sites = tuple(sites) if mode == "multiply" else ("Interior",)
    kw = {"word_len": word_len, "quad_tol": quad_tol, "newton_tol": newton_tol}
    tasks = [c + (kw,) for c in sweep_cases(p2, p1_list, sites, mode)]
    if workers and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_case, tasks))
    else:
        rows = [_run_case(t) for t in tasks]
    rows.sort(key=SweepRow.sort_key)
    best = None
    for i, row in enumerate(rows):
        if row.status == "ok" and (best is None or row.density > rows[best].density + 1e-8):
            best = i
    skipped = [p for p in p1_list if 2 * (p + p2) >= p * p2]
    params = {"p2": p2, "p1": p1_list, "skipped_p1": skipped, "sites": list(sites), "mode": mode, "word_len": word_len}
    return SweepReport(tuple(rows), best, params)


# ------------------------------------------------------------------ limits


@dataclass(frozen=True)
class LimitEstimate:
    """Extrapolation of a case to p1 -> infinity from a few large p1 samples."""

    p2: int
    site: str
    translation_class: TranslationClass
    rho: float
    vol_ball: float
    density: float
    rho_err: float
    density_err: float
    samples: tuple[tuple[int, float, float, float], ...]


def _extrapolate(hs: np.ndarray, vals: np.ndarray) -> tuple[float, float]:
    """Polynomial extrapolation to h = 0; the error bar compares it with the two-point estimate."""
    full = float(np.polyval(np.polyfit(hs, vals, len(hs) - 1), 0.0))
    lower = float(np.polyval(np.polyfit(hs[-2:], vals[-2:], 1), 0.0))
    return full, abs(full - lower)


def limit_case(
    p2: int,
    cls: TranslationClass,
    site: str = "Interior",
    mode: Optional[str] = None,
    p1_values: Sequence[int] = (100, 200, 400),
    validate: bool = True,
) -> LimitEstimate:
    """Estimate rho, the ball volume and the density as p1 -> infinity.

    Each quantity is computed at the given p1 and extrapolated in 1/p1 by
    Richardson (polynomial) extrapolation.  Classes that need odd p1 are
    sampled at odd values, e.g. (101, 201, 401).
    """
    cls = cls if isinstance(cls, TranslationClass) else TranslationClass.parse(str(cls))
    mode = mode or ("simply" if site == "Interior" else "multiply")
    if (mode == "simply") != (site == "Interior"):
        raise ValueError("simply mode uses the interior site, multiply mode a vertex")
    samples = []
    for p1 in p1_values:
        sol = solve_case(p1, p2, site, cls, validate=validate)
        samples.append((p1, sol.rho, sol.vol_ball, sol.density))
    arr = np.array(samples, dtype=float)
    hs = 1.0 / arr[:, 0]
    rho, rho_err = _extrapolate(hs, arr[:, 1])
    vol, _ = _extrapolate(hs, arr[:, 2])
    dens, dens_err = _extrapolate(hs, arr[:, 3])
    return LimitEstimate(p2, site, cls, rho, vol, dens, rho_err, dens_err, tuple(samples))
