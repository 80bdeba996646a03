"""Screw motions over the rotation group (2, p1, p2) and orbits of a kernel point.

Elements act on the right: P^(a b) = (P^a)^b.  For matrices acting on
column vectors that means compose(a, b).linear = b.linear @ a.linear.
The generators are the half-turn g0 about A, the rotation g2 by 2*pi/p2
about C and g1 = g0^-1 g2, a rotation by -2*pi/p1 about B, so that
g0 g1 = g2 and g0**2 = g1**p1 = g2**p2 = 1 on the base plane.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from math import cos, cosh, exp, floor, ceil, pi, sin, sinh, sqrt

import numpy as np

from .frobenius import TranslationClass
from .h2xr_geometry import H2xRPoint
from .hyperbolic_plane import (
    H2Isometry,
    H2Point,
    TriangleGeometry,
    distance_arrays,
    rotation_about,
    triangle_vertices,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScrewElement:
    """Isometry (base, t) -> (linear(base), t + tau) of H2 x R."""

    linear: H2Isometry
    tau: float = 0.0
    fibre_sign: int = 1

    def __post_init__(self):
        if self.fibre_sign != 1:
            raise ValueError("only fibre-preserving screw motions are supported")
        if self.linear.orientation != 1:
            raise ValueError("linear part must preserve orientation")

    @classmethod
    def identity(cls) -> "ScrewElement":
        return cls(H2Isometry.identity(), 0.0)

    def act(self, P: H2xRPoint) -> H2xRPoint:
        return H2xRPoint(self.linear.apply(P.base), P.t + self.tau)

    def inverse(self) -> "ScrewElement":
        return ScrewElement(self.linear.inverse(), -self.tau)

    def power(self, n: int) -> "ScrewElement":
        return ScrewElement(self.linear.power(n), n * self.tau)

    def is_close(self, other: "ScrewElement", tol: float = 1e-9) -> bool:
        return self.linear.is_close(other.linear, tol) and abs(self.tau - other.tau) <= tol


def compose(a: ScrewElement, b: ScrewElement) -> ScrewElement:
    """The product a b under the right action: first a, then b."""
    return ScrewElement(H2Isometry(b.linear.m @ a.linear.m), a.tau + b.tau)


def base_generators(tri: TriangleGeometry) -> tuple[H2Isometry, H2Isometry, H2Isometry]:
    g0 = rotation_about(tri.A, pi)
    g1 = rotation_about(tri.B, -2 * pi / tri.p1)
    g2 = rotation_about(tri.C, 2 * pi / tri.p2)
    return g0, g1, g2


@dataclass(frozen=True, eq=False)
class GroupContext:
    """Screw generators (g_i, r_i xi) for a signature, translation class and lattice parameter."""

    signature: tuple[int, int, int]
    triangle: TriangleGeometry
    translation_class: TranslationClass
    xi: float
    g0_hat: ScrewElement
    g1_hat: ScrewElement
    g2_hat: ScrewElement

    @classmethod
    def build(cls, p1: int, p2: int, translation_class: TranslationClass, xi: float) -> "GroupContext":
        if xi <= 0:
            raise ValueError("fibre lattice parameter must be positive")
        tri = triangle_vertices(p1, p2)
        g = base_generators(tri)
        taus = [float(r) * xi for r in translation_class.parts]
        hats = [ScrewElement(gi, ti) for gi, ti in zip(g, taus)]
        return cls((2, p1, p2), tri, translation_class, float(xi), *hats)

    @property
    def p1(self) -> int:
        return self.signature[1]

    @property
    def p2(self) -> int:
        return self.signature[2]

    @property
    def generators(self) -> tuple[ScrewElement, ScrewElement, ScrewElement]:
        return (self.g0_hat, self.g1_hat, self.g2_hat)

    def with_xi(self, xi: float) -> "GroupContext":
        return GroupContext.build(self.p1, self.p2, self.translation_class, xi)

    def conjugated(self, sigma: ScrewElement) -> "GroupContext":
        """Generators sigma^-1 g sigma: the group seen after moving every point by sigma."""
        s_inv = sigma.inverse()
        hats = [compose(compose(s_inv, g), sigma) for g in self.generators]
        return replace(self, g0_hat=hats[0], g1_hat=hats[1], g2_hat=hats[2])

    def relation_defects(self) -> dict[str, tuple[float, float]]:
        """For g0^2, g1^p1, g2^p2 and g0 g1 g2^-1: (linear distance to I, fibre offset / xi).

        All linear defects vanish and all fibre offsets are integers when the
        translation class satisfies the congruences.
        """
        words = {
            "g0^2": self.g0_hat.power(2),
            f"g1^{self.p1}": self.g1_hat.power(self.p1),
            f"g2^{self.p2}": self.g2_hat.power(self.p2),
            "g0 g1 g2^-1": compose(compose(self.g0_hat, self.g1_hat), self.g2_hat.inverse()),
        }
        eye = np.eye(3)
        return {k: (float(np.abs(w.linear.m - eye).max()), w.tau / self.xi) for k, w in words.items()}


@dataclass(frozen=True)
class Neighbor:
    point: H2xRPoint
    word: str
    distance: float
    base_distance: float
    fibre_offset: float


@dataclass(frozen=True)
class OrbitScan:
    """Result of scanning the orbit of a kernel point out to a radius cap."""

    neighbors: tuple[Neighbor, ...]
    stabilizer_words: tuple[str, ...]
    stabilizer_count: int
    elements_scanned: int
    radius_cap: float

    def nearest(self) -> Neighbor:
        return self.neighbors[0]


def _letters(ctx: GroupContext):
    names, mats, taus = [], [], []
    for i, g in enumerate(ctx.generators):
        names += [f"g{i}", f"g{i}^-1"]
        mats += [g.linear.m, g.linear.inverse().m]
        taus += [g.tau, -g.tau]
    return names, np.array(mats), np.array(taus)


def compress_word(word: str) -> str:
    """Collapse runs of a repeated letter, e.g. 'g1 g1 g1 g0' -> 'g1^3 g0'."""
    out: list[tuple[str, int]] = []
    for token in word.split():
        base, _, exp_ = token.partition("^")
        n = int(exp_) if exp_ else 1
        if out and out[-1][0] == base and base != "L":
            n += out[-1][1]
            out.pop()
            if n == 0:
                continue
        out.append((base, n))
    if not out:
        return "e"
    return " ".join(b if n == 1 else f"{b}^{n}" for b, n in out)


def _matrix_keys(ms: np.ndarray) -> list[bytes]:
    scale = np.maximum(1.0, np.abs(ms[:, 0, 0]))[:, None, None]
    keys = np.round(ms / scale, 6) + 0.0
    return [k.tobytes() for k in keys]


def _rotation_angle(m: np.ndarray) -> float:
    """Rotation angle in [0, pi] of an elliptic Lorentz matrix, from its trace 1 + 2 cos(theta)."""
    c = 0.5 * (float(np.trace(m)) - 1.0)
    return float(np.arccos(min(1.0, max(-1.0, c))))


def orbit_neighbors(
    ctx: GroupContext,
    K: H2xRPoint,
    word_len: int = 8,
    radius_cap: float | None = None,
    fix_tol: float = 1e-8,
) -> OrbitScan:
    """All orbit images of K within ``radius_cap`` reachable by words of length <= word_len.

    Words are products of the six letters g_i^(+-1) followed by a power of
    the fibre lattice translation L (by xi).  Words are written in right-action
    order, so the leftmost letter acts first.  Elements are enumerated
    breadth-first and pruned when they cannot come back inside the cap in
    the remaining steps.  Elements fixing K make up the stabilizer and are
    reported separately; images closer than 1e-8 to each other are merged.
    """
    if word_len < 1:
        raise ValueError("word_len must be at least 1")
    xi = ctx.xi
    cap = 2.5 * xi if radius_cap is None else float(radius_cap)
    if cap <= 0:
        raise ValueError("radius_cap must be positive")
    k_vec = K.base.vec
    names, mats, taus = _letters(ctx)
    step = distance_arrays(mats @ k_vec, k_vec)
    d_max = float(step.max())

    all_m = [np.eye(3)]
    all_tau = [0.0]
    all_words = ["e"]
    seen = set(_matrix_keys(np.eye(3)[None]))
    front_m, front_tau, front_w = np.eye(3)[None], np.zeros(1), ["e"]
    for depth in range(1, word_len + 1):
        if len(front_w) == 0:
            break
        new_m = np.einsum("nij,ljk->nlik", front_m, mats).reshape(-1, 3, 3)
        new_tau = (front_tau[:, None] + taus[None, :]).reshape(-1)
        new_w = [f"{letter} {w}" if w != "e" else letter for w in front_w for letter in names]
        h = distance_arrays(new_m @ k_vec, k_vec)
        keep = h <= cap + (word_len - depth) * d_max + 1e-9
        keys = _matrix_keys(new_m)
        idx = []
        for j in np.nonzero(keep)[0]:
            if keys[j] not in seen:
                seen.add(keys[j])
                idx.append(j)
        front_m, front_tau = new_m[idx], new_tau[idx]
        front_w = [new_w[j] for j in idx]
        all_m.extend(front_m)
        all_tau.extend(front_tau.tolist())
        all_words.extend(front_w)

    ms = np.array(all_m)
    images = ms @ k_vec
    h_all = distance_arrays(images, k_vec)
    neighbors: dict[tuple, Neighbor] = {}
    stab_words: list[str] = []
    stab_angles: list[float] = []
    for m, h, tau, word, img in zip(ms, h_all, all_tau, all_words, images):
        if h > cap:
            continue
        span = sqrt(max(cap * cap - h * h, 0.0))
        for k in range(ceil((-span - tau) / xi - 1e-12), floor((span - tau) / xi + 1e-12) + 1):
            f = tau + k * xi
            d = sqrt(h * h + f * f)
            if d > cap:
                continue
            w = compress_word(word if k == 0 else (f"{word} L^{k}" if word != "e" else f"L^{k}"))
            if h < fix_tol and abs(f) < fix_tol:
                if word != "e":
                    stab_words.append(w)
                    stab_angles.append(_rotation_angle(m))
                continue
            base = H2Point.from_vector(img)
            point = H2xRPoint(base, K.t + f)
            key = tuple(np.round([base.x2, base.x3, point.t], 8) + 0.0)
            prev = neighbors.get(key)
            if prev is None or (len(w), w) < (len(prev.word), prev.word):
                neighbors[key] = Neighbor(point, w, float(d), float(h), float(f))
    ordered = tuple(sorted(neighbors.values(), key=lambda n: (round(n.distance, 10), len(n.word), n.word)))
    # the stabilizer of a point is cyclic, generated by its smallest rotation
    positive = [a for a in stab_angles if a > 1e-6]
    count = int(round(2 * pi / min(positive))) if positive else 1
    return OrbitScan(ordered, tuple(stab_words), count, len(all_words), cap)


def csgn(x: float) -> float:
    """Sign function with csgn(0) = 1."""
    if abs(x) < 1e-12:
        log.warning("csgn evaluated at a near-zero argument %.3e", x)
    return 1.0 if x >= 0 else -1.0


def appendix_image(K_polar: tuple[float, float], i: int, p1: int, p2: int, r_i, xi: float) -> tuple[float, float, float, float]:
    """Closed-form projective coordinates of K^(g_i, r_i xi) for K = (r, alpha) on the t = 0 slice.

    The y-coordinate of the g1 image is assembled from the g0 image rotated
    by 2*pi/p2 about C; the remaining entries are the standard closed forms
    including their absolute-value and csgn factors.
    """
    r, alpha = K_polar
    if isinstance(r_i, float):
        raise TypeError("r_i must be an exact rational")
    e = exp(xi * float(Fraction(r_i)))
    sp2, cp1 = sin(pi / p2), cos(pi / p1)
    s = sqrt(1.0 - sp2 ** 2 / cp1 ** 2)
    ch, sh = cosh(r), sinh(r)
    sa, ca = sin(alpha), cos(alpha)
    th = 2 * pi / p2
    if i == 2:
        return (1.0, e * ch, e * sh * cos(alpha + th), e * sh * sin(alpha + th))
    x = e / sp2 ** 2 * abs(2 * cp1 ** 2 * (ch + sh * sa * s) - sp2 ** 2 * ch)
    if i == 0:
        y = -e * sh * ca
        z = -2 * e / sp2 ** 2 * (cp1 ** 2 * ch * s + sh * sa * (cp1 ** 2 - 0.5 * sp2 ** 2))
        return (1.0, x, y, z)
    if i != 1:
        raise ValueError("generator index must be 0, 1 or 2")
    sign = csgn(2 * sh * sa * cp1 ** 2 * s - ch * (sp2 ** 2 - 2 * cp1 ** 2))
    y = e * (
        -sh * ca * cos(th)
        + 2 / sp2 ** 2 * sin(th) * (cp1 ** 2 * s * ch + sh * sa * (cp1 ** 2 - 0.5 * sp2 ** 2))
    ) * sign
    cp2 = cos(pi / p2)
    z = -2 * e / sp2 ** 2 * (
        ch * cos(th) * cp1 * sqrt(cp2 ** 2 - sin(pi / p1) ** 2)
        - sh * (
            cp2 ** 3 * sin(pi / p2 - alpha)
            + cp2 ** 2 * sa * (1.5 - 2 * cp1 ** 2)
            - 0.5 * ca * sin(th)
            + 0.5 * sa * cos(2 * pi / p1)
        )
    ) * sign
    return (1.0, x, y, z)
