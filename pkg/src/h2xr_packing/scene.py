"""Export a packing as a self-describing JSON scene for external viewers.

Every ball carries its center in projective coordinates (1, e^t x1, e^t x2, e^t x3)
and a (u, v) grid of sphere vertices obtained by running geodesics of length
rho from the center.  The layout is documented in the README.
"""

from __future__ import annotations

import json
from math import pi
from typing import Optional

import numpy as np

from .h2xr_geometry import H2xRPoint
from .hyperbolic_plane import boost_matrix, polar_arrays
from .packing_optimizer import PackingSolution
from .screw_group import GroupContext, ScrewElement, orbit_neighbors

SCHEMA = "h2xr-packing-scene/1"
MODEL = "projective-H2xR"


def mesh_angles(n_u: int, n_v: int) -> tuple[np.ndarray, np.ndarray]:
    """u samples in (-pi, pi] and v samples spanning [-pi/2, pi/2] inclusive."""
    if n_u < 3 or n_v < 2:
        raise ValueError("mesh needs at least 3 u samples and 2 v samples")
    u = -pi + 2 * pi * np.arange(1, n_u + 1) / n_u
    v = np.linspace(-pi / 2, pi / 2, n_v)
    return u, v


def sphere_vertices(center: H2xRPoint, rho: float, n_u: int = 48, n_v: int = 24) -> np.ndarray:
    """Projective coordinates of the geodesic sphere mesh, shape (n_v * n_u, 4), v-major."""
    u, v = mesh_angles(n_u, n_v)
    uu, vv = np.meshgrid(u, v)
    base = polar_arrays(rho * np.cos(vv), uu).reshape(-1, 3)
    r, alpha = center.base.polar()
    moved = base @ boost_matrix(r, alpha).T
    t = center.t + rho * np.sin(vv).reshape(-1)
    e = np.exp(t)[:, None]
    return np.hstack([np.ones((moved.shape[0], 1)), e * moved])


def build_scene(
    sol: PackingSolution,
    word_len: int = 2,
    radius: float = 1.0,
    mesh: tuple[int, int] = (48, 24),
    transform: Optional[ScrewElement] = None,
) -> dict:
    """Scene with the kernel ball and every orbit ball whose center lies within radius * xi.

    With the default radius only touching neighbours are drawn.  ``transform``
    moves the whole configuration by an isometry before export.
    """
    ctx = GroupContext.build(sol.p1, sol.p2, sol.translation_class, sol.xi)
    scan = orbit_neighbors(ctx, sol.K, word_len=word_len, radius_cap=radius * sol.xi * (1 + 1e-9))
    centers = [("e", sol.K)] + [(n.word, n.point) for n in scan.neighbors]
    tri = ctx.triangle
    corners = {name: H2xRPoint(tri.vertex(name), 0.0) for name in "ABC"}
    if transform is not None:
        centers = [(w, transform.act(P)) for w, P in centers]
        corners = {k: transform.act(P) for k, P in corners.items()}
    n_u, n_v = mesh
    balls = []
    for word, P in centers:
        verts = sphere_vertices(P, sol.rho, n_u, n_v)
        balls.append({"word": word, "center": list(P.projective()), "rho": sol.rho, "vertices": verts.tolist()})
    return {
        "schema": SCHEMA,
        "model": MODEL,
        "metadata": {
            "signature": list(sol.signature),
            "class": str(sol.translation_class),
            "site": sol.kernel_site.name,
            "rho": sol.rho,
            "xi": sol.xi,
            "density": sol.density,
            "word_len": word_len,
            "radius": radius,
        },
        "triangle": {k: list(P.projective()) for k, P in corners.items()},
        "mesh": {"n_u": n_u, "n_v": n_v, "order": "v-major"},
        "balls": balls,
    }


def dumps_scene(scene: dict) -> str:
    return json.dumps(scene, sort_keys=True, separators=(",", ":")) + "\n"
