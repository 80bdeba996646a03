"""The product space H2 x R: points, geodesics, distance and volumes.

A space point is a base point of the hyperbolic plane together with a
fibre coordinate t.  Its projective image is (1, e^t x1, e^t x2, e^t x3),
which fills the open cone -x1**2 + x2**2 + x3**2 < 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import atan2, cos, exp, log, pi, sin, sqrt

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .exceptions import InvalidPointError, NoConvergenceError
from .hyperbolic_plane import H2Point, distance_arrays, h2_distance, minkowski_dot, translate_to_origin
from .newton import damped_newton



@dataclass(frozen=True)
class H2xRPoint:
    base: H2Point
    t: float = 0.0

    @classmethod
    def from_projective(cls, coords) -> "H2xRPoint":
        """Inverse of :meth:`projective`; accepts any nonzero scaling of the 4-tuple."""
        v = np.asarray(coords, dtype=float)
        if v.shape != (4,) or v[0] == 0:
            raise InvalidPointError(f"bad projective coordinates {coords}")
        w = v[1:] / v[0]
        q = -minkowski_dot(w, w)
        if q <= 0 or w[0] <= 0:
            raise InvalidPointError(f"{tuple(v)} lies outside the model cone")
        et = sqrt(q)
        return cls(H2Point.from_vector(w / et), log(et))

    @classmethod
    def from_cylindrical(cls, t: float, r: float, alpha: float) -> "H2xRPoint":
        return cls(H2Point.from_polar(r, alpha), t)

    def projective(self) -> tuple[float, float, float, float]:
        e = exp(self.t)
        return (1.0, e * self.base.x1, e * self.base.x2, e * self.base.x3)

    def cylindrical(self) -> tuple[float, float, float]:
        """(t, r, alpha) coordinates."""
        r, alpha = self.base.polar()
        return self.t, r, alpha


def wrap_angle(u: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    w = (u + pi) % (2 * pi) - pi
    return pi if w == -pi else w


@dataclass(frozen=True)
class GeodesicShot:
    """Initial direction (u, v) of a unit-speed geodesic from the origin, plus its length."""

    u: float
    v: float
    length: float

    def __post_init__(self):
        if not (-pi < self.u <= pi):
            raise ValueError(f"u = {self.u} outside (-pi, pi]")
        if not (-pi / 2 <= self.v <= pi / 2):
            raise ValueError(f"v = {self.v} outside [-pi/2, pi/2]")
        if self.length < 0:
            raise ValueError("negative geodesic length")


def geodesic_coordinates(u, v, tau) -> np.ndarray:
    """Projective coordinates of the geodesic from the origin with direction (u, v) at arc length tau.

    Broadcasts over array arguments; the last axis of the result has length 4.
    """
    u, v, tau = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (u, v, tau)))
    a = tau * np.sin(v)
    b = tau * np.cos(v)
    e = np.exp(a)
    sb = np.sinh(b)
    return np.stack([np.ones_like(a), e * np.cosh(b), e * sb * np.cos(u), e * sb * np.sin(u)], axis=-1)


def geodesic_point(shot: GeodesicShot, tau: float) -> H2xRPoint:
    """Point at arc length tau along the geodesic from the origin described by ``shot``."""
    if tau < 0:
        raise ValueError("arc length parameter must be nonnegative")
    return H2xRPoint(H2Point.from_polar(tau * cos(shot.v), shot.u), tau * sin(shot.v))


def h2xr_distance(P: H2xRPoint, Q: H2xRPoint) -> float:
    """Product distance sqrt(d_H2(base)**2 + (dt)**2)."""
    h = h2_distance(P.base, Q.base)
    return sqrt(h * h + (P.t - Q.t) ** 2)


def _shot_target(P: H2xRPoint, Q: H2xRPoint) -> tuple[np.ndarray, float, float]:
    T = translate_to_origin(P.base)
    q = T.m @ Q.base.vec
    dt = Q.t - P.t
    return q, dt, float(distance_arrays(q, np.array([1.0, 0.0, 0.0])))


def solve_shot(P: H2xRPoint, Q: H2xRPoint, seed=None, tol: float = 1e-13, max_iter: int = 50) -> GeodesicShot:
    """Find the geodesic from P to Q by Newton shooting.

    P is moved to the origin by the base translation and the fibre shift;
    then (u, v, L) is solved from geodesic_coordinates(u, v, L) = image of Q.
    ``seed`` overrides the default closed-form starting point (u, v, L).
    """
    q, dt, h = _shot_target(P, Q)
    if h < 1e-14:
        if abs(dt) < 1e-14:
            raise ValueError("solve_shot needs two distinct points")
        return GeodesicShot(0.0, pi / 2 if dt > 0 else -pi / 2, abs(dt))
    # Compare endpoints in the chart (t, x2, x3) read off the projective
    # coordinates; it is far better conditioned than raw (e^t x) for long shots.
    scale = max(1.0, float(np.hypot(q[1], q[2])))

    def residual(x):
        u, v, L = x
        X = geodesic_coordinates(u, v, L)[1:]
        q_norm = X[0] ** 2 - X[1] ** 2 - X[2] ** 2
        e = sqrt(q_norm)
        return np.array([log(e) - dt, (X[1] / e - q[1]) / scale, (X[2] / e - q[2]) / scale])

    if seed is None:
        seed = (atan2(q[2], q[1]), atan2(dt, h), sqrt(h * h + dt * dt))
    try:
        res = damped_newton(residual, seed, tol=tol, max_iter=max_iter, fd_step=1e-8, floor=1e-11)
    except NoConvergenceError as exc:
        raise NoConvergenceError(f"geodesic shooting failed: {exc}") from exc
    u, v, L = res.x
    if L < 0:
        L, v, u = -L, -v, u + pi
    v = wrap_angle(v)
    if abs(v) > pi / 2:
        v = (pi - v) if v > 0 else (-pi - v)
        u += pi
    return GeodesicShot(wrap_angle(u), float(min(pi / 2, max(-pi / 2, v))), float(L))


def _sinh_cos_integral(tau: float, tol: float) -> float:
    # integral of sinh(tau cos v) over v in [-pi/2, pi/2], symmetric in v
    val, _ = quad(lambda v: np.sinh(tau * np.cos(v)), 0.0, pi / 2, epsabs=tol / 4, epsrel=1e-12, limit=200)
    return 2.0 * val


def ball_volume(rho: float, tol: float = 1e-8) -> float:
    """Volume 2*pi * int_0^rho int_{-pi/2}^{pi/2} tau*sinh(tau cos v) dv dtau of a geodesic ball."""
    if rho < 0:
        raise ValueError("radius must be nonnegative")
    if rho == 0:
        return 0.0
    val, _ = quad(
        lambda tau: tau * _sinh_cos_integral(tau, tol),
        0.0,
        rho,
        epsabs=tol / (2 * pi),
        epsrel=1e-12,
        limit=200,
    )
    return 2.0 * pi * val


def surface_area(rho: float, tol: float = 1e-10) -> float:
    """Area of the geodesic sphere of radius rho, the derivative of ball_volume."""
    return 2.0 * pi * rho * _sinh_cos_integral(rho, tol)


def prism_volume(area: float, h: float) -> float:
    """Volume of a prism over a base-plane region of the given area with fibre height h."""
    if area <= 0 or h <= 0:
        raise ValueError("prism area and height must be positive")
    return area * h


def metric_tensor_at(r: float) -> np.ndarray:
    """Metric diag(1, 1, sinh(r)**2) in cylindrical coordinates (t, r, alpha)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return np.diag([1.0, 1.0, np.sinh(r) ** 2])


@dataclass(frozen=True)
class BallVolumeTable:
    """Precomputed ball volumes with monotone cubic interpolation in between.

    The interpolant runs through cbrt(V), which is close to linear near rho = 0
    where V itself behaves like rho**3.
    """

    samples: tuple[tuple[float, float], ...]
    quadrature_tol: float = 1e-8
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rhos = np.array([s[0] for s in self.samples])
        vols = np.array([s[1] for s in self.samples])
        if len(rhos) < 2 or rhos[0] != 0.0 or vols[0] != 0.0:
            raise ValueError("samples must start at (0, 0) and have at least two entries")
        if np.any(np.diff(rhos) <= 0) or np.any(np.diff(vols) <= 0):
            raise ValueError("samples must be strictly increasing")
        object.__setattr__(self, "_interp", PchipInterpolator(rhos, np.cbrt(vols)))

    @classmethod
    def build(cls, rho_max: float, n: int = 200, tol: float = 1e-8) -> "BallVolumeTable":
        grid = np.linspace(0.0, rho_max, n + 1)
        return cls(tuple((float(r), ball_volume(float(r), tol)) for r in grid), tol)

    @property
    def rho_max(self) -> float:
        return self.samples[-1][0]

    def volume(self, rho: float) -> float:
        if not 0.0 <= rho <= self.rho_max:
            raise ValueError(f"rho = {rho} outside the tabulated range [0, {self.rho_max}]")
        return float(self._interp(rho)) ** 3
