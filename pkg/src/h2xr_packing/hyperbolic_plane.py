"""Hyperbolic plane in the hyperboloid model.

Points are triples (x1, x2, x3) with x1**2 - x2**2 - x3**2 = 1 and x1 > 0.
Isometries are 3x3 Lorentz matrices acting on column vectors.  The
Minkowski form used throughout is <a, b> = -a1*b1 + a2*b2 + a3*b3, so
points satisfy <P, P> = -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import asinh, atan2, cos, cosh, pi, sin, sinh, sqrt, tan, acos

import numpy as np

from .exceptions import InvalidPointError, NonHyperbolicSignatureError

J = np.diag([-1.0, 1.0, 1.0])

POINT_TOL = 1e-9
LORENTZ_TOL = 1e-10


def minkowski_dot(a, b):
    """Minkowski product -a1*b1 + a2*b2 + a3*b3 (broadcasts over leading axes)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def normalize_vector(v) -> np.ndarray:
    """Scale a future-pointing timelike vector onto the upper sheet."""
    v = np.asarray(v, dtype=float)
    q = -minkowski_dot(v, v)
    if np.any(q <= 0) or np.any(v[..., 0] <= 0):
        raise InvalidPointError(f"vector {v} is not future timelike")
    return v / np.sqrt(q)[..., None] if v.ndim > 1 else v / sqrt(q)


def distance_arrays(P, Q) -> np.ndarray:
    """Hyperbolic distance between hyperboloid points, vectorised.

    Uses d = 2*asinh(|P - Q|/2) with the Minkowski length of the chord,
    which stays accurate for nearby points where arccosh loses half the
    significant digits.
    """
    D = np.asarray(P, dtype=float) - np.asarray(Q, dtype=float)
    s = -D[..., 0] ** 2 + D[..., 1] ** 2 + D[..., 2] ** 2
    return 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(s, 0.0)))


def polar_arrays(r, alpha) -> np.ndarray:
    """Points (cosh r, sinh r cos a, sinh r sin a) for array inputs."""
    r = np.asarray(r, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    sr = np.sinh(r)
    return np.stack([np.cosh(r), sr * np.cos(alpha), sr * np.sin(alpha)], axis=-1)


@dataclass(frozen=True)
class H2Point:
    """A point of the hyperbolic plane on the upper hyperboloid sheet."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        v = np.array([self.x1, self.x2, self.x3], dtype=float)
        if not np.all(np.isfinite(v)):
            raise InvalidPointError(f"non-finite coordinates {tuple(v)}")
        q = -minkowski_dot(v, v)
        if v[0] <= 0 or abs(q - 1.0) > POINT_TOL * max(1.0, v[0] ** 2):
            raise InvalidPointError(f"{tuple(v)} is not on the unit hyperboloid")
        v = v / sqrt(q)
        object.__setattr__(self, "x1", float(max(v[0], 1.0)))
        object.__setattr__(self, "x2", float(v[1]))
        object.__setattr__(self, "x3", float(v[2]))

    @classmethod
    def from_vector(cls, v) -> "H2Point":
        """Build a point from any future timelike vector by rescaling."""
        w = normalize_vector(np.asarray(v, dtype=float).reshape(3))
        return cls(*w)

    @classmethod
    def origin(cls) -> "H2Point":
        return cls(1.0, 0.0, 0.0)

    @classmethod
    def from_polar(cls, r: float, alpha: float) -> "H2Point":
        return cls(cosh(r), sinh(r) * cos(alpha), sinh(r) * sin(alpha))

    @classmethod
    def from_klein(cls, x: float, y: float) -> "H2Point":
        if x * x + y * y >= 1.0:
            raise InvalidPointError(f"({x}, {y}) lies outside the Klein disk")
        return cls.from_vector((1.0, x, y))

    @classmethod
    def from_poincare(cls, x: float, y: float) -> "H2Point":
        n = x * x + y * y
        if n >= 1.0:
            raise InvalidPointError(f"({x}, {y}) lies outside the Poincare disk")
        return cls.from_vector((1.0 + n, 2.0 * x, 2.0 * y))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def polar(self) -> tuple[float, float]:
        """Return (r, alpha) with self = (cosh r, sinh r cos alpha, sinh r sin alpha)."""
        rho = sqrt(self.x2 ** 2 + self.x3 ** 2)
        return asinh(rho), atan2(self.x3, self.x2)

    def to_klein(self) -> tuple[float, float]:
        return self.x2 / self.x1, self.x3 / self.x1

    def to_poincare(self) -> tuple[float, float]:
        return self.x2 / (1.0 + self.x1), self.x3 / (1.0 + self.x1)

    def projective(self) -> tuple[float, float, float, float]:
        """Homogeneous coordinates (1, x1, x2, x3) of the point on the t = 0 slice."""
        return (1.0, self.x1, self.x2, self.x3)


def h2_distance(P: H2Point, Q: H2Point) -> float:
    """Hyperbolic distance arccosh(-<P, Q>), evaluated in a cancellation-free form."""
    prod = P.x1 * Q.x1 - P.x2 * Q.x2 - P.x3 * Q.x3
    if prod < 1.0 - 1e-9:
        raise InvalidPointError(f"Minkowski product {prod} < 1 for {P} and {Q}")
    return float(distance_arrays(P.vec, Q.vec))


def _check_lorentz(m: np.ndarray, tol: float = LORENTZ_TOL) -> None:
    err = np.abs(m.T @ J @ m - J)
    scale = max(1.0, float(np.abs(m).max()) ** 2)
    if err.max() > tol * scale:
        raise ValueError(f"matrix is not Lorentz orthogonal (error {err.max():.3e})")
    # sheet-preserving Lorentz maps have m[0, 0] >= 1 up to rounding
    if m[0, 0] < 1.0 - tol * scale:
        raise ValueError("matrix swaps the hyperboloid sheets")


@dataclass(frozen=True, eq=False)
class H2Isometry:
    """Orientation-preserving or reversing isometry given by a Lorentz matrix."""

    m: np.ndarray
    orientation: int = field(default=0)

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(3, 3)
        _check_lorentz(m)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)
        sign = 1 if np.linalg.det(m) > 0 else -1
        if self.orientation not in (0, sign):
            raise ValueError("orientation disagrees with the matrix determinant")
        object.__setattr__(self, "orientation", sign)

    @classmethod
    def identity(cls) -> "H2Isometry":
        return cls(np.eye(3))

    def apply(self, P: H2Point) -> H2Point:
        return H2Point.from_vector(self.m @ P.vec)

    def __call__(self, P: H2Point) -> H2Point:
        return self.apply(P)

    def __matmul__(self, other: "H2Isometry") -> "H2Isometry":
        """Matrix product: (self @ other)(P) = self(other(P))."""
        return H2Isometry(self.m @ other.m)

    def inverse(self) -> "H2Isometry":
        return H2Isometry(J @ self.m.T @ J)

    def power(self, n: int) -> "H2Isometry":
        base = self if n >= 0 else self.inverse()
        out = np.eye(3)
        for _ in range(abs(n)):
            out = base.m @ out
        # rounding grows with the number of factors and their size, not with the result
        scale = abs(n) * float(np.abs(base.m).max()) ** 2
        _check_lorentz(out, LORENTZ_TOL * max(1.0, scale))
        return H2Isometry._unchecked(out)

    @classmethod
    def _unchecked(cls, m: np.ndarray) -> "H2Isometry":
        obj = object.__new__(cls)
        m = np.array(m, dtype=float)
        m.setflags(write=False)
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "orientation", 1 if np.linalg.det(m) > 0 else -1)
        return obj

    def is_close(self, other: "H2Isometry", tol: float = 1e-9) -> bool:
        return bool(np.abs(self.m - other.m).max() <= tol)


def boost_matrix(r: float, alpha: float) -> np.ndarray:
    """Hyperbolic translation along the ray of bearing alpha by distance r.

    It maps the origin (1, 0, 0) to the point with polar coordinates (r, alpha).
    """
    c, s = cosh(r), sinh(r)
    ca, sa = cos(alpha), sin(alpha)
    R = np.array([[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]])
    L = np.array([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return R @ L @ R.T


def rotation_at_origin(theta: float) -> np.ndarray:
    c, s = cos(theta), sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def translate_to_origin(K: H2Point) -> H2Isometry:
    """Pure translation along the line through K and the origin taking K to the origin."""
    r, alpha = K.polar()
    return H2Isometry(boost_matrix(-r, alpha))


def rotation_about(center: H2Point, angle: float) -> H2Isometry:
    """Rotation by ``angle`` (counter-clockwise in the x2-x3 chart) about ``center``."""
    if abs(angle) > 2 * pi + 1e-12:
        raise ValueError(f"rotation angle {angle} exceeds 2*pi in magnitude")
    r, alpha = center.polar()
    to_center = boost_matrix(r, alpha)
    from_center = boost_matrix(-r, alpha)
    return H2Isometry(to_center @ rotation_at_origin(angle) @ from_center)


def interior_angle(P: H2Point, Q: H2Point, R: H2Point) -> float:
    """Angle at P between the geodesics PQ and PR, from Minkowski tangent vectors."""
    p = P.vec
    w1 = Q.vec + minkowski_dot(p, Q.vec) * p
    w2 = R.vec + minkowski_dot(p, R.vec) * p
    c = minkowski_dot(w1, w2) / sqrt(minkowski_dot(w1, w1) * minkowski_dot(w2, w2))
    return acos(min(1.0, max(-1.0, float(c))))


def check_signature(p1: int, p2: int) -> None:
    """Raise unless (2, p1, p2) is a hyperbolic rotation signature."""
    if int(p1) != p1 or int(p2) != p2 or p1 < 3 or p2 < 3:
        raise NonHyperbolicSignatureError(f"rotation orders must be integers >= 3, got ({p1}, {p2})")
    # 1/p1 + 1/p2 < 1/2, in integers
    if 2 * (p1 + p2) >= p1 * p2:
        raise NonHyperbolicSignatureError(f"(2, {p1}, {p2}) is not hyperbolic")


def fundamental_domain_area(p1: int, p2: int) -> float:
    """Area pi*(1 - 2/p1 - 2/p2) of a fundamental domain of the rotation group (2, p1, p2)."""
    check_signature(p1, p2)
    return pi * (1.0 - 2.0 / p1 - 2.0 / p2)


@dataclass(frozen=True)
class TriangleGeometry:
    """The (pi/2, pi/p1, pi/p2) triangle with right angle at A, angle pi/p1 at B, pi/p2 at C."""

    p1: int
    p2: int
    A: H2Point
    B: H2Point
    C: H2Point

    @property
    def angle_A(self) -> float:
        return pi / 2

    @property
    def angle_B(self) -> float:
        return pi / self.p1

    @property
    def angle_C(self) -> float:
        return pi / self.p2

    @property
    def area_fd(self) -> float:
        return fundamental_domain_area(self.p1, self.p2)

    def vertex(self, name: str) -> H2Point:
        return {"A": self.A, "B": self.B, "C": self.C}[name]

    def measured_angles(self) -> tuple[float, float, float]:
        return (
            interior_angle(self.A, self.B, self.C),
            interior_angle(self.B, self.C, self.A),
            interior_angle(self.C, self.A, self.B),
        )


def triangle_vertices(p1: int, p2: int) -> TriangleGeometry:
    """Vertices of the characteristic triangle with C at the origin.

    A lies on the negative x3 axis at distance b with cosh b = cos(pi/p1)/sin(pi/p2),
    B at distance a with cosh a = cot(pi/p1)*cot(pi/p2) on the bearing -pi/2 + pi/p2.
    """
    check_signature(p1, p2)
    cb = cos(pi / p1) / sin(pi / p2)
    sb = sqrt(cb * cb - 1.0)
    A = H2Point(cb, 0.0, -sb)
    ca = 1.0 / (tan(pi / p1) * tan(pi / p2))
    sa = sqrt(ca * ca - 1.0)
    beta = -pi / 2 + pi / p2
    B = H2Point(ca, sa * cos(beta), sa * sin(beta))
    return TriangleGeometry(p1, p2, A, B, H2Point.origin())
