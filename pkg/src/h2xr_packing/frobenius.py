"""Admissible fibre-translation parts of screw-motion groups over (2, p1, p2).

A translation class (r0, r1, r2) stores tau_i / xi as exact fractions in
(-1/2, 1/2].  The screw generators (g_i, r_i xi) satisfy the rotation
relations modulo the fibre lattice exactly when

    2 r0, p1 r1, p2 r2, p2 (r0 + r1) are integers  and  r2 = r0 + r1 (mod 1),

the last condition coming from g2 = g0 g1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable

from .hyperbolic_plane import check_signature

HALF = Fraction(1, 2)


def reduce_half(x) -> Fraction:
    """Representative of x modulo 1 in (-1/2, 1/2]."""
    f = Fraction(x) % 1
    return f - 1 if f > HALF else f


@dataclass(frozen=True, order=True)
class TranslationClass:
    r0: Fraction
    r1: Fraction
    r2: Fraction

    def __post_init__(self):
        for name in ("r0", "r1", "r2"):
            val = getattr(self, name)
            if isinstance(val, float):
                raise TypeError("translation parts must be exact rationals, not floats")
            f = Fraction(val)
            if not (-HALF < f <= HALF):
                raise ValueError(f"{name} = {f} outside (-1/2, 1/2]")
            object.__setattr__(self, name, f)

    @classmethod
    def of(cls, r0, r1, r2) -> "TranslationClass":
        """Build a class from arbitrary rationals, reducing each part into (-1/2, 1/2]."""
        return cls(reduce_half(r0), reduce_half(r1), reduce_half(r2))

    @classmethod
    def parse(cls, text: str) -> "TranslationClass":
        """Parse '0,1/2,1/2' (also accepts '+-1/2' or '±1/2' sign markers and parentheses)."""
        cleaned = text.strip().strip("()").replace("±", "").replace("+-", "")
        parts = [p.strip() for p in cleaned.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma separated fractions, got {text!r}")
        return cls.of(*(Fraction(p) for p in parts))

    @property
    def parts(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.r0, self.r1, self.r2)

    def floats(self) -> tuple[float, float, float]:
        return tuple(float(r) for r in self.parts)

    def negated(self) -> "TranslationClass":
        return TranslationClass.of(-self.r0, -self.r1, -self.r2)

    def satisfies(self, p1: int, p2: int) -> bool:
        r0, r1, r2 = self.parts
        integral = all(
            x.denominator == 1 for x in (2 * r0, p1 * r1, p2 * r2, p2 * (r0 + r1))
        )
        return integral and (r2 - r0 - r1).denominator == 1

    def __str__(self) -> str:
        return ",".join(str(r) for r in self.parts)


class Site(str, Enum):
    INTERIOR = "Interior"
    A = "A"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class KernelSite:
    site: Site
    stabilizer_order: int

    def __post_init__(self):
        object.__setattr__(self, "site", Site(self.site))

    @classmethod
    def of(cls, site, p1: int, p2: int) -> "KernelSite":
        s = Site(site if not isinstance(site, str) else _site_name(site))
        order = {Site.INTERIOR: 1, Site.A: 2, Site.B: p1, Site.C: p2}[s]
        return cls(s, order)

    @property
    def name(self) -> str:
        return self.site.value

    @property
    def is_vertex(self) -> bool:
        return self.site is not Site.INTERIOR


def _site_name(text: str) -> str:
    t = text.strip()
    if t.upper() in ("A", "B", "C"):
        return t.upper()
    if t.lower() in ("interior", "s", "simply"):
        return "Interior"
    raise ValueError(f"unknown kernel site {text!r}")


def canonical(cls: TranslationClass) -> TranslationClass:
    """Representative of {r, -r}: nonnegative entries first, then lexicographically smallest."""
    members = {cls, cls.negated()}
    return min(members, key=lambda c: (tuple(x < 0 for x in c.parts), c.parts))


def dedupe_equivariant(classes: Iterable[TranslationClass]) -> set[TranslationClass]:
    """Collapse classes related by the fibre reflection r -> -r."""
    return {canonical(c) for c in classes}


def enumerate_simply(p1: int, p2: int) -> set[TranslationClass]:
    """All translation classes for a kernel point with trivial stabilizer.

    The families are (0, m/g, m/g) with g = gcd(p1, p2); (1/2, m/g, m/g + 1/2)
    when p2 is even; (1/2, m/g + 1/2, m/g) when p2 is odd and p1 is even.
    m = 0 in the last two recovers (1/2, 0, 1/2) and (1/2, 1/2, 0).
    """
    check_signature(p1, p2)
    g = gcd(p1, p2)
    out = {TranslationClass.of(0, Fraction(m, g), Fraction(m, g)) for m in range(g)}
    if p2 % 2 == 0:
        out |= {TranslationClass.of(HALF, Fraction(m, g), Fraction(m, g) + HALF) for m in range(g)}
    elif p1 % 2 == 0:
        out |= {TranslationClass.of(HALF, Fraction(m, g) + HALF, Fraction(m, g)) for m in range(g)}
    return out


def enumerate_multiply(p1: int, p2: int, site) -> set[TranslationClass]:
    """Classes compatible with a kernel at a vertex: the stabilizing rotation needs zero translation."""
    ks = site if isinstance(site, KernelSite) else KernelSite.of(site, p1, p2)
    if not ks.is_vertex:
        raise ValueError("enumerate_multiply needs a vertex site; use enumerate_simply for interior kernels")
    index = {Site.A: 0, Site.B: 1, Site.C: 2}[ks.site]
    return {c for c in enumerate_simply(p1, p2) if c.parts[index] == 0}


def brute_force_congruences(p1: int, p2: int) -> set[TranslationClass]:
    """Exhaustive search over r0 in {0, 1/2}, r1 in Z/p1, r2 in Z/p2.

    The conditions are tested in integers scaled by N = lcm(2, p1, p2).
    """
    check_signature(p1, p2)
    n = lcm(2, p1, p2)
    out = set()
    for a in (0, 1):
        R0 = a * n // 2
        for k1 in range(p1):
            R1 = k1 * n // p1
            if p2 * (R0 + R1) % n:
                continue
            for k2 in range(p2):
                if (k2 * n // p2 - R0 - R1) % n == 0:
                    out.add(TranslationClass.of(Fraction(a, 2), Fraction(k1, p1), Fraction(k2, p2)))
    return out


def sorted_classes(classes: Iterable[TranslationClass]) -> list[TranslationClass]:
    return sorted(classes, key=lambda c: c.parts)
