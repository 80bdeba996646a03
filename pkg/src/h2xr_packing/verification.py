"""Recompute the embedded reference values and compare them with tolerances."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import tanh, cos, sin
from typing import Iterable, Optional, Sequence

from . import reference_data as ref
from .exceptions import PackingError
from .frobenius import TranslationClass, enumerate_simply
from .packing_optimizer import limit_case, solve_case, solve_full_system, full_system_residual

RHO_TOL = 5e-5
DENSITY_TOL = 5e-5
VOL_REL_TOL = 1e-4
# published values are truncated to 5 decimals, which caps the relative accuracy of small volumes
VOL_ABS_FLOOR = 1e-5
LIMIT_TOL = 1e-3


@dataclass(frozen=True)
class FieldCheck:
    name: str
    computed: float
    expected: float
    tol: float

    @property
    def diff(self) -> float:
        return self.computed - self.expected

    @property
    def passed(self) -> bool:
        return abs(self.diff) <= self.tol

    @property
    def excess(self) -> float:
        """How far past its tolerance this field is (<= 1 means it passes)."""
        return abs(self.diff) / self.tol


@dataclass(frozen=True)
class RowCheck:
    label: str
    fields: tuple[FieldCheck, ...] = ()
    error: str = ""
    erratum: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and all(f.passed for f in self.fields)

    @property
    def worst(self) -> float:
        if self.error:
            return float("inf")
        return max((f.excess for f in self.fields), default=0.0)

    def describe(self) -> str:
        if self.error:
            return f"{self.label}: {self.error}"
        parts = [f"{f.name} {f.computed:.6f} (ref {f.expected:.6f}, diff {f.diff:+.2e}, tol {f.tol:.0e})" for f in self.fields]
        return f"{self.label}: " + "; ".join(parts)


def _vol_tol(expected: float, rel: float) -> float:
    return max(rel * abs(expected), VOL_ABS_FLOOR)


def check_row(row: ref.ReferenceRow) -> RowCheck:
    try:
        if row.is_limit:
            est = limit_case(row.p2, row.translation_class, row.site, p1_values=ref.LIMIT_P1[row.limit])
            fields = (
                FieldCheck("rho", est.rho, row.rho, LIMIT_TOL),
                FieldCheck("vol", est.vol_ball, row.vol_ball, _vol_tol(row.vol_ball, LIMIT_TOL)),
                FieldCheck("delta", est.density, row.density, LIMIT_TOL),
            )
        else:
            sol = solve_case(row.p1, row.p2, row.site, row.translation_class)
            fields = (
                FieldCheck("rho", sol.rho, row.rho, RHO_TOL),
                FieldCheck("vol", sol.vol_ball, row.vol_ball, _vol_tol(row.vol_ball, VOL_REL_TOL)),
                FieldCheck("delta", sol.density, row.density, DENSITY_TOL),
            )
    except PackingError as exc:
        return RowCheck(row.label, error=f"{type(exc).__name__}: {exc}", erratum=row.erratum)
    return RowCheck(row.label, fields, erratum=row.erratum)


def check_example_state(expected: Optional[dict] = None) -> RowCheck:
    """Solve the nine-equation system for (2,6,4), class (0,1/2,1/2), from the published state."""
    state = dict(ref.EXAMPLE_264_STATE if expected is None else expected)
    names = ["u0", "v0", "u1", "v1", "u2", "v2", "r", "alpha", "xi"]
    cls = TranslationClass.parse(ref.EXAMPLE_264_CLASS)
    try:
        res = solve_full_system(6, 4, cls, [state[n] for n in names])
    except PackingError as exc:
        return RowCheck("Example (2,6,4) state", error=str(exc))
    x = res.x
    fields = [FieldCheck(n, float(v), state[n], 5e-5) for n, v in zip(names, x)]
    r, alpha, xi = x[6:]
    fields.append(FieldCheck("klein_x", tanh(r) * cos(alpha), ref.EXAMPLE_264_KLEIN[0], 5e-5))
    fields.append(FieldCheck("klein_y", tanh(r) * sin(alpha), ref.EXAMPLE_264_KLEIN[1], 5e-5))
    from .hyperbolic_plane import fundamental_domain_area

    fields.append(FieldCheck("vol_dv", fundamental_domain_area(6, 4) * xi, ref.EXAMPLE_264_VOL_DV, 5e-5))
    resid = float(abs(full_system_residual(6, 4, cls, x)).max())
    fields.append(FieldCheck("residual", resid, 0.0, 1e-8))
    return RowCheck("Example (2,6,4) state", tuple(fields))


def check_example_classes() -> RowCheck:
    got = enumerate_simply(6, 4)
    ok = got == ref.EXAMPLE_264_CLASSES
    return RowCheck(
        "Example (2,6,4) classes",
        (FieldCheck("set_equal", 1.0 if ok else 0.0, 1.0, 0.0),),
    )


@dataclass(frozen=True)
class Perturbation:
    index: int
    field: str
    delta: float

    @classmethod
    def parse(cls, text: str) -> "Perturbation":
        try:
            idx, name, delta = text.split(":")
            p = cls(int(idx), name, float(delta))
        except ValueError as exc:
            raise ValueError(f"perturbation must look like INDEX:FIELD:DELTA, got {text!r}") from exc
        if p.field not in ("rho", "vol_ball", "density"):
            raise ValueError(f"unknown field {p.field!r}; use rho, vol_ball or density")
        if not 0 <= p.index < len(ref.ROWS):
            raise ValueError(f"row index {p.index} out of range 0..{len(ref.ROWS) - 1}")
        return p


@dataclass
class VerifyReport:
    checks: list[RowCheck] = field(default_factory=list)
    strict: bool = False

    def counted(self) -> list[RowCheck]:
        return [c for c in self.checks if self.strict or not c.erratum]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.counted())

    def worst_offender(self) -> Optional[RowCheck]:
        failing = [c for c in self.counted() if not c.passed]
        return max(failing, key=lambda c: c.worst) if failing else None


def run_verify(
    tables: Optional[Iterable[int]] = None,
    perturbations: Sequence[Perturbation] = (),
    include_limits: bool = True,
    include_examples: bool = True,
    strict: bool = False,
) -> VerifyReport:
    rows = list(ref.ROWS)
    for p in perturbations:
        old = rows[p.index]
        rows[p.index] = replace(old, **{p.field: getattr(old, p.field) + p.delta})
    wanted = set(tables) if tables is not None else None
    report = VerifyReport(strict=strict)
    if include_examples and (wanted is None or 1 in wanted):
        report.checks.append(check_example_classes())
        report.checks.append(check_example_state())
    for row in rows:
        if wanted is not None and row.table not in wanted:
            continue
        if row.is_limit and not include_limits:
            continue
        report.checks.append(check_row(row))
    return report
