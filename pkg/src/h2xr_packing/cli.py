"""Command line front end: solve, table, verify and export-scene.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .exceptions import NoConvergenceError, OverlapError, PackingError, UnsolvedCaseError
from .frobenius import (
    KernelSite,
    TranslationClass,
    dedupe_equivariant,
    enumerate_multiply,
    enumerate_simply,
    sorted_classes,
)
from .hyperbolic_plane import H2Isometry, boost_matrix, check_signature, rotation_at_origin
from .packing_optimizer import PackingSolution, SweepRow, global_optimum, solve_case
from .scene import build_scene, dumps_scene
from .screw_group import ScrewElement
from .verification import Perturbation, run_verify

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
OUTPUT_DIR_ENV = "H2XR_OUTPUT_DIR"
CSV_COLUMNS = ["p0", "p1", "p2", "site", "class", "rho", "xi", "vol_ball", "vol_dv", "delta", "status"]
FORMATS = ("csv", "markdown", "json")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p1: list[int] = field(default_factory=list)
    p2: list[int] = field(default_factory=list)
    mode: str = "simply"
    sites: list[str] = field(default_factory=list)
    classes: list[str] = field(default_factory=list)
    format: str = "markdown"
    quadrature_tol: float = 1e-8
    newton_tol: float = 1e-12
    word_len: int = 8
    output: Optional[str] = None
    workers: int = 1
    all_classes: bool = False
    tables: list[int] = field(default_factory=list)
    perturb: list[str] = field(default_factory=list)
    strict: bool = False
    no_limits: bool = False
    mesh: str = "48x24"
    radius: float = 1.0
    conjugate: Optional[int] = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        if self.mode not in ("simply", "multiply"):
            raise UsageError("mode must be simply or multiply")
        if self.quadrature_tol <= 0 or self.newton_tol <= 0:
            raise UsageError("tolerances must be positive")
        if self.word_len < 1:
            raise UsageError("word length must be at least 1")
        if self.radius <= 0:
            raise UsageError("radius must be positive")

    @property
    def solver_kw(self) -> dict:
        return {"word_len": self.word_len, "quad_tol": self.quadrature_tol, "newton_tol": self.newton_tol}


# ----------------------------------------------------------------- parsing


def parse_int_list(text) -> list[int]:
    """'5..12', '60,62,64' or a mix like '5..7,10'; ranges are inclusive."""
    if isinstance(text, int):
        return [text]
    if isinstance(text, (list, tuple)):
        return [v for t in text for v in parse_int_list(t)]
    out: list[int] = []
    for chunk in str(text).split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ".." in chunk:
            lo, hi = chunk.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(chunk))
    return out


def parse_mesh(text: str) -> tuple[int, int]:
    try:
        n_u, n_v = (int(x) for x in text.lower().split("x"))
    except ValueError as exc:
        raise UsageError(f"mesh must look like 48x24, got {text!r}") from exc
    return n_u, n_v


def _split(text) -> list[str]:
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        return [str(t) for t in text]
    return [s.strip() for s in str(text).split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="h2xr-packing", description="Geodesic ball packings of H2xR under screw-motion groups.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ranged: bool):
        p.add_argument("--config", help="JSON file with the same keys as the flags; flags win")
        p.add_argument("--p1", help="p1 value" + (" or range like 5..12" if ranged else ""))
        p.add_argument("--p2", help="p2 value" + (" or list like 3,4,5" if ranged else ""))
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--quadrature-tol", type=float, dest="quadrature_tol")
        p.add_argument("--newton-tol", type=float, dest="newton_tol")
        p.add_argument("--word-len", type=int, dest="word_len")
        p.add_argument("--output", "-o", help=f"output file (relative paths go under ${OUTPUT_DIR_ENV} when set)")

    p = sub.add_parser("solve", help="solve one case")
    common(p, ranged=False)
    p.add_argument("--site", help="Interior (default), A, B or C")
    p.add_argument("--class", dest="classes", help="translation class like 0,1/2,1/2; best class if omitted")

    p = sub.add_parser("table", help="sweep p1 and tabulate the optima")
    common(p, ranged=True)
    p.add_argument("--mode", choices=("simply", "multiply"))
    p.add_argument("--site", help="vertex sites for multiply mode, e.g. B,C")
    p.add_argument("--class", dest="classes", help="only keep these classes (semicolon separated)")
    p.add_argument("--all-classes", action="store_true", default=None, dest="all_classes", help="one row per case, not just the best per p1")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("verify", help="recompute the embedded reference values")
    p.add_argument("--config")
    p.add_argument("--tables", help="restrict to tables, e.g. 1,3")
    p.add_argument("--perturb", action="append", help="INDEX:FIELD:DELTA shift applied to an expectation (negative control)")
    p.add_argument("--strict", action="store_true", default=None, help="count known errata as failures")
    p.add_argument("--no-limits", action="store_true", default=None, dest="no_limits", help="skip the p1 -> infinity rows")

    p = sub.add_parser("export-scene", help="write a JSON scene of the optimal configuration")
    common(p, ranged=False)
    p.add_argument("--site")
    p.add_argument("--class", dest="classes")
    p.add_argument("--mesh", help="sphere mesh resolution, default 48x24")
    p.add_argument("--radius", type=float, help="keep orbit balls within radius * xi of the kernel (default 1)")
    p.add_argument("--conjugate", type=int, help="move the configuration by a random isometry drawn from this seed")
    return parser


def _site_list(raw) -> list[str]:
    return [KernelSite.of(s, 5, 5).name for s in _split(raw)]


def make_config(ns: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional JSON config file and explicit flags (in increasing priority)."""
    values: dict = {}
    if getattr(ns, "config", None):
        try:
            with open(ns.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
        values.update({k.replace("-", "_"): v for k, v in loaded.items()})
        if "class" in values:
            values["classes"] = values.pop("class")
        if "site" in values:
            values["sites"] = values.pop("site")
    for key, val in vars(ns).items():
        if key in ("config", "verbose") or val is None:
            continue
        values["sites" if key == "site" else key] = val

    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        for key in ("p1", "p2", "tables"):
            if key in values:
                values[key] = parse_int_list(values[key])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if "sites" in values:
        try:
            values["sites"] = _site_list(values["sites"])
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if "classes" in values:
        raw = values["classes"]
        values["classes"] = [raw] if isinstance(raw, str) and ";" not in raw else [c for c in _split_classes(raw)]
    if values.get("command") == "export-scene":
        values.setdefault("word_len", 2)
    if "perturb" in values and isinstance(values["perturb"], str):
        values["perturb"] = [values["perturb"]]
    return RunConfig(**values)


def _split_classes(raw) -> list[str]:
    if isinstance(raw, (list, tuple)):
        return [str(c) for c in raw]
    return [c.strip() for c in str(raw).split(";") if c.strip()]


def resolve_output(path: Optional[str]) -> Optional[Path]:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


# ---------------------------------------------------------------- rendering


def fmt_number(x: Optional[float]) -> str:
    if x is None or not np.isfinite(x):
        return ""
    return format(float(x), ".6g")


def _row_status(row: SweepRow, best: bool) -> str:
    if row.status == "ok":
        return "best" if best else "ok"
    if row.status == "overlap":
        return f"overlap:{row.detail}"
    return "unsolved"


def solution_record(sol: Optional[PackingSolution], p1, p2, site, cls, status) -> dict:
    rec = {"p0": 2, "p1": p1, "p2": p2, "site": site, "class": str(cls), "status": status}
    for key in ("rho", "xi", "vol_ball", "vol_dv"):
        rec[key] = getattr(sol, key) if sol is not None else None
    rec["delta"] = sol.density if sol is not None else None
    return rec


def render_records(records: list[dict], fmt: str, extra: Optional[dict] = None) -> str:
    if fmt == "json":
        payload = dict(extra or {})
        payload["rows"] = records
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    cells = [[r["p0"], r["p1"], r["p2"], r["site"], r["class"]] + [fmt_number(r[k]) for k in CSV_COLUMNS[5:10]] + [r["status"]] for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(cells)
        return buf.getvalue()
    lines = ["| " + " | ".join(CSV_COLUMNS) + " |", "|" + "---|" * len(CSV_COLUMNS)]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in cells]
    return "\n".join(lines) + "\n"


def render_solution(sol: PackingSolution, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(sol.to_dict(), sort_keys=True, indent=2) + "\n"
    rec = solution_record(sol, sol.p1, sol.p2, sol.kernel_site.name, sol.translation_class, "ok")
    if fmt == "csv":
        return render_records([rec], "csv")
    r, alpha = sol.kernel_polar
    x, y = sol.K.base.to_klein()
    rows = [
        ("signature", "(2, %d, %d)" % (sol.p1, sol.p2)),
        ("site", f"{sol.kernel_site.name} (stabilizer order {sol.kernel_site.stabilizer_order})"),
        ("class", str(sol.translation_class)),
        ("rho", fmt_number(sol.rho)),
        ("xi", fmt_number(sol.xi)),
        ("K polar (r, alpha)", f"({fmt_number(r)}, {fmt_number(alpha)})"),
        ("K Klein (x, y)", f"({fmt_number(x)}, {fmt_number(y)})"),
        ("Vol(B)", fmt_number(sol.vol_ball)),
        ("Vol(D)", fmt_number(sol.vol_dv)),
        ("delta", fmt_number(sol.density)),
        ("active constraints", ", ".join(sol.active_constraints) or "-"),
        ("validated", "yes" if sol.validated else "no"),
    ]
    if sol.full_residual is not None:
        rows.append(("full residual", f"{sol.full_residual:.2e}"))
    rows += [("note", n) for n in sol.notes]
    return "\n".join(["| quantity | value |", "|---|---|"] + [f"| {k} | {v} |" for k, v in rows]) + "\n"


def emit(text: str, cfg: RunConfig, out) -> None:
    path = resolve_output(cfg.output)
    if path is None:
        out.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, newline="")
    print(f"wrote {path}", file=sys.stderr)


# ----------------------------------------------------------------- commands


def _single(values: list[int], name: str) -> int:
    if len(values) != 1:
        raise UsageError(f"--{name} needs exactly one value")
    return values[0]


def _candidate_classes(p1: int, p2: int, site: str) -> list[TranslationClass]:
    ks = KernelSite.of(site, p1, p2)
    found = enumerate_multiply(p1, p2, ks) if ks.is_vertex else enumerate_simply(p1, p2)
    return sorted_classes(dedupe_equivariant(found))


def _solve_best(cfg: RunConfig) -> PackingSolution:
    """Solve the configured case, trying every admissible class when none is given."""
    p1, p2 = _single(cfg.p1, "p1"), _single(cfg.p2, "p2")
    try:
        check_signature(p1, p2)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if len(cfg.sites) > 1:
        raise UsageError("solve takes a single --site")
    site = cfg.sites[0] if cfg.sites else "Interior"
    if len(cfg.classes) > 1:
        raise UsageError("solve takes a single --class")
    if cfg.classes:
        try:
            cls = TranslationClass.parse(cfg.classes[0])
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad class {cfg.classes[0]!r}: {exc}") from exc
        if cls not in set(_candidate_classes(p1, p2, site)) | {c.negated() for c in _candidate_classes(p1, p2, site)}:
            raise UsageError(f"class {cls} is not admissible for (2, {p1}, {p2}) at site {site}")
        return solve_case(p1, p2, site, cls, **cfg.solver_kw)
    best: Optional[PackingSolution] = None
    first_error: Optional[PackingError] = None
    for cls in _candidate_classes(p1, p2, site):
        try:
            sol = solve_case(p1, p2, site, cls, **cfg.solver_kw)
        except (OverlapError, UnsolvedCaseError, NoConvergenceError) as exc:
            first_error = first_error or exc
            continue
        if best is None or sol.density > best.density + 1e-8:
            best = sol
    if best is None:
        if first_error is None:
            raise UnsolvedCaseError(f"no admissible class for (2, {p1}, {p2}) at site {site}")
        raise first_error
    return best


def cmd_solve(cfg: RunConfig, out=sys.stdout) -> int:
    sol = _solve_best(cfg)
    emit(render_solution(sol, cfg.format), cfg, out)
    return EXIT_OK


def cmd_table(cfg: RunConfig, out=sys.stdout) -> int:
    if not cfg.p1:
        raise UsageError("empty p1 range")
    if not cfg.p2:
        raise UsageError("--p2 is required")
    if cfg.mode == "multiply" and not cfg.sites:
        sites = ["A", "B", "C"]
    elif cfg.mode == "multiply":
        sites = cfg.sites
    else:
        if cfg.sites and cfg.sites != ["Interior"]:
            raise UsageError("vertex sites need --mode multiply")
        sites = ["Interior"]
    wanted = None
    if cfg.classes:
        try:
            wanted = {TranslationClass.parse(c) for c in cfg.classes}
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(str(exc)) from exc
        wanted |= {c.negated() for c in wanted}

    entries: list[tuple[SweepRow, bool]] = []
    params = []
    best_overall: Optional[SweepRow] = None
    for p2 in cfg.p2:
        report = global_optimum(
            p2, cfg.p1, sites=sites, mode=cfg.mode, workers=cfg.workers,
            word_len=cfg.word_len, quad_tol=cfg.quadrature_tol, newton_tol=cfg.newton_tol,
        )
        params.append(report.parameters)
        rows = list(report.rows)
        if wanted is not None:
            rows = [r for r in rows if r.translation_class in wanted]
        ok = [r for r in rows if r.status == "ok"]
        local_best = max(ok, key=lambda r: r.density) if ok else None
        if local_best is not None and (best_overall is None or local_best.density > best_overall.density + 1e-8):
            best_overall = local_best
        if cfg.all_classes:
            entries += [(r, False) for r in rows]
            continue
        by_p1: dict[int, list[SweepRow]] = {}
        for r in rows:
            by_p1.setdefault(r.p1, []).append(r)
        for p1 in sorted(by_p1):
            group = by_p1[p1]
            good = [r for r in group if r.status == "ok"]
            if good:
                top = good[0]
                for r in good[1:]:
                    if r.density > top.density + 1e-8:
                        top = r
                entries.append((top, False))
            else:
                entries += [(r, False) for r in group]
    if not entries and all(not p["p1"] or len(p["skipped_p1"]) == len(p["p1"]) for p in params):
        raise UsageError("no hyperbolic signature in the requested range")
    records = [
        solution_record(r.solution, r.p1, r.p2, r.site, r.translation_class, _row_status(r, r is best_overall))
        for r, _ in entries
    ]
    meta = {"parameters": params}
    if best_overall is not None:
        meta["best"] = solution_record(best_overall.solution, best_overall.p1, best_overall.p2, best_overall.site, best_overall.translation_class, "best")
    emit(render_records(records, cfg.format, meta), cfg, out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out=sys.stdout) -> int:
    try:
        perturbations = [Perturbation.parse(p) for p in cfg.perturb]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = run_verify(
        tables=cfg.tables or None,
        perturbations=perturbations,
        include_limits=not cfg.no_limits,
        strict=cfg.strict,
    )
    for check in report.checks:
        if check.passed:
            tag = "PASS"
        elif check.erratum and not cfg.strict:
            tag = "KNOWN-ERRATUM"
        else:
            tag = "FAIL"
        print(f"{tag:13s} {check.describe()}", file=out)
        if tag == "KNOWN-ERRATUM":
            print(f"{'':13s} {check.erratum}", file=out)
    counted = report.counted()
    n_pass = sum(c.passed for c in counted)
    print(f"{n_pass}/{len(counted)} checks passed", file=out)
    worst = report.worst_offender()
    if worst is not None:
        print(f"worst offender: {worst.describe()}", file=out)
        return EXIT_VERIFY
    return EXIT_OK


def random_screw(seed: int) -> ScrewElement:
    rng = np.random.default_rng(seed)
    r, alpha, theta = rng.uniform(0, 1.5), rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi)
    m = boost_matrix(r, alpha) @ rotation_at_origin(theta)
    return ScrewElement(H2Isometry(m), float(rng.uniform(-1, 1)))


def cmd_export_scene(cfg: RunConfig, out=sys.stdout) -> int:
    mesh = parse_mesh(cfg.mesh)
    if min(mesh) < 2 or mesh[0] < 3:
        raise UsageError("mesh needs at least 3x2 samples")
    sol = _solve_best(cfg)
    transform = random_screw(cfg.conjugate) if cfg.conjugate is not None else None
    scene = build_scene(sol, word_len=cfg.word_len, radius=cfg.radius, mesh=mesh, transform=transform)
    text = dumps_scene(scene)
    path = resolve_output(cfg.output) or Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"scene_2_{sol.p1}_{sol.p2}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path} ({len(scene['balls'])} balls)", file=out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "table": cmd_table, "verify": cmd_verify, "export-scene": cmd_export_scene}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(ns)
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OverlapError as exc:
        print(f"rejected: overlap via word {exc.word} (distance {exc.distance:.6g} < {exc.required:.6g})", file=sys.stderr)
        return EXIT_SOLVER
    except PackingError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
