"""Command-line front end.

Exit codes: 0 success, 1 domination failure or construction mismatch,
2 input error, 3 capability error (oracle limits, bound too large).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .bounds import (
    DEFAULT_MAX_BITS,
    ROUTES,
    BoundError,
    BoundTooLargeError,
    OConstants,
    RouteWarning,
    bound_formula,
    bound_quantified,
)
from .complexity import ComplexityError, ComplexityMeasure, get_measure, load_measure
from .formula import (
    FormulaSyntaxError,
    Rel,
    atoms_of,
    looks_quantified,
    n_vars_of,
    parse_formula,
    parse_quantified,
    to_text,
)
from .jobspec import JobSpec, JobSpecError, parse_jobs
from .report import atomic_write_bytes, bound_report, construction_report, dumps, write_report

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_CAPABILITY = 3


class InputError(ValueError):
    pass


@dataclass
class JobResult:
    exit_code: int
    report: dict | None
    diagnostics: list[str]
    files: dict[str, str]


def _measure(job: JobSpec) -> ComplexityMeasure:
    if job.measure_file:
        return load_measure(job.measure_file)
    return get_measure(job.measure)


def _consts(job: JobSpec) -> OConstants:
    return OConstants.of(dict(job.o_constants))


def _record_warnings(caught) -> list[str]:
    return [str(w.message) for w in caught if issubclass(w.category, RouteWarning)]


def run_bound(job: JobSpec) -> JobResult:
    measure = _measure(job)
    consts = _consts(job)
    max_bits = job.max_bits or DEFAULT_MAX_BITS
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RouteWarning)
        if looks_quantified(job.formula):
            if job.theorem not in (None, "quantified"):
                raise InputError("prenex formulas only use the quantified theorem")
            qf = parse_quantified(job.formula, job.free_dim if job.free_dim is not None else 0)
            b = bound_quantified(qf, measure, consts, max_bits, job.k_cap)
            formula_text = qf.to_text()
        else:
            f = parse_formula(job.formula, job.n)
            b = bound_formula(f, measure, job.n, route=job.theorem, strict=job.strict)
            formula_text = to_text(f)
    warn = _record_warnings(caught)
    report = bound_report(
        b,
        "bound",
        job.name,
        consts,
        inputs={**b.inputs, "formula": formula_text, "measure": measure.name},
        warnings=warn or None,
    )
    return JobResult(EXIT_OK, report, warn, {})


def run_verify(job: JobSpec) -> JobResult:
    from .lab.verify import CapabilityError, verify_domination

    if looks_quantified(job.formula):
        raise CapabilityError("the oracle cannot evaluate quantified formulas")
    measure = _measure(job)
    f = parse_formula(job.formula, job.n)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RouteWarning)
        rep = verify_domination(
            f,
            route=job.theorem,
            box=job.box,
            resolution=job.res,
            measure=measure,
            field_name=job.field,
            strict=job.strict,
        )
    warn = _record_warnings(caught)
    if rep.stability_warning:
        warn.append("stability warning: " + rep.notes[-1])
    b = rep.bound
    report = bound_report(
        b,
        "verify",
        job.name,
        _consts(job),
        inputs={**b.inputs, "formula": rep.formula, "measure": measure.name},
        verification=rep.as_dict(),
        warnings=warn or None,
    )
    diags = list(warn)
    if not rep.passed:
        diags.append(f"domination failed: Betti sum {rep.betti_sum} exceeds bound {b.value}")
    return JobResult(EXIT_OK if rep.passed else EXIT_FAILED, report, diags, {})


def run_construct(job: JobSpec, out: str | None) -> JobResult:
    from .formula import And, Atom, normalize
    from .lab import cubical_io
    from .lab.constructions import EpsilonSchedule, build_T, closed_approximation, top_level_ball
    from .lab.verify import CapabilityError, compare_sets, oracle_betti
    from .polynomial import Polynomial

    if looks_quantified(job.formula):
        raise CapabilityError("constructions need a quantifier-free formula")
    f = parse_formula(job.formula, job.n)
    dim = job.n if job.n is not None else max(n_vars_of(f), 1)
    if dim > 3:
        raise CapabilityError(f"the oracle handles dimension <= 3, got {dim}")
    m = job.m if job.m is not None else dim
    EpsilonSchedule(job.lam, m)  # validates lambda before any heavy work
    sign_res = job.sign_res or job.res
    rows, texts, warn, sets = [], {}, [], {}

    if job.construct in ("T", "both"):
        T = build_T(f, job.lam, m, job.box, sign_res, dim=dim)
        texts["T"] = to_text(T)
        row = compare_sets("T vs S", f, T, job.box, job.res, dim, job.field)
        rows.append(row)
        sets["T"] = T

    if job.construct in ("X", "both"):
        bounded = job.radius is not None or top_level_ball(f) is not None
        if bounded:
            Xp = closed_approximation(f, job.lam, job.box, sign_res, job.radius, dim)
            X = f
            if job.radius is not None:
                ball = Atom(Polynomial.norm_squared(dim) - job.radius * job.radius, Rel.LE)
                X = normalize(And((f, ball)))
            texts["X'"] = to_text(Xp)
            rows.append(compare_sets("X' vs X", X, Xp, job.box, job.res, dim, job.field))
            sets["X'"] = Xp
        elif job.construct == "X":
            raise InputError("X' needs a bounded set: give a radius or conjoin a ball atom")
        else:
            warn.append("X' skipped: no radius given and no top-level ball atom")

    for row in rows:
        if not row.stable:
            warn.append(f"{row.label}: Betti vectors changed under refinement")
    files: dict[str, str] = {}
    if out is not None:
        stem = Path(out)
        for key, F in sets.items():
            tag = key.replace("'", "prime")
            text_path = stem.with_name(f"{stem.stem}.{tag}.txt")
            atomic_write_bytes(text_path, (texts[key] + "\n").encode("utf-8"))
            _, cs = oracle_betti(F, job.box, job.res, job.field, "center", dim)
            raster_path = stem.with_name(f"{stem.stem}.{tag}.bbcs")
            cubical_io.save(cs, raster_path)
            files[f"{key} formula"] = str(text_path)
            files[f"{key} raster"] = str(raster_path)

    s, _ = atoms_of(f)
    construction = {
        "schedule": EpsilonSchedule(job.lam, m).to_text(),
        "formulas": texts,
        "rows": [r.as_dict() for r in rows],
        "files": files,
    }
    inputs = {
        "formula": to_text(f),
        "n": dim,
        "s": s,
        "lambda": job.lam,
        "m": m,
        "box": job.box,
        "res": job.res,
        "sign_res": sign_res,
        "radius": job.radius,
        "field": job.field,
    }
    report = construction_report(inputs, construction, job.name, warnings=warn)
    ok = all(r.equal for r in rows)
    diags = list(warn)
    for r in rows:
        if not r.equal:
            diags.append(f"{r.label}: {r.original.trimmed()} != {r.constructed.trimmed()}")
    return JobResult(EXIT_OK if ok else EXIT_FAILED, report, diags, files)


def _table(rows: list[dict]) -> str:
    lines = [f"{'set':<10} {'original':<14} {'constructed':<14} equal"]
    for r in rows:
        lines.append(
            f"{r['label']:<10} {str(tuple(r['original'])):<14} {str(tuple(r['constructed'])):<14} {r['equal']}"
        )
    return "\n".join(lines)


def run_job(job: JobSpec, out: str | None = None) -> JobResult:
    """Run one job, mapping every known failure to its exit code."""
    from .lab.constructions import ConstructionError, ScheduleError, UnboundedError
    from .lab.raster import RasterError
    from .lab.verify import CapabilityError

    out = out or job.out
    try:
        if job.mode == "bound":
            res = run_bound(job)
        elif job.mode == "verify":
            res = run_verify(job)
        else:
            res = run_construct(job, out)
    except BoundTooLargeError as exc:
        return JobResult(EXIT_CAPABILITY, None, [f"bound too large: {exc}"], {})
    except (CapabilityError, RasterError) as exc:
        return JobResult(EXIT_CAPABILITY, None, [f"capability error: {exc}"], {})
    except FormulaSyntaxError as exc:
        return JobResult(EXIT_INPUT, None, [f"syntax error: {exc}"], {})
    except (
        InputError,
        BoundError,
        ComplexityError,
        ScheduleError,
        UnboundedError,
        ConstructionError,
        OSError,
        ValueError,
    ) as exc:
        return JobResult(EXIT_INPUT, None, [f"{type(exc).__name__}: {exc}"], {})
    if out is not None and res.report is not None:
        write_report(out, res.report)
        res.files["report"] = str(out)
    return res


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("spec", nargs="?", help="job file with one or more [job] sections")
    p.add_argument("--formula", help="formula text (instead of a job file)")
    p.add_argument("--name", help="job name recorded in the report")
    p.add_argument("--measure", help="registered complexity measure (degree, pfaffian, ...)")
    p.add_argument("--measure-file", help="rule file defining a custom measure")
    p.add_argument("--n", type=int, help="ambient dimension")
    p.add_argument("--theorem", choices=ROUTES, help="force a theorem route")
    p.add_argument("--o-const", action="append", default=[], metavar="NAME=K", help="set an O-constant")
    p.add_argument("--strict", action="store_true", default=None, help="inapplicable --theorem is an error")
    p.add_argument("--out", help="output path (a directory when the job file has several jobs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betti-bounds", description="Betti-number bounds for sign-condition sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="evaluate the bound for a formula")
    _add_common(b)
    b.add_argument("--free-dim", type=int, help="number of free variables of a prenex formula")
    b.add_argument("--max-bits", type=int, help="refuse bounds longer than this many bits")
    b.add_argument("--k-cap", type=int, help="cap on |K| in the quantified bound")

    v = sub.add_parser("verify", help="compare the bound with grid-computed Betti numbers")
    _add_common(v)
    v.add_argument("--box", type=Fraction, help="half-width R of the box [-R, R]^n")
    v.add_argument("--res", type=int, help="cells per axis")
    v.add_argument("--field", help="coefficient field: GF2 or GF(p)")

    c = sub.add_parser("construct", help="build the closed approximations and compare Betti numbers")
    _add_common(c)
    c.add_argument("--box", type=Fraction, help="half-width R of the box [-R, R]^n")
    c.add_argument("--res", type=int, help="cells per axis for the comparison")
    c.add_argument("--sign-res", type=int, help="cells per axis when enumerating sign conditions")
    c.add_argument("--field", help="coefficient field: GF2 or GF(p)")
    c.add_argument("--lambda", dest="lam", type=Fraction, help="schedule base p/q in (0, 1)")
    c.add_argument("--m", type=int, help="schedule length (default: the dimension)")
    c.add_argument("--radius", type=Fraction, help="radius of the ball bounding X")
    c.add_argument("--construct", choices=("T", "X", "both"), help="which construction to build")

    run = sub.add_parser("run", help="run a job file, each job in its own mode")
    run.add_argument("spec")
    run.add_argument("--out", help="output directory")
    return parser


_OVERRIDES = (
    "name", "measure", "measure_file", "n", "theorem", "strict", "free_dim", "max_bits", "k_cap",
    "box", "res", "sign_res", "field", "lam", "m", "radius", "construct",
)


def _jobs_from_args(args) -> list[JobSpec]:
    mode = None if args.command == "run" else args.command
    overrides = {k: getattr(args, k, None) for k in _OVERRIDES}
    consts = tuple(OConstants.parse(getattr(args, "o_const", [])).values)
    if getattr(args, "formula", None) is not None:
        if args.spec:
            raise InputError("give either a job file or --formula, not both")
        base = JobSpec(mode=mode, formula=args.formula, o_constants=consts)
        return [base.with_overrides(**overrides)]
    if not args.spec:
        raise InputError("a job file or --formula is required")
    jobs = parse_jobs(Path(args.spec).read_text(encoding="utf-8"), default_mode=mode)
    if mode is not None:
        wrong = [j.name or str(i) for i, j in enumerate(jobs) if j.mode != mode]
        if wrong:
            raise InputError(f"jobs {', '.join(wrong)} are not {mode} jobs; use 'run' for mixed files")
    if consts:
        overrides["o_constants"] = consts
    return [j.with_overrides(**overrides) for j in jobs]


def _out_paths(jobs: list[JobSpec], out: str | None) -> list[str | None]:
    if out is None or len(jobs) == 1:
        return [out] * len(jobs)
    names = [j.name or f"job{i}" for i, j in enumerate(jobs)]
    return [str(Path(out) / f"{name}.json") for name in names]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        jobs = _jobs_from_args(args)
    except (InputError, JobSpecError, BoundError, OSError) as exc:
        print(f"betti-bounds: {exc}", file=sys.stderr)
        return EXIT_INPUT
    outs = _out_paths(jobs, args.out)
    code = EXIT_OK
    reports = []
    for job, out in zip(jobs, outs):
        res = run_job(job, out)
        label = job.name or job.formula
        for d in res.diagnostics:
            print(f"betti-bounds [{label}]: {d}", file=sys.stderr)
        code = max(code, res.exit_code)
        if res.report is None:
            continue
        if out is None and job.out is None:
            reports.append(res.report)
        elif job.mode == "construct":
            print(_table(res.report["construction"]["rows"]))
    if reports:
        sys.stdout.write(dumps(reports[0]) if len(reports) == 1 else dumps(reports))
    return code


if __name__ == "__main__":
    sys.exit(main())
