"""Line-oriented job files.

::

    # comment
    [job]
    name = circle
    mode = verify
    formula = "x0^2 + x1^2 - 1 = 0"
    box = 2
    res = 32

Each ``[job]`` header starts a new job.  Values may be wrapped in double
quotes.  Unknown keys and missing mode-specific fields are errors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable

MODES = ("bound", "verify", "construct")
CONSTRUCT_KINDS = ("T", "X", "both")


class JobSpecError(ValueError):
    pass


@dataclass(frozen=True)
class JobSpec:
    mode: str
    formula: str
    name: str | None = None
    measure: str = "degree"
    measure_file: str | None = None
    n: int | None = None
    free_dim: int | None = None
    theorem: str | None = None
    o_constants: tuple[tuple[str, int], ...] = ()
    box: Fraction = Fraction(2)
    res: int = 32
    field: str = "GF2"
    lam: Fraction = Fraction(1, 64)
    m: int | None = None
    radius: Fraction | None = None
    construct: str = "both"
    strict: bool = False
    out: str | None = None
    max_bits: int | None = None
    k_cap: int | None = None
    sign_res: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise JobSpecError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if not self.formula.strip():
            raise JobSpecError("formula is required")
        if self.box <= 0:
            raise JobSpecError("box must be positive")
        if self.res < 1:
            raise JobSpecError("res must be positive")
        if self.construct not in CONSTRUCT_KINDS:
            raise JobSpecError(f"construct must be one of {', '.join(CONSTRUCT_KINDS)}")
        if self.m is not None and self.m < 1:
            raise JobSpecError("m must be at least 1")

    def with_overrides(self, **kwargs) -> "JobSpec":
        clean = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **clean) if clean else self


def _fraction(v: str) -> Fraction:
    try:
        return Fraction(v.strip())
    except (ValueError, ZeroDivisionError):
        raise JobSpecError(f"expected a rational number like 1/64, got {v!r}") from None


def _int(v: str) -> int:
    try:
        return int(v.strip())
    except ValueError:
        raise JobSpecError(f"expected an integer, got {v!r}") from None


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise JobSpecError(f"expected true/false, got {v!r}")


def _o_consts(v: str) -> tuple[tuple[str, int], ...]:
    out = []
    for item in v.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, val = item.partition("=")
        if not sep:
            raise JobSpecError(f"O-constant must look like NAME=K, got {item!r}")
        out.append((name.strip(), _int(val)))
    return tuple(out)


_KEYS = {
    "name": ("name", str),
    "mode": ("mode", str),
    "formula": ("formula", str),
    "measure": ("measure", str),
    "measure_file": ("measure_file", str),
    "n": ("n", _int),
    "free_dim": ("free_dim", _int),
    "theorem": ("theorem", str),
    "o_const": ("o_constants", _o_consts),
    "o_constants": ("o_constants", _o_consts),
    "box": ("box", _fraction),
    "res": ("res", _int),
    "field": ("field", str),
    "lambda": ("lam", _fraction),
    "m": ("m", _int),
    "radius": ("radius", _fraction),
    "construct": ("construct", str),
    "strict": ("strict", _bool),
    "out": ("out", str),
    "max_bits": ("max_bits", _int),
    "k_cap": ("k_cap", _int),
    "sign_res": ("sign_res", _int),
}


def _unquote(v: str) -> str:
    v = v.strip()
    if len(v) >= 2 and v[0] == v[-1] == '"':
        return v[1:-1]
    return v


def parse_jobs(text: str, default_mode: str | None = None) -> list[JobSpec]:
    """Parse every ``[job]``; ``default_mode`` fills in jobs that omit ``mode``."""
    jobs: list[dict] = []
    current: dict | None = None
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if line != "[job]":
                raise JobSpecError(f"line {lineno}: unknown section {line!r}; only [job] is allowed")
            current = {}
            jobs.append(current)
            lines.append(lineno)
            continue
        if current is None:
            raise JobSpecError(f"line {lineno}: key outside a [job] section")
        key, sep, value = line.partition("=")
        if not sep:
            raise JobSpecError(f"line {lineno}: expected 'key = value'")
        key = key.strip()
        if key not in _KEYS:
            raise JobSpecError(f"line {lineno}: unknown key {key!r}")
        attr, conv = _KEYS[key]
        if attr in current and attr != "o_constants":
            raise JobSpecError(f"line {lineno}: duplicate key {key!r}")
        try:
            parsed = conv(_unquote(value))
        except JobSpecError as exc:
            raise JobSpecError(f"line {lineno}: {exc}") from None
        if attr == "o_constants":
            parsed = current.get(attr, ()) + parsed
        current[attr] = parsed
    if not jobs:
        raise JobSpecError("no [job] section found")
    out = []
    for lineno, fields in zip(lines, jobs):
        if default_mode is not None:
            fields.setdefault("mode", default_mode)
        missing = [k for k in ("mode", "formula") if k not in fields]
        if missing:
            raise JobSpecError(f"job starting at line {lineno}: missing {', '.join(missing)}")
        try:
            out.append(JobSpec(**fields))
        except JobSpecError as exc:
            raise JobSpecError(f"job starting at line {lineno}: {exc}") from None
    return out


def job_to_text(job: JobSpec) -> str:
    """Serialize one job back to the file format (non-default fields only)."""
    lines = ["[job]"]
    defaults = JobSpec(mode=job.mode, formula=job.formula)
    inverse = {attr: key for key, (attr, _) in _KEYS.items() if key != "o_const"}
    for attr, key in inverse.items():
        v = getattr(job, attr)
        if attr not in ("mode", "formula") and v == getattr(defaults, attr):
            continue
        if attr == "o_constants":
            v = ", ".join(f"{k}={x}" for k, x in v)
        elif attr == "formula":
            v = f'"{v}"'
        elif isinstance(v, bool):
            v = "true" if v else "false"
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


def jobs_to_text(jobs: Iterable[JobSpec]) -> str:
    return "\n".join(job_to_text(j) for j in jobs)
