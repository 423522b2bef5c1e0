"""Check outcome records and their deterministic serialization.

Every verification routine in this package returns a CheckReport: the
check id, the parameter block it ran with, a status, and the list of
coefficient mismatches (empty on success).  Reports serialize to
json-lines for machine use and to a aligned-column table for humans.
The json-lines form is byte-identical across reruns with the same
configuration, so volatile fields (elapsed time) stay out of it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .fock import FockVector

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_WINDOW = "window-insufficient"


def format_scalar(value: Fraction | int) -> str:
    """Render an exact rational as ``p`` or ``p/q`` with q > 0 in lowest terms."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def serialize_vector(v: FockVector) -> list[dict[str, Any]]:
    """State vector as a list of {parts, coeff} rows, sorted by weight then parts."""
    return [
        {"parts": list(parts), "coeff": format_scalar(c)}
        for parts, c in v.terms()
    ]


def serialize_series_terms(terms: Iterable[tuple[tuple[int, ...], Fraction]]) -> list[dict[str, Any]]:
    """Laurent data as {exponents, value} rows in sorted exponent order."""
    rows = sorted(terms, key=lambda item: item[0])
    return [
        {"exponents": list(exps), "value": format_scalar(val)}
        for exps, val in rows
    ]


def mismatch_entry(
    monomial: Sequence[int],
    lhs: Fraction | int,
    rhs: Fraction | int,
    target: FockVector,
) -> dict[str, Any]:
    """One offending coefficient: where it sits, both values, and the probe vector."""
    return {
        "monomial": list(monomial),
        "lhs": format_scalar(lhs),
        "rhs": format_scalar(rhs),
        "target": serialize_vector(target),
    }


@dataclass
class CheckReport:
    check_id: str
    params: dict[str, Any]
    status: str
    mismatches: list[dict[str, Any]] = field(default_factory=list)
    elapsed_ms: int = 0

    @property
    def passed(self) -> bool:
        return self.status == STATUS_PASS

    def to_json_obj(self) -> dict[str, Any]:
        # elapsed_ms deliberately omitted: reruns must be byte-identical.
        return {
            "check-id": self.check_id,
            "params": self.params,
            "status": self.status,
            "mismatches": self.mismatches,
        }


def make_report(
    check_id: str,
    params: dict[str, Any],
    mismatches: list[dict[str, Any]],
    elapsed_ms: int = 0,
    window_error: str | None = None,
) -> CheckReport:
    """Assemble a report; status is pass iff no mismatches and no window error."""
    if window_error is not None:
        params = dict(params)
        params["window-error"] = window_error
        status = STATUS_WINDOW
    elif mismatches:
        status = STATUS_FAIL
    else:
        status = STATUS_PASS
    return CheckReport(check_id, params, status, mismatches, elapsed_ms)


def _json_default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return format_scalar(obj)
    raise TypeError(f"not serializable: {obj!r}")


def render_json_lines(reports: Sequence[CheckReport]) -> str:
    """One compact JSON object per line, fixed key order, trailing newline."""
    lines = [
        json.dumps(r.to_json_obj(), separators=(",", ":"), default=_json_default)
        for r in reports
    ]
    return "".join(line + "\n" for line in lines)


def _params_summary(params: Mapping[str, Any]) -> str:
    parts = []
    for key, val in params.items():
        if isinstance(val, (list, tuple)):
            txt = ",".join(str(x) for x in val)
            parts.append(f"{key}=[{txt}]")
        else:
            parts.append(f"{key}={val}")
    return " ".join(parts)


def render_table(reports: Sequence[CheckReport]) -> str:
    """Aligned human-readable summary, one check per row plus mismatch details."""
    if not reports:
        return "(no checks selected)\n"
    id_w = max(len(r.check_id) for r in reports)
    st_w = max(len(r.status) for r in reports)
    out = []
    for r in reports:
        summary = _params_summary(r.params)
        out.append(
            f"{r.check_id:<{id_w}}  {r.status:<{st_w}}  {r.elapsed_ms:>6d} ms  {summary}".rstrip()
        )
        for m in r.mismatches[:5]:
            mono = ",".join(str(e) for e in m["monomial"])
            out.append(f"  at ({mono}): lhs={m['lhs']} rhs={m['rhs']}")
        extra = len(r.mismatches) - 5
        if extra > 0:
            out.append(f"  ... {extra} more mismatches")
    return "".join(line + "\n" for line in out)


def render_reports(reports: Sequence[CheckReport], fmt: str = "json-lines") -> str:
    if fmt == "json-lines":
        return render_json_lines(reports)
    if fmt == "table":
        return render_table(reports)
    raise ValueError(f"unknown format: {fmt!r}")
