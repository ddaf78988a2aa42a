"""Bound quality measurement: percentage gaps, shifted geometric means, profiles, reports."""
from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import gmpy2

from .core import format_rational, to_rational

UPPER, LOWER = "upper", "lower"


class BenchError(ValueError):
    pass


@dataclass(frozen=True)
class BoundRecord:
    instance: str
    method: str
    kind: str  # UPPER or LOWER
    value: Fraction
    runtime: float | None = None  # None when timings are left out for reproducible reports
    status: str = ""

    def __post_init__(self):
        if self.kind not in (UPPER, LOWER):
            raise BenchError(f"bound kind must be {UPPER!r} or {LOWER!r}, got {self.kind!r}")
        object.__setattr__(self, "value", to_rational(self.value))


@dataclass(frozen=True)
class ProfileCurve:
    method: str
    points: tuple  # (gap percent, fraction of instances with gap <= it)

    def fraction_at(self, g) -> Fraction:
        g = to_rational(g)
        out = Fraction(0)
        for x, f in self.points:
            if x <= g:
                out = f
        return out


def gap_upper(ub, best_lb) -> Fraction:
    """``(ub - best_lb) / best_lb * 100``, exactly."""
    ub, best_lb = to_rational(ub), to_rational(best_lb)
    if best_lb <= 0:
        raise BenchError(f"lower bound {best_lb} must be positive to define a gap")
    return (ub - best_lb) / best_lb * 100


def gap_lower(best_ub, lb) -> Fraction:
    """``(best_ub - lb) / lb * 100``, exactly."""
    best_ub, lb = to_rational(best_ub), to_rational(lb)
    if lb <= 0:
        raise BenchError(f"lower bound {lb} must be positive to define a gap")
    return (best_ub - lb) / lb * 100


def _exact_root(x: Fraction, n: int) -> Fraction | None:
    num, exact_num = gmpy2.iroot(gmpy2.mpz(x.numerator), n)
    den, exact_den = gmpy2.iroot(gmpy2.mpz(x.denominator), n)
    if exact_num and exact_den:
        return Fraction(int(num), int(den))
    return None


def shifted_geomean(values: Iterable, shift=1) -> Fraction | float:
    """``(prod(x_i + s)) ** (1/n) - s``; exact when the root is rational, else a float."""
    vals = [to_rational(v) for v in values]
    shift = to_rational(shift)
    if not vals:
        raise BenchError("shifted geometric mean of an empty list")
    if any(v + shift <= 0 for v in vals):
        raise BenchError("every value plus the shift must be positive")
    prod = math.prod((v + shift for v in vals), start=Fraction(1))
    root = _exact_root(prod, len(vals))
    if root is not None:
        return root - shift
    logs = sum(math.log(v + shift) for v in vals) / len(vals)
    return math.exp(logs) - float(shift)


def best_references(records: Iterable[BoundRecord]) -> dict[str, dict[str, Fraction]]:
    """Per instance, the largest lower bound and the smallest upper bound recorded."""
    ref: dict[str, dict[str, Fraction]] = defaultdict(dict)
    for r in records:
        cur = ref[r.instance].get(r.kind)
        if r.kind == LOWER:
            ref[r.instance][LOWER] = r.value if cur is None else max(cur, r.value)
        else:
            ref[r.instance][UPPER] = r.value if cur is None else min(cur, r.value)
    return dict(ref)


def record_gap(record: BoundRecord, ref: Mapping[str, Mapping[str, Fraction]]) -> Fraction:
    """Gap of an upper bound to the best lower bound, or of a lower bound to the best upper bound."""
    other = LOWER if record.kind == UPPER else UPPER
    try:
        reference = ref[record.instance][other]
    except KeyError:
        raise BenchError(f"instance {record.instance!r} has no {other} bound to compare with") from None
    if record.kind == UPPER:
        return gap_upper(record.value, reference)
    return gap_lower(reference, record.value)


def performance_profile(gaps: Mapping[str, Sequence]) -> list[ProfileCurve]:
    """Step curves: for each method and each observed gap ``g``, the share of its
    instances whose gap is at most ``g``."""
    if not gaps or not any(gaps.values()):
        raise BenchError("no gaps to profile")
    curves = []
    for method in sorted(gaps):
        vals = sorted(to_rational(g) for g in gaps[method])
        if not vals:
            raise BenchError(f"method {method!r} has no gaps")
        n = len(vals)
        points = []
        for k, g in enumerate(vals):
            if k + 1 < n and vals[k + 1] == g:
                continue
            points.append((g, Fraction(k + 1, n)))
        curves.append(ProfileCurve(method, tuple(points)))
    return curves


def profiles_from_records(records: Sequence[BoundRecord], kind: str) -> list[ProfileCurve]:
    ref = best_references(records)
    gaps: dict[str, list] = defaultdict(list)
    for r in records:
        if r.kind == kind:
            gaps[r.method].append(record_gap(r, ref))
    return performance_profile(gaps)


def _pct(x) -> str:
    if isinstance(x, Fraction):
        # round half away from zero at two decimals, without leaving exact arithmetic
        scaled = abs(x) * 100
        q, rem = divmod(scaled.numerator, scaled.denominator)
        if 2 * rem >= scaled.denominator:
            q += 1
        sign = "-" if x < 0 and q else ""
        return f"{sign}{q // 100}.{q % 100:02d}"
    return f"{x:.2f}"


COLUMNS = ("instance", "method", "kind", "value", "gap", "runtime")


def report_rows(records: Sequence[BoundRecord], shift=1) -> list[tuple[str, ...]]:
    """Detail rows in record order, then per-method min/avg/max gap rows (avg is the
    shifted geometric mean)."""
    ref = best_references(records)
    rows = []
    per_method: dict[tuple, list] = defaultdict(list)
    for r in records:
        try:
            g = record_gap(r, ref)
        except BenchError:
            g = None
        if g is not None:
            per_method[r.method, r.kind].append(g)
        rows.append((r.instance, r.method, r.kind, format_rational(r.value),
                     "" if g is None else _pct(g), "" if r.runtime is None else f"{r.runtime:.3f}"))
    for (method, kind), gaps in sorted(per_method.items()):
        for label, stat in (("min", min(gaps)), ("avg", shifted_geomean(gaps, shift)), ("max", max(gaps))):
            rows.append((f"<{label}>", method, kind, "", _pct(stat), ""))
    return rows


def report(records: Sequence[BoundRecord], fmt: str = "csv", path=None, shift=1) -> str:
    """Render records as CSV or a Markdown table; write to ``path`` when given."""
    rows = report_rows(records, shift)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(rows)
        text = buf.getvalue()
    elif fmt == "md":
        lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        raise BenchError(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def profiles_to_dict(curves: Sequence[ProfileCurve]) -> dict:
    return {c.method: [[_pct(g), format_rational(f)] for g, f in c.points] for c in curves}
