"""CPLEX-LP and free-MPS writers.

Coefficients with a terminating decimal expansion are written exactly.  Others
are rounded to ``DIGITS`` significant digits and the exact ratio is recorded in
a comment line, so the file stays loadable by external solvers while no
information is lost.
"""
from __future__ import annotations

import re
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .model import BINARY, MilpModel

DIGITS = 17
_LP_BAD = re.compile(r"[^A-Za-z0-9!\"#$%&()/,.;?@_`'{}|~]")


def decimal_string(x: Fraction) -> str:
    x = Fraction(x)
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    with localcontext() as ctx:
        if d == 1:
            ctx.prec = max(DIGITS, len(str(x.numerator)) + len(str(x.denominator)) + 2)
            s = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
        else:
            ctx.prec = DIGITS
            s = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _inexact(x: Fraction) -> bool:
    return Fraction(decimal_string(x)) != x


class _Names:
    def __init__(self, pattern: re.Pattern):
        self.pattern = pattern
        self.map: dict[str, str] = {}
        self.taken: set[str] = set()

    def __call__(self, name: str) -> str:
        if name in self.map:
            return self.map[name]
        base = self.pattern.sub("_", name)
        if not base or base[0].isdigit() or base[0] in ".eE":
            base = "_" + base
        out, k = base, 1
        while out in self.taken:
            k += 1
            out = f"{base}_{k}"
        self.map[name] = out
        self.taken.add(out)
        return out


def _exact_notes(model: MilpModel, vn, cn) -> list[str]:
    notes = []
    for v, c in model.objective.items():
        if _inexact(c):
            notes.append(f"obj {vn(v)} = {c}")
    for con in model.constraints:
        for v, c in con.coeffs.items():
            if _inexact(c):
                notes.append(f"{cn(con.name)} {vn(v)} = {c}")
        if _inexact(con.rhs):
            notes.append(f"{cn(con.name)} rhs = {con.rhs}")
    for var in model.variables.values():
        for side, b in (("lb", var.lb), ("ub", var.ub)):
            if b is not None and _inexact(b):
                notes.append(f"{vn(var.name)} {side} = {b}")
    return notes


def _terms(coeffs: dict, vn) -> str:
    parts = []
    for v, c in coeffs.items():
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = vn(v) if mag == 1 else f"{decimal_string(mag)} {vn(v)}"
        parts.append(f"{sign} {body}")
    if not parts:
        return "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _wrap(text: str, width: int = 78, indent: str = "   ") -> str:
    lines, cur = [], ""
    for tok in text.split(" "):
        if cur and len(cur) + 1 + len(tok) > width:
            lines.append(cur)
            cur = indent + tok
        else:
            cur = f"{cur} {tok}" if cur else tok
    lines.append(cur)
    return "\n".join(lines)


def to_lp(model: MilpModel) -> str:
    vn = _Names(_LP_BAD)
    cn = _Names(_LP_BAD)
    for v in model.variables:
        vn(v)
    out = [f"\\ Problem: {model.name}"]
    out += [f"\\ exact: {n}" for n in _exact_notes(model, vn, cn)]
    out.append("Maximize" if model.sense == "max" else "Minimize")
    obj = _terms(model.objective, vn)
    if model.constant:
        c = model.constant
        obj = f"{obj} {'-' if c < 0 else '+'} {decimal_string(abs(c))}" if model.objective else decimal_string(c)
        if _inexact(c):
            out.insert(1, f"\\ exact: obj constant = {c}")
    out.append(_wrap(f" obj: {obj}"))
    out.append("Subject To")
    for con in model.constraints:
        out.append(_wrap(f" {cn(con.name)}: {_terms(con.coeffs, vn)} {con.sense} {decimal_string(con.rhs)}"))
    out.append("Bounds")
    binaries = []
    for var in model.variables.values():
        name = vn(var.name)
        if var.kind == BINARY:
            binaries.append(name)
            continue
        lo, hi = var.lb, var.ub
        if lo is None and hi is None:
            out.append(f" {name} free")
        elif lo is not None and hi is not None and lo == hi:
            out.append(f" {name} = {decimal_string(lo)}")
        elif lo is None:
            out.append(f" -inf <= {name} <= {decimal_string(hi)}")
        elif hi is None:
            if lo != 0:
                out.append(f" {name} >= {decimal_string(lo)}")
        else:
            out.append(f" {decimal_string(lo)} <= {name} <= {decimal_string(hi)}")
    if binaries:
        out.append("Binaries")
        out.append(_wrap(" " + " ".join(binaries)))
    out.append("End")
    return "\n".join(out) + "\n"


def to_mps(model: MilpModel) -> str:
    bad = re.compile(r"\s")
    vn = _Names(bad)
    cn = _Names(bad)
    cn("obj")
    for v in model.variables:
        vn(v)
    out = [f"* Problem: {model.name}"]
    out += [f"* exact: {n}" for n in _exact_notes(model, vn, cn)]
    out.append(f"NAME {vn.pattern.sub('_', model.name) or 'model'}")
    out.append("OBJSENSE")
    out.append("    MAX" if model.sense == "max" else "    MIN")
    out.append("ROWS")
    out.append(" N  obj")
    kind = {"<=": "L", ">=": "G", "=": "E"}
    for con in model.constraints:
        out.append(f" {kind[con.sense]}  {cn(con.name)}")
    out.append("COLUMNS")
    entries: dict[str, list] = {v: [] for v in model.variables}
    for v, c in model.objective.items():
        entries[v].append(("obj", c))
    for con in model.constraints:
        for v, c in con.coeffs.items():
            entries[v].append((cn(con.name), c))
    in_int = False
    marker = 0
    for v, var in model.variables.items():
        is_bin = var.kind == BINARY
        if is_bin != in_int:
            tag = "INTORG" if is_bin else "INTEND"
            out.append(f"    MARKER{marker}  'MARKER'  '{tag}'")
            marker += 1
            in_int = is_bin
        rows = entries[v] or [("obj", Fraction(0))]
        for r, c in rows:
            out.append(f"    {vn(v)}  {r}  {decimal_string(c)}")
    if in_int:
        out.append(f"    MARKER{marker}  'MARKER'  'INTEND'")
    out.append("RHS")
    if model.constant:
        out.append(f"    RHS  obj  {decimal_string(-model.constant)}")
    for con in model.constraints:
        if con.rhs:
            out.append(f"    RHS  {cn(con.name)}  {decimal_string(con.rhs)}")
    out.append("BOUNDS")
    for v, var in model.variables.items():
        name = vn(v)
        lo, hi = var.lb, var.ub
        if var.kind == BINARY:
            out.append(f" BV BND  {name}")
        elif lo is None and hi is None:
            out.append(f" FR BND  {name}")
        elif lo is not None and hi is not None and lo == hi:
            out.append(f" FX BND  {name}  {decimal_string(lo)}")
        else:
            if lo is None:
                out.append(f" MI BND  {name}")
            elif lo != 0:
                out.append(f" LO BND  {name}  {decimal_string(lo)}")
            if hi is not None:
                out.append(f" UP BND  {name}  {decimal_string(hi)}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def export_model(model: MilpModel, fmt: str, path) -> Path:
    if fmt == "lp":
        text = to_lp(model)
    elif fmt == "mps":
        text = to_mps(model)
    else:
        raise ValueError(f"unknown export format {fmt!r} (expected lp or mps)")
    path = Path(path)
    path.write_text(text)
    return path
