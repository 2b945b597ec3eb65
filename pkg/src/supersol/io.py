"""Deterministic JSON, CSV, binary and SVG writers."""

import enum
import math
from pathlib import Path

import numpy as np

from .bounds import BoundCurve, Saturated
from .oracle.grid import GridFunction
from .profiles import RadialProfile


def fmt_float(x: float) -> str:
    """17 significant digits; integral values keep no trailing zeros."""
    return format(float(x), ".17g")


def _json_scalar(v):
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return '"nan"'
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        s = fmt_float(v)
        if "e" not in s and "." not in s:
            s += ".0"
        return s
    if isinstance(v, enum.Enum):
        return _json_str(str(v.value))
    if isinstance(v, str):
        return _json_str(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _json_str(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and 17-digit floats; non-finite floats become strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json_str(str(k))}: {dumps_json(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{dumps_json(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _json_scalar(obj)


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_json(path, obj):
    write_text(path, dumps_json(obj) + "\n")


# grid functions

def write_grid_csv(path, g: GridFunction):
    lo, hi = g.box
    header = f"# N={g.N} h={fmt_float(g.h)} box={','.join(map(fmt_float, lo))};{','.join(map(fmt_float, hi))} shape={','.join(map(str, g.samples.shape))}"
    pts = g.coords().reshape(-1, g.N)
    vals = g.samples.ravel()
    lines = [header] + [",".join(fmt_float(c) for c in p) + "," + fmt_float(v) for p, v in zip(pts, vals)]
    write_text(path, "\n".join(lines) + "\n")


def read_grid_csv(path) -> GridFunction:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().lstrip("#").split()
        meta = dict(item.split("=", 1) for item in header)
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    N = int(meta["N"])
    shape = tuple(int(s) for s in meta["shape"].split(","))
    lo = np.array([float(v) for v in meta["box"].split(";")[0].split(",")])
    return GridFunction(lo, float(meta["h"]), data[:, N].reshape(shape))


def write_grid_npz(path, g: GridFunction):
    lo, hi = g.box
    np.savez(path, N=g.N, h=g.h, lo=lo, hi=hi, samples=g.samples)


def read_grid_npz(path) -> GridFunction:
    with np.load(path) as z:
        return GridFunction(z["lo"], float(z["h"]), z["samples"])


# radial profiles and bound curves

def write_profile_csv(path, prof: RadialProfile):
    lines = ["r,value,derivative"] + [
        f"{fmt_float(r)},{fmt_float(v)},{fmt_float(d)}" for r, v, d in zip(prof.radii, prof.values, prof.derivatives)
    ]
    write_text(path, "\n".join(lines) + "\n")


def read_profile_csv(path) -> RadialProfile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return RadialProfile(data[:, 0], data[:, 1], data[:, 2])


def bound_rows(curve: BoundCurve):
    rows = []
    for r, v in zip(curve.radii, curve.values):
        if isinstance(v, Saturated):
            rows.append((float(r), math.nan, True))
        else:
            rows.append((float(r), float(v), False))
    return rows


def write_bound_csv(path, curve: BoundCurve):
    lines = ["r,bound,saturated"]
    for r, v, sat in bound_rows(curve):
        lines.append(f"{fmt_float(r)},{'nan' if sat else fmt_float(v)},{int(sat)}")
    write_text(path, "\n".join(lines) + "\n")


def bound_curve_svg(curve: BoundCurve, width: int = 480, height: int = 320, margin: int = 40) -> str:
    """Polyline of the finite bound values over r, with two axes."""
    pts = [(r, v) for r, v, sat in bound_rows(curve) if not sat and math.isfinite(v)]
    w, h = width - 2 * margin, height - 2 * margin
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
    ]
    if pts:
        rs = [p[0] for p in pts]
        vs = [p[1] for p in pts]
        r0, r1 = min(rs), max(rs)
        v0, v1 = min(0.0, min(vs)), max(vs)
        sr = w / (r1 - r0) if r1 > r0 else 0.0
        sv = h / (v1 - v0) if v1 > v0 else 0.0
        coords = " ".join(f"{margin + (r - r0) * sr:.3f},{height - margin - (v - v0) * sv:.3f}" for r, v in pts)
        lines.append(f'<polyline points="{coords}" fill="none" stroke="steelblue" stroke-width="2"/>')
        lines.append(f'<text x="{margin}" y="{height - margin / 3}" font-size="12">r: {fmt_float(r0)} .. {fmt_float(r1)}</text>')
        lines.append(f'<text x="4" y="{margin / 2}" font-size="12">{curve.kind}: {fmt_float(v0)} .. {fmt_float(v1)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
