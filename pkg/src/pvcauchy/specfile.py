"""Reading and writing measure description files.

A file is a JSON object::

    {"components": [
        {"coef": [1, 0], "kind": "interval", "a": -1, "b": 1, "family": "arcsine", "params": {}},
        {"coef": [0, 0.5], "kind": "atom", "at": [2, 0]},
        {"coef": [1, 0], "kind": "curve", "shape": "circle", "center": [0, 0], "radius": 1,
         "density": "one"},
        {"coef": [1, 0], "kind": "area", "region": {"disk": {"center": [0, 0], "radius": 1}},
         "grid": "samples.csv"}
     ],
     "expect": "pass"}

Unknown keys anywhere are rejected.  ``expect`` marks negative controls
(``"fail"``).  Area grids are CSV files with header ``x,y,re,im`` holding
samples on a tensor grid; a relative path is taken from the spec file's
directory.  Instead of ``grid`` an area record may give a named ``density``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import constructions as cons
from .measure_model import (
    AreaDensity,
    Atom,
    ComplexMeasure,
    Curve,
    CurveDensity,
    Disk,
    IntervalDensity,
    MeasureError,
    Rect,
    make_measure,
)


class SpecError(ValueError):
    """Malformed measure description."""


TOP_KEYS = {"components", "expect", "name"}
KIND_KEYS = {
    "atom": {"at"},
    "interval": {"a", "b", "family", "params"},
    "curve": {"shape", "center", "radius", "density", "orientation"},
    "area": {"region", "grid", "density"},
}
INTERVAL_PARAMS = {
    "arcsine": set(),
    "semicircle": set(),
    "uniform": {"mass"},
    "jacobi": {"alpha", "beta", "coeffs"},
    "harmonic": {"intervals", "index"},
    "tabulated": {"x", "values", "alpha", "beta"},
}
CURVE_DENSITIES = {
    "one": lambda z: np.ones(np.shape(z), complex),
    "r": cons.r_density,
}
AREA_DENSITIES = {"one": lambda z: np.ones(np.shape(z), complex)}


@dataclass
class MeasureSpec:
    measure: ComplexMeasure
    expect: str = "pass"
    name: str = ""
    raw: dict = None


def _check_keys(rec, allowed, where):
    if not isinstance(rec, dict):
        raise SpecError(f"{where}: expected an object")
    extra = sorted(set(rec) - set(allowed))
    if extra:
        raise SpecError(f"{where}: unknown key(s) {', '.join(extra)}")


def _num(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def _pair(v, where):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise SpecError(f"{where}: expected [re, im]")
    return complex(_num(v[0], where), _num(v[1], where))


def _required(rec, key, where):
    if key not in rec:
        raise SpecError(f"{where}: missing key {key!r}")
    return rec[key]


def _interval(rec, where):
    a, b = _num(_required(rec, "a", where), where + ".a"), _num(_required(rec, "b", where), where + ".b")
    fam = _required(rec, "family", where)
    if fam not in INTERVAL_PARAMS:
        raise SpecError(f"{where}: unknown interval family {fam!r}")
    params = rec.get("params", {})
    _check_keys(params, INTERVAL_PARAMS[fam], where + ".params")
    if not a < b:
        raise SpecError(f"{where}: need a < b")
    if fam == "arcsine":
        return cons.arcsine(a, b).components[0][1]
    if fam == "semicircle":
        # same shape as the unit semicircle law, rescaled so the mass stays 1/2
        c = 4.0 / (math.pi * (b - a) ** 2)
        return IntervalDensity(a, b, cons._const(c), 0.5, 0.5, "semicircle")
    if fam == "uniform":
        mass = _num(params.get("mass", 1.0), where + ".params.mass")
        return cons.uniform(a, b, mass).components[0][1]
    if fam == "jacobi":
        al = _num(params.get("alpha", 0.0), where + ".params.alpha")
        be = _num(params.get("beta", 0.0), where + ".params.beta")
        if al <= -1 or be <= -1:
            raise SpecError(f"{where}: jacobi exponents must exceed -1")
        coeffs = params.get("coeffs", [1.0])
        if not isinstance(coeffs, list) or not coeffs:
            raise SpecError(f"{where}: coeffs must be a nonempty list")
        cs = [_pair(c, where) if isinstance(c, list) else _num(c, where) for c in coeffs]
        return cons.jacobi(a, b, al, be, cs).components[0][1]
    if fam == "tabulated":
        xs = np.asarray(_required(params, "x", where + ".params"), float)
        vals = _required(params, "values", where + ".params")
        vals = np.array([_pair(v, where) if isinstance(v, list) else _num(v, where) for v in vals])
        if xs.size != vals.size or xs.size < 2:
            raise SpecError(f"{where}: x and values must have equal length of at least 2")
        al = _num(params.get("alpha", 0.0), where + ".params.alpha")
        be = _num(params.get("beta", 0.0), where + ".params.beta")
        try:
            return cons.tabulated(a, b, xs, vals, al, be).components[0][1]
        except MeasureError as e:
            raise SpecError(f"{where}: {e}") from None
    # harmonic: rebuild the whole system and take the requested piece; the
    # normalization lives in the record's coefficient
    ivs = _required(params, "intervals", where + ".params")
    idx = _required(params, "index", where + ".params")
    try:
        spec = cons.harmonic_measure([tuple(map(float, iv)) for iv in ivs])
    except (MeasureError, TypeError, ValueError) as e:
        raise SpecError(f"{where}: {e}") from None
    if not isinstance(idx, int) or not 0 <= idx < len(spec.measure.components):
        raise SpecError(f"{where}: index out of range")
    comp = spec.measure.components[idx][1]
    if (comp.a, comp.b) != (a, b):
        raise SpecError(f"{where}: [a, b] does not match intervals[index]")
    return comp


def _curve(rec, where):
    shape = _required(rec, "shape", where)
    if shape != "circle":
        raise SpecError(f"{where}: unsupported curve shape {shape!r}")
    center = _pair(rec.get("center", [0.0, 0.0]), where + ".center")
    radius = _num(_required(rec, "radius", where), where + ".radius")
    if radius <= 0:
        raise SpecError(f"{where}: radius must be positive")
    dens = rec.get("density", "one")
    if dens not in CURVE_DENSITIES:
        raise SpecError(f"{where}: unknown curve density {dens!r}")
    orient = rec.get("orientation", 1)
    if orient not in (1, -1):
        raise SpecError(f"{where}: orientation must be 1 or -1")
    return CurveDensity(Curve.circle(center, radius), CURVE_DENSITIES[dens], orient, dens)


def _region(reg, where):
    _check_keys(reg, {"disk", "rect"}, where)
    if len(reg) != 1:
        raise SpecError(f"{where}: give exactly one of disk, rect")
    if "disk" in reg:
        d = reg["disk"]
        _check_keys(d, {"center", "radius"}, where + ".disk")
        r = _num(_required(d, "radius", where), where + ".disk.radius")
        if r <= 0:
            raise SpecError(f"{where}: radius must be positive")
        return Disk(_pair(d.get("center", [0.0, 0.0]), where + ".disk.center"), r)
    box = reg["rect"]
    if not isinstance(box, list) or len(box) != 4:
        raise SpecError(f"{where}: rect is [x0, x1, y0, y1]")
    x0, x1, y0, y1 = (_num(v, where + ".rect") for v in box)
    if not (x0 < x1 and y0 < y1):
        raise SpecError(f"{where}: empty rectangle")
    return Rect(x0, x1, y0, y1)


def read_grid(path):
    """``(xs, ys, values)`` from a CSV with header ``x,y,re,im`` on a tensor grid."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != ["x", "y", "re", "im"]:
        raise SpecError(f"{path}: header must be x,y,re,im")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], float)
    except ValueError as e:
        raise SpecError(f"{path}: {e}") from None
    if data.ndim != 2 or data.shape[1] != 4:
        raise SpecError(f"{path}: expected four columns")
    xs, ys = np.unique(data[:, 0]), np.unique(data[:, 1])
    if xs.size * ys.size != data.shape[0] or xs.size < 2 or ys.size < 2:
        raise SpecError(f"{path}: samples do not form a full tensor grid")
    vals = np.full((xs.size, ys.size), np.nan, complex)
    vals[np.searchsorted(xs, data[:, 0]), np.searchsorted(ys, data[:, 1])] = data[:, 2] + 1j * data[:, 3]
    if not np.all(np.isfinite(vals)):
        raise SpecError(f"{path}: repeated or missing grid samples")
    return xs, ys, vals


def _area(rec, where, base):
    region = _region(_required(rec, "region", where), where + ".region")
    if ("grid" in rec) == ("density" in rec):
        raise SpecError(f"{where}: give exactly one of grid, density")
    if "density" in rec:
        dens = rec["density"]
        if dens not in AREA_DENSITIES:
            raise SpecError(f"{where}: unknown area density {dens!r}")
        return AreaDensity(region, AREA_DENSITIES[dens], family=dens)
    path = Path(rec["grid"])
    if not path.is_absolute():
        path = Path(base) / path
    if not path.is_file():
        raise SpecError(f"{where}: grid file {path} not found")
    xs, ys, vals = read_grid(path)
    return AreaDensity.tabulated(region, xs, ys, vals)


def parse_spec(data, base_dir=".") -> MeasureSpec:
    """Build a measure from already-decoded spec file content."""
    _check_keys(data, TOP_KEYS, "spec")
    comps = _required(data, "components", "spec")
    if not isinstance(comps, list) or not comps:
        raise SpecError("spec: components must be a nonempty list")
    expect = data.get("expect", "pass")
    if expect not in ("pass", "fail"):
        raise SpecError("spec: expect must be 'pass' or 'fail'")
    items = []
    for i, rec in enumerate(comps):
        where = f"components[{i}]"
        if not isinstance(rec, dict):
            raise SpecError(f"{where}: expected an object")
        kind = _required(rec, "kind", where)
        if kind not in KIND_KEYS:
            raise SpecError(f"{where}: unknown kind {kind!r}")
        _check_keys(rec, KIND_KEYS[kind] | {"coef", "kind"}, where)
        coef = _pair(rec.get("coef", [1.0, 0.0]), where + ".coef")
        try:
            if kind == "atom":
                comp = Atom(_pair(_required(rec, "at", where), where + ".at"))
            elif kind == "interval":
                comp = _interval(rec, where)
            elif kind == "curve":
                comp = _curve(rec, where)
            else:
                comp = _area(rec, where, base_dir)
        except MeasureError as e:
            raise SpecError(f"{where}: {e}") from None
        items.append((coef, comp))
    return MeasureSpec(make_measure(items), expect, str(data.get("name", "")), data)


def load_spec(path) -> MeasureSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None
    return parse_spec(data, path.parent)


def dump_spec(data, path):
    """Write spec file content with a stable layout."""
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
