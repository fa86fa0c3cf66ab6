"""
Catalog of operators addressable by stable string ids.

Config files and reports refer to operators through these ids; each entry
builds a grid-function transform from a JSON-serialisable parameter dict.
Field parameters (the coefficient u, the scale field k) use small
declarative specs so experiment configs stay plain data.
"""

from __future__ import annotations

import numpy as np

from . import operators
from .bumps import DyadicPartition, standard_bump
from .fields import FieldU, ONE_VARIABLE, TWO_VARIABLE, ScaleField, constant_field
from .grid import Grid2D, GridFunction2D


def build_field(grid: Grid2D, spec) -> FieldU:
    """Field spec -> FieldU.

    Specs: a number (constant); {"kind": "constant", "value": v};
    {"kind": "cosine", "base": b, "amp": a, "periods": n} for
    b + a*cos(2 pi n x / (2X)); {"kind": "steps", "values": [...]} tiling
    blocks of rows; {"kind": "ball_capture"} for the two-variable
    adversarial recipe y / max(|x|, 1)^2.
    """
    if isinstance(spec, (int, float)):
        return constant_field(grid, float(spec))
    kind = spec["kind"]
    if kind == "constant":
        return constant_field(grid, float(spec["value"]))
    if kind == "cosine":
        b, a, n = float(spec["base"]), float(spec["amp"]), int(spec.get("periods", 1))
        vals = b + a * np.cos(2.0 * np.pi * n * grid.x / (2.0 * grid.extent_x))
        return FieldU(ONE_VARIABLE, vals)
    if kind == "steps":
        vals = np.asarray(spec["values"], dtype=float)
        block = int(np.ceil(grid.nx / len(vals)))
        rows = np.repeat(vals, block)[: grid.nx]
        return FieldU(ONE_VARIABLE, rows)
    if kind == "ball_capture":
        xx, yy = np.meshgrid(grid.x, grid.y, indexing="ij")
        safe = np.maximum(np.abs(xx), 1.0)
        return FieldU(TWO_VARIABLE, yy / (safe * safe))
    raise ValueError(f"unknown field spec kind {kind!r}")


def build_scale_field(grid: Grid2D, spec) -> ScaleField:
    """Scale-field spec -> ScaleField: an int (constant) or

    {"kind": "checker", "values": [k1, k2, ...]} cycling over cells.
    """
    if isinstance(spec, int):
        return ScaleField(np.full((grid.nx, grid.ny), spec, dtype=np.int64),
                          spec, spec)
    kind = spec["kind"]
    if kind == "constant":
        k = int(spec["value"])
        return ScaleField(np.full((grid.nx, grid.ny), k, dtype=np.int64), k, k)
    if kind == "checker":
        vals = np.asarray(spec["values"], dtype=np.int64)
        ii, jj = np.meshgrid(np.arange(grid.nx), np.arange(grid.ny), indexing="ij")
        arr = vals[(ii + jj) % len(vals)]
        return ScaleField(arr, int(vals.min()), int(vals.max()))
    raise ValueError(f"unknown scale spec kind {kind!r}")


def _common(params):
    return {
        "engine": params.get("engine", operators.AUTO),
        "scheme": params.get("scheme", "bilinear"),
        "nodes": params.get("nodes"),
    }


def _build_identity(grid, params):
    return lambda F: F


def _build_scaled_identity(grid, params):
    c = float(params.get("c", 1.0))
    return lambda F: F.copy_with(c * F.values)


def _build_pk(grid, params):
    k = int(params.get("k", 0))
    profile = standard_bump()
    return lambda F: operators.project_band(F, k, profile)


def _build_msharp(grid, params):
    u = build_field(grid, params.get("u", 1.0))
    krange = range(int(params["kmin"]), int(params["kmax"]) + 1)
    kw = _common(params)
    kw.pop("engine")
    return lambda F: operators.maximal_sharp(F, u, krange, **kw)


def _build_msmooth(grid, params):
    u = build_field(grid, params.get("u", 1.0))
    krange = range(int(params["kmin"]), int(params["kmax"]) + 1)
    profile = standard_bump()
    kw = _common(params)
    return lambda F: operators.maximal_smoothed(F, u, profile, krange, **kw)


def _build_mk(grid, params):
    u_val = float(params.get("u", 1.0))
    k = int(params.get("k", 0))
    profile = standard_bump()
    kw = _common(params)
    return lambda F: operators.single_scale_average(F, u_val, k, profile, **kw)


def _build_mlin(grid, params):
    u = build_field(grid, params.get("u", 1.0))
    kfield = build_scale_field(grid, params.get("kfield", 0))
    profile = standard_bump()
    kw = _common(params)
    return lambda F: operators.linearized_maximal(F, u, kfield, profile, **kw)


def _build_h(grid, params):
    u = build_field(grid, params.get("u", 1.0))
    eps = float(params.get("eps", 1e-3))
    R = float(params.get("R", grid.extent_x / 4.0))
    kw = _common(params)
    return lambda F: operators.hilbert_parabolic(F, u, eps, R, **kw)


def _build_tl(grid, params):
    u = build_field(grid, params.get("u", 1.0))
    l = int(params.get("l", 0))
    kernel = params.get("kernel", "abs")
    family = DyadicPartition()
    kw = _common(params)
    return lambda F: operators.dyadic_piece(F, u, l, family, kernel, **kw)


def _build_hhigh(grid, params):
    u = build_field(grid, params.get("u", 1.0))
    family = DyadicPartition()
    kw = _common(params)
    eps_scaled = float(params.get("eps_scaled", 1e-7))
    return lambda F: operators.high_frequency_part(F, u, family,
                                                   eps_scaled=eps_scaled, **kw)


CATALOG = {
    "identity": {
        "kind": "gridfunction", "build": _build_identity,
        "schema": {},
        "doc": "f -> f",
    },
    "scaled_identity": {
        "kind": "gridfunction", "build": _build_scaled_identity,
        "schema": {"c": "float scale"},
        "doc": "f -> c f",
    },
    "Pk": {
        "kind": "gridfunction", "build": _build_pk,
        "schema": {"k": "int band index"},
        "doc": "dyadic band projection in the second variable",
    },
    "Msharp": {
        "kind": "gridfunction", "build": _build_msharp,
        "schema": {"u": "field spec", "kmin": "int", "kmax": "int",
                   "scheme": "bilinear|fourier", "nodes": "int|null"},
        "doc": "sharp-window maximal average along (t, u t^2)",
    },
    "Msmooth": {
        "kind": "gridfunction", "build": _build_msmooth,
        "schema": {"u": "field spec", "kmin": "int", "kmax": "int",
                   "engine": "auto|direct|multiplier", "scheme": "str",
                   "nodes": "int|null"},
        "doc": "smoothed maximal average along (t, u t^2)",
    },
    "Mk": {
        "kind": "gridfunction", "build": _build_mk,
        "schema": {"u": "float", "k": "int", "engine": "str", "scheme": "str",
                   "nodes": "int|null"},
        "doc": "single-scale smoothed average magnitude",
    },
    "Mlin": {
        "kind": "gridfunction", "build": _build_mlin,
        "schema": {"u": "field spec", "kfield": "scale spec", "engine": "str",
                   "scheme": "str", "nodes": "int|null"},
        "doc": "linearised maximal average at per-point scales",
    },
    "H": {
        "kind": "gridfunction", "build": _build_h,
        "schema": {"u": "field spec", "eps": "float", "R": "float",
                   "engine": "str", "scheme": "str", "nodes": "int|null"},
        "doc": "truncated principal-value transform along (t, u t^2)",
    },
    "Tl": {
        "kind": "gridfunction", "build": _build_tl,
        "schema": {"u": "field spec", "l": "int", "kernel": "abs|signed",
                   "engine": "str", "scheme": "str", "nodes": "int|null"},
        "doc": "dyadic annular kernel piece in the u^{1/2}-scaled variable",
    },
    "Hhigh": {
        "kind": "gridfunction", "build": _build_hhigh,
        "schema": {"u": "field spec", "eps_scaled": "float", "engine": "str",
                   "scheme": "str", "nodes": "int|null"},
        "doc": "inner (low-cutoff) kernel piece after rescaling",
    },
    "muk": {
        "kind": "pointwise", "build": None,
        "schema": {"u": "float", "k": "int", "xi": "float", "eta": "float"},
        "doc": "oscillatory multiplier value of the single-scale average",
    },
}


def build_operator(op_id: str, params, grid: Grid2D):
    """Return a callable GridFunction2D -> GridFunction2D for the id."""
    if op_id not in CATALOG:
        raise KeyError(f"unknown operator id {op_id!r}")
    entry = CATALOG[op_id]
    if entry["kind"] != "gridfunction":
        raise ValueError(f"operator {op_id!r} is not a grid-function transform")
    fn = entry["build"](grid, dict(params or {}))

    def apply(F: GridFunction2D) -> GridFunction2D:
        out = fn(F)
        if isinstance(out, np.ndarray):
            return F.copy_with(out)
        return out

    return apply
