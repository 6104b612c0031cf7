"""JSON (de)serialization for matrices, chaos expansions, and CLI configs.

Matrices and vectors travel as nested lists of numbers in row-major
order.  A chaos expansion becomes a list of ``{"degree": n, "terms":
[{"coeff": c, "base": [[...]]}, ...]}`` entries.  Config loading reports
missing or malformed entries by field name via :class:`ConfigError`.
"""

from __future__ import annotations

import json

import numpy as np

from .chaos import ChaosExpansion
from .closure import ClosureSpec, MaterialParams, MomentGrid
from .core import Covariance
from .wick import RankOnePower, SymKernel

__all__ = [
    "ConfigError",
    "load_document",
    "save_document",
    "matrix_to_lists",
    "matrix_from_lists",
    "expansion_to_jsonable",
    "expansion_from_jsonable",
    "load_condexp_config",
    "load_closure_config",
]


class ConfigError(Exception):
    """Config problem attributable to one named field."""

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"field '{field}': {message}")


def load_document(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config", "top-level document must be an object")
    return doc


def save_document(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def matrix_to_lists(arr) -> list:
    return np.asarray(arr, dtype=float).tolist()


def matrix_from_lists(data, field: str, ndim: int = 2) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(field, "must be a (nested) array of numbers") from None
    if arr.ndim != ndim:
        raise ConfigError(field, f"must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(field, "contains non-finite values")
    return arr


def expansion_to_jsonable(expansion: ChaosExpansion) -> list:
    out = []
    for n in expansion.degrees:
        kernel = expansion.kernels[n]
        out.append(
            {
                "degree": n,
                "terms": [
                    {"coeff": t.coeff, "base": matrix_to_lists(t.base)}
                    for t in kernel.terms
                ],
            }
        )
    return out


def expansion_from_jsonable(data, field: str = "expansion") -> ChaosExpansion:
    if not isinstance(data, list):
        raise ConfigError(field, "must be a list of {degree, terms} objects")
    kernels: dict[int, SymKernel] = {}
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or "degree" not in entry or "terms" not in entry:
            raise ConfigError(f"{field}[{i}]", "must be an object with degree and terms")
        degree = entry["degree"]
        if not isinstance(degree, int) or degree < 0:
            raise ConfigError(f"{field}[{i}].degree", "must be a non-negative integer")
        if degree in kernels:
            raise ConfigError(f"{field}[{i}].degree", f"duplicate degree {degree}")
        terms = []
        for j, term in enumerate(entry["terms"]):
            if not isinstance(term, dict) or "coeff" not in term or "base" not in term:
                raise ConfigError(
                    f"{field}[{i}].terms[{j}]", "must be an object with coeff and base"
                )
            base = matrix_from_lists(term["base"], f"{field}[{i}].terms[{j}].base")
            terms.append(RankOnePower(float(term["coeff"]), base, degree))
        kernels[degree] = SymKernel(degree=degree, terms=tuple(terms))
    return ChaosExpansion(kernels=kernels)


def _require(doc: dict, field: str):
    if field not in doc:
        raise ConfigError(field, "missing")
    return doc[field]


def _number(doc: dict, field: str, default=None) -> float:
    if field not in doc:
        if default is None:
            raise ConfigError(field, "missing")
        return default
    value = doc[field]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(field, f"must be a number, got {value!r}")
    return float(value)


def _positive_int(doc: dict, field: str, default=None) -> int:
    if field not in doc:
        if default is None:
            raise ConfigError(field, "missing")
        return default
    value = doc[field]
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        raise ConfigError(field, f"must be a positive integer, got {value!r}")
    return value


def load_condexp_config(doc: dict) -> tuple[Covariance, np.ndarray, list[np.ndarray]]:
    """Read {A, f, conditioning} for the conditional-expectation command."""
    a = matrix_from_lists(_require(doc, "A"), "A")
    try:
        cov = Covariance(a)
    except ValueError as exc:
        raise ConfigError("A", str(exc)) from None
    f = matrix_from_lists(_require(doc, "f"), "f")
    if f.shape[1] != cov.dim:
        raise ConfigError("f", f"must have {cov.dim} columns to match A, got {f.shape[1]}")
    cond_raw = _require(doc, "conditioning")
    if not isinstance(cond_raw, list) or not cond_raw:
        raise ConfigError("conditioning", "must be a non-empty list of vectors")
    conditioning = []
    for i, vec in enumerate(cond_raw):
        v = matrix_from_lists(vec, f"conditioning[{i}]", ndim=1)
        if v.shape[0] != cov.dim:
            raise ConfigError(
                f"conditioning[{i}]", f"must have length {cov.dim} to match A"
            )
        conditioning.append(v)
    return cov, f, conditioning


def load_closure_config(doc: dict) -> dict:
    """Read the moment-solver config document.

    Returns a dict with keys params, spec, initial, t_final, dt, cfl,
    output_stride (dt may be None, meaning the CFL-stable default).
    """
    a = _number(doc, "a")
    b = _number(doc, "b")
    if not b > a:
        raise ConfigError("b", f"domain ({a}, {b}) is empty")
    cells = _positive_int(doc, "J")
    order = _require(doc, "N")
    if not isinstance(order, int) or isinstance(order, bool) or order < 0:
        raise ConfigError("N", f"must be a non-negative integer, got {order!r}")
    t_final = _number(doc, "T")
    if t_final <= 0:
        raise ConfigError("T", "must be positive")
    dt = doc.get("dt")
    if dt is not None:
        dt = _number(doc, "dt")
        if dt <= 0:
            raise ConfigError("dt", "must be positive")
    cfl = _number(doc, "cfl", default=0.9)
    if cfl <= 0:
        raise ConfigError("cfl", "must be positive")
    output_stride = _positive_int(doc, "output_stride", default=1)

    closure_doc = _require(doc, "closure")
    if not isinstance(closure_doc, dict) or "kind" not in closure_doc:
        raise ConfigError("closure", "must be an object with a 'kind' entry")
    kind = closure_doc["kind"]
    try:
        if kind == "optimal_prediction":
            corr = matrix_from_lists(_require(closure_doc, "A"), "closure.A")
            spec = ClosureSpec(kind=kind, correlation=corr)
        else:
            spec = ClosureSpec(kind=kind)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("closure", str(exc)) from None

    def cell_field(name: str) -> np.ndarray:
        value = _require(doc, name)
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 0:
            return np.full(cells, float(arr))
        if arr.ndim != 1 or arr.shape[0] != cells:
            raise ConfigError(name, f"must be a number or a length-{cells} array")
        return arr

    sigma = cell_field("sigma")
    kappa = cell_field("kappa")
    source = cell_field("q")
    try:
        params = MaterialParams(
            a=a, b=b, cells=cells, sigma=sigma, kappa=kappa, source=source
        )
    except ValueError as exc:
        raise ConfigError("sigma", str(exc)) from None

    init_raw = _require(doc, "initial")
    if not isinstance(init_raw, list) or len(init_raw) != order + 1:
        raise ConfigError("initial", f"must be a list of {order + 1} moment entries")
    columns = []
    for k, entry in enumerate(init_raw):
        arr = np.asarray(entry, dtype=float)
        if arr.ndim == 0:
            arr = np.full(cells, float(arr))
        if arr.shape != (cells,):
            raise ConfigError(
                f"initial[{k}]", f"must be a number or a length-{cells} array"
            )
        columns.append(arr)
    initial = MomentGrid(t=0.0, values=np.stack(columns, axis=1))

    return {
        "params": params,
        "spec": spec,
        "initial": initial,
        "t_final": t_final,
        "dt": dt,
        "cfl": cfl,
        "output_stride": output_stride,
    }
