"""TOML problem definitions.

A config has up to six sections: ``[system]``, ``[phi]``, ``[solve]``,
``[verify]``, ``[bounds]`` and ``[pbvs]``.  :func:`parse_config` normalizes
every section (filling defaults, coercing numbers) so that
``parse(serialize(parse(text))) == parse(text)``.
"""
from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .applications import CoupledLowerUpperSolution, PBVSProblem
from .core import ComparisonFunction, MetricProfile, MonotoneSignature, PartiallyMonotoneSystem, ProductPoint
from .errors import ConfigError, StructuralError
from .registry import affine_operators, polynomial_operators, registry_forcing, registry_operators
from .solver import SolveConfig

SECTIONS = ("system", "phi", "solve", "verify", "bounds", "pbvs")


def _number(value, field_name, *, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field_name)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", field_name)
    if positive and value <= 0:
        raise ConfigError(f"must be > 0, got {value!r}", field_name)
    if nonneg and value < 0:
        raise ConfigError(f"must be >= 0, got {value!r}", field_name)
    return value


def _integer(value, field_name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", field_name)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", field_name)
    return value


def _vectors(value, field_name):
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of component vectors", field_name)
    out = []
    for k, comp in enumerate(value):
        comp = comp if isinstance(comp, list) else [comp]
        out.append([_number(v, f"{field_name}[{k}]") for v in comp])
    return out


def _interval(value, field_name):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("expected [low, high]", field_name)
    lo, hi = (_number(v, field_name) for v in value)
    if hi <= lo:
        raise ConfigError(f"empty interval [{lo}, {hi}]", field_name)
    return [lo, hi]


def _require(section, key, name):
    if key not in section:
        raise ConfigError("missing required field", f"{name}.{key}")
    return section[key]


def _unknown_keys(section, allowed, name):
    extra = sorted(set(section) - set(allowed))
    if extra:
        raise ConfigError(f"unknown field(s) {', '.join(extra)}", name)


def _normalize_system(raw):
    _unknown_keys(raw, {"signature", "dims", "metric", "operator", "box", "params", "affine", "polynomial"}, "system")
    rows = _require(raw, "signature", "system")
    if not isinstance(rows, list) or not all(isinstance(r, str) for r in rows):
        raise ConfigError("expected a list of strings such as ['+-', '-+']", "system.signature")
    try:
        sig = MonotoneSignature.from_strings(rows)
    except StructuralError as exc:
        raise ConfigError(str(exc), "system.signature") from None
    n = sig.n
    dims = raw.get("dims", [1] * n)
    if not isinstance(dims, list) or len(dims) != n:
        raise ConfigError(f"expected {n} component lengths", "system.dims")
    dims = [_integer(d, "system.dims", minimum=1) for d in dims]
    metric = raw.get("metric", "sup")
    if metric not in ("sup", "euclidean"):
        raise ConfigError(f"expected 'sup' or 'euclidean', got {metric!r}", "system.metric")
    operator = _require(raw, "operator", "system")
    if not isinstance(operator, str):
        raise ConfigError("expected a name", "system.operator")
    out = {"signature": sig.to_strings(), "dims": dims, "metric": metric, "operator": operator}
    if "box" in raw:
        box = raw["box"]
        if not isinstance(box, list) or len(box) != n:
            raise ConfigError(f"expected {n} intervals", "system.box")
        out["box"] = [_interval(b, f"system.box[{j}]") for j, b in enumerate(box)]
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("expected a table", "system.params")
    out["params"] = {k: _number(v, f"system.params.{k}") for k, v in sorted(params.items())}
    if operator == "affine":
        aff = _require(raw, "affine", "system")
        total = sum(dims)
        matrix = _require(aff, "matrix", "system.affine")
        if not isinstance(matrix, list) or len(matrix) != total:
            raise ConfigError(f"expected {total} rows", "system.affine.matrix")
        matrix = [[_number(v, "system.affine.matrix") for v in row] for row in _vectors(matrix, "system.affine.matrix")]
        if any(len(row) != total for row in matrix):
            raise ConfigError(f"expected {total} columns", "system.affine.matrix")
        offset = aff.get("offset", [0.0] * total)
        offset = [_number(v, "system.affine.offset") for v in offset]
        if len(offset) != total:
            raise ConfigError(f"expected {total} entries", "system.affine.offset")
        out["affine"] = {"matrix": matrix, "offset": offset}
    elif operator == "polynomial":
        poly = _require(raw, "polynomial", "system")
        constant = [_number(v, "system.polynomial.constant") for v in _require(poly, "constant", "system.polynomial")]
        coeffs = _require(poly, "coefficients", "system.polynomial")
        if not isinstance(coeffs, list) or len(coeffs) != n or any(not isinstance(r, list) or len(r) != n for r in coeffs):
            raise ConfigError(f"expected an {n}x{n} table of coefficient lists", "system.polynomial.coefficients")
        coeffs = [[[_number(a, "system.polynomial.coefficients") for a in (c if isinstance(c, list) else [c])]
                   for c in row] for row in coeffs]
        out["polynomial"] = {"constant": constant, "coefficients": coeffs}
    return out


def _normalize_phi(raw):
    _unknown_keys(raw, {"kind", "alpha"}, "phi")
    kind = _require(raw, "kind", "phi")
    if kind == "linear":
        alpha = _number(_require(raw, "alpha", "phi"), "phi.alpha", nonneg=True)
        if alpha >= 1:
            raise ConfigError(f"must be < 1, got {alpha}", "phi.alpha")
        return {"kind": kind, "alpha": alpha}
    if kind in ("log", "rational"):
        return {"kind": kind}
    raise ConfigError(f"expected linear, log or rational, got {kind!r}", "phi.kind")


def _normalize_solve(raw):
    _unknown_keys(raw, {"tolerance", "max_iterations", "start_u", "start_v"}, "solve")
    out = {
        "tolerance": _number(raw.get("tolerance", 1e-10), "solve.tolerance", positive=True),
        "max_iterations": _integer(raw.get("max_iterations", 10_000), "solve.max_iterations", minimum=1),
    }
    for key in ("start_u", "start_v"):
        if key in raw:
            out[key] = _vectors(raw[key], f"solve.{key}")
    return out


def _normalize_verify(raw):
    _unknown_keys(raw, {"samples", "seed"}, "verify")
    return {
        "samples": _integer(raw.get("samples", 1000), "verify.samples", minimum=1),
        "seed": _integer(raw.get("seed", 0), "verify.seed", minimum=0),
    }


def _normalize_bounds(raw):
    _unknown_keys(raw, {"lower", "upper"}, "bounds")
    return {key: _vectors(_require(raw, key, "bounds"), f"bounds.{key}") for key in ("lower", "upper")}


def _normalize_pbvs(raw):
    _unknown_keys(raw, {"f", "lambda", "period", "grid_size", "box", "params", "bounds"}, "pbvs")
    f = _require(raw, "f", "pbvs")
    if not isinstance(f, str):
        raise ConfigError("expected a registry name", "pbvs.f")
    out = {
        "f": f,
        "lambda": _number(_require(raw, "lambda", "pbvs"), "pbvs.lambda", positive=True),
        "period": _number(raw.get("period", 1.0), "pbvs.period", positive=True),
        "grid_size": _integer(raw.get("grid_size", 129), "pbvs.grid_size", minimum=3),
    }
    if "box" in raw:
        out["box"] = _interval(raw["box"], "pbvs.box")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("expected a table", "pbvs.params")
    out["params"] = {k: _number(v, f"pbvs.params.{k}") for k, v in sorted(params.items())}
    if "bounds" in raw:
        b = raw["bounds"]
        _unknown_keys(b, set("xyzuvw"), "pbvs.bounds")
        out["bounds"] = {k: _number(_require(b, k, "pbvs.bounds"), f"pbvs.bounds.{k}") for k in "xyzuvw"}
    return out


_NORMALIZERS = {
    "system": _normalize_system,
    "phi": _normalize_phi,
    "solve": _normalize_solve,
    "verify": _normalize_verify,
    "bounds": _normalize_bounds,
    "pbvs": _normalize_pbvs,
}


@dataclass
class ProblemConfig:
    """Normalized configuration; each attribute is a plain dict or None."""

    system: dict | None = None
    phi: dict | None = None
    solve: dict | None = None
    verify: dict | None = None
    bounds: dict | None = None
    pbvs: dict | None = None
    source: str = field(default="<memory>", compare=False)

    @classmethod
    def from_dict(cls, data: dict, source: str = "<memory>") -> "ProblemConfig":
        if not isinstance(data, dict):
            raise ConfigError("top level must be a table")
        unknown = sorted(set(data) - set(SECTIONS))
        if unknown:
            raise ConfigError(f"unknown section(s) {', '.join(unknown)}")
        sections = {}
        for name in SECTIONS:
            if name in data:
                if not isinstance(data[name], dict):
                    raise ConfigError("expected a table", name)
                sections[name] = _NORMALIZERS[name](data[name])
        return cls(**sections, source=source)

    def to_dict(self) -> dict:
        return {name: copy.deepcopy(getattr(self, name)) for name in SECTIONS if getattr(self, name) is not None}

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def require(self, name: str) -> dict:
        section = getattr(self, name)
        if section is None:
            raise ConfigError("missing section", name)
        return section


def parse_config(text: str, source: str = "<memory>") -> ProblemConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    return ProblemConfig.from_dict(data, source)


def load_config(path) -> ProblemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


# --- builders ------------------------------------------------------------------------------


def build_system(cfg: ProblemConfig) -> PartiallyMonotoneSystem:
    s = cfg.require("system")
    dims = tuple(s["dims"])
    if s["operator"] == "affine":
        ops = affine_operators(s["affine"]["matrix"], s["affine"]["offset"], dims)
    elif s["operator"] == "polynomial":
        ops = polynomial_operators(s["polynomial"]["constant"], s["polynomial"]["coefficients"], dims)
    else:
        ops = registry_operators(s["operator"], dims, s["params"])
    if len(ops) != len(dims):
        raise ConfigError(f"operator {s['operator']!r} defines {len(ops)} components, signature has {len(dims)}",
                          "system.operator")
    box = tuple(tuple(b) for b in s["box"]) if "box" in s else None
    return PartiallyMonotoneSystem(
        signature=MonotoneSignature.from_strings(s["signature"]),
        operators=ops,
        dims=dims,
        metric=MetricProfile.uniform(len(dims), s["metric"]),
        box=box,
        name=s["operator"],
    )


def build_phi(cfg: ProblemConfig) -> ComparisonFunction | None:
    if cfg.phi is None:
        return None
    if cfg.phi["kind"] == "linear":
        return ComparisonFunction.linear(cfg.phi["alpha"])
    return ComparisonFunction.log() if cfg.phi["kind"] == "log" else ComparisonFunction.rational()


def build_solve_config(cfg: ProblemConfig, tolerance=None, max_iterations=None, phi=None) -> SolveConfig:
    s = cfg.solve or _normalize_solve({})
    return SolveConfig(
        tolerance=s["tolerance"] if tolerance is None else tolerance,
        max_iterations=s["max_iterations"] if max_iterations is None else max_iterations,
        phi=phi if phi is not None else build_phi(cfg),
    )


def _point(rows, dims, field_name) -> ProductPoint:
    p = ProductPoint(rows)
    if p.dims != tuple(dims):
        raise ConfigError(f"component lengths {p.dims} do not match dims {tuple(dims)}", field_name)
    return p


def start_points(cfg: ProblemConfig, system: PartiallyMonotoneSystem) -> tuple[ProductPoint, ProductPoint]:
    s = cfg.solve or {}
    zero = ProductPoint([0.0] * m for m in system.dims)
    u = _point(s["start_u"], system.dims, "solve.start_u") if "start_u" in s else zero
    v = _point(s["start_v"], system.dims, "solve.start_v") if "start_v" in s else u
    return u, v


def bound_points(cfg: ProblemConfig, system: PartiallyMonotoneSystem) -> tuple[ProductPoint, ProductPoint] | None:
    if cfg.bounds is None:
        return None
    return (_point(cfg.bounds["lower"], system.dims, "bounds.lower"),
            _point(cfg.bounds["upper"], system.dims, "bounds.upper"))


def build_pbvs(cfg: ProblemConfig) -> tuple[PBVSProblem, CoupledLowerUpperSolution | None]:
    p = cfg.require("pbvs")
    f, registered_phi = registry_forcing(p["f"], p["params"], p["lambda"], p["period"])
    problem = PBVSProblem(
        f=f, lam=p["lambda"], period=p["period"], phi=build_phi(cfg) or registered_phi,
        grid_size=p["grid_size"], box=tuple(p["box"]) if "box" in p else None, name=p["f"],
    )
    bounds = None
    if "bounds" in p:
        b = p["bounds"]
        bounds = CoupledLowerUpperSolution.constant(p["grid_size"], *(b[k] for k in "xyzuvw"))
    return problem, bounds
