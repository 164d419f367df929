"""JSON run configuration: schema validation and conversion to library objects."""

import json

import jsonschema

from .errors import ConfigError
from .solvers import SolverConfig
from .synth import SyntheticSpec

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_int = {"type": "integer"}
_posint = {"type": "integer", "minimum": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lambda": {"anyOf": [_pos, {"type": "null"}]},
                "mu0": _pos,
                "rho": {"type": "number", "exclusiveMinimum": 1},
                "eps1": _pos,
                "eps2": _pos,
                "max_iters": _posint,
                "mu_cap": _pos,
                "seed": _int,
            },
        },
        "synthetic": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "h": _posint,
                "w": _posint,
                "s": _posint,
                "r": _posint,
                "rho_s": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "gaussian_sigma": {"type": "number", "minimum": 0},
                "seed": _int,
                "smoother_window": _posint,
            },
        },
        "phase": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rho_s": {"type": "array", "items": _num, "minItems": 1},
                "rank_ratio": {"type": "array", "items": _num, "minItems": 1},
                "trials": _posint,
                "threshold": _pos,
                "seed": _int,
                "solvers": {
                    "type": "array",
                    "items": {"enum": ["3dctv", "pcp"]},
                    "minItems": 1,
                    "uniqueItems": True,
                },
            },
        },
    },
}

# desk-scale phase grid: 7 x 7 cells over [0.05, 0.35]^2, 5 trials per cell
DEFAULT_AXIS = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35]
PHASE_DEFAULTS = {
    "rho_s": DEFAULT_AXIS,
    "rank_ratio": DEFAULT_AXIS,
    "trials": 5,
    "threshold": 0.05,
    "seed": 0,
    "solvers": ["3dctv", "pcp"],
}


def validate(doc):
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    return doc


def load(path=None):
    """Read and validate a config file; ``None`` gives the empty config."""
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return validate(doc)


def solver_config(doc, **overrides):
    d = dict(doc.get("solver", {}))
    if "lambda" in d:
        d["lam"] = d.pop("lambda")
    d.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SolverConfig(**d).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def synthetic_spec(doc, **overrides):
    d = dict(doc.get("synthetic", {}))
    d.update({k: v for k, v in overrides.items() if v is not None})
    spec = SyntheticSpec(**d)
    try:
        return spec.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def phase_settings(doc, **overrides):
    d = dict(PHASE_DEFAULTS)
    d.update(doc.get("phase", {}))
    d.update({k: v for k, v in overrides.items() if v is not None})
    return d
