"""Run-configuration schema and builders.

One JSON document configures every CLI command; unknown keys are errors at
every level, and violations are reported with their JSON paths.  The schema
is published in ``docs/config.schema.json`` and embedded here as the single
source of truth.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .coefficients import (
    CoefficientModel,
    ConstantCoefficient,
    ExponentialEnvelope,
    TabulatedCoefficient,
)
from .errors import ConfigError
from .integrate import IntegratorOptions
from .riccati import PhysicalParams
from .simulate import Blob, ScenarioConfig, example_config
from .spectral import Grid

__all__ = [
    "CONFIG_SCHEMA",
    "load_config",
    "validate_config",
    "integrator_options",
    "physical_params",
    "coefficient_model",
    "scenario_config",
]

_NUMBER = {"type": "number"}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "epriccati run configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": _POSITIVE,
                "abs_tol": _POSITIVE,
                "dt_init": _POSITIVE,
                "dt_min": _POSITIVE,
                "dt_max": _POSITIVE,
                "blowup_magnitude": _POSITIVE,
                "t_end": _POSITIVE,
            },
        },
        "physics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "k": {"type": "number", "not": {"const": 0}},
                "c_b": {"type": "number", "minimum": 0},
            },
        },
        "coefficient": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {
                    "type": "string",
                    "enum": ["constant", "exponential_envelope", "tabulated"],
                },
                "value": _NUMBER,
                "alpha": _POSITIVE,
                "beta": _POSITIVE,
                "times": {"type": "array", "items": _NUMBER, "minItems": 2},
                "values": {"type": "array", "items": _NUMBER, "minItems": 2},
                "upper_clamp": _NUMBER,
            },
            "required": ["kind"],
            "allOf": [
                {
                    "if": {"properties": {"kind": {"const": "constant"}}},
                    "then": {"required": ["value"]},
                },
                {
                    "if": {"properties": {"kind": {"const": "tabulated"}}},
                    "then": {"required": ["times", "values"]},
                },
            ],
        },
        "ode": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"rho0": {"type": "number", "minimum": 0}, "d0": _NUMBER},
            "required": ["rho0", "d0"],
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rho_min": _NUMBER,
                "rho_max": _NUMBER,
                "rho_count": {"type": "integer", "minimum": 2},
                "d_min": _NUMBER,
                "d_max": _NUMBER,
                "d_count": {"type": "integer", "minimum": 2},
            },
            "required": ["rho_min", "rho_max", "rho_count", "d_min", "d_max", "d_count"],
        },
        "pde": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "example": {"type": "string", "enum": ["5.1", "5.2", "5.3", "custom"]},
                "N": {"type": "integer", "minimum": 16},
                "L": _POSITIVE,
                "t_end": _POSITIVE,
                "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "dt_max": _POSITIVE,
                "norm_cadence": _POSITIVE,
                "snapshot_times": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "history_stride": {"type": "integer", "minimum": 1},
                "k": {"type": "number", "not": {"const": 0}},
                "c_b": {"type": "number", "minimum": 0},
                "blobs": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "kind": {"type": "string", "enum": ["gaussian", "sech"]},
                            "amplitude": _POSITIVE,
                            "center": {
                                "type": "array",
                                "items": _NUMBER,
                                "minItems": 2,
                                "maxItems": 2,
                            },
                            "rate": _POSITIVE,
                        },
                        "required": ["kind", "amplitude"],
                    },
                },
            },
        },
        "trace": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "x0": {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2}
            },
            "required": ["x0"],
        },
        "certify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"t_verify": _POSITIVE},
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(CONFIG_SCHEMA)


def validate_config(doc: dict) -> None:
    """Raise :class:`ConfigError` listing every schema violation with its JSON path."""
    problems = [
        f"at {err.json_path}: {err.message}"
        for err in sorted(_VALIDATOR.iter_errors(doc), key=lambda e: e.json_path)
    ]
    if problems:
        raise ConfigError(problems)


def load_config(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([f"at $: invalid JSON ({exc})"]) from exc
    if not isinstance(doc, dict):
        raise ConfigError(["at $: top level must be an object"])
    validate_config(doc)
    return doc


def integrator_options(doc: dict) -> IntegratorOptions:
    return IntegratorOptions(**doc.get("integrator", {}))


def physical_params(doc: dict) -> PhysicalParams:
    return PhysicalParams(**doc.get("physics", {}))


def coefficient_model(doc: dict) -> CoefficientModel:
    """Coefficient from config; defaults to the unit exponential envelope."""
    section = doc.get("coefficient")
    if section is None:
        return ExponentialEnvelope(1.0, 1.0)
    kind = section["kind"]
    clamp = section.get("upper_clamp")
    if kind == "constant":
        return ConstantCoefficient(section["value"], upper_clamp=clamp)
    if kind == "exponential_envelope":
        return ExponentialEnvelope(
            section.get("alpha", 1.0), section.get("beta", 1.0), upper_clamp=clamp
        )
    return TabulatedCoefficient(section["times"], section["values"], upper_clamp=clamp)


def scenario_config(doc: dict, store_history: bool = False) -> ScenarioConfig:
    """PDE scenario from the ``pde`` section (built-in example or custom blobs)."""
    section = dict(doc.get("pde", {}))
    example = section.pop("example", "5.1")
    grid_kwargs = {}
    if "N" in section:
        grid_kwargs["N"] = section.pop("N")
    if "L" in section:
        grid_kwargs["L"] = section.pop("L")

    overrides = {}
    for key in ("t_end", "cfl", "dt_max", "norm_cadence", "history_stride"):
        if key in section:
            overrides[key] = section.pop(key)
    if "snapshot_times" in section:
        overrides["snapshot_times"] = tuple(section.pop("snapshot_times"))
    if store_history:
        overrides["store_history"] = True

    k = section.pop("k", None)
    c_b = section.pop("c_b", None)
    blobs = section.pop("blobs", None)

    if example == "custom":
        if blobs is None:
            raise ConfigError(["at $.pde.blobs: required when example is 'custom'"])
        params = PhysicalParams(
            k=k if k is not None else -1.0, c_b=c_b if c_b is not None else 0.0
        )
        base = ScenarioConfig(
            params=params,
            blobs=tuple(
                Blob(
                    kind=b["kind"],
                    amplitude=b["amplitude"],
                    center=tuple(b.get("center", (0.0, 0.0))),
                    rate=b.get("rate", 1.0),
                )
                for b in blobs
            ),
        )
    else:
        if blobs is not None or k is not None or c_b is not None:
            raise ConfigError(
                ["at $.pde: k/c_b/blobs may only be set when example is 'custom'"]
            )
        base = example_config(example)

    if grid_kwargs:
        grid = Grid(**{"N": base.grid.N, "L": base.grid.L, **grid_kwargs})
        overrides["grid"] = grid
    from dataclasses import replace

    return replace(base, **overrides) if overrides else base
