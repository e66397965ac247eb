"""JSON run configuration: schema, defaults and object construction.

A config is a single JSON object; unknown keys are rejected. Lengths are in
meters and angles in radians. Example::

    {
      "geometry": {"spacing": 5e-6, "wavelength": 5e-7},
      "polarizers": ["sigma_plus", "sigma_plus", "sigma_minus", "sigma_minus"],
      "perturbation": {"lateral_sigma": 5e-9, "angular_halfwidth": 0.005235987755982988},
      "num_samples": 100000,
      "seed": 2008
    }
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .analysis import SCAN_AXES, MonteCarloSetup
from .detection import Engine, Interpretation
from .errors import ConfigError
from .geometry import ChainGeometry, DetectorSpec, Distribution, PerturbationSpec, dicke_detectors
from .state import DickeTarget, EmissionModel, Polarizer

_KINDS = [d.value for d in Distribution]
_AMPLITUDE = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["geometry", "polarizers"],
    "properties": {
        "num_emitters": {"type": "integer", "minimum": 1},
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "required": ["spacing"],
            "properties": {
                "spacing": {"type": "number", "exclusiveMinimum": 0},
                "wavelength": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "detectors": {
            "type": "object",
            "additionalProperties": False,
            "required": ["placement"],
            "properties": {
                "placement": {"enum": ["dicke", "angles", "phases"]},
                "angles": {"type": "array", "items": {"type": "number"}},
                "phases": {"type": "array", "items": {"type": "number"}},
            },
        },
        "polarizers": {
            "type": "array",
            "minItems": 1,
            "items": {"enum": [p.value for p in Polarizer]},
        },
        "emission": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"c0": _AMPLITUDE, "c1": _AMPLITUDE},
        },
        "perturbation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lateral_sigma": {"type": "number", "minimum": 0},
                "axial_sigma": {"type": "number", "minimum": 0},
                "angular_halfwidth": {"type": "number", "minimum": 0},
                "lateral_kind": {"enum": _KINDS},
                "axial_kind": {"enum": _KINDS},
                "angular_kind": {"enum": _KINDS},
            },
        },
        "target": {
            "type": "object",
            "additionalProperties": False,
            "required": ["num_qubits", "two_m"],
            "properties": {
                "num_qubits": {"type": "integer", "minimum": 1},
                "two_m": {"type": "integer"},
            },
        },
        "num_samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "interpretation": {"enum": [i.value for i in Interpretation]},
        "engine": {"enum": [e.value for e in Engine]},
        "scan": {
            "type": "object",
            "additionalProperties": False,
            "required": ["axis", "values"],
            "properties": {
                "axis": {"enum": list(SCAN_AXES)},
                "values": {"type": "array", "minItems": 1, "items": {"type": "number"}},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
    },
}

DEFAULTS = {
    "geometry": {"wavelength": 500e-9},
    "detectors": {"placement": "dicke"},
    "emission": {"c0": 1 / math.sqrt(2), "c1": 1 / math.sqrt(2)},
    "perturbation": {
        "lateral_sigma": 0.0,
        "axial_sigma": 0.0,
        "angular_halfwidth": 0.0,
        "lateral_kind": "gaussian",
        "axial_kind": "gaussian",
        "angular_kind": "uniform",
    },
    "num_samples": 10_000,
    "seed": 0,
    "interpretation": Interpretation.ATOMIC_QUBITS.value,
    "engine": Engine.SEQUENTIAL.value,
    "output": {"dir": "out"},
}


def _amplitude(value) -> complex:
    return complex(value) if isinstance(value, (int, float)) else complex(value[0], value[1])


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration with every default filled in."""

    raw: dict

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        try:
            jsonschema.validate(data, SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"{where}: {exc.message}") from None
        full = copy.deepcopy(data)
        for key, default in DEFAULTS.items():
            if isinstance(default, dict):
                full[key] = default | full.get(key, {})
            else:
                full.setdefault(key, default)
        n_pol = len(full["polarizers"])
        full.setdefault("num_emitters", n_pol)
        if full["num_emitters"] != n_pol:
            raise ConfigError("num_emitters must equal the number of polarizers")
        det = full["detectors"]
        key = det["placement"]
        if key != "dicke" and len(det.get(key, [])) != n_pol:
            raise ConfigError(f"detectors/{key} needs one entry per polarizer")
        return cls(full)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(data)

    def with_overrides(self, seed=None, samples=None, engine=None, out=None) -> "RunConfig":
        data = copy.deepcopy(self.raw)
        if seed is not None:
            data["seed"] = seed
        if samples is not None:
            data["num_samples"] = samples
        if engine is not None:
            data["engine"] = engine
        if out is not None:
            data["output"] = {"dir": str(out)}
        return RunConfig.from_dict(data)

    def echo(self) -> dict:
        """Config record that re-validates and reproduces the run.

        The output directory is left out so the echo, and with it the
        report body, does not depend on where results are written.
        """
        data = copy.deepcopy(self.raw)
        data.pop("output", None)
        return data

    @property
    def num_emitters(self) -> int:
        return self.raw["num_emitters"]

    @property
    def polarizers(self) -> tuple[Polarizer, ...]:
        return tuple(Polarizer(p) for p in self.raw["polarizers"])

    @property
    def out_dir(self) -> Path:
        return Path(self.raw["output"]["dir"])

    @property
    def engine(self) -> Engine:
        return Engine(self.raw["engine"])

    @property
    def interpretation(self) -> Interpretation:
        return Interpretation(self.raw["interpretation"])

    def geometry(self) -> ChainGeometry:
        g = self.raw["geometry"]
        return ChainGeometry(self.num_emitters, g["spacing"], g["wavelength"])

    def detectors(self, geom: ChainGeometry | None = None) -> list[DetectorSpec]:
        geom = geom or self.geometry()
        det = self.raw["detectors"]
        if det["placement"] == "dicke":
            return dicke_detectors(geom, self.polarizers)
        if det["placement"] == "angles":
            return [DetectorSpec(angle=a, polarizer=p) for a, p in zip(det["angles"], self.polarizers)]
        return [DetectorSpec(exact_phase=v, polarizer=p) for v, p in zip(det["phases"], self.polarizers)]

    def emission(self) -> EmissionModel:
        e = self.raw["emission"]
        try:
            return EmissionModel(_amplitude(e["c0"]), _amplitude(e["c1"]))
        except ValueError as exc:
            raise ConfigError(f"emission: {exc}") from None

    def perturbation(self) -> PerturbationSpec:
        return PerturbationSpec(**self.raw["perturbation"], rng_seed=self.raw["seed"])

    def target(self) -> DickeTarget:
        t = self.raw.get("target")
        if t is None:
            n1 = sum(p is Polarizer.SIGMA_MINUS for p in self.polarizers)
            return DickeTarget.from_ones(self.num_emitters, n1)
        try:
            return DickeTarget(t["num_qubits"], t["two_m"])
        except ValueError as exc:
            raise ConfigError(f"target: {exc}") from None

    def setup(self) -> MonteCarloSetup:
        explicit = None
        if self.raw["detectors"]["placement"] != "dicke":
            explicit = tuple(self.detectors())
        return MonteCarloSetup(
            geometry=self.geometry(),
            polarizers=self.polarizers,
            perturbation=self.perturbation(),
            target=self.target(),
            num_samples=self.raw["num_samples"],
            emission=self.emission(),
            detectors=explicit,
            engine=self.engine,
        )
