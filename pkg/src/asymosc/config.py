"""Run configuration: one TOML file describing the system and every subcommand.

The file is strict: unknown keys anywhere are rejected, the stiffness pairs
must satisfy the resonance identity (the second stiffness may be omitted and
is then derived exactly), and forcings are harmonic coefficient lists so
complex Fourier data stays exactly computable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .dynamics import IntegratorSettings
from .errors import PreconditionError
from .forcing import CouplingFunction, ForcingSignal
from .oscillator import FucikPair
from .resonance import SystemConfig

_SCHEMA = {
    "system": {
        "n": int,
        "pair1": {"a": float, "b": float},
        "pair2": {"a": float, "b": float},
        "forcing1": {"constant": float, "harmonics": list},
        "forcing2": {"constant": float, "harmonics": list},
        "coupling1": {"limit": float, "perturbation": float},
        "coupling2": {"limit": float, "perturbation": float},
    },
    "integrator": {"rel_tol": float, "abs_tol": float, "max_step": float},
    "resonance": {"grid": int, "torus_grid": int},
    "zeros": {"grid": int, "tol": float},
    "contraction": {"matrix": list, "samples": int, "safety": float},
    "invariance": {"zero_index": int, "samples": int, "direction": str, "grid": int, "tol": float},
    "orbit": {"theta": list, "r": list, "iterates": int, "direction": str},
    "scenario": {
        "linear-symmetric": dict,
        "phi1-null": dict,
        "small-coupling": dict,
    },
}


def _check_keys(data: dict, schema: dict, path: str):
    for key, val in data.items():
        if key not in schema:
            raise PreconditionError(f"unknown config key {path}{key!r}")
        sub = schema[key]
        if sub is dict:  # free-form subsection (scenario overrides)
            continue
        if isinstance(sub, dict):
            if not isinstance(val, dict):
                raise PreconditionError(f"config key {path}{key!r} must be a table")
            _check_keys(val, sub, f"{path}{key}.")


@dataclass
class RunConfig:
    """Parsed, validated configuration plus the resolved raw mapping."""

    system: SystemConfig
    integrator: IntegratorSettings
    resonance: dict = field(default_factory=dict)
    zeros: dict = field(default_factory=dict)
    contraction: dict = field(default_factory=dict)
    invariance: dict = field(default_factory=dict)
    orbit: dict = field(default_factory=dict)
    scenario: dict = field(default_factory=dict)
    resolved: dict = field(default_factory=dict)


def _pair_from(section: dict, n: int, name: str) -> FucikPair:
    if "a" not in section:
        raise PreconditionError(f"[system.{name}] needs the stiffness 'a'")
    a = float(section["a"])
    if "b" in section:
        return FucikPair(a, float(section["b"]), n)
    return FucikPair.from_a(a, n)


def _forcing_from(section: dict) -> ForcingSignal:
    harmonics = []
    for row in section.get("harmonics", []):
        if len(row) != 3:
            raise PreconditionError("each harmonic must be [k, cos_coef, sin_coef]")
        harmonics.append((int(row[0]), float(row[1]), float(row[2])))
    return ForcingSignal(float(section.get("constant", 0.0)), tuple(harmonics))


def _coupling_from(section: dict) -> CouplingFunction:
    return CouplingFunction(
        float(section.get("limit", 0.0)), float(section.get("perturbation", 0.0))
    )


def load_config(path) -> RunConfig:
    """Read and validate a TOML run configuration."""
    raw = tomllib.loads(Path(path).read_text())
    _check_keys(raw, _SCHEMA, "")
    if "system" not in raw:
        raise PreconditionError("config needs a [system] section")
    sysec = raw["system"]
    n = int(sysec.get("n", 1))
    pair1 = _pair_from(sysec.get("pair1", {}), n, "pair1")
    pair2 = _pair_from(sysec.get("pair2", {}), n, "pair2")
    system = SystemConfig(
        pair1,
        pair2,
        _forcing_from(sysec.get("forcing1", {})),
        _forcing_from(sysec.get("forcing2", {})),
        _coupling_from(sysec.get("coupling1", {})),
        _coupling_from(sysec.get("coupling2", {})),
    )
    integ = raw.get("integrator", {})
    integrator = IntegratorSettings(
        rel_tol=float(integ.get("rel_tol", 1e-10)),
        abs_tol=float(integ.get("abs_tol", 1e-12)),
        max_step=float(integ.get("max_step", 2.0 * math.pi / 200.0)),
    )
    resolved = {
        "system": {
            "n": n,
            "pair1": {"a": pair1.a, "b": pair1.b},
            "pair2": {"a": pair2.a, "b": pair2.b},
            "forcing1": _forcing_dict(system.forcing1),
            "forcing2": _forcing_dict(system.forcing2),
            "coupling1": _coupling_dict(system.coupling1),
            "coupling2": _coupling_dict(system.coupling2),
        },
        "integrator": {
            "rel_tol": integrator.rel_tol,
            "abs_tol": integrator.abs_tol,
            "max_step": integrator.max_step,
        },
    }
    for key in ("resonance", "zeros", "contraction", "invariance", "orbit", "scenario"):
        if key in raw:
            resolved[key] = raw[key]
    return RunConfig(
        system=system,
        integrator=integrator,
        resonance=raw.get("resonance", {}),
        zeros=raw.get("zeros", {}),
        contraction=raw.get("contraction", {}),
        invariance=raw.get("invariance", {}),
        orbit=raw.get("orbit", {}),
        scenario=raw.get("scenario", {}),
        resolved=resolved,
    )


def _forcing_dict(f: ForcingSignal) -> dict:
    return {"constant": f.constant, "harmonics": [list(h) for h in f.harmonics]}


def _coupling_dict(c: CouplingFunction) -> dict:
    return {"limit": c.limit_plus, "perturbation": c.perturb_amp}
