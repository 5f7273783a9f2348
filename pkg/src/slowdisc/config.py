"""Run configuration: YAML ingestion, validation, deterministic hashing."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .baseflow import BaseFlow, PowerLawFlow, TabulatedFlow
from .deformation import DeformationPath, ModePath, circle_path


class ConfigError(ValueError):
    pass


_DEFAULT_NUMERICS = {
    "n_radial": 64,
    "n_field": 128,
    "r_min": 1e-6,
    "r_core": 1e-3,
    "dt": None,
    "integrator_order": 4,
}

_DEFAULT_RUN = {
    "r0": 0.8,
    "sigma0": 0.0,
    "t_end": None,
    "order": 2,
    "tau": 0.0,
    "n_grid": 201,
    "epsilons": None,
    "n_particles": 8,
}


@dataclass
class RunConfig:
    """Validated configuration of one invocation."""

    raw: dict
    base_flow: dict
    deformation: dict
    numerics: dict
    run: dict
    source_dir: Path = field(default_factory=Path)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        return cls.from_dict(raw, source_dir=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, source_dir: Path | None = None) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        bf = dict(raw.get("base_flow") or {})
        de = dict(raw.get("deformation") or {})
        nu = {**_DEFAULT_NUMERICS, **(raw.get("numerics") or {})}
        rn = {**_DEFAULT_RUN, **(raw.get("run") or {})}
        cfg = cls(raw=raw, base_flow=bf, deformation=de, numerics=nu, run=rn,
                  source_dir=source_dir or Path("."))
        cfg.validate()
        return cfg

    # -- validation --------------------------------------------------------------
    def validate(self):
        bf = self.base_flow
        kind = bf.get("kind", "power_law")
        if kind == "power_law":
            alpha = float(bf.get("alpha", 0.5))
            if not (0.0 < alpha <= 2.0):
                raise ConfigError("base_flow.alpha must lie in (0, 2]")
            if float(bf.get("amplitude", 1.0)) == 0.0:
                raise ConfigError("base_flow.amplitude must be nonzero")
        elif kind == "tabulated":
            if "table_file" not in bf:
                raise ConfigError("base_flow.table_file required for tabulated flows")
        else:
            raise ConfigError(f"unknown base_flow.kind {kind!r}")

        de = self.deformation
        if de:
            if float(de.get("delta", 0.0)) < 0.0:
                raise ConfigError("deformation.delta must be >= 0")
            if float(de.get("epsilon", 1.0)) <= 0.0:
                raise ConfigError("deformation.epsilon must be > 0")
            seen = {}
            for spec in de.get("modes", []):
                m = int(spec.get("m", 0))
                if m == 0:
                    raise ConfigError("deformation mode m=0 is not allowed")
                seen.setdefault(abs(m), []).append(m)
            for m, signs in seen.items():
                if len(signs) > 2 or len(set(signs)) != len(signs):
                    raise ConfigError(f"duplicate mode entries for |m|={m}")

        nu = self.numerics
        if not (0 < nu["r_min"] < nu["r_core"] < 1):
            raise ConfigError("need 0 < r_min < r_core < 1")
        if int(nu["n_radial"]) < 16 or int(nu["n_field"]) < 16:
            raise ConfigError("resolutions must be at least 16")
        if int(nu["integrator_order"]) != 4:
            raise ConfigError("only the classical 4th-order integrator is provided")
        if int(self.run["order"]) not in (1, 2):
            raise ConfigError("run.order must be 1 or 2")

    # -- builders ----------------------------------------------------------------
    def build_flow(self) -> BaseFlow:
        bf = self.base_flow
        if bf.get("kind", "power_law") == "power_law":
            return PowerLawFlow(amplitude=float(bf.get("amplitude", 1.0)),
                                alpha=float(bf.get("alpha", 0.5)))
        table = np.loadtxt(self.source_dir / bf["table_file"], delimiter=",",
                           comments="#")
        return TabulatedFlow(table[:, 0], table[:, 1])

    def build_path(self, epsilon: float | None = None) -> DeformationPath:
        de = self.deformation
        if not de or not de.get("modes"):
            raise ConfigError("this command needs a deformation block with modes")
        modes: dict[int, ModePath] = {}
        for spec in de["modes"]:
            m = int(spec["m"])
            kind = spec.get("kind", "circle")
            if kind == "circle":
                mp = circle_path(
                    m,
                    radius=float(spec.get("radius", 1.0)),
                    turns=float(spec.get("turns", 1.0)),
                    phase=float(spec.get("phase", 0.0)),
                    t_end=float(de.get("t_end", 1.0)),
                    samples=int(spec.get("samples", 2048)),
                )
            elif kind == "samples":
                data = np.loadtxt(self.source_dir / spec["file"], delimiter=",",
                                  comments="#")
                mp = ModePath(data[:, 0], data[:, 1] + 1j * data[:, 2],
                              closed=bool(spec.get("closed", True)))
            else:
                raise ConfigError(f"unknown mode kind {kind!r}")
            modes[m] = mp
        return DeformationPath(modes, delta=float(de["delta"]),
                               epsilon=float(epsilon if epsilon is not None
                                             else de["epsilon"]))

    def mode_numbers(self) -> list[int]:
        return sorted({abs(int(s["m"])) for s in self.deformation.get("modes", [])})


def config_hash(raw: dict) -> str:
    """Deterministic digest of a configuration mapping."""
    blob = json.dumps(raw, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
