"""Run configuration: JSON file plus flag overrides, validated per command."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .io import canonical_json, config_hash

COMMANDS = ("simulate", "decay", "compare-wave", "compare-leps", "soliton", "lp-check", "sweep")

# documented defaults per command; keys absent from a config file are filled from here
COMMAND_DEFAULTS: dict[str, dict] = {
    "simulate": {"dim": 1, "n": 1024, "box_length": 120.0, "eps": [0.3], "t_max": 1.0, "dt": 1e-3, "s": 2,
                 "family": {"amplitude": 0.1, "width": 8.0, "phase_amplitude": 0.0}},
    "decay": {"dim": 2, "n": None, "box_length": None, "eps": [], "t_max": None, "dt": None, "s": 0},
    "compare-wave": {"dim": 1, "n": 512, "box_length": 40.0, "eps": [0.05, 0.1, 0.2, 0.4], "t_max": 2.0,
                     "dt": 1e-3, "s": 4},
    "compare-leps": {"dim": 2, "n": 256, "box_length": 40.0, "eps": [0.1], "t_max": 8.0, "dt": 5e-3, "s": 3,
                     "family": {"amplitude": 0.1, "phase_amplitude": 0.05}},
    "soliton": {"dim": 1, "n": 512, "box_length": 64.0, "eps": [0.1, 0.2, 0.3, 0.4], "t_max": None, "dt": 0.01,
                "s": 0},
    "lp-check": {"dim": 2, "n": 128, "box_length": 20.0, "eps": [0.25], "t_max": None, "dt": None, "s": 1},
    "sweep": {"dim": 1, "n": 1024, "box_length": 80.0, "eps": [0.05, 0.1, 0.2, 0.4], "t_max": 1.0, "dt": 2e-3,
              "s": 2, "family": {"amplitude": 2.0, "phase_amplitude": 1.0}},
}

__all__ = ["COMMANDS", "COMMAND_DEFAULTS", "FamilySpec", "RunConfig", "parse_config", "serialize_config"]


class FamilySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Literal["gaussian", "ring", "random-bandlimited", "soliton-perturbation"] = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    phase_amplitude: float = 0.5
    norm_s: float = 4.0
    radius: float = 3.0
    kmax: float = 2.0


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Literal["simulate", "decay", "compare-wave", "compare-leps", "soliton", "lp-check", "sweep"]
    dim: int
    n: Optional[int]
    box_length: Optional[float]
    eps: list[float]
    t_max: Optional[float]
    dt: Optional[float]
    s: int
    family: FamilySpec = FamilySpec()
    output_dir: str = "out"
    seed: int = 0
    engine: Literal["gp", "hydro", "both"] = "gp"
    mode: Literal["ueps", "veps"] = "ueps"
    times: Optional[list[float]] = None
    n_records: int = 20

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data):
        if not isinstance(data, dict):
            return data
        cmd = data.get("command")
        if cmd not in COMMAND_DEFAULTS:
            return data
        out = dict(data)
        for key, value in COMMAND_DEFAULTS[cmd].items():
            if key == "family":
                fam = dict(value)
                if isinstance(out.get("family"), dict):
                    fam.update(out["family"])
                out["family"] = fam
            elif key not in out:
                out[key] = value
        return out

    @field_validator("eps", mode="before")
    @classmethod
    def _eps_list(cls, v):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return [float(v)]
        return v

    @model_validator(mode="after")
    def _per_command(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dim: must be 1, 2 or 3")
        if self.n is not None and (self.n < 8 or self.n & (self.n - 1)):
            raise ValueError("n: must be a power of two >= 8")
        for key in ("box_length", "t_max", "dt"):
            v = getattr(self, key)
            if v is not None and not v > 0:
                raise ValueError(f"{key}: must be positive")
        if any(not e > 0 for e in self.eps):
            raise ValueError("eps: values must be positive")
        cmd = self.command
        if cmd in ("simulate", "compare-wave", "compare-leps", "sweep") and not self.eps:
            raise ValueError("eps: at least one value is required")
        if cmd in ("soliton",) and self.dim != 1:
            raise ValueError("dim: soliton runs are one-dimensional")
        if cmd == "compare-leps" and self.dim not in (1, 2):
            raise ValueError("dim: compare-leps supports dim 1 and 2")
        if cmd in ("compare-wave", "compare-leps", "sweep", "simulate") and self.dim == 3:
            raise ValueError("dim: nonlinear runs are limited to dim 1 and 2")
        return self

    def canonical(self) -> dict:
        """Every field filled in; ``output_dir`` is left out since it does not affect results."""
        d = self.model_dump(mode="json")
        d.pop("output_dir")
        return d

    def hash(self) -> str:
        return config_hash(self.canonical())

    def run_dir(self) -> Path:
        return Path(self.output_dir) / f"{self.command}-{self.hash()[:12]}"


def _key_of(err: dict) -> str:
    loc = [str(p) for p in err.get("loc", ()) if p != "__root__"]
    if loc:
        return ".".join(loc)
    msg = str(err.get("msg", ""))
    # model-level messages are written "key: reason"
    head = msg.split("Value error, ", 1)[-1]
    return head.split(":", 1)[0] if ":" in head else "config"


def _validate(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        key = _key_of(err)
        if err.get("type") == "extra_forbidden":
            raise ConfigError(key, "unknown key") from None
        if err.get("type") == "missing":
            raise ConfigError(key, "missing required field") from None
        raise ConfigError(key, str(err.get("msg"))) from None


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Load a JSON config (or a run manifest) and apply flag overrides.

    ``overrides`` maps config keys to values; ``None`` values are ignored.
    """
    data: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError("config", f"file not found: {p}")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
        if "config" in data and "config_hash" in data:
            # a run manifest: rerun its config
            data = dict(data["config"])
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return _validate(data)


def serialize_config(config: RunConfig) -> str:
    """Canonical JSON text; ``parse`` of it gives back an equal config."""
    d = config.canonical()
    d["output_dir"] = config.output_dir
    return canonical_json(d)
