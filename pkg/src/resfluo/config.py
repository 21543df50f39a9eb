"""Flat dotted-key configuration files and their resolved form.

Format: one ``key = value`` pair per line, ``#`` starts a full-line comment,
blank lines ignored. Values are plain scalars, comma lists, axis names
(``x``, ``-z``), or comma 3-vectors. Unknown keys are rejected so typos fail
loudly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .atoms import AtomParameters, AtomicSteadyState, rabi_for_ratio, steady_state
from .errors import ConfigError
from .geometry import direction

_KNOWN_KEYS = {
    "atoms.n",
    "atoms.gamma2",
    "atoms.detuning",
    "atoms.rabi",
    "atoms.target_ratio",
    "scene.spacing_lambda",
    "scene.trap",
    "scene.dipole",
    "scene.laser",
    "scene.detector1",
    "scene.phi2.start",
    "scene.phi2.stop",
    "scene.phi2.steps",
    "scene.phi2_rad",
    "scene.box_lambda",
    "trap.mass_kg",
    "trap.charge_e",
    "trap.wavelength_m",
    "trap.jitter_cap_lambda",
    "trap.scale_lambda",
    "mc.samples",
    "mc.seed",
    "mc.distribution",
    "ensemble.samples",
    "opt.gamma_min_lambda",
    "opt.gamma_max_lambda",
    "thresh.n",
    "thresh.gamma2",
    "thresh.detuning",
}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse dotted-key lines into a raw string mapping."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def _to_float(key: str, value: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite")
    return v


def _to_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _to_bool(key: str, value: str) -> bool:
    low = value.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _to_int_list(key: str, value: str) -> tuple[int, ...]:
    return tuple(_to_int(key, part.strip()) for part in value.split(",") if part.strip())


def _to_float_list(key: str, value: str) -> tuple[float, ...]:
    return tuple(
        _to_float(key, part.strip()) for part in value.split(",") if part.strip()
    )


def _to_direction(key: str, value: str) -> np.ndarray:
    if "," in value:
        parts = _to_float_list(key, value)
        if len(parts) != 3:
            raise ConfigError(f"{key}: direction needs 3 components")
        vec = np.asarray(parts, dtype=float)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ConfigError(f"{key}: zero direction")
        return vec / norm
    try:
        return direction(value)
    except Exception:
        raise ConfigError(f"{key}: unknown axis {value!r}") from None


@dataclass
class ExperimentConfig:
    """Resolved configuration with every default applied.

    ``n_atoms`` may hold several values (angle scans emit one column per N);
    single-scene operations use exactly one.
    """

    n_atoms: tuple[int, ...] = (3,)
    gamma1: float = 1.0
    gamma2: float = 0.5
    detuning: float = 0.0
    rabi: float | None = None
    target_ratio: float | None = None
    spacing_lambda: float = 10.0
    trap_mode: bool = False
    dipole: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    laser: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    detector1: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))
    phi2_start: float = 0.0
    phi2_stop: float = 2.0 * math.pi
    phi2_steps: int = 721
    phi2_rad: float = math.pi / 4.0
    box_lambda: float = 50.0
    mass_kg: float = 3.3309e-25
    charge_e: float = 1.0
    wavelength_m: float = 1.942e-7
    jitter_cap_lambda: float = 0.1
    trap_scale_lambda: float = 1.0
    mc_samples: int = 100_000
    mc_seed: int | None = None
    mc_distribution: str = "uniform"
    ensemble_samples: int = 1000
    gamma_min_lambda: float = 2.0
    gamma_max_lambda: float = 12.0
    thresh_n: tuple[int, ...] = tuple(range(1, 11))
    thresh_gamma2: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0, 3.0)
    thresh_detuning: tuple[float, ...] = (0.0, 1.0, 2.0)

    def __post_init__(self):
        if len(self.n_atoms) < 1 or any(n < 1 for n in self.n_atoms):
            raise ConfigError("atoms.n must list at least one positive count")
        if self.gamma1 <= 0:
            raise ConfigError("gamma1 must be positive")
        if self.gamma2 < self.gamma1 / 2:
            raise ConfigError("atoms.gamma2 must be at least gamma1 / 2")
        if self.phi2_steps < 1:
            raise ConfigError("scene.phi2.steps must be >= 1")
        if self.mc_samples < 1:
            raise ConfigError("mc.samples must be >= 1")
        if self.ensemble_samples < 1:
            raise ConfigError("ensemble.samples must be >= 1")
        if self.mc_distribution not in ("uniform", "tgauss"):
            raise ConfigError("mc.distribution must be 'uniform' or 'tgauss'")
        if self.rabi is not None and self.target_ratio is not None:
            raise ConfigError("set atoms.rabi or atoms.target_ratio, not both")
        if not (self.gamma_min_lambda < self.gamma_max_lambda):
            raise ConfigError("opt interval is empty")

    @classmethod
    def from_mapping(cls, raw: dict[str, str]) -> "ExperimentConfig":
        kw = {}
        if "atoms.n" in raw:
            kw["n_atoms"] = _to_int_list("atoms.n", raw["atoms.n"])
        if "atoms.gamma2" in raw:
            kw["gamma2"] = _to_float("atoms.gamma2", raw["atoms.gamma2"])
        if "atoms.detuning" in raw:
            kw["detuning"] = _to_float("atoms.detuning", raw["atoms.detuning"])
        if "atoms.rabi" in raw:
            kw["rabi"] = _to_float("atoms.rabi", raw["atoms.rabi"])
        if "atoms.target_ratio" in raw:
            kw["target_ratio"] = _to_float("atoms.target_ratio", raw["atoms.target_ratio"])
        if "scene.spacing_lambda" in raw:
            kw["spacing_lambda"] = _to_float("scene.spacing_lambda", raw["scene.spacing_lambda"])
        if "scene.trap" in raw:
            kw["trap_mode"] = _to_bool("scene.trap", raw["scene.trap"])
        if "scene.dipole" in raw:
            kw["dipole"] = _to_direction("scene.dipole", raw["scene.dipole"])
        if "scene.laser" in raw:
            kw["laser"] = _to_direction("scene.laser", raw["scene.laser"])
        if "scene.detector1" in raw:
            kw["detector1"] = _to_direction("scene.detector1", raw["scene.detector1"])
        if "scene.phi2.start" in raw:
            kw["phi2_start"] = _to_float("scene.phi2.start", raw["scene.phi2.start"])
        if "scene.phi2.stop" in raw:
            kw["phi2_stop"] = _to_float("scene.phi2.stop", raw["scene.phi2.stop"])
        if "scene.phi2.steps" in raw:
            kw["phi2_steps"] = _to_int("scene.phi2.steps", raw["scene.phi2.steps"])
        if "scene.phi2_rad" in raw:
            kw["phi2_rad"] = _to_float("scene.phi2_rad", raw["scene.phi2_rad"])
        if "scene.box_lambda" in raw:
            kw["box_lambda"] = _to_float("scene.box_lambda", raw["scene.box_lambda"])
        if "trap.mass_kg" in raw:
            kw["mass_kg"] = _to_float("trap.mass_kg", raw["trap.mass_kg"])
        if "trap.charge_e" in raw:
            kw["charge_e"] = _to_float("trap.charge_e", raw["trap.charge_e"])
        if "trap.wavelength_m" in raw:
            kw["wavelength_m"] = _to_float("trap.wavelength_m", raw["trap.wavelength_m"])
        if "trap.jitter_cap_lambda" in raw:
            kw["jitter_cap_lambda"] = _to_float(
                "trap.jitter_cap_lambda", raw["trap.jitter_cap_lambda"]
            )
        if "trap.scale_lambda" in raw:
            kw["trap_scale_lambda"] = _to_float("trap.scale_lambda", raw["trap.scale_lambda"])
        if "mc.samples" in raw:
            kw["mc_samples"] = _to_int("mc.samples", raw["mc.samples"])
        if "mc.seed" in raw:
            kw["mc_seed"] = _to_int("mc.seed", raw["mc.seed"])
        if "mc.distribution" in raw:
            kw["mc_distribution"] = raw["mc.distribution"]
        if "ensemble.samples" in raw:
            kw["ensemble_samples"] = _to_int("ensemble.samples", raw["ensemble.samples"])
        if "opt.gamma_min_lambda" in raw:
            kw["gamma_min_lambda"] = _to_float(
                "opt.gamma_min_lambda", raw["opt.gamma_min_lambda"]
            )
        if "opt.gamma_max_lambda" in raw:
            kw["gamma_max_lambda"] = _to_float(
                "opt.gamma_max_lambda", raw["opt.gamma_max_lambda"]
            )
        if "thresh.n" in raw:
            kw["thresh_n"] = _to_int_list("thresh.n", raw["thresh.n"])
        if "thresh.gamma2" in raw:
            kw["thresh_gamma2"] = _to_float_list("thresh.gamma2", raw["thresh.gamma2"])
        if "thresh.detuning" in raw:
            kw["thresh_detuning"] = _to_float_list("thresh.detuning", raw["thresh.detuning"])
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_mapping(load_config(path))

    def single_n(self) -> int:
        if len(self.n_atoms) != 1:
            raise ConfigError("this operation needs exactly one atoms.n value")
        return self.n_atoms[0]

    def atom_params(self) -> AtomParameters:
        """Resolve the drive (explicit rabi or target ratio) into parameters."""
        if self.rabi is not None:
            rabi = self.rabi
        elif self.target_ratio is not None:
            rabi = rabi_for_ratio(
                self.target_ratio, self.gamma1, self.gamma2, self.detuning
            )
        else:
            raise ConfigError("set atoms.rabi or atoms.target_ratio")
        return AtomParameters(
            gamma1=self.gamma1, gamma2=self.gamma2, rabi=rabi, detuning=self.detuning
        )

    def state(self) -> AtomicSteadyState:
        return steady_state(self.atom_params())

    def require_seed(self) -> int:
        if self.mc_seed is None:
            raise ConfigError("stochastic run needs mc.seed (or --seed)")
        return self.mc_seed

    def resolved(self) -> dict:
        """Dotted-key view of every value in effect, for output provenance."""
        def vec(v):
            return ",".join(repr(float(x)) for x in v)

        out = {
            "atoms.n": ",".join(str(n) for n in self.n_atoms),
            "atoms.gamma2": self.gamma2,
            "atoms.detuning": self.detuning,
            "scene.spacing_lambda": self.spacing_lambda,
            "scene.trap": self.trap_mode,
            "scene.dipole": vec(self.dipole),
            "scene.laser": vec(self.laser),
            "scene.detector1": vec(self.detector1),
            "scene.phi2.start": self.phi2_start,
            "scene.phi2.stop": self.phi2_stop,
            "scene.phi2.steps": self.phi2_steps,
            "scene.phi2_rad": self.phi2_rad,
            "scene.box_lambda": self.box_lambda,
            "trap.mass_kg": self.mass_kg,
            "trap.charge_e": self.charge_e,
            "trap.wavelength_m": self.wavelength_m,
            "trap.jitter_cap_lambda": self.jitter_cap_lambda,
            "trap.scale_lambda": self.trap_scale_lambda,
            "mc.samples": self.mc_samples,
            "mc.distribution": self.mc_distribution,
            "ensemble.samples": self.ensemble_samples,
            "opt.gamma_min_lambda": self.gamma_min_lambda,
            "opt.gamma_max_lambda": self.gamma_max_lambda,
            "thresh.n": ",".join(str(n) for n in self.thresh_n),
            "thresh.gamma2": ",".join(repr(v) for v in self.thresh_gamma2),
            "thresh.detuning": ",".join(repr(v) for v in self.thresh_detuning),
        }
        if self.rabi is not None:
            out["atoms.rabi"] = self.rabi
        if self.target_ratio is not None:
            out["atoms.target_ratio"] = self.target_ratio
        if self.mc_seed is not None:
            out["mc.seed"] = self.mc_seed
        return out
