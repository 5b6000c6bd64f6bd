"""Scenario configuration: path coefficients, simulation sizes, and the flat
key-value config file format.

Config files are plain text, one ``key = value`` pair per line, with ``#``
comments.  Keys are exactly the coefficient/size/threshold names below; the
coefficient named ``lambda`` maps to the Python attribute ``lambda_``.
Unknown keys are errors.  Omitted coefficients default to 0; omitted sizes
default to n_obs=5000, n_runs=1000.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass

DEFAULT_SEED = 20160301
DEFAULT_N_OBS = 5000
DEFAULT_N_RUNS = 1000

#: Config-file keys for the linear path coefficients, in canonical order.
COEFFICIENT_KEYS = (
    "delta", "chi", "gamma", "psi", "eta", "pi", "phi",
    "tau", "nu", "lambda", "omega", "theta", "kappa", "mu",
)
SIZE_KEYS = ("n_obs", "n_runs", "seed")
THRESHOLD_KEYS = ("threshold_c", "threshold_t1", "threshold_t2")
ALL_KEYS = COEFFICIENT_KEYS + SIZE_KEYS + THRESHOLD_KEYS

_INT_KEYS = frozenset(SIZE_KEYS)


class ConfigError(ValueError):
    """Malformed config text, unknown key, or invalid field value."""


def _attr_name(key: str) -> str:
    return "lambda_" if key == "lambda" else key


def _file_key(attr: str) -> str:
    return "lambda" if attr == "lambda_" else attr


@dataclass(frozen=True)
class ScenarioConfig:
    """All path coefficients plus simulation sizes, seed, and thresholds.

    Coefficients a scenario does not use are simply ignored when that
    scenario is built, so a single config can drive every scenario.  The
    pair (mu, kappa) may not both be nonzero: a simultaneous Y1->T2 and
    T2->Y1 dependence would be cyclic.
    """

    delta: float = 0.0
    chi: float = 0.0
    gamma: float = 0.0
    psi: float = 0.0
    eta: float = 0.0
    pi: float = 0.0
    phi: float = 0.0
    tau: float = 0.0
    nu: float = 0.0
    lambda_: float = 0.0
    omega: float = 0.0
    theta: float = 0.0
    kappa: float = 0.0
    mu: float = 0.0
    n_obs: int = DEFAULT_N_OBS
    n_runs: int = DEFAULT_N_RUNS
    seed: int = DEFAULT_SEED
    threshold_c: float = 1.0
    threshold_t1: float = -0.2
    threshold_t2: float = 1.0

    def __post_init__(self) -> None:
        for key in COEFFICIENT_KEYS + THRESHOLD_KEYS:
            value = getattr(self, _attr_name(key))
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{key} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ConfigError(f"{key} must be finite, got {value!r}")
            object.__setattr__(self, _attr_name(key), float(value))
        for key in _INT_KEYS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
        if self.n_obs < 2:
            raise ConfigError(f"n_obs must be >= 2, got {self.n_obs}")
        if self.n_runs < 1:
            raise ConfigError(f"n_runs must be >= 1, got {self.n_runs}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.mu != 0.0 and self.kappa != 0.0:
            raise ConfigError(
                "mu and kappa cannot both be nonzero: simultaneous Y1->T2 and "
                "T2->Y1 effects form a cycle"
            )

    def replace(self, **changes: float | int) -> "ScenarioConfig":
        """Return a copy with the given fields changed (file-key names ok)."""
        mapped = {_attr_name(k): v for k, v in changes.items()}
        return dataclasses.replace(self, **mapped)

    def get(self, key: str) -> float | int:
        """Field value by config-file key name."""
        if key not in ALL_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        return getattr(self, _attr_name(key))

    def to_dict(self) -> dict[str, float | int]:
        """Mapping keyed by config-file names, in canonical key order."""
        return {key: self.get(key) for key in ALL_KEYS}

    def digest(self) -> str:
        """Short content hash of the canonical dump, for provenance lines."""
        return hashlib.sha256(dump_config(self).encode()).hexdigest()[:12]


def _parse_value(key: str, raw: str, where: str) -> float | int:
    raw = raw.strip()
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{where}: key '{key}' expects an integer, got '{raw}'") from None
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{where}: key '{key}' expects a number, got '{raw}'") from None
    return value


def parse_config_text(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse flat ``key = value`` config text into a ScenarioConfig.

    Errors name the offending key and line.  Duplicate keys are rejected so
    a silently shadowed value can never reach a simulation.
    """
    fields: dict[str, float | int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        where = f"{source}:{lineno}"
        if "=" not in stripped:
            raise ConfigError(f"{where}: expected 'key = value', got '{stripped}'")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in ALL_KEYS:
            raise ConfigError(f"{where}: unknown key '{key}'")
        if key in fields:
            raise ConfigError(f"{where}: duplicate key '{key}'")
        fields[key] = _parse_value(key, raw, where)
    try:
        return ScenarioConfig(**{_attr_name(k): v for k, v in fields.items()})
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path: str) -> ScenarioConfig:
    """Read and parse a config file."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config_text(handle.read(), source=path)


def dump_config(config: ScenarioConfig) -> str:
    """Canonical config text; re-parsing it reproduces the config exactly.

    Floats are emitted with repr so the round trip is bit-exact.
    """
    lines = []
    for key, value in config.to_dict().items():
        lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


def apply_overrides(config: ScenarioConfig, overrides: list[str]) -> ScenarioConfig:
    """Apply ``key=value`` override strings on top of a config."""
    changes: dict[str, float | int] = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in ALL_KEYS:
            raise ConfigError(f"override: unknown key '{key}'")
        changes[key] = _parse_value(key, raw, "override")
    return config.replace(**changes)
