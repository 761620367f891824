"""
Typed tracker and run configuration.

Field names are snake_case; the camelCase spellings used in JSON documents and
in ``configs/profiles.yaml`` are accepted as aliases.
"""

from __future__ import annotations

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from pydantic.alias_generators import to_camel

from .errors import InvalidConfigError
from .features.sampling import FeatureKind

LOG = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parent / "configs"
PROFILES_PATH = CONFIG_DIR / "profiles.yaml"
DEFAULT_PROFILE = "srdcf"


class RegMode(str, Enum):
    SRDCF = "srdcf"
    UNIFORM = "uniform"


class TrackerConfig(BaseModel):
    mu: float = Field(default=0.1, gt=0)
    eta: float = Field(default=3.0, ge=0)
    gamma: float = 0.025
    n_gs: int = Field(default=4, alias="nGS")
    n_newton: int = Field(default=5, ge=0, alias="nNe")
    num_scales: int = 5
    scale_step: float = 1.02
    cell_size: int = Field(default=4, ge=1)
    sample_area_factor: float = Field(default=16.0, gt=0)
    max_grid_size: int = Field(default=50, ge=1)
    label_sigma_factor: float = Field(default=1.0 / 16.0, gt=0)
    feature_kind: FeatureKind = FeatureKind.HOG
    reg_mode: RegMode = RegMode.SRDCF
    uniform_lambda: float = Field(default=0.01, gt=0)
    target_nnz: int = Field(default=10, ge=1)
    reg_jitter: float = Field(default=0.0, ge=0)
    subgrid: bool = True
    mean_removal: bool = True

    model_config = ConfigDict(
        alias_generator=to_camel,
        populate_by_name=True,
        extra="forbid",
        frozen=True,
        use_enum_values=False,
    )

    @field_validator("gamma")
    @classmethod
    def _check_gamma(cls, value: float) -> float:
        if not 0.0 <= value <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        return value

    @field_validator("n_gs")
    @classmethod
    def _check_sweeps(cls, value: int) -> int:
        if value < 1:
            raise ValueError("nGS must be at least 1")
        return value

    @field_validator("num_scales")
    @classmethod
    def _check_scales(cls, value: int) -> int:
        if value < 1 or value % 2 == 0:
            raise ValueError("numScales must be odd and >= 1")
        return value

    @field_validator("scale_step")
    @classmethod
    def _check_step(cls, value: float) -> float:
        if not value > 1.0:
            raise ValueError("scaleStep must be greater than 1")
        return value


class RunConfig(BaseModel):
    """A ``track`` invocation: tracker settings plus input and output paths."""

    profile: Optional[str] = None
    tracker: TrackerConfig = Field(default_factory=TrackerConfig)
    sequence: Optional[Path] = None
    ground_truth: Optional[Path] = None
    output: Optional[Path] = None
    curve: Optional[Path] = None

    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True, extra="forbid")


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(item) for item in error.get("loc", ())) or "<root>"
        parts.append(f"{location}: {error.get('msg')}")
    return "; ".join(parts)


def canonical_keys(data: Mapping[str, Any]) -> Dict[str, Any]:
    """Map alias spellings onto TrackerConfig field names; unknown keys pass through."""

    lookup: Dict[str, str] = {}
    for name, info in TrackerConfig.model_fields.items():
        lookup[name] = name
        if info.alias:
            lookup[info.alias] = name
    return {lookup.get(key, key): value for key, value in data.items()}


def load_profiles(path: Path = PROFILES_PATH) -> Dict[str, Dict[str, Any]]:
    try:
        with Path(path).open("r", encoding="utf-8") as handle:
            profiles = yaml.safe_load(handle) or {}
    except FileNotFoundError:
        profiles = {}
    except yaml.YAMLError as exc:
        raise InvalidConfigError(f"cannot parse profiles file {path}: {exc}") from exc
    if not isinstance(profiles, dict):
        raise InvalidConfigError(f"profiles file {path} must contain a mapping")
    return profiles


def profile_overrides(name: str, path: Path = PROFILES_PATH) -> Dict[str, Any]:
    profiles = load_profiles(path)
    if name not in profiles:
        known = ", ".join(sorted(profiles)) or "none"
        raise InvalidConfigError(f"unknown profile {name!r} (known: {known})")
    entry = profiles[name] or {}
    return canonical_keys(entry.get("tracker") or {})


def build_tracker_config(
    profile: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    *,
    profiles_path: Path = PROFILES_PATH,
) -> TrackerConfig:
    """Defaults < profile preset < explicit overrides."""

    values: Dict[str, Any] = {}
    if profile:
        values.update(profile_overrides(profile, profiles_path))
    if overrides:
        values.update(canonical_keys(overrides))
    try:
        return TrackerConfig.model_validate(values)
    except ValidationError as exc:
        raise InvalidConfigError(f"invalid tracker config: {_format_validation_error(exc)}") from exc


def parse_run_config(
    document: Mapping[str, Any],
    profile: Optional[str] = None,
    *,
    profiles_path: Path = PROFILES_PATH,
) -> RunConfig:
    if not isinstance(document, Mapping):
        raise InvalidConfigError("run config must be a JSON object")
    data = dict(document)
    tracker_section = data.pop("tracker", None) or {}
    if not isinstance(tracker_section, Mapping):
        raise InvalidConfigError("tracker: expected an object")
    chosen = profile or data.get("profile")
    tracker = build_tracker_config(chosen, tracker_section, profiles_path=profiles_path)
    data["profile"] = chosen
    try:
        return RunConfig.model_validate({**data, "tracker": tracker})
    except ValidationError as exc:
        raise InvalidConfigError(f"invalid run config: {_format_validation_error(exc)}") from exc


def load_run_config(path: str | Path, profile: Optional[str] = None) -> RunConfig:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InvalidConfigError(f"config file {path} does not exist") from exc
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_run_config(document, profile)


def write_effective_config(run_config: RunConfig, path: str | Path) -> Path:
    """Write the merged config (camelCase keys) for provenance."""

    path = Path(path)
    payload = run_config.model_dump(mode="json", by_alias=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    LOG.info("Effective config written to %s", path)
    return path


__all__ = [
    "DEFAULT_PROFILE",
    "PROFILES_PATH",
    "RegMode",
    "RunConfig",
    "TrackerConfig",
    "build_tracker_config",
    "canonical_keys",
    "load_profiles",
    "load_run_config",
    "parse_run_config",
    "profile_overrides",
    "write_effective_config",
]
