from __future__ import annotations

import json
from pathlib import Path

import pytest

from srdcf.config import (
    RegMode,
    TrackerConfig,
    build_tracker_config,
    canonical_keys,
    load_profiles,
    load_run_config,
    parse_run_config,
    write_effective_config,
)
from srdcf.errors import InvalidConfigError
from srdcf.features import FeatureKind


def test_defaults() -> None:
    config = TrackerConfig()
    assert config.mu == 0.1
    assert config.eta == 3.0
    assert config.gamma == 0.025
    assert config.n_gs == 4
    assert config.n_newton == 5
    assert config.num_scales == 5
    assert config.scale_step == 1.02
    assert config.sample_area_factor == 16.0
    assert config.feature_kind is FeatureKind.HOG
    assert config.reg_mode is RegMode.SRDCF


def test_camel_case_aliases() -> None:
    config = TrackerConfig.model_validate({"nGS": 2, "nNe": 0, "numScales": 3, "featureKind": "grayscale"})
    assert config.n_gs == 2
    assert config.n_newton == 0
    assert config.num_scales == 3
    assert config.feature_kind is FeatureKind.GRAYSCALE
    assert canonical_keys({"scaleStep": 1.05, "bogus": 1}) == {"scale_step": 1.05, "bogus": 1}


@pytest.mark.parametrize(
    ("overrides", "field"),
    [
        ({"gamma": 1.5}, "gamma"),
        ({"nGS": 0}, "nGS"),
        ({"numScales": 4}, "numScales"),
        ({"scaleStep": 1.0}, "scaleStep"),
        ({"mu": 0.0}, "mu"),
        ({"eta": -1.0}, "eta"),
        ({"wobble": 3}, "wobble"),
    ],
)
def test_invalid_values_name_the_field(overrides, field: str) -> None:
    with pytest.raises(InvalidConfigError, match=field):
        build_tracker_config(overrides=overrides)


def test_bundled_profiles() -> None:
    profiles = load_profiles()
    assert {"srdcf", "uniform-expanded", "uniform-conventional", "baseline-grayscale"} <= set(profiles)

    assert build_tracker_config("srdcf") == TrackerConfig()
    uniform = build_tracker_config("uniform-conventional")
    assert uniform.reg_mode is RegMode.UNIFORM
    assert uniform.sample_area_factor == pytest.approx(2.8**2)
    assert build_tracker_config("baseline-grayscale").feature_kind is FeatureKind.GRAYSCALE


def test_unknown_profile() -> None:
    with pytest.raises(InvalidConfigError, match="unknown profile 'nope'"):
        build_tracker_config("nope")


def test_overrides_beat_profile() -> None:
    config = build_tracker_config("baseline-grayscale", {"numScales": 3, "gamma": 0.1})
    assert config.num_scales == 3
    assert config.gamma == 0.1
    assert config.sample_area_factor == pytest.approx(7.84)


def test_custom_profiles_file(tmp_path: Path) -> None:
    path = tmp_path / "profiles.yaml"
    path.write_text("tight:\n  tracker:\n    mu: 0.5\n    cellSize: 2\n")
    config = build_tracker_config("tight", profiles_path=path)
    assert config.mu == 0.5
    assert config.cell_size == 2

    path.write_text("tight: [unclosed\n")
    with pytest.raises(InvalidConfigError):
        load_profiles(path)


def test_run_config_document() -> None:
    run = parse_run_config(
        {"profile": "uniform-expanded", "sequence": "data/seq", "output": "out.txt", "tracker": {"nGS": 6}}
    )
    assert run.profile == "uniform-expanded"
    assert run.tracker.reg_mode is RegMode.UNIFORM
    assert run.tracker.n_gs == 6
    assert run.sequence == Path("data/seq")
    assert run.ground_truth is None


def test_command_line_profile_wins_over_document() -> None:
    run = parse_run_config({"profile": "uniform-expanded"}, profile="baseline-grayscale")
    assert run.profile == "baseline-grayscale"
    assert run.tracker.feature_kind is FeatureKind.GRAYSCALE


@pytest.mark.parametrize(
    ("document", "message"),
    [
        ({"tracker": {"gamma": 2}}, "gamma"),
        ({"tracker": [1, 2]}, "tracker"),
        ({"outputs": "x"}, "outputs"),
    ],
)
def test_bad_run_documents(document, message: str) -> None:
    with pytest.raises(InvalidConfigError, match=message):
        parse_run_config(document)


def test_load_run_config_errors(tmp_path: Path) -> None:
    with pytest.raises(InvalidConfigError, match="does not exist"):
        load_run_config(tmp_path / "missing.json")
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(InvalidConfigError, match="not valid JSON"):
        load_run_config(path)


def test_effective_config_round_trip(tmp_path: Path) -> None:
    run = parse_run_config({"tracker": {"numScales": 3}}, profile="srdcf")
    path = write_effective_config(run, tmp_path / "config.json")
    payload = json.loads(path.read_text())
    assert payload["profile"] == "srdcf"
    assert payload["tracker"]["numScales"] == 3
    assert payload["tracker"]["nGS"] == 4
    assert payload["tracker"]["featureKind"] == "hog"

    reloaded = load_run_config(path)
    assert reloaded.tracker == run.tracker
