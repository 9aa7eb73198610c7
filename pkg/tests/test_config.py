from pathlib import Path

import pytest
import yaml

from sempolar.config import RunConfig, config_from_dict, load_config
from sempolar.errors import ConfigError


def test_defaults_without_file():
    cfg = load_config(None, env={})
    assert cfg.start_year == 2010 and cfg.end_year == 2020
    assert cfg.tv_pair == ("cnn", "foxnews")
    assert len(cfg.keywords) == 9
    assert {s.topic for s in cfg.keywords} == {
        "racism", "blm", "police", "immigration", "climate-change", "health-care"
    }
    assert cfg.toy_embedder


def test_load_yaml(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(
        yaml.safe_dump(
            {
                "out": "runs/x",
                "seed": 5,
                "corpus": {"srt": {"cnn": "/data/cnn"}, "tweets": "/data/t.ndjson"},
                "analysis": {"start_year": 2012, "end_year": 2018},
                "embedding": {"dimension": 32, "toy": True},
                "granger": {"max_lag": 6},
            }
        )
    )
    cfg = load_config(path, env={})
    assert cfg.seed == 5
    assert cfg.srt_dirs == {"cnn": Path("/data/cnn")}
    assert cfg.window_years == (2012, 2018)
    assert cfg.dimension == 32
    assert cfg.max_lag == 6


def test_env_overrides(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump({"analysis": {"end_year": 2020}}))
    env = {
        "SEMPOLAR_ANALYSIS__END_YEAR": "2015",
        "SEMPOLAR_SEED": "42",
        "SEMPOLAR_EMBEDDING__TOY": "false",
        "UNRELATED": "ignored",
    }
    cfg = load_config(path, env=env)
    assert cfg.end_year == 2015
    assert cfg.seed == 42
    assert not cfg.toy_embedder


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        config_from_dict({"granger": {"lagmax": 3}})
    with pytest.raises(ConfigError, match="unknown key"):
        config_from_dict({"granularity": "monthly"})


def test_bad_pair_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"analysis": {"tv_pair": ["cnn"]}})
    with pytest.raises(ConfigError):
        config_from_dict({"analysis": {"tv_pair": ["cnn", "cnn"]}})


def test_bad_lag_range_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"granger": {"min_lag": 5, "max_lag": 2}})
    with pytest.raises(ConfigError):
        config_from_dict({"analysis": {"start_year": 2020, "end_year": 2010}})


def test_custom_keywords():
    cfg = config_from_dict(
        {"keywords": [{"id": 1, "forms": ["Guns", "firearms"], "topic": "guns"}]}
    )
    assert len(cfg.keywords) == 1
    assert cfg.keywords[0].surface_forms == ("guns", "firearms")


def test_save_load_round_trip(tmp_path):
    cfg = RunConfig()
    cfg.seed = 9
    cfg.dimension = 24
    path = tmp_path / "resolved.yaml"
    cfg.save(path)
    back = load_config(path, env={})
    assert back.seed == 9
    assert back.dimension == 24
    assert back.keywords == cfg.keywords
