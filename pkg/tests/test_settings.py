"""Tests for run-config parsing and thread resolution."""

import json
import os
from unittest import mock

import pytest

from weylspec import settings
from weylspec.errors import ConfigError
from weylspec.settings import (
    CONFIG_VERSION,
    NumericConfig,
    load_config,
    parse_config,
    resolve_threads,
)

MINIMAL = {"potential": {"name": "free"}, "task": "density"}


def document(**extra):
    doc = json.loads(json.dumps(MINIMAL))
    doc.update(extra)
    return doc


class TestParseConfig:
    def test_defaults(self):
        config = parse_config(MINIMAL)
        assert config.task == "density"
        assert config.potential == {"name": "free", "params": []}
        assert config.numeric == NumericConfig()
        assert config.seed == 0
        assert config.version == CONFIG_VERSION

    def test_numeric_block(self):
        config = parse_config(document(numeric={"tol": 1e-8, "lambda_grid": [1, 2, 3], "z_range": [0.1, 0.5]}))
        assert config.numeric.tol == 1e-8
        assert config.numeric.lambda_grid == (1.0, 2.0, 3.0)
        assert config.numeric.z_range == (0.1, 0.5)

    def test_lambda_cap(self):
        assert NumericConfig().lambda_cap > NumericConfig().lambda_max
        config = parse_config(document(numeric={"lambda_max": 100.0, "lambda_cap": 800.0}))
        assert config.numeric.lambda_cap == 800.0

    def test_grids_at_lambda_min(self):
        config = parse_config(document(numeric={"lambda_min": 0.5, "lambda_grid": [0.5, 1.0],
                                                "interval": [0.5, 2.0]}))
        assert config.numeric.lambda_grid[0] == config.numeric.lambda_min

    def test_epsilons_sorted_toward_axis(self):
        config = parse_config(document(numeric={"epsilons": [0.001, 0.1, 0.01]}))
        assert config.numeric.epsilons == (0.1, 0.01, 0.001)

    def test_tabulated(self):
        tab = {"x": [0, 1, 2, 3], "p": [1, 1, 1, 1], "q": [-1, -0.5, -0.1, 0]}
        config = parse_config(document(potential={"tabulated": tab}))
        assert config.potential["tabulated"]["q"] == [-1.0, -0.5, -0.1, 0.0]

    def test_task_override(self):
        assert parse_config(MINIMAL, task_override="verify").task == "verify"

    @pytest.mark.parametrize("doc", [
        document(extra=1),
        document(numeric={"tolerance": 1e-8}),
        document(output={"dir": "x"}),
        document(potential={"name": "free", "shape": "box"}),
        document(data={"kind": "gaussian", "sigma": 1.0}),
    ])
    def test_unknown_keys(self, doc):
        with pytest.raises(ConfigError, match="Unknown key"):
            parse_config(doc)

    @pytest.mark.parametrize("numeric", [
        {"lambda_min": 0.0},
        {"tol": -1e-10},
        {"lambda_grid": [1.0, 0.5]},
        {"epsilons": [0.1, -0.01]},
        {"interval": [4.0, 1.0]},
        {"interval": [1.0, 2.0, 3.0]},
        {"lambda_min": 5.0, "lambda_max": 1.0},
        {"n_scan": 4},
        {"nu": [1.0]},
        {"lambda_grid": [0.0005, 1.0]},
        {"interval": [0.0005, 1.0]},
        {"lambda_min": 0.5, "interval": [0.25, 1.0]},
        {"x_grid": [-1.0, 1.0]},
        {"t_grid": [0.0, 10.0]},
        {"lambda_cap": 30.0},
    ])
    def test_invalid_numeric(self, numeric):
        with pytest.raises(ConfigError):
            parse_config(document(numeric=numeric))

    def test_invalid_top_level(self):
        with pytest.raises(ConfigError):
            parse_config({"task": "density"})
        with pytest.raises(ConfigError):
            parse_config(document(task="plot"))
        with pytest.raises(ConfigError):
            parse_config(document(version=2))
        with pytest.raises(ConfigError):
            parse_config(document(seed=-1))
        with pytest.raises(ConfigError):
            parse_config(document(output={"formats": ["xml"]}))
        with pytest.raises(ConfigError):
            parse_config(document(output={"precision": 20}))
        with pytest.raises(ConfigError):
            parse_config(document(data={"kind": "square"}))

    def test_round_trip_dict(self):
        config = parse_config(document(seed=3))
        assert config.to_dict()["seed"] == 3
        assert config.to_dict()["numeric"]["tol"] == 1e-10


class TestLoadConfig:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(str(tmp_path / "missing.json"))

    def test_bad_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(str(path))

    def test_reads_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(MINIMAL))
        assert load_config(str(path)).task == "density"


class TestResolveThreads:
    def test_explicit(self):
        assert resolve_threads(3) == 3

    def test_env(self):
        with mock.patch.dict(os.environ, {"WEYLSPEC_THREADS": "5"}):
            assert resolve_threads() == 5

    def test_bad_env(self):
        with mock.patch.dict(os.environ, {"WEYLSPEC_THREADS": "many"}):
            with pytest.raises(ConfigError):
                resolve_threads()

    def test_negative(self):
        with pytest.raises(ConfigError):
            resolve_threads(-1)

    def test_auto_uses_physical_cores(self):
        fake = mock.Mock()
        fake.cpu_count.return_value = 6
        with mock.patch.object(settings, "HAS_PSUTIL", True), \
                mock.patch.object(settings, "psutil", fake, create=True):
            assert resolve_threads(0) == 6
        fake.cpu_count.assert_called_once_with(logical=False)

    def test_auto_fallback(self):
        with mock.patch.object(settings, "HAS_PSUTIL", False), \
                mock.patch("os.cpu_count", return_value=None):
            assert resolve_threads(0) == 1
