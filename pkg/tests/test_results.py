"""Tests for result containers and file emission."""

import json

import numpy as np
import pytest

from weylspec import __version__
from weylspec.errors import NumericalError
from weylspec.results import (
    TaskResult,
    to_jsonable,
    write_diagnostic,
    write_manifest,
)


@pytest.fixture
def result():
    table = {"lambda": np.array([1.0, 2.0]), "density": np.array([1 / np.pi, np.sqrt(2) / np.pi])}
    return TaskResult("density", {"density": table}, {"points": 2}, {"density_positive": True})


class TestTaskResult:
    def test_getitem(self, result):
        assert result["points"] == 2
        assert list(result["density"]) == ["lambda", "density"]
        with pytest.raises(KeyError):
            result["missing"]

    def test_len_and_repr(self, result):
        assert len(result) == 1
        assert "density" in repr(result)

    def test_to_dataframe(self, result):
        pd = pytest.importorskip("pandas")
        df = result.to_dataframe()
        assert isinstance(df, pd.DataFrame)
        assert list(df.columns) == ["lambda", "density"]
        assert len(df) == 2

    def test_to_dataframe_needs_name(self, result):
        result.tables["other"] = {"x": np.zeros(1)}
        with pytest.raises(KeyError):
            result.to_dataframe()

    def test_to_dataframe_without_pandas(self, result):
        import builtins

        real_import = builtins.__import__

        def fake_import(name, *args, **kwargs):
            if name == "pandas":
                raise ImportError("no pandas")
            return real_import(name, *args, **kwargs)

        with pytest.MonkeyPatch.context() as mp:
            mp.setattr(builtins, "__import__", fake_import)
            with pytest.raises(ImportError, match="pip install pandas"):
                result.to_dataframe()


class TestWrite:
    def test_csv_header_and_precision(self, result, tmp_path):
        files = result.write(str(tmp_path))
        assert sorted(p.rsplit("/", 1)[-1] for p in files) == ["density.csv", "density.json"]
        lines = (tmp_path / "density.csv").read_text().splitlines()
        assert lines[0] == "# weylspec-density v1"
        assert lines[1] == "lambda,density"
        assert float(lines[2].split(",")[1]) == 1 / np.pi

    def test_json_only(self, result, tmp_path):
        files = result.write(str(tmp_path), formats=("json",))
        assert len(files) == 1
        assert json.loads((tmp_path / "density.json").read_text()) == {"points": 2}

    def test_manifest(self, result, tmp_path):
        files = result.write(str(tmp_path))
        path = write_manifest(str(tmp_path), {"task": "density"}, result, 1.5, files)
        manifest = json.loads(open(path).read())
        assert manifest["package_version"] == __version__
        assert manifest["properties"] == [{"name": "density_positive", "status": "pass"}]
        assert manifest["files"] == ["density.csv", "density.json"]
        assert manifest["wall_time_s"] == 1.5

    def test_diagnostic(self, tmp_path):
        err = NumericalError("step size underflow", location=12.5)
        path = write_diagnostic(str(tmp_path / "run"), "density", {"task": "density"}, err)
        payload = json.loads(open(path).read())
        assert payload["error"] == "NumericalError"
        assert payload["location"] == 12.5
        assert payload["message"] == "step size underflow"


class TestToJsonable:
    def test_conversions(self):
        out = to_jsonable({
            "c": 1 + 2j,
            "a": np.arange(3),
            "f": np.float64(0.5),
            "b": np.bool_(True),
            "t": (1, 2),
            1: np.int64(4),
        })
        assert out == {"c": [1.0, 2.0], "a": [0, 1, 2], "f": 0.5, "b": True, "t": [1, 2], "1": 4}
        json.dumps(out)
