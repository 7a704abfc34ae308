"""Tests for the property suites."""

import pytest

from weylspec import SturmLiouville, gaussian
from weylspec.settings import NumericConfig
from weylspec.verify import SUITES, PropertyRecord, run_suites, summarize

CHEAP = ["coefficients", "flow", "wronskian", "green", "density", "bound_states", "zero_energy"]


@pytest.fixture(scope="module")
def free_op():
    return SturmLiouville.from_spec({"name": "free"}, threads=1)


@pytest.fixture(scope="module")
def data():
    return gaussian(5.0, 0.7)


class TestRunSuites:
    def test_free_cheap_suites_pass(self, free_op, data):
        records = run_suites(free_op, data, seed=0, suites=CHEAP)
        failed = [f"{r.suite}.{r.name}: {r.value:.3g} > {r.threshold:.3g}" for r in records if not r.passed]
        assert failed == []
        names = {r.name for r in records}
        assert "free_closed_form" in names
        assert "free_m_identically_one" in names
        green = {r.name: r for r in records if r.suite == "green"}
        assert green["kernel_symmetric"].detail == "1000 samples"
        wronskian = [r for r in records if r.suite == "wronskian"][0]
        assert wronskian.detail == "100 nu x 10 x"

    def test_resolvent_suite(self, free_op, data):
        records = run_suites(free_op, data, suites=["resolvent"])
        assert [r.name for r in records] == ["defect_identity", "norm_bound"]
        assert all(r.passed for r in records)

    def test_seed_reproducible(self, free_op, data):
        a = run_suites(free_op, data, seed=7, suites=["coefficients", "flow"])
        b = run_suites(free_op, data, seed=7, suites=["coefficients", "flow"])
        assert [r.value for r in a] == [r.value for r in b]

    def test_unknown_suite(self, free_op, data):
        with pytest.raises(ValueError, match="Unknown suite"):
            run_suites(free_op, data, suites=["nonsense"])

    def test_all_suites_registered(self):
        assert len(SUITES) == 14
        assert "time_average" in SUITES

    def test_capped_well_bound_states(self, data):
        numeric = NumericConfig(n_scan=64)
        op = SturmLiouville.from_spec({"name": "capped_well", "params": [1.0, 5.0, 0.1]}, numeric=numeric,
                                      threads=1)
        records = run_suites(op, data, suites=["bound_states", "zero_energy"])
        by_name = {r.name: r for r in records}
        assert by_name["eigenvalues_negative"].passed
        assert by_name["orthogonal"].passed
        assert by_name["zero_not_eigenvalue"].passed


class TestSummarize:
    def test_keys(self):
        records = [PropertyRecord("flow", "a", True, 0.0, 1.0), PropertyRecord("green", "b", False, 2.0, 1.0)]
        assert summarize(records) == {"flow.a": True, "green.b": False}
        assert records[0].to_row()["suite"] == "flow"


@pytest.fixture(scope="module")
def well_op():
    numeric = NumericConfig(n_scan=64)
    return SturmLiouville.from_spec({"name": "capped_well", "params": [1.0, 5.0, 0.1]}, numeric=numeric,
                                    threads=1)


class TestExpansionSuites:
    @pytest.mark.parametrize("op_name", ["free_op", "well_op"])
    def test_projection_suite(self, op_name, data, request):
        op = request.getfixturevalue(op_name)
        records = {r.name: r for r in run_suites(op, data, suites=["projection"])}
        assert records["idempotent"].threshold == 1e-6
        assert records["localized"].threshold == 1e-4
        assert records["idempotent"].passed, records["idempotent"].detail
        assert records["localized"].passed, records["localized"].detail

    def test_capped_well_resolvent_suite(self, well_op, data):
        records = {r.name: r for r in run_suites(well_op, data, suites=["resolvent"])}
        assert records["defect_identity"].threshold == 1e-6
        assert records["defect_identity"].passed, records["defect_identity"].detail

    def test_capped_well_time_average_suite(self, well_op, data):
        records = {r.name: r for r in run_suites(well_op, data, suites=["time_average"])}
        assert set(records) == {"defect_non_increasing", "defect_at_largest_T"}
        assert all(r.passed for r in records.values()), [r.detail for r in records.values()]
