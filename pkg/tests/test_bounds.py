"""Capacity reports for the named channel families."""
import numpy as np
import pytest

from bounds import (
    CapacityReport,
    classical_env_report,
    continuous_mixture_report,
    dad_bound,
    dephrasure_capacities,
    dephrasure_rci,
    ensemble_bound,
    finite_size_report,
    lossy_mixture_report,
    memory_report,
    pipeline_bound,
    pipeline_report,
    report_for,
)
from quantum.channels import dephrasure
from quantum.condsim import dad_ensemble, dephrasure_ensemble
from quantum.entro import h2, reverse_coherent_info


def test_dephrasure_worked_example():
    report = dephrasure_capacities(0.2, 0.1)
    assert report.upper == pytest.approx(0.42480, abs=1e-5)
    assert report.lower == report.upper
    assert report.exact
    assert set(report.capacity_chain) == {"D2", "Q2", "P2", "K"}


@pytest.mark.parametrize("p", np.linspace(0, 1, 7))
@pytest.mark.parametrize("q", np.linspace(0, 1, 7))
def test_dephrasure_grid(p, q):
    report = dephrasure_capacities(p, q)
    assert report.upper == pytest.approx((1 - p) * (1 - h2(q)), abs=1e-12)
    assert dephrasure_rci(p, q) <= report.upper + 1e-12
    assert dephrasure_rci(p, q) == pytest.approx(reverse_coherent_info(dephrasure(p, q)), abs=1e-8)


@pytest.mark.parametrize("p", [0.0, 0.1, 0.5, 0.9])
def test_dephrasure_rci_without_dephasing(p):
    assert dephrasure_rci(p, 0.0) == pytest.approx(1 - p - h2(p), abs=1e-10)


def test_dephrasure_is_symmetric_in_q():
    assert dephrasure_capacities(0.3, 0.2).upper == pytest.approx(dephrasure_capacities(0.3, 0.8).upper)


def test_dephrasure_rci_on_fine_grid():
    for p in np.linspace(0, 1, 50):
        for q in np.linspace(0, 1, 50):
            upper = dephrasure_capacities(p, q).upper
            assert upper == pytest.approx((1 - p) * (1 - h2(q)), abs=1e-12)
            assert dephrasure_rci(p, q) <= upper + 1e-12
            assert dephrasure_rci(p, q) == pytest.approx(reverse_coherent_info(dephrasure(p, q)), abs=1e-8)
        assert dephrasure_rci(p, 0.0) == pytest.approx(1 - p - h2(p), abs=1e-10)


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_dad_bound(p):
    report = dad_bound(p)
    assert report.upper == pytest.approx(1 - p)
    assert report.lower is None
    assert not report.exact
    assert "components" in report.method


def test_ensemble_bound_with_optimizer():
    p, q = 0.05, 0.05
    report = ensemble_bound(dephrasure_ensemble(p, q), with_rci=True)
    assert report.upper == pytest.approx((1 - p) * (1 - h2(q)), abs=1e-3)
    assert report.lower == pytest.approx(dephrasure_rci(p, q), abs=1e-8)
    assert report.lower > 0


def test_ensemble_bound_length_check():
    with pytest.raises(ValueError):
        ensemble_bound(dad_ensemble(0.5), [1.0])


def test_ensemble_bound_reports_inconsistent_rci():
    # component values far below the true REE push the upper bound under the RCI
    with pytest.raises(ValueError, match="exceeds"):
        ensemble_bound(dephrasure_ensemble(0.05, 0.05), [0.1, 0.0], with_rci=True)


def test_pipeline_bound():
    assert pipeline_bound(1.0, 0.25) == pytest.approx(0.75)
    assert pipeline_report(0.5, 0.5).upper == pytest.approx(0.25)
    with pytest.raises(ValueError):
        pipeline_bound(-0.1, 0.5)


def test_pipeline_from_dephasing_parameter():
    report = report_for("pipeline", {"p": 0.2, "q": 0.1})
    assert report.upper == pytest.approx(0.8 * (1 - h2(0.1)), abs=1e-3)


def test_lossy_mixture_report():
    report = lossy_mixture_report([0.5, 0.5], [0.5, 0.8])
    assert report.upper == pytest.approx(1.66096, abs=1e-4)
    assert report.lower == pytest.approx(0.66096, abs=1e-4)


def test_lossy_mixture_lower_is_clipped():
    report = lossy_mixture_report([0.5, 0.5], [0.0, 0.1])
    assert report.lower == 0.0


def test_continuous_mixture_report():
    report = continuous_mixture_report(0.0, 0.5)
    assert report.upper == pytest.approx(1 / np.log(2) - 1, abs=1e-6)
    assert report.lower is None


def test_classical_env_report():
    report = classical_env_report(0.5, [0.0, 1.0], [0j, 0.3 - 0.2j])
    assert report.upper == pytest.approx(1.0)


class TestMemory:
    def test_correlated_pair(self):
        assert memory_report(np.array([[0.5, 0.0], [0.0, 0.5]])).upper == 1.0

    def test_product_table(self):
        joint = np.outer([0.3, 0.7], [0.6, 0.4])
        assert abs(memory_report(joint).upper - (dad_bound(0.3).upper + dad_bound(0.6).upper)) <= 1e-12

    def test_table_shape(self):
        with pytest.raises(ValueError):
            memory_report(np.full(3, 1 / 3))

    def test_dispatch_reshapes_flat_table(self):
        assert report_for("memory", {"joint": [0.5, 0.0, 0.0, 0.5]}).upper == 1.0


def test_finite_size_report():
    report = finite_size_report(0.7, 1000, 0.01)
    assert report.upper == pytest.approx(0.729335, abs=1e-6)
    assert report.params["n"] == 1000


class TestCapacityReport:
    def test_lower_above_upper_rejected(self):
        with pytest.raises(ValueError, match="exceeds"):
            CapacityReport("x", {}, upper=0.5, lower=0.6)

    def test_exact_needs_equal_bounds(self):
        with pytest.raises(ValueError, match="exact"):
            CapacityReport("x", {}, upper=0.5, lower=0.4, exact=True)

    def test_capacity_chain_checked(self):
        with pytest.raises(ValueError):
            CapacityReport("x", {}, upper=1.0, capacity_chain={"D2": 0.5, "Q2": 0.6})
        with pytest.raises(ValueError):
            CapacityReport("x", {}, upper=1.0, capacity_chain={"Q2": 0.7, "P2": 0.6})

    def test_method_and_dict(self):
        report = CapacityReport("x", {"p": 0.1}, upper=1.0, method_notes=[("upper", "a"), ("lower", "b")])
        assert report.method == "upper=a;lower=b"
        assert report.to_dict()["method_notes"] == [["upper", "a"], ["lower", "b"]]


def test_unknown_channel():
    with pytest.raises(ValueError, match="unknown channel"):
        report_for("amplitude-damping", {})
