import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advectlab import analysis
from advectlab.analysis import AnalysisError, ErrorSeries, RunConfig
from advectlab.core import ConfigurationError, InitialCondition

stencil_values = st.floats(-10, 10, allow_nan=False)


def test_closed_form_examples():
    assert analysis.davg_error((1.0, 1.0, 1.0), 1) == 0.0
    assert analysis.davg_error((0.0, 1.0, 2.0), 1) == 0.0
    assert analysis.davg_error((1.0, 0.0, 1.0), 1) == pytest.approx(1 / 6)
    assert analysis.davg_error((2.0,) * 5, 2) == 0.0
    assert analysis.avg_exact((0.0, 1.0, 0.0)) == pytest.approx(2 / 3)
    assert analysis.avg_lagrange1((0.0, 1.0, 0.0)) == 0.5


def test_closed_form_identity_sign():
    u = (0.3, -1.2, 2.0)
    assert analysis.avg_lagrange1(u) - analysis.avg_exact(u) == pytest.approx(analysis.davg_error(u, 1))


def test_davg_error_rejects_bad_stencils():
    with pytest.raises(ValueError):
        analysis.davg_error((1.0, 2.0), 1)
    with pytest.raises(ValueError):
        analysis.davg_error((1.0, 2.0, 3.0), 2)
    with pytest.raises(ValueError):
        analysis.davg_error((1.0,) * 7, 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(stencil_values, min_size=3, max_size=3))
def test_brute_force_degree1(u):
    assert abs(analysis.brute_force_avg("exact", u) - analysis.avg_exact(u)) < 1e-12
    assert abs(analysis.brute_force_avg("lagrange1", u) - analysis.avg_lagrange1(u)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(stencil_values, min_size=5, max_size=5))
def test_brute_force_degree2(u):
    brute = analysis.brute_force_avg("lagrange2", u) - analysis.brute_force_avg("exact", u)
    assert abs(brute - analysis.davg_error(u, 2)) < 1e-12


def test_brute_force_dg_preserves_averages():
    rng = np.random.default_rng(0)
    for degree in (0, 1, 3):
        c = rng.normal(size=(2, degree + 1))
        assert abs(analysis.brute_force_avg("dg", c) - analysis.brute_force_avg("exact", c)) < 1e-13


def test_brute_force_argument_checks():
    with pytest.raises(ValueError):
        analysis.brute_force_avg("exact", (1.0, 2.0, 3.0), quad_points=8)
    with pytest.raises(ValueError):
        analysis.brute_force_avg("weno", (1.0, 2.0, 3.0))


def test_geometric_schedule():
    s = analysis.geometric_schedule(100)
    assert s[:4] == [1, 2, 3, 4] and s[-1] == 100
    assert all(b > a for a, b in zip(s, s[1:]))
    assert analysis.geometric_schedule(0) == []


def test_error_series_validation():
    s = ErrorSeries()
    s.append(1, 0.5)
    with pytest.raises(ValueError):
        s.append(1, 0.1)
    with pytest.raises(ValueError):
        s.append(2, float("nan"))
    with pytest.raises(ValueError):
        s.append(3, -1.0)
    assert s.at(1) == 0.5


def _series(power, steps):
    s = ErrorSeries()
    for k in steps:
        s.append(k, 1e-12 * k**power)
    return s


@pytest.mark.parametrize("power", [0.0, 0.5, 1.0])
def test_fit_slope_recovers_power_laws(power):
    s = _series(power, analysis.geometric_schedule(10_000))
    assert abs(analysis.fit_slope(s, 100, 10_000) - power) < 1e-10


def test_fit_slope_needs_five_points():
    s = _series(1.0, [1, 10, 100, 1000])
    with pytest.raises(AnalysisError):
        analysis.fit_slope(s, 1, 1000)


def test_loglog_order():
    n = np.array([50, 100, 200, 400])
    assert abs(analysis.loglog_order(n, 3.0 * n**-3.0) - 3.0) < 1e-12


def test_run_config_validation():
    with pytest.raises(ConfigurationError, match="power of two"):
        RunConfig("fft", 100).validate()
    with pytest.raises(ConfigurationError, match="degree"):
        RunConfig("lagrange", 100, degree=0).validate()
    with pytest.raises(ConfigurationError, match="steps"):
        RunConfig("dg", 100, steps=-1).validate()


def test_record_series_is_deterministic():
    cfg = RunConfig("lagrange", 50, 3, 1.0, 0.0123, 200)
    a = analysis.record_series(cfg)
    b = analysis.record_series(cfg)
    assert a.records == b.records
    assert a.metadata["method"] == "lagrange"


def test_record_series_whole_cell_steps_are_exact():
    for method, degree in (("lagrange", 3), ("spline", 1), ("dg", 2), ("fft", 1)):
        n = 64
        cfg = RunConfig(method, n, degree, 1.0, 3 * 2.0 / n, 50)
        s = analysis.record_series(cfg)
        assert len(set(s.errors.tolist())) == 1


def test_pointwise_error_smoke():
    cfg = RunConfig("lagrange", 51, 1, 1.0, 2e-3, 100)
    res = analysis.pointwise_error(cfg)
    assert res.x.shape == (51,)
    assert res.correlation > 0.9


def test_one_step_errors_signs():
    n = 40
    for c in (0.2, 0.8):
        tau = c * 2.0 / n
        avg, _ = analysis.one_step_errors("lagrange", InitialCondition("convex"), n, tau)
        assert np.all(avg[1:-1] > 0)
        avg, _ = analysis.one_step_errors("lagrange", InitialCondition("concave"), n, tau)
        assert np.all(avg[1:-1] < 0)
        avg, pts = analysis.one_step_errors("dg", InitialCondition("convex"), n, tau, degree=1)
        assert np.max(np.abs(avg)) < 1e-12
        assert np.any(pts > 0) and np.any(pts < 0)
