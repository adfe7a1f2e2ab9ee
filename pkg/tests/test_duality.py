import numpy as np
import pytest

from specpredict import matrices
from specpredict.duality import (
    FiniteSection,
    _solve_gram,
    dual_infimum_check,
    dual_projection_check,
    gram_project,
    trace_normalized_check,
)
from specpredict.errors import IllConditionedGram, ParseError, SingularSample
from specpredict.index_sets import IndexSetSpec, parse_index_set
from specpredict.predictors import interpolate_all, nakazi_predict, yaglom_gap
from specpredict.weights import WeightFunction

from helpers import boundary_weight, cached_factor, cached_section, random_constant

FAMILIES = [
    IndexSetSpec(family="all-but-zero"),
    IndexSetSpec(family="gap", n=1),
    IndexSetSpec(family="past"),
    IndexSetSpec(family="nakazi", n=1),
    IndexSetSpec(family="future-one", n=1),
    IndexSetSpec(family="missing-past", n=1),
]


def test_constant_weight_projects_to_zero():
    c = random_constant(2, 0)
    samples = WeightFunction.constant(c).evaluate_on_grid(64)
    coeffs, delta = gram_project(samples, [-3, -1, 2])
    assert all(np.max(np.abs(m)) <= 1e-12 for m in coeffs.values())
    np.testing.assert_allclose(delta, c, atol=1e-12)


def test_gram_matches_interpolation():
    section = cached_section("ma1")
    _, delta, _ = section.project(parse_index_set("all-but-zero").truncate(64))
    assert delta[0, 0].real == pytest.approx(0.75, abs=1e-6)


def test_gram_upper_bounds_nakazi():
    section = cached_section("ma1")
    _, delta, _ = section.project(parse_index_set("nakazi:1").truncate(128))
    value = delta[0, 0].real
    assert 0.8 <= value + 1e-12 <= 0.8 + 1e-5


@pytest.mark.parametrize("key", ["ma1", "q2a"])
@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.to_text())
def test_oracle_dominance_and_window_monotonicity(key, spec):
    section = cached_section(key)
    closed = _closed_form(key, spec)
    previous = None
    for window in (16, 32, 64, 128):
        _, delta, _ = section.project(spec.truncate(window))
        assert matrices.loewner_leq(closed, delta, eps=1e-9)
        if previous is not None:
            assert matrices.loewner_leq(delta, previous, eps=1e-9)
        previous = delta


def _closed_form(key, spec):
    section = cached_section(key)
    if spec.family == "all-but-zero":
        return interpolate_all(section.weight).delta
    if spec.family == "gap":
        return yaglom_gap(section.weight, spec.n).delta
    factor = cached_factor(key)
    if spec.family == "past":
        return nakazi_predict(factor, 0).delta
    if spec.family == "nakazi":
        return nakazi_predict(factor, spec.n).delta
    if spec.family == "future-one":
        from specpredict.predictors import single_future_delta

        return single_future_delta(factor, spec.n)
    from specpredict.predictors import missing_past_delta

    return missing_past_delta(factor, spec.n)


def test_projection_formula_constant_weight():
    c = random_constant(2, 1)
    section = FiniteSection(WeightFunction.constant(c), 256)
    report = dual_projection_check(section, IndexSetSpec(family="all-but-zero"), 16)
    assert report.passed
    assert report.deviations["projection_identity"] <= 1e-12


def test_projection_formula_matches_gap_and_nakazi():
    section = cached_section("ma1")
    r_gap = dual_projection_check(section, parse_index_set("gap:1"), 96)
    assert r_gap.passed and r_gap.deviations["delta_direct_vs_dual_linear"] <= 1e-6
    r_nak = dual_projection_check(section, parse_index_set("nakazi:2"), 128)
    assert r_nak.passed
    _, delta, _ = section.project(parse_index_set("nakazi:2").truncate(128))
    assert delta[0, 0].real == pytest.approx(16.0 / 21.0, abs=1e-6)


def test_infimum_product_identity_grid():
    section = FiniteSection(WeightFunction.constant(np.eye(2)), 256)
    report = dual_infimum_check(section, IndexSetSpec(family="past"), 16)
    assert report.deviations["delta_scalar_direct"] == pytest.approx(1.0, abs=1e-12)
    assert report.deviations["dual_infimum"] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("text", ["past", "nakazi:1", "gap:1"])
def test_infimum_product_ma1(text):
    report = dual_infimum_check(cached_section("ma1"), parse_index_set(text), 96)
    assert report.deviations["product_error"] <= 1e-5


@pytest.mark.parametrize("key", ["q2a", "q2b"])
def test_infimum_product_matrix_weight(key):
    report = dual_infimum_check(cached_section(key), parse_index_set("nakazi:1"), 96)
    assert report.deviations["product_error"] <= 1e-4


def test_trace_identity_trivial():
    section = FiniteSection(WeightFunction.constant(np.eye(2)), 256)
    report = trace_normalized_check(section, IndexSetSpec(family="all-but-zero"), 16)
    assert report.deviations["lhs_normalized_trace"] == pytest.approx(1.0, abs=1e-12)
    assert report.deviations["rhs"] == pytest.approx(1.0, abs=1e-12)
    # classical-trace convention only agrees at q = 1
    assert report.deviations["lhs_classical_trace"] == pytest.approx(0.5, abs=1e-12)


def test_trace_identity_ma1_and_diagonal():
    report = trace_normalized_check(cached_section("ma1"), parse_index_set("past"), 96)
    assert report.deviations["relative_deviation_normalized"] <= 1e-4
    # scalar case: both conventions coincide
    assert report.deviations["relative_deviation_classical"] <= 1e-4
    report = trace_normalized_check(cached_section("diag"), parse_index_set("past"), 96)
    assert report.passed
    assert report.deviations["relative_deviation_classical"] > 1e-2


def test_dual_checks_propagate_singular_samples():
    with pytest.raises(SingularSample):
        dual_projection_check(boundary_weight(), IndexSetSpec(family="past"), 16, n_grid=64)


def test_window_sets_are_direct_only():
    section = cached_section("ma1")
    spec = parse_index_set("window:[-2,-1,1]")
    _, delta, _ = section.project(spec.truncate(8))
    assert delta[0, 0].real > 0
    with pytest.raises(ParseError):
        dual_projection_check(section, spec, 8)


def test_solve_gram_flags_singular_systems():
    with pytest.raises(IllConditionedGram):
        _solve_gram(np.zeros((3, 3), dtype=complex), np.zeros((3, 1), dtype=complex))
    nearly = np.diag([1.0, 1e-14]).astype(complex)
    with pytest.raises(IllConditionedGram):
        _solve_gram(nearly, np.zeros((2, 1), dtype=complex))


def test_report_serialization_shape():
    report = dual_projection_check(cached_section("ma1"), parse_index_set("past"), 32)
    data = report.to_json_dict()
    assert set(data) == {"theorem", "K", "N_grid", "deviations", "pass"}
    assert data["K"] == 32 and data["N_grid"] == 4096


def test_window_too_large_for_grid():
    from specpredict.errors import GridTooCoarse

    section = FiniteSection(WeightFunction.constant(np.eye(1)), 64)
    with pytest.raises(GridTooCoarse):
        section.project(IndexSetSpec(family="all-but-zero").truncate(16))


def test_three_channel_weight_matches_oracle():
    from helpers import random_factor_weight

    w3, _ = random_factor_weight(3, 2, 31)
    from specpredict.factorization import factorize
    from specpredict.predictors import missing_past_delta, nakazi_predict

    section = FiniteSection(w3, 2048)
    factor = factorize(w3, truncation=32)
    spec = IndexSetSpec(family="nakazi", n=1)
    _, delta, _ = section.project(spec.truncate(64))
    assert np.max(np.abs(nakazi_predict(factor, 1).delta - delta)) <= 1e-10
    spec = IndexSetSpec(family="missing-past", n=2)
    _, delta, _ = section.project(spec.truncate(64))
    assert np.max(np.abs(missing_past_delta(factor, 2) - delta)) <= 1e-10
    report = trace_normalized_check(section, IndexSetSpec(family="past"), 64)
    assert report.deviations["relative_deviation_normalized"] <= 1e-10


def test_gram_blocks_depend_on_lag_difference_only():
    from specpredict.duality import _assemble_gram

    section = cached_section("q2a")
    lags = [-3, -1, 1, 4]
    gram, _ = _assemble_gram(section._direct_table, lags)
    q = section.q
    for j, lag_j in enumerate(lags):
        for k, lag_k in enumerate(lags):
            for j2, lag_j2 in enumerate(lags):
                for k2, lag_k2 in enumerate(lags):
                    if lag_j - lag_k == lag_j2 - lag_k2:
                        np.testing.assert_array_equal(
                            gram[j * q:(j + 1) * q, k * q:(k + 1) * q],
                            gram[j2 * q:(j2 + 1) * q, k2 * q:(k2 + 1) * q],
                        )
    # Hermitian as a whole
    assert np.max(np.abs(gram - gram.conj().T)) <= 1e-14
