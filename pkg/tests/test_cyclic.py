import numpy as np
import pytest

from specpredict.duality import CyclicModel, cyclic_exact_verify, cyclic_project
from specpredict.errors import ParseError

from helpers import random_cyclic_model


def test_uniform_weight_full_subset():
    model = CyclicModel(
        n_points=8, q=1, samples=np.ones((8, 1, 1), dtype=complex), subset=tuple(range(1, 8))
    )
    report = cyclic_exact_verify(model)
    assert report.passed
    # every nonzero frequency observed: the annihilator is trivial and the
    # error matrix is the harmonic mean of the samples
    assert report.deviations["dual_dimension"] == 0.0
    _, delta, _ = cyclic_project(model.samples, list(model.subset))
    assert delta[0, 0].real == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n_points", [4, 8, 16])
@pytest.mark.parametrize("q", [1, 2])
def test_random_instances_verify_exactly(n_points, q):
    for seed in range(3):
        model = random_cyclic_model(n_points, q, 100 * n_points + 10 * q + seed)
        report = cyclic_exact_verify(model)
        assert report.passed, report.deviations
        assert report.deviations["dual_dimension"] == n_points - len(model.subset) - 1
        assert report.deviations["error_matrix_routes"] <= 1e-12
        assert report.deviations["containment_null_in_span"] <= 1e-10
        assert report.deviations["containment_span_in_null"] <= 1e-10


def test_alteration_stability():
    # enlarging the observed set by one frequency keeps exactness
    model = random_cyclic_model(8, 2, 5)
    base = set(model.subset) - {4}
    if not base:
        base = {1}
    small = CyclicModel(8, 2, model.samples, tuple(sorted(base)))
    large = CyclicModel(8, 2, model.samples, tuple(sorted(base | {4})))
    assert cyclic_exact_verify(small).passed
    assert cyclic_exact_verify(large).passed


def test_model_validation():
    with pytest.raises(ParseError):
        CyclicModel(4, 1, np.zeros((4, 1, 1)), (1,))
    with pytest.raises(ParseError):
        CyclicModel(4, 1, np.ones((4, 1, 1)), (0,))
    with pytest.raises(ParseError):
        CyclicModel(4, 1, np.ones((4, 1, 1)), ())
    with pytest.raises(ParseError):
        CyclicModel(4, 1, np.ones((8, 1, 1)), (1,))


def test_deterministic_report():
    model = random_cyclic_model(8, 1, 9)
    first = cyclic_exact_verify(model).to_json_dict()
    second = cyclic_exact_verify(model).to_json_dict()
    assert first == second
