"""Closed-form prediction error matrices and predictors.

Every solver returns the minimal achievable error covariance (minimal in
Loewner order) for predicting the lag-0 value of a multivariate stationary
sequence from the lags of one index-set family, together with a scalar
figure of merit: the q-th root of the determinant of that error matrix.

The families split into two computational routes:

* inverse-density route (interpolation and gap sets): everything is built
  from Fourier coefficients of the inverse density, with a block-Toeplitz
  solve in the gap case (Yaglom's interpolation recipe);
* analytic route (past, Nakazi, single-future, missing-past sets): the
  formulas consume Taylor coefficients of the outer factor and of its
  inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrices, weights
from .errors import (
    NotInverseIntegrable,
    ParseError,
    SingularInnerMatrix,
    SingularSample,
    SingularToeplitz,
)
from .factorization import OuterFactor, require_truncation
from .index_sets import IndexSetSpec

TOL_PRED = 1e-8
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class Predictor:
    """Replayable predictor: grid samples plus a serializable description.

    `kind` is "frequency_coefficients" for a finite lag map and
    "factorization_form" for the closed-form functionals; `samples` holds the
    predictor evaluated on the grid the solution was computed on.
    """

    kind: str
    samples: np.ndarray | None = None
    coefficients: dict[int, np.ndarray] | None = None
    form: dict | None = None

    def to_json_dict(self) -> dict:
        if self.kind == "frequency_coefficients":
            return {
                "kind": self.kind,
                "coefficients": [
                    {"lag": lag, **matrices.matrix_to_parts(mat)}
                    for lag, mat in sorted(self.coefficients.items())
                ],
            }
        return {"kind": self.kind, **(self.form or {})}


@dataclass(frozen=True)
class PredictionSolution:
    index_set: IndexSetSpec
    delta: np.ndarray
    delta_scalar_value: float
    predictor: Predictor | None

    def to_json_dict(self) -> dict:
        return {
            "set": self.index_set.to_json_dict(),
            "delta_re": np.asarray(self.delta).real.tolist(),
            "delta_im": np.asarray(self.delta).imag.tolist(),
            "delta_scalar": self.delta_scalar_value,
            "predictor": self.predictor.to_json_dict() if self.predictor else None,
        }


def delta_scalar(delta: np.ndarray, eps: float = matrices.EPS_PD) -> float:
    """q-th root of the determinant of a nonnegative Hermitian matrix, in
    log space; exactly zero when the matrix is numerically singular."""
    delta = matrices.hermitian_part(np.asarray(delta, dtype=complex))
    evals = np.linalg.eigvalsh(delta)
    scale = max(1.0, float(evals[-1]))
    if evals[0] <= eps * scale:
        return 0.0
    return float(np.exp(np.mean(np.log(evals))))


def _inverse_samples(weight: weights.WeightFunction, n_grid: int | None) -> np.ndarray:
    try:
        return weights.invert_samples(weight.evaluate_on_grid(n_grid))
    except SingularSample as exc:
        raise NotInverseIntegrable(str(exc)) from exc


def _solve_hermitian(block_matrix: np.ndarray, rhs: np.ndarray, error_cls):
    if np.linalg.cond(block_matrix) > _COND_LIMIT:
        raise error_cls("system is numerically singular")
    try:
        return np.linalg.solve(block_matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise error_cls(str(exc)) from exc


# ---------------------------------------------------------------------------
# inverse-density route


def interpolate_all(weight: weights.WeightFunction,
                    n_grid: int | None = None) -> PredictionSolution:
    """Error matrix for observing every lag but 0: the inverse of the mean of
    the inverse density.  The predictor is I - delta * W^-1(t)."""
    inv = _inverse_samples(weight, n_grid)
    mean_inv = weights.mean_integral(inv)
    delta = matrices.hermitian_part(np.linalg.inv(mean_inv))
    scalar = delta_scalar(delta)
    eye = np.eye(weight.q, dtype=complex)
    samples = eye - np.einsum("ij,njk->nik", delta, inv)
    predictor = Predictor(
        kind="factorization_form",
        samples=samples,
        form={"form": "inverse-density", "gain": matrices.matrix_to_parts(delta)},
    )
    return PredictionSolution(
        IndexSetSpec(family="all-but-zero"), delta, scalar, predictor
    )


def _inverse_coefficient_table(inv_samples: np.ndarray, n_lags: int) -> dict[int, np.ndarray]:
    return weights.fourier_coefficients(inv_samples, range(-n_lags, n_lags + 1))


def _gap_blocks(table: dict[int, np.ndarray], n: int, q: int) -> np.ndarray:
    gamma = np.empty((n * q, n * q), dtype=complex)
    for j in range(n):
        for k in range(n):
            gamma[j * q:(j + 1) * q, k * q:(k + 1) * q] = table[j - k]
    return gamma


def yaglom_gap(weight: weights.WeightFunction, n: int,
               n_grid: int | None = None) -> PredictionSolution:
    """Interpolation with a gap: all lags are observed except 0..n.

    Solves sum_k C_{j-k} D_k* = C_j (j = 1..n) for the dual coefficients
    D_k, where C_l is the lag-l Fourier coefficient of the inverse density;
    the error matrix is the inverse of the mean of (I - sum D_k e_k) W^-1.
    """
    if n < 1:
        raise ParseError("gap order must be >= 1")
    inv = _inverse_samples(weight, n_grid)
    q = weight.q
    table = _inverse_coefficient_table(inv, n)
    gamma = _gap_blocks(table, n, q)
    rhs = np.vstack([table[j] for j in range(1, n + 1)])
    sol = _solve_hermitian(gamma, rhs, SingularToeplitz)
    d = {k: matrices.adjoint(sol[(k - 1) * q:k * q, :]) for k in range(1, n + 1)}

    mean_comb = table[0] - sum(d[k] @ table[k] for k in range(1, n + 1))
    delta = matrices.hermitian_part(np.linalg.inv(mean_comb))
    scalar = delta_scalar(delta)

    n_pts = inv.shape[0]
    trig = weights.synthesize_on_grid(d, n_pts, q)
    eye = np.eye(q, dtype=complex)
    complement = np.einsum("ij,njk->nik", delta, (eye - trig) @ inv)
    predictor = Predictor(
        kind="factorization_form",
        samples=eye - complement,
        form={
            "form": "gap",
            "gain": matrices.matrix_to_parts(delta),
            "coefficients": [
                {"lag": k, **matrices.matrix_to_parts(d[k])} for k in sorted(d)
            ],
        },
    )
    return PredictionSolution(IndexSetSpec(family="gap", n=n), delta, scalar, predictor)


def yaglom_det_ratio(weight: weights.WeightFunction, n: int,
                     n_grid: int | None = None) -> float:
    """Determinant of the gap error matrix as a ratio of consecutive
    block-Toeplitz determinants, evaluated in log space."""
    if n < 1:
        raise ParseError("gap order must be >= 1")
    inv = _inverse_samples(weight, n_grid)
    table = _inverse_coefficient_table(inv, n + 1)
    q = weight.q
    logdets = []
    for size in (n, n + 1):
        gamma = _gap_blocks(table, size, q)
        if np.linalg.cond(gamma) > _COND_LIMIT:
            raise SingularToeplitz(f"order-{size} block system is numerically singular")
        sign, logdet = np.linalg.slogdet(gamma)
        if sign.real <= 0:
            raise SingularToeplitz(f"order-{size} block system is not positive definite")
        logdets.append(logdet)
    return float(np.exp(logdets[0] - logdets[1]))


def szego_delta(weight: weights.WeightFunction, n_grid: int | None = None) -> float:
    """Scalar one-step error figure: geometric mean of det W over the circle,
    taken as zero when log det W has no finite grid mean."""
    value = weights.log_det_mean(weight, n_grid)
    if value == float("-inf"):
        return 0.0
    return float(np.exp(value / weight.q))


# ---------------------------------------------------------------------------
# analytic route


def nakazi_predict(factor: OuterFactor, n: int) -> PredictionSolution:
    """Past plus the next n future lags observed.

    The error matrix is the inverse of sum_{j=0..n} B_j B_j* built from the
    inverse-factor coefficients; n = 0 is the classical pure-past one-step
    error A_0* A_0.
    """
    if n < 0:
        raise ParseError("nakazi order must be >= 0")
    require_truncation(factor, n)
    b = factor.b_coefficients[: n + 1]
    gram = sum(bj @ matrices.adjoint(bj) for bj in b)
    delta = matrices.hermitian_part(np.linalg.inv(gram))
    scalar = delta_scalar(delta)

    n_pts = factor.n_grid
    phi = factor.factor_samples(n_pts)
    tail = weights.synthesize_on_grid({j: b[j] for j in range(n + 1)}, n_pts, factor.q)
    inv_phi_star = np.linalg.inv(matrices.adjoint(phi))
    eye = np.eye(factor.q, dtype=complex)
    samples = eye - np.einsum("ij,njk->nik", delta, tail @ inv_phi_star)
    predictor = Predictor(
        kind="factorization_form",
        samples=samples,
        form={
            "form": "analytic-tail",
            "gain": matrices.matrix_to_parts(delta),
            "coefficients": [
                {"lag": j, **matrices.matrix_to_parts(b[j])} for j in range(n + 1)
            ],
        },
    )
    return PredictionSolution(IndexSetSpec(family="nakazi", n=n), delta, scalar, predictor)


def single_future_delta(factor: OuterFactor, n: int) -> np.ndarray:
    """Error matrix when the past and the single future lag n are observed.

    Primary form: A_0* (I - A_n (sum_{j<=n} A_j* A_j)^-1 A_n*) A_0.  When A_n
    is regular the equivalent product form is evaluated as well and must
    agree to 1e-9.
    """
    if n < 1:
        raise ParseError("single-future order must be >= 1")
    require_truncation(factor, n)
    a = factor.a_coefficients
    q = factor.q
    eye = np.eye(q, dtype=complex)
    gram_n = sum(matrices.adjoint(a[j]) @ a[j] for j in range(n + 1))
    inner = eye - a[n] @ np.linalg.solve(gram_n, matrices.adjoint(a[n]))
    delta = matrices.hermitian_part(matrices.adjoint(a[0]) @ inner @ a[0])
    if np.linalg.cond(a[n]) < 1e8:
        gram_prev = gram_n - matrices.adjoint(a[n]) @ a[n]
        alt = (
            matrices.adjoint(a[0])
            @ np.linalg.solve(matrices.adjoint(a[n]), gram_prev)
            @ np.linalg.solve(gram_n, matrices.adjoint(a[n]))
            @ a[0]
        )
        gap = matrices.normalized_norm(delta - alt)
        if gap > 1e-9 * max(1.0, matrices.normalized_norm(delta)):
            raise RuntimeError(f"equivalent single-future forms disagree by {gap:.3e}")
    return delta


def missing_past_delta(factor: OuterFactor, n: int) -> np.ndarray:
    """Error matrix when lag -n is removed from an otherwise full past.

    The complement of this set is a reflected single-future problem for the
    inverse density, whose analytic factor has coefficients B_j*; running
    the single-future formula there and inverting gives

        delta = [B_0 (I - B_n* (sum_{j<=n} B_j B_j*)^-1 B_n) B_0*]^-1,

    which reduces to the familiar scalar expression at q = 1.  The
    regular-B_n product form is cross-checked when available.
    """
    if n < 1:
        raise ParseError("missing-past order must be >= 1")
    require_truncation(factor, n)
    b = factor.b_coefficients
    q = factor.q
    eye = np.eye(q, dtype=complex)
    gram_n = sum(b[j] @ matrices.adjoint(b[j]) for j in range(n + 1))
    inner = eye - matrices.adjoint(b[n]) @ np.linalg.solve(gram_n, b[n])
    dual_delta = b[0] @ inner @ matrices.adjoint(b[0])
    if np.linalg.cond(dual_delta) > _COND_LIMIT:
        raise SingularInnerMatrix("inner matrix of the missing-past formula is singular")
    delta = matrices.hermitian_part(np.linalg.inv(dual_delta))
    if np.linalg.cond(b[n]) < 1e8:
        gram_prev = gram_n - b[n] @ matrices.adjoint(b[n])
        alt_dual = (
            b[0]
            @ np.linalg.solve(b[n], gram_prev)
            @ np.linalg.solve(gram_n, b[n])
            @ matrices.adjoint(b[0])
        )
        gap = matrices.normalized_norm(dual_delta - alt_dual)
        if gap > 1e-9 * max(1.0, matrices.normalized_norm(dual_delta)):
            raise RuntimeError(f"equivalent missing-past forms disagree by {gap:.3e}")
    return delta


def szego_functional_probe(weight: weights.WeightFunction,
                           probe: dict[int, np.ndarray],
                           n_grid: int | None = None) -> float:
    """Mean over the circle of det((I-T) W (I-T)*)^(1/q) for a trig
    polynomial T with strictly positive frequencies.

    For every admissible T the value dominates the scalar one-step error
    figure, and the finite-section minimizers drive it down to that figure.
    """
    for lag in probe:
        if lag < 1:
            raise ParseError("probe polynomials must use strictly positive lags")
    w = weight.evaluate_on_grid(n_grid)
    n_pts, q = w.shape[0], weight.q
    eye = np.eye(q, dtype=complex)
    trig = weights.synthesize_on_grid(probe, n_pts, q) if probe else np.zeros_like(w)
    r = eye - trig
    form = r @ w @ matrices.adjoint(r)
    evals = np.linalg.eigvalsh(matrices.hermitian_part(form))
    values = np.zeros(n_pts)
    ok = evals[:, 0] > 0.0
    if np.any(ok):
        values[ok] = np.exp(np.sum(np.log(evals[ok]), axis=1) / q)
    return float(values.mean())


# ---------------------------------------------------------------------------
# shared consistency helper


def replay_error_matrix(solution: PredictionSolution,
                        weight: weights.WeightFunction,
                        n_grid: int | None = None) -> np.ndarray:
    """Re-evaluate the error matrix from the predictor samples by quadrature:
    the mean of (I-P) W (I-P)* must reproduce `solution.delta`."""
    if solution.predictor is None or solution.predictor.samples is None:
        raise ParseError("solution carries no replayable predictor")
    p = solution.predictor.samples
    w = weight.evaluate_on_grid(n_grid if n_grid else p.shape[0])
    eye = np.eye(weight.q, dtype=complex)
    r = eye - p
    return matrices.hermitian_part(weights.mean_integral(r @ w @ matrices.adjoint(r)))
