"""Finite-section projection engine and duality verifications.

This module is the package's independent oracle.  Projecting the identity
onto the span of finitely many characters turns every prediction problem
into one Hermitian block-Toeplitz solve, in either of two geometries:

* direct: the mean-square geometry weighted by the density itself;
* dual: the geometry weighted by the pointwise inverse density.

The closed-form error matrices of `predictors` must be reproduced by the
direct sections as the window grows, and the two geometries are tied
together by three verifiable identities (a projection formula, a product
rule for the scalar figures, and a trace-normalized distance identity).
On a finite cyclic group nothing is truncated and the same identities hold
to machine precision, which is used as an exact end-to-end check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matrices, weights
from .errors import GridTooCoarse, IllConditionedGram, ParseError, SingularSample
from .index_sets import IndexSetSpec

DEFAULT_WINDOW = 128
TOL_DUAL = 1e-4
_COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# gram systems on the circle


def _coefficient_from_table(table: np.ndarray, lag: int) -> np.ndarray:
    n = table.shape[0]
    if abs(lag) >= n // 2:
        raise ParseError(f"|lag| must stay below {n // 2}, got {lag}")
    return table[lag % n] * ((-1) ** (lag % 2))


def _assemble_gram(table: np.ndarray, lags: list[int]):
    q = table.shape[1]
    count = len(lags)
    gram = np.empty((count * q, count * q), dtype=complex)
    rhs = np.empty((count * q, q), dtype=complex)
    for j, lag_j in enumerate(lags):
        rhs[j * q:(j + 1) * q] = _coefficient_from_table(table, lag_j)
        for k, lag_k in enumerate(lags):
            gram[j * q:(j + 1) * q, k * q:(k + 1) * q] = _coefficient_from_table(
                table, lag_j - lag_k
            )
    return gram, rhs


def _solve_gram(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    evals = np.linalg.eigvalsh(matrices.hermitian_part(gram))
    if evals[0] <= 0.0 or evals[-1] / evals[0] > _COND_LIMIT:
        cond = float("inf") if evals[0] <= 0 else float(evals[-1] / evals[0])
        raise IllConditionedGram(cond)
    return np.linalg.solve(gram, rhs)


def _project_from_table(table: np.ndarray, samples: np.ndarray, lags: list[int]):
    """Best approximation of the identity from the given character span.

    Returns (coefficients, error matrix, approximant samples); the error
    matrix is evaluated by grid quadrature of (I-T) V (I-T)*.
    """
    n_pts, q = samples.shape[0], samples.shape[1]
    eye = np.eye(q, dtype=complex)
    if not lags:
        zero = np.zeros((n_pts, q, q), dtype=complex)
        delta = matrices.hermitian_part(weights.mean_integral(samples))
        return {}, delta, zero
    gram, rhs = _assemble_gram(table, lags)
    sol = _solve_gram(gram, rhs)
    coeffs = {
        lag: matrices.adjoint(sol[j * q:(j + 1) * q]) for j, lag in enumerate(lags)
    }
    approx = weights.synthesize_on_grid(coeffs, n_pts, q)
    r = eye - approx
    delta = matrices.hermitian_part(weights.mean_integral(r @ samples @ matrices.adjoint(r)))
    return coeffs, delta, approx


def gram_project(weight_samples: np.ndarray, lags: list[int]):
    """Project the identity onto the span of the listed character lags in the
    geometry weighted by `weight_samples`; returns (coefficients, delta)."""
    samples = np.asarray(weight_samples, dtype=complex)
    table = np.fft.ifft(samples, axis=0)
    coeffs, delta, _ = _project_from_table(table, samples, list(lags))
    return coeffs, delta


class FiniteSection:
    """Cached two-geometry projection engine for one weight on one grid."""

    def __init__(self, weight: weights.WeightFunction, n_grid: int | None = None):
        self.weight = weight
        self.direct_samples = weight.evaluate_on_grid(n_grid)
        self.n_grid = self.direct_samples.shape[0]
        self.q = weight.q
        self.inverse_samples = weights.invert_samples(self.direct_samples)
        self._direct_table = np.fft.ifft(self.direct_samples, axis=0)
        self._dual_table = np.fft.ifft(self.inverse_samples, axis=0)

    def project(self, lags: list[int], dual: bool = False):
        if lags and (max(lags) - min(lags)) >= self.n_grid // 2:
            raise GridTooCoarse(
                f"lag span {max(lags) - min(lags)} needs a grid larger than {self.n_grid}"
            )
        if dual:
            return _project_from_table(self._dual_table, self.inverse_samples, lags)
        return _project_from_table(self._direct_table, self.direct_samples, lags)

    def weighted_norm(self, samples: np.ndarray, dual: bool = False) -> float:
        """Norm of a grid function in the chosen geometry (normalized trace)."""
        v = self.inverse_samples if dual else self.direct_samples
        form = weights.mean_integral(samples @ v @ matrices.adjoint(samples))
        return float(np.sqrt(max(np.trace(form).real / self.q, 0.0)))


def _as_section(weight_or_section, n_grid=None) -> FiniteSection:
    if isinstance(weight_or_section, FiniteSection):
        return weight_or_section
    try:
        return FiniteSection(weight_or_section, n_grid)
    except SingularSample as exc:
        raise SingularSample(exc.index, exc.point,
                             f"dual geometry unavailable: {exc}") from exc


# ---------------------------------------------------------------------------
# verification reports


@dataclass(frozen=True)
class VerificationReport:
    theorem: str
    window: int
    n_grid: int
    deviations: dict = field(default_factory=dict)
    passed: bool = False

    def to_json_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "K": self.window,
            "N_grid": self.n_grid,
            "deviations": dict(self.deviations),
            "pass": self.passed,
        }


def _dual_error_matrices(section: FiniteSection, index_set: IndexSetSpec, window: int):
    """Dual-geometry projection of the identity and the two derived error
    matrices: inverse of the linear pairing and inverse of the quadratic one."""
    lags = index_set.dual_lags(window)
    _, _, approx = section.project(lags, dual=True)
    eye = np.eye(section.q, dtype=complex)
    r = eye - approx
    linear = weights.mean_integral(r @ section.inverse_samples)
    quadratic = matrices.hermitian_part(
        weights.mean_integral(r @ section.inverse_samples @ matrices.adjoint(r))
    )
    return r, np.linalg.inv(linear), np.linalg.inv(quadratic), quadratic


def dual_projection_check(weight_or_section, index_set: IndexSetSpec,
                          window: int = DEFAULT_WINDOW, n_grid: int | None = None,
                          tol: float = TOL_DUAL) -> VerificationReport:
    """Check that the projection formula routes agree: the direct-section
    predictor against its dual-section reconstruction, and the three error
    matrices (direct quadrature, dual linear, dual quadratic) pairwise."""
    section = _as_section(weight_or_section, n_grid)
    _, delta_direct, direct_approx = section.project(index_set.truncate(window))
    r, delta_linear, delta_quadratic, _ = _dual_error_matrices(section, index_set, window)

    scale = max(1.0, matrices.normalized_norm(delta_direct))
    dev_ab = matrices.normalized_norm(delta_direct - delta_linear) / scale
    dev_ac = matrices.normalized_norm(delta_direct - delta_quadratic) / scale
    dev_bc = matrices.normalized_norm(delta_linear - delta_quadratic) / scale

    reconstructed = (
        np.eye(section.q, dtype=complex)
        - np.einsum("ij,njk->nik", delta_linear, r @ section.inverse_samples)
    )
    identity_dev = section.weighted_norm(direct_approx - reconstructed)

    deviations = {
        "delta_direct_vs_dual_linear": float(dev_ab),
        "delta_direct_vs_dual_quadratic": float(dev_ac),
        "delta_dual_linear_vs_quadratic": float(dev_bc),
        "projection_identity": float(identity_dev),
    }
    passed = all(v <= tol for v in deviations.values())
    return VerificationReport("3.2", window, section.n_grid, deviations, passed)


def dual_infimum_check(weight_or_section, index_set: IndexSetSpec,
                       window: int = DEFAULT_WINDOW, n_grid: int | None = None,
                       tol: float = TOL_DUAL) -> VerificationReport:
    """Check the product rule: the scalar error figure from the direct section
    times the dual-section infimum value equals one."""
    section = _as_section(weight_or_section, n_grid)
    _, delta_direct, _ = section.project(index_set.truncate(window))
    _, _, _, quadratic = _dual_error_matrices(section, index_set, window)

    evals = np.linalg.eigvalsh(delta_direct)
    scalar_direct = float(np.exp(np.mean(np.log(np.maximum(evals, 1e-300)))))
    evals_dual = np.linalg.eigvalsh(quadratic)
    dual_value = float(np.exp(np.mean(np.log(np.maximum(evals_dual, 1e-300)))))

    product = scalar_direct * dual_value
    deviations = {
        "delta_scalar_direct": scalar_direct,
        "dual_infimum": dual_value,
        "product_error": abs(product - 1.0),
    }
    return VerificationReport(
        "3.6", window, section.n_grid, deviations, deviations["product_error"] <= tol
    )


def _traceless_basis(q: int) -> list[np.ndarray]:
    basis = []
    for a in range(q):
        for b in range(q):
            if a != b:
                m = np.zeros((q, q), dtype=complex)
                m[a, b] = 1.0
                basis.append(m)
    for i in range(q - 1):
        m = np.zeros((q, q), dtype=complex)
        m[i, i] = 1.0
        m[i + 1, i + 1] = -1.0
        basis.append(m)
    return basis


def _trace_constrained_minimum(error_matrix: np.ndarray, anchor: np.ndarray,
                               q: int) -> float:
    """Minimal error-matrix quadratic form over trace-constrained constants.

    Solves min tr(A G A*)/q over A = anchor + traceless span, the exact
    linearly-constrained least squares for the distance from the trace
    constraint set to the observed span (for each A the best approximant
    from the span is A times the projected identity, so the squared
    distance is the quadratic form of the section's error matrix).
    """
    basis = _traceless_basis(q)
    count = len(basis)
    h = np.empty((count, count), dtype=complex)
    rhs = np.empty(count, dtype=complex)
    for i, em in enumerate(basis):
        rhs[i] = -np.trace(anchor @ error_matrix @ matrices.adjoint(em)) / q
        for jdx, en in enumerate(basis):
            h[i, jdx] = np.trace(en @ error_matrix @ matrices.adjoint(em)) / q
    coeffs = np.linalg.solve(h, rhs)
    best = anchor + sum(c * em for c, em in zip(coeffs, basis))
    value = np.trace(best @ error_matrix @ matrices.adjoint(best)).real / q
    return float(np.sqrt(max(value, 0.0)))


def trace_normalized_check(weight_or_section, index_set: IndexSetSpec,
                           window: int = DEFAULT_WINDOW, n_grid: int | None = None,
                           tol: float = TOL_DUAL) -> VerificationReport:
    """Check the trace-normalized distance identity.

    The minimal distance between the constants of unit normalized trace and
    the observed span must equal the reciprocal dual-geometry norm of the
    dual residual.  The classical-trace variant (trace one instead of
    normalized trace one) is reported alongside; the identity holds for the
    normalized convention, and the two coincide only at q = 1.
    """
    section = _as_section(weight_or_section, n_grid)
    _, delta_direct, _ = section.project(index_set.truncate(window))
    _, _, _, quadratic = _dual_error_matrices(section, index_set, window)

    eye = np.eye(section.q, dtype=complex)
    lhs_normalized = _trace_constrained_minimum(delta_direct, eye, section.q)
    lhs_classical = _trace_constrained_minimum(delta_direct, eye / section.q, section.q)
    rhs = 1.0 / np.sqrt(max(np.trace(quadratic).real / section.q, 1e-300))

    deviations = {
        "lhs_normalized_trace": float(lhs_normalized),
        "lhs_classical_trace": float(lhs_classical),
        "rhs": float(rhs),
        "relative_deviation_normalized": float(abs(lhs_normalized - rhs) / rhs),
        "relative_deviation_classical": float(abs(lhs_classical - rhs) / rhs),
    }
    passed = deviations["relative_deviation_normalized"] <= tol
    return VerificationReport("3.7", window, section.n_grid, deviations, passed)


# ---------------------------------------------------------------------------
# exact finite cyclic mode


@dataclass(frozen=True)
class CyclicModel:
    """Weight and observed subset on a finite cyclic group.

    Samples are indexed by the group points j = 0..N-1 with characters
    exp(2*pi*i*k*j/N); every subspace in sight is finite-dimensional, so the
    duality identities can be checked without truncation.
    """

    n_points: int
    q: int
    samples: np.ndarray
    subset: tuple[int, ...]

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.n_points, self.q, self.q):
            raise ParseError("cyclic samples must have shape (N, q, q)")
        evals = np.linalg.eigvalsh(matrices.hermitian_part(samples))
        if evals[:, 0].min() <= 0:
            raise ParseError("every cyclic sample must be positive definite")
        reduced = sorted({k % self.n_points for k in self.subset})
        if not reduced or 0 in reduced:
            raise ParseError("the cyclic subset must be nonempty and avoid 0")
        object.__setattr__(self, "subset", tuple(reduced))
        object.__setattr__(self, "samples", matrices.hermitian_part(samples))


def _cyclic_synthesize(coeffs: dict[int, np.ndarray], n: int, q: int) -> np.ndarray:
    bins = np.zeros((n, q, q), dtype=complex)
    for lag, mat in coeffs.items():
        bins[lag % n] += mat
    return np.fft.ifft(bins, axis=0) * n


def cyclic_project(samples: np.ndarray, lags: list[int]):
    """Projection of the identity onto the listed cyclic characters in the
    geometry weighted by `samples` (lag arithmetic wraps modulo N)."""
    n, q = samples.shape[0], samples.shape[1]
    table = np.fft.ifft(samples, axis=0)
    eye = np.eye(q, dtype=complex)
    if not lags:
        delta = matrices.hermitian_part(weights.mean_integral(samples))
        return {}, delta, np.zeros_like(samples)
    count = len(lags)
    gram = np.empty((count * q, count * q), dtype=complex)
    rhs = np.empty((count * q, q), dtype=complex)
    for j, lag_j in enumerate(lags):
        rhs[j * q:(j + 1) * q] = table[lag_j % n]
        for k, lag_k in enumerate(lags):
            gram[j * q:(j + 1) * q, k * q:(k + 1) * q] = table[(lag_j - lag_k) % n]
    sol = _solve_gram(gram, rhs)
    coeffs = {lag: matrices.adjoint(sol[j * q:(j + 1) * q]) for j, lag in enumerate(lags)}
    approx = _cyclic_synthesize(coeffs, n, q)
    r = eye - approx
    delta = matrices.hermitian_part(weights.mean_integral(r @ samples @ matrices.adjoint(r)))
    return coeffs, delta, approx


def cyclic_exact_verify(model: CyclicModel, rng: np.random.Generator | None = None,
                        tol_contain: float = 1e-10,
                        tol_identity: float = 1e-12) -> VerificationReport:
    """Exhaustive exact check of the duality structure on a cyclic group.

    Verifies (a) that the annihilator of the 0-augmented observed span,
    computed as a null space, coincides with the character span of the
    complement (dimension match plus mutual containment); (b) that the
    projection-formula identities hold to machine precision; (c) the
    mean-zero membership characterization on the 0-augmented span.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    n, q = model.n_points, model.q
    s0 = [0] + list(model.subset)
    complement = [l for l in range(n) if l not in s0]
    w = model.samples
    winv = matrices.hermitian_part(np.linalg.inv(w))
    eye = np.eye(q, dtype=complex)

    # (a) annihilator as a null space vs the complement character span
    points = np.arange(n)
    constraints = np.exp(-2j * np.pi * np.outer(s0, points) / n) / n
    _, svals, vh = np.linalg.svd(constraints)
    rank = int(np.sum(svals > 1e-12))
    null_basis = vh[rank:].conj().T  # (n, n - rank), orthonormal
    span = np.exp(2j * np.pi * np.outer(points, complement) / n) / np.sqrt(n)
    dim_null = null_basis.shape[1]
    dim_span = span.shape[1]
    if dim_span:
        contain_a = float(np.max(np.abs(null_basis - span @ (span.conj().T @ null_basis))))
        contain_b = float(np.max(np.abs(span - null_basis @ (null_basis.conj().T @ span))))
    else:
        contain_a = float(np.max(np.abs(null_basis))) if dim_null else 0.0
        contain_b = 0.0

    # (b) projection identities, all routes exact on the finite group
    _, delta_direct, direct_approx = cyclic_project(w, list(model.subset))
    _, _, dual_approx = cyclic_project(winv, complement)
    r = eye - dual_approx
    linear = weights.mean_integral(r @ winv)
    quadratic = matrices.hermitian_part(weights.mean_integral(r @ winv @ matrices.adjoint(r)))
    delta_linear = np.linalg.inv(linear)
    delta_quadratic = np.linalg.inv(quadratic)
    scale = max(1.0, matrices.normalized_norm(delta_direct))
    dev_identity = max(
        matrices.normalized_norm(delta_direct - delta_linear),
        matrices.normalized_norm(delta_direct - delta_quadratic),
        matrices.normalized_norm(delta_linear - delta_quadratic),
    ) / scale
    reconstructed = eye - np.einsum("ij,njk->nik", delta_linear, r @ winv)
    dev_projection = float(np.max(np.abs(direct_approx - reconstructed)))

    # (c) mean-zero membership characterization
    coeffs_zero = {k: rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
                   for k in model.subset}
    f_zero = _cyclic_synthesize(coeffs_zero, n, q)
    dist_zero = _cyclic_distance(w, f_zero, list(model.subset))
    a0 = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    f_mean = f_zero + _cyclic_synthesize({0: a0}, n, q)
    dist_mean = _cyclic_distance(w, f_mean, list(model.subset))

    deviations = {
        "dual_dimension": float(dim_null),
        "span_dimension": float(dim_span),
        "containment_null_in_span": contain_a,
        "containment_span_in_null": contain_b,
        "error_matrix_routes": float(dev_identity),
        "projection_formula": dev_projection,
        "mean_zero_member_distance": float(dist_zero),
        "nonzero_mean_distance": float(dist_mean),
    }
    passed = (
        dim_null == dim_span
        and contain_a <= tol_contain
        and contain_b <= tol_contain
        and dev_identity <= tol_identity
        and dev_projection <= 1e-10
        and dist_zero <= 1e-10
        and dist_mean > 1e-8
    )
    return VerificationReport("cyclic", n, n, deviations, passed)


def _cyclic_distance(samples: np.ndarray, target: np.ndarray, lags: list[int]) -> float:
    """Distance from `target` to the span of the listed cyclic characters in
    the weighted geometry."""
    n, q = samples.shape[0], samples.shape[1]
    table = np.fft.ifft(samples, axis=0)
    target_hat = np.fft.fft(target, axis=0) / n
    if not lags:
        resid = target
    else:
        count = len(lags)
        gram = np.empty((count * q, count * q), dtype=complex)
        rhs = np.empty((count * q, q), dtype=complex)
        for j, lag_j in enumerate(lags):
            # (target, e_j) = sum_k A_k G((j-k) mod n) in adjoint form
            acc = np.zeros((q, q), dtype=complex)
            for m in range(n):
                acc += table[(lag_j - m) % n] @ matrices.adjoint(target_hat[m])
            rhs[j * q:(j + 1) * q] = acc
            for k, lag_k in enumerate(lags):
                gram[j * q:(j + 1) * q, k * q:(k + 1) * q] = table[(lag_j - lag_k) % n]
        sol = _solve_gram(gram, rhs)
        coeffs = {lag: matrices.adjoint(sol[j * q:(j + 1) * q]) for j, lag in enumerate(lags)}
        resid = target - _cyclic_synthesize(coeffs, n, q)
    form = weights.mean_integral(resid @ samples @ matrices.adjoint(resid))
    return float(np.sqrt(max(np.trace(form).real / q, 0.0)))
