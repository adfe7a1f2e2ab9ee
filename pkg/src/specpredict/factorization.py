"""Outer spectral factorization on the circle.

Computes the analytic factor F of a positive matrix density by Wilson's
Newton iteration on the sample grid (G. T. Wilson, "The factorization of
matricial spectral densities", SIAM J. Appl. Math. 23, 1972).  The raw
iteration delivers density = Psi Psi* with Psi analytic; the convention
used throughout this package is

    density = F* F,   with the mean of F positive Hermitian,

so the kernel is run on the transposed density (transpose of Psi Psi* is a
F* F factorization) and the result is fixed up by one constant unitary from
a polar decomposition of the leading Taylor coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matrices, weights
from .errors import (
    GridTooCoarse,
    NoConvergence,
    NotLogIntegrable,
    ParseError,
    SingularLeadCoefficient,
    TruncationTooShort,
)

TOL_FACTOR = 1e-8
TOL_UPDATE = 1e-12
MAX_ITERATIONS = 200
# Newton stalls at roughly cond(W) * macheps, and diverges outright on
# exactly singular samples; densities this close to singular are lifted by
# a flat multiple of the identity before iterating.
_LIFT_REL = 2e-6


@dataclass(frozen=True)
class OuterFactor:
    """Truncated Taylor data of the analytic factor and of its inverse.

    `a_coefficients[j]` is the j-th Taylor coefficient A_j of the factor,
    `b_coefficients[j]` the j-th coefficient B_j of its inverse, both for
    j = 0..L.  `residual` is the worst relative grid mismatch between the
    density and the reconstruction from the truncated coefficients.
    """

    q: int
    a_coefficients: np.ndarray  # (L+1, q, q)
    b_coefficients: np.ndarray  # (L+1, q, q)
    residual: float
    truncation: int
    n_grid: int = field(default=weights.DEFAULT_GRID_SIZE, compare=False)

    @property
    def a0(self) -> np.ndarray:
        return self.a_coefficients[0]

    @property
    def b_tail_norm(self) -> float:
        """Size of the last kept inverse coefficient; large when the inverse
        series decays slowly (densities whose inverse is not integrable)."""
        return matrices.normalized_norm(self.b_coefficients[-1])

    def factor_samples(self, n: int | None = None) -> np.ndarray:
        """Grid samples of the factor synthesized from the kept coefficients."""
        n = n or self.n_grid
        coeffs = {j: self.a_coefficients[j] for j in range(self.truncation + 1)}
        return weights.synthesize_on_grid(coeffs, n, self.q)

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "L": self.truncation,
            "A": [matrices.matrix_to_parts(a) for a in self.a_coefficients],
            "B": [matrices.matrix_to_parts(b) for b in self.b_coefficients],
            "residual": self.residual,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "OuterFactor":
        try:
            q = int(data["q"])
            trunc = int(data["L"])
            a = np.stack([matrices.matrix_from_parts(e, q=q) for e in data["A"]])
            b = np.stack([matrices.matrix_from_parts(e, q=q) for e in data["B"]])
            residual = float(data["residual"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed factor file: {exc}") from exc
        if a.shape[0] != trunc + 1 or b.shape[0] != trunc + 1:
            raise ParseError("coefficient count does not match the stated truncation")
        return cls(q=q, a_coefficients=a, b_coefficients=b, residual=residual, truncation=trunc)


def _analytic_projection(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nonnegative-lag part of g with the zero lag halved; also returns that half."""
    n = g.shape[0]
    coeffs = np.fft.fft(g, axis=0) / n  # bin j holds the lag-j coefficient
    coeffs[0] *= 0.5
    half0 = coeffs[0].copy()
    coeffs[n // 2:] = 0.0
    return np.fft.ifft(coeffs, axis=0) * n, half0


def _wilson_kernel(v: np.ndarray, tol_update: float, max_iterations: int):
    """Analytic Theta with v = Theta Theta* pointwise on the grid."""
    n, q, _ = v.shape
    eye = np.eye(q, dtype=complex)
    theta = np.tile(matrices.principal_sqrt(weights.mean_integral(v)), (n, 1, 1))
    update = np.inf
    for iteration in range(1, max_iterations + 1):
        inv_theta = np.linalg.inv(theta)
        g = inv_theta @ v @ matrices.adjoint(inv_theta)
        plus, half0 = _analytic_projection(g + eye)
        # skew correction keeps the zero-lag coefficient normalized
        corr = np.triu(half0)
        corr = corr - matrices.adjoint(corr)
        new = theta @ (plus + corr)
        scale = float(np.max(np.abs(theta)))
        update = float(np.max(np.abs(new - theta))) / max(scale, 1e-300)
        theta = new
        if update < tol_update:
            break
    return theta, iteration, update


def invert_outer(a_coefficients: np.ndarray) -> np.ndarray:
    """Coefficients of the reciprocal power series, left recursion.

    B_0 = A_0^-1 and B_m = -A_0^-1 sum_{j=1..m} A_j B_{m-j}; both one-sided
    inverses of an invertible series coincide, the right recursion lives in
    `invert_outer_right` as a cross-check.
    """
    a = np.asarray(a_coefficients, dtype=complex)
    count, q, _ = a.shape
    a0 = a[0]
    if np.linalg.cond(a0) > 1e14:
        raise SingularLeadCoefficient("leading coefficient is numerically singular")
    b = np.zeros_like(a)
    b[0] = np.linalg.solve(a0, np.eye(q, dtype=complex))
    for m in range(1, count):
        acc = np.zeros((q, q), dtype=complex)
        for j in range(1, m + 1):
            acc += a[j] @ b[m - j]
        b[m] = -np.linalg.solve(a0, acc)
    return b


def invert_outer_right(a_coefficients: np.ndarray) -> np.ndarray:
    """Right-sided series inverse; test oracle for `invert_outer`."""
    a = np.asarray(a_coefficients, dtype=complex)
    count, q, _ = a.shape
    a0 = a[0]
    if np.linalg.cond(a0) > 1e14:
        raise SingularLeadCoefficient("leading coefficient is numerically singular")
    b = np.zeros_like(a)
    b[0] = np.linalg.solve(a0.T, np.eye(q, dtype=complex)).T
    for m in range(1, count):
        acc = np.zeros((q, q), dtype=complex)
        for j in range(1, m + 1):
            acc += b[m - j] @ a[j]
        b[m] = -np.linalg.solve(a0.T, acc.T).T
    return b


def _residual_against_samples(a_coefficients: np.ndarray, samples: np.ndarray) -> float:
    n, q = samples.shape[0], samples.shape[1]
    coeffs = {j: a_coefficients[j] for j in range(a_coefficients.shape[0])}
    f = weights.synthesize_on_grid(coeffs, n, q)
    recon = matrices.adjoint(f) @ f
    num = np.sqrt(np.sum(np.abs(samples - recon) ** 2, axis=(1, 2)) / q)
    den = 1.0 + np.sqrt(np.sum(np.abs(samples) ** 2, axis=(1, 2)) / q)
    return float(np.max(num / den))


def factor_residual(factor: OuterFactor, weight: weights.WeightFunction,
                    n: int | None = None) -> float:
    """Worst grid mismatch |W - F*F| / (1 + |W|) using the truncated coefficients."""
    n = n or factor.n_grid
    return _residual_against_samples(
        factor.a_coefficients, weight.evaluate_on_grid(n)
    )


def factorize(weight: weights.WeightFunction, truncation: int | None = None,
              n_grid: int | None = None, tol_factor: float = TOL_FACTOR,
              tol_update: float = TOL_UPDATE,
              max_iterations: int = MAX_ITERATIONS) -> OuterFactor:
    """Outer factor of the weight with positive Hermitian mean.

    The truncation defaults to n_grid/8; the grid must keep at least 4x
    oversampling over the requested truncation.
    """
    samples = weight.evaluate_on_grid(n_grid)
    n = samples.shape[0]
    if truncation is None:
        truncation = n // 8
    if n < 4 * truncation:
        raise GridTooCoarse(f"grid of {n} points cannot support truncation {truncation}")
    membership = weights.class_membership(weight, n)
    if not membership.log_det_integrable:
        raise NotLogIntegrable("log det of the weight has no finite grid mean")

    evals = np.linalg.eigvalsh(samples)
    scale = max(float(evals.max()), 1e-300)
    kernel_input = samples
    if float(evals[:, 0].min()) <= _LIFT_REL * scale:
        kernel_input = samples + (_LIFT_REL * scale) * np.eye(weight.q, dtype=complex)

    theta, iterations, update = _wilson_kernel(
        np.swapaxes(kernel_input, -1, -2), tol_update, max_iterations
    )
    phi = np.swapaxes(theta, -1, -2)

    # all Taylor coefficients at once, then one constant unitary so that the
    # mean of the factor comes out positive Hermitian
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    coeffs = np.fft.fft(phi, axis=0) / n * signs[:, None, None]
    a0 = coeffs[0]
    u, _, vh = np.linalg.svd(a0)
    unitary = u @ vh
    coeffs = np.einsum("ij,njk->nik", matrices.adjoint(unitary), coeffs)

    a = coeffs[: truncation + 1].copy()
    a[0] = matrices.hermitian_part(a[0])
    # convergence is judged against the density the kernel actually ran on;
    # the reported residual is always against the requested weight
    kernel_residual = _residual_against_samples(a, kernel_input)
    if kernel_residual > tol_factor:
        raise NoConvergence(iterations, kernel_residual)
    b = invert_outer(a)
    residual = _residual_against_samples(a, samples)
    return OuterFactor(
        q=weight.q,
        a_coefficients=a,
        b_coefficients=b,
        residual=residual,
        truncation=truncation,
        n_grid=n,
    )


def require_truncation(factor: OuterFactor, n: int) -> None:
    if n > factor.truncation:
        raise TruncationTooShort(
            f"order {n} exceeds the kept truncation {factor.truncation}"
        )
