"""Complex q-by-q matrix helpers: normalized metrics, Loewner order, square roots.

Trace and euclidean norm are normalized by the dimension, so that the
identity has unit trace and unit norm for every q.  All positivity and
ordering decisions go through a Hermitian eigendecomposition with a relative
threshold; only spectral functions are used, so degenerate eigenvalues need
no tie-breaking.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotPositive, ParseError

TOL_HERM = 1e-12
EPS_PD = 1e-12
TOL_SQRT = 1e-12


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose, acting on the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + adjoint(a))


def is_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> bool:
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    return bool(np.max(np.abs(a - adjoint(a))) <= tol * scale)


def _check_square(a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ParseError("matrix entries must be finite")
    return a.shape[0]


def normalized_trace(a: np.ndarray) -> complex:
    q = _check_square(a)
    return complex(np.trace(a) / q)


def normalized_norm(a: np.ndarray) -> float:
    """sqrt of the mean squared entry magnitude times q, i.e. |A|^2 = tr(A A*)/q."""
    q = _check_square(a)
    return float(np.sqrt(np.sum(np.abs(a) ** 2) / q))


def normalized_metrics(a: np.ndarray) -> tuple[complex, float, complex]:
    """Return (normalized trace, normalized euclidean norm, determinant)."""
    q = _check_square(a)
    ntrace = complex(np.trace(a) / q)
    nnorm = float(np.sqrt(np.sum(np.abs(a) ** 2) / q))
    det = complex(np.linalg.det(a))
    return ntrace, nnorm, det


def min_eigenvalue(a: np.ndarray) -> float:
    _check_square(a)
    return float(np.linalg.eigvalsh(hermitian_part(a))[0])


def is_positive_definite(a: np.ndarray, eps: float = EPS_PD) -> bool:
    _check_square(a)
    evals = np.linalg.eigvalsh(hermitian_part(a))
    scale = max(1.0, float(evals[-1]))
    return bool(evals[0] > eps * scale)


def principal_sqrt(a: np.ndarray, eps: float = EPS_PD) -> np.ndarray:
    """Unique positive square root of a Hermitian positive matrix."""
    _check_square(a)
    h = hermitian_part(a)
    evals, vecs = np.linalg.eigh(h)
    scale = max(1.0, float(evals[-1]))
    if evals[0] <= eps * scale:
        raise NotPositive(f"matrix is not positive definite (min eigenvalue {evals[0]:.3e})")
    root = (vecs * np.sqrt(evals)) @ adjoint(vecs)
    return hermitian_part(root)


def loewner_leq(a: np.ndarray, b: np.ndarray, eps: float = EPS_PD) -> bool:
    """True when b - a is positive semidefinite up to a relative slack."""
    qa = _check_square(a)
    qb = _check_square(b)
    if qa != qb:
        raise DimensionMismatch(f"cannot compare a {qa}x{qa} matrix with a {qb}x{qb} one")
    diff = hermitian_part(b - a)
    scale = max(1.0, normalized_norm(a) * np.sqrt(qa), normalized_norm(b) * np.sqrt(qb))
    return bool(np.linalg.eigvalsh(diff)[0] >= -eps * scale)


def matrix_to_parts(a: np.ndarray) -> dict:
    """Split into real/imag nested lists (row-major), the package's text form."""
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_parts(parts: dict, q: int | None = None) -> np.ndarray:
    try:
        re = np.asarray(parts["re"], dtype=float)
        im = np.asarray(parts["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix block: {exc}") from exc
    if re.shape != im.shape or re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise ParseError(f"matrix blocks must be square and matching, got {re.shape} / {im.shape}")
    if q is not None and re.shape[0] != q:
        raise ParseError(f"expected a {q}x{q} block, got {re.shape[0]}x{re.shape[0]}")
    a = re + 1j * im
    if not np.all(np.isfinite(a)):
        raise ParseError("matrix entries must be finite")
    return a
