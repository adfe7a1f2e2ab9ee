"""Matrix spectral densities on the unit circle.

A weight is a q-by-q Hermitian nonnegative matrix function on [-pi, pi),
held either as a two-sided trigonometric polynomial

    W(t) = sum_k M_k exp(i k t),   M_{-k} = M_k*,

or as samples on the uniform grid t_j = -pi + 2*pi*j/N with N a power of
two.  Integration always means the mean against normalized Lebesgue measure
on the circle, so the uniform-grid mean is the quadrature rule throughout;
it is exact for band-limited integrands, and every fast transform below is
just that quadrature applied to all lags at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import matrices
from .errors import (
    GridTooCoarse,
    LagOutOfRange,
    ParseError,
    SingularSample,
)

DEFAULT_GRID_SIZE = 4096

# det below this is treated as an exact zero when averaging log det
_LOG_DET_UNDERFLOW = -690.0
# heuristic ceiling on the mean size of the inverse before we declare the
# inverse non-integrable
_INVERSE_MEAN_LIMIT = 1e12


def grid_points(n: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(n) / n


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def synthesize_on_grid(coeffs: Mapping[int, np.ndarray], n: int, q: int) -> np.ndarray:
    """Evaluate sum_k coeffs[k] exp(i k t) on the uniform grid, shape (n, q, q)."""
    bins = np.zeros((n, q, q), dtype=complex)
    for lag, mat in coeffs.items():
        if abs(lag) >= n // 2 + (n % 2):
            raise GridTooCoarse(f"lag {lag} does not fit a grid of {n} points")
        # t_j = -pi + 2*pi*j/n shifts each character by (-1)^lag
        bins[lag % n] += np.asarray(mat, dtype=complex) * ((-1) ** (lag % 2))
    return np.fft.ifft(bins, axis=0) * n


def coefficients_from_samples(samples: np.ndarray, lags: Iterable[int]) -> dict[int, np.ndarray]:
    """Recover the two-sided coefficients M_k = mean of W(t) exp(-i k t)."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[0]
    table = np.fft.fft(samples, axis=0) / n
    out = {}
    for lag in lags:
        if abs(lag) >= n // 2:
            raise LagOutOfRange(f"|lag| must be smaller than {n // 2}, got {lag}")
        out[lag] = table[lag % n] * ((-1) ** (lag % 2))
    return out


class WeightFunction:
    """Immutable spectral density, trig-polynomial or grid-sampled."""

    def __init__(self, q, kind, coefficients=None, samples=None):
        self.q = int(q)
        self.kind = kind
        if self.q < 1:
            raise ParseError("dimension q must be at least 1")
        if kind == "trig_poly":
            if not coefficients:
                raise ParseError("a trig-polynomial weight needs at least the lag-0 block")
            coeffs = {}
            for lag, mat in sorted(coefficients.items()):
                lag = int(lag)
                mat = np.asarray(mat, dtype=complex)
                if lag < 0:
                    raise ParseError("only lags >= 0 are stored; negative lags are implied")
                if mat.shape != (self.q, self.q):
                    raise ParseError(f"coefficient at lag {lag} has shape {mat.shape}")
                if lag == 0:
                    if not matrices.is_hermitian(mat):
                        raise ParseError("the lag-0 coefficient must be Hermitian")
                    mat = matrices.hermitian_part(mat)
                coeffs[lag] = mat
            if 0 not in coeffs:
                raise ParseError("a trig-polynomial weight needs the lag-0 block")
            self._coeffs = coeffs
            self._samples = None
            self.n_points = None
        elif kind == "grid":
            samples = np.asarray(samples, dtype=complex)
            if samples.ndim != 3 or samples.shape[1:] != (self.q, self.q):
                raise ParseError(f"grid samples must have shape (N, {self.q}, {self.q})")
            if not _is_power_of_two(samples.shape[0]):
                raise ParseError("the number of grid points must be a power of two")
            for j in range(samples.shape[0]):
                if not matrices.is_hermitian(samples[j], tol=1e-9):
                    raise ParseError(f"grid sample {j} is not Hermitian")
            self._coeffs = None
            self._samples = matrices.hermitian_part(samples)
            self.n_points = samples.shape[0]
        else:
            raise ParseError(f"unknown weight kind {kind!r}")
        self._grid_cache: dict[int, np.ndarray] = {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_trig_coefficients(cls, coefficients: Mapping[int, np.ndarray]) -> "WeightFunction":
        mats = {int(k): np.asarray(v, dtype=complex) for k, v in coefficients.items()}
        q = mats[min(mats)].shape[0]
        return cls(q=q, kind="trig_poly", coefficients=mats)

    @classmethod
    def constant(cls, c: np.ndarray) -> "WeightFunction":
        c = np.atleast_2d(np.asarray(c, dtype=complex))
        return cls(q=c.shape[0], kind="trig_poly", coefficients={0: c})

    @classmethod
    def from_grid_samples(cls, samples: np.ndarray) -> "WeightFunction":
        samples = np.asarray(samples, dtype=complex)
        return cls(q=samples.shape[1], kind="grid", samples=samples)

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self) -> int:
        if self.kind != "trig_poly":
            raise ParseError("degree is only defined for trig-polynomial weights")
        return max(self._coeffs)

    def coefficient(self, lag: int) -> np.ndarray:
        """Two-sided coefficient M_lag (negative lags via Hermitian symmetry)."""
        if self.kind != "trig_poly":
            raise ParseError("stored coefficients exist only for trig-polynomial weights")
        if lag >= 0:
            return self._coeffs.get(lag, np.zeros((self.q, self.q), dtype=complex))
        return matrices.adjoint(self.coefficient(-lag))

    def evaluate_on_grid(self, n: int | None = None) -> np.ndarray:
        """Samples at t_j = -pi + 2*pi*j/n, shape (n, q, q); exact for trig polys."""
        if self.kind == "grid":
            if n is not None and n != self.n_points:
                raise GridTooCoarse(
                    f"grid weight is fixed at {self.n_points} points, cannot resample to {n}"
                )
            return self._samples
        if n is None:
            n = DEFAULT_GRID_SIZE
        if not _is_power_of_two(n):
            raise GridTooCoarse(f"grid size must be a power of two, got {n}")
        if n < 2 * self.degree + 2:
            raise GridTooCoarse(
                f"grid of {n} points aliases a degree-{self.degree} polynomial "
                f"(need at least {2 * self.degree + 2})"
            )
        if n not in self._grid_cache:
            two_sided = dict(self._coeffs)
            for lag, mat in self._coeffs.items():
                if lag > 0:
                    two_sided[-lag] = matrices.adjoint(mat)
            samples = synthesize_on_grid(two_sided, n, self.q)
            self._grid_cache[n] = matrices.hermitian_part(samples)
        return self._grid_cache[n]

    # -- JSON text form ----------------------------------------------------

    def to_json_dict(self) -> dict:
        if self.kind == "trig_poly":
            return {
                "q": self.q,
                "kind": "trig_poly",
                "coefficients": [
                    {"lag": lag, **matrices.matrix_to_parts(mat)}
                    for lag, mat in sorted(self._coeffs.items())
                ],
            }
        return {
            "q": self.q,
            "kind": "grid",
            "n_points": self.n_points,
            "samples": [matrices.matrix_to_parts(s) for s in self._samples],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "WeightFunction":
        if not isinstance(data, dict):
            raise ParseError("weight spec must be a JSON object")
        kind = data.get("kind")
        if kind == "trig_poly":
            try:
                q = int(data["q"])
                entries = data["coefficients"]
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"malformed trig_poly spec: {exc}") from exc
            coeffs = {}
            for entry in entries:
                lag = int(entry.get("lag", -1))
                if lag < 0:
                    raise ParseError("coefficient lags must be integers >= 0")
                if lag in coeffs:
                    raise ParseError(f"duplicate coefficient at lag {lag}")
                coeffs[lag] = matrices.matrix_from_parts(entry, q=q)
            return cls(q=q, kind="trig_poly", coefficients=coeffs)
        if kind == "grid":
            try:
                n_points = int(data["n_points"])
                entries = data["samples"]
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"malformed grid spec: {exc}") from exc
            if len(entries) != n_points:
                raise ParseError(f"expected {n_points} samples, got {len(entries)}")
            mats = [matrices.matrix_from_parts(e) for e in entries]
            q = int(data.get("q", mats[0].shape[0]))
            samples = np.stack(mats)
            if samples.shape[1] != q:
                raise ParseError("sample dimension does not match q")
            return cls(q=q, kind="grid", samples=samples)
        raise ParseError(f"unknown weight kind {kind!r}")


# ---------------------------------------------------------------------------
# quadrature and transforms on grid samples


def mean_integral(samples: np.ndarray) -> np.ndarray:
    """Mean of the samples: the normalized integral, exact below the Nyquist degree."""
    samples = np.asarray(samples, dtype=complex)
    return samples.mean(axis=0)


def fourier_coefficients(samples: np.ndarray, lags: Iterable[int]) -> dict[int, np.ndarray]:
    """mean of exp(i*l*t) F(t) over the grid, for every requested l at once."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[0]
    table = np.fft.ifft(samples, axis=0)
    out = {}
    for lag in lags:
        if abs(lag) >= n // 2:
            raise LagOutOfRange(f"|lag| must be smaller than {n // 2}, got {lag}")
        out[lag] = table[lag % n] * ((-1) ** (lag % 2))
    return out


def fourier_coefficient(samples: np.ndarray, lag: int) -> np.ndarray:
    return fourier_coefficients(samples, [lag])[lag]


def invert_samples(samples: np.ndarray, eps: float = matrices.EPS_PD) -> np.ndarray:
    """Pointwise inverse of Hermitian positive samples; flags the first bad point."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[0]
    evals = np.linalg.eigvalsh(samples)
    scale = max(1.0, float(evals.max())) if evals.size else 1.0
    bad = np.nonzero(evals[:, 0] <= eps * scale)[0]
    if bad.size:
        j = int(bad[0])
        raise SingularSample(j, float(grid_points(n)[j]))
    return matrices.hermitian_part(np.linalg.inv(samples))


def inverse_weight(weight: WeightFunction, n: int | None = None) -> WeightFunction:
    """Grid-form weight holding the pointwise inverse samples."""
    samples = weight.evaluate_on_grid(n)
    return WeightFunction.from_grid_samples(invert_samples(samples))


def _log_det_per_sample(samples: np.ndarray) -> np.ndarray:
    """log det of each sample; -inf where the sample is numerically singular."""
    evals = np.linalg.eigvalsh(np.asarray(samples, dtype=complex))
    out = np.full(evals.shape[0], -np.inf)
    ok = evals[:, 0] > 0.0
    if np.any(ok):
        with np.errstate(divide="ignore"):
            sums = np.sum(np.log(evals[ok]), axis=1)
        sums[sums < _LOG_DET_UNDERFLOW] = -np.inf
        out[ok] = sums
    return out


def log_det_mean(weight: WeightFunction, n: int | None = None) -> float:
    """Mean of log det W over the grid; -inf as soon as one sample is singular."""
    logs = _log_det_per_sample(weight.evaluate_on_grid(n))
    if np.any(np.isneginf(logs)):
        return float("-inf")
    return float(logs.mean())


def regularize(weight: WeightFunction, m: int) -> WeightFunction:
    """Lift the weight by identity/m, keeping the representation kind."""
    if m < 1:
        raise ParseError("regularization index m must be >= 1")
    eye = np.eye(weight.q, dtype=complex) / m
    if weight.kind == "trig_poly":
        coeffs = {lag: weight.coefficient(lag) for lag in weight._coeffs}
        coeffs[0] = coeffs[0] + eye
        return WeightFunction(q=weight.q, kind="trig_poly", coefficients=coeffs)
    return WeightFunction.from_grid_samples(weight.evaluate_on_grid() + eye)


@dataclass(frozen=True)
class ClassMembership:
    """Numerical proxies for the three integrability classes of a weight.

    `integrable`: samples are positive semidefinite with a finite mean.
    `inverse_integrable`: the pointwise inverse exists and its mean stays
    below a documented ceiling (heuristic, not a proof).
    `log_det_integrable`: log det W has a finite trimmed grid mean; isolated
    singular samples are tolerated since they carry no quadrature mass.
    """

    integrable: bool
    inverse_integrable: bool
    log_det_integrable: bool


def class_membership(weight: WeightFunction, n: int | None = None) -> ClassMembership:
    samples = weight.evaluate_on_grid(n)
    n_pts = samples.shape[0]
    evals = np.linalg.eigvalsh(samples)
    scale = max(1.0, float(evals.max())) if evals.size else 1.0
    nonneg = bool(evals[:, 0].min() >= -matrices.EPS_PD * scale)

    inverse_ok = True
    try:
        inv = invert_samples(samples)
        # the mean of |W^-1(t)| over the grid, not the norm of the mean
        mean_size = float(np.mean(np.sqrt(np.sum(np.abs(inv) ** 2, axis=(1, 2)) / weight.q)))
        if not np.isfinite(mean_size) or mean_size > _INVERSE_MEAN_LIMIT:
            inverse_ok = False
    except SingularSample:
        inverse_ok = False

    logs = _log_det_per_sample(samples)
    singular = int(np.sum(np.isneginf(logs)))
    allowed = max(2, n_pts // 128)
    if singular > allowed:
        log_ok = False
    else:
        trimmed = logs[np.isfinite(logs)]
        log_ok = bool(trimmed.size > 0 and np.isfinite(trimmed.mean()))
    return ClassMembership(nonneg, inverse_ok, log_ok)
