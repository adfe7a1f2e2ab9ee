"""Shared test weights and cached finite sections."""

from functools import lru_cache

import numpy as np

from specpredict.duality import FiniteSection
from specpredict.weights import WeightFunction


def ma1_weight(a=0.5):
    """Scalar moving-average density |1 + a e^{it}|^2."""
    return WeightFunction.from_trig_coefficients({0: [[1.0 + a * a]], 1: [[a]]})


def boundary_weight():
    """|1 + e^{it}|^2: vanishes at t = -pi, inverse not integrable."""
    return WeightFunction.from_trig_coefficients({0: [[2.0]], 1: [[1.0]]})


def random_constant(q, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    return g @ g.conj().T / q + 0.5 * np.eye(q)


def random_hermitian(q, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    return 0.5 * (g + g.conj().T)


def random_factor_weight(q, degree, seed):
    """Density built as P*P from an analytic matrix polynomial.

    The constant term dominates the tail, so P is outer and the density is
    uniformly positive; returns (weight, list of polynomial coefficients).
    The true normalized factor is U* P with U the unitary polar factor of
    P(0), which makes this generator an oracle for the factorization.
    """
    rng = np.random.default_rng(seed)
    coeffs = []
    g0 = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    coeffs.append(np.eye(q) + 0.25 * g0 / max(1.0, np.linalg.norm(g0, 2)))
    for j in range(1, degree + 1):
        gj = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        coeffs.append((0.4 ** j) * gj / max(1.0, np.linalg.norm(gj, 2)))
    m = {}
    for lag in range(degree + 1):
        m[lag] = sum(coeffs[j].conj().T @ coeffs[j + lag] for j in range(degree + 1 - lag))
    return WeightFunction.from_trig_coefficients(m), coeffs


def true_factor_coefficients(poly_coeffs):
    """Normalize the generator polynomial to the positive-mean convention."""
    u, _, vh = np.linalg.svd(poly_coeffs[0])
    unitary = u @ vh
    return [unitary.conj().T @ c for c in poly_coeffs]


def diagonal_weight(scalars):
    """Block-diagonal weight from scalar MA(1) parameter per channel."""
    q = len(scalars)
    m0 = np.diag([1.0 + a * a for a in scalars]).astype(complex)
    m1 = np.diag([complex(a) for a in scalars])
    return WeightFunction.from_trig_coefficients({0: m0, 1: m1})


def random_cyclic_model(n_points, q, seed):
    from specpredict.duality import CyclicModel

    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n_points):
        g = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        samples.append(g @ g.conj().T + 0.4 * np.eye(q))
    size = int(rng.integers(1, n_points - 1))
    subset = tuple(rng.choice(np.arange(1, n_points), size=size, replace=False))
    return CyclicModel(n_points=n_points, q=q, samples=np.stack(samples), subset=subset)


@lru_cache(maxsize=None)
def cached_section(key, n_grid=4096):
    """Finite sections are expensive to build; share them across tests."""
    weight = {
        "ma1": ma1_weight,
        "q2a": lambda: random_factor_weight(2, 3, 7)[0],
        "q2b": lambda: random_factor_weight(2, 3, 21)[0],
        "diag": lambda: diagonal_weight([0.5, -0.3]),
    }[key]()
    return FiniteSection(weight, n_grid)


@lru_cache(maxsize=None)
def cached_factor(key, truncation=64):
    from specpredict.factorization import factorize

    return factorize(cached_section(key).weight, truncation=truncation)
