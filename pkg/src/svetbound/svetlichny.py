"""Svetlichny operator, correlation matrices, and the singular-value bound.

The three-qubit correlation data lives in a 3x9 matrix M with
M[j, 3i + k] = tr(rho sigma_{i+1} (x) sigma_{j+1} (x) sigma_{k+1}), indices
0-based, so rows run over party B and columns jointly over parties A and C.
The Svetlichny expectation for unit vectors a, a', b, b', c, c' is the
bilinear form

    (b + b')^T M (a (x) c - a' (x) c') + (b - b')^T M (a (x) c' + a' (x) c)

whose maximum over settings is at most 4 times the largest singular value
of M, with equality exactly when a valid decomposition of the leading
right-singular subspace exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ConsistencyError
from .linalg import SVDResult, pauli, real_expectation, svd_3x9, tensor

SVETLICHNY_BOUND = 4.0
ALGEBRAIC_MAX = 4.0 * math.sqrt(2.0)
VIOLATION_MARGIN = 1e-9
UNIT_NORM_TOL = 1e-12
DEGENERATE_DIRECTION_TOL = 1e-12

# All 27 products sigma_{i+1} (x) sigma_{j+1} (x) sigma_{k+1} in lexicographic
# (i, j, k) order, flattened for a single einsum against the state.
_PAULI_TRIPLES = np.stack(
    [tensor(pauli(i + 1), pauli(j + 1), pauli(k + 1)) for i, j, k in product(range(3), repeat=3)]
)


def _unit(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"{name} must be a unit vector, norm {np.linalg.norm(v):.12g}")
    return v


@dataclass
class MeasurementSettings:
    """Unit Bloch vectors (a, a') for A, (b, b') for B, (c, c') for C."""

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray
    c: np.ndarray
    c_prime: np.ndarray

    def __post_init__(self):
        self.a = _unit(self.a, "a")
        self.a_prime = _unit(self.a_prime, "a_prime")
        self.b = _unit(self.b, "b")
        self.b_prime = _unit(self.b_prime, "b_prime")
        self.c = _unit(self.c, "c")
        self.c_prime = _unit(self.c_prime, "c_prime")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "MeasurementSettings":
        vecs = rng.normal(size=(6, 3))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        return cls(*vecs)


@dataclass
class CorrelationMatrix:
    """The 3x9 correlation matrix of a state together with its SVD."""

    matrix: np.ndarray
    svd: SVDResult


def correlation_matrix(rho: np.ndarray) -> CorrelationMatrix:
    """Correlation matrix of a validated three-qubit state."""
    vals = np.einsum("nab,ba->n", _PAULI_TRIPLES, np.asarray(rho, dtype=complex))
    residue = np.abs(vals.imag).max()
    if residue > 1e-12:
        raise ConsistencyError(f"correlation entries have imaginary residue {residue:.3e}")
    m = vals.real.reshape(3, 3, 3).transpose(1, 0, 2).reshape(3, 9)
    return CorrelationMatrix(matrix=m, svd=svd_3x9(m))


def _bloch_observable(v: np.ndarray) -> np.ndarray:
    return v[0] * pauli(1) + v[1] * pauli(2) + v[2] * pauli(3)


def svetlichny_operator(settings: MeasurementSettings) -> np.ndarray:
    """The 8x8 Svetlichny observable for the given settings."""
    oa = _bloch_observable(settings.a)
    oap = _bloch_observable(settings.a_prime)
    ob = _bloch_observable(settings.b)
    obp = _bloch_observable(settings.b_prime)
    oc = _bloch_observable(settings.c)
    ocp = _bloch_observable(settings.c_prime)
    plus, minus = ob + obp, ob - obp
    return tensor(oa, plus, oc) + tensor(oa, minus, ocp) + tensor(oap, minus, oc) - tensor(oap, plus, ocp)


def svetlichny_value(rho: np.ndarray, settings: MeasurementSettings) -> float:
    """Svetlichny expectation via the operator trace."""
    return real_expectation(np.asarray(rho, dtype=complex), svetlichny_operator(settings))


def svetlichny_value_from_matrix(m: np.ndarray, settings: MeasurementSettings) -> float:
    """Svetlichny expectation via the correlation-matrix bilinear form."""
    t1 = np.kron(settings.a, settings.c) - np.kron(settings.a_prime, settings.c_prime)
    t2 = np.kron(settings.a, settings.c_prime) + np.kron(settings.a_prime, settings.c)
    return float((settings.b + settings.b_prime) @ m @ t1 + (settings.b - settings.b_prime) @ m @ t2)


def _orthogonal_unit(v: np.ndarray) -> np.ndarray:
    # Any unit vector orthogonal to v; pick the axis least aligned with v.
    axis = np.zeros(3)
    axis[np.argmin(np.abs(v))] = 1.0
    w = axis - (axis @ v) * v
    return w / np.linalg.norm(w)


def optimal_bb(
    m: np.ndarray,
    a: np.ndarray,
    a_prime: np.ndarray,
    c: np.ndarray,
    c_prime: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Best (b, b') for fixed outer settings, with the value they achieve.

    Writing u = M(a (x) c - a' (x) c') and w = M(a (x) c' + a' (x) c), the
    optimum is b = (u + w)/|u + w|, b' = (u - w)/|u - w| with value
    |u + w| + |u - w|. Degenerate directions (norm below 1e-12) fall back to
    an arbitrary orthogonal completion, which contributes nothing.
    """
    u = m @ (np.kron(a, c) - np.kron(a_prime, c_prime))
    w = m @ (np.kron(a, c_prime) + np.kron(a_prime, c))
    su, sw = u + w, u - w
    nu, nw = np.linalg.norm(su), np.linalg.norm(sw)
    if nu > DEGENERATE_DIRECTION_TOL:
        b = su / nu
    else:
        b = _orthogonal_unit(sw / nw) if nw > DEGENERATE_DIRECTION_TOL else np.array([1.0, 0.0, 0.0])
    if nw > DEGENERATE_DIRECTION_TOL:
        b_prime = sw / nw
    else:
        b_prime = _orthogonal_unit(b)
    return b, b_prime, float(nu + nw)


@dataclass
class BoundReport:
    """Certified upper bound on the Svetlichny expectation of a state.

    ``bound`` is 4 times the leading singular value. ``tight`` records whether
    a decomposition certifying attainability was found; when settings are
    present, ``achieved`` is the verified expectation they produce.
    """

    bound: float
    lambda1: float
    degeneracy: int
    tight: bool = False
    achieved: float | None = None
    settings: MeasurementSettings | None = None

    @property
    def violates(self) -> bool:
        """Whether the certified achieved value beats the bilocal bound 4."""
        return self.achieved is not None and self.achieved > SVETLICHNY_BOUND + VIOLATION_MARGIN


def unfiltered_bound(rho: np.ndarray) -> BoundReport:
    """Singular-value bound 4*lambda_1 for a state, before any certification."""
    corr = correlation_matrix(rho)
    s1 = float(corr.svd.singular_values[0])
    return BoundReport(bound=4.0 * s1, lambda1=s1, degeneracy=corr.svd.degeneracy())
