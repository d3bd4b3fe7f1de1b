"""Dense linear-algebra helpers sized for three-qubit correlation analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError

DEGENERACY_RTOL = 1e-8
IMAG_RESIDUE_TOL = 1e-12

_SIGMA = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)


def pauli(index: int) -> np.ndarray:
    """Pauli matrix sigma_index for index in {1, 2, 3} (x, y, z)."""
    if index not in (1, 2, 3):
        raise ValueError(f"Pauli index must be 1, 2 or 3, got {index}")
    return _SIGMA[index - 1].copy()


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of the given operators, leftmost factor most significant."""
    if not ops:
        raise ValueError("tensor() needs at least one operator")
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def real_expectation(
    rho: np.ndarray, op: np.ndarray, *, tol: float = IMAG_RESIDUE_TOL, scale: float = 1.0
) -> float:
    """tr(rho @ op) for a Hermitian observable.

    The trace of a Hermitian product is real up to roundoff; an imaginary
    residue above ``tol`` means the inputs were not what they claimed to be.
    Roundoff grows with the operator norm, so callers working with large
    operators pass that norm as ``scale``.
    """
    val = np.einsum("ij,ji->", rho, op)
    if abs(val.imag) > tol * max(1.0, scale):
        raise ConsistencyError(f"expectation has imaginary residue {abs(val.imag):.3e}")
    return float(val.real)


def spectral_2x2_psd(f: np.ndarray, *, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Spectral factors (u, s) of a Hermitian PSD 2x2 matrix, f = u @ diag(s) @ u^dag.

    Eigenvalues come back in nonincreasing order. Values in [-tol, 0) are
    clipped to zero; anything below -tol is rejected.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {f.shape}")
    herm = np.abs(f - f.conj().T).max()
    if herm > tol:
        raise ValueError(f"matrix is not Hermitian, residual {herm:.3e}")
    w, v = np.linalg.eigh(f)
    if w[0] < -tol:
        raise ValueError(f"matrix is not positive semidefinite, min eigenvalue {w[0]:.3e}")
    # Stable order keeps the eigenbasis of an already-diagonal input intact.
    order = np.argsort(-w, kind="stable")
    s = np.clip(w[order], 0.0, None)
    u = np.ascontiguousarray(v[:, order])
    return u, s


@dataclass
class SVDResult:
    """Full singular value decomposition of a real 3x9 matrix.

    ``left_vectors`` (3, 3) and ``right_vectors`` (9, 9) hold singular vectors
    in their columns; the first three right columns pair with
    ``singular_values`` and the rest complete an orthonormal basis.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def degeneracy(self, rtol: float = DEGENERACY_RTOL) -> int:
        """Multiplicity of the leading singular value at relative tolerance rtol."""
        s = self.singular_values
        return int(np.sum(np.abs(s - s[0]) <= rtol * max(1.0, s[0])))

    def leading_right_basis(self, rtol: float = DEGENERACY_RTOL) -> np.ndarray:
        """Orthonormal rows spanning the leading right-singular subspace."""
        k = self.degeneracy(rtol)
        return self.right_vectors[:, :k].T.copy()

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors[:, :3].T


def svd_3x9(a: np.ndarray) -> SVDResult:
    """Full SVD of a real 3x9 matrix with nonincreasing singular values."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3, 9):
        raise ValueError(f"expected a 3x9 matrix, got shape {a.shape}")
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    return SVDResult(singular_values=s, left_vectors=u, right_vectors=vh.T)
