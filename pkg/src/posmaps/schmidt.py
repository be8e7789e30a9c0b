"""Schmidt decomposition of vectors in a two-factor tensor product."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotNormalized

RANK_TOL = 1e-9
_NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``x = sum_i coefficients[i] * left[:, i] (x) right[:, i]``.

    Coefficients are non-negative and descending; phases live in the left
    vectors. Only the first ``rank`` terms are significant.
    """

    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    rank: int

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ik,jk->ij", self.coefficients, self.left_vectors, self.right_vectors).ravel()


def _unit(x, name: str = "vector") -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128).ravel()
    if abs(np.linalg.norm(x) - 1.0) > _NORM_TOL:
        raise NotNormalized(f"{name} must have unit norm")
    return x


def schmidt(x, dim1: int, dim2: int | None = None, rank_tol: float = RANK_TOL) -> SchmidtDecomposition:
    """Schmidt decomposition of a unit vector in ``C^dim1 (x) C^dim2``.

    Computed from the SVD of the coefficient matrix ``X[i, j] = (e_i (x) e_j, x)``.
    """
    dim2 = dim1 if dim2 is None else dim2
    x = _unit(x)
    if x.size != dim1 * dim2:
        raise DimensionMismatch(f"vector of length {x.size} is not in {dim1}x{dim2}")
    u, s, vh = np.linalg.svd(x.reshape(dim1, dim2))
    # X = U diag(s) V^H, so the right Schmidt vectors are the columns of conj(V)
    # = rows of vh; svd already yields real non-negative s.
    return SchmidtDecomposition(s, u[:, : s.size], vh[: s.size].T, int(np.count_nonzero(s > rank_tol)))


def schmidt_coefficients(xs: np.ndarray, dim1: int, dim2: int | None = None) -> np.ndarray:
    """Descending Schmidt coefficients of a stack of vectors ``(N, dim1*dim2)``."""
    dim2 = dim1 if dim2 is None else dim2
    xs = np.asarray(xs, dtype=np.complex128)
    return np.linalg.svd(xs.reshape(-1, dim1, dim2), compute_uv=False)


def is_max_entangled(x, dim: int | None = None, tol: float = 1e-9) -> bool:
    x = _unit(x)
    n = int(round(np.sqrt(x.size))) if dim is None else dim
    if n * n != x.size:
        raise DimensionMismatch("maximal entanglement needs equal factor dimensions")
    s = np.linalg.svd(x.reshape(n, n), compute_uv=False)
    return bool(np.max(np.abs(s - 1.0 / np.sqrt(n))) <= tol)


def overlap(x, z, dim1: int | None = None) -> float:
    """``Tr((1 (x) P_z) P_x)``, the weight of ``x`` on ``C^dim1 (x) z``."""
    x = _unit(x, "x")
    z = _unit(z, "z")
    if x.size % z.size:
        raise DimensionMismatch("z does not fit the second factor of x")
    n = x.size // z.size if dim1 is None else dim1
    amp = x.reshape(n, z.size) @ z.conj()
    return float(np.vdot(amp, amp).real)
