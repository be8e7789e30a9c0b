"""Dense complex linear algebra used throughout the package.

Plain matrices are ``numpy.ndarray`` of dtype ``complex128``. Operators on a
tensor product space carry their factor dimensions in :class:`BipartiteOperator`,
with blocks indexed by the first factor::

    M = sum_ij E_ij (x) M.block(i, j)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotUnitary

STRUCT_TOL = 1e-10
RECON_TOL = 1e-12


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array (a copy)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


@dataclass(frozen=True, eq=False)
class BipartiteOperator:
    """Square matrix on C^dim1 (x) C^dim2."""

    matrix: np.ndarray
    dim1: int
    dim2: int

    def __post_init__(self):
        m = as_matrix(self.matrix, square=True)
        n1, n2 = int(self.dim1), int(self.dim2)
        if n1 < 1 or n2 < 1 or m.shape[0] != n1 * n2:
            raise DimensionMismatch(
                f"matrix of shape {m.shape} does not act on C^{n1} (x) C^{n2}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim1", n1)
        object.__setattr__(self, "dim2", n2)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def tensor(self) -> np.ndarray:
        """View with indices ``[i, k, j, l] = M[(i,k), (j,l)]``."""
        return self.matrix.reshape(self.dim1, self.dim2, self.dim1, self.dim2)

    def block(self, i: int, j: int) -> np.ndarray:
        m = self.dim2
        return self.matrix[i * m:(i + 1) * m, j * m:(j + 1) * m].copy()

    def blocks(self) -> np.ndarray:
        """All blocks as an array ``[i, j] -> block(i, j)``."""
        return self.tensor().transpose(0, 2, 1, 3).copy()

    def with_matrix(self, matrix) -> "BipartiteOperator":
        return BipartiteOperator(matrix, self.dim1, self.dim2)

    def dagger(self) -> "BipartiteOperator":
        return self.with_matrix(dagger(self.matrix))

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_hermitian(self, tol: float = STRUCT_TOL) -> bool:
        return is_hermitian(self.matrix, tol)

    def _check_compatible(self, other: "BipartiteOperator"):
        if (self.dim1, self.dim2) != (other.dim1, other.dim2):
            raise DimensionMismatch(
                f"factor dimensions {(self.dim1, self.dim2)} != {(other.dim1, other.dim2)}"
            )

    def __add__(self, other: "BipartiteOperator") -> "BipartiteOperator":
        self._check_compatible(other)
        return self.with_matrix(self.matrix + other.matrix)

    def __sub__(self, other: "BipartiteOperator") -> "BipartiteOperator":
        self._check_compatible(other)
        return self.with_matrix(self.matrix - other.matrix)

    def __mul__(self, scalar) -> "BipartiteOperator":
        return self.with_matrix(scalar * self.matrix)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "BipartiteOperator":
        return self.with_matrix(self.matrix / scalar)

    def __neg__(self) -> "BipartiteOperator":
        return self.with_matrix(-self.matrix)

    def allclose(self, other: "BipartiteOperator", atol: float = RECON_TOL) -> bool:
        self._check_compatible(other)
        return bool(np.max(np.abs(self.matrix - other.matrix), initial=0.0) <= atol)

    def __repr__(self):
        return f"BipartiteOperator(dim1={self.dim1}, dim2={self.dim2})"


def bipartite(matrix, dim1: int, dim2: int | None = None) -> BipartiteOperator:
    return BipartiteOperator(matrix, dim1, dim1 if dim2 is None else dim2)


def _as_array(m) -> np.ndarray:
    return m.matrix if isinstance(m, BipartiteOperator) else np.asarray(m)


def frobenius(a) -> float:
    return float(np.linalg.norm(_as_array(a)))


def is_hermitian(a, tol: float = STRUCT_TOL) -> bool:
    """Relative Hermiticity check ``|M - M*|_F <= tol |M|_F``."""
    m = _as_array(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(np.linalg.norm(m), 1.0)
    return bool(np.linalg.norm(m - dagger(m)) <= tol * scale)


def is_unitary(u, tol: float = STRUCT_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))) <= tol)


def projector(v) -> np.ndarray:
    """Orthogonal projector onto the line spanned by ``v``."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def matrix_unit(i: int, j: int, n: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def basis_vector(i: int, n: int) -> np.ndarray:
    e = np.zeros(n, dtype=np.complex128)
    e[i] = 1.0
    return e


def fix_phase(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Rotate each column so its first component above ``tol`` is real positive.

    Works on stacks ``(..., n, k)``.
    """
    v = np.array(vectors, dtype=np.complex128)
    mags = np.abs(v)
    first = np.argmax(mags > tol, axis=-2)
    lead = np.take_along_axis(v, first[..., None, :], axis=-2)
    lead_abs = np.abs(lead)
    phase = np.where(lead_abs > 0, lead / np.where(lead_abs > 0, lead_abs, 1.0), 1.0)
    return v / phase


# ---------------------------------------------------------------------------
# eigensolvers


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _jacobi_hermitian(a: np.ndarray, max_sweeps: int = 100, eps: float = 1e-15):
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix."""
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off <= eps * scale:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= eps * scale * 1e-3:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ph = apq / mag
                # g = diag(1, conj(ph)) @ [[c, s], [-s, c]] maps a[p,q] to zero
                g = np.array([[c, s], [-s * np.conj(ph), c * np.conj(ph)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")


def eig_hermitian(m, tol: float = STRUCT_TOL, method: str = "lapack") -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned ascending; eigenvectors are the columns of
    ``eigenvectors``, each phase-fixed so that its first non-negligible
    component is real and positive.

    Parameters
    ----------
    m : array_like or BipartiteOperator
    tol : float
        Relative Hermiticity tolerance; :class:`NotHermitian` above it.
    method : {"lapack", "jacobi"}
        ``"jacobi"`` runs the in-house cyclic Jacobi rotation solver.
    """
    a = as_matrix(_as_array(m), square=True)
    if not is_hermitian(a, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + dagger(a))
    if method == "lapack":
        w, v = np.linalg.eigh(a)
    elif method == "jacobi":
        w, v = _jacobi_hermitian(a)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(w, kind="stable")
    return EigenSystem(w[order], fix_phase(v[:, order]))


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = U diag(s) V*`` with ``s`` descending.

    Returns ``(U, s, V)`` where ``V`` holds the right singular vectors as
    columns (not ``V*``).
    """
    a = as_matrix(_as_array(m))
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return u, s, dagger(vh)


def trace_norm(m) -> float:
    a = _as_array(m)
    if is_hermitian(a, 1e-12):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + dagger(a))))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(_as_array(a)), as_matrix(_as_array(b)))


# ---------------------------------------------------------------------------
# bipartite operations


def partial_trace(m: BipartiteOperator, factor: int) -> np.ndarray:
    """Trace out tensor factor ``factor`` (1 or 2)."""
    t = m.tensor()
    if factor == 2:
        return np.einsum("ikjk->ij", t)
    if factor == 1:
        return np.einsum("ikil->kl", t)
    raise ValueError("factor must be 1 or 2")


def partial_transpose(m: BipartiteOperator) -> BipartiteOperator:
    """Transpose every block, i.e. apply id (x) transpose."""
    t = m.tensor().transpose(0, 3, 2, 1)
    return m.with_matrix(t.reshape(m.shape))


def local_conjugate(m: BipartiteOperator, u, v, tol: float = STRUCT_TOL) -> BipartiteOperator:
    """Return ``(U (x) V) M (U (x) V)*``."""
    u = as_matrix(u, square=True)
    v = as_matrix(v, square=True)
    if u.shape[0] != m.dim1 or v.shape[0] != m.dim2:
        raise DimensionMismatch("unitary sizes do not match the factor dimensions")
    if not (is_unitary(u, tol) and is_unitary(v, tol)):
        raise NotUnitary("local conjugation needs unitary factors")
    w = np.kron(u, v)
    return m.with_matrix(w @ m.matrix @ dagger(w))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from QR of a complex Gaussian, phase-fixed diagonal."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + dagger(z))
