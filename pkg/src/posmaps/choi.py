"""Choi matrices of linear maps and membership in the set of normalized unital
positive maps.

A map ``phi: M_n -> M_m`` is stored by its images of the matrix units and
encoded as ``rho = sum_ij E_ij (x) phi(E_ij)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .certify import BlockPositivityCertificate, block_positivity
from .errors import DimensionMismatch, NotRankOneProjector
from .matcore import BipartiteOperator, as_matrix, dagger, is_hermitian, matrix_unit

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MapImages:
    """Images ``images[i, j] = phi(E_ij)`` of a map ``M_n -> M_m``."""

    n: int
    m: int
    images: np.ndarray  # shape (n, n, m, m)

    def __post_init__(self):
        imgs = np.array(self.images, dtype=np.complex128)
        if imgs.shape != (self.n, self.n, self.m, self.m):
            raise DimensionMismatch(
                f"images shape {imgs.shape} does not match n={self.n}, m={self.m}"
            )
        imgs.setflags(write=False)
        object.__setattr__(self, "images", imgs)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], n: int, m: int | None = None) -> "MapImages":
        m = n if m is None else m
        imgs = np.empty((n, n, m, m), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                imgs[i, j] = fn(matrix_unit(i, j, n))
        return cls(n, m, imgs)

    def is_hermiticity_preserving(self, tol: float = 1e-12) -> bool:
        swapped = np.conj(np.swapaxes(np.swapaxes(self.images, 0, 1), 2, 3))
        return bool(np.max(np.abs(swapped - self.images), initial=0.0) <= tol)

    def __call__(self, a) -> np.ndarray:
        a = as_matrix(a, square=True)
        if a.shape[0] != self.n:
            raise DimensionMismatch(f"input is {a.shape[0]}x{a.shape[0]}, map expects n={self.n}")
        return np.einsum("ij,ijkl->kl", a, self.images)


def choi_of(images: MapImages) -> BipartiteOperator:
    n, m = images.n, images.m
    mat = images.images.transpose(0, 2, 1, 3).reshape(n * m, n * m)
    return BipartiteOperator(mat, n, m)


def apply_choi(rho: BipartiteOperator, a) -> np.ndarray:
    """Apply the map encoded by ``rho``: ``sum_ij a[i,j] rho.block(i,j)``."""
    a = as_matrix(a)
    if a.shape != (rho.dim1, rho.dim1):
        raise DimensionMismatch(f"argument shape {a.shape}, expected {(rho.dim1, rho.dim1)}")
    return np.einsum("ij,ikjl->kl", a, rho.tensor())


def transposition_choi(n: int) -> BipartiteOperator:
    """The swap operator ``w = sum_ij E_ij (x) E_ji``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    t = np.zeros((n, n, n, n), dtype=np.complex128)
    idx = np.arange(n)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    t[ii, jj, jj, ii] = 1.0
    return BipartiteOperator(t.reshape(n * n, n * n), n, n)


def max_entangled_choi(n: int) -> BipartiteOperator:
    """``n P_x`` with ``x = sum_i e_i (x) e_i / sqrt(n)``: the identity map."""
    if n < 2:
        raise ValueError("n must be at least 2")
    v = np.eye(n, dtype=np.complex128).ravel()
    return BipartiteOperator(np.outer(v, v), n, n)


def product_with_identity(p, n: int) -> BipartiteOperator:
    """``p (x) 1_n`` for a rank-one projector ``p``: the map ``a -> Tr(p^T a) 1``."""
    p = as_matrix(p, square=True)
    if not (
        is_hermitian(p, 1e-10)
        and np.max(np.abs(p @ p - p)) <= 1e-10
        and abs(np.trace(p) - 1.0) <= 1e-10
    ):
        raise NotRankOneProjector("expected a Hermitian idempotent of trace one")
    return BipartiteOperator(np.kron(p, np.eye(n)), p.shape[0], n)


@dataclass(frozen=True)
class DMembershipReport:
    hermitian: bool
    trace_value: float
    trace_ok: bool
    unital: bool
    block_positive: BlockPositivityCertificate | None
    verdict: str  # "member" | "non_member" | "inconclusive"

    @property
    def witness(self) -> tuple[np.ndarray, np.ndarray] | None:
        cert = self.block_positive
        if cert is None or not cert.has_witness:
            return None
        return cert.witness_x, cert.witness_y


def membership_D(
    rho: BipartiteOperator,
    restarts: int = 100,
    seed: int = 0,
    tol: float = MEMBERSHIP_TOL,
    max_iters: int = 200,
) -> DMembershipReport:
    """Decide (up to the search budget) whether ``rho`` is the Choi matrix of a
    normalized unital positive map.

    The linear checks are exact: Hermiticity, ``Tr rho = n`` and unitality
    ``sum_i block(i,i) = 1``. Block positivity is searched for a negative
    product-vector witness. For Hermitian unital block-positive ``rho`` the
    alpha norm is automatically one, so it is not optimized here.

    A verdict of ``"member"`` means no witness was found within the budget;
    ``"inconclusive"`` means the linear checks passed but no search was run
    (``restarts=0``). Restarts that stall near a zero minimum without meeting
    the stopping rule still count as searched.
    """
    if rho.dim1 != rho.dim2:
        raise DimensionMismatch("membership needs equal factor dimensions")
    n = rho.dim1
    herm = rho.is_hermitian(tol)
    tr = complex(rho.trace())
    trace_ok = abs(tr - n) <= tol * n
    unital = bool(np.max(np.abs(apply_choi(rho, np.eye(n)) - np.eye(n))) <= tol)
    cert = None
    if herm:
        h = rho.with_matrix(0.5 * (rho.matrix + dagger(rho.matrix)))
        cert = block_positivity(h, restarts=restarts, max_iters=max_iters, tol=tol, seed=seed)
    if not (herm and trace_ok and unital) or (cert is not None and cert.has_witness):
        verdict = "non_member"
    elif cert is None or cert.restarts_used == 0:
        verdict = "inconclusive"
    else:
        verdict = "member"
    return DMembershipReport(herm, float(tr.real), trace_ok, unital, cert, verdict)

