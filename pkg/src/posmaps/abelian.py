"""Maps restricted to the diagonal subalgebra and their extremality.

A unital CP map from the diagonal ``n x n`` matrices is fixed by the images
``K_i = phi(E_ii)``. It is extreme among unital CP maps iff the ranges of the
``K_i`` are weakly independent, and C*-extreme iff the ``K_i`` are mutually
orthogonal projectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSum
from .matcore import BipartiteOperator, as_matrix, dagger

RANGE_TOL = 1e-9
SINGULAR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ArvesonDecomposition:
    K: tuple[np.ndarray, ...]
    sum: np.ndarray
    ranks: tuple[int, ...]

    @classmethod
    def from_operators(cls, ops, tol: float = RANGE_TOL) -> "ArvesonDecomposition":
        ks = tuple(as_matrix(k, square=True) for k in ops)
        if not ks:
            raise ValueError("need at least one operator")
        if len({k.shape for k in ks}) != 1:
            raise ValueError("operators must share one size")
        ranks = tuple(int(np.count_nonzero(np.linalg.eigvalsh(_herm(k)) > tol)) for k in ks)
        return cls(ks, np.sum(ks, axis=0), ranks)

    @property
    def dim(self) -> int:
        return self.sum.shape[0]

    def __len__(self) -> int:
        return len(self.K)


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def restrict_to_diagonal(rho: BipartiteOperator) -> ArvesonDecomposition:
    """``K_i = rho.block(i, i)``, the images of the diagonal matrix units."""
    return ArvesonDecomposition.from_operators([rho.block(i, i) for i in range(rho.dim1)])


def renormalize(family: ArvesonDecomposition) -> ArvesonDecomposition:
    """``S^{-1/2} K_i S^{-1/2}`` with ``S = sum_i K_i``, so the result sums to one."""
    w, v = np.linalg.eigh(_herm(family.sum))
    if w[0] <= SINGULAR_TOL:
        raise SingularSum(f"sum has eigenvalue {w[0]:.3e}")
    root = (v / np.sqrt(w)) @ dagger(v)
    out = ArvesonDecomposition.from_operators([root @ k @ root for k in family.K])
    if out.ranks != family.ranks:
        raise AssertionError(f"renormalization changed ranks {family.ranks} -> {out.ranks}")
    return out


def _range(k: np.ndarray, tol: float) -> np.ndarray:
    w, v = np.linalg.eigh(_herm(k))
    return v[:, w > tol]


def weak_independence(family: ArvesonDecomposition, tol: float = RANGE_TOL) -> bool:
    """Linear independence of the operator spaces ``B(M_i)``, ``M_i = range K_i``.

    ``B(M_i)`` is spanned by ``xi eta^*`` for basis vectors of ``M_i``; the
    family is weakly independent iff the vectorized spanning sets stacked
    together have full column rank ``sum_i dim(M_i)^2``.
    """
    cols = []
    for k in family.K:
        b = _range(k, tol)
        d = b.shape[1]
        if d:
            # vec(xi eta^*) = xi (x) conj(eta)
            cols.append(np.einsum("ia,jb->ijab", b, b.conj()).reshape(-1, d * d))
    if not cols:
        return True
    stacked = np.hstack(cols)
    if stacked.shape[1] > stacked.shape[0]:
        return False
    s = np.linalg.svd(stacked, compute_uv=False)
    return bool(s[-1] > tol)


def is_cstar_extreme(family: ArvesonDecomposition, tol: float = RANGE_TOL) -> bool:
    """True iff every ``K_i`` is a projector and ``K_i K_j = 0`` for ``i != j``."""
    ks = family.K
    for i, k in enumerate(ks):
        if np.max(np.abs(k @ k - k)) > tol:
            return False
        for other in ks[i + 1:]:
            if np.max(np.abs(k @ other)) > tol:
                return False
    return True


def arveson_extreme_check(family: ArvesonDecomposition, tol: float = RANGE_TOL) -> str:
    """``"malformed"`` unless the ``K_i`` are PSD and sum to one; otherwise
    ``"extreme"`` or ``"not_extreme"`` by weak independence."""
    for k in family.K:
        if np.max(np.abs(k - dagger(k))) > tol or np.linalg.eigvalsh(_herm(k))[0] < -tol:
            return "malformed"
    if np.max(np.abs(family.sum - np.eye(family.dim))) > tol:
        return "malformed"
    return "extreme" if weak_independence(family, tol) else "not_extreme"


def overlapping_range_family() -> ArvesonDecomposition:
    """``K_1 = E11``, ``K_2 = E22``, ``K_3 = P_u / 2 + E33`` with ``u = (e1 + e3)/sqrt 2``.

    The sum is invertible, so :func:`renormalize` turns this into a unital
    family whose first and third members do not commute to zero.
    """
    e = np.eye(3)
    v = (e[0] + e[2]) / np.sqrt(2.0)
    return ArvesonDecomposition.from_operators(
        [np.outer(e[0], e[0]), np.outer(e[1], e[1]), 0.5 * np.outer(v, v) + np.outer(e[2], e[2])]
    )
