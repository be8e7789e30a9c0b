"""Canonical forms of Choi matrices of regular extreme unital positive maps on
``M_2``.

Such a Choi matrix has diagonal blocks ``|y1><y1|``, ``|y2><y2|`` for an
orthonormal pair and off-diagonal block ``c0 |y1><y2| + c |y2><y1|`` with
``c0 >= 0``, or it is ``E11 (x) 1``. In the first case

    rho = c0 rho0 + |c| w_phase + (1 - c0 - |c|) rho_diag,

a convex combination whenever ``c0 + |c| <= 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotCanonical, NotHermitian, ResidualTooLarge, WeightViolation
from .matcore import BipartiteOperator, frobenius

DEGENERATE_TOL = 1e-9
WEIGHT_TOL = 1e-10


def _assemble(b11, b12, b22) -> BipartiteOperator:
    t = np.empty((2, 2, 2, 2), dtype=np.complex128)
    t[0, :, 0, :] = b11
    t[0, :, 1, :] = b12
    t[1, :, 0, :] = b12.conj().T
    t[1, :, 1, :] = b22
    return BipartiteOperator(t.reshape(4, 4), 2, 2)


def _phase(z: complex) -> complex:
    return 1.0 if z == 0 else z / abs(z)


def canonical_choi(y1, y2, c0: float, c: complex) -> BipartiteOperator:
    """Assemble the entangled block form from an orthonormal pair and coefficients."""
    y1 = np.asarray(y1, dtype=np.complex128)
    y2 = np.asarray(y2, dtype=np.complex128)
    p1, p2 = np.outer(y1, y1.conj()), np.outer(y2, y2.conj())
    off = c0 * np.outer(y1, y2.conj()) + c * np.outer(y2, y1.conj())
    return _assemble(p1, off, p2)


def tilde_generators(y1, y2, c: complex) -> tuple[BipartiteOperator, BipartiteOperator, BipartiteOperator]:
    """``(rho0, w_phase, rho_diag)`` for the orthonormal pair ``y1, y2``.

    ``rho0 = sum_ij E_ij (x) |y_i><y_j|`` is twice the projector onto
    ``(e1 (x) y1 + e2 (x) y2)/sqrt 2``; ``w_phase`` is the symmetry with
    off-diagonal block ``e^{i arg c} |y2><y1|``; ``rho_diag`` keeps only
    the diagonal blocks.
    """
    y1 = np.asarray(y1, dtype=np.complex128)
    y2 = np.asarray(y2, dtype=np.complex128)
    p1, p2 = np.outer(y1, y1.conj()), np.outer(y2, y2.conj())
    rho0 = _assemble(p1, np.outer(y1, y2.conj()), p2)
    w_phase = _assemble(p1, _phase(c) * np.outer(y2, y1.conj()), p2)
    rho_diag = _assemble(p1, np.zeros((2, 2)), p2)
    return rho0, w_phase, rho_diag


@dataclass(frozen=True, eq=False)
class Classification2:
    form: str  # "entangled_form" | "degenerate_form"
    rho: BipartiteOperator = field(repr=False)
    y1: np.ndarray | None = None
    y2: np.ndarray | None = None
    c0: float = 0.0
    c: complex = 0.0
    generators: tuple[BipartiteOperator, ...] | None = field(default=None, repr=False)
    weights: tuple[float, float, float] | None = None
    residual: float = 0.0


def _unit_eigvec(block: np.ndarray, tol: float) -> np.ndarray | None:
    w, v = np.linalg.eigh(block)
    if abs(w[0]) <= tol and abs(w[1] - 1.0) <= tol:
        return v[:, 1]
    return None


def classify_regular_extreme_2(rho: BipartiteOperator, tol: float = DEGENERATE_TOL) -> Classification2:
    """Bring a 2x2 Choi matrix into one of the two canonical block forms.

    Raises :class:`NotCanonical` when the diagonal blocks are neither rank-one
    projectors nor ``(1, 0)``, and :class:`ResidualTooLarge` when the
    off-diagonal block does not fit the canonical form.
    """
    if (rho.dim1, rho.dim2) != (2, 2):
        raise DimensionMismatch("classifier expects a 2x2 bipartite operator")
    if not rho.is_hermitian(tol):
        raise NotHermitian("classifier expects a Hermitian operator")
    b11, b12, b22 = rho.block(0, 0), rho.block(0, 1), rho.block(1, 1)
    eye = np.eye(2)
    for top, bottom in ((b11, b22), (b22, b11)):
        if np.max(np.abs(top - eye)) <= tol and np.max(np.abs(bottom)) <= tol:
            res = float(np.max(np.abs(b12)))
            if res > tol:
                raise ResidualTooLarge(f"off-diagonal block of size {res:.3e} in degenerate form")
            return Classification2("degenerate_form", rho, residual=res)
    y1 = _unit_eigvec(b11, tol)
    y2 = _unit_eigvec(b22, tol)
    if y1 is None or y2 is None or abs(np.vdot(y1, y2)) > tol:
        raise NotCanonical("diagonal blocks are not complementary rank-one projectors")
    res = max(abs(np.vdot(y1, b12 @ y1)), abs(np.vdot(y2, b12 @ y2)))
    if res > tol:
        raise ResidualTooLarge(f"off-diagonal block has diagonal part {res:.3e} in the y basis")
    # rotate y1 so the |y1><y2| coefficient becomes real and non-negative
    y1 = y1 * _phase(np.vdot(y1, b12 @ y2))
    c0 = float(np.vdot(y1, b12 @ y2).real)
    c = complex(np.vdot(y2, b12 @ y1))
    rebuilt = canonical_choi(y1, y2, c0, c)
    residual = frobenius(rebuilt.matrix - rho.matrix)
    if residual > max(tol, 1e-10) * 4:
        raise ResidualTooLarge(f"canonical form misses the input by {residual:.3e}")
    return Classification2(
        "entangled_form",
        rho,
        y1,
        y2,
        c0,
        c,
        tilde_generators(y1, y2, c),
        (c0, abs(c), 1.0 - c0 - abs(c)),
        residual,
    )


@dataclass(frozen=True, eq=False)
class TildeDecomposition:
    generators: tuple[BipartiteOperator, BipartiteOperator, BipartiteOperator]
    weights: tuple[float, float, float]
    reconstruction_error: float


def decompose_tilde_D(cls: Classification2) -> TildeDecomposition:
    """Write an entangled-form Choi matrix as a convex combination of
    ``rho0``, ``w_phase`` and ``rho_diag``.

    Raises :class:`WeightViolation` if ``c0 + |c| > 1``, which no normalized
    positive map can have.
    """
    if cls.form != "entangled_form":
        raise NotCanonical("only the entangled form decomposes over the generators")
    c0, mod_c = cls.c0, abs(cls.c)
    if c0 + mod_c > 1.0 + WEIGHT_TOL:
        raise WeightViolation(f"c0 + |c| = {c0 + mod_c:.12g} exceeds 1")
    weights = (c0, mod_c, max(0.0, 1.0 - c0 - mod_c))
    gens = cls.generators
    combo = sum((wt * g.matrix for wt, g in zip(weights, gens)), np.zeros((4, 4), dtype=np.complex128))
    return TildeDecomposition(gens, weights, frobenius(combo - cls.rho.matrix))
