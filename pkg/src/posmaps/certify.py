"""Optimization-based certificates for bipartite operators.

Block positivity is probed by a see-saw over product vectors: with ``y``
fixed the quadratic form ``(x (x) y, rho x (x) y)`` is ``(x, B(y) x)``, so the
best ``x`` is a lowest eigenvector of ``B(y)``, and symmetrically for ``y``.
A negative value is a proof that ``rho`` is not block positive; failing to
find one after the restart budget is only evidence.

The alpha norm is ``max |Tr rho (s (x) P_y)|`` over symmetries ``s`` and unit
vectors ``y``. For fixed ``y`` the optimum over ``s`` is the trace norm of
``B(y)``, attained by the sign of ``B(y)``, so only the sphere in the second
factor is searched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotNormalized
from .matcore import (
    BipartiteOperator,
    as_matrix,
    dagger,
    fix_phase,
    is_hermitian,
    partial_transpose,
)

DEFAULT_RESTARTS = 100
DEFAULT_MAX_ITERS = 200
DEFAULT_TOL = 1e-9
# points per vectorized chunk in block_positivity_many
_CHUNK_ITEMS = 8000


@dataclass(frozen=True)
class BlockPositivityCertificate:
    min_value_found: float
    witness_x: np.ndarray | None
    witness_y: np.ndarray | None
    restarts_used: int
    converged_restarts: int
    best_x: np.ndarray | None = field(default=None, repr=False)
    best_y: np.ndarray | None = field(default=None, repr=False)
    history: np.ndarray | None = field(default=None, repr=False)

    @property
    def has_witness(self) -> bool:
        return self.witness_x is not None


@dataclass(frozen=True)
class AlphaNormEstimate:
    value: float
    maximizer_y: np.ndarray
    maximizer_symmetry: np.ndarray
    restarts_used: int
    history: np.ndarray | None = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# simple checks


def is_psd(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff the Hermitian matrix ``m`` has no eigenvalue below ``-tol``."""
    a = m.matrix if isinstance(m, BipartiteOperator) else as_matrix(m, square=True)
    if not is_hermitian(a, max(tol, 1e-12)):
        raise NotHermitian("is_psd expects a Hermitian matrix")
    return bool(np.linalg.eigvalsh(0.5 * (a + dagger(a)))[0] >= -tol)


def is_cp(rho: BipartiteOperator, tol: float = DEFAULT_TOL) -> bool:
    return is_psd(rho, tol)


def is_cocp(rho: BipartiteOperator, tol: float = DEFAULT_TOL) -> bool:
    return is_psd(partial_transpose(rho), tol)


def product_value(rho: BipartiteOperator, x, y) -> float:
    """Direct quadratic form ``(x (x) y, rho x (x) y)`` (real part)."""
    v = np.kron(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    return float(np.real(np.vdot(v, rho.matrix @ v)))


# ---------------------------------------------------------------------------
# contractions


def _contract_second(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    # B(y)[i,j] = sum_kl conj(y_k) t[i,k,j,l] y_l ; batch dims broadcast
    tmp = np.einsum("...ikjl,...l->...ikj", t, y)
    return np.einsum("...ikj,...k->...ij", tmp, y.conj())


def _contract_first(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    # A(x)[k,l] = sum_ij conj(x_i) t[i,k,j,l] x_j
    tmp = np.einsum("...ikjl,...j->...ikl", t, x)
    return np.einsum("...ikl,...i->...kl", tmp, x.conj())


def contraction(rho: BipartiteOperator, y, side: int = 2) -> np.ndarray:
    """Partial contraction of ``rho`` with a unit vector.

    ``side=2`` gives ``B(y) = Tr_2 rho (1 (x) P_y)`` so that
    ``(x, B(y) x) = (x (x) y, rho x (x) y)``; ``side=1`` gives
    ``A(x) = Tr_1 rho (P_x (x) 1)``.
    """
    y = np.asarray(y, dtype=np.complex128).ravel()
    expected = rho.dim2 if side == 2 else rho.dim1
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    if y.shape[0] != expected:
        raise DimensionMismatch(f"vector of length {y.shape[0]}, expected {expected}")
    if abs(np.linalg.norm(y) - 1.0) > 1e-12:
        raise NotNormalized("contraction vector must be a unit vector")
    t = rho.tensor()
    return _contract_second(t, y) if side == 2 else _contract_first(t, y)


# ---------------------------------------------------------------------------
# restarts


@lru_cache(maxsize=32)
def _starts(seed: int, restarts: int, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.empty((restarts, n), dtype=np.complex128)
    ys = np.empty((restarts, m), dtype=np.complex128)
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        xs[r] = x / np.linalg.norm(x)
        ys[r] = y / np.linalg.norm(y)
    xs.setflags(write=False)
    ys.setflags(write=False)
    return xs, ys


def _lowest(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(h)
    return w[..., 0], v[..., :, 0]


def _seesaw_min(t_items, x, y, max_iters, tol, record=False):
    """Vectorized see-saw descent on a batch of (operator, start) items.

    ``t_items`` is either one tensor ``(n, m, n, m)`` shared by all items or
    a stack ``(N, n, m, n, m)``. Returns final values, vectors, convergence
    flags and optionally the per-half-step value history ``(2*iters+1, N)``.
    """
    shared = t_items.ndim == 4
    x = x.copy()
    y = y.copy()
    size = x.shape[0]
    b0 = _contract_second(t_items, y)
    value = np.real(np.einsum("bi,bij,bj->b", x.conj(), b0, x))
    converged = np.zeros(size, dtype=bool)
    active = np.arange(size)
    hist = [value.copy()] if record else None
    for _ in range(max_iters):
        if active.size == 0:
            break
        t = t_items if shared else t_items[active]
        half, xa = _lowest(_contract_second(t, y[active]))
        x[active] = xa
        new, ya = _lowest(_contract_first(t, xa))
        y[active] = ya
        decrease = value[active] - new
        if record:
            row = value.copy()
            row[active] = half
            hist.append(row)
        value[active] = new
        if record:
            hist.append(value.copy())
        done = decrease < tol / 10
        converged[active[done]] = True
        active = active[~done]
    return value, x, y, converged, (np.array(hist) if record else None)


def block_positivity_many(
    rhos,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> list[BlockPositivityCertificate]:
    """Run :func:`block_positivity` on many operators of equal shape at once.

    Each operator gets the same restart seeds as a standalone call, so the
    result for every entry equals ``block_positivity(rho, ...)``.
    """
    rhos = list(rhos)
    if not rhos:
        return []
    n, m = rhos[0].dim1, rhos[0].dim2
    for rho in rhos:
        if (rho.dim1, rho.dim2) != (n, m):
            raise DimensionMismatch("all operators must share factor dimensions")
        if not rho.is_hermitian():
            raise NotHermitian("block positivity search expects Hermitian input")
    x0, y0 = _starts(seed, restarts, n, m)
    tensors = np.stack([0.5 * (r.matrix + dagger(r.matrix)) for r in rhos])
    tensors = tensors.reshape(len(rhos), n, m, n, m)
    per_chunk = max(1, _CHUNK_ITEMS // max(restarts, 1))
    out = []
    for lo in range(0, len(rhos), per_chunk):
        chunk = tensors[lo:lo + per_chunk]
        k = chunk.shape[0]
        items = np.repeat(chunk, restarts, axis=0)
        xs = np.tile(x0, (k, 1))
        ys = np.tile(y0, (k, 1))
        val, xs, ys, conv, _ = _seesaw_min(items, xs, ys, max_iters, tol)
        val = val.reshape(k, restarts)
        conv = conv.reshape(k, restarts)
        xs = xs.reshape(k, restarts, n)
        ys = ys.reshape(k, restarts, m)
        for p in range(k):
            out.append(_certificate(val[p], xs[p], ys[p], conv[p], tol))
    return out


def _certificate(values, xs, ys, conv, tol, history=None):
    restarts = values.shape[0]
    if restarts == 0:
        return BlockPositivityCertificate(np.inf, None, None, 0, 0, history=history)
    best = int(np.argmin(values))  # first index wins ties
    bx = fix_phase(xs[best][:, None])[:, 0]
    by = fix_phase(ys[best][:, None])[:, 0]
    v = float(values[best])
    witness = v < -tol
    return BlockPositivityCertificate(
        min_value_found=v,
        witness_x=bx if witness else None,
        witness_y=by if witness else None,
        restarts_used=restarts,
        converged_restarts=int(np.count_nonzero(conv)),
        best_x=bx,
        best_y=by,
        history=history,
    )


def block_positivity(
    rho: BipartiteOperator,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    starts=None,
    record_history: bool = False,
) -> BlockPositivityCertificate:
    """Search for a product vector with negative expectation in ``rho``.

    Parameters
    ----------
    rho : BipartiteOperator
        Hermitian operator to test.
    restarts : int
        Number of random starts; restart ``r`` uses ``seed + r``.
    max_iters : int
        Full see-saw iterations per restart.
    tol : float
        Witness threshold; a restart stops once an iteration lowers its
        value by less than ``tol / 10``.
    starts : sequence of (x, y), optional
        Extra deterministic starts, run before the random ones.
    record_history : bool
        Keep the value after every half step (rows) for every restart
        (columns); useful to check monotone descent.
    """
    if not rho.is_hermitian():
        raise NotHermitian("block positivity search expects Hermitian input")
    n, m = rho.dim1, rho.dim2
    x0, y0 = _starts(seed, restarts, n, m)
    if starts:
        sx = np.array([np.asarray(s[0], dtype=complex) for s in starts])
        sy = np.array([np.asarray(s[1], dtype=complex) for s in starts])
        sx /= np.linalg.norm(sx, axis=1, keepdims=True)
        sy /= np.linalg.norm(sy, axis=1, keepdims=True)
        x0 = np.vstack([sx, x0])
        y0 = np.vstack([sy, y0])
    t = (0.5 * (rho.matrix + dagger(rho.matrix))).reshape(n, m, n, m)
    val, xs, ys, conv, hist = _seesaw_min(t, x0, y0, max_iters, tol, record_history)
    return _certificate(val, xs, ys, conv, tol, hist)


# ---------------------------------------------------------------------------
# alpha norm


def _sign_symmetry(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sign of a Hermitian stack (kernel mapped to +1) and its trace norm."""
    w, v = np.linalg.eigh(h)
    scale = np.max(np.abs(w), axis=-1, keepdims=True)
    sign = np.where(w < -1e-14 * np.maximum(scale, 1e-300), -1.0, 1.0)
    s = (v * sign[..., None, :]) @ dagger(v)
    return s, np.sum(np.abs(w), axis=-1)


def alpha_norm(
    rho: BipartiteOperator,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    seed: int = 0,
    tol: float = 1e-13,
    record_history: bool = False,
) -> AlphaNormEstimate:
    """Estimate the alpha norm by alternating ascent over ``(s, y)``.

    The ``s`` step is exact (sign of ``B(y)``); the ``y`` step takes the
    eigenvector of ``C(s) = Tr_1 rho (s (x) 1)`` with the largest modulus
    eigenvalue. The objective never decreases.
    """
    if rho.dim1 != rho.dim2:
        raise DimensionMismatch("alpha norm needs equal factor dimensions")
    if not rho.is_hermitian():
        raise NotHermitian("alpha norm expects a Hermitian operator")
    n = rho.dim1
    t = (0.5 * (rho.matrix + dagger(rho.matrix))).reshape(n, n, n, n)
    _, y = _starts(seed, restarts, n, n)
    y = y.copy()
    s, value = _sign_symmetry(_contract_second(t, y))
    active = np.arange(restarts)
    hist = [value.copy()] if record_history else None
    for _ in range(max_iters):
        if active.size == 0:
            break
        c = np.einsum("bji,ikjl->bkl", s[active], t)
        w, v = np.linalg.eigh(c)
        pick = np.argmax(np.abs(w), axis=-1)
        ya = np.take_along_axis(v, pick[:, None, None], axis=-1)[..., 0]
        half = np.abs(np.take_along_axis(w, pick[:, None], axis=-1)[:, 0])
        sa, new = _sign_symmetry(_contract_second(t, ya))
        gain = new - value[active]
        if record_history:
            row = value.copy()
            row[active] = half
            hist.append(row)
        y[active] = ya
        s[active] = sa
        value[active] = new
        if record_history:
            hist.append(value.copy())
        active = active[gain >= tol / 10]
    best = int(np.argmax(value))
    y_best = fix_phase(y[best][:, None])[:, 0]
    s_best, v_best = _sign_symmetry(_contract_second(t, y_best))
    return AlphaNormEstimate(
        value=float(v_best),
        maximizer_y=y_best,
        maximizer_symmetry=s_best,
        restarts_used=restarts,
        history=np.array(hist) if record_history else None,
    )
