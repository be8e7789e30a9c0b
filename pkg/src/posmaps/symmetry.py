"""Symmetries and partial symmetries on ``C^n (x) C^n``.

A symmetry is a self-adjoint unitary ``s = p - q``; a partial symmetry is
self-adjoint with ``s^2 = e`` a proper projector. A symmetry is the Choi
matrix of a normalized unital positive map exactly when it is locally
unitarily equivalent to the swap ``w``, which is what
:func:`reduce_to_transposition` constructs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .certify import is_cocp, is_cp
from .choi import apply_choi, membership_D, transposition_choi
from .errors import DimensionMismatch, NotHermitian, NotReducible, NotSymmetry
from .matcore import (
    BipartiteOperator,
    as_matrix,
    bipartite,
    dagger,
    fix_phase,
    frobenius,
    haar_unitary,
    local_conjugate,
    partial_transpose,
    projector,
)
from .schmidt import schmidt, schmidt_coefficients

PT_NOT_RANK_ONE = "partial-transpose not rank-one"
NOT_MAX_ENTANGLED = "not maximally entangled"
COUNTEREXAMPLE_FLAG = "conjecture-counterexample-candidate"


@dataclass(frozen=True, eq=False)
class InvolutionClass:
    kind: str  # "symmetry" | "partial_symmetry" | "neither"
    p: np.ndarray | None
    q: np.ndarray | None
    e: np.ndarray | None
    support_rank: int

    @property
    def rank_p(self) -> int:
        return 0 if self.p is None else int(round(np.trace(self.p).real))

    @property
    def rank_q(self) -> int:
        return 0 if self.q is None else int(round(np.trace(self.q).real))


def _matrix_of(s) -> np.ndarray:
    return s.matrix if isinstance(s, BipartiteOperator) else as_matrix(s, square=True)


def classify_involution(s, tol: float = 1e-10) -> InvolutionClass:
    """Decide whether ``s`` is a symmetry, a partial symmetry, or neither.

    The positive and negative parts are ``p = (e + s)/2`` and ``q = (e - s)/2``
    where ``e = s^2``.
    """
    a = _matrix_of(s)
    dim = a.shape[0]
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if np.max(np.abs(a - dagger(a)), initial=0.0) > tol * scale:
        return InvolutionClass("neither", None, None, None, 0)
    a = 0.5 * (a + dagger(a))
    e = a @ a
    if np.max(np.abs(e @ e - e), initial=0.0) > tol:
        return InvolutionClass("neither", None, None, None, 0)
    e = 0.5 * (e + dagger(e))
    rank = int(round(np.trace(e).real))
    kind = "symmetry" if np.max(np.abs(e - np.eye(dim))) <= tol else "partial_symmetry"
    if kind == "symmetry":
        e = np.eye(dim, dtype=np.complex128)
        rank = dim
    return InvolutionClass(kind, 0.5 * (e + a), 0.5 * (e - a), e, rank)


def _range_basis(proj: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(proj)
    return v[:, w > 0.5]


@dataclass(frozen=True, eq=False)
class QRangeReport:
    passed: bool
    worst_deviation: float
    samples: int
    worst_vector: np.ndarray | None


def q_range_schmidt_check(
    s, samples: int = 500, seed: int = 0, tol: float = 1e-9
) -> QRangeReport:
    """Sample unit vectors in the range of ``q`` and compare their sorted Schmidt
    coefficients with ``(1/sqrt 2, 1/sqrt 2, 0, ...)``.

    The eigenbasis of ``q`` is always included on top of the random samples.
    """
    cls = classify_involution(s)
    if cls.kind != "symmetry":
        raise NotSymmetry("q-range check needs a symmetry")
    a = _matrix_of(s)
    n = s.dim1 if isinstance(s, BipartiteOperator) else int(round(np.sqrt(a.shape[0])))
    if n * n != a.shape[0]:
        raise DimensionMismatch("operator does not act on C^n (x) C^n")
    basis = _range_basis(cls.q)
    if basis.shape[1] == 0:
        return QRangeReport(True, 0.0, 0, None)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((samples, basis.shape[1])) + 1j * rng.standard_normal(
        (samples, basis.shape[1])
    )
    vecs = np.vstack([basis.T, coeffs @ basis.T])
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    target = np.zeros(n)
    target[:2] = 1.0 / np.sqrt(2.0)
    dev = np.max(np.abs(schmidt_coefficients(vecs, n) - target), axis=1)
    worst = int(np.argmax(dev))
    return QRangeReport(bool(dev[worst] <= tol), float(dev[worst]), vecs.shape[0], vecs[worst])


@dataclass(frozen=True, eq=False)
class ReductionResult:
    """``s = (U (x) conj(V)) w (U (x) conj(V))^*`` up to ``reconstruction_error``."""

    U: np.ndarray
    V: np.ndarray
    reconstruction_error: float
    entangled_vector: np.ndarray = field(repr=False)


def reduce_to_transposition(s: BipartiteOperator, tol: float = 1e-9) -> ReductionResult:
    """Find local unitaries carrying the swap ``w`` onto ``s``.

    The partial transpose of ``s`` must equal ``n P_x`` with ``x`` maximally
    entangled; writing ``x = sum_i U e_i (x) V e_i / sqrt(n)`` gives the
    unitaries. The returned pair has ``V = 1``.
    Raises :class:`NotReducible` when either condition fails.
    """
    if s.dim1 != s.dim2:
        raise DimensionMismatch("reduction needs equal factor dimensions")
    if not s.is_hermitian():
        raise NotHermitian("reduction expects a Hermitian operator")
    n = s.dim1
    pt = partial_transpose(s).matrix
    w, v = np.linalg.eigh(0.5 * (pt + dagger(pt)))
    if abs(w[-1] - n) > tol * n or np.max(np.abs(w[:-1])) > tol:
        raise NotReducible(PT_NOT_RANK_ONE, f"spectrum {np.round(w, 12).tolist()}")
    x = fix_phase(v[:, -1:])[:, 0]
    dec = schmidt(x, n)
    if np.max(np.abs(dec.coefficients - 1.0 / np.sqrt(n))) > tol:
        raise NotReducible(NOT_MAX_ENTANGLED, f"coefficients {dec.coefficients.tolist()}")
    # All Schmidt coefficients coincide, so the individual Schmidt vectors are
    # arbitrary. The polar factor of the coefficient matrix is not:
    # x = sum_i (U e_i) (x) e_i / sqrt(n) with V = 1.
    u_svd, _, vh_svd = np.linalg.svd(x.reshape(n, n))
    u = u_svd @ vh_svd
    vv = np.eye(n, dtype=np.complex128)
    rebuilt = local_conjugate(transposition_choi(n), u, vv.conj())
    return ReductionResult(u, vv, frobenius(rebuilt.matrix - s.matrix), x)


def random_symmetry_in_D(n: int = 3, seed: int = 0) -> BipartiteOperator:
    """``(U (x) V) w (U (x) V)^*`` with Haar random ``U``, ``V``."""
    rng = np.random.default_rng(seed)
    u = haar_unitary(n, rng)
    v = haar_unitary(n, rng)
    return local_conjugate(transposition_choi(n), u, v)


def exposedness_gap(sigma: BipartiteOperator, n: int | None = None) -> float:
    """``n^2 - Re Tr(w sigma)``; non-negative on the unital positive maps and
    zero at ``w`` itself."""
    n = sigma.dim1 if n is None else n
    if sigma.dim1 != n or sigma.dim2 != n:
        raise DimensionMismatch(f"expected a {n}x{n} bipartite operator")
    return float(n * n - np.einsum("kiik->", sigma.tensor()).real)


def embedded_swap(n: int, indices) -> np.ndarray:
    """Swap of ``span{e_i : i in indices}`` inside ``C^n (x) C^n``."""
    m = np.zeros((n, n, n, n), dtype=np.complex128)
    for i in indices:
        for j in indices:
            m[i, j, j, i] = 1.0
    return m.reshape(n * n, n * n)


def partial_symmetry_fixture(which: str) -> BipartiteOperator:
    """Rank-five partial symmetries: 2-dim swap on ``e_1, e_2`` plus one projector.

    ``which`` is ``"embedded_swap_plus_e12e3"`` (``x = (e_1 + e_2) (x) e_3 / sqrt 2``)
    or ``"embedded_swap_plus_e3e3"`` (``x = e_3 (x) e_3``).
    """
    e = np.eye(3)
    if which == "embedded_swap_plus_e12e3":
        x = np.kron(e[0] + e[1], e[2]) / np.sqrt(2.0)
    elif which == "embedded_swap_plus_e3e3":
        x = np.kron(e[2], e[2])
    else:
        raise ValueError(f"unknown fixture {which!r}")
    return bipartite(embedded_swap(3, (0, 1)) + projector(x), 3)


@dataclass(frozen=True, eq=False)
class PartialSymmetryFinding:
    trial: int
    support_rank: int
    cp: bool
    cocp: bool
    flag: str | None
    operator: BipartiteOperator = field(repr=False)


@dataclass(frozen=True)
class PartialSymmetrySearchReport:
    trials: int
    linear_checks_passed: int
    members: tuple[PartialSymmetryFinding, ...]
    counterexample_candidates: tuple[PartialSymmetryFinding, ...]


def _complement_dictionary(pair: tuple[int, int], k: int) -> list[np.ndarray]:
    """Orthonormal-friendly vectors spanning the complement of the embedded swap."""
    e = np.eye(3)
    a, b = pair
    units = [np.kron(e[a], e[k]), np.kron(e[b], e[k]), np.kron(e[k], e[a]), np.kron(e[k], e[b]), np.kron(e[k], e[k])]
    out = list(units)
    for u1, u2 in combinations(units, 2):
        out.append((u1 + u2) / np.sqrt(2.0))
        out.append((u1 - u2) / np.sqrt(2.0))
    return out


def _orthonormal_pick(dictionary, count, rng) -> np.ndarray | None:
    order = rng.permutation(len(dictionary))
    chosen = []
    for idx in order:
        v = dictionary[idx]
        if all(abs(np.vdot(c, v)) < 1e-12 for c in chosen):
            chosen.append(v * np.exp(2j * np.pi * rng.integers(4) / 4))
            if len(chosen) == count:
                return np.array(chosen)
    return None


def _candidate(rng: np.random.Generator, n: int) -> np.ndarray | None:
    rank = 5 if rng.random() < 0.5 else 7
    if n == 3 and rng.random() < 0.75:
        pair = tuple(sorted(rng.choice(3, size=2, replace=False)))
        k = 3 - pair[0] - pair[1]
        plus, minus = (1, 0) if rank == 5 else (2, 1)
        vecs = _orthonormal_pick(_complement_dictionary(pair, k), plus + minus, rng)
        if vecs is None:
            return None
        s = embedded_swap(3, pair)
        for v in vecs[:plus]:
            s = s + projector(v)
        for v in vecs[plus:]:
            s = s - projector(v)
        return s
    # generic eigenvectors; signs chosen so that the trace is n
    plus = (rank + n) // 2
    basis = haar_unitary(n * n, rng)[:, :rank]
    signs = np.array([1.0] * plus + [-1.0] * (rank - plus))
    return (basis * signs) @ dagger(basis)


def partial_symmetry_search(
    n: int = 3, trials: int = 200, seed: int = 0, restarts: int = 100
) -> PartialSymmetrySearchReport:
    """Random search for partial symmetries of rank 5 or 7 in the unital
    positive maps.

    Candidates are an embedded two-dimensional swap plus projectors onto
    simple vectors of its complement, or generic random eigenvectors. Cheap
    linear checks (trace, unitality) run before the block-positivity search.
    Members of support rank 7, or members that are neither CP nor coCP, are
    flagged as ``"conjecture-counterexample-candidate"``. The report is
    exploratory and never settles the rank-five conjecture.
    """
    members: list[PartialSymmetryFinding] = []
    seen: set[bytes] = set()
    passed = 0
    eye = np.eye(n)
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        s = _candidate(rng, n)
        if s is None:
            continue
        rho = bipartite(s, n)
        if abs(rho.trace() - n) > 1e-9 or np.max(np.abs(apply_choi(rho, eye) - eye)) > 1e-9:
            continue
        passed += 1
        key = (np.round(s, 9) + 0.0).tobytes()
        if key in seen:
            continue
        seen.add(key)
        if membership_D(rho, restarts=restarts, seed=seed).verdict != "member":
            continue
        cls = classify_involution(rho)
        cp, cocp = is_cp(rho), is_cocp(rho)
        flagged = cls.support_rank == 7 or not (cp or cocp)
        members.append(
            PartialSymmetryFinding(trial, cls.support_rank, cp, cocp, COUNTEREXAMPLE_FLAG if flagged else None, rho)
        )
    return PartialSymmetrySearchReport(
        trials=trials,
        linear_checks_passed=passed,
        members=tuple(members),
        counterexample_candidates=tuple(f for f in members if f.flag),
    )


def s0_symmetry() -> BipartiteOperator:
    """``1 - 2 (P_x1 + P_x2 + P_x3)`` with three orthonormal Schmidt-rank-two
    vectors; a symmetry that reduces to the swap."""
    e = np.eye(3)
    x1 = (np.kron(e[0], e[0]) + np.kron(e[1], e[1])) / np.sqrt(2.0)
    x2 = (np.kron(e[0], e[2]) + np.kron(e[2], e[1])) / np.sqrt(2.0)
    x3 = (np.kron(e[1], e[2]) - np.kron(e[2], e[0])) / np.sqrt(2.0)
    return bipartite(np.eye(9) - 2 * (projector(x1) + projector(x2) + projector(x3)), 3)
