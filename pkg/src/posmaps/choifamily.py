"""The generalized Choi maps on ``M_3``,

    phi_abc(x) = diag(a x11 + b x22 + c x33,
                      a x22 + b x33 + c x11,
                      a x33 + b x11 + c x22) - x,

their positivity region, and the segment between ``w^-`` and ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import block_positivity_many
from .choi import MapImages, choi_of, membership_D
from .errors import OutOfRange
from .matcore import BipartiteOperator, bipartite, partial_transpose

BOUNDARY_MARGIN = 1e-6
NEGATIVE_MARGIN = 1e-6


@dataclass(frozen=True)
class ChoiFamilyParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c)
        if not all(np.isfinite(v) and v >= 0 for v in vals):
            raise OutOfRange(f"parameters must be finite and non-negative, got {vals}")


def _cyclic_images(a: float, b: float, c: float, offset: float = 1.0) -> MapImages:
    """Images of ``x -> diag(...) - offset * x`` with the cyclic weights."""
    imgs = np.zeros((3, 3, 3, 3), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            imgs[i, j, i, j] = -offset
        # x_ii feeds diagonal entry i with a, entry i-1 with b, entry i+1 with c
        imgs[i, i, i, i] += a
        imgs[i, i, (i - 1) % 3, (i - 1) % 3] += b
        imgs[i, i, (i + 1) % 3, (i + 1) % 3] += c
    return MapImages(3, 3, imgs)


def phi_abc_images(params: ChoiFamilyParams, scale: float = 1.0) -> MapImages:
    """Images of ``scale * phi_abc`` on the matrix units."""
    return _cyclic_images(scale * params.a, scale * params.b, scale * params.c, scale)


def is_positive_abc(params: ChoiFamilyParams) -> bool:
    a, b, c = params.a, params.b, params.c
    if a < 1 or a + b + c < 3:
        return False
    if 1 <= a <= 2:
        return b * c >= (2 - a) ** 2
    return True


def near_boundary(params: ChoiFamilyParams, margin: float = BOUNDARY_MARGIN) -> bool:
    """True when a point lies within ``margin`` of a positivity constraint."""
    a, b, c = params.a, params.b, params.c
    if abs(a - 1) < margin or abs(a + b + c - 3) < margin:
        return True
    return 1 <= a <= 2 and abs(b * c - (2 - a) ** 2) < margin


def w_minus() -> BipartiteOperator:
    """``sum_ij eps_ij E_ij (x) E_ji`` with ``eps_ii = 1`` and ``eps_ij = -1`` otherwise."""
    t = np.zeros((3, 3, 3, 3), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            t[i, j, j, i] = 1.0 if i == j else -1.0
    return bipartite(t.reshape(9, 9), 3)


def r_matrix() -> BipartiteOperator:
    """``E11 (x) E22 + E22 (x) E33 + E33 (x) E11``."""
    d = np.zeros(9)
    for i in range(3):
        d[3 * i + (i + 1) % 3] = 1.0
    return bipartite(np.diag(d), 3)


def rho_lambda(lam: float) -> BipartiteOperator:
    """``lam r + (1 - lam) w^-`` for ``0 <= lam <= 1``."""
    if not (0.0 <= lam <= 1.0):
        raise OutOfRange(f"lambda must lie in [0, 1], got {lam}")
    return lam * r_matrix() + (1.0 - lam) * w_minus()


def segment_map_images(lam: float) -> MapImages:
    """Images of ``(1 - lam) phi_{2, 0, lam/(1-lam)}``, the map whose Choi
    matrix is the partial transpose of ``rho_lambda(lam)``.

    Written as ``x -> diag(2(1-lam) x11 + lam x33, ...) - (1-lam) x``, which
    stays finite at ``lam = 1`` where it becomes ``x -> diag(x33, x11, x22)``.
    """
    if not (0.0 <= lam <= 1.0):
        raise OutOfRange(f"lambda must lie in [0, 1], got {lam}")
    return _cyclic_images(2.0 * (1.0 - lam), 0.0, lam, 1.0 - lam)


def choi_map_classic() -> BipartiteOperator:
    """Choi matrix of ``phi_{2,0,1} / 2``."""
    return choi_of(phi_abc_images(ChoiFamilyParams(2.0, 0.0, 1.0), scale=0.5))


@dataclass(frozen=True)
class SweepRow:
    a: float
    b: float
    c: float
    cond: str  # "pos" | "neg" | "edge"
    cert: str  # "pos" (no witness) | "neg" (witness found)
    min_value: float
    disagreement: bool


def grid_values(step: float, upper: float = 3.0) -> np.ndarray:
    """``k * step`` for ``k = 0, 1, ...`` up to ``upper``; empty if ``step > upper``."""
    if not step > 0:
        raise OutOfRange("grid step must be positive")
    count = int(np.floor(upper / step + 1e-9))
    if count == 0:
        return np.empty(0)
    return step * np.arange(count + 1)


def sweep_abc(
    step: float = 0.25,
    restarts: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
    margin: float = BOUNDARY_MARGIN,
) -> list[SweepRow]:
    """Cross-check the positivity conditions against the block-positivity search.

    Every grid point ``(a, b, c)`` is classified by :func:`is_positive_abc`
    (``"edge"`` within ``margin`` of the boundary) and by searching for a
    negative product vector of the partial transpose of the Choi matrix.
    A row disagrees when a positive point has a witness or a non-positive
    point has no value below ``-1e-6``. Edge points never disagree.
    """
    vals = grid_values(step)
    points = [ChoiFamilyParams(a, b, c) for a in vals for b in vals for c in vals]
    ops = [partial_transpose(choi_of(phi_abc_images(p))) for p in points]
    certs = block_positivity_many(ops, restarts=restarts, tol=tol, seed=seed)
    rows = []
    for p, cert in zip(points, certs):
        if near_boundary(p, margin):
            cond = "edge"
        else:
            cond = "pos" if is_positive_abc(p) else "neg"
        v = cert.min_value_found
        bad = (cond == "pos" and cert.has_witness) or (cond == "neg" and not v < -NEGATIVE_MARGIN)
        rows.append(SweepRow(float(p.a), float(p.b), float(p.c), cond, "neg" if cert.has_witness else "pos", float(v), bad))
    return rows


@dataclass(frozen=True)
class SegmentRow:
    lam: float
    cond: str  # "member" expected for lam >= 1/2
    cert: str  # membership verdict
    min_value: float
    disagreement: bool


def segment_law(points: int = 11, restarts: int = 100, seed: int = 0) -> list[SegmentRow]:
    """Membership of ``rho_lambda`` on ``lam = k / (points - 1)``."""
    rows = []
    for k in range(points):
        lam = k / (points - 1) if points > 1 else 0.0
        rep = membership_D(rho_lambda(lam), restarts=restarts, seed=seed)
        cond = "member" if lam >= 0.5 else "non_member"
        rows.append(
            SegmentRow(lam, cond, rep.verdict, rep.block_positive.min_value_found, rep.verdict != cond)
        )
    return rows
