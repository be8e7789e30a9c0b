import numpy as np
import pytest

from oracles import munit, rand_vec
from posmaps.abelian import (
    ArvesonDecomposition,
    arveson_extreme_check,
    is_cstar_extreme,
    overlapping_range_family,
    renormalize,
    restrict_to_diagonal,
    weak_independence,
)
from posmaps.choi import product_with_identity, transposition_choi
from posmaps.choifamily import choi_map_classic
from posmaps.errors import SingularSum
from posmaps.matcore import projector

E = np.eye(3)
UNITS = ArvesonDecomposition.from_operators([munit(i, i, 3) for i in range(3)])
EXPECTED_PRODUCT = np.array(
    [
        [(5 + 2 * np.sqrt(6)) / 72, 0, -1 / 72],
        [0, 0, 0],
        [-1 / 72, 0, (5 - 2 * np.sqrt(6)) / 72],
    ]
)


def test_restrict_classic_choi_map():
    fam = restrict_to_diagonal(choi_map_classic())
    expected = [(munit(0, 0, 3) + munit(1, 1, 3)) / 2, (munit(1, 1, 3) + munit(2, 2, 3)) / 2, (munit(0, 0, 3) + munit(2, 2, 3)) / 2]
    for k, e in zip(fam.K, expected):
        assert np.array_equal(k, e)
    assert fam.ranks == (2, 2, 2)
    assert np.allclose(fam.sum, np.eye(3))


def test_restrict_swap_gives_matrix_units():
    fam = restrict_to_diagonal(transposition_choi(3))
    for i, k in enumerate(fam.K):
        assert np.array_equal(k, munit(i, i, 3))


def test_restrict_product_with_identity(rng):
    p = projector(rand_vec(rng, 3))
    fam = restrict_to_diagonal(product_with_identity(p, 3))
    for i, k in enumerate(fam.K):
        assert np.allclose(k, p[i, i] * np.eye(3))


def test_decomposition_validation():
    with pytest.raises(ValueError):
        ArvesonDecomposition.from_operators([])
    with pytest.raises(ValueError):
        ArvesonDecomposition.from_operators([np.eye(2), np.eye(3)])


def test_renormalize_overlapping_family():
    fam = overlapping_range_family()
    assert fam.ranks == (1, 1, 2)
    out = renormalize(fam)
    assert out.ranks == fam.ranks
    assert np.abs(sum(out.K) - np.eye(3)).max() <= 1e-12
    assert np.abs(out.K[0] @ out.K[2] - EXPECTED_PRODUCT).max() <= 1e-12


def test_renormalize_leaves_orthogonal_projectors_unchanged():
    out = renormalize(UNITS)
    for a, b in zip(out.K, UNITS.K):
        assert np.abs(a - b).max() <= 1e-15


def test_renormalize_rejects_singular_sum():
    with pytest.raises(SingularSum):
        renormalize(ArvesonDecomposition.from_operators([munit(0, 0, 3), munit(1, 1, 3)]))


def test_renormalize_preserves_ranks(rng):
    for _ in range(50):
        ks = [projector(rand_vec(rng, 3)) for _ in range(3)]
        fam = ArvesonDecomposition.from_operators(ks)
        out = renormalize(fam)
        assert out.ranks == fam.ranks == (1, 1, 1)
        assert np.abs(out.sum - np.eye(3)).max() <= 1e-12


def test_weak_independence_examples():
    assert weak_independence(UNITS)
    assert not weak_independence(restrict_to_diagonal(choi_map_classic()))
    assert weak_independence(ArvesonDecomposition.from_operators([np.eye(3)]))


def test_overlapping_family_is_dependent():
    # oracle: range(K1) lies inside range(K3), so T1 = |xi><xi|, T3 = -T1 is a
    # nonzero family of operators on the ranges summing to zero
    out = renormalize(overlapping_range_family())
    k1, k3 = out.K[0], out.K[2]
    w1, v1 = np.linalg.eigh(k1)
    xi = v1[:, -1]
    w3, v3 = np.linalg.eigh(k3)
    range3 = v3[:, w3 > 1e-9]
    assert np.linalg.norm(xi - range3 @ (range3.conj().T @ xi)) <= 1e-12
    t1 = np.outer(xi, xi.conj())
    t3 = -t1
    assert np.abs(t1 + t3).max() == 0 and np.abs(t1).max() > 0.1
    assert not weak_independence(out)
    assert arveson_extreme_check(out) == "not_extreme"


def test_cstar_extreme_examples():
    assert is_cstar_extreme(UNITS)
    assert not is_cstar_extreme(renormalize(overlapping_range_family()))
    assert not is_cstar_extreme(restrict_to_diagonal(choi_map_classic()))


def test_arveson_check_examples():
    assert arveson_extreme_check(UNITS) == "extreme"
    assert arveson_extreme_check(restrict_to_diagonal(choi_map_classic())) == "not_extreme"
    assert arveson_extreme_check(ArvesonDecomposition.from_operators([np.eye(3)])) == "extreme"
    assert arveson_extreme_check(overlapping_range_family()) == "malformed"
    bad = ArvesonDecomposition.from_operators([np.diag([2.0, 1, 1]), np.diag([-1.0, 0, 0])])
    assert arveson_extreme_check(bad) == "malformed"


def test_cstar_extreme_implies_weakly_independent(rng):
    for _ in range(50):
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        cuts = np.sort(rng.choice(np.arange(1, 4), size=rng.integers(0, 3), replace=False))
        groups = np.split(np.arange(4), cuts)
        fam = ArvesonDecomposition.from_operators([q[:, g] @ q[:, g].conj().T for g in groups])
        assert is_cstar_extreme(fam)
        assert weak_independence(fam)


def test_two_rank_one_unital_pairs_are_orthogonal(rng):
    for _ in range(100):
        a, b = rand_vec(rng, 2), rand_vec(rng, 2)
        fam = renormalize(ArvesonDecomposition.from_operators([projector(a), 0.3 * projector(b)]))
        assert np.abs(fam.K[0] @ fam.K[1]).max() <= 1e-10
        assert is_cstar_extreme(fam)
