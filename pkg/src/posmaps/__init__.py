"""Numerical analysis of positive maps on small matrix algebras through their
Choi matrices."""

from .abelian import (
    ArvesonDecomposition,
    arveson_extreme_check,
    is_cstar_extreme,
    overlapping_range_family,
    renormalize,
    restrict_to_diagonal,
    weak_independence,
)
from .certify import (
    AlphaNormEstimate,
    BlockPositivityCertificate,
    alpha_norm,
    block_positivity,
    block_positivity_many,
    contraction,
    is_cocp,
    is_cp,
    is_psd,
    product_value,
)
from .choi import (
    DMembershipReport,
    MapImages,
    apply_choi,
    choi_of,
    max_entangled_choi,
    membership_D,
    product_with_identity,
    transposition_choi,
)
from .choifamily import (
    ChoiFamilyParams,
    choi_map_classic,
    is_positive_abc,
    phi_abc_images,
    r_matrix,
    rho_lambda,
    segment_law,
    sweep_abc,
    w_minus,
)
from .classify2 import Classification2, classify_regular_extreme_2, decompose_tilde_D
from .errors import *  # noqa: F403
from .matcore import BipartiteOperator, bipartite, eig_hermitian, partial_trace, partial_transpose
from .schmidt import SchmidtDecomposition, is_max_entangled, overlap, schmidt
from .symmetry import (
    InvolutionClass,
    ReductionResult,
    classify_involution,
    exposedness_gap,
    partial_symmetry_fixture,
    partial_symmetry_search,
    q_range_schmidt_check,
    random_symmetry_in_D,
    reduce_to_transposition,
    s0_symmetry,
)

__version__ = "0.1.0"
