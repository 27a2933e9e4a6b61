"""Faces of the cone of PPT block matrices, its dual cone of decomposable maps, and edge states."""

from .catalog import FaceClass, paper_example, validate_catalog
from .construct import (
    ConstructionCertificate,
    EntangledClaim,
    FeasibilityOptions,
    boundary_separable_witness,
    construct_ppt_entangled,
    dual_face_feasibility,
    extract_witness_pair,
)
from .faces import (
    ConeMembership,
    FacePair,
    PairKind,
    dual_face_of_state,
    exposedness_selftest,
    face_of_state,
    in_T,
    is_exposed_decomposition_pair,
    is_intersection_pair,
    pairing_zero_set_check,
)
from .linalg import (
    BipartiteDims,
    ContractError,
    DimensionError,
    MatrixSubspace,
    devectorize,
    partial_transpose,
    psd_check,
    range_space,
    tensor_product,
    vectorize,
)
from .maps import (
    DecomposableMap,
    MapKind,
    PositivityReport,
    apply_map,
    choi_matrix,
    is_interior_positive,
    is_positive_map,
    pairing,
    pairing_transpose_identity_check,
    positivity_margin,
)
from .states import (
    EdgeReport,
    ProductVectorHit,
    edge_check,
    product_vector_in_subspace,
    separability_check_2x2_2x3,
    separable_element_in_face,
    tiles_state,
)

__version__ = "0.1.0"
