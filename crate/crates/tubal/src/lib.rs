//! Tubal tensor algebra: a family of commutative ring products on real
//! vectors ("tubes") defined by an invertible transform, third-order tensors
//! as matrices of tubes, a tensor SVD with optimal rank and multirank
//! truncations, and an engine that recovers the defining transform from any
//! black-box tubal product.
//!
//! Transform-domain loops (facewise products, mode-3 transforms, per-slice
//! SVDs) run on rayon when the default `parallel` feature is enabled and
//! sequentially otherwise; outputs are identical either way.

pub mod catalog;
pub mod discovery;
pub mod error;
mod exec;
pub mod files;
pub mod linalg;
pub mod ring;
pub mod tensor;
pub mod transform;
pub mod tsvd;
pub mod tube;

pub use catalog::{
    catalog_specs, group_ring_wht_equivalence_check, make_transform, oracle_op, BlackBoxOp,
    OracleKind, TransformKind,
};
pub use discovery::{
    classify_ring, equivalent_transforms, find_transform, idempotent_of, representation_matrix,
    Diagnostics, DiscoveryConfig, DiscoveryReport, NotTubalReason, RepMatrix, Verdict,
};
pub use error::{Error, Result};
pub use tensor::{
    facewise_product, frobenius_inner, frobenius_norm, frobenius_norm_transformed, from_transform,
    herm_transpose, identity_tensor, mdot, random_tensor, squeeze, tensor_star, to_transform,
    tube_scale, twist, OrientedMatrix, Tensor3, TransformedTensor,
};
pub use transform::{
    canonical_transform, isomorphism_to_canonical, validate_transform, RowClass, TransformSpec,
    DEFAULT_TOL,
};
pub use tsvd::{
    m_rank, multirank, tail_error_multirank, tail_error_rank, truncate_multirank, truncate_rank,
    tsvd, MultiRank, TsvdFactors,
};
pub use tube::{random_tube, Tube};
