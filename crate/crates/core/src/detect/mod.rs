//! Byzantine detection: the per-packet subspace signature, the per-generation
//! polynomial hash, and an exact span-membership oracle for scoring.

pub mod hash;
pub mod signature;

use thiserror::Error;

use crate::algebra::FieldSpec;
use crate::rlnc::{linalg, CodedVector, Generation};

pub use hash::{
    check_subspan, gen_hash_append, gen_hash_verify, gen_hash_verify_subspan, HashParams, SubspanCheck,
    SubspanVerdict, Verdict,
};
pub use signature::{sig_keygen, sig_verify, signing_field, SigVerdict, SignatureKey};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectError {
    #[error("length mismatch: expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field mismatch: expected {expected}, got {got}")]
    FieldMismatch { expected: FieldSpec, got: FieldSpec },
    #[error("orthogonal complement of the source span is trivial")]
    DegenerateComplement,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Ground truth: does `vector` lie in the span of the generation's source
/// vectors (coeffs ‖ payload ‖ hash)? Decided by comparing ranks.
pub fn oracle_verify(vector: &CodedVector, generation: &Generation) -> bool {
    let params = &generation.params;
    if vector.generation != generation.id
        || vector.field != params.field()
        || vector.coeffs.len() != params.generation_size()
        || vector.payload.len() != params.data_symbols()
        || vector.hash.len() != params.hash_symbols()
    {
        return false;
    }
    let field = params.field();
    let mut rows = generation.augmented_rows();
    let base = linalg::rank(&field, rows.clone());
    rows.push(vector.augmented());
    linalg::rank(&field, rows) == base
}
