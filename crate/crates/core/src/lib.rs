//! Random linear network coding under Byzantine corruption: finite fields,
//! generation-based coding, packet and generation level detectors, an
//! adversary model, closed-form overhead of three countermeasures and a
//! Monte Carlo harness that checks them.

pub mod adversary;
pub mod algebra;
pub mod analytic;
pub mod detect;
pub mod rlnc;
pub mod sim;
pub mod validate;

pub use adversary::{AttackMode, AttackModel};
pub use algebra::{FieldElement, FieldSpec, GroupSpec, Symbol};
pub use analytic::{OverheadPoint, Scheme, SchemeParams};
pub use detect::{HashParams, SigVerdict, SignatureKey, SubspanVerdict, Verdict};
pub use rlnc::{CodedVector, Decoded, Generation, GenerationParams, Origin, Packet};
pub use sim::{EmpiricalReport, Fidelity, TrialConfig};
