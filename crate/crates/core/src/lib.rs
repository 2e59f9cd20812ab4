//! Weighted Lorentz and Garling sequence-space norms, the rearrangement
//! functionals `A(f, w)` and `B(f, w)`, and certified witness sequences on
//! which `A / B` grows without bound.

pub mod cli;
pub mod error;
pub mod exact;
pub mod functionals;
pub mod norms;
pub mod oracles;
pub mod scalar;
pub mod summation;
pub mod weights;
pub mod witness;

pub use error::{Error, Result};
pub use functionals::{functional_a, functional_b, functional_b_at, ratio, FunctionalReport, Run, StepSequence};
pub use norms::{garling_norm, inclusion_gap, lorentz_norm, symmetric_defect, FiniteVector, NormResult};

pub use weights::{Branch, Classification, TailRule, WeightFamily};

pub use witness::{build_witness, find_block_lengths, lower_bound_s, verify_certificate, Mode, WitnessCertificate};
