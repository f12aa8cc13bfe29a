//! Seeded sampling of cone members, bound fuzzing, and numerical checks of
//! the algebraic identities the bounds rest on.

mod fuzz;
mod sampler;
mod suite;

pub use fuzz::{fuzz_bound, FuzzReport, ProbeVerdict, Selector, SubsetStrategy, Violation};
pub use sampler::{
    draw_bordered_candidate, draw_cone_candidate, gram_psd, sample_cone, sample_cone_batch, trial_rng, Sample,
    SampleBatch, SampleConfig,
};
pub use suite::{
    characteristic_identity_error, identity_suite, quotient_sides, schur_determinant_error, IdentityCheck,
    IdentityFailure, IdentityReport,
};
