//! Sequential products, conditioning, and complements for quantum effects
//! and finite-outcome observables on small complex Hilbert spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`] — dense complex matrices, a Jacobi eigensolver, PSD square
//!   roots, spectral projections, and the process-wide tolerance policy;
//! * [`effects`] — effects, states, the sequential product `a ∘ b`, and
//!   state conditioning;
//! * [`observables`] — finite observables, product and conditioned
//!   observables, classical post-processing, and observable operators;
//! * [`complement`] — the n-outcome complement, its iterates in closed form,
//!   and the bistochastic characterization of complement-compatible
//!   post-processings;
//! * [`spectral`] — spectral observables of self-adjoint operators and
//!   operator conditioning;
//! * [`harness`] — seeded random generators and the registry of identity
//!   checks used by the verification suite.

pub mod complement;
pub mod effects;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod observables;
pub mod spectral;

pub use complement::{complement_channel, NObservable};
pub use effects::{Effect, PartialState, PureState, State};
pub use error::{Error, Result};
pub use harness::{run_all, run_check, theorem_ids, CheckReport, RandomSpec};
pub use numerics::{
    approx_equal, hermitian_eig, install_tolerance, psd_sqrt, relative_deviation,
    spectral_projections, tolerance, Complex64, ComplexMatrix, ComplexVector, HermitianEig,
    TolerancePolicy,
};
pub use observables::{
    bicondition, condition_operator_on_effect, mixture, ClassicalChannel, FunctionTable,
    Grouping, Observable, Outcome, PairObservable,
};
pub use spectral::{SelfAdjointOperator, SpectralObservable};
