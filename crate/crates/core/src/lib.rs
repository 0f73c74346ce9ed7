//! An epistemically restricted toy theory over prime finite fields.
//!
//! Systems carry an ontic state (x_a, x_b) in F_p x F_p that is never fully
//! knowable: allowed states of knowledge are probability distributions over
//! the p^2 ontic states whose generalized measure M_r equals the pure-state
//! level 1/p, or mixtures thereof. The crate provides:
//!
//! - the observable family X_b + k X_a plus X_a, whose p + 1 members are
//!   mutually unbiased ([`observable`]);
//! - epistemic distributions and their equivalent fiducial-probability
//!   form, including an extended mode that admits negative weights while
//!   every observable statistic stays a valid probability ([`state`]);
//! - the one-parameter measure family M_r with its order solver
//!   ([`measure`]);
//! - binary generalized measurements built from a pure yes-state and its
//!   complement ([`measurement`]);
//! - joint distributions over several systems with the validity rules that
//!   knowledge stays balanced between global and marginal descriptions
//!   ([`multi`]);
//! - a Bell-CHSH harness with exact correlators, outcome tables in either
//!   measurement order, a no-signaling check, and seeded sampling
//!   ([`bell`]);
//! - constrained searches for the maximal CHSH value at a given order
//!   ([`optimize`]).
//!
//! The crate is `no_std` (with `alloc`) so the model core can run anywhere;
//! IO, file formats, and the command-line front end live in the companion
//! `epitoy-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bell;
pub mod field;
pub mod measure;
pub mod measurement;
pub mod multi;
pub mod observable;
pub mod optimize;
mod simplex;
pub mod state;

pub use bell::{
    negativity_witness, BellError, BellScenario, MeasureOrder, SampleOutcome, Side1, Side2,
};
pub use field::{FieldError, Fp, Prime};
pub use measure::{is_odd_positive_integer, measure_weights, MeasureError};
pub use measurement::{mix, GenMeasurement, MeasurementError, Outcome};
pub use multi::{JointDist, MultiError, ValidityReport, Violation};
pub use observable::Observable;
pub use optimize::{
    max_chsh, solve_constrained_q, sweep_r, ConstrainedRoot, OptError, OptMode, SearchOptions,
    SweepPoint,
};
pub use state::{ontic_index, EpistemicDist, FiducialSet, Mode, StateError};
