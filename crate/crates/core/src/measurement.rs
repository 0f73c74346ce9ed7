//! Binary generalized measurements for p = 2.
//!
//! A generalized measurement is specified by a pure yes-state S at some order
//! r; the no-state is the complement S-perp (every fiducial entry mapped
//! q -> 1 - q). Outcome statistics are defined on the states where the model
//! prescribes them:
//!
//! - canonical pure inputs "observable i has value v" answer yes with the
//!   yes-state's fiducial entry Q_i(v);
//! - convex mixtures w * S + (1 - w) * S-perp answer yes with probability w
//!   (in particular the maximally mixed state answers 1/2);
//! - anything else is outside the model's prescription and reported as such.
//!
//! After an outcome the system is updated to the corresponding outcome state.

use alloc::vec::Vec;
use core::fmt;

use crate::measure::MeasureError;
use crate::state::{FiducialSet, StateError};

/// Purity slack allowed when validating a measurement's yes-state.
pub const PURITY_TOL: f64 = 1e-6;
/// Classification tolerance for recognizing canonical and mixture inputs.
const CLASSIFY_TOL: f64 = 1e-9;

/// The two outcomes of a binary generalized measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Yes,
    No,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Yes => write!(f, "yes"),
            Outcome::No => write!(f, "no"),
        }
    }
}

/// Errors from measurement construction and outcome queries.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementError {
    State(StateError),
    Measure(MeasureError),
    /// The yes-state is not pure at the requested order.
    NotPure { measure: f64, r: f64 },
    /// The input state is outside the model's outcome prescription.
    UndefinedInput,
    /// Mixing weight outside [0, 1].
    MixWeight { w: f64 },
    /// States with different moduli cannot be combined.
    PrimeMismatch { left: u32, right: u32 },
}

impl fmt::Display for MeasurementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementError::State(e) => write!(f, "{e}"),
            MeasurementError::Measure(e) => write!(f, "{e}"),
            MeasurementError::NotPure { measure, r } => write!(
                f,
                "yes-state has measure {measure} at order {r}, expected 1/2"
            ),
            MeasurementError::UndefinedInput => write!(
                f,
                "outcome statistics are undefined for this input state: it is neither \
                 a canonical pure state nor a mixture of the outcome states"
            ),
            MeasurementError::MixWeight { w } => {
                write!(f, "mixing weight {w} outside [0, 1]")
            }
            MeasurementError::PrimeMismatch { left, right } => {
                write!(f, "states live over different moduli {left} and {right}")
            }
        }
    }
}

impl core::error::Error for MeasurementError {}

impl From<StateError> for MeasurementError {
    fn from(e: StateError) -> Self {
        MeasurementError::State(e)
    }
}

impl From<MeasureError> for MeasurementError {
    fn from(e: MeasureError) -> Self {
        MeasurementError::Measure(e)
    }
}

/// A binary generalized measurement with stored outcome states.
#[derive(Debug, Clone, PartialEq)]
pub struct GenMeasurement {
    yes: FiducialSet,
    no: FiducialSet,
    r: f64,
}

impl GenMeasurement {
    /// Validating constructor: requires p = 2 and a yes-state that is pure
    /// at order `r` within [`PURITY_TOL`]. The no-state is the complement.
    pub fn new(yes: FiducialSet, r: f64) -> Result<Self, MeasurementError> {
        let no = yes.complemented()?;
        let m = yes.measure(r)?;
        if (m - 0.5).abs() > PURITY_TOL {
            return Err(MeasurementError::NotPure { measure: m, r });
        }
        Ok(GenMeasurement { yes, no, r })
    }

    /// Raw constructor for diagnostics and symmetry experiments: checks only
    /// that both states are p = 2 over the same modulus. The result may
    /// violate purity or complement structure; downstream consistency checks
    /// are expected to catch that.
    pub fn from_parts(
        yes: FiducialSet,
        no: FiducialSet,
        r: f64,
    ) -> Result<Self, MeasurementError> {
        if yes.prime() != no.prime() {
            return Err(MeasurementError::PrimeMismatch {
                left: yes.prime().get(),
                right: no.prime().get(),
            });
        }
        // Reuse the p = 2 gate from the slot accessor.
        yes.slots()?;
        Ok(GenMeasurement { yes, no, r })
    }

    #[inline]
    pub fn yes_state(&self) -> &FiducialSet {
        &self.yes
    }

    #[inline]
    pub fn no_state(&self) -> &FiducialSet {
        &self.no
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.r
    }

    /// The same measurement with outcome labels exchanged.
    pub fn complemented_measurement(&self) -> GenMeasurement {
        GenMeasurement { yes: self.no.clone(), no: self.yes.clone(), r: self.r }
    }

    /// Yes-probability for a canonical pure input "observable `index` has
    /// value `value`".
    pub fn prob_yes_known(&self, index: usize, value: u32) -> Result<f64, MeasurementError> {
        if index >= self.yes.rows().len() {
            return Err(StateError::IndexOutOfRange { index, max: 2 }.into());
        }
        if value >= 2 {
            return Err(StateError::ValueOutOfRange { value, prime: 2 }.into());
        }
        Ok(self.yes.value(index, value))
    }

    /// Yes-probability for an arbitrary input state, where defined.
    ///
    /// Recognizes canonical pure states and mixtures of the two outcome
    /// states; everything else returns
    /// [`MeasurementError::UndefinedInput`].
    pub fn prob_yes(&self, input: &FiducialSet) -> Result<f64, MeasurementError> {
        if input.prime() != self.yes.prime() {
            return Err(MeasurementError::PrimeMismatch {
                left: self.yes.prime().get(),
                right: input.prime().get(),
            });
        }
        if let Some((index, value)) = classify_canonical(input) {
            return Ok(self.yes.value(index, value as u32));
        }
        if let Some(w) = classify_mixture(input, &self.yes, &self.no) {
            return Ok(w);
        }
        Err(MeasurementError::UndefinedInput)
    }

    /// The post-measurement state after observing `outcome`.
    pub fn update_after(&self, outcome: Outcome) -> &FiducialSet {
        match outcome {
            Outcome::Yes => &self.yes,
            Outcome::No => &self.no,
        }
    }
}

/// Componentwise convex mixture w * a + (1 - w) * b of two fiducial sets.
pub fn mix(a: &FiducialSet, b: &FiducialSet, w: f64) -> Result<FiducialSet, MeasurementError> {
    if a.prime() != b.prime() {
        return Err(MeasurementError::PrimeMismatch {
            left: a.prime().get(),
            right: b.prime().get(),
        });
    }
    if !(0.0..=1.0).contains(&w) {
        return Err(MeasurementError::MixWeight { w });
    }
    let rows: Vec<Vec<f64>> = a
        .rows()
        .iter()
        .zip(b.rows())
        .map(|(ra, rb)| {
            ra.iter().zip(rb).map(|(&x, &y)| w * x + (1.0 - w) * y).collect()
        })
        .collect();
    Ok(FiducialSet::new(a.prime(), rows)?)
}

/// Detects a canonical pure state: exactly one row is deterministic on some
/// value and every other row is uniform.
fn classify_canonical(q: &FiducialSet) -> Option<(usize, usize)> {
    let p = q.prime().get() as usize;
    let uniform = 1.0 / p as f64;
    let mut found: Option<(usize, usize)> = None;
    for (i, row) in q.rows().iter().enumerate() {
        if let Some(v) = row.iter().position(|&x| (x - 1.0).abs() <= CLASSIFY_TOL) {
            if found.is_some() {
                return None;
            }
            found = Some((i, v));
        } else if row.iter().any(|&x| (x - uniform).abs() > CLASSIFY_TOL) {
            return None;
        }
    }
    found
}

/// Detects a mixture q = w * yes + (1 - w) * no with a consistent weight
/// across every fiducial slot, returning w clamped to [0, 1].
fn classify_mixture(q: &FiducialSet, yes: &FiducialSet, no: &FiducialSet) -> Option<f64> {
    let mut w: Option<f64> = None;
    for (row_q, (row_y, row_n)) in q.rows().iter().zip(yes.rows().iter().zip(no.rows())) {
        for ((&xq, &xy), &xn) in row_q.iter().zip(row_y).zip(row_n) {
            let denom = xy - xn;
            if denom.abs() > CLASSIFY_TOL {
                let cand = (xq - xn) / denom;
                match w {
                    None => w = Some(cand),
                    Some(prev) if (prev - cand).abs() > 1e-7 => return None,
                    Some(_) => {}
                }
            } else if (xq - xn).abs() > CLASSIFY_TOL {
                return None;
            }
        }
    }
    let w = w?;
    if !(-CLASSIFY_TOL..=1.0 + CLASSIFY_TOL).contains(&w) {
        return None;
    }
    // Verify the claimed decomposition slot by slot.
    for (row_q, (row_y, row_n)) in q.rows().iter().zip(yes.rows().iter().zip(no.rows())) {
        for ((&xq, &xy), &xn) in row_q.iter().zip(row_y).zip(row_n) {
            if (w * xy + (1.0 - w) * xn - xq).abs() > 1e-7 {
                return None;
            }
        }
    }
    Some(w.clamp(0.0, 1.0))
}
