//! The Bell-CHSH harness on the perfectly correlated pair.
//!
//! Side 1 measures a canonical observable on system 0 (setting A reads X_a,
//! setting B reads X_b) and reports the field value as a sign
//! (2v - 1). Side 2 applies a binary generalized measurement on system 1
//! (setting S or S-prime) and reports yes as +1, no as -1. With the pair
//! state distributing system values uniformly, the correlator reduces to
//!
//! ```text
//! E(i, M) = sum_v (1/2) (2v - 1) (2 Q_i(v) - 1)
//! ```
//!
//! where Q_i is row i of M's yes-state, and the CHSH combination is
//! B = E(A, S) + E(B, S) + E(A, S') - E(B, S').
//!
//! [`BellScenario::joint_outcome_table`] computes setting-pair outcome
//! tables by literally playing the two measurement narratives (side 1 first
//! against side 2 first) through the state machinery, which makes the
//! no-signaling check an actual consistency test rather than an identity.

use alloc::vec::Vec;
use core::fmt;

use rand_core::{RngCore, SeedableRng};

use crate::measurement::{GenMeasurement, MeasurementError};
use crate::multi::{JointDist, MultiError};
use crate::state::{FiducialSet, StateError, CLAMP_TOL};

/// Entrywise tolerance for table agreement and marginal stability.
pub const SIGNALING_TOL: f64 = 1e-12;

/// Side-1 settings: which canonical observable system 0 reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side1 {
    /// X_a, observable index 0.
    A,
    /// X_b, observable index 1.
    B,
}

impl Side1 {
    #[inline]
    pub fn observable_index(self) -> usize {
        match self {
            Side1::A => 0,
            Side1::B => 1,
        }
    }
}

/// Side-2 settings: which generalized measurement system 1 receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side2 {
    S,
    SPrime,
}

/// Which side acts first in the outcome-table narrative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureOrder {
    Side1First,
    Side2First,
}

/// Errors from scenario assembly and table evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum BellError {
    State(StateError),
    Measurement(MeasurementError),
    Multi(MultiError),
}

impl fmt::Display for BellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BellError::State(e) => write!(f, "{e}"),
            BellError::Measurement(e) => write!(f, "{e}"),
            BellError::Multi(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for BellError {}

impl From<StateError> for BellError {
    fn from(e: StateError) -> Self {
        BellError::State(e)
    }
}

impl From<MeasurementError> for BellError {
    fn from(e: MeasurementError) -> Self {
        BellError::Measurement(e)
    }
}

impl From<MultiError> for BellError {
    fn from(e: MultiError) -> Self {
        BellError::Multi(e)
    }
}

/// Empirical statistics from simulated rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub rounds: usize,
    pub seed: u64,
    /// Indexed [side1][side2] with A, B on the first axis and S, S' on the
    /// second.
    pub correlators: [[f64; 2]; 2],
    pub b_value: f64,
}

/// A CHSH experiment on the correlated pair at p = 2.
#[derive(Debug, Clone)]
pub struct BellScenario {
    state: JointDist,
    m_s: GenMeasurement,
    m_sp: GenMeasurement,
}

impl BellScenario {
    /// Assembles the scenario; the shared state is always the perfectly
    /// correlated pair.
    pub fn new(m_s: GenMeasurement, m_sp: GenMeasurement) -> Result<Self, BellError> {
        let prime = m_s.yes_state().prime();
        Ok(BellScenario { state: JointDist::correlated_pair(prime), m_s, m_sp })
    }

    /// Builds both side-2 measurements from their yes-states at order `r`.
    pub fn with_states(
        s: FiducialSet,
        s_prime: FiducialSet,
        r: f64,
    ) -> Result<Self, BellError> {
        Ok(BellScenario::new(
            GenMeasurement::new(s, r)?,
            GenMeasurement::new(s_prime, r)?,
        )?)
    }

    #[inline]
    pub fn state(&self) -> &JointDist {
        &self.state
    }

    #[inline]
    pub fn measurement(&self, side2: Side2) -> &GenMeasurement {
        match side2 {
            Side2::S => &self.m_s,
            Side2::SPrime => &self.m_sp,
        }
    }

    /// The setting-pair correlator E(i, M).
    pub fn correlator(&self, side1: Side1, side2: Side2) -> f64 {
        let row = self.measurement(side2).yes_state().row(side1.observable_index());
        let mut e = 0.0;
        for (v, &q) in row.iter().enumerate() {
            e += 0.5 * (2.0 * v as f64 - 1.0) * (2.0 * q - 1.0);
        }
        e
    }

    /// The CHSH combination E(A,S) + E(B,S) + E(A,S') - E(B,S').
    pub fn chsh(&self) -> f64 {
        self.correlator(Side1::A, Side2::S) + self.correlator(Side1::B, Side2::S)
            + self.correlator(Side1::A, Side2::SPrime)
            - self.correlator(Side1::B, Side2::SPrime)
    }

    /// Joint outcome table for one setting pair, indexed `[v][o]` with
    /// v the side-1 field value and o in {yes = 0, no = 1}.
    ///
    /// `Side1First` conditions the pair on side 1's outcome and asks the
    /// generalized measurement about the collapsed partner state;
    /// `Side2First` decomposes side 2's reduced state into outcome states
    /// and reads side 1's statistics off the post-measurement states. For a
    /// well-formed measurement the two narratives agree.
    pub fn joint_outcome_table(
        &self,
        side1: Side1,
        side2: Side2,
        order: MeasureOrder,
    ) -> Result<[[f64; 2]; 2], BellError> {
        let m = self.measurement(side2);
        let obs = side1.observable_index();
        let mut table = [[0.0; 2]; 2];
        match order {
            MeasureOrder::Side1First => {
                for v in 0..2u32 {
                    let Some((prob_v, post)) = self.state.condition(0, obs, v)? else {
                        continue;
                    };
                    let partner = post.single_marginal(1)?.to_fiducial();
                    let p_yes = m.prob_yes(&partner)?;
                    table[v as usize][0] = prob_v * p_yes;
                    table[v as usize][1] = prob_v * (1.0 - p_yes);
                }
            }
            MeasureOrder::Side2First => {
                let reduced = self.state.single_marginal(1)?.to_fiducial();
                let p_yes = m.prob_yes(&reduced)?;
                for v in 0..2usize {
                    table[v][0] = p_yes * m.yes_state().value(obs, v as u32);
                    table[v][1] = (1.0 - p_yes) * m.no_state().value(obs, v as u32);
                }
            }
        }
        Ok(table)
    }

    /// Cross-narrative no-signaling audit over all four setting pairs.
    ///
    /// Requires every table to be computable, the two narratives to agree
    /// entrywise, each side-1 marginal to be independent of the side-2
    /// setting, and each side-2 marginal to be independent of the side-1
    /// setting, all within [`SIGNALING_TOL`].
    pub fn no_signaling_check(&self) -> bool {
        let settings1 = [Side1::A, Side1::B];
        let settings2 = [Side2::S, Side2::SPrime];
        let orders = [MeasureOrder::Side1First, MeasureOrder::Side2First];

        // tables[s1][s2][order]
        let mut tables = [[[[[0.0; 2]; 2]; 2]; 2]; 2];
        for (i, &s1) in settings1.iter().enumerate() {
            for (j, &s2) in settings2.iter().enumerate() {
                for (k, &ord) in orders.iter().enumerate() {
                    match self.joint_outcome_table(s1, s2, ord) {
                        Ok(t) => tables[i][j][k] = t,
                        Err(_) => return false,
                    }
                }
            }
        }

        for i in 0..2 {
            for j in 0..2 {
                for v in 0..2 {
                    for o in 0..2 {
                        let a = tables[i][j][0][v][o];
                        let b = tables[i][j][1][v][o];
                        if (a - b).abs() > SIGNALING_TOL {
                            return false;
                        }
                    }
                }
            }
        }

        for k in 0..2 {
            // Side-1 marginal P(v) must not depend on the side-2 setting.
            for i in 0..2 {
                for v in 0..2 {
                    let m0: f64 = tables[i][0][k][v].iter().sum();
                    let m1: f64 = tables[i][1][k][v].iter().sum();
                    if (m0 - m1).abs() > SIGNALING_TOL {
                        return false;
                    }
                }
            }
            // Side-2 marginal P(o) must not depend on the side-1 setting.
            for j in 0..2 {
                for o in 0..2 {
                    let m0 = tables[0][j][k][0][o] + tables[0][j][k][1][o];
                    let m1 = tables[1][j][k][0][o] + tables[1][j][k][1][o];
                    if (m0 - m1).abs() > SIGNALING_TOL {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Simulates `rounds` independent rounds per setting pair from the
    /// side-1-first outcome tables and reports empirical correlators.
    /// Deterministic in `seed`.
    pub fn sample(&self, rounds: usize, seed: u64) -> Result<SampleOutcome, BellError> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut correlators = [[0.0; 2]; 2];
        for (i, s1) in [Side1::A, Side1::B].into_iter().enumerate() {
            for (j, s2) in [Side2::S, Side2::SPrime].into_iter().enumerate() {
                let table = self.joint_outcome_table(s1, s2, MeasureOrder::Side1First)?;
                let mut acc: i64 = 0;
                for _ in 0..rounds {
                    let u = next_unit(&mut rng);
                    let (v, o) = pick_cell(&table, u);
                    let sign1 = 2 * v as i64 - 1;
                    let sign2 = if o == 0 { 1 } else { -1 };
                    acc += sign1 * sign2;
                }
                correlators[i][j] = acc as f64 / rounds.max(1) as f64;
            }
        }
        let b_value = correlators[0][0] + correlators[1][0] + correlators[0][1]
            - correlators[1][1];
        Ok(SampleOutcome { rounds, seed, correlators, b_value })
    }
}

fn next_unit(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn pick_cell(table: &[[f64; 2]; 2], u: f64) -> (usize, usize) {
    let mut acc = 0.0;
    for v in 0..2 {
        for o in 0..2 {
            acc += table[v][o];
            if u < acc {
                return (v, o);
            }
        }
    }
    (1, 1)
}

/// Ontic weights strictly below zero in the epistemic form of `q`: the
/// locations and sizes of negativity that no ignorance distribution could
/// carry. Defined for p = 2 scenarios.
pub fn negativity_witness(q: &FiducialSet) -> Result<Vec<((u32, u32), f64)>, StateError> {
    if q.prime().get() != 2 {
        return Err(StateError::UnsupportedModulus { required: 2, got: q.prime().get() });
    }
    let dist = q.to_epistemic();
    let mut out = Vec::new();
    for a in 0..2u32 {
        for b in 0..2u32 {
            let w = dist.weight(a, b);
            if w < -CLAMP_TOL {
                out.push(((a, b), w));
            }
        }
    }
    Ok(out)
}
