//! Epistemic states of a single system and their two representations.
//!
//! A state can be held as an [`EpistemicDist`] P, a real weight per ontic
//! state (x_a, x_b), or as a [`FiducialSet`] Q, one probability row per
//! canonical observable. The two are affinely equivalent:
//!
//! - Q_i(v) is the P-mass of the level set where observable i takes value v;
//! - p * P(x) = -1 + sum_i Q_i(x_i(x)), summing each observable's row at the
//!   value it takes on x.
//!
//! In `Standard` mode all P-weights are nonnegative. In `Extended` mode
//! individual weights may be negative as long as every induced fiducial row
//! still consists of probabilities; such states are valid instrumental
//! descriptions even though they have no ignorance reading.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{FieldError, Fp, Prime};
use crate::observable::Observable;

/// Absolute tolerance for normalization sums.
pub const SUM_TOL: f64 = 1e-12;
/// Entries within this distance below zero (or above one) are treated as
/// exact round-off and clamped.
pub const CLAMP_TOL: f64 = 1e-12;

/// Whether negative epistemic weights are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Nonnegative weights: a genuine ignorance distribution.
    Standard,
    /// Possibly negative weights whose fiducial rows are still probabilities.
    Extended,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Standard => write!(f, "standard"),
            Mode::Extended => write!(f, "extended"),
        }
    }
}

/// Errors from state construction and state-level operations.
#[derive(Debug, Clone, PartialEq)]
pub enum StateError {
    /// Underlying modulus failed validation.
    Field(FieldError),
    /// Weight or row vector has the wrong length.
    WrongLength { expected: usize, got: usize },
    /// Weights or a fiducial row do not sum to one.
    NotNormalized { sum: f64 },
    /// A standard-mode weight is negative beyond round-off.
    NegativeWeight { index: usize, value: f64 },
    /// A fiducial entry lies outside [0, 1] beyond round-off.
    FiducialRange { observable: usize, value: usize, entry: f64 },
    /// Observable index out of range.
    IndexOutOfRange { index: usize, max: usize },
    /// Observable value out of range.
    ValueOutOfRange { value: u32, prime: u32 },
    /// Operation only defined for a specific modulus.
    UnsupportedModulus { required: u32, got: u32 },
    /// Affine relabeling matrix is singular over F_p.
    SingularMap,
}

impl fmt::Display for StateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateError::Field(e) => write!(f, "{e}"),
            StateError::WrongLength { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            StateError::NotNormalized { sum } => {
                write!(f, "entries sum to {sum}, expected 1")
            }
            StateError::NegativeWeight { index, value } => {
                write!(f, "standard-mode weight {value} at index {index} is negative")
            }
            StateError::FiducialRange { observable, value, entry } => {
                write!(
                    f,
                    "fiducial entry {entry} for observable {observable} value {value} \
                     lies outside [0, 1]"
                )
            }
            StateError::IndexOutOfRange { index, max } => {
                write!(f, "observable index {index} out of range 0..={max}")
            }
            StateError::ValueOutOfRange { value, prime } => {
                write!(f, "outcome value {value} out of range for modulus {prime}")
            }
            StateError::UnsupportedModulus { required, got } => {
                write!(f, "operation requires p = {required}, got p = {got}")
            }
            StateError::SingularMap => write!(f, "relabeling matrix is singular"),
        }
    }
}

impl core::error::Error for StateError {}

impl From<FieldError> for StateError {
    fn from(e: FieldError) -> Self {
        StateError::Field(e)
    }
}

/// Ontic-state index for (x_a, x_b): row-major with x_a major.
#[inline]
pub fn ontic_index(prime: Prime, x_a: u32, x_b: u32) -> usize {
    (x_a as usize) * (prime.get() as usize) + (x_b as usize)
}

/// An epistemic distribution P over the p^2 ontic states.
///
/// Weights are stored row-major in (x_a, x_b) order: index = x_a * p + x_b.
#[derive(Debug, Clone, PartialEq)]
pub struct EpistemicDist {
    prime: Prime,
    mode: Mode,
    weights: Vec<f64>,
}

impl EpistemicDist {
    /// Validates and builds a distribution.
    ///
    /// Both modes require normalization. `Standard` requires nonnegative
    /// weights; `Extended` requires that every induced fiducial row is a
    /// probability vector. Entries within [`CLAMP_TOL`] of a bound are
    /// clamped onto it.
    pub fn new(prime: Prime, mode: Mode, weights: Vec<f64>) -> Result<Self, StateError> {
        let n = prime.ontic_count();
        if weights.len() != n {
            return Err(StateError::WrongLength { expected: n, got: weights.len() });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(StateError::NotNormalized { sum });
        }
        let mut w = weights;
        match mode {
            Mode::Standard => {
                for (i, x) in w.iter_mut().enumerate() {
                    if *x < 0.0 {
                        if *x < -CLAMP_TOL {
                            return Err(StateError::NegativeWeight { index: i, value: *x });
                        }
                        *x = 0.0;
                    }
                }
            }
            Mode::Extended => {
                for x in w.iter_mut() {
                    if *x < 0.0 && *x >= -CLAMP_TOL {
                        *x = 0.0;
                    }
                }
                let dist = EpistemicDist { prime, mode, weights: w.clone() };
                check_fiducial_rows(prime, &dist.fiducial_rows())?;
            }
        }
        Ok(EpistemicDist { prime, mode, weights: w })
    }

    /// The uniform distribution over all ontic states.
    pub fn maximally_mixed(prime: Prime) -> Self {
        let n = prime.ontic_count();
        EpistemicDist {
            prime,
            mode: Mode::Standard,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on a single ontic state (a sharp, maximal-knowledge limit
    /// used in tests and diagnostics; it is not itself a valid pure state).
    pub fn delta(prime: Prime, x_a: u32, x_b: u32) -> Result<Self, StateError> {
        let p = prime.get();
        if x_a >= p || x_b >= p {
            return Err(StateError::ValueOutOfRange { value: x_a.max(x_b), prime: p });
        }
        let mut w = vec![0.0; prime.ontic_count()];
        w[ontic_index(prime, x_a, x_b)] = 1.0;
        Ok(EpistemicDist { prime, mode: Mode::Standard, weights: w })
    }

    /// The canonical pure state "observable `index` has value `value`":
    /// uniform over that observable's level set.
    pub fn canonical_pure(prime: Prime, index: usize, value: u32) -> Result<Self, StateError> {
        let obs = Observable::nth(prime, index).ok_or(StateError::IndexOutOfRange {
            index,
            max: prime.get() as usize,
        })?;
        if value >= prime.get() {
            return Err(StateError::ValueOutOfRange { value, prime: prime.get() });
        }
        let mut w = vec![0.0; prime.ontic_count()];
        let share = 1.0 / prime.get() as f64;
        for (a, b) in obs.level_set(Fp::new(value, prime)) {
            w[ontic_index(prime, a.value(), b.value())] = share;
        }
        Ok(EpistemicDist { prime, mode: Mode::Standard, weights: w })
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn mode(&self) -> Mode {
        self.mode
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of the ontic state (x_a, x_b). Panics if out of range.
    #[inline]
    pub fn weight(&self, x_a: u32, x_b: u32) -> f64 {
        self.weights[ontic_index(self.prime, x_a, x_b)]
    }

    /// True when some weight is negative beyond round-off.
    pub fn has_negative_weights(&self) -> bool {
        self.weights.iter().any(|&x| x < -CLAMP_TOL)
    }

    fn fiducial_rows(&self) -> Vec<Vec<f64>> {
        let p = self.prime.get();
        let mut rows = Vec::with_capacity(p as usize + 1);
        for obs in Observable::all(self.prime) {
            let mut row = vec![0.0; p as usize];
            for a in 0..p {
                for b in 0..p {
                    let v = obs.eval(Fp::new(a, self.prime), Fp::new(b, self.prime));
                    row[v.value() as usize] += self.weight(a, b);
                }
            }
            rows.push(row);
        }
        rows
    }

    /// The induced fiducial set: Q_i(v) = P-mass of observable i's level set
    /// at value v.
    pub fn to_fiducial(&self) -> FiducialSet {
        let mut rows = self.fiducial_rows();
        for row in &mut rows {
            for x in row.iter_mut() {
                *x = clamp_unit(*x);
            }
        }
        FiducialSet { prime: self.prime, rows }
    }

    /// Pushforward under the invertible affine ontic map
    /// x -> M x + t over F_p. Errors when M is singular.
    pub fn relabel(&self, m: [[Fp; 2]; 2], t: [Fp; 2]) -> Result<Self, StateError> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.is_zero() {
            return Err(StateError::SingularMap);
        }
        let p = self.prime.get();
        let mut w = vec![0.0; self.prime.ontic_count()];
        for a in 0..p {
            for b in 0..p {
                let xa = Fp::new(a, self.prime);
                let xb = Fp::new(b, self.prime);
                let ya = m[0][0] * xa + m[0][1] * xb + t[0];
                let yb = m[1][0] * xa + m[1][1] * xb + t[1];
                w[ontic_index(self.prime, ya.value(), yb.value())] += self.weight(a, b);
            }
        }
        Ok(EpistemicDist { prime: self.prime, mode: self.mode, weights: w })
    }
}

fn clamp_unit(x: f64) -> f64 {
    if x < 0.0 && x >= -CLAMP_TOL {
        0.0
    } else if x > 1.0 && x <= 1.0 + CLAMP_TOL {
        1.0
    } else {
        x
    }
}

fn check_fiducial_rows(prime: Prime, rows: &[Vec<f64>]) -> Result<(), StateError> {
    let p = prime.get() as usize;
    if rows.len() != p + 1 {
        return Err(StateError::WrongLength { expected: p + 1, got: rows.len() });
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != p {
            return Err(StateError::WrongLength { expected: p, got: row.len() });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(StateError::NotNormalized { sum });
        }
        for (v, &q) in row.iter().enumerate() {
            if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&q) {
                return Err(StateError::FiducialRange { observable: i, value: v, entry: q });
            }
        }
    }
    Ok(())
}

/// A fiducial set Q: one outcome distribution per canonical observable,
/// p + 1 rows of length p.
#[derive(Debug, Clone, PartialEq)]
pub struct FiducialSet {
    prime: Prime,
    rows: Vec<Vec<f64>>,
}

impl FiducialSet {
    /// Validates row shapes, normalization, and the [0, 1] range
    /// (entries within [`CLAMP_TOL`] of a bound are clamped).
    pub fn new(prime: Prime, rows: Vec<Vec<f64>>) -> Result<Self, StateError> {
        check_fiducial_rows(prime, &rows)?;
        let mut rows = rows;
        for row in &mut rows {
            for x in row.iter_mut() {
                *x = clamp_unit(*x);
            }
        }
        Ok(FiducialSet { prime, rows })
    }

    /// All rows uniform: the fiducial form of the maximally mixed state.
    pub fn maximally_mixed(prime: Prime) -> Self {
        let p = prime.get() as usize;
        FiducialSet { prime, rows: vec![vec![1.0 / p as f64; p]; p + 1] }
    }

    /// For p = 2 only: builds the set from its three free slots
    /// (Q_0(1), Q_1(1), Q_2(0)); the complementary entries follow from
    /// row normalization.
    pub fn from_slots(prime: Prime, slots: [f64; 3]) -> Result<Self, StateError> {
        require_p2(prime)?;
        let [a, b, c] = slots;
        FiducialSet::new(
            prime,
            vec![vec![1.0 - a, a], vec![1.0 - b, b], vec![c, 1.0 - c]],
        )
    }

    /// For p = 2 only: the three free slots (Q_0(1), Q_1(1), Q_2(0)).
    pub fn slots(&self) -> Result<[f64; 3], StateError> {
        require_p2(self.prime)?;
        Ok([self.rows[0][1], self.rows[1][1], self.rows[2][0]])
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Outcome distribution for observable `index`. Panics if out of range.
    #[inline]
    pub fn row(&self, index: usize) -> &[f64] {
        &self.rows[index]
    }

    /// Probability that observable `index` takes value `value`.
    #[inline]
    pub fn value(&self, index: usize, value: u32) -> f64 {
        self.rows[index][value as usize]
    }

    /// The induced epistemic distribution via
    /// p * P(x) = -1 + sum_i Q_i(x_i(x)).
    ///
    /// The result is always tagged `Extended`: the inversion may produce
    /// negative weights, and the induced rows of the output reproduce the
    /// input, so extended-mode validation always passes. Weights within
    /// [`CLAMP_TOL`] of zero are snapped to exact zero: fiducial entries are
    /// order-one numbers, so anything that small is round-off of a vanishing
    /// weight, and the measure treats exact zeros as outside the support.
    pub fn to_epistemic(&self) -> EpistemicDist {
        let p = self.prime.get();
        let pf = p as f64;
        let mut w = vec![0.0; self.prime.ontic_count()];
        let obs = Observable::all(self.prime);
        for a in 0..p {
            for b in 0..p {
                let mut acc = -1.0;
                for o in &obs {
                    let v = o.eval(Fp::new(a, self.prime), Fp::new(b, self.prime));
                    acc += self.rows[o.index()][v.value() as usize];
                }
                let x = acc / pf;
                w[ontic_index(self.prime, a, b)] = if x.abs() <= CLAMP_TOL { 0.0 } else { x };
            }
        }
        EpistemicDist { prime: self.prime, mode: Mode::Extended, weights: w }
    }

    /// For p = 2 only: the complement state, every fiducial entry mapped
    /// q -> 1 - q. An involution that fixes the maximally mixed state.
    pub fn complemented(&self) -> Result<FiducialSet, StateError> {
        require_p2(self.prime)?;
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&q| 1.0 - q).collect())
            .collect();
        Ok(FiducialSet { prime: self.prime, rows })
    }

    /// For p = 2 only: pushforward under the ontic relabeling
    /// (x_a, x_b) -> (x_b, x_a + x_b), which cycles the three observable
    /// rows: Q'_0 = Q_1, Q'_1 = Q_2, Q'_2 = Q_0.
    pub fn rotated(&self) -> Result<FiducialSet, StateError> {
        require_p2(self.prime)?;
        let rows = vec![self.rows[1].clone(), self.rows[2].clone(), self.rows[0].clone()];
        Ok(FiducialSet { prime: self.prime, rows })
    }
}

fn require_p2(prime: Prime) -> Result<(), StateError> {
    if prime.get() != 2 {
        return Err(StateError::UnsupportedModulus { required: 2, got: prime.get() });
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    /// The worked fiducial set with slots (0.9, 0.9, 0.8).
    pub fn sample_s() -> FiducialSet {
        FiducialSet::from_slots(p2(), [0.9, 0.9, 0.8]).unwrap()
    }

    /// Its epistemic form: P(1,1) = 0.8, P(0,1) = P(1,0) = 0.1, P(0,0) = 0.
    pub fn sample_s_dist() -> EpistemicDist {
        EpistemicDist::new(p2(), Mode::Standard, vec![0.0, 0.1, 0.1, 0.8]).unwrap()
    }

    /// The row-cycled partner used on the second wing of the Bell pair.
    pub fn sample_s_prime() -> FiducialSet {
        sample_s().rotated().unwrap()
    }

    /// Irrational-slot state with slots (1/2 + sqrt(2)/4, 1/2 + sqrt(2)/4, 1/2).
    pub fn tilde_s() -> FiducialSet {
        let h = 0.5 + core::f64::consts::SQRT_2 / 4.0;
        FiducialSet::from_slots(p2(), [h, h, 0.5]).unwrap()
    }

    /// Its partner with slots (1/2 + sqrt(2)/4, 1/2 - sqrt(2)/4, 1/2).
    pub fn tilde_s_prime() -> FiducialSet {
        let h = core::f64::consts::SQRT_2 / 4.0;
        FiducialSet::from_slots(p2(), [0.5 + h, 0.5 - h, 0.5]).unwrap()
    }
}
