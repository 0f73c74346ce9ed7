//! Joint epistemic states of several systems and the pure-state validity
//! rules.
//!
//! A joint distribution assigns a nonnegative weight to every ontic
//! configuration of N systems, each carrying coordinates (x_a, x_b) in F_p^2.
//! Weights are stored lexicographically with system 0's coordinates most
//! significant: index = sum_s (x_a_s * p + x_b_s) * p^(2 (N - 1 - s)).
//!
//! A valid pure joint state at order r must satisfy three rules:
//!
//! 1. global purity: M_r(J) = (1/p)^N;
//! 2. marginal bound: every nonempty proper marginal J' on N' systems has
//!    M_r(J') <= (1/p)^N';
//! 3. remote collapse: conditioning on one canonical-observable outcome of
//!    any single system outside a subset A leaves A's marginal within its
//!    own bound, for every observable, every outcome of positive
//!    probability, and every choice of A.
//!
//! [`JointDist::validate_pure`] itemizes each failed rule instead of only
//! reporting a boolean.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{Fp, Prime};
use crate::measure::{measure_weights, MeasureError};
use crate::observable::Observable;
use crate::state::{EpistemicDist, Mode, StateError, CLAMP_TOL, SUM_TOL};

/// Default cap on the number of systems; state size grows as p^(2N).
pub const DEFAULT_MAX_SYSTEMS: usize = 3;
/// Outcomes with probability at or below this are skipped when conditioning.
pub const ZERO_PROB_TOL: f64 = 1e-15;

/// Errors from joint-state construction and queries.
#[derive(Debug, Clone, PartialEq)]
pub enum MultiError {
    State(StateError),
    Measure(MeasureError),
    /// More systems than the configured cap.
    TooManySystems { n: usize, max: usize },
    /// A system-index list is empty, repeats an index, or points past N.
    BadSystemSet,
    /// Constituent states live over different moduli.
    PrimeMismatch { left: u32, right: u32 },
}

impl fmt::Display for MultiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiError::State(e) => write!(f, "{e}"),
            MultiError::Measure(e) => write!(f, "{e}"),
            MultiError::TooManySystems { n, max } => {
                write!(f, "{n} systems exceed the configured cap of {max}")
            }
            MultiError::BadSystemSet => {
                write!(f, "system set must be nonempty, distinct, and in range")
            }
            MultiError::PrimeMismatch { left, right } => {
                write!(f, "states live over different moduli {left} and {right}")
            }
        }
    }
}

impl core::error::Error for MultiError {}

impl From<StateError> for MultiError {
    fn from(e: StateError) -> Self {
        MultiError::State(e)
    }
}

impl From<MeasureError> for MultiError {
    fn from(e: MeasureError) -> Self {
        MultiError::Measure(e)
    }
}

/// One failed validity rule, with the numbers that failed it.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// M_r(J) differs from (1/p)^N.
    GlobalPurity { expected: f64, actual: f64 },
    /// A marginal exceeds its purity bound.
    MarginalExcess { systems: Vec<usize>, bound: f64, actual: f64 },
    /// Conditioning on a remote outcome pushed a marginal past its bound.
    RemoteCollapse {
        kept: Vec<usize>,
        measured: usize,
        observable: usize,
        value: u32,
        bound: f64,
        actual: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GlobalPurity { expected, actual } => {
                write!(f, "global measure {actual} differs from purity level {expected}")
            }
            Violation::MarginalExcess { systems, bound, actual } => {
                write!(f, "marginal on systems {systems:?} has measure {actual} > {bound}")
            }
            Violation::RemoteCollapse { kept, measured, observable, value, bound, actual } => {
                write!(
                    f,
                    "after observable {observable} = {value} on system {measured}, \
                     marginal on systems {kept:?} has measure {actual} > {bound}"
                )
            }
        }
    }
}

/// Outcome of [`JointDist::validate_pure`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

fn flat_index(prime: Prime, coords: &[(u32, u32)]) -> usize {
    let p = prime.get() as usize;
    let mut idx = 0;
    for &(a, b) in coords {
        idx = idx * p * p + (a as usize) * p + (b as usize);
    }
    idx
}

/// A nonnegative joint distribution over N systems' ontic configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    prime: Prime,
    n: usize,
    weights: Vec<f64>,
}

impl JointDist {
    /// Validates and builds a joint state under the default system cap.
    pub fn new(prime: Prime, n: usize, weights: Vec<f64>) -> Result<Self, MultiError> {
        Self::new_with_limit(prime, n, weights, DEFAULT_MAX_SYSTEMS)
    }

    /// As [`JointDist::new`] with an explicit cap for larger experiments.
    pub fn new_with_limit(
        prime: Prime,
        n: usize,
        weights: Vec<f64>,
        max_systems: usize,
    ) -> Result<Self, MultiError> {
        if n == 0 || n > max_systems {
            return Err(MultiError::TooManySystems { n, max: max_systems });
        }
        let expected = prime.ontic_count().pow(n as u32);
        if weights.len() != expected {
            return Err(StateError::WrongLength { expected, got: weights.len() }.into());
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(StateError::NotNormalized { sum }.into());
        }
        let mut w = weights;
        for (i, x) in w.iter_mut().enumerate() {
            if *x < 0.0 {
                if *x < -CLAMP_TOL {
                    return Err(StateError::NegativeWeight { index: i, value: *x }.into());
                }
                *x = 0.0;
            }
        }
        Ok(JointDist { prime, n, weights: w })
    }

    /// Independent product of single-system distributions, in order.
    pub fn from_product(parts: &[&EpistemicDist]) -> Result<Self, MultiError> {
        let first = parts.first().ok_or(MultiError::BadSystemSet)?;
        let prime = first.prime();
        for part in parts {
            if part.prime() != prime {
                return Err(MultiError::PrimeMismatch {
                    left: prime.get(),
                    right: part.prime().get(),
                });
            }
        }
        let mut weights = vec![1.0];
        for part in parts {
            let mut next = Vec::with_capacity(weights.len() * part.weights().len());
            for &w in &weights {
                for &x in part.weights() {
                    next.push(w * x);
                }
            }
            weights = next;
        }
        Self::new(prime, parts.len(), weights)
    }

    /// Product of two joint states, this one's systems first.
    pub fn tensor(&self, other: &JointDist) -> Result<JointDist, MultiError> {
        if self.prime != other.prime {
            return Err(MultiError::PrimeMismatch {
                left: self.prime.get(),
                right: other.prime.get(),
            });
        }
        let mut weights = Vec::with_capacity(self.weights.len() * other.weights.len());
        for &w in &self.weights {
            for &x in &other.weights {
                weights.push(w * x);
            }
        }
        Self::new(self.prime, self.n + other.n, weights)
    }

    /// The perfectly correlated two-system state: uniform weight 1/p^2 on
    /// configurations where both systems share the same ontic state.
    pub fn correlated_pair(prime: Prime) -> JointDist {
        let p = prime.get();
        let cell = prime.ontic_count();
        let mut dist = JointDist { prime, n: 2, weights: vec![0.0; cell * cell] };
        let share = 1.0 / cell as f64;
        for a in 0..p {
            for b in 0..p {
                let idx = dist.index_of(&[(a, b), (a, b)]);
                dist.weights[idx] = share;
            }
        }
        dist
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Flat index of a configuration given per-system (x_a, x_b) pairs.
    pub fn index_of(&self, coords: &[(u32, u32)]) -> usize {
        debug_assert_eq!(coords.len(), self.n);
        flat_index(self.prime, coords)
    }

    /// Per-system coordinates of a flat index, system 0 first.
    pub fn coords_of(&self, index: usize) -> Vec<(u32, u32)> {
        let p = self.prime.get() as usize;
        let mut out = vec![(0u32, 0u32); self.n];
        let mut rest = index;
        for s in (0..self.n).rev() {
            let cell = rest % (p * p);
            out[s] = ((cell / p) as u32, (cell % p) as u32);
            rest /= p * p;
        }
        out
    }

    /// Weight of one configuration.
    pub fn weight_at(&self, coords: &[(u32, u32)]) -> f64 {
        self.weights[self.index_of(coords)]
    }

    /// Marginal onto `keep`, whose order becomes the output's system order.
    /// Indices must be distinct and in range.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointDist, MultiError> {
        if keep.is_empty() || keep.iter().any(|&s| s >= self.n) {
            return Err(MultiError::BadSystemSet);
        }
        for (i, &s) in keep.iter().enumerate() {
            if keep[..i].contains(&s) {
                return Err(MultiError::BadSystemSet);
            }
        }
        let cell = self.prime.ontic_count();
        let mut weights = vec![0.0; cell.pow(keep.len() as u32)];
        for (idx, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let coords = self.coords_of(idx);
            let kept: Vec<(u32, u32)> = keep.iter().map(|&s| coords[s]).collect();
            weights[flat_index(self.prime, &kept)] += w;
        }
        Ok(JointDist { prime: self.prime, n: keep.len(), weights })
    }

    /// Single-system marginal as an [`EpistemicDist`].
    pub fn single_marginal(&self, system: usize) -> Result<EpistemicDist, MultiError> {
        let m = self.marginal(&[system])?;
        Ok(EpistemicDist::new(self.prime, Mode::Standard, m.weights)?)
    }

    /// Bayesian conditioning on "observable `obs_index` of `system` has
    /// value `value`". Returns the outcome probability and the renormalized
    /// joint state, or `None` when the outcome has zero probability.
    ///
    /// All systems are kept, including the measured one; this captures what
    /// the outcome reveals about remote systems. (Local measurement
    /// disturbance on the measured system itself is a separate update and is
    /// not modeled here.)
    pub fn condition(
        &self,
        system: usize,
        obs_index: usize,
        value: u32,
    ) -> Result<Option<(f64, JointDist)>, MultiError> {
        if system >= self.n {
            return Err(MultiError::BadSystemSet);
        }
        let obs = Observable::nth(self.prime, obs_index).ok_or(
            StateError::IndexOutOfRange { index: obs_index, max: self.prime.get() as usize },
        )?;
        if value >= self.prime.get() {
            return Err(StateError::ValueOutOfRange {
                value,
                prime: self.prime.get(),
            }
            .into());
        }
        let target = Fp::new(value, self.prime);
        let mut weights = vec![0.0; self.weights.len()];
        let mut prob = 0.0;
        for (idx, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let (a, b) = self.coords_of(idx)[system];
            if obs.eval(Fp::new(a, self.prime), Fp::new(b, self.prime)) == target {
                weights[idx] = w;
                prob += w;
            }
        }
        if prob <= ZERO_PROB_TOL {
            return Ok(None);
        }
        for w in &mut weights {
            *w /= prob;
        }
        Ok(Some((prob, JointDist { prime: self.prime, n: self.n, weights })))
    }

    /// M_r of the joint weight vector.
    pub fn measure(&self, r: f64) -> Result<f64, MeasureError> {
        measure_weights(&self.weights, r)
    }

    /// Whether M_r equals the N-system purity level (1/p)^N within `tol`.
    pub fn is_pure(&self, r: f64, tol: f64) -> Result<bool, MeasureError> {
        let m = self.measure(r)?;
        Ok((m - self.purity_level(self.n)).abs() <= tol)
    }

    fn purity_level(&self, systems: usize) -> f64 {
        libm::pow(1.0 / self.prime.get() as f64, systems as f64)
    }

    /// Checks the three pure-state validity rules at order `r`, itemizing
    /// every failure. `tol` is the slack allowed on each bound.
    pub fn validate_pure(&self, r: f64, tol: f64) -> Result<ValidityReport, MultiError> {
        let mut violations = Vec::new();

        let global = self.measure(r)?;
        let expected = self.purity_level(self.n);
        if (global - expected).abs() > tol {
            violations.push(Violation::GlobalPurity { expected, actual: global });
        }

        // Nonempty proper subsets of systems, as ascending index lists.
        let subsets: Vec<Vec<usize>> = (1..(1usize << self.n) - 1)
            .map(|mask| (0..self.n).filter(|s| mask >> s & 1 == 1).collect())
            .collect();

        for subset in &subsets {
            let m = self.marginal(subset)?.measure(r)?;
            let bound = self.purity_level(subset.len());
            if m > bound + tol {
                violations.push(Violation::MarginalExcess {
                    systems: subset.clone(),
                    bound,
                    actual: m,
                });
            }
        }

        for subset in &subsets {
            let bound = self.purity_level(subset.len());
            for measured in 0..self.n {
                if subset.contains(&measured) {
                    continue;
                }
                for obs_index in 0..=self.prime.get() as usize {
                    for value in 0..self.prime.get() {
                        let Some((_, post)) = self.condition(measured, obs_index, value)?
                        else {
                            continue;
                        };
                        let m = post.marginal(subset)?.measure(r)?;
                        if m > bound + tol {
                            violations.push(Violation::RemoteCollapse {
                                kept: subset.clone(),
                                measured,
                                observable: obs_index,
                                value,
                                bound,
                                actual: m,
                            });
                        }
                    }
                }
            }
        }

        Ok(ValidityReport { valid: violations.is_empty(), violations })
    }
}
