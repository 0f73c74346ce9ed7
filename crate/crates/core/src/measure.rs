//! The one-parameter predictability measure M_r and its inverse problem.
//!
//! For a weight vector P and order r > -1,
//!
//! ```text
//! M_r(P) = ( sum_x P(x)^(1+r) )^(1/r),        r != 0
//! M_0(P) = 2^( sum_x P(x) log2 P(x) )         (continuous limit at r = 0)
//! ```
//!
//! with 0^(1+r) taken as 0 and sums running over the support. M_r is
//! nondecreasing in r, tends to 1/|support| as r -> -1+ and to the largest
//! weight as r -> infinity. A single-system state is pure at order r when
//! M_r = 1/p.
//!
//! Evaluation is done in the log domain with the largest entry factored out,
//! so spiky distributions far into the r -> -1 regime evaluate without
//! underflow, and uniform-on-k-states inputs give exactly 1/k.
//!
//! Negative weights (extended mode) are admitted only for odd positive
//! integer r: there 1 + r is even, so each term P(x)^(1+r) = |P(x)|^(1+r)
//! and the measure is still well defined and real.

use crate::state::{EpistemicDist, FiducialSet, CLAMP_TOL};
use core::fmt;

/// Absolute tolerance on |M_r - target| used by the order solver.
pub const SOLVE_TOL: f64 = 1e-10;
/// Below this the solver treats the measure as constant in r.
const FLAT_REL_TOL: f64 = 1e-12;
/// Lowest order the solver will search; the measure's r -> -1+ limit is
/// approached but never crossed.
pub const R_FLOOR: f64 = -1.0 + 1e-6;

/// Errors from measure evaluation and inversion.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureError {
    /// r must be finite and greater than -1.
    InvalidOrder { r: f64 },
    /// Negative weights require an odd positive integer order.
    NegativeSupport { r: f64 },
    /// All weights are zero.
    EmptyDistribution,
    /// The measure of this distribution does not depend on r, so the order
    /// solve is ill-posed (any r matches, or none does).
    ConstantMeasure { value: f64 },
    /// The target lies outside the reachable range of M_r.
    TargetOutOfRange { target: f64, min: f64, max: f64 },
    /// Bisection failed to reach tolerance.
    NoConvergence,
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::InvalidOrder { r } => {
                write!(f, "order r = {r} is outside the domain r > -1")
            }
            MeasureError::NegativeSupport { r } => write!(
                f,
                "negative weights require an odd positive integer order, got r = {r}"
            ),
            MeasureError::EmptyDistribution => write!(f, "distribution has empty support"),
            MeasureError::ConstantMeasure { value } => write!(
                f,
                "measure is constant {value} in r for this distribution; order is \
                 underdetermined"
            ),
            MeasureError::TargetOutOfRange { target, min, max } => write!(
                f,
                "target {target} is outside the reachable measure range ({min}, {max})"
            ),
            MeasureError::NoConvergence => write!(f, "order bisection did not converge"),
        }
    }
}

impl core::error::Error for MeasureError {}

/// True when `r` is an odd positive integer (1, 3, 5, ...).
pub fn is_odd_positive_integer(r: f64) -> bool {
    if !r.is_finite() || r < 1.0 || r > 9.0e15 {
        return false;
    }
    let rounded = libm::round(r);
    r == rounded && (rounded as i64) % 2 == 1
}

/// Evaluates M_r on a raw weight vector.
///
/// Weights are taken at face value: only exact zeros are excluded from the
/// support, so deliberately tiny weights (the r -> -1 regime lives on them)
/// are honored. Constructors and conversions snap round-off zeros before
/// they get here. Negative entries are admitted only when `r` is an odd
/// positive integer, where the even power 1 + r keeps the sum exact.
pub fn measure_weights(weights: &[f64], r: f64) -> Result<f64, MeasureError> {
    if !r.is_finite() || r <= -1.0 {
        return Err(MeasureError::InvalidOrder { r });
    }
    let mut support: alloc::vec::Vec<f64> = alloc::vec::Vec::with_capacity(weights.len());
    let mut has_negative = false;
    for &x in weights {
        if x == 0.0 {
            continue;
        }
        if x < 0.0 {
            has_negative = true;
        }
        support.push(x.abs());
    }
    if support.is_empty() {
        return Err(MeasureError::EmptyDistribution);
    }
    if has_negative && !is_odd_positive_integer(r) {
        return Err(MeasureError::NegativeSupport { r });
    }
    if r == 0.0 {
        // Shannon limit: all support entries are positive here, since
        // negative entries would have required an odd integer order.
        let h2: f64 = support.iter().map(|&x| x * libm::log2(x)).sum();
        return Ok(libm::exp2(h2));
    }
    let m = support.iter().cloned().fold(0.0_f64, f64::max);
    let s: f64 = support.iter().map(|&x| libm::pow(x / m, 1.0 + r)).sum();
    Ok(libm::exp(((1.0 + r) * libm::log(m) + libm::log(s)) / r))
}

impl EpistemicDist {
    /// The predictability measure M_r of this distribution.
    pub fn measure(&self, r: f64) -> Result<f64, MeasureError> {
        measure_weights(self.weights(), r)
    }

    /// Whether M_r equals the single-system purity level 1/p within `tol`.
    pub fn is_pure(&self, r: f64, tol: f64) -> Result<bool, MeasureError> {
        let m = self.measure(r)?;
        Ok((m - 1.0 / self.prime().get() as f64).abs() <= tol)
    }

    /// Solves M_r = `target` for the order r.
    ///
    /// Defined for nonnegative weight vectors only, where M_r is a
    /// nondecreasing function of r on (-1, infinity). Distributions that are
    /// uniform on their support have constant measure, which makes the solve
    /// ill-posed: matching targets report [`MeasureError::ConstantMeasure`],
    /// all others [`MeasureError::TargetOutOfRange`].
    pub fn solve_r(&self, target: f64) -> Result<f64, MeasureError> {
        let w = self.weights();
        if w.iter().any(|&x| x < -CLAMP_TOL) {
            return Err(MeasureError::NegativeSupport { r: f64::NAN });
        }
        let support: alloc::vec::Vec<f64> =
            w.iter().cloned().filter(|&x| x > 0.0).collect();
        if support.is_empty() {
            return Err(MeasureError::EmptyDistribution);
        }
        let max_e = support.iter().cloned().fold(0.0_f64, f64::max);
        let min_e = support.iter().cloned().fold(f64::INFINITY, f64::min);
        if max_e - min_e <= FLAT_REL_TOL * max_e {
            // Uniform on support: M_r == max_e for every r.
            if (target - max_e).abs() <= 1e-9 {
                return Err(MeasureError::ConstantMeasure { value: max_e });
            }
            return Err(MeasureError::TargetOutOfRange {
                target,
                min: max_e,
                max: max_e,
            });
        }
        let eval = |r: f64| measure_weights(&support, r).expect("nonnegative support");
        let lo_val = eval(R_FLOOR);
        if target <= lo_val || target >= max_e {
            return Err(MeasureError::TargetOutOfRange { target, min: lo_val, max: max_e });
        }
        let mut lo = R_FLOOR;
        let mut hi = 64.0;
        while eval(hi) < target {
            hi *= 2.0;
            if hi > 1.0e12 {
                return Err(MeasureError::TargetOutOfRange {
                    target,
                    min: lo_val,
                    max: max_e,
                });
            }
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            let m = eval(mid);
            if (m - target).abs() <= SOLVE_TOL {
                return Ok(mid);
            }
            if m < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(MeasureError::NoConvergence)
    }
}

impl FiducialSet {
    /// M_r of the state, evaluated through the induced epistemic weights.
    pub fn measure(&self, r: f64) -> Result<f64, MeasureError> {
        self.to_epistemic().measure(r)
    }

    /// Closed form for the r = 1 measure straight from fiducial rows:
    /// M_1(P) = (1/p) * sum_i M_1(Q_i) - 1/p, with M_1(Q_i) = sum_v Q_i(v)^2.
    pub fn measure_quadratic(&self) -> f64 {
        let p = self.prime().get() as f64;
        let total: f64 = self
            .rows()
            .iter()
            .map(|row| row.iter().map(|&q| q * q).sum::<f64>())
            .sum();
        (total - 1.0) / p
    }

    /// Whether M_r equals 1/p within `tol`.
    pub fn is_pure(&self, r: f64, tol: f64) -> Result<bool, MeasureError> {
        self.to_epistemic().is_pure(r, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::fixtures::*;
    use crate::state::Mode;
    use crate::Prime;
    use alloc::vec;

    const R_GRID: [f64; 8] = [-0.9, -0.5, -0.147, 0.0, 0.5, 1.0, 5.0, 20.0];

    #[test]
    fn delta_measures_one() {
        let d = EpistemicDist::delta(p2(), 1, 0).unwrap();
        for r in R_GRID {
            assert!((d.measure(r).unwrap() - 1.0).abs() <= 1e-15, "r={r}");
        }
    }

    #[test]
    fn uniform_measures_inverse_count() {
        for p in [2u32, 3, 5, 7] {
            let pr = Prime::new(p).unwrap();
            let d = EpistemicDist::maximally_mixed(pr);
            let expect = 1.0 / pr.ontic_count() as f64;
            for r in R_GRID {
                assert!((d.measure(r).unwrap() - expect).abs() <= 1e-14, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn canonical_pure_measures_inverse_p() {
        for p in [2u32, 3, 5, 7] {
            let pr = Prime::new(p).unwrap();
            let d = EpistemicDist::canonical_pure(pr, 2 % (p as usize + 1), 1).unwrap();
            for r in R_GRID {
                assert!(
                    (d.measure(r).unwrap() - 1.0 / p as f64).abs() <= 1e-14,
                    "p={p} r={r}"
                );
                assert!(d.is_pure(r, 1e-12).unwrap());
            }
        }
    }

    #[test]
    fn worked_example_quadratic_value() {
        let d = sample_s_dist();
        assert!((d.measure(1.0).unwrap() - 0.66).abs() <= 1e-12);
        assert!((sample_s().measure_quadratic() - 0.66).abs() <= 1e-12);
        assert!((sample_s().measure(1.0).unwrap() - 0.66).abs() <= 1e-12);
    }

    #[test]
    fn quadratic_route_matches_general_route() {
        for q in [sample_s(), sample_s_prime(), tilde_s(), tilde_s_prime()] {
            let direct = q.measure_quadratic();
            let general = q.measure(1.0).unwrap();
            assert!((direct - general).abs() <= 1e-12);
        }
    }

    #[test]
    fn worked_example_shannon_and_power_values() {
        let d = sample_s_dist();
        // Independent direct expressions through std arithmetic.
        let shannon = 2f64.powf(0.8 * 0.8f64.log2() + 0.2 * 0.1f64.log2());
        assert!((d.measure(0.0).unwrap() - shannon).abs() <= 1e-12);
        let r5 = (0.8f64.powi(6) + 2.0 * 0.1f64.powi(6)).powf(0.2);
        assert!((d.measure(5.0).unwrap() - r5).abs() <= 1e-13);
    }

    #[test]
    fn worked_example_near_half_at_negative_order() {
        let d = sample_s_dist();
        assert!((d.measure(-0.147).unwrap() - 0.5).abs() <= 1e-3);
    }

    #[test]
    fn monotone_in_order_and_bounded() {
        let d = sample_s_dist();
        let mut prev = 0.0;
        for r in R_GRID {
            let m = d.measure(r).unwrap();
            assert!(m > prev, "not increasing at r={r}");
            assert!((0.25..=1.0).contains(&m));
            prev = m;
        }
    }

    #[test]
    fn limits_match_support_and_max() {
        let d = sample_s_dist();
        // r -> -1+ tends to 1/|support| = 1/3.
        assert!((d.measure(-1.0 + 1e-9).unwrap() - 1.0 / 3.0).abs() <= 1e-5);
        // r -> infinity tends to the largest weight.
        assert!((d.measure(200.0).unwrap() - 0.8).abs() <= 2e-3);
        // The r = 0 branch agrees with its neighborhood.
        assert!((d.measure(1e-9).unwrap() - d.measure(0.0).unwrap()).abs() <= 1e-6);
    }

    #[test]
    fn spiky_distribution_evaluates_without_underflow() {
        // Two tiny weights and one near-unit weight, far into the r -> -1
        // regime where naive power sums underflow.
        let t = 1e-40;
        let d = EpistemicDist::new(
            p2(),
            Mode::Standard,
            vec![0.0, t, t, 1.0 - 2.0 * t],
        )
        .unwrap();
        let m = d.measure(-0.99).unwrap();
        assert!(m.is_finite() && m > 0.33 && m < 1.0, "m={m}");
    }

    #[test]
    fn rejects_orders_at_or_below_minus_one() {
        let d = sample_s_dist();
        for r in [-1.0, -2.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                d.measure(r),
                Err(MeasureError::InvalidOrder { .. })
            ));
        }
    }

    #[test]
    fn negative_weights_need_odd_integer_order() {
        let d = EpistemicDist::new(
            p2(),
            Mode::Extended,
            vec![-0.3, 0.5, 0.4, 0.4],
        )
        .unwrap();
        // Complement of the worked example: same quadratic measure.
        assert!((d.measure(1.0).unwrap() - 0.66).abs() <= 1e-12);
        let cubic = (0.3f64.powi(4) + 0.5f64.powi(4) + 2.0 * 0.4f64.powi(4)).powf(1.0 / 3.0);
        assert!((d.measure(3.0).unwrap() - cubic).abs() <= 1e-13);
        for r in [2.0, 0.5, 0.0, -0.5, 7.2] {
            assert!(
                matches!(d.measure(r), Err(MeasureError::NegativeSupport { .. })),
                "r={r}"
            );
        }
    }

    #[test]
    fn odd_integer_predicate() {
        assert!(is_odd_positive_integer(1.0));
        assert!(is_odd_positive_integer(3.0));
        assert!(is_odd_positive_integer(17.0));
        for r in [0.0, -1.0, 2.0, 4.0, 1.5, 3.0000001, f64::NAN] {
            assert!(!is_odd_positive_integer(r), "r={r}");
        }
    }

    #[test]
    fn tilde_state_is_pure_quadratically_but_not_cubically() {
        let q = tilde_s();
        assert!(q.is_pure(1.0, 1e-12).unwrap());
        let m3 = q.measure(3.0).unwrap();
        let expect = (36.0f64 / 256.0).powf(1.0 / 3.0);
        assert!((m3 - expect).abs() <= 1e-12);
        assert!(!q.is_pure(3.0, 1e-3).unwrap());
    }

    #[test]
    fn solve_r_recovers_known_orders() {
        let d = sample_s_dist();
        // Target 0.66 is the r = 1 value.
        let r1 = d.solve_r(0.66).unwrap();
        assert!((r1 - 1.0).abs() <= 1e-6, "r1={r1}");
        assert!((d.measure(r1).unwrap() - 0.66).abs() <= SOLVE_TOL);
        // Target 1/2 sits near r = -0.147.
        let rh = d.solve_r(0.5).unwrap();
        assert!((-0.149..=-0.145).contains(&rh), "rh={rh}");
        assert!((d.measure(rh).unwrap() - 0.5).abs() <= SOLVE_TOL);
    }

    #[test]
    fn solve_r_range_errors() {
        let d = sample_s_dist();
        // Below the r -> -1 limit 1/3 and above the max weight 0.8.
        assert!(matches!(
            d.solve_r(0.2),
            Err(MeasureError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            d.solve_r(0.81),
            Err(MeasureError::TargetOutOfRange { .. })
        ));
        // Near-limit targets inside the open range still solve.
        let r = d.solve_r(0.34).unwrap();
        assert!(r < -0.9);
        assert!((d.measure(r).unwrap() - 0.34).abs() <= SOLVE_TOL);
    }

    #[test]
    fn solve_r_flat_distributions_are_ill_posed() {
        let delta = EpistemicDist::delta(p2(), 0, 0).unwrap();
        assert!(matches!(
            delta.solve_r(1.0),
            Err(MeasureError::ConstantMeasure { .. })
        ));
        assert!(matches!(
            delta.solve_r(0.7),
            Err(MeasureError::TargetOutOfRange { .. })
        ));
        let mm = EpistemicDist::maximally_mixed(p2());
        assert!(matches!(
            mm.solve_r(0.25),
            Err(MeasureError::ConstantMeasure { .. })
        ));
        assert!(matches!(
            mm.solve_r(0.5),
            Err(MeasureError::TargetOutOfRange { .. })
        ));
        let pure = EpistemicDist::canonical_pure(p2(), 2, 0).unwrap();
        assert!(matches!(
            pure.solve_r(0.5),
            Err(MeasureError::ConstantMeasure { .. })
        ));
    }

    #[test]
    fn solve_r_rejects_negative_weights() {
        let d = EpistemicDist::new(
            p2(),
            Mode::Extended,
            vec![-0.3, 0.5, 0.4, 0.4],
        )
        .unwrap();
        assert!(matches!(
            d.solve_r(0.5),
            Err(MeasureError::NegativeSupport { .. })
        ));
    }

    #[test]
    fn uniform_on_k_is_exact() {
        // Uniform on two of four ontic states: exactly 1/2 across orders.
        let d = EpistemicDist::new(
            p2(),
            Mode::Standard,
            vec![0.5, 0.0, 0.5, 0.0],
        )
        .unwrap();
        for r in R_GRID {
            assert!((d.measure(r).unwrap() - 0.5).abs() <= 1e-14, "r={r}");
        }
    }
}
