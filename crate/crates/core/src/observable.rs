//! The p + 1 canonical observables on a single system.
//!
//! A single system carries two ontic coordinates (x_a, x_b) in F_p x F_p.
//! An observable is a linear form k_a * x_a + k_b * x_b. The canonical family
//! indexes them as
//!
//! - index 0:      X_a                (coefficients (1, 0))
//! - index k + 1:  X_b + k * X_a      (coefficients (k, 1)) for k = 0..p-1
//!
//! Any two distinct members have non-proportional coefficient vectors, so
//! their level sets intersect in exactly one ontic state: the family is
//! mutually unbiased and of maximal size p + 1.

use alloc::vec::Vec;

use crate::field::{Fp, Prime};

/// A linear observable k_a * x_a + k_b * x_b on one system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observable {
    index: usize,
    coeff_a: Fp,
    coeff_b: Fp,
}

impl Observable {
    /// The canonical family of all p + 1 observables, in index order.
    pub fn all(prime: Prime) -> Vec<Observable> {
        let mut out = Vec::with_capacity(prime.get() as usize + 1);
        for i in 0..=prime.get() as usize {
            out.push(Observable::nth(prime, i).expect("index in range"));
        }
        out
    }

    /// The observable at `index`, or `None` when `index > p`.
    pub fn nth(prime: Prime, index: usize) -> Option<Observable> {
        let p = prime.get() as usize;
        if index > p {
            return None;
        }
        let (ka, kb) = if index == 0 {
            (Fp::one(prime), Fp::zero(prime))
        } else {
            (Fp::new((index - 1) as u32, prime), Fp::one(prime))
        };
        Some(Observable { index, coeff_a: ka, coeff_b: kb })
    }

    /// Number of observables in the canonical family.
    #[inline]
    pub fn count(prime: Prime) -> usize {
        prime.get() as usize + 1
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.index
    }

    #[inline]
    pub fn coefficients(&self) -> (Fp, Fp) {
        (self.coeff_a, self.coeff_b)
    }

    /// Evaluates the linear form at an ontic state.
    #[inline]
    pub fn eval(&self, x_a: Fp, x_b: Fp) -> Fp {
        self.coeff_a * x_a + self.coeff_b * x_b
    }

    /// All ontic states (x_a, x_b) where the observable takes value `v`.
    ///
    /// Each level set has exactly p elements and the p level sets of one
    /// observable partition the p^2 ontic states.
    pub fn level_set(&self, v: Fp) -> Vec<(Fp, Fp)> {
        let prime = self.coeff_a.prime();
        let p = prime.get();
        let mut out = Vec::with_capacity(p as usize);
        for a in 0..p {
            for b in 0..p {
                let xa = Fp::new(a, prime);
                let xb = Fp::new(b, prime);
                if self.eval(xa, xb) == v {
                    out.push((xa, xb));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn family_has_p_plus_one_members() {
        for p in [2u32, 3, 5, 7] {
            let pr = prime(p);
            assert_eq!(Observable::all(pr).len(), p as usize + 1);
            assert_eq!(Observable::count(pr), p as usize + 1);
        }
    }

    #[test]
    fn canonical_coefficients() {
        let pr = prime(5);
        let obs = Observable::all(pr);
        assert_eq!(obs[0].coefficients(), (Fp::new(1, pr), Fp::new(0, pr)));
        // Index k + 1 carries coefficients (k, 1).
        for k in 0..5 {
            assert_eq!(
                obs[k + 1].coefficients(),
                (Fp::new(k as u32, pr), Fp::new(1, pr))
            );
        }
    }

    #[test]
    fn nth_rejects_out_of_range() {
        let pr = prime(3);
        assert!(Observable::nth(pr, 3).is_some());
        assert!(Observable::nth(pr, 4).is_none());
    }

    #[test]
    fn eval_example_p3() {
        let pr = prime(3);
        let x2 = Observable::nth(pr, 2).unwrap();
        assert_eq!(x2.coefficients(), (Fp::new(1, pr), Fp::new(1, pr)));
        assert_eq!(x2.eval(Fp::new(2, pr), Fp::new(1, pr)), Fp::new(0, pr));
    }

    #[test]
    fn level_sets_partition() {
        for p in [2u32, 3, 5] {
            let pr = prime(p);
            for obs in Observable::all(pr) {
                let mut total = 0;
                for v in 0..p {
                    let set = obs.level_set(Fp::new(v, pr));
                    assert_eq!(set.len(), p as usize, "p={p} obs={}", obs.index());
                    total += set.len();
                }
                assert_eq!(total, pr.ontic_count());
            }
        }
    }

    #[test]
    fn distinct_members_intersect_in_one_point() {
        // Non-proportional linear forms pin down the ontic state uniquely,
        // which is the unbiasedness property of the family.
        for p in [2u32, 3, 5, 7] {
            let pr = prime(p);
            let obs = Observable::all(pr);
            for i in 0..obs.len() {
                for j in (i + 1)..obs.len() {
                    for vi in 0..p {
                        for vj in 0..p {
                            let si = obs[i].level_set(Fp::new(vi, pr));
                            let common = si
                                .iter()
                                .filter(|&&(a, b)| obs[j].eval(a, b) == Fp::new(vj, pr))
                                .count();
                            assert_eq!(common, 1, "p={p} pair ({i},{j})");
                        }
                    }
                }
            }
        }
    }
}
