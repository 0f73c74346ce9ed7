//! Constrained maximization of the CHSH value over pure side-2 states.
//!
//! The searched objects are p = 2 fiducial sets described by their three
//! free slots (Q_0(1), Q_1(1), Q_2(0)). A state in the S role contributes
//! the wing E(A,S) + E(B,S) = 2 (P(1,1) - P(0,0)) and a state in the
//! S-prime role contributes E(A,S') - E(B,S') = 2 (P(1,0) - P(0,1)); the
//! two wings decouple, so the CHSH maximum is the sum of two independent
//! one-state maximizations under the purity constraint M_r = 1/2.
//!
//! Search strategy, per wing:
//!
//! - canonical pure states as an always-feasible floor (CHSH 2);
//! - a deterministic family search over epistemic weight vectors
//!   (d, t, t, m) with the off-diagonal pair tied, which carries the
//!   analytic optimum in both modes and stays numerically exact for the
//!   spiky states that dominate as r -> -1 (their fiducial slots round to
//!   1 while their weights remain representable);
//! - for the nonnegative mode, the slot-grid plus Nelder-Mead refinement
//!   over the two objective-bearing slots with the third slot eliminated
//!   through the purity constraint, as an independent cross-check that also
//!   probes asymmetric candidates.
//!
//! The extended mode admits negative weights (odd integer orders only) and
//! demands that the complement state be pure as well, since the complement
//! is the measurement's other outcome state; with both constraints active
//! the feasible set is one-dimensional and the family search traces it
//! directly.

use alloc::vec::Vec;
use core::fmt;

use rand_core::{RngCore, SeedableRng};

use crate::field::Prime;
use crate::measure::{is_odd_positive_integer, measure_weights};
use crate::simplex;
use crate::state::{EpistemicDist, FiducialSet, Mode, StateError, CLAMP_TOL};

/// Residual tolerance |M_r - 1/2| accepted for a solved constraint.
pub const ROOT_TOL: f64 = 1e-10;
/// Weights above this (slightly negative) threshold count as nonnegative.
/// Matches the state layer's round-off clamp, so a "nonnegative" root is
/// exactly one the standard-mode constructor accepts; anything more
/// negative is a genuinely extended state and must not leak into the
/// nonnegative search (its wing advantage, though tiny, is real).
pub const NONNEG_TOL: f64 = CLAMP_TOL;
/// Looser residual tolerance for roots pinned to a domain edge, where the
/// residual inherits the constraint-solver tolerance of both sides.
const BOUNDARY_TOL: f64 = 1e-9;
/// A candidate must beat the incumbent by this much to replace it, so that
/// solver-tolerance noise cannot displace an exact analytic optimum.
const FOLD_EPS: f64 = 1e-9;
/// Number of scan intervals used when rooting a single slot.
const SCAN_N: usize = 64;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Search mode: classical nonnegative states, or extended states whose
/// weights may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMode {
    NonNegative,
    Extended,
}

impl fmt::Display for OptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptMode::NonNegative => write!(f, "nonneg"),
            OptMode::Extended => write!(f, "extended"),
        }
    }
}

/// Errors from the constrained solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum OptError {
    /// Order outside the open domain r > -1.
    InvalidOrder { r: f64 },
    /// Extended-mode searches need an odd positive integer order.
    ExtendedOrder { r: f64 },
    /// No constrained root exists for the given free slots.
    NoRoot,
    /// A free slot value lies outside [0, 1].
    SlotOutOfRange { value: f64 },
    /// The solve-slot index is not 0, 1, or 2.
    BadSlotIndex { index: usize },
    State(StateError),
}

impl fmt::Display for OptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptError::InvalidOrder { r } => write!(
                f,
                "order r = {r} is outside the search domain r > -1; the maximum \
                 approaches 4 as r -> -1+ (every correlator saturates) and 2 as \
                 r -> infinity (only canonical states remain pure)"
            ),
            OptError::ExtendedOrder { r } => write!(
                f,
                "extended-mode search requires an odd positive integer order so that \
                 negative weights stay measurable, got r = {r}"
            ),
            OptError::NoRoot => {
                write!(f, "no constrained root in [0, 1] for the given free slots")
            }
            OptError::SlotOutOfRange { value } => {
                write!(f, "free slot value {value} lies outside [0, 1]")
            }
            OptError::BadSlotIndex { index } => {
                write!(f, "solve-slot index {index} is not one of 0, 1, 2")
            }
            OptError::State(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for OptError {}

impl From<StateError> for OptError {
    fn from(e: StateError) -> Self {
        OptError::State(e)
    }
}

/// Reproducibility and effort knobs for [`max_chsh`] and [`sweep_r`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Seed for the simplex restart jitter.
    pub seed: u64,
    /// Jittered simplex restarts per grid seed.
    pub restarts: usize,
    /// Grid points per slot axis.
    pub grid: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { seed: 1, restarts: 4, grid: 21 }
    }
}

/// One root of the single-slot purity constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstrainedRoot {
    /// Full slot triple (Q_0(1), Q_1(1), Q_2(0)) including the solved slot.
    pub slots: [f64; 3],
    /// Whether the induced epistemic weights are all nonnegative.
    pub nonneg: bool,
}

/// The search result at one order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub r: f64,
    pub mode: OptMode,
    pub b_max: f64,
    /// Argmax state for the S role, fiducial form.
    pub argmax_s: FiducialSet,
    /// Argmax state for the S-prime role, fiducial form.
    pub argmax_sprime: FiducialSet,
    /// Argmax state for the S role, epistemic form. Near r = -1 the
    /// fiducial slots of the optimum round to 0 or 1 while the weights stay
    /// meaningful, so the weight form is the authoritative one.
    pub argmax_s_dist: EpistemicDist,
    /// Argmax state for the S-prime role, epistemic form.
    pub argmax_sprime_dist: EpistemicDist,
}

/// Epistemic weights [(0,0), (0,1), (1,0), (1,1)] from the slot triple.
fn p_from_slots(slots: [f64; 3]) -> [f64; 4] {
    let [a, b, c] = slots;
    [
        (1.0 - a - b + c) / 2.0,
        (1.0 - a + b - c) / 2.0,
        (1.0 + a - b - c) / 2.0,
        (-1.0 + a + b + c) / 2.0,
    ]
}

fn slots_from_p4(p4: [f64; 4]) -> [f64; 3] {
    [p4[2] + p4[3], p4[1] + p4[3], p4[0] + p4[3]]
}

fn complement4(p4: [f64; 4]) -> [f64; 4] {
    [0.5 - p4[0], 0.5 - p4[1], 0.5 - p4[2], 0.5 - p4[3]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    S,
    SPrime,
}

const ROLES: [Role; 2] = [Role::S, Role::SPrime];

fn wing_of(role: Role, p4: [f64; 4]) -> f64 {
    match role {
        Role::S => 2.0 * (p4[3] - p4[0]),
        Role::SPrime => 2.0 * (p4[2] - p4[1]),
    }
}

/// Places the family weights (small d, tied pair t, large m) so that the
/// role's wing equals 2 (m - d).
fn family_p4(role: Role, d: f64, t: f64) -> [f64; 4] {
    let m = 1.0 - 2.0 * t - d;
    match role {
        Role::S => [d, t, t, m],
        Role::SPrime => [t, d, m, t],
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    wing: f64,
    p4: [f64; 4],
}

fn fold_best(best: &mut Option<Candidate>, cand: Candidate) {
    if !cand.wing.is_finite() {
        return;
    }
    match best {
        Some(b) if cand.wing <= b.wing + FOLD_EPS => {}
        _ => *best = Some(cand),
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection for a decreasing function with f(lo) >= 0 >= f(hi).
fn bisect_decreasing<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol_f: f64,
    max_iter: usize,
) -> f64 {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v.abs() <= tol_f {
            break;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// Measure of a raw four-entry weight vector; NaN when undefined.
fn measure4(p4: [f64; 4], r: f64) -> f64 {
    measure_weights(&p4, r).unwrap_or(f64::NAN)
}

fn assemble(free: [f64; 2], solve_slot: usize, q: f64) -> [f64; 3] {
    match solve_slot {
        0 => [q, free[0], free[1]],
        1 => [free[0], q, free[1]],
        _ => [free[0], free[1], q],
    }
}

/// All roots of |M_r - 1/2| = 0 along one slot coordinate: scan, bracket
/// bisection, and a golden-section pass that picks up tangent roots where
/// the residual touches zero without changing sign.
fn slot_roots(free: [f64; 2], solve_slot: usize, r: f64) -> Vec<ConstrainedRoot> {
    let resid = |q: f64| -> f64 { measure4(p_from_slots(assemble(free, solve_slot, q)), r) - 0.5 };
    let qs: Vec<f64> = (0..=SCAN_N).map(|k| k as f64 / SCAN_N as f64).collect();
    let fs: Vec<f64> = qs.iter().map(|&q| resid(q)).collect();

    let mut roots: Vec<f64> = Vec::new();
    for (k, &fv) in fs.iter().enumerate() {
        if fv.is_finite() && fv.abs() <= ROOT_TOL {
            roots.push(qs[k]);
        }
    }
    for k in 0..SCAN_N {
        let (fa, fb) = (fs[k], fs[k + 1]);
        if !fa.is_finite() || !fb.is_finite() || fa.abs() <= ROOT_TOL || fb.abs() <= ROOT_TOL {
            continue;
        }
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (qs[k], qs[k + 1], fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = resid(mid);
                if fm.abs() <= ROOT_TOL {
                    lo = mid;
                    break;
                }
                if (fm > 0.0) == (flo > 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(lo);
        }
    }
    // Domain-boundary roots: where the residual's defined region (all
    // weights measurable) ends, the optimum often sits exactly on the edge.
    // Bisect the edge on definedness; accept it as a root when the residual
    // vanishes there, otherwise root any sign change between the edge and
    // the defined scan neighbor.
    for k in 0..SCAN_N {
        let (fa, fb) = (fs[k], fs[k + 1]);
        if fa.is_finite() == fb.is_finite() {
            continue;
        }
        let mut lo = qs[k];
        let mut hi = qs[k + 1];
        let (mut q_def, mut f_def) = if fa.is_finite() { (lo, fa) } else { (hi, fb) };
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = resid(mid);
            if fm.is_finite() {
                q_def = mid;
                f_def = fm;
            }
            if fm.is_finite() == fa.is_finite() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if f_def.abs() <= BOUNDARY_TOL {
            roots.push(q_def);
            continue;
        }
        // The stretch between the edge and the defined neighbor is fully
        // inside the defined region (it is an interval), so a plain
        // bisection applies when the residual changes sign across it.
        let (f_nb, q_nb) = if fa.is_finite() { (fa, qs[k]) } else { (fb, qs[k + 1]) };
        if f_nb.abs() > ROOT_TOL && f_def * f_nb < 0.0 {
            let (mut a, mut b) = (q_nb.min(q_def), q_nb.max(q_def));
            let mut fva = resid(a);
            if !fva.is_finite() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = resid(mid);
                if !fm.is_finite() {
                    break;
                }
                if fm.abs() <= ROOT_TOL {
                    a = mid;
                    break;
                }
                if (fm > 0.0) == (fva > 0.0) {
                    a = mid;
                    fva = fm;
                } else {
                    b = mid;
                }
            }
            roots.push(a);
        }
    }

    // Tangent roots: local minima of the defined residual magnitude.
    for k in 1..SCAN_N {
        let (fa, fb, fc) = (fs[k - 1], fs[k], fs[k + 1]);
        if !(fa.is_finite() && fb.is_finite() && fc.is_finite()) {
            continue;
        }
        if fb.abs() > ROOT_TOL && fb.abs() < fa.abs() && fb.abs() <= fc.abs() {
            let (q, fq) = golden_min(
                |q| {
                    let v = resid(q);
                    if v.is_finite() {
                        v.abs()
                    } else {
                        f64::INFINITY
                    }
                },
                qs[k - 1],
                qs[k + 1],
                90,
            );
            if fq <= ROOT_TOL {
                roots.push(q);
            }
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-8);
    roots
        .into_iter()
        .map(|q| {
            let slots = assemble(free, solve_slot, q);
            let nonneg = p_from_slots(slots).iter().all(|&x| x >= -NONNEG_TOL);
            ConstrainedRoot { slots, nonneg }
        })
        .collect()
}

/// Solves the purity constraint M_r = 1/2 for one fiducial slot, holding
/// the other two fixed. Returns every root in [0, 1] in ascending order;
/// free-slot combinations admitting none report [`OptError::NoRoot`].
pub fn solve_constrained_q(
    free: [f64; 2],
    solve_slot: usize,
    r: f64,
) -> Result<Vec<ConstrainedRoot>, OptError> {
    if solve_slot > 2 {
        return Err(OptError::BadSlotIndex { index: solve_slot });
    }
    for &v in &free {
        if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
            return Err(OptError::SlotOutOfRange { value: v });
        }
    }
    if !r.is_finite() || r <= -1.0 {
        return Err(OptError::InvalidOrder { r });
    }
    let free = [free[0].clamp(0.0, 1.0), free[1].clamp(0.0, 1.0)];
    let roots = slot_roots(free, solve_slot, r);
    if roots.is_empty() {
        return Err(OptError::NoRoot);
    }
    Ok(roots)
}

/// The combined t grid for the family search: linear coverage of the tame
/// region plus logarithmic coverage down to the smallest normal weights,
/// which the r -> -1 optima require.
fn family_t_grid() -> Vec<f64> {
    let mut ts: Vec<f64> = (1..200).map(|k| k as f64 * 0.0025).collect();
    for k in 1..=600 {
        let t = libm::pow(10.0, -0.5 * k as f64);
        if t < 0.4975 {
            ts.push(t);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Family search for the nonnegative mode: weights (d, t, t, m) with
/// 0 <= d, solved from M_r = 1/2 at each t. Returns (wing objective m - d,
/// d, t) candidates including the d = 0 face root and a golden-section
/// refinement around the best grid point.
fn family_nonneg(r: f64) -> Vec<(f64, f64, f64)> {
    let eval_t = |t: f64| -> Option<(f64, f64)> {
        if t <= 0.0 || t >= 0.5 {
            return None;
        }
        let bal = 0.5 * (1.0 - 2.0 * t);
        if bal <= 0.0 {
            return None;
        }
        let f = |d: f64| measure4([d, t, t, 1.0 - 2.0 * t - d], r) - 0.5;
        if f(0.0) < -1e-12 || f(bal) > 1e-12 {
            return None;
        }
        let d = bisect_decreasing(f, 0.0, bal, 1e-11, 800);
        Some((1.0 - 2.0 * t - 2.0 * d, d))
    };

    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    let ts = family_t_grid();
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, &t) in ts.iter().enumerate() {
        if let Some((obj, d)) = eval_t(t) {
            out.push((obj, d, t));
            if best.map_or(true, |(_, bobj, _)| obj > bobj) {
                best = Some((i, obj, d));
            }
        }
    }

    // The d = 0 face carries the exact optimum for r >= 0; root it directly.
    let face = |t: f64| measure4([0.0, t, t, 1.0 - 2.0 * t], r) - 0.5;
    if face(1e-12) > 0.0 && face(0.5 - 1e-12) < 0.0 {
        let t = bisect_decreasing(face, 1e-12, 0.5 - 1e-12, 1e-12, 800);
        out.push((1.0 - 2.0 * t, 0.0, t));
    }

    if let Some((i, _, _)) = best {
        let lo = if i > 0 { ts[i - 1] } else { ts[i] * 0.5 };
        let hi = if i + 1 < ts.len() { ts[i + 1] } else { 0.5 - 1e-12 };
        let (t, neg_obj) = golden_min(
            |t| eval_t(t).map_or(1e9, |(obj, _)| -obj),
            lo,
            hi,
            120,
        );
        if neg_obj < 1e8 {
            if let Some((obj, d)) = eval_t(t) {
                out.push((obj, d, t));
            }
        }
    }
    out
}

/// Family search for the extended mode at odd integer order: weights
/// (d, t, t, m) with d in [-t, balance] solved from M_r = 1/2, then the
/// complement-purity residual rooted over t. A residual that vanishes along
/// the whole curve (it does at r = 1) makes every point feasible, and the
/// objective is maximized along the curve instead.
fn family_extended(r: f64) -> Option<(f64, f64, f64)> {
    let delta_solve = |t: f64| -> Option<f64> {
        if t <= 0.0 || t >= 0.5 {
            return None;
        }
        let bal = 0.5 * (1.0 - 2.0 * t);
        let f = |d: f64| measure4([d, t, t, 1.0 - 2.0 * t - d], r) - 0.5;
        if f(-t) < -1e-12 || f(bal) > 1e-12 {
            return None;
        }
        Some(bisect_decreasing(f, -t, bal, 1e-11, 800))
    };
    let g_of = |t: f64| -> Option<(f64, f64)> {
        let d = delta_solve(t)?;
        let g = measure4(complement4(family_p4(Role::S, d, t)), r) - 0.5;
        Some((g, d))
    };

    let ts: Vec<f64> = (1..500).map(|k| k as f64 * 0.001).collect();
    let gs: Vec<Option<(f64, f64)>> = ts.iter().map(|&t| g_of(t)).collect();

    let mut feasible: Vec<(f64, f64)> = Vec::new(); // (t, d)
    let mut direct = 0usize;
    let mut defined = 0usize;
    for (i, entry) in gs.iter().enumerate() {
        if let Some((g, d)) = entry {
            defined += 1;
            if g.abs() <= 1e-9 {
                feasible.push((ts[i], *d));
                direct += 1;
            }
        }
    }

    // Transversal roots of the complement residual.
    for i in 0..ts.len() - 1 {
        let (Some((ga, _)), Some((gb, _))) = (gs[i], gs[i + 1]) else { continue };
        if ga.abs() <= 1e-9 || gb.abs() <= 1e-9 || ga * gb >= 0.0 {
            continue;
        }
        let (mut lo, mut hi, mut glo) = (ts[i], ts[i + 1], ga);
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let Some((gm, _)) = g_of(mid) else { break };
            if gm.abs() <= 1e-10 {
                lo = mid;
                break;
            }
            if (gm > 0.0) == (glo > 0.0) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        if let Some((g, d)) = g_of(lo) {
            if g.abs() <= 1e-9 {
                feasible.push((lo, d));
            }
        }
    }

    // Tangent contacts of the complement residual.
    for i in 1..ts.len() - 1 {
        let (Some((ga, _)), Some((gb, _)), Some((gc, _))) = (gs[i - 1], gs[i], gs[i + 1])
        else {
            continue;
        };
        if gb.abs() > 1e-9 && gb.abs() < ga.abs() && gb.abs() <= gc.abs() {
            let (t, gq) = golden_min(
                |t| g_of(t).map_or(f64::INFINITY, |(g, _)| g.abs()),
                ts[i - 1],
                ts[i + 1],
                90,
            );
            if gq <= 1e-9 {
                if let Some((_, d)) = g_of(t) {
                    feasible.push((t, d));
                }
            }
        }
    }

    // Degenerate curve: the complement constraint holds everywhere, so
    // maximize the objective along the curve.
    if direct >= 3 && direct * 2 >= defined {
        let (t, neg_obj) = golden_min(
            |t| match g_of(t) {
                Some((g, d)) if g.abs() <= 1e-6 => -(1.0 - 2.0 * t - 2.0 * d),
                _ => 1e9,
            },
            ts[0],
            ts[ts.len() - 1],
            150,
        );
        if neg_obj < 1e8 {
            if let Some((g, d)) = g_of(t) {
                if g.abs() <= 1e-9 {
                    feasible.push((t, d));
                }
            }
        }
    }

    feasible
        .into_iter()
        .map(|(t, d)| (1.0 - 2.0 * t - 2.0 * d, d, t))
        .max_by(|a, b| a.0.total_cmp(&b.0))
}

/// Best nonnegative-feasible candidate at fixed objective slots (a, b),
/// with the purity slot solved.
fn grid_candidate(role: Role, a: f64, b: f64, r: f64) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for root in slot_roots([a, b], 2, r) {
        if !root.nonneg {
            continue;
        }
        let p4 = p_from_slots(root.slots);
        fold_best(&mut best, Candidate { wing: wing_of(role, p4), p4 });
    }
    best
}

/// Slot-grid search with Nelder-Mead refinement for the nonnegative mode.
fn grid_nm(role: Role, r: f64, opts: &SearchOptions) -> Option<Candidate> {
    let n = opts.grid.max(5);
    let axis: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();

    let mut seeds: Vec<(f64, f64, f64)> = Vec::new(); // (wing, a, b)
    let mut best: Option<Candidate> = None;
    for &a in &axis {
        for &b in &axis {
            if let Some(c) = grid_candidate(role, a, b, r) {
                fold_best(&mut best, c);
                seeds.push((c.wing, a, b));
            }
        }
    }
    seeds.sort_by(|x, y| y.0.total_cmp(&x.0));
    seeds.truncate(8);

    let step = 1.0 / (n - 1) as f64;
    let role_tag = match role {
        Role::S => 0u64,
        Role::SPrime => 1u64,
    };
    for (si, &(_, a, b)) in seeds.iter().enumerate() {
        for restart in 0..=opts.restarts {
            let mut start = [a, b];
            if restart > 0 {
                let stream = opts
                    .seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    ^ (role_tag << 40)
                    ^ ((si as u64) << 20)
                    ^ restart as u64;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(stream);
                for s in &mut start {
                    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                    *s = (*s + (2.0 * u - 1.0) * step).clamp(0.0, 1.0);
                }
            }
            let (x, v) = simplex::minimize(
                |p| grid_candidate(role, p[0], p[1], r).map_or(1e6, |c| -c.wing),
                &start,
                step,
                0.0,
                1.0,
                400,
                1e-10,
            );
            if v < 1e5 {
                if let Some(c) = grid_candidate(role, x[0], x[1], r) {
                    fold_best(&mut best, c);
                }
            }
        }
    }
    best
}

fn canonical_best(role: Role) -> Candidate {
    let p2 = Prime::new(2).expect("2 is prime");
    let mut best: Option<Candidate> = None;
    for index in 0..3 {
        for value in 0..2 {
            let d = EpistemicDist::canonical_pure(p2, index, value).expect("in range");
            let w = d.weights();
            let p4 = [w[0], w[1], w[2], w[3]];
            fold_best(&mut best, Candidate { wing: wing_of(role, p4), p4 });
        }
    }
    best.expect("canonical states exist")
}

fn build_state(p4: [f64; 4]) -> Result<(FiducialSet, EpistemicDist), OptError> {
    let p2 = Prime::new(2).expect("2 is prime");
    let mode = if p4.iter().any(|&x| x < -CLAMP_TOL) {
        Mode::Extended
    } else {
        Mode::Standard
    };
    let dist = EpistemicDist::new(p2, mode, p4.to_vec())?;
    let q = FiducialSet::from_slots(
        p2,
        slots_from_p4(p4).map(|s| s.clamp(0.0, 1.0)),
    )?;
    Ok((q, dist))
}

/// Maximizes the CHSH value at order `r` over pure side-2 states.
///
/// `NonNegative` restricts both states to classical epistemic
/// distributions; `Extended` admits negative weights (odd integer `r` only)
/// and requires each state's complement to be pure as well, so that the
/// paired measurement is well formed.
pub fn max_chsh(r: f64, mode: OptMode, opts: &SearchOptions) -> Result<SweepPoint, OptError> {
    match mode {
        OptMode::NonNegative => {
            if !r.is_finite() || r <= -1.0 {
                return Err(OptError::InvalidOrder { r });
            }
        }
        OptMode::Extended => {
            if !is_odd_positive_integer(r) {
                return Err(OptError::ExtendedOrder { r });
            }
        }
    }

    let mut best: [Option<Candidate>; 2] = [None, None];
    for (k, &role) in ROLES.iter().enumerate() {
        fold_best(&mut best[k], canonical_best(role));
    }

    match mode {
        OptMode::NonNegative => {
            for (_, d, t) in family_nonneg(r) {
                for (k, &role) in ROLES.iter().enumerate() {
                    let p4 = family_p4(role, d, t);
                    if measure4(p4, r).is_nan() {
                        continue;
                    }
                    fold_best(&mut best[k], Candidate { wing: wing_of(role, p4), p4 });
                }
            }
            for (k, &role) in ROLES.iter().enumerate() {
                if let Some(c) = grid_nm(role, r, opts) {
                    fold_best(&mut best[k], c);
                }
            }
        }
        OptMode::Extended => {
            if let Some((_, d, t)) = family_extended(r) {
                for (k, &role) in ROLES.iter().enumerate() {
                    let p4 = family_p4(role, d, t);
                    fold_best(&mut best[k], Candidate { wing: wing_of(role, p4), p4 });
                }
            }
        }
    }

    let s = best[0].expect("canonical floor present");
    let t = best[1].expect("canonical floor present");
    let (argmax_s, argmax_s_dist) = build_state(s.p4)?;
    let (argmax_sprime, argmax_sprime_dist) = build_state(t.p4)?;
    Ok(SweepPoint {
        r,
        mode,
        b_max: s.wing + t.wing,
        argmax_s,
        argmax_sprime,
        argmax_s_dist,
        argmax_sprime_dist,
    })
}

/// Runs [`max_chsh`] across a grid of orders, validating the whole grid
/// before any work so that an out-of-domain point fails fast.
pub fn sweep_r(
    grid: &[f64],
    mode: OptMode,
    opts: &SearchOptions,
) -> Result<Vec<SweepPoint>, OptError> {
    for &r in grid {
        match mode {
            OptMode::NonNegative => {
                if !r.is_finite() || r <= -1.0 {
                    return Err(OptError::InvalidOrder { r });
                }
            }
            OptMode::Extended => {
                if !is_odd_positive_integer(r) {
                    return Err(OptError::ExtendedOrder { r });
                }
            }
        }
    }
    grid.iter().map(|&r| max_chsh(r, mode, opts)).collect()
}
