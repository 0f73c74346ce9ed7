//! A small box-constrained Nelder-Mead simplex minimizer.
//!
//! Standard reflect/expand/contract/shrink coefficients (1, 2, 0.5, 0.5),
//! with every trial point clamped into the search box. Deterministic for a
//! given start point, which keeps optimizer runs reproducible.

use alloc::vec::Vec;

fn clamp_into(x: &mut [f64], lo: f64, hi: f64) {
    for v in x.iter_mut() {
        *v = v.clamp(lo, hi);
    }
}

fn diameter(points: &[Vec<f64>]) -> f64 {
    let best = &points[0];
    let mut d = 0.0_f64;
    for p in &points[1..] {
        let mut dist2 = 0.0;
        for (a, b) in p.iter().zip(best) {
            dist2 += (a - b) * (a - b);
        }
        d = d.max(libm::sqrt(dist2));
    }
    d
}

/// Minimizes `f` over the box `[lo, hi]^n` starting from `start`, returning
/// the best point and value found.
pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    step: f64,
    lo: f64,
    hi: f64,
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = start.to_vec();
    clamp_into(&mut start, lo, hi);
    pts.push(start.clone());
    for i in 0..n {
        let mut p = start.clone();
        // Step toward the interior if the vertex would leave the box.
        p[i] = if p[i] + step <= hi { p[i] + step } else { p[i] - step };
        clamp_into(&mut p, lo, hi);
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();

    for _ in 0..max_iter {
        // Order ascending by value.
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let pts_sorted: Vec<Vec<f64>> = order.iter().map(|&i| pts[i].clone()).collect();
        let vals_sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
        pts = pts_sorted;
        vals = vals_sorted;

        if diameter(&pts) <= tol {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = alloc::vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }

        let worst = pts[n].clone();
        let trial = |coef: f64, f: &mut F| -> (Vec<f64>, f64) {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            clamp_into(&mut p, lo, hi);
            let v = f(&p);
            (p, v)
        };

        let (refl, refl_v) = trial(1.0, &mut f);
        if refl_v < vals[0] {
            let (exp, exp_v) = trial(2.0, &mut f);
            if exp_v < refl_v {
                pts[n] = exp;
                vals[n] = exp_v;
            } else {
                pts[n] = refl;
                vals[n] = refl_v;
            }
        } else if refl_v < vals[n - 1] {
            pts[n] = refl;
            vals[n] = refl_v;
        } else {
            let (con, con_v) = if refl_v < vals[n] {
                trial(0.5, &mut f)
            } else {
                trial(-0.5, &mut f)
            };
            if con_v < vals[n].min(refl_v) {
                pts[n] = con;
                vals[n] = con_v;
            } else {
                // Shrink toward the best vertex.
                let best = pts[0].clone();
                for i in 1..=n {
                    for (x, b) in pts[i].iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (pts[best].clone(), vals[best])
}
