//! Plain-text rendering of a state's weights on the ontic grid.
//!
//! Columns are x_a ascending left to right; rows are x_b descending, so
//! the origin sits at the lower left. Each cell shows one glyph:
//!
//! - `#` weight 1 (sharp)
//! - `o` weight 1/p (the canonical pure level)
//! - `+` any other positive weight
//! - `.` zero
//! - `*` negative weight (extended states only)

use epitoy_core::{ontic_index, EpistemicDist};
use std::fmt::Write as _;

const GLYPH_TOL: f64 = 1e-9;

fn glyph(w: f64, p: u32) -> char {
    if w < -1e-12 {
        '*'
    } else if w.abs() <= 1e-12 {
        '.'
    } else if (w - 1.0).abs() <= GLYPH_TOL {
        '#'
    } else if (w - 1.0 / p as f64).abs() <= GLYPH_TOL {
        'o'
    } else {
        '+'
    }
}

pub fn render_dist(d: &EpistemicDist) -> String {
    let p = d.prime().get();
    let mut out = String::new();
    let _ = writeln!(out, "p = {}, mode = {}", p, d.mode());
    for x_b in (0..p).rev() {
        let _ = write!(out, "x_b={x_b} |");
        for x_a in 0..p {
            let w = d.weights()[ontic_index(d.prime(), x_a, x_b)];
            let _ = write!(out, " {}", glyph(w, p));
        }
        out.push('\n');
    }
    let _ = write!(out, "      +");
    for _ in 0..p {
        out.push_str("--");
    }
    out.push('\n');
    let _ = write!(out, "       ");
    for x_a in 0..p {
        let _ = write!(out, " {x_a}");
    }
    out.push_str("  x_a\n");
    out.push_str("legend: '#' 1, 'o' 1/p, '+' other positive, '.' zero, '*' negative\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use epitoy_core::{Mode, Prime};

    #[test]
    fn renders_worked_example() {
        let p2 = Prime::new(2).unwrap();
        let d = EpistemicDist::new(
            p2,
            Mode::Standard,
            vec![0.0, 0.1, 0.1, 0.8],
        )
        .unwrap();
        let expect = "\
p = 2, mode = standard
x_b=1 | + +
x_b=0 | . +
      +----
        0 1  x_a
legend: '#' 1, 'o' 1/p, '+' other positive, '.' zero, '*' negative
";
        assert_eq!(render_dist(&d), expect);
    }

    #[test]
    fn renders_canonical_pure_with_level_glyphs() {
        let p2 = Prime::new(2).unwrap();
        let d = EpistemicDist::canonical_pure(p2, 0, 1).unwrap();
        // X_a = 1 pins the right column at the 1/2 level.
        let expect = "\
p = 2, mode = standard
x_b=1 | . o
x_b=0 | . o
      +----
        0 1  x_a
legend: '#' 1, 'o' 1/p, '+' other positive, '.' zero, '*' negative
";
        assert_eq!(render_dist(&d), expect);
    }

    #[test]
    fn renders_negative_weight_cells() {
        let p2 = Prime::new(2).unwrap();
        let d = EpistemicDist::new(
            p2,
            Mode::Extended,
            vec![-0.3, 0.5, 0.4, 0.4],
        )
        .unwrap();
        let text = render_dist(&d);
        assert!(text.contains("x_b=0 | * +"));
    }

    #[test]
    fn renders_p3_grid_shape() {
        let p3 = Prime::new(3).unwrap();
        let d = EpistemicDist::maximally_mixed(p3);
        let text = render_dist(&d);
        assert!(text.contains("x_b=2 | + + +"));
        assert!(text.contains("        0 1 2  x_a"));
    }
}
