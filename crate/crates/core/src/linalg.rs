//! Dense linear solves at working precision, plus an exact rational solver
//! for the small sliding-fit systems.
//!
//! The float solver is rank-revealing: a column whose best remaining pivot is
//! below the tolerance leaves its unknown at zero and moves on. Approximant
//! construction needs this because an oversized approximant to an exactly
//! holonomic series produces a consistent but rank-deficient system; the
//! minimal solution padded with zeros is the useful answer, and the residual
//! check afterwards decides whether the fit is genuine.

use rug::{Complete, Float, Rational};

/// Solves `A x = y` (row-major `a`, `rows x cols`) in place at precision
/// `prec`. Returns `(x, relative_residual)`.
pub fn solve_rank_revealing(
    a: &[Vec<Float>],
    y: &[Float],
    prec: u32,
) -> (Vec<Float>, Float) {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let mut m: Vec<Vec<Float>> = a.to_vec();
    let mut b: Vec<Float> = y.to_vec();
    let mut x = vec![Float::new(prec); cols];

    let mut scale = Float::new(prec);
    for row in &m {
        for v in row {
            let av = v.clone().abs();
            if av > scale {
                scale = av;
            }
        }
    }
    if scale == 0 {
        scale = Float::with_val(prec, 1);
    }
    let tol = Float::with_val(prec, &scale) * Float::with_val(prec, 2f64).pow_f64_local(-((prec / 2) as f64));

    let mut row_used = vec![false; rows];
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];

    for col in 0..cols {
        // best remaining pivot in this column
        let mut best: Option<(usize, Float)> = None;
        for (i, used) in row_used.iter().enumerate() {
            if *used {
                continue;
            }
            let v = m[i][col].clone().abs();
            if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
                best = Some((i, v));
            }
        }
        let (pi, pv) = match best {
            Some(t) => t,
            None => continue,
        };
        if pv < tol {
            continue; // free variable stays zero
        }
        row_used[pi] = true;
        pivot_of_col[col] = Some(pi);
        let piv = m[pi][col].clone();
        for i in 0..rows {
            if i == pi {
                continue;
            }
            if m[i][col] == 0 {
                continue;
            }
            let f = Float::with_val(prec, &m[i][col] / &piv);
            for j in col..cols {
                let delta = Float::with_val(prec, &f * &m[pi][j]);
                m[i][j] -= delta;
            }
            let delta = Float::with_val(prec, &f * &b[pi]);
            b[i] -= delta;
        }
    }
    for (col, piv) in pivot_of_col.iter().enumerate() {
        if let Some(pi) = piv {
            x[col] = Float::with_val(prec, &b[*pi] / &m[*pi][col]);
        }
    }
    // residual against the original system
    let mut res = Float::new(prec);
    for i in 0..rows {
        let mut s = Float::with_val(prec, -&y[i]);
        for j in 0..cols {
            if x[j] != 0 && a[i][j] != 0 {
                s += Float::with_val(prec, &a[i][j] * &x[j]);
            }
        }
        let s = s.abs();
        if s > res {
            res = s;
        }
    }
    (x, res / scale)
}

trait PowF64Local {
    fn pow_f64_local(self, e: f64) -> Float;
}

impl PowF64Local for Float {
    fn pow_f64_local(self, e: f64) -> Float {
        use rug::ops::Pow;
        let ef = Float::with_val(self.prec(), e);
        self.pow(ef)
    }
}

/// Exact solve of a small square rational system by Gaussian elimination with
/// partial (largest-numerator-heuristic) pivoting. Returns `None` if singular.
pub fn solve_exact(a: &[Vec<Rational>], y: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut b: Vec<Rational> = y.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let piv_row = (col..n).find(|&r| m[perm[r]][col] != 0)?;
        perm.swap(col, piv_row);
        let p = perm[col];
        let piv = m[p][col].clone();
        for r in col + 1..n {
            let i = perm[r];
            if m[i][col] == 0 {
                continue;
            }
            let f = (&m[i][col] / &piv).complete();
            for j in col..n {
                let d = (&f * &m[p][j]).complete();
                m[i][j] -= d;
            }
            let d = (&f * &b[p]).complete();
            b[i] -= d;
        }
    }
    let mut x = vec![Rational::new(); n];
    for col in (0..n).rev() {
        let p = perm[col];
        let mut s = b[p].clone();
        for j in col + 1..n {
            s -= (&m[p][j] * &x[j]).complete();
        }
        x[col] = s / m[p][col].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Float {
        Float::with_val(256, x)
    }

    #[test]
    fn solves_regular_system() {
        let a = vec![vec![f(2.0), f(1.0)], vec![f(1.0), f(3.0)]];
        let y = vec![f(5.0), f(10.0)];
        let (x, res) = solve_rank_revealing(&a, &y, 256);
        assert!((x[0].to_f64() - 1.0).abs() < 1e-70);
        assert!((x[1].to_f64() - 3.0).abs() < 1e-70);
        assert!(res.to_f64() < 1e-70);
    }

    #[test]
    fn rank_deficient_consistent_system() {
        // x + y = 2 duplicated: solution with free variable zeroed
        let a = vec![vec![f(1.0), f(1.0)], vec![f(2.0), f(2.0)]];
        let y = vec![f(2.0), f(4.0)];
        let (x, res) = solve_rank_revealing(&a, &y, 256);
        assert!(res.to_f64() < 1e-60);
        let s = x[0].to_f64() + x[1].to_f64();
        assert!((s - 2.0).abs() < 1e-60);
    }

    #[test]
    fn inconsistent_system_reports_residual() {
        let a = vec![vec![f(1.0), f(1.0)], vec![f(1.0), f(1.0)]];
        let y = vec![f(2.0), f(5.0)];
        let (_, res) = solve_rank_revealing(&a, &y, 256);
        assert!(res.to_f64() > 0.1);
    }

    #[test]
    fn exact_solver_small_system() {
        let r = |p: i64, q: i64| Rational::from((p, q));
        let a = vec![
            vec![r(1, 1), r(1, 2)],
            vec![r(1, 3), r(1, 4)],
        ];
        let y = vec![r(5, 2), r(13, 12)];
        let x = solve_exact(&a, &y).unwrap();
        assert_eq!(x[0], r(1, 1));
        assert_eq!(x[1], r(3, 1));
    }

    #[test]
    fn exact_solver_detects_singular() {
        let r = |p: i64| Rational::from(p);
        let a = vec![vec![r(1), r(2)], vec![r(2), r(4)]];
        let y = vec![r(1), r(2)];
        assert!(solve_exact(&a, &y).is_none());
    }
}
