//! Bulirsch-Stoer sequence extrapolation for sequences behaving like
//! `s_n ~ s_inf + c / n^w`.
//!
//! Two recursions are provided. `Rational` is the classic rational
//! extrapolation (with `T(-1, n) = 0`); it reproduces the reference tableaus
//! of the worked examples. `Polynomial` is the Richardson/Neville form that
//! eliminates the powers `n^-w, n^-2w, ...` exactly, so row K is constant to
//! working precision on a model sequence with K correction terms. The two
//! differ in rounding-level detail on real data; they are not
//! interchangeable when matching published tables.

use crate::sequence::{FloatPowF64, RealSequence};
use crate::{Error, Result};
use rug::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BstVariant {
    #[default]
    Rational,
    Polynomial,
}

/// Extrapolation tableau. Row 0 is the input sequence; row L holds the
/// depth-L extrapolants, indexed by the first sequence index they consume.
#[derive(Debug, Clone)]
pub struct BSTable {
    pub rows: Vec<RealSequence>,
    pub w: f64,
    pub n_input: usize,
    pub variant: BstVariant,
}

/// Number of trailing tableau columns inspected for smoothness. Three columns
/// is the widest window consistent with the reference tables' own
/// smooth/erratic row classification.
pub const DEFAULT_MONOTONE_WINDOW: usize = 3;

/// Builds the extrapolation tableau with exponent `w` and `depth` rows.
pub fn bst_table(s: &RealSequence, w: f64, depth: usize, variant: BstVariant) -> Result<BSTable> {
    if !(w > 0.0) {
        return Err(Error::InvalidArgument("bst exponent w must be positive".into()));
    }
    if s.defined_len() < depth + 2 {
        return Err(Error::NotEnoughPoints {
            got: s.defined_len(),
            need: depth + 2,
        });
    }
    let prec = s.precision_bits();
    let mut rows: Vec<RealSequence> = vec![s.clone()];
    for level in 1..=depth {
        let prev = &rows[level - 1];
        let prev2: Option<&RealSequence> = if level >= 2 { Some(&rows[level - 2]) } else { None };
        let start = prev.start_index();
        let mut values: Vec<Option<Float>> = Vec::new();
        for n in start..prev.last_index() {
            let entry = (|| -> Option<Float> {
                if n <= 0 {
                    return None;
                }
                let t1 = prev.get(n + 1)?;
                let t0 = prev.get(n)?;
                let d1 = Float::with_val(prec, t1 - t0);
                let step = (Float::with_val(prec, n + level as i64) / Float::with_val(prec, n))
                    .pow_f64(w);
                let denom = match variant {
                    BstVariant::Polynomial => step - 1u32,
                    BstVariant::Rational => {
                        // T(L-2, n+1) is zero below the second row
                        let below = match prev2 {
                            Some(p2) => p2.get(n + 1)?.clone(),
                            None => Float::new(prec),
                        };
                        let d2 = Float::with_val(prec, t1 - &below);
                        if d2 == 0 {
                            return None;
                        }
                        let frac = Float::with_val(prec, &d1 / &d2);
                        step * (Float::with_val(prec, 1 - frac)) - 1u32
                    }
                };
                if denom == 0 {
                    return None;
                }
                Some(Float::with_val(prec, t1 + d1 / denom))
            })();
            values.push(entry);
        }
        rows.push(RealSequence::new(values, start, prec));
    }
    Ok(BSTable {
        rows,
        w,
        n_input: s.defined_len(),
        variant,
    })
}

/// Trailing contiguous defined entries of a row (holes cut the run).
fn trailing_run(row: &RealSequence) -> Vec<Float> {
    let mut run = Vec::new();
    for n in row.start_index()..=row.last_index() {
        match row.get(n) {
            Some(v) => run.push(v.clone()),
            None => run.clear(),
        }
    }
    run
}

fn is_monotone(vals: &[Float]) -> bool {
    let up = vals.windows(2).all(|w| w[1] >= w[0]);
    let down = vals.windows(2).all(|w| w[1] <= w[0]);
    up || down
}

/// Count of leading rows whose last `window` entries are monotone; counting
/// stops at the first row that is erratic, too short, or interrupted by a
/// hole inside the window.
pub fn monotone_rows_with_window(t: &BSTable, window: usize) -> usize {
    let mut count = 0;
    for row in t.rows.iter().skip(1) {
        let run = trailing_run(row);
        if run.len() < window {
            break;
        }
        if !is_monotone(&run[run.len() - window..]) {
            break;
        }
        count += 1;
    }
    count
}

pub fn monotone_rows(t: &BSTable) -> usize {
    monotone_rows_with_window(t, DEFAULT_MONOTONE_WINDOW)
}

/// Limit estimate: the last entry of the deepest smooth row, with the spread
/// of that row's last three entries as the uncertainty.
pub fn bst_limit(t: &BSTable) -> Result<(Float, Float)> {
    bst_limit_with_window(t, DEFAULT_MONOTONE_WINDOW)
}

pub fn bst_limit_with_window(t: &BSTable, window: usize) -> Result<(Float, Float)> {
    let deepest = monotone_rows_with_window(t, window);
    if deepest == 0 {
        return Err(Error::NoMonotoneRows);
    }
    let run = trailing_run(&t.rows[deepest]);
    let value = run.last().unwrap().clone();
    let tail = &run[run.len().saturating_sub(3)..];
    let mut lo = tail[0].clone();
    let mut hi = tail[0].clone();
    for v in tail {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    let prec = value.prec();
    Ok((value, Float::with_val(prec, hi - lo)))
}

/// The tableau in the reference layout: one line per row, last `cols`
/// entries, comma-separated.
pub fn table_csv(t: &BSTable, cols: usize) -> String {
    let mut out = String::from("L");
    for c in (0..cols).rev() {
        out.push_str(&format!(",T(L{}N-L-{})", ',', c));
    }
    out.push('\n');
    for (level, row) in t.rows.iter().enumerate().skip(1) {
        let run = trailing_run(row);
        if run.is_empty() {
            continue;
        }
        out.push_str(&format!("{level}"));
        let take = run.len().min(cols);
        for _ in take..cols {
            out.push(',');
        }
        for v in &run[run.len() - take..] {
            out.push_str(&format!(",{:.8}", v.to_f64()));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_from_fn(n: usize, f: impl Fn(i64) -> f64, prec: u32) -> RealSequence {
        let vals = (1..=n as i64)
            .map(|i| Some(Float::with_val(prec, f(i))))
            .collect();
        RealSequence::new(vals, 1, prec)
    }

    fn seq_from_float_fn(n: usize, prec: u32, f: impl Fn(&Float) -> Float) -> RealSequence {
        let vals = (1..=n as i64)
            .map(|i| Some(f(&Float::with_val(prec, i))))
            .collect();
        RealSequence::new(vals, 1, prec)
    }

    #[test]
    fn polynomial_row1_exact_single_power() {
        // s_n = 3 + n^{-1/2}: row 1 constant 3 at working precision
        let prec = 256;
        let s = seq_from_float_fn(30, prec, |n| {
            Float::with_val(prec, 3) + n.clone().pow_f64(-0.5)
        });
        let t = bst_table(&s, 0.5, 2, BstVariant::Polynomial).unwrap();
        for (_, v) in t.rows[1].iter_defined() {
            let err = (v.to_f64() - 3.0).abs();
            assert!(err < 1e-70, "err={err}");
        }
    }

    #[test]
    fn polynomial_row2_exact_two_powers() {
        // s_n = 5 + 2 n^{-1/2} - n^{-1}: row 2 constant 5 to >= 20 digits
        let prec = 256;
        let s = seq_from_float_fn(50, prec, |n| {
            Float::with_val(prec, 5) + 2 * n.clone().pow_f64(-0.5) - n.clone().pow_f64(-1.0)
        });
        let t = bst_table(&s, 0.5, 3, BstVariant::Polynomial).unwrap();
        for (_, v) in t.rows[2].iter_defined() {
            let err = (v.to_f64() - 5.0).abs();
            assert!(err < 1e-20, "err={err}");
        }
    }

    #[test]
    fn polynomial_row_k_exact_general() {
        // three correction powers with w = 0.7, row 3 constant
        let prec = 320;
        let w = 0.7;
        let s = seq_from_float_fn(40, prec, |n| {
            Float::with_val(prec, 2)
                + 3 * n.clone().pow_f64(-w)
                - 7 * n.clone().pow_f64(-2.0 * w)
                + n.clone().pow_f64(-3.0 * w)
        });
        let t = bst_table(&s, w, 4, BstVariant::Polynomial).unwrap();
        for (_, v) in t.rows[3].iter_defined() {
            let err = (v.to_f64() - 2.0).abs();
            assert!(err < 1e-20, "err={err}");
        }
    }

    #[test]
    fn constant_input_reproduced_everywhere() {
        let prec = 128;
        let s = seq_from_fn(20, |_| 4.25, prec);
        for variant in [BstVariant::Polynomial, BstVariant::Rational] {
            let t = bst_table(&s, 0.5, 4, variant).unwrap();
            for row in t.rows.iter() {
                for (_, v) in row.iter_defined() {
                    assert_eq!(v.to_f64(), 4.25);
                }
            }
        }
    }

    #[test]
    fn holes_propagate_without_abort() {
        let prec = 128;
        let mut vals: Vec<Option<Float>> = (1..=20i64)
            .map(|i| Some(Float::with_val(prec, 5.0 + 1.0 / i as f64)))
            .collect();
        vals[7] = None;
        let s = RealSequence::new(vals, 1, prec);
        let t = bst_table(&s, 1.0, 2, BstVariant::Rational).unwrap();
        // rows exist and have holes around index 8, tail still defined
        assert!(t.rows[1].get(7).is_none());
        assert!(t.rows[1].get(8).is_none());
        assert!(t.rows[1].get(15).is_some());
    }

    #[test]
    fn needs_enough_points() {
        let prec = 64;
        let s = seq_from_fn(3, |i| i as f64, prec);
        assert!(bst_table(&s, 0.5, 5, BstVariant::Rational).is_err());
    }

    #[test]
    fn monotone_and_limit_on_clean_input() {
        let prec = 256;
        let s = seq_from_float_fn(40, prec, |n| {
            Float::with_val(prec, 2) + n.clone().pow_f64(-0.5) + n.clone().pow_f64(-1.0) / 3u32
        });
        let t = bst_table(&s, 0.5, 5, BstVariant::Rational).unwrap();
        let rows = monotone_rows(&t);
        assert!(rows >= 1);
        let (lim, unc) = bst_limit(&t).unwrap();
        assert!((lim.to_f64() - 2.0).abs() < 1e-4, "lim={}", lim.to_f64());
        assert!(unc.to_f64() >= 0.0);
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let prec = 128;
        let s = seq_from_fn(20, |i| 1.0 + 1.0 / i as f64, prec);
        let t = bst_table(&s, 1.0, 3, BstVariant::Rational).unwrap();
        let csv = table_csv(&t, 7);
        assert_eq!(csv.lines().count(), 4); // header + 3 rows
    }

    // Reference-table agreement lives in the acceptance suite; here we pin the
    // recursion against a hand-computed rational-variant value.
    #[test]
    fn rational_recursion_hand_value() {
        let prec = 256;
        // s = [s1, s2, s3] = [1.0, 1.5, 1.75], w = 1
        let s = RealSequence::from_values(
            vec![
                Float::with_val(prec, 1.0),
                Float::with_val(prec, 1.5),
                Float::with_val(prec, 1.75),
            ],
            1,
            prec,
        );
        let t = bst_table(&s, 1.0, 1, BstVariant::Rational).unwrap();
        // T(1,1): d1 = 0.5, step = 2, d2 = s2 - 0 = 1.5
        // denom = 2(1 - 0.5/1.5) - 1 = 1/3; T = 1.5 + 0.5/(1/3) = 3.0
        assert!((t.rows[1].get(1).unwrap().to_f64() - 3.0).abs() < 1e-70);
        // T(1,2): d1 = 0.25, step = (3/2), d2 = 1.75
        // denom = 1.5*(1 - 1/7) - 1 = 2/7; T = 1.75 + 0.25*7/2 = 2.625
        assert!((t.rows[1].get(2).unwrap().to_f64() - 2.625).abs() < 1e-70);
    }
}
