//! Indexed sequences of arbitrary-precision reals.
//!
//! A `RealSequence` attaches an integer index to each entry (`start_index`
//! plus position). Entries may be undefined (a ratio at a vanishing
//! coefficient, a hole in an extrapolation row); they are recorded rather
//! than silently dropped so downstream consumers can see where data is
//! missing.

use rug::Float;

#[derive(Debug, Clone)]
pub struct RealSequence {
    values: Vec<Option<Float>>,
    start_index: i64,
    precision_bits: u32,
}

impl RealSequence {
    pub fn new(values: Vec<Option<Float>>, start_index: i64, precision_bits: u32) -> Self {
        Self {
            values,
            start_index,
            precision_bits,
        }
    }

    pub fn from_values(values: Vec<Float>, start_index: i64, precision_bits: u32) -> Self {
        Self::new(values.into_iter().map(Some).collect(), start_index, precision_bits)
    }

    pub fn empty(start_index: i64, precision_bits: u32) -> Self {
        Self::new(Vec::new(), start_index, precision_bits)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Entry at sequence index `n` (not position).
    pub fn get(&self, n: i64) -> Option<&Float> {
        let pos = n.checked_sub(self.start_index)?;
        if pos < 0 {
            return None;
        }
        self.values.get(pos as usize)?.as_ref()
    }

    pub fn push(&mut self, v: Option<Float>) {
        self.values.push(v);
    }

    pub fn last_index(&self) -> i64 {
        self.start_index + self.values.len() as i64 - 1
    }

    /// Iterator over `(index, value)` pairs of the defined entries.
    pub fn iter_defined(&self) -> impl Iterator<Item = (i64, &Float)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(move |(i, v)| v.as_ref().map(|f| (self.start_index + i as i64, f)))
    }

    /// Number of defined entries.
    pub fn defined_len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Relabels entries so the value at index `n` moves to `n + delta`.
    /// Shifting by -1 reproduces the bookkeeping of analysing a series with
    /// its leading monomial divided out.
    pub fn shift_index(&self, delta: i64) -> RealSequence {
        RealSequence {
            values: self.values.clone(),
            start_index: self.start_index + delta,
            precision_bits: self.precision_bits,
        }
    }

    /// Drops entries with index below `from` and everything undefined before
    /// the first defined entry.
    pub fn tail_from(&self, from: i64) -> RealSequence {
        let mut values = Vec::new();
        let mut start = None;
        for (n, v) in self.values.iter().enumerate() {
            let idx = self.start_index + n as i64;
            if idx < from {
                continue;
            }
            if start.is_none() {
                if v.is_none() {
                    continue;
                }
                start = Some(idx);
            }
            values.push(v.clone());
        }
        RealSequence {
            values,
            start_index: start.unwrap_or(from),
            precision_bits: self.precision_bits,
        }
    }

    /// The last `k` defined `(index, value)` pairs.
    pub fn tail_defined(&self, k: usize) -> Vec<(i64, Float)> {
        let mut v: Vec<(i64, Float)> = self
            .iter_defined()
            .map(|(n, f)| (n, f.clone()))
            .collect();
        let keep = v.len().saturating_sub(k);
        v.drain(..keep);
        v
    }
}

/// Least-squares straight line through `(x, y)` points; returns
/// `(intercept, slope)`. Precision follows the inputs.
pub fn linear_fit(points: &[(Float, Float)], prec: u32) -> Option<(Float, Float)> {
    if points.len() < 2 {
        return None;
    }
    let n = Float::with_val(prec, points.len() as u64);
    let mut sx = Float::new(prec);
    let mut sy = Float::new(prec);
    let mut sxx = Float::new(prec);
    let mut sxy = Float::new(prec);
    for (x, y) in points {
        sx += x;
        sy += y;
        sxx += Float::with_val(prec, x * x);
        sxy += Float::with_val(prec, x * y);
    }
    let den = Float::with_val(prec, &n * &sxx) - Float::with_val(prec, &sx * &sx);
    if den == 0 {
        return None;
    }
    let slope = (Float::with_val(prec, &n * &sxy) - Float::with_val(prec, &sx * &sy)) / &den;
    let intercept = (sy - Float::with_val(prec, &slope * &sx)) / n;
    Some((intercept, slope))
}

/// Straight-line fit of `seq` against `n^(-abscissa_exponent)` over the last
/// `window` defined entries; returns the intercept (the extrapolated limit).
pub fn tail_extrapolate(
    seq: &RealSequence,
    abscissa_exponent: f64,
    window: usize,
) -> Option<Float> {
    let prec = seq.precision_bits();
    let tail = seq.tail_defined(window);
    if tail.len() < 2 {
        return None;
    }
    let pts: Vec<(Float, Float)> = tail
        .iter()
        .map(|(n, v)| {
            let x = Float::with_val(prec, *n).pow_f64(-abscissa_exponent);
            (x, v.clone())
        })
        .collect();
    linear_fit(&pts, prec).map(|(i, _)| i)
}

/// Default tail-window size used throughout: `max(5, n/10)`.
pub fn default_window(n: usize) -> usize {
    5usize.max(n / 10)
}

pub(crate) trait FloatPowF64 {
    fn pow_f64(&self, e: f64) -> Float;
}

impl FloatPowF64 for Float {
    fn pow_f64(&self, e: f64) -> Float {
        use rug::ops::Pow;
        let ef = Float::with_val(self.prec(), e);
        self.clone().pow(ef)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(prec: u32, x: f64) -> Float {
        Float::with_val(prec, x)
    }

    #[test]
    fn indexing_respects_start() {
        let s = RealSequence::from_values(vec![f(64, 1.0), f(64, 2.0)], 3, 64);
        assert!(s.get(2).is_none());
        assert_eq!(s.get(3).unwrap().to_f64(), 1.0);
        assert_eq!(s.get(4).unwrap().to_f64(), 2.0);
        assert_eq!(s.last_index(), 4);
    }

    #[test]
    fn shift_relabels() {
        let s = RealSequence::from_values(vec![f(64, 7.0)], 5, 64);
        let t = s.shift_index(-1);
        assert_eq!(t.get(4).unwrap().to_f64(), 7.0);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let prec = 128;
        let pts: Vec<(Float, Float)> = (1..=10)
            .map(|i| {
                let x = f(prec, i as f64);
                let y = f(prec, 3.0 - 2.0 * i as f64);
                (x, y)
            })
            .collect();
        let (i0, sl) = linear_fit(&pts, prec).unwrap();
        assert!((i0.to_f64() - 3.0).abs() < 1e-30);
        assert!((sl.to_f64() + 2.0).abs() < 1e-30);
    }

    #[test]
    fn tail_extrapolate_constant_plus_decay() {
        // y_n = 4 + 2/n extrapolated against 1/n is exactly 4.
        let prec = 128;
        let vals: Vec<Float> = (1..=40).map(|n| f(prec, 4.0 + 2.0 / n as f64)).collect();
        let s = RealSequence::from_values(vals, 1, prec);
        let lim = tail_extrapolate(&s, 1.0, 8).unwrap();
        assert!((lim.to_f64() - 4.0).abs() < 1e-12);
    }
}
