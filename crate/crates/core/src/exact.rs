//! Truncated power series over arbitrary-precision rationals.
//!
//! `ExactSeries` is the ground-truth representation of every generated or
//! ingested series: all arithmetic here is exact, no rounding ever occurs.
//! A series in `x^2` (entry `n` holding the coefficient of `x^{2n}`) carries
//! `var_step = 2`; everything else uses `var_step = 1`.

use crate::precision::PrecisionConfig;
use crate::sequence::RealSequence;
use crate::{Error, Result};
use rug::ops::Pow;
use rug::{Complete, Float, Integer, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSeries {
    coeffs: Vec<Rational>,
    var_step: u32,
}

impl ExactSeries {
    /// Series from coefficients; entry `n` is the coefficient of `x^{var_step*n}`.
    pub fn new(coeffs: Vec<Rational>, var_step: u32) -> Self {
        assert!(var_step >= 1, "var_step must be at least 1");
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        Self { coeffs, var_step }
    }

    pub fn from_integers(vals: &[i64]) -> Self {
        Self::new(vals.iter().map(|&v| Rational::from(v)).collect(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c], 1)
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    /// Highest retained power of the underlying variable.
    pub fn order(&self) -> usize {
        (self.coeffs.len() - 1) * self.var_step as usize
    }

    pub fn var_step(&self) -> u32 {
        self.var_step
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != 0)
    }

    pub fn truncated(&self, order: usize) -> Self {
        let n = order / self.var_step as usize + 1;
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(n.max(1));
        coeffs.resize(n.max(1), Rational::new());
        Self::new(coeffs, self.var_step)
    }

    /// Cauchy product truncated at `order` (a power of the variable).
    pub fn mul(&self, other: &ExactSeries, order: usize) -> Result<ExactSeries> {
        if self.var_step != other.var_step {
            return Err(Error::VarStepMismatch(self.var_step, other.var_step));
        }
        let n = order / self.var_step as usize;
        let mut out = vec![Rational::new(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if *b == 0 {
                    continue;
                }
                out[i + j] += (a * b).complete();
            }
        }
        Ok(ExactSeries::new(out, self.var_step))
    }

    /// Multiplicative inverse: `b` with `self * b = 1` through `order`.
    pub fn inv(&self, order: usize) -> Result<ExactSeries> {
        if self.coeffs[0] == 0 {
            return Err(Error::NotInvertible);
        }
        let n = order / self.var_step as usize;
        let c0 = &self.coeffs[0];
        let mut out = vec![Rational::new(); n + 1];
        out[0] = c0.clone().recip();
        for m in 1..=n {
            let mut s = Rational::new();
            for k in 1..=m {
                if let Some(a) = self.coeffs.get(k) {
                    if *a != 0 && out[m - k] != 0 {
                        s += (a * &out[m - k]).complete();
                    }
                }
            }
            out[m] = -s / c0.clone();
        }
        Ok(ExactSeries::new(out, self.var_step))
    }

    /// `exp(self)` via the coefficient recurrence from `F' = a' F`.
    /// Requires a zero constant term.
    pub fn exp(&self, order: usize) -> Result<ExactSeries> {
        if self.coeffs[0] != 0 {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = order / self.var_step as usize;
        let mut out = vec![Rational::new(); n + 1];
        out[0] = Rational::from(1);
        // n f_n = sum_{k=1..n} k a_k f_{n-k}
        for m in 1..=n {
            let mut s = Rational::new();
            for k in 1..=m {
                if let Some(a) = self.coeffs.get(k) {
                    if *a != 0 && out[m - k] != 0 {
                        s += Rational::from(k as u64) * (a * &out[m - k]).complete();
                    }
                }
            }
            out[m] = s / Rational::from(m as u64);
        }
        Ok(ExactSeries::new(out, self.var_step))
    }

    /// Term-by-term derivative with respect to the underlying variable.
    /// Entry `n` of the result is `(step*(n+1)) * c_{n+1}` for var_step series.
    pub fn derivative(&self) -> ExactSeries {
        if self.coeffs.len() == 1 {
            return ExactSeries::new(vec![Rational::new()], self.var_step);
        }
        let step = self.var_step as u64;
        let d: Vec<Rational> = (1..self.coeffs.len())
            .map(|k| &self.coeffs[k] * Rational::from(step * k as u64))
            .collect();
        ExactSeries::new(d, self.var_step)
    }

    /// Logarithmic derivative `F'/F` through `order`, exact.
    /// Requires a nonzero constant term.
    pub fn log_derivative(&self, order: usize) -> Result<ExactSeries> {
        let d = self.derivative().truncated(order);
        let inv = self.inv(order)?;
        d.mul(&inv, order)
    }

    /// Rounds every coefficient to the working precision.
    pub fn to_reals(&self, cfg: &PrecisionConfig) -> RealSequence {
        let values = self
            .coeffs
            .iter()
            .map(|c| Some(Float::with_val(cfg.bits(), c)))
            .collect();
        RealSequence::new(values, 0, cfg.bits())
    }
}

/// `base^n` for rational `base`, exact.
pub fn rational_pow(base: &Rational, n: u32) -> Rational {
    base.clone().pow(n)
}

/// Exact binomial-series coefficients of `(1 - mu*z)^(-gamma)` for rational
/// `gamma`, through `order`. Used as a test oracle and for synthetic input.
pub fn binomial_series(mu: &Rational, gamma: &Rational, order: usize) -> ExactSeries {
    // c_0 = 1, c_n = c_{n-1} * mu * (gamma + n - 1)/n
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(Rational::from(1));
    for n in 1..=order {
        let factor = (gamma + Rational::from(n as u64 - 1)) / Rational::from(n as u64);
        let prev = &coeffs[n - 1];
        coeffs.push((prev * mu).complete() * factor);
    }
    ExactSeries::new(coeffs, 1)
}

/// Exact factorial as a rug Integer.
pub fn factorial(n: u32) -> Integer {
    Integer::factorial(n).complete()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = ExactSeries::from_integers(&[1, 1]);
        let b = ExactSeries::from_integers(&[1, -1]);
        let p = a.mul(&b, 2).unwrap();
        assert_eq!(p.coeffs(), &[r(1, 1), r(0, 1), r(-1, 1)]);
    }

    #[test]
    fn mul_geometric_inverse() {
        let geo = ExactSeries::from_integers(&[1, 1, 1, 1, 1, 1]);
        let b = ExactSeries::from_integers(&[1, -1]);
        let p = geo.mul(&b, 5).unwrap();
        let mut expect = vec![r(0, 1); 6];
        expect[0] = r(1, 1);
        assert_eq!(p.coeffs(), &expect[..]);
    }

    #[test]
    fn mul_hand_example() {
        // (2z + 4z^2)^2 = 4z^2 + 16z^3 + 16z^4, truncated at order 3
        let a = ExactSeries::from_integers(&[0, 2, 4]);
        let p = a.mul(&a, 3).unwrap();
        assert_eq!(p.coeffs(), &[r(0, 1), r(0, 1), r(4, 1), r(16, 1)]);
    }

    #[test]
    fn mul_var_step_mismatch() {
        let a = ExactSeries::from_integers(&[1, 1]);
        let b = ExactSeries::new(vec![r(1, 1), r(1, 1)], 2);
        assert!(matches!(a.mul(&b, 2), Err(Error::VarStepMismatch(1, 2))));
    }

    #[test]
    fn inv_geometric() {
        let a = ExactSeries::from_integers(&[1, -1]);
        let inv = a.inv(3).unwrap();
        assert_eq!(inv.coeffs(), &[r(1, 1), r(1, 1), r(1, 1), r(1, 1)]);
    }

    #[test]
    fn inv_identity() {
        let one = ExactSeries::one();
        assert_eq!(one.inv(0).unwrap().coeffs(), &[r(1, 1)]);
    }

    #[test]
    fn inv_hand_example() {
        // 1/(2 - 4z) = 1/2 + z + 2z^2 + ...
        let a = ExactSeries::from_integers(&[2, -4]);
        let inv = a.inv(2).unwrap();
        assert_eq!(inv.coeffs(), &[r(1, 2), r(1, 1), r(2, 1)]);
    }

    #[test]
    fn inv_zero_constant_errors() {
        let a = ExactSeries::from_integers(&[0, 1]);
        assert!(matches!(a.inv(2), Err(Error::NotInvertible)));
    }

    #[test]
    fn exp_zero() {
        let z = ExactSeries::from_integers(&[0]);
        assert_eq!(z.exp(0).unwrap().coeffs(), &[r(1, 1)]);
    }

    #[test]
    fn exp_of_z() {
        let z = ExactSeries::from_integers(&[0, 1]);
        let e = z.exp(3).unwrap();
        assert_eq!(e.coeffs(), &[r(1, 1), r(1, 1), r(1, 2), r(1, 6)]);
    }

    #[test]
    fn exp_hand_example() {
        // exp(2z/(1-2z)) = 1 + 2z + 6z^2 + (52/3) z^3 + ...
        let den = ExactSeries::from_integers(&[1, -2]);
        let u = ExactSeries::from_integers(&[0, 2]).mul(&den.inv(3).unwrap(), 3).unwrap();
        let e = u.exp(3).unwrap();
        assert_eq!(e.coeffs(), &[r(1, 1), r(2, 1), r(6, 1), r(52, 3)]);
    }

    #[test]
    fn exp_nonzero_constant_errors() {
        let a = ExactSeries::from_integers(&[1, 1]);
        assert!(matches!(a.exp(2), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn exp_satisfies_defining_ode() {
        // (exp a)' = a' (exp a) coefficientwise, exact
        let den = ExactSeries::from_integers(&[1, -1, 3]);
        let a = ExactSeries::from_integers(&[0, 5, -2, 7]).mul(&den.inv(12).unwrap(), 12).unwrap();
        let f = a.exp(12).unwrap();
        let lhs = f.derivative().truncated(11);
        let rhs = a.derivative().truncated(11).mul(&f, 11).unwrap();
        assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn to_reals_basics() {
        let cfg = PrecisionConfig::default();
        let s = ExactSeries::new(vec![r(1, 1), r(1, 2)], 1);
        let v = s.to_reals(&cfg);
        assert_eq!(v.get(0).unwrap().to_f64(), 1.0);
        assert_eq!(v.get(1).unwrap().to_f64(), 0.5);
    }

    #[test]
    fn to_reals_monotone_in_precision() {
        // A digit correct at 64 bits stays correct at 256 bits.
        let s = ExactSeries::new(vec![r(52, 3)], 1);
        let lo = s.to_reals(&PrecisionConfig::new(64));
        let hi = s.to_reals(&PrecisionConfig::new(256));
        let a = lo.get(0).unwrap().to_f64();
        let b = hi.get(0).unwrap().to_f64();
        assert_eq!(a, b);
    }

    #[test]
    fn log_derivative_of_geometric() {
        // F = 1/(1-z): F'/F = 1/(1-z)
        let f = ExactSeries::from_integers(&[1, -1]).inv(6).unwrap();
        let ld = f.log_derivative(5).unwrap();
        assert_eq!(ld.coeffs(), &vec![r(1, 1); 6][..]);
    }

    #[test]
    fn binomial_series_matches_geometric() {
        let s = binomial_series(&r(2, 1), &r(1, 1), 4);
        assert_eq!(s.coeffs(), &[r(1, 1), r(2, 1), r(4, 1), r(8, 1), r(16, 1)]);
    }
}
