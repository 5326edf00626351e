//! The ratio method: ratio sequences, exponent and critical-point estimators
//! for algebraic singularities, and the three sigma estimators for
//! stretched-exponential asymptotics.

use crate::exact::ExactSeries;
use crate::generators::CoefficientSource;
use crate::precision::PrecisionConfig;
use crate::sequence::{default_window, FloatPowF64, RealSequence};
use crate::{Error, Result};
use rug::{Complete, Float, Rational};

/// Ratios of successive coefficients, `r_n = b_n / b_{n-1}`.
///
/// A ratio is defined only where both coefficients are nonzero; undefined
/// entries are kept as holes rather than dropped, so indices stay aligned
/// with the source series.
#[derive(Debug, Clone)]
pub struct RatioAnalysis {
    pub r: RealSequence,
    pub source_name: String,
}

impl RatioAnalysis {
    /// Relabels the ratio indices by `delta`. Analysing a series with its
    /// leading monomial divided out is the `delta = -1` case.
    pub fn shift_index(&self, delta: i64) -> RatioAnalysis {
        RatioAnalysis {
            r: self.r.shift_index(delta),
            source_name: self.source_name.clone(),
        }
    }
}

/// `r_n = b_n/b_{n-1}` computed exactly, then rounded at working precision.
/// Ratios start at index 1 (or after the series valuation).
pub fn ratios(b: &ExactSeries, cfg: &PrecisionConfig) -> Result<RatioAnalysis> {
    ratios_named(b, cfg, "series")
}

pub fn ratios_of(source: &CoefficientSource, cfg: &PrecisionConfig) -> Result<RatioAnalysis> {
    ratios_named(&source.series, cfg, &source.name)
}

fn ratios_named(b: &ExactSeries, cfg: &PrecisionConfig, name: &str) -> Result<RatioAnalysis> {
    if b.len() < 2 {
        return Err(Error::NotEnoughPoints {
            got: b.len(),
            need: 2,
        });
    }
    let mut values: Vec<Option<Float>> = Vec::with_capacity(b.len() - 1);
    for n in 1..b.len() {
        let prev = b.coeff(n - 1);
        let cur = b.coeff(n);
        if prev == 0 || cur == 0 {
            values.push(None);
        } else {
            let q = (&cur / &prev).complete();
            values.push(Some(Float::with_val(cfg.bits(), q)));
        }
    }
    Ok(RatioAnalysis {
        r: RealSequence::new(values, 1, cfg.bits()),
        source_name: name.to_string(),
    })
}

/// Parity-smoothed ratios: the entry at `n` is `sqrt(r_n * r_{n+1})`, i.e.
/// `sqrt(b_{n+1}/b_{n-1})`. Tames the even/odd oscillation of series like
/// the interacting-walk benchmark before extrapolation.
pub fn smoothed_ratios(ra: &RatioAnalysis) -> RatioAnalysis {
    let prec = ra.r.precision_bits();
    let start = ra.r.start_index();
    let mut values = Vec::new();
    for n in start..ra.r.last_index() {
        match (ra.r.get(n), ra.r.get(n + 1)) {
            (Some(a), Some(b)) if *a > 0 && *b > 0 => {
                let prod = Float::with_val(prec, a * b);
                values.push(Some(prod.sqrt()));
            }
            _ => values.push(None),
        }
    }
    RatioAnalysis {
        r: RealSequence::new(values, start, prec),
        source_name: format!("{} (smoothed)", ra.source_name),
    }
}

/// Exponent estimators with unknown critical point:
/// `gamma_n = 1 + n^2 (1 - r_n / r_{n-1})`.
pub fn gamma_estimators(ra: &RatioAnalysis) -> Result<RealSequence> {
    let prec = ra.r.precision_bits();
    if ra.r.defined_len() < 3 {
        return Err(Error::NotEnoughPoints {
            got: ra.r.defined_len(),
            need: 3,
        });
    }
    let start = ra.r.start_index() + 1;
    let mut values = Vec::new();
    for n in start..=ra.r.last_index() {
        let v = match (ra.r.get(n), ra.r.get(n - 1)) {
            (Some(rn), Some(rp)) if *rp != 0 => {
                let ratio = Float::with_val(prec, rn / rp);
                let n2 = Float::with_val(prec, n * n);
                Some(Float::with_val(prec, 1 + n2 * (Float::with_val(prec, 1 - ratio))))
            }
            _ => None,
        };
        values.push(v);
    }
    Ok(RealSequence::new(values, start, prec))
}

/// Exponent estimators with the critical point known:
/// `gamma_n = n (z_c r_n - 1) + 1`.
pub fn gamma_with_known_zc(ra: &RatioAnalysis, z_c: &Float) -> Result<RealSequence> {
    let prec = ra.r.precision_bits();
    if ra.r.defined_len() < 3 {
        return Err(Error::NotEnoughPoints {
            got: ra.r.defined_len(),
            need: 3,
        });
    }
    let start = ra.r.start_index();
    let mut values = Vec::new();
    for n in start..=ra.r.last_index() {
        let v = ra.r.get(n).map(|rn| {
            let t = Float::with_val(prec, z_c * rn) - 1u32;
            Float::with_val(prec, n) * t + 1u32
        });
        values.push(v);
    }
    Ok(RealSequence::new(values, start, prec))
}

/// Critical-point estimators with the exponent known:
/// `z_c(n) = (n + gamma - 1) / (n r_n)`.
pub fn zc_estimators(ra: &RatioAnalysis, gamma: &Float) -> Result<RealSequence> {
    let prec = ra.r.precision_bits();
    if ra.r.defined_len() < 1 {
        return Err(Error::NotEnoughPoints { got: 0, need: 1 });
    }
    let start = ra.r.start_index();
    let mut values = Vec::new();
    for n in start..=ra.r.last_index() {
        let v = ra.r.get(n).and_then(|rn| {
            if *rn == 0 {
                return None;
            }
            let num = Float::with_val(prec, n) + gamma - 1u32;
            let den = Float::with_val(prec, n) * rn;
            Some(num / den)
        });
        values.push(v);
    }
    Ok(RealSequence::new(values, start, prec))
}

/// Which estimator produced a sigma estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMethod {
    /// Log-log gradient of `|r_n/mu - 1|` (needs mu).
    LoglogKnownMu,
    /// Log-log gradient of `|r_n/r_{n-1} - 1|`.
    RatioOfRatios,
    /// Log-log gradient of `|b_n^{1/n} / b_{n-1}^{1/(n-1)} - 1|`.
    RootRatio,
}

#[derive(Debug, Clone)]
pub struct SigmaEstimate {
    /// Per-n sigma estimates (pairwise log-log gradients plus one).
    pub per_n: RealSequence,
    pub method: SigmaMethod,
    /// Median of the tail window.
    pub final_value: Float,
    /// Min/max of the tail window.
    pub interval: (Float, Float),
    /// Nearest of {1/3, 1/2, 2/3} when within 0.08 of the final value.
    pub snapped: Option<Rational>,
    /// Set when the underlying gradient signal is consistent with no
    /// stretched-exponential factor at all.
    pub no_stretch: bool,
}

/// Pairwise log-log gradient sequence of the entries of `f` (positive ones),
/// i.e. `[log f(n) - log f(n-1)] / [log n - log(n-1)]` stored at `n`.
fn loglog_gradients(f: &RealSequence) -> RealSequence {
    let prec = f.precision_bits();
    let start = f.start_index() + 1;
    let mut values = Vec::new();
    for n in start..=f.last_index() {
        let v = match (f.get(n), f.get(n - 1)) {
            (Some(a), Some(b)) if *a > 0 && *b > 0 && n >= 2 => {
                let num = Float::with_val(prec, a.clone().ln() - b.clone().ln());
                let den = Float::with_val(
                    prec,
                    Float::with_val(prec, n).ln() - Float::with_val(prec, n - 1).ln(),
                );
                Some(num / den)
            }
            _ => None,
        };
        values.push(v);
    }
    RealSequence::new(values, start, prec)
}

fn finish_sigma(per_n: RealSequence, method: SigmaMethod, no_stretch: bool) -> Result<SigmaEstimate> {
    if per_n.defined_len() < 5 {
        return Err(Error::NotEnoughPoints {
            got: per_n.defined_len(),
            need: 5,
        });
    }
    let prec = per_n.precision_bits();
    let window = default_window(per_n.defined_len());
    let mut tail: Vec<Float> = per_n.tail_defined(window).into_iter().map(|(_, v)| v).collect();
    tail.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let final_value = if tail.len() % 2 == 1 {
        tail[tail.len() / 2].clone()
    } else {
        let lo = &tail[tail.len() / 2 - 1];
        let hi = &tail[tail.len() / 2];
        Float::with_val(prec, lo + hi) / 2u32
    };
    let interval = (tail.first().unwrap().clone(), tail.last().unwrap().clone());
    let snapped = snap_sigma(&final_value);
    Ok(SigmaEstimate {
        per_n,
        method,
        final_value,
        interval,
        snapped,
        no_stretch,
    })
}

/// Flags the nearest of {1/3, 1/2, 2/3} within 0.08; the raw value is kept.
pub fn snap_sigma(sigma: &Float) -> Option<Rational> {
    let candidates = [
        Rational::from((1u32, 3u32)),
        Rational::from((1u32, 2u32)),
        Rational::from((2u32, 3u32)),
    ];
    let mut best: Option<(f64, Rational)> = None;
    for c in candidates {
        let d = (sigma.to_f64() - c.to_f64()).abs();
        if d <= 0.08 && best.as_ref().map_or(true, |(bd, _)| d < *bd) {
            best = Some((d, c));
        }
    }
    best.map(|(_, c)| c)
}

/// Sigma from the log-log gradient of `|r_n/mu - 1|` versus `n`; the gradient
/// tends to `sigma - 1`. Entries with `r_n = mu` are skipped.
pub fn sigma_loglog_known_mu(ra: &RatioAnalysis, mu: &Float) -> Result<SigmaEstimate> {
    if !(*mu > 0) {
        return Err(Error::InvalidArgument("mu must be positive".into()));
    }
    let prec = ra.r.precision_bits();
    let start = ra.r.start_index();
    let mut values = Vec::new();
    for n in start..=ra.r.last_index() {
        let v = ra.r.get(n).and_then(|rn| {
            let t = Float::with_val(prec, rn / mu) - 1u32;
            let t = t.abs();
            if t == 0 {
                None
            } else {
                Some(t)
            }
        });
        values.push(v);
    }
    let f = RealSequence::new(values, start, prec);
    let grads = loglog_gradients(&f);
    // sigma = gradient + 1
    let prec = grads.precision_bits();
    let sig = RealSequence::new(
        (grads.start_index()..=grads.last_index())
            .map(|n| grads.get(n).map(|g| Float::with_val(prec, g + 1u32)))
            .collect(),
        grads.start_index(),
        prec,
    );
    finish_sigma(sig, SigmaMethod::LoglogKnownMu, false)
}

/// The single two-point gradient of `log|r_n/mu - 1|` between `n-1` and `n`;
/// the quantity the worked examples quote for the last two ratios.
pub fn sigma_gradient_at(ra: &RatioAnalysis, mu: &Float, n: i64) -> Option<Float> {
    let prec = ra.r.precision_bits();
    let f = |k: i64| -> Option<Float> {
        let rk = ra.r.get(k)?;
        let t = (Float::with_val(prec, rk / mu) - 1u32).abs();
        if t == 0 {
            None
        } else {
            Some(t.ln())
        }
    };
    let a = f(n)?;
    let b = f(n - 1)?;
    let den = Float::with_val(prec, n).ln() - Float::with_val(prec, n - 1).ln();
    Some((a - b) / den)
}

/// Sigma from ratios of ratios: `r_n/r_{n-1} ~ 1 + (sigma-1) log(mu1) / n^{2-sigma}`,
/// so the log-log gradient of `|r_n/r_{n-1} - 1|` tends to `sigma - 2`.
pub fn sigma_ratio_of_ratios(ra: &RatioAnalysis) -> Result<SigmaEstimate> {
    let prec = ra.r.precision_bits();
    let start = ra.r.start_index() + 1;
    let mut values = Vec::new();
    for n in start..=ra.r.last_index() {
        let v = match (ra.r.get(n), ra.r.get(n - 1)) {
            (Some(rn), Some(rp)) if *rp != 0 => {
                let t = (Float::with_val(prec, rn / rp) - 1u32).abs();
                if t == 0 {
                    None
                } else {
                    Some(t)
                }
            }
            _ => None,
        };
        values.push(v);
    }
    let f = RealSequence::new(values, start, prec);
    let no_stretch = detect_no_stretch(&f);
    let grads = loglog_gradients(&f);
    let sig = RealSequence::new(
        (grads.start_index()..=grads.last_index())
            .map(|n| grads.get(n).map(|g| Float::with_val(prec, g + 2u32)))
            .collect(),
        grads.start_index(),
        prec,
    );
    finish_sigma(sig, SigmaMethod::RatioOfRatios, no_stretch)
}

/// Sigma from root ratios `a_n = b_n^{1/n} / b_{n-1}^{1/(n-1)}`; the log-log
/// gradient of `|a_n - 1|` tends to `sigma - 2`.
pub fn sigma_root_ratio(b: &ExactSeries, cfg: &PrecisionConfig) -> Result<SigmaEstimate> {
    let prec = cfg.bits();
    // roots need positive coefficients; indices from 1 (or past valuation)
    let mut prev_root: Option<Float> = None;
    let mut start: Option<i64> = None;
    let mut held: Vec<Option<Float>> = Vec::new();
    for n in 1..b.len() {
        let c_prev = b.coeff(n - 1);
        let c_cur = b.coeff(n);
        let cur_ok = c_cur > 0 && c_prev > 0;
        let v = if cur_ok {
            let root_cur = nth_root(&c_cur, n as u64, prec);
            let root_prev = match &prev_root {
                Some(r) => r.clone(),
                None => nth_root(&c_prev, (n - 1) as u64, prec),
            };
            prev_root = Some(root_cur.clone());
            if root_prev == 0 {
                None
            } else {
                let t = (Float::with_val(prec, &root_cur / &root_prev) - 1u32).abs();
                if t == 0 {
                    None
                } else {
                    Some(t)
                }
            }
        } else {
            prev_root = None;
            None
        };
        if start.is_none() && v.is_some() {
            start = Some(n as i64);
        }
        if start.is_some() {
            held.push(v);
        }
    }
    let f = RealSequence::new(held, start.unwrap_or(1), prec);
    let no_stretch = detect_no_stretch(&f);
    let grads = loglog_gradients(&f);
    let sig = RealSequence::new(
        (grads.start_index()..=grads.last_index())
            .map(|n| grads.get(n).map(|g| Float::with_val(prec, g + 2u32)))
            .collect(),
        grads.start_index(),
        prec,
    );
    finish_sigma(sig, SigmaMethod::RootRatio, no_stretch)
}

/// `|x|^{1/n}` for a positive rational at working precision.
fn nth_root(x: &Rational, n: u64, prec: u32) -> Float {
    let f = Float::with_val(prec, x);
    let ln = f.ln();
    let scaled = ln / Float::with_val(prec, n);
    scaled.exp()
}

/// Pure algebraic input (`mu1 = 1`) makes `|r_n/r_{n-1} - 1|` decay like
/// `1/n^2`; a tail log-log gradient at or below -1.75 flags "no stretch".
fn detect_no_stretch(f: &RealSequence) -> bool {
    let grads = loglog_gradients(f);
    let tail = grads.tail_defined(default_window(grads.defined_len()).max(3));
    if tail.len() < 3 {
        return false;
    }
    let mean: f64 = tail.iter().map(|(_, v)| v.to_f64()).sum::<f64>() / tail.len() as f64;
    mean <= -1.75
}

/// `(n^{sigma-1}, r_n)` pairs for the ratio linearization plot; a straight
/// tail fit of these yields the intercept estimate of `mu`.
pub fn linearization_data(ra: &RatioAnalysis, sigma: f64) -> Vec<(Float, Float)> {
    let prec = ra.r.precision_bits();
    ra.r
        .iter_defined()
        .filter(|(n, _)| *n >= 1)
        .map(|(n, v)| {
            let x = Float::with_val(prec, n).pow_f64(sigma - 1.0);
            (x, v.clone())
        })
        .collect()
}
