//! Direct parameter fitting: sliding log-linear 4- and 3-parameter fits,
//! pairwise and triple ratio fits for `(log mu1, g)`, and the amplitude
//! sequence.

use crate::exact::ExactSeries;
use crate::linalg::solve_rank_revealing;
use crate::precision::PrecisionConfig;
use crate::ratio::RatioAnalysis;
use crate::sequence::{default_window, tail_extrapolate, FloatPowF64, RealSequence};
use crate::{Error, Result};
use rug::Float;

/// The target coefficient law `B * mu^n * mu1^(n^sigma) * n^g`.
#[derive(Debug, Clone)]
pub struct AsymptoticForm {
    pub b: Float,
    pub mu: Float,
    pub mu1: Float,
    pub sigma: Float,
    pub g: Float,
}

impl AsymptoticForm {
    /// Evaluates the law at `n` (at the precision of the stored fields).
    pub fn eval(&self, n: i64) -> Float {
        let prec = self.mu.prec();
        let nf = Float::with_val(prec, n);
        let mu_pow = self.mu.clone().pow_float(&nf);
        let stretch = self
            .mu1
            .clone()
            .pow_float(&nf.clone().pow_float(&self.sigma));
        let power = nf.pow_float(&self.g);
        Float::with_val(prec, &self.b * &mu_pow) * stretch * power
    }
}

trait PowFloat {
    fn pow_float(self, e: &Float) -> Float;
}

impl PowFloat for Float {
    fn pow_float(self, e: &Float) -> Float {
        use rug::ops::Pow;
        self.pow(e.clone())
    }
}

/// Per-constant record of a sliding fit.
#[derive(Debug, Clone)]
pub struct ConstantTrace {
    pub name: &'static str,
    pub per_n: RealSequence,
    /// The estimates are extrapolated against `n^(-abscissa_exponent)`.
    pub abscissa_exponent: f64,
    pub extrapolated: Option<Float>,
}

#[derive(Debug, Clone)]
pub struct FitTrace {
    pub constants: Vec<ConstantTrace>,
    pub window: usize,
    pub skipped_windows: usize,
}

impl FitTrace {
    pub fn constant(&self, name: &str) -> Option<&ConstantTrace> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn value(&self, name: &str) -> Option<Float> {
        self.constant(name).and_then(|c| c.extrapolated.clone())
    }
}

fn extrapolated(per_n: &RealSequence, e: f64) -> Option<Float> {
    tail_extrapolate(per_n, e, default_window(per_n.defined_len()))
}

/// Sliding 4-parameter fit of `log b_k = c1 k + c2 k^sigma + c3 log k + c4`
/// over `k = n-2 .. n+1`. `c1 -> log mu`, `c2 -> log mu1`, `c3 -> g`,
/// `c4 -> log B`.
pub fn direct_fit4(b: &ExactSeries, sigma: f64, cfg: &PrecisionConfig) -> Result<FitTrace> {
    let prec = cfg.bits();
    let logs = positive_logs(b, prec);
    let usable = logs.iter().filter(|v| v.is_some()).count();
    if usable < 6 {
        return Err(Error::NotEnoughPoints { got: usable, need: 6 });
    }
    let mut traces: Vec<Vec<Option<Float>>> = vec![Vec::new(); 4];
    let mut skipped = 0usize;
    let n_lo = 3i64;
    let n_hi = logs.len() as i64 - 2;
    for n in n_lo..=n_hi {
        let ks = [n - 2, n - 1, n, n + 1];
        let mut rows = Vec::with_capacity(4);
        let mut rhs = Vec::with_capacity(4);
        let mut ok = true;
        for &k in &ks {
            match logs.get(k as usize).and_then(|v| v.as_ref()) {
                Some(lb) if k >= 1 => {
                    let kf = Float::with_val(prec, k);
                    rows.push(vec![
                        kf.clone(),
                        kf.clone().pow_f64(sigma),
                        kf.ln(),
                        Float::with_val(prec, 1),
                    ]);
                    rhs.push(lb.clone());
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            skipped += 1;
            for t in traces.iter_mut() {
                t.push(None);
            }
            continue;
        }
        let (x, res) = solve_rank_revealing(&rows, &rhs, prec);
        if res.to_f64() > 1e-20 {
            skipped += 1;
            for t in traces.iter_mut() {
                t.push(None);
            }
            continue;
        }
        for (i, t) in traces.iter_mut().enumerate() {
            t.push(Some(x[i].clone()));
        }
    }
    let names = ["c1", "c2", "c3", "c4"];
    let constants = traces
        .into_iter()
        .zip(names)
        .map(|(vals, name)| {
            let per_n = RealSequence::new(vals, n_lo, prec);
            let extrapolated = extrapolated(&per_n, 1.0);
            ConstantTrace {
                name,
                per_n,
                abscissa_exponent: 1.0,
                extrapolated,
            }
        })
        .collect();
    Ok(FitTrace {
        constants,
        window: default_window((n_hi - n_lo + 1) as usize),
        skipped_windows: skipped,
    })
}

/// Sliding 3-parameter fit with `mu` known:
/// `log b_k - k log mu = c2 k^sigma + c3 log k + c4` over `k = n-1 .. n+1`.
pub fn direct_fit3(
    b: &ExactSeries,
    sigma: f64,
    mu: &Float,
    cfg: &PrecisionConfig,
) -> Result<FitTrace> {
    let prec = cfg.bits();
    let logs = positive_logs(b, prec);
    let usable = logs.iter().filter(|v| v.is_some()).count();
    if usable < 5 {
        return Err(Error::NotEnoughPoints { got: usable, need: 5 });
    }
    let logmu = Float::with_val(prec, mu).ln();
    let mut traces: Vec<Vec<Option<Float>>> = vec![Vec::new(); 3];
    let mut skipped = 0usize;
    let n_lo = 2i64;
    let n_hi = logs.len() as i64 - 2;
    for n in n_lo..=n_hi {
        let ks = [n - 1, n, n + 1];
        let mut rows = Vec::with_capacity(3);
        let mut rhs = Vec::with_capacity(3);
        let mut ok = true;
        for &k in &ks {
            match logs.get(k as usize).and_then(|v| v.as_ref()) {
                Some(lb) if k >= 1 => {
                    let kf = Float::with_val(prec, k);
                    rows.push(vec![
                        kf.clone().pow_f64(sigma),
                        kf.clone().ln(),
                        Float::with_val(prec, 1),
                    ]);
                    rhs.push(Float::with_val(prec, lb - Float::with_val(prec, &kf * &logmu)));
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            skipped += 1;
            for t in traces.iter_mut() {
                t.push(None);
            }
            continue;
        }
        let (x, res) = solve_rank_revealing(&rows, &rhs, prec);
        if res.to_f64() > 1e-20 {
            skipped += 1;
            for t in traces.iter_mut() {
                t.push(None);
            }
            continue;
        }
        for (i, t) in traces.iter_mut().enumerate() {
            t.push(Some(x[i].clone()));
        }
    }
    let names = ["c2", "c3", "c4"];
    let constants = traces
        .into_iter()
        .zip(names)
        .map(|(vals, name)| {
            let per_n = RealSequence::new(vals, n_lo, prec);
            let extrapolated = extrapolated(&per_n, 1.0);
            ConstantTrace {
                name,
                per_n,
                abscissa_exponent: 1.0,
                extrapolated,
            }
        })
        .collect();
    Ok(FitTrace {
        constants,
        window: default_window((n_hi - n_lo + 1) as usize),
        skipped_windows: skipped,
    })
}

fn positive_logs(b: &ExactSeries, prec: u32) -> Vec<Option<Float>> {
    b.coeffs()
        .iter()
        .map(|c| {
            if *c > 0 {
                Some(Float::with_val(prec, c).ln())
            } else {
                None
            }
        })
        .collect()
}

/// The ladder of correction-term decay exponents of the ratio expansion:
/// `(1-sigma), 1, 2(1-sigma), (2-sigma), 3(1-sigma), 2, ...` sorted and
/// deduplicated.
fn correction_ladder(sigma: f64) -> Vec<f64> {
    let mut v = vec![
        1.0 - sigma,
        1.0,
        2.0 * (1.0 - sigma),
        2.0 - sigma,
        3.0 * (1.0 - sigma),
        2.0,
    ];
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

/// First ladder power not among `used`.
fn first_neglected(sigma: f64, used: &[f64]) -> f64 {
    for t in correction_ladder(sigma) {
        if !used.iter().any(|u| (u - t).abs() < 1e-12) {
            return t;
        }
    }
    2.0
}

/// Sequential 2x2 fits of `r_j/mu = 1 + c1/j^(1-sigma) + c2/j` over
/// consecutive pairs; each constant is extrapolated against the ratio of the
/// first neglected correction to its own term.
pub fn pair_ratio_fit(ra: &RatioAnalysis, mu: &Float, sigma: f64) -> Result<FitTrace> {
    let powers = [1.0 - sigma, 1.0];
    ratio_fit(ra, mu, sigma, &powers)
}

/// Triple fits adding the next correction term beyond `c1/n^(1-sigma) + c2/n`
/// (for `sigma = 1/2` that term is `n^{-3/2}`; for `sigma = 1/3` it is
/// `n^{-4/3}`; for `sigma > 1/2` it is the sub-`1/n` power that the pair fit
/// has to skip).
pub fn triple_ratio_fit(ra: &RatioAnalysis, mu: &Float, sigma: f64) -> Result<FitTrace> {
    let t3 = first_neglected(sigma, &[1.0 - sigma, 1.0]);
    let mut powers = vec![1.0 - sigma, 1.0, t3];
    powers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ratio_fit(ra, mu, sigma, &powers)
}

fn ratio_fit(ra: &RatioAnalysis, mu: &Float, sigma: f64, powers: &[f64]) -> Result<FitTrace> {
    let prec = ra.r.precision_bits();
    let m = powers.len();
    if ra.r.defined_len() < m + 2 {
        return Err(Error::NotEnoughPoints {
            got: ra.r.defined_len(),
            need: m + 2,
        });
    }
    let mut traces: Vec<Vec<Option<Float>>> = vec![Vec::new(); m];
    let mut skipped = 0usize;
    let start = ra.r.start_index() + (m as i64 - 1);
    for n in start..=ra.r.last_index() {
        let js: Vec<i64> = (0..m as i64).map(|i| n - (m as i64 - 1) + i).collect();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut ok = true;
        for &j in &js {
            match ra.r.get(j) {
                Some(rj) if j >= 1 => {
                    let jf = Float::with_val(prec, j);
                    rows.push(
                        powers
                            .iter()
                            .map(|p| jf.clone().pow_f64(-p))
                            .collect::<Vec<_>>(),
                    );
                    rhs.push(Float::with_val(prec, rj / mu) - 1u32);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            skipped += 1;
            for t in traces.iter_mut() {
                t.push(None);
            }
            continue;
        }
        let (x, res) = solve_rank_revealing(&rows, &rhs, prec);
        if res.to_f64() > 1e-20 {
            skipped += 1;
            for t in traces.iter_mut() {
                t.push(None);
            }
            continue;
        }
        for (i, t) in traces.iter_mut().enumerate() {
            t.push(Some(x[i].clone()));
        }
    }
    let neglected = first_neglected(sigma, powers);
    static NAMES: [&str; 3] = ["c1", "c2", "c3"];
    let constants = traces
        .into_iter()
        .enumerate()
        .map(|(i, vals)| {
            let per_n = RealSequence::new(vals, start, prec);
            let e = (neglected - powers[i]).max(1.0 - sigma.min(0.5));
            let extrapolated = extrapolated(&per_n, e);
            ConstantTrace {
                name: NAMES[i],
                per_n,
                abscissa_exponent: e,
                extrapolated,
            }
        })
        .collect();
    Ok(FitTrace {
        constants,
        window: default_window(ra.r.defined_len()),
        skipped_windows: skipped,
    })
}

/// Maps pair/triple-fit constants to `(log mu1, g)`:
/// `c1 = sigma log mu1 / 1`, and for `sigma = 1/2` the `1/n` coefficient is
/// `g + log^2(mu1)/8`, otherwise plain `g`.
pub fn ratio_fit_parameters(c1: &Float, c2: &Float, sigma: f64) -> (Float, Float) {
    let prec = c1.prec();
    let log_mu1 = Float::with_val(prec, c1 / Float::with_val(prec, sigma));
    let g = if (sigma - 0.5).abs() < 1e-12 {
        let corr = Float::with_val(prec, &log_mu1 * &log_mu1) / 8u32;
        Float::with_val(prec, c2 - corr)
    } else {
        c2.clone()
    };
    (log_mu1, g)
}

/// `B_n = b_n * n^{-g} * mu^{-n} * mu1^{-n^sigma}` with a straight-line tail
/// extrapolation against `n^{-p}`; `p` defaults to `min(sigma, 1-sigma)`.
pub struct AmplitudeEstimate {
    pub per_n: RealSequence,
    pub abscissa_exponent: f64,
    pub extrapolated: Option<Float>,
}

pub fn amplitude_sequence(
    b: &ExactSeries,
    form: &AsymptoticForm,
    cfg: &PrecisionConfig,
    abscissa_override: Option<f64>,
) -> AmplitudeEstimate {
    let prec = cfg.bits();
    let sigma = form.sigma.to_f64();
    let p = abscissa_override.unwrap_or_else(|| sigma.min(1.0 - sigma));
    let log_mu = Float::with_val(prec, &form.mu).ln();
    let log_mu1 = Float::with_val(prec, &form.mu1).ln();
    let mut values = Vec::new();
    for (n, c) in b.coeffs().iter().enumerate() {
        if n == 0 || *c <= 0 {
            values.push(None);
            continue;
        }
        let nf = Float::with_val(prec, n as u64);
        // work in logs to avoid overflow at large n
        let log_bn = Float::with_val(prec, c).ln();
        let log_b = log_bn
            - Float::with_val(prec, &nf * &log_mu)
            - Float::with_val(prec, nf.clone().pow_f64(sigma) * &log_mu1)
            - Float::with_val(prec, nf.clone().ln() * &form.g);
        values.push(Some(log_b.exp()));
    }
    let per_n = RealSequence::new(values, 0, prec);
    let window = default_window(per_n.defined_len());
    let extrapolated = tail_extrapolate(&per_n, p, window);
    AmplitudeEstimate {
        per_n,
        abscissa_exponent: p,
        extrapolated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::fragmented_permutations;
    use rug::Rational;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    /// Synthetic exact-law coefficients `B mu^n mu1^{n^sigma} n^g` as rationals.
    fn synthetic(bv: f64, mu: f64, mu1: f64, sigma: f64, g: f64, n: usize) -> ExactSeries {
        let prec = 320;
        let mut coeffs = vec![Rational::from(1)];
        for k in 1..=n as i64 {
            let kf = Float::with_val(prec, k);
            let v = Float::with_val(prec, bv)
                * Float::with_val(prec, mu).pow_f64(k as f64)
                * Float::with_val(prec, mu1).pow_float_local(&kf.clone().pow_f64(sigma))
                * kf.pow_f64(g);
            coeffs.push(v.to_rational().unwrap());
        }
        ExactSeries::new(coeffs, 1)
    }

    trait PF {
        fn pow_float_local(self, e: &Float) -> Float;
    }
    impl PF for Float {
        fn pow_float_local(self, e: &Float) -> Float {
            use rug::ops::Pow;
            self.pow(e.clone())
        }
    }

    #[test]
    fn direct_fit4_exact_model_recovers_all_constants() {
        // b_n = 3^n e^{sqrt n} n^2: c1 = ln 3, c2 = 1, c3 = 2, c4 = 0
        let s = synthetic(1.0, 3.0, std::f64::consts::E, 0.5, 2.0, 100);
        let t = direct_fit4(&s, 0.5, &cfg()).unwrap();
        let c1 = t.constant("c1").unwrap().per_n.tail_defined(1)[0].1.to_f64();
        let c2 = t.constant("c2").unwrap().per_n.tail_defined(1)[0].1.to_f64();
        let c3 = t.constant("c3").unwrap().per_n.tail_defined(1)[0].1.to_f64();
        let c4 = t.constant("c4").unwrap().per_n.tail_defined(1)[0].1.to_f64();
        assert!((c1 - 3f64.ln()).abs() < 1e-4, "c1={c1}");
        assert!((c2 - 1.0).abs() < 1e-4, "c2={c2}");
        assert!((c3 - 2.0).abs() < 1e-3, "c3={c3}");
        assert!(c4.abs() < 1e-2, "c4={c4}");
    }

    #[test]
    fn direct_fit4_frag_values() {
        let f = fragmented_permutations(50, &Rational::from(2));
        let t = direct_fit4(&f.series, 0.5, &cfg()).unwrap();
        let c1 = t.value("c1").unwrap().to_f64();
        assert!((c1 - 0.6932).abs() < 0.001, "c1={c1}");
        let mu = c1.exp();
        assert!((mu - 2.0).abs() < 0.001, "mu={mu}");
        let c2 = t.value("c2").unwrap().to_f64();
        assert!((c2 - 2.0).abs() < 0.01, "c2={c2}");
        let c3 = t.value("c3").unwrap().to_f64();
        assert!((c3 + 0.77).abs() < 0.05, "c3={c3}");
    }

    #[test]
    fn direct_fit3_frag_values() {
        let f = fragmented_permutations(50, &Rational::from(2));
        let mu = Float::with_val(256, 2);
        let t = direct_fit3(&f.series, 0.5, &mu, &cfg()).unwrap();
        let c2 = t.value("c2").unwrap().to_f64();
        assert!((c2 - 2.0).abs() < 0.01, "c2={c2}");
        let c3 = t.value("c3").unwrap().to_f64();
        assert!((c3 + 0.75).abs() < 0.03, "c3={c3}");
    }

    #[test]
    fn skipped_windows_counted_on_nonpositive_input() {
        let s = ExactSeries::from_integers(&[1, 2, -3, 4, 5, 6, 7, 8, 9, 10, 11, 12]);
        let t = direct_fit4(&s, 0.5, &cfg()).unwrap();
        assert!(t.skipped_windows > 0);
    }

    #[test]
    fn pair_fit_frag_parameters() {
        let f = fragmented_permutations(50, &Rational::from(2));
        let ra = crate::ratio::ratios(&f.series, &cfg()).unwrap();
        let mu = Float::with_val(256, 2);
        let t = pair_ratio_fit(&ra, &mu, 0.5).unwrap();
        let c1 = t.value("c1").unwrap();
        let c2 = t.value("c2").unwrap();
        let (lm1, g) = ratio_fit_parameters(&c1, &c2, 0.5);
        assert!((lm1.to_f64() - 2.0).abs() < 0.05, "log mu1 = {}", lm1.to_f64());
        assert!((g.to_f64() + 0.75).abs() < 0.03, "g = {}", g.to_f64());
    }

    #[test]
    fn triple_fit_consistent_with_pair_on_frag() {
        let f = fragmented_permutations(50, &Rational::from(2));
        let ra = crate::ratio::ratios(&f.series, &cfg()).unwrap();
        let mu = Float::with_val(256, 2);
        let p = pair_ratio_fit(&ra, &mu, 0.5).unwrap();
        let t = triple_ratio_fit(&ra, &mu, 0.5).unwrap();
        let pc1 = p.value("c1").unwrap().to_f64();
        let tc1 = t.value("c1").unwrap().to_f64();
        assert!((pc1 - tc1).abs() < 0.05, "pair {pc1} vs triple {tc1}");
    }

    #[test]
    fn triple_fit_c3_matches_expansion_coefficient() {
        // synthetic sigma = 1/2 with log mu1 = 2, g = -3/4: the n^{-3/2}
        // ratio-expansion coefficient is [log^3 mu1 + (6+24g) log mu1]/48
        let s = synthetic(1.0, 2.0, (2.0f64).exp(), 0.5, -0.75, 400);
        let ra = crate::ratio::ratios(&s, &cfg()).unwrap();
        let mu = Float::with_val(256, 2);
        let t = triple_ratio_fit(&ra, &mu, 0.5).unwrap();
        let c3 = t.value("c3").unwrap().to_f64();
        let lm = 2.0f64;
        let expect = (lm.powi(3) + (6.0 + 24.0 * (-0.75)) * lm) / 48.0;
        assert!((c3 - expect).abs() < 0.05, "c3={c3} expect={expect}");
    }

    #[test]
    fn triple_fit_mu1_one_gives_zero_c1() {
        let s = synthetic(2.0, 3.0, 1.0, 0.5, -1.5, 200);
        let ra = crate::ratio::ratios(&s, &cfg()).unwrap();
        let mu = Float::with_val(256, 3);
        let t = triple_ratio_fit(&ra, &mu, 0.5).unwrap();
        let c1 = t.value("c1").unwrap().to_f64();
        assert!(c1.abs() < 0.01, "c1={c1}");
    }

    #[test]
    fn amplitude_exact_law_is_flat() {
        let s = synthetic(0.37, 2.0, 0.5, 0.5, -0.75, 150);
        let prec = 256;
        let form = AsymptoticForm {
            b: Float::with_val(prec, 0.37),
            mu: Float::with_val(prec, 2),
            mu1: Float::with_val(prec, 0.5),
            sigma: Float::with_val(prec, 0.5),
            g: Float::with_val(prec, -0.75),
        };
        let amp = amplitude_sequence(&s, &form, &cfg(), None);
        let est = amp.extrapolated.unwrap().to_f64();
        assert!((est - 0.37).abs() < 0.37 * 0.02, "est={est}");
    }

    #[test]
    fn amplitude_frag_value() {
        let f = fragmented_permutations(50, &Rational::from(2));
        let prec = 256;
        let form = AsymptoticForm {
            b: Float::with_val(prec, 1),
            mu: Float::with_val(prec, 2),
            mu1: Float::with_val(prec, 2f64.exp()),
            sigma: Float::with_val(prec, 0.5),
            g: Float::with_val(prec, -0.75),
        };
        let amp = amplitude_sequence(&f.series, &form, &cfg(), Some(0.75));
        let est = amp.extrapolated.unwrap().to_f64();
        // exact value 1/(2 sqrt(pi e)) = 0.171099...
        assert!((est - 0.171).abs() < 0.002, "est={est}");
    }
}
