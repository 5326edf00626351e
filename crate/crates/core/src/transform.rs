//! Removing the stretched-exponential factor `mu1^(n^sigma)` from a
//! coefficient sequence.
//!
//! With `bt_n = log(b_n) / n^sigma`, the derived coefficients
//! `c_n = n^(1+sigma) (bt_n - bt_{n-1}) / (1 - sigma)` and `d_n = exp(c_n)`
//! behave like `D * mu^n * n^(-g*sigma/(1-sigma))` to leading order, so the
//! standard algebraic-singularity machinery applies to `d_n`. The two
//! special cases written out in the source material (`sigma = 1/2`:
//! `c_n = 2 n^{3/2} (bt_n - bt_{n-1})`, exponent map `-g`; `sigma = 1/3`:
//! `c_n = (3/2) n^{4/3} (...)`, map `-g/2`) are exact corollaries.

use crate::approximants::{
    da_survey_from_floats, nonalgebraic_diagnostic, Diagnosis, DiagnosticThresholds, SurveyConfig,
    SurveyReport,
};
use crate::exact::ExactSeries;
use crate::extrapolate::{bst_limit, bst_table, monotone_rows, BstVariant};
use crate::precision::PrecisionConfig;
use crate::ratio::RatioAnalysis;
use crate::sequence::{default_window, tail_extrapolate, FloatPowF64, RealSequence};
use crate::{Error, Result};
use rug::Float;

#[derive(Debug, Clone)]
pub struct TransformedSeries {
    /// `d_n = exp(c_n)`, indexed from the first n with two usable inputs.
    pub d: RealSequence,
    pub sigma_used: f64,
    /// Multiplier taking the transformed power-law exponent back to `g`:
    /// `g = exponent_map * a` where `d_n ~ mu^n n^a`.
    pub exponent_map: f64,
}

/// Builds the transformed sequence from exact coefficients. Only positive
/// coefficients can enter (their logs are taken); the first non-positive one
/// past the valuation is an error naming the index.
pub fn remove_stretch(b: &ExactSeries, sigma: f64, cfg: &PrecisionConfig) -> Result<TransformedSeries> {
    if !(0.0 < sigma && sigma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be in (0,1), got {sigma}"
        )));
    }
    let prec = cfg.bits();
    let val = b.valuation().unwrap_or(0);
    let mut bt_prev: Option<Float> = None;
    let mut values: Vec<Option<Float>> = Vec::new();
    let mut start: Option<i64> = None;
    for n in val.max(1)..b.len() {
        let c = b.coeff(n);
        if c <= 0 {
            return Err(Error::NonPositiveCoefficient(n));
        }
        let nf = Float::with_val(prec, n as u64);
        let bt = Float::with_val(prec, &c).ln() / nf.clone().pow_f64(sigma);
        if let Some(prev) = bt_prev.take() {
            let cn = nf.pow_f64(1.0 + sigma) * Float::with_val(prec, &bt - &prev)
                / Float::with_val(prec, 1.0 - sigma);
            if start.is_none() {
                start = Some(n as i64);
            }
            values.push(Some(cn.exp()));
        }
        bt_prev = Some(bt);
    }
    if values.len() < 3 {
        return Err(Error::NotEnoughPoints {
            got: values.len(),
            need: 3,
        });
    }
    Ok(TransformedSeries {
        d: RealSequence::new(values, start.unwrap(), prec),
        sigma_used: sigma,
        exponent_map: -(1.0 - sigma) / sigma,
    })
}

/// Combined report of the standard analyses run on the transformed sequence.
#[derive(Debug)]
pub struct TransformedAnalysis {
    /// Bulirsch-Stoer (w = 1) limit of the transformed ratios.
    pub mu_bst: Option<(Float, Float)>,
    pub monotone_rows: usize,
    /// Exponent of `n^a` in `d_n ~ mu^n n^a` from ratio estimators.
    pub transformed_exponent: Option<Float>,
    /// `g` mapped back through the transform.
    pub g_estimate: Option<Float>,
    /// Survey of differential approximants on `d_n` plus its diagnostic.
    pub survey: Option<SurveyReport>,
    pub survey_g: Option<f64>,
    pub diagnosis: Option<Diagnosis>,
}

/// Ratios of the transformed sequence.
pub fn transformed_ratios(t: &TransformedSeries) -> RatioAnalysis {
    let prec = t.d.precision_bits();
    let start = t.d.start_index() + 1;
    let mut values = Vec::new();
    for n in start..=t.d.last_index() {
        let v = match (t.d.get(n), t.d.get(n - 1)) {
            (Some(a), Some(b)) if *b != 0 => Some(Float::with_val(prec, a / b)),
            _ => None,
        };
        values.push(v);
    }
    RatioAnalysis {
        r: RealSequence::new(values, start, prec),
        source_name: format!("transformed(sigma={})", t.sigma_used),
    }
}

/// Runs ratio, exponent-estimator, BST(w=1) and DA-survey analysis on the
/// transformed sequence.
pub fn transformed_analysis(
    t: &TransformedSeries,
    survey_config: Option<&SurveyConfig>,
    cfg: &PrecisionConfig,
) -> Result<TransformedAnalysis> {
    let prec = cfg.bits();
    let ra = transformed_ratios(t);

    let mut mu_bst = None;
    let mut rows = 0usize;
    if ra.r.defined_len() >= 8 {
        if let Ok(table) = bst_table(&ra.r, 1.0, 8.min(ra.r.defined_len() / 4), BstVariant::Rational)
        {
            rows = monotone_rows(&table);
            mu_bst = bst_limit(&table).ok();
        }
    }

    // exponent estimators n^2 (1 - r_n/r_{n-1}) -> a, extrapolated against 1/n
    let a_est: Option<Float>;
    {
        let start = ra.r.start_index() + 1;
        let mut values = Vec::new();
        for n in start..=ra.r.last_index() {
            let v = match (ra.r.get(n), ra.r.get(n - 1)) {
                (Some(rn), Some(rp)) if *rp != 0 => {
                    let q = Float::with_val(prec, rn / rp);
                    Some(Float::with_val(prec, n * n) * Float::with_val(prec, 1 - q))
                }
                _ => None,
            };
            values.push(v);
        }
        let seq = RealSequence::new(values, start, prec);
        a_est = tail_extrapolate(&seq, 1.0, default_window(seq.defined_len()));
    }
    let g_estimate = a_est
        .as_ref()
        .map(|a| Float::with_val(prec, a * Float::with_val(prec, t.exponent_map)));

    // DA survey on the transformed coefficients
    let mut survey = None;
    let mut survey_g = None;
    let mut diagnosis = None;
    if let Some(sc) = survey_config {
        let coeffs: Vec<Float> = (t.d.start_index()..=t.d.last_index())
            .map(|n| t.d.get(n).cloned().unwrap_or_else(|| Float::new(prec)))
            .collect();
        if let Ok(rep) = da_survey_from_floats(&coeffs, sc, cfg) {
            // d_m relabeled from 0: singularity location is unaffected,
            // exponent gamma relates to a by gamma = 1 + a
            survey_g = Some((rep.exponent_mean - 1.0) * t.exponent_map);
            diagnosis = Some(nonalgebraic_diagnostic(&rep, &DiagnosticThresholds::default()));
            survey = Some(rep);
        }
    }

    Ok(TransformedAnalysis {
        mu_bst,
        monotone_rows: rows,
        transformed_exponent: a_est,
        g_estimate,
        survey,
        survey_g,
        diagnosis,
    })
}
