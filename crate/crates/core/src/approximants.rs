//! Pade approximants, Dlog-Pade singularity analysis, and Mth-order
//! inhomogeneous differential approximants with indicial-equation exponents
//! and survey-style aggregation.

use crate::exact::ExactSeries;
use crate::linalg::solve_rank_revealing;
use crate::poly::{Complex, RealPoly};
use crate::precision::PrecisionConfig;
use crate::sequence::FloatPowF64;
use crate::{Error, Result};
use rug::Float;

/// `P/Q` with `Q(0) = 1`, matching the input series through order `i+j`.
#[derive(Debug, Clone)]
pub struct RationalApproximant {
    pub p: RealPoly,
    pub q: RealPoly,
}

impl RationalApproximant {
    pub fn eval(&self, z: &Complex) -> Complex {
        self.p.eval(z).div(&self.q.eval(z))
    }
}

/// Order-M inhomogeneous ODE `sum_k Q_k(z) (z d/dz)^k F = P(z)` fitted to a
/// series, normalized by `Q_M(0) = 1`.
#[derive(Debug, Clone)]
pub struct DiffApproximant {
    pub order: usize,
    pub qs: Vec<RealPoly>,
    pub p: RealPoly,
    /// Relative residual of the matching conditions.
    pub residual: Float,
    /// Number of series coefficients matched.
    pub coefficients_used: usize,
}

/// Classification of a located singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityClass {
    Physical,
    Spurious,
    Defect,
}

#[derive(Debug, Clone)]
pub struct SingularityEstimate {
    pub location: Complex,
    /// Divergence-convention exponent `gamma` (`F ~ (1 - z/zc)^{-gamma}`);
    /// `None` for clustered (non-simple) roots.
    pub exponent: Option<Complex>,
    pub approximant_id: String,
    pub classification: SingularityClass,
}

/// Pade approximant with numerator degree `i`, denominator degree `j`.
///
/// Solved with the rank-revealing eliminator so that degenerate blocks (the
/// input being a rational function of lower degree) fall back to the minimal
/// solution; an inconsistent system is reported as a defect.
pub fn pade(s: &ExactSeries, i: usize, j: usize, cfg: &PrecisionConfig) -> Result<RationalApproximant> {
    let need = i + j + 1;
    if need > s.len() {
        return Err(Error::NotEnoughPoints {
            got: s.len(),
            need,
        });
    }
    let prec = cfg.bits();
    let c: Vec<Float> = s
        .coeffs()
        .iter()
        .take(need)
        .map(|x| Float::with_val(prec, x))
        .collect();
    // unknowns: q_1..q_j, p_0..p_i ; equations m = 0..i+j:
    //   sum_{k=0..j} q_k c_{m-k} - p_m = 0  (p_m = 0 for m > i), q_0 = 1
    let rows_n = i + j + 1;
    let cols_n = i + j + 1;
    let mut a = vec![vec![Float::new(prec); cols_n]; rows_n];
    let mut y = vec![Float::new(prec); rows_n];
    for (m, ym) in y.iter_mut().enumerate() {
        for k in 1..=j.min(m) {
            a[m][k - 1] = c[m - k].clone();
        }
        if m <= i {
            a[m][j + m] = Float::with_val(prec, -1);
        }
        *ym = Float::with_val(prec, -&c[m]);
    }
    let (x, res) = solve_rank_revealing(&a, &y, prec);
    if res.to_f64() > 1e-20 {
        return Err(Error::Defect(format!(
            "pade({i},{j}) matching system inconsistent, residual {:.2e}",
            res.to_f64()
        )));
    }
    let mut q = vec![Float::with_val(prec, 1)];
    q.extend(x[..j].iter().cloned());
    let p = x[j..].to_vec();
    Ok(RationalApproximant {
        p: RealPoly::new(p),
        q: RealPoly::new(q),
    })
}

/// Pade analysis of the logarithmic derivative `F'/F` (computed exactly):
/// poles approximate singularities, residues give divergence exponents.
pub fn dlog_pade(
    s: &ExactSeries,
    i: usize,
    j: usize,
    cfg: &PrecisionConfig,
) -> Result<Vec<SingularityEstimate>> {
    if s.coeff(0) == 0 {
        return Err(Error::InvalidArgument(
            "dlog-pade needs a nonzero constant term".into(),
        ));
    }
    let prec = cfg.bits();
    let order = i + j;
    let ld = s.log_derivative(order)?;
    let approx = pade(&ld, i, j, cfg)?;
    let id = format!("dlog-pade({i},{j})");
    let roots = approx.q.roots(prec);
    let qd = approx.q.derivative();
    let mut out = Vec::new();
    for (ri, z) in roots.iter().enumerate() {
        // repeated-root flag: any other root within relative 1e-6
        let clustered = roots.iter().enumerate().any(|(rj, w)| {
            rj != ri && z.sub(w).abs() < Float::with_val(prec, 1e-6) * z.abs()
        });
        let qdv = qd.eval(z);
        let exponent = if clustered || qdv.norm2() == 0 {
            None
        } else {
            // gamma = lim (zc - z) P/Q = -P(zc)/Q'(zc)
            let pv = approx.p.eval(z);
            let g = pv.div(&qdv);
            Some(Complex {
                re: -g.re,
                im: -g.im,
            })
        };
        out.push(SingularityEstimate {
            location: z.clone(),
            exponent,
            approximant_id: id.clone(),
            classification: SingularityClass::Spurious,
        });
    }
    Ok(out)
}

/// Builds an order-M differential approximant with coefficient-polynomial
/// degrees `degrees[k]` (k = 0..M) and inhomogeneous degree `l_deg`
/// (`None` = homogeneous). The variable is internally rescaled by the rough
/// radius of convergence so the matching matrix stays well-scaled.
pub fn diff_approximant(
    s: &ExactSeries,
    m_order: usize,
    degrees: &[usize],
    l_deg: Option<usize>,
    cfg: &PrecisionConfig,
) -> Result<DiffApproximant> {
    let reals = s.to_reals(cfg);
    let coeffs: Vec<Float> = (0..s.len())
        .map(|n| reals.get(n as i64).cloned().unwrap_or_else(|| Float::new(cfg.bits())))
        .collect();
    diff_approximant_from_floats(&coeffs, m_order, degrees, l_deg, cfg)
}

/// Same as `diff_approximant` for an already-rounded coefficient sequence
/// (used on transformed series, which are not exact).
pub fn diff_approximant_from_floats(
    coeffs: &[Float],
    m_order: usize,
    degrees: &[usize],
    l_deg: Option<usize>,
    cfg: &PrecisionConfig,
) -> Result<DiffApproximant> {
    if m_order < 1 {
        return Err(Error::InvalidArgument("need order M >= 1".into()));
    }
    if degrees.len() != m_order + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} polynomial degrees, got {}",
            m_order + 1,
            degrees.len()
        )));
    }
    let prec = cfg.bits();
    let l_terms = l_deg.map_or(0, |l| l + 1);
    let k_eqs = l_terms + degrees.iter().map(|d| d + 1).sum::<usize>() - 1;
    if k_eqs > coeffs.len() {
        return Err(Error::NotEnoughPoints {
            got: coeffs.len(),
            need: k_eqs,
        });
    }

    // rescale by the rough radius so coefficients are O(1)
    let rho = rough_radius(coeffs, prec);
    let mut scaled = Vec::with_capacity(k_eqs);
    let mut rp = Float::with_val(prec, 1);
    for c in coeffs.iter().take(k_eqs) {
        scaled.push(Float::with_val(prec, c * &rp));
        rp *= &rho;
    }

    // unknown layout: q_{k,i} (skipping q_{M,0} = 1), then p_0..p_L
    let mut layout: Vec<(usize, usize)> = Vec::new();
    for (k, d) in degrees.iter().enumerate() {
        for i in 0..=*d {
            if k == m_order && i == 0 {
                continue;
            }
            layout.push((k, i));
        }
    }
    let n_unknowns = layout.len() + l_terms;
    let mut a = vec![vec![Float::new(prec); n_unknowns]; k_eqs];
    let mut y = vec![Float::new(prec); k_eqs];
    for (m_row, (arow, yv)) in a.iter_mut().zip(y.iter_mut()).enumerate() {
        // theta^k acts as n^k on coefficient n
        for (col, (k, i)) in layout.iter().enumerate() {
            if *i > m_row {
                continue;
            }
            let n_idx = m_row - i;
            let v = Float::with_val(prec, theta_factor(n_idx, *k, prec) * &scaled[n_idx]);
            arow[col] = v;
        }
        for li in 0..l_terms {
            if li == m_row {
                arow[layout.len() + li] = Float::with_val(prec, -1);
            }
        }
        // q_{M,0} = 1 contributes theta^M at offset 0
        *yv = -Float::with_val(prec, theta_factor(m_row, m_order, prec) * &scaled[m_row]);
    }
    let (x, res) = solve_rank_revealing(&a, &y, prec);
    let threshold = Float::with_val(prec, 10f64).pow_f64(-(cfg.digits() as f64) / 2.0);
    if res > threshold {
        return Err(Error::Defect(format!(
            "DA(M={m_order}, degrees={degrees:?}, L={l_deg:?}) residual {:.2e}",
            res.to_f64()
        )));
    }

    // assemble polynomials, mapping coefficients back to the original variable
    let mut qs = Vec::with_capacity(m_order + 1);
    let mut pos = 0usize;
    for (k, d) in degrees.iter().enumerate() {
        let mut cs = Vec::with_capacity(d + 1);
        let mut rinv = Float::with_val(prec, 1);
        for i in 0..=*d {
            let raw = if k == m_order && i == 0 {
                Float::with_val(prec, 1)
            } else {
                let v = x[pos].clone();
                pos += 1;
                v
            };
            cs.push(Float::with_val(prec, raw * &rinv));
            rinv = Float::with_val(prec, &rinv / &rho);
        }
        qs.push(RealPoly::new(cs));
    }
    let mut p_cs = Vec::with_capacity(l_terms);
    let mut rinv = Float::with_val(prec, 1);
    for li in 0..l_terms {
        p_cs.push(Float::with_val(prec, x[layout.len() + li].clone() * &rinv));
        rinv = Float::with_val(prec, &rinv / &rho);
    }
    if p_cs.is_empty() {
        p_cs.push(Float::new(prec));
    }
    Ok(DiffApproximant {
        order: m_order,
        qs,
        p: RealPoly::new(p_cs),
        residual: res,
        coefficients_used: k_eqs,
    })
}

fn theta_factor(n: usize, k: usize, prec: u32) -> Float {
    if k == 0 {
        Float::with_val(prec, 1)
    } else {
        Float::with_val(prec, n as u64).pow_f64(k as f64)
    }
}

fn rough_radius(coeffs: &[Float], prec: u32) -> Float {
    for w in (1..coeffs.len()).rev() {
        if coeffs[w] != 0 && coeffs[w - 1] != 0 {
            let r = Float::with_val(prec, &coeffs[w - 1] / &coeffs[w]).abs();
            if r != 0 {
                return r;
            }
        }
    }
    Float::with_val(prec, 1)
}

/// Roots of `Q_M` with indicial exponents.
///
/// The divergence-convention exponent at a simple root `z_i` is
/// `gamma_i = -(M - 1 - Q_{M-1}(z_i) / (z_i Q_M'(z_i)))`, so that the Pade
/// residue convention and the DA convention agree on `(1-mu z)^{-gamma}`.
/// Roots closer than a relative `cluster_tol` to another root are flagged
/// non-simple and carry no exponent.
pub fn da_singularities(d: &DiffApproximant, cfg: &PrecisionConfig) -> Vec<SingularityEstimate> {
    da_singularities_with(d, cfg, 1e-6)
}

pub fn da_singularities_with(
    d: &DiffApproximant,
    cfg: &PrecisionConfig,
    cluster_tol: f64,
) -> Vec<SingularityEstimate> {
    let prec = cfg.bits();
    let qm = &d.qs[d.order];
    let roots = qm.roots(prec);
    let qd = qm.derivative();
    let qm1 = &d.qs[d.order - 1];
    let id = format!("DA(M={})", d.order);
    let mut out = Vec::new();
    for (ri, z) in roots.iter().enumerate() {
        let clustered = roots.iter().enumerate().any(|(rj, w)| {
            rj != ri && z.sub(w).abs() < Float::with_val(prec, cluster_tol) * z.abs()
        });
        let exponent = if clustered {
            None
        } else {
            let qdv = qd.eval(z);
            let denom = z.mul(&qdv);
            if denom.norm2() == 0 {
                None
            } else {
                let frac = qm1.eval(z).div(&denom);
                let mm1 = Float::with_val(prec, d.order as u64 - 1);
                // gamma = -(M - 1 - frac)
                Some(Complex {
                    re: Float::with_val(prec, &frac.re - &mm1),
                    im: frac.im.clone(),
                })
            }
        };
        out.push(SingularityEstimate {
            location: z.clone(),
            exponent,
            approximant_id: id.clone(),
            classification: SingularityClass::Spurious,
        });
    }
    out
}

/// Survey configuration. Degrees run over `degree_window` (same degree for
/// every `Q_k`); only approximants consuming at least `min_usage` of the
/// available coefficients enter, which keeps the survey anchored to the
/// best-informed fits.
#[derive(Debug, Clone)]
pub struct SurveyConfig {
    pub orders: Vec<usize>,
    /// Inclusive degree range for the coefficient polynomials; `None` means
    /// "as large as the series allows".
    pub degree_window: Option<(usize, usize)>,
    pub l_values: Vec<Option<usize>>,
    /// Positive-real-axis search window for the physical singularity.
    pub search_window: (f64, f64),
    pub min_usage: f64,
    /// Candidate roots with |exponent| below this are apparent singularities
    /// of the ODE, not of the function; they are ignored.
    pub apparent_exponent_tol: f64,
    /// Relative width of the root cluster used to aggregate across
    /// approximants.
    pub cluster_width: f64,
    /// Relative imaginary-part tolerance for "on the positive real axis".
    pub imag_tol: f64,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        Self {
            orders: vec![2, 3],
            degree_window: None,
            l_values: vec![None, Some(0), Some(1), Some(2), Some(3)],
            search_window: (1e-6, f64::INFINITY),
            min_usage: 0.8,
            apparent_exponent_tol: 0.1,
            cluster_width: 0.005,
            imag_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApproximantRow {
    pub m_order: usize,
    pub degree: usize,
    pub l_deg: Option<usize>,
    pub zc: f64,
    pub exponent: f64,
    /// Real-axis singularities in the window other than the physical pick.
    pub other_real: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SurveyReport {
    pub rows: Vec<ApproximantRow>,
    pub zc_mean: f64,
    pub zc_std: f64,
    pub exponent_mean: f64,
    pub exponent_std: f64,
    pub defects: usize,
    pub used: usize,
    /// All real-axis candidate locations seen (sorted), for the
    /// concentration diagnostic.
    pub real_axis_candidates: Vec<f64>,
}

/// Runs a survey of differential approximants. Every candidate real-axis
/// singularity (excluding apparent ones) is collected; the densest relative
/// cluster anchors the per-approximant physical pick, and the aggregate is a
/// mean and standard deviation after one 3-sigma trim.
pub fn da_survey(s: &ExactSeries, config: &SurveyConfig, cfg: &PrecisionConfig) -> Result<SurveyReport> {
    let reals = s.to_reals(cfg);
    let coeffs: Vec<Float> = (0..s.len())
        .map(|n| reals.get(n as i64).cloned().unwrap_or_else(|| Float::new(cfg.bits())))
        .collect();
    da_survey_from_floats(&coeffs, config, cfg)
}

pub fn da_survey_from_floats(
    coeffs: &[Float],
    config: &SurveyConfig,
    cfg: &PrecisionConfig,
) -> Result<SurveyReport> {
    let navail = coeffs.len();
    let mut defects = 0usize;
    // (m, d, l, candidates)
    let mut per_approx: Vec<(usize, usize, Option<usize>, Vec<(f64, f64)>)> = Vec::new();
    for &m_order in &config.orders {
        for l in &config.l_values {
            let l_terms = l.map_or(0, |x| x + 1);
            let dmax_fit = (navail + 1 - l_terms) / (m_order + 1) - 1;
            let (dlo, dhi) = match config.degree_window {
                Some((a, b)) => (a, b.min(dmax_fit)),
                None => (dmax_fit.saturating_sub(2).max(1), dmax_fit),
            };
            for d in dlo..=dhi {
                let k_used = l_terms + (m_order + 1) * (d + 1) - 1;
                if k_used > navail || (k_used as f64) < config.min_usage * navail as f64 {
                    continue;
                }
                let degrees = vec![d; m_order + 1];
                let da = match diff_approximant_from_floats(coeffs, m_order, &degrees, *l, cfg) {
                    Ok(da) => da,
                    Err(_) => {
                        defects += 1;
                        continue;
                    }
                };
                let sings = da_singularities(&da, cfg);
                let cands: Vec<(f64, f64)> = sings
                    .iter()
                    .filter_map(|se| {
                        if !se.location.is_effectively_real(config.imag_tol) {
                            return None;
                        }
                        let zr = se.location.re.to_f64();
                        if zr <= config.search_window.0 || zr >= config.search_window.1 {
                            return None;
                        }
                        let ex = se.exponent.as_ref()?.re.to_f64();
                        if ex.abs() <= config.apparent_exponent_tol {
                            return None;
                        }
                        Some((zr, ex))
                    })
                    .collect();
                if cands.is_empty() {
                    continue;
                }
                per_approx.push((m_order, d, *l, cands));
            }
        }
    }
    if per_approx.is_empty() {
        return Err(Error::AllDefective);
    }

    let mut allz: Vec<f64> = per_approx
        .iter()
        .flat_map(|(_, _, _, c)| c.iter().map(|(z, _)| *z))
        .collect();
    allz.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // densest relative window
    let (mut bi, mut bj) = (0usize, 1usize);
    let mut j = 0usize;
    for i in 0..allz.len() {
        if j < i + 1 {
            j = i + 1;
        }
        while j < allz.len() && allz[j] <= allz[i] * (1.0 + config.cluster_width) {
            j += 1;
        }
        if j - i > bj - bi {
            bi = i;
            bj = j;
        }
    }
    let cluster = &allz[bi..bj];
    let center = cluster[cluster.len() / 2];
    let spread = (cluster[cluster.len() - 1] - center)
        .max(center - cluster[0])
        .max(center * config.cluster_width);

    let mut rows: Vec<ApproximantRow> = Vec::new();
    for (m_order, d, l, cands) in &per_approx {
        let (z, ex) = cands
            .iter()
            .min_by(|a, b| {
                (a.0 - center)
                    .abs()
                    .partial_cmp(&(b.0 - center).abs())
                    .unwrap()
            })
            .unwrap();
        if (z - center).abs() <= 2.0 * spread {
            let other: Vec<f64> = cands
                .iter()
                .map(|(zz, _)| *zz)
                .filter(|zz| (zz - z).abs() > 1e-12)
                .collect();
            rows.push(ApproximantRow {
                m_order: *m_order,
                degree: *d,
                l_deg: *l,
                zc: *z,
                exponent: *ex,
                other_real: other,
            });
        }
    }
    if rows.is_empty() {
        return Err(Error::AllDefective);
    }

    let (zc_mean, zc_std, exponent_mean, exponent_std, kept) = aggregate(&rows);
    Ok(SurveyReport {
        rows,
        zc_mean,
        zc_std,
        exponent_mean,
        exponent_std,
        defects,
        used: kept,
        real_axis_candidates: allz,
    })
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, var.sqrt())
}

/// Mean and population standard deviation with one 3-sigma trim pass.
fn aggregate(rows: &[ApproximantRow]) -> (f64, f64, f64, f64, usize) {
    let zs: Vec<f64> = rows.iter().map(|r| r.zc).collect();
    let (mz, sz) = mean_std(&zs);
    let keep: Vec<&ApproximantRow> = if sz > 0.0 {
        rows.iter().filter(|r| (r.zc - mz).abs() <= 3.0 * sz).collect()
    } else {
        rows.iter().collect()
    };
    let zs2: Vec<f64> = keep.iter().map(|r| r.zc).collect();
    let es2: Vec<f64> = keep.iter().map(|r| r.exponent).collect();
    let (mz2, sz2) = mean_std(&zs2);
    let (me2, se2) = mean_std(&es2);
    (mz2, sz2, me2, se2, keep.len())
}

/// Thresholds for the non-algebraic-singularity diagnostic.
#[derive(Debug, Clone)]
pub struct DiagnosticThresholds {
    pub zc_relative_spread: f64,
    pub exponent_magnitude: f64,
    pub exponent_spread: f64,
    pub extra_singularities: usize,
    pub extra_radius_factor: f64,
}

impl Default for DiagnosticThresholds {
    fn default() -> Self {
        Self {
            zc_relative_spread: 1e-3,
            exponent_magnitude: 4.0,
            exponent_spread: 1.0,
            extra_singularities: 3,
            extra_radius_factor: 1.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Diagnosis {
    pub suspect_nonalgebraic: bool,
    pub poor_zc_convergence: bool,
    pub unrealistic_exponent: bool,
    pub real_axis_concentration: bool,
}

/// Interprets a survey: poorly converged critical points, unrealistic or
/// scattered exponents, and a concentration of additional real-axis
/// singularities together signal that no algebraic singularity explains the
/// series.
pub fn nonalgebraic_diagnostic(report: &SurveyReport, th: &DiagnosticThresholds) -> Diagnosis {
    let poor_zc = report.zc_mean != 0.0 && report.zc_std / report.zc_mean.abs() > th.zc_relative_spread;
    let bad_exp = report.exponent_mean.abs() > th.exponent_magnitude
        || report.exponent_std > th.exponent_spread;
    // distinct extra real-axis singularities within factor of the physical one
    let mut extras: Vec<f64> = Vec::new();
    for z in &report.real_axis_candidates {
        if (z - report.zc_mean).abs() <= 3.0 * report.zc_std.max(report.zc_mean.abs() * 1e-3) {
            continue;
        }
        if *z > report.zc_mean * th.extra_radius_factor || *z < report.zc_mean {
            continue;
        }
        if extras.iter().all(|e| (z - e).abs() > 0.004 * z.abs()) {
            extras.push(*z);
        }
    }
    let concentration = extras.len() >= th.extra_singularities;
    Diagnosis {
        suspect_nonalgebraic: poor_zc || bad_exp || concentration,
        poor_zc_convergence: poor_zc,
        unrealistic_exponent: bad_exp,
        real_axis_concentration: concentration,
    }
}
