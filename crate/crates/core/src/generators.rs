//! Exact coefficient sequences for the benchmark families, the built-in
//! triangular SAP table, and coefficient-file ingestion.

use crate::exact::ExactSeries;
use crate::{Error, Result};
use rug::ops::Pow;
use rug::{Complete, Integer, Rational};
use std::fmt;
use std::path::Path;

/// Where a coefficient sequence came from; recorded in every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    QSeries,
    DynamicProgram,
    File,
    FileInexact,
    BuiltinTable,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::QSeries => "q-series",
            Provenance::DynamicProgram => "dynamic-program",
            Provenance::File => "file",
            Provenance::FileInexact => "file (decimal input, flagged inexact)",
            Provenance::BuiltinTable => "builtin-table",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientSource {
    pub name: String,
    pub series: ExactSeries,
    pub provenance: Provenance,
}

/// Coefficients of `exp(lambda*z / (1 - lambda*z))`, exact.
///
/// `lambda = 1` is the EGF of fragmented permutations; the benchmark uses
/// `lambda = 2`.
pub fn fragmented_permutations(order: usize, lambda: &Rational) -> CoefficientSource {
    assert!(*lambda > 0, "lambda must be positive");
    // u_k = lambda^k for k >= 1
    let mut u = Vec::with_capacity(order + 1);
    u.push(Rational::new());
    let mut p = Rational::from(1);
    for _ in 1..=order {
        p *= lambda;
        u.push(p.clone());
    }
    let series = ExactSeries::new(u, 1).exp(order).expect("constant term is zero");
    CoefficientSource {
        name: format!("fragmented-permutations(lambda={lambda})"),
        series,
        provenance: Provenance::ClosedForm,
    }
}

/// Height-weighted Dyck path series: entry `n` is `sum_h d_{n,h} y^h` where
/// `d_{n,h}` counts Dyck paths of length `2n` with maximum height exactly `h`.
/// The result is a series in `x^2` (`var_step = 2`); `order` is the highest
/// power of `x` and must be even.
pub fn dyck_height_series(order: usize, y: &Rational) -> Result<CoefficientSource> {
    if order % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "dyck series order must be even, got {order}"
        )));
    }
    assert!(*y > 0, "y must be positive");
    let nmax = order / 2;
    let mut coeffs = vec![Rational::new(); nmax + 1];
    coeffs[0] = Rational::from(1);

    // Counts of paths of length 2n confined to heights 0..=h, for h and h-1.
    let mut prev = vec![Integer::new(); nmax + 1]; // h = 0
    prev[0] = Integer::from(1);
    let mut ypow = Rational::from(1);
    for h in 1..=nmax {
        ypow *= y;
        let cur = bounded_height_counts(nmax, h);
        for n in 1..=nmax {
            let diff = (&cur[n] - &prev[n]).complete();
            if diff != 0 {
                coeffs[n] += diff * ypow.clone();
            }
        }
        prev = cur;
    }
    Ok(CoefficientSource {
        name: format!("dyck-height(y={y})"),
        series: ExactSeries::new(coeffs, 2),
        provenance: Provenance::DynamicProgram,
    })
}

/// Dyck paths of length `2n` staying within `0..=h`, for all `n <= nmax`.
fn bounded_height_counts(nmax: usize, h: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); nmax + 1];
    out[0] = Integer::from(1);
    let mut cur = vec![Integer::new(); h + 1];
    cur[0] = Integer::from(1);
    let mut next = vec![Integer::new(); h + 1];
    for step in 1..=2 * nmax {
        for v in next.iter_mut() {
            *v = Integer::new();
        }
        for (ht, c) in cur.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if ht + 1 <= h {
                next[ht + 1] += c;
            }
            if ht > 0 {
                next[ht - 1] += c;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        if step % 2 == 0 {
            out[step / 2] = cur[0].clone();
        }
    }
    out
}

/// Interacting partially directed self-avoiding walks at fixed interaction
/// weight `y`: entry `n` is the contact-weight sum over walks with `n` sites
/// (equivalently `n-1` steps), so the series starts `x + 3x^2 + ...`.
///
/// Exact q-series of the solved model, with the coefficient polynomials taken
/// in their general-`y` form `a = x^2*(2 + (1-y)x)`, `b = x^2*((1+y) + (1-y)x)`.
/// At `y = 1` the numerator and denominator vanish identically, so the
/// interaction-free walk series `x(1+x)/(1-2x-x^2)` is produced instead.
pub fn ipdsaw_series(order: usize, y: &Rational) -> Result<CoefficientSource> {
    if order < 1 {
        return Err(Error::InvalidArgument("ipdsaw order must be >= 1".into()));
    }
    assert!(*y > 0, "y must be positive");
    if *y == 1 {
        let num = ExactSeries::from_integers(&[0, 1, 1]);
        let den = ExactSeries::from_integers(&[1, -2, -1]);
        let series = num.mul(&den.inv(order)?, order)?;
        return Ok(CoefficientSource {
            name: "ipdsaw(y=1)".into(),
            series,
            provenance: Provenance::ClosedForm,
        });
    }

    let hroom = order + 2;
    let mut g0 = vec![Rational::new(); hroom + 1];
    g0[0] = Rational::from(1);
    let mut g1 = vec![Rational::new(); hroom + 1];
    g1[1] = Rational::from(1);

    // Running product of the normalized q-factor inverses
    //   1/(1-(xy)^j) * 1/(1-x^j y^{j-1})
    let mut running = vec![Rational::new(); hroom + 1];
    running[0] = Rational::from(1);
    let one_minus_y = Rational::from(1) - y;

    let mut j = 1usize;
    while j + j * (j + 1) / 2 <= order {
        let ju = j as u32;
        running = mul_trunc(&running, &geometric_inverse(y.clone().pow(ju), j, hroom), hroom);
        running = mul_trunc(
            &running,
            &geometric_inverse(y.clone().pow(ju - 1), j, hroom),
            hroom,
        );
        // g0 term: x^{j+j(j+1)/2} (1-y)^j y^{j(j-1)/2} * running
        let d0 = j + j * (j + 1) / 2;
        let c0 = one_minus_y.clone().pow(ju) * y.clone().pow((j * (j - 1) / 2) as u32);
        // g1 term: x^{1+2j+j(j+1)/2} (1-y)^j y^{j(j+1)/2} * running
        let d1 = 1 + 2 * j + j * (j + 1) / 2;
        let c1 = one_minus_y.clone().pow(ju) * y.clone().pow((j * (j + 1) / 2) as u32);
        for (k, r) in running.iter().enumerate() {
            if *r == 0 {
                continue;
            }
            if k + d0 <= hroom {
                g0[k + d0] += (r * &c0).complete();
            }
            if k + d1 <= hroom {
                g1[k + d1] += (r * &c1).complete();
            }
        }
        j += 1;
    }

    // numerator 2x*g1 - a*g0, denominator b*g0 - 2x*g1,
    // a = x^2(2 + (1-y)x), b = x^2((1+y) + (1-y)x)
    let one_plus_y = Rational::from(1) + y;
    let mut num = vec![Rational::new(); hroom + 1];
    let mut den = vec![Rational::new(); hroom + 1];
    for k in 0..hroom {
        if g1[k] != 0 {
            let t = &g1[k] * Rational::from(2);
            num[k + 1] += &t;
            den[k + 1] -= &t;
        }
    }
    for k in 0..hroom.saturating_sub(1) {
        if g0[k] == 0 {
            continue;
        }
        num[k + 2] -= &g0[k] * Rational::from(2);
        den[k + 2] += (&g0[k] * &one_plus_y).complete();
        if k + 3 <= hroom {
            num[k + 3] -= (&g0[k] * &one_minus_y).complete();
            den[k + 3] += (&g0[k] * &one_minus_y).complete();
        }
    }

    let dval = den.iter().position(|c| *c != 0).unwrap_or(usize::MAX);
    if dval != 2 {
        return Err(Error::InvalidArgument(format!(
            "ipdsaw denominator valuation {dval}, expected 2 after removing x^2 prefactor"
        )));
    }
    let nval = num.iter().position(|c| *c != 0).unwrap_or(hroom + 1);
    if nval < dval {
        return Err(Error::InvalidArgument(
            "ipdsaw numerator valuation below denominator".into(),
        ));
    }
    let dsh = ExactSeries::new(den[dval..].to_vec(), 1);
    let nsh = ExactSeries::new(num[dval..].to_vec(), 1);
    let series = nsh.mul(&dsh.inv(order)?, order)?;
    Ok(CoefficientSource {
        name: format!("ipdsaw(y={y})"),
        series,
        provenance: Provenance::QSeries,
    })
}

/// `(1 - coef*x^k)^{-1}` through `order`: the explicit geometric series.
fn geometric_inverse(coef: Rational, k: usize, order: usize) -> Vec<Rational> {
    let mut v = vec![Rational::new(); order + 1];
    let mut c = Rational::from(1);
    let mut m = 0usize;
    while m <= order {
        v[m] = c.clone();
        c *= &coef;
        m += k;
    }
    v
}

fn mul_trunc(a: &[Rational], b: &[Rational], order: usize) -> Vec<Rational> {
    let mut out = vec![Rational::new(); order + 1];
    for (i, ai) in a.iter().enumerate().take(order + 1) {
        if *ai == 0 {
            continue;
        }
        for (jj, bj) in b.iter().enumerate().take(order + 1 - i) {
            if *bj == 0 {
                continue;
            }
            out[i + jj] += (ai * bj).complete();
        }
    }
    out
}

/// Triangular-lattice self-avoiding-polygon counts `p_3 .. p_26`, zero-padded
/// below index 3.
pub fn triangular_sap_coefficients() -> CoefficientSource {
    const TABLE: [u64; 24] = [
        2,
        3,
        6,
        15,
        42,
        123,
        380,
        1212,
        3966,
        13265,
        45144,
        155955,
        545690,
        1930635,
        6897210,
        24852576,
        90237582,
        329896569,
        1213528736,
        4489041219,
        16690581534,
        62346895571,
        233893503330,
        880918093866,
    ];
    let mut coeffs = vec![Rational::new(); 3];
    coeffs.extend(TABLE.iter().map(|&v| Rational::from(v)));
    CoefficientSource {
        name: "triangular-sap".into(),
        series: ExactSeries::new(coeffs, 1),
        provenance: Provenance::BuiltinTable,
    }
}

/// Reads a coefficient file: one coefficient per line (`p/q`, integer, or
/// decimal, converted exactly), `#` comments and blank lines ignored.
/// Directives `# start=K` and `# var_step=S` set the leading index and the
/// variable step; a `start` directive zero-pads the series below `K`.
pub fn load_coefficients(path: &Path) -> Result<CoefficientSource> {
    let text = std::fs::read_to_string(path)?;
    let mut start: usize = 0;
    let mut var_step: u32 = 1;
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut any_decimal = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("start=") {
                start = v.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad start directive: {rest}"),
                })?;
            } else if let Some(v) = rest.strip_prefix("var_step=") {
                var_step = v.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad var_step directive: {rest}"),
                })?;
            }
            continue;
        }
        let val = parse_coefficient(line).ok_or_else(|| Error::Parse {
            line: lineno + 1,
            msg: format!("cannot parse coefficient: {line}"),
        })?;
        any_decimal |= val.1;
        coeffs.push(val.0);
    }
    if coeffs.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no coefficients in file".into(),
        });
    }
    let mut padded = vec![Rational::new(); start];
    padded.extend(coeffs);
    Ok(CoefficientSource {
        name: path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "input".into()),
        series: ExactSeries::new(padded, var_step),
        provenance: if any_decimal {
            Provenance::FileInexact
        } else {
            Provenance::File
        },
    })
}

/// Parses "p/q", integer, or decimal. Returns the value and whether the text
/// was a decimal literal.
fn parse_coefficient(s: &str) -> Option<(Rational, bool)> {
    if let Ok(r) = s.parse::<Rational>() {
        return Some((r, false));
    }
    // decimal like -12.345 or 1e-3 is not accepted by rug's parser; handle
    // the plain fixed-point form exactly
    if let Some(dot) = s.find('.') {
        let (int_part, frac_part) = s.split_at(dot);
        let frac_part = &frac_part[1..];
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int_part.starts_with('-');
        let int_val = if int_part == "-" || int_part.is_empty() {
            Integer::new()
        } else {
            int_part.parse::<Integer>().ok()?
        };
        let num = frac_part.parse::<Integer>().ok()?;
        let den = Integer::from(10).pow(frac_part.len() as u32);
        let mut r = Rational::from((num, den));
        if neg {
            r = -r;
            r += int_val;
        } else {
            r += int_val;
        }
        return Some((r, true));
    }
    None
}

/// Writes a coefficient file in the same format `load_coefficients` reads.
pub fn save_coefficients(source: &CoefficientSource, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", source.name));
    if source.series.var_step() != 1 {
        out.push_str(&format!("# var_step={}\n", source.series.var_step()));
    }
    let start = source.series.valuation().unwrap_or(0);
    if start > 0 {
        out.push_str(&format!("# start={start}\n"));
    }
    for c in &source.series.coeffs()[start..] {
        out.push_str(&format!("{c}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}
