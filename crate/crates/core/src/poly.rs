//! Polynomials with working-precision real coefficients, a small complex
//! type over `rug::Float`, and root finding (f64 companion-matrix eigenvalues
//! refined by Newton iteration at working precision).

use nalgebra::DMatrix;
use rug::Float;

#[derive(Debug, Clone)]
pub struct RealPoly {
    /// Coefficients, ascending powers.
    pub coeffs: Vec<Float>,
}

impl RealPoly {
    pub fn new(coeffs: Vec<Float>) -> Self {
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len().saturating_sub(1);
        while d > 0 && self.coeffs[d] == 0 {
            d -= 1;
        }
        d
    }

    /// Degree ignoring trailing coefficients below `tol` in absolute value.
    pub fn effective_degree(&self, tol: &Float) -> usize {
        let mut d = self.coeffs.len().saturating_sub(1);
        while d > 0 && self.coeffs[d].clone().abs() < *tol {
            d -= 1;
        }
        d
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        let prec = z.re.prec();
        let mut acc = Complex::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z);
            acc.re += c;
        }
        acc
    }

    pub fn eval_real(&self, x: &Float) -> Float {
        let prec = x.prec();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> RealPoly {
        if self.coeffs.len() <= 1 {
            return RealPoly::new(vec![Float::new(self.coeffs[0].prec())]);
        }
        let d = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Float::with_val(c.prec(), c * Float::with_val(c.prec(), i as u64)))
            .collect();
        RealPoly::new(d)
    }

    /// All roots of the polynomial up to its effective degree, at working
    /// precision: f64 companion-matrix eigenvalues seeded into Newton.
    pub fn roots(&self, prec: u32) -> Vec<Complex> {
        let tiny = Float::with_val(prec, 1e-60);
        let deg = self.effective_degree(&tiny);
        if deg == 0 {
            return Vec::new();
        }
        // normalize to f64 monic for the companion matrix
        let lead = self.coeffs[deg].to_f64();
        let mut monic = Vec::with_capacity(deg);
        for i in 0..deg {
            monic.push(self.coeffs[i].to_f64() / lead);
        }
        let mut m = DMatrix::<f64>::zeros(deg, deg);
        for i in 0..deg {
            m[(i, deg - 1)] = -monic[i];
            if i + 1 < deg {
                m[(i + 1, i)] = 1.0;
            }
        }
        let eigs = m.complex_eigenvalues();
        let dpoly = self.derivative();
        let mut out = Vec::with_capacity(deg);
        for e in eigs.iter() {
            let mut z = Complex::from_f64(e.re, e.im, prec);
            // Newton polish at working precision
            for _ in 0..80 {
                let f = self.eval(&z);
                let df = dpoly.eval(&z);
                if df.norm2() == 0 {
                    break;
                }
                let step = f.div(&df);
                let done = {
                    let rel = step.norm2().sqrt()
                        / (z.norm2().sqrt() + Float::with_val(prec, 1e-30));
                    rel < Float::with_val(prec, 2f64).pow_i64(-(prec as i64) + 8)
                };
                z = z.sub(&step);
                if done {
                    break;
                }
            }
            out.push(z);
        }
        out
    }
}

/// Complex number over rug::Float.
#[derive(Debug, Clone)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn real(re: Float) -> Self {
        let prec = re.prec();
        Self {
            re,
            im: Float::new(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn add(&self, o: &Complex) -> Complex {
        let prec = self.prec();
        Complex {
            re: Float::with_val(prec, &self.re + &o.re),
            im: Float::with_val(prec, &self.im + &o.im),
        }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        let prec = self.prec();
        Complex {
            re: Float::with_val(prec, &self.re - &o.re),
            im: Float::with_val(prec, &self.im - &o.im),
        }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        let prec = self.prec();
        let re = Float::with_val(prec, &self.re * &o.re) - Float::with_val(prec, &self.im * &o.im);
        let im = Float::with_val(prec, &self.re * &o.im) + Float::with_val(prec, &self.im * &o.re);
        Complex { re, im }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let prec = self.prec();
        let d = o.norm2();
        let re = (Float::with_val(prec, &self.re * &o.re) + Float::with_val(prec, &self.im * &o.im)) / &d;
        let im = (Float::with_val(prec, &self.im * &o.re) - Float::with_val(prec, &self.re * &o.im)) / &d;
        Complex { re, im }
    }

    /// Squared modulus.
    pub fn norm2(&self) -> Float {
        let prec = self.prec();
        Float::with_val(prec, &self.re * &self.re) + Float::with_val(prec, &self.im * &self.im)
    }

    pub fn abs(&self) -> Float {
        self.norm2().sqrt()
    }

    pub fn is_effectively_real(&self, rel: f64) -> bool {
        let prec = self.prec();
        let a = self.abs();
        if a == 0 {
            return true;
        }
        self.im.clone().abs() < Float::with_val(prec, rel) * a
    }
}

trait PowI64 {
    fn pow_i64(self, e: i64) -> Float;
}

impl PowI64 for Float {
    fn pow_i64(self, e: i64) -> Float {
        use rug::ops::Pow;
        self.pow(e as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(x: f64) -> Float {
        Float::with_val(256, x)
    }

    #[test]
    fn eval_and_derivative() {
        // p = 1 - 3z + 2z^2
        let p = RealPoly::new(vec![fp(1.0), fp(-3.0), fp(2.0)]);
        assert_eq!(p.eval_real(&fp(2.0)).to_f64(), 3.0);
        let d = p.derivative();
        assert_eq!(d.eval_real(&fp(2.0)).to_f64(), 5.0);
    }

    #[test]
    fn roots_of_quadratic() {
        // (1 - 2z)(1 - 3z) = 1 - 5z + 6z^2
        let p = RealPoly::new(vec![fp(1.0), fp(-5.0), fp(6.0)]);
        let mut roots: Vec<f64> = p.roots(256).iter().map(|z| z.re.to_f64()).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((roots[0] - 1.0 / 3.0).abs() < 1e-60);
        assert!((roots[1] - 0.5).abs() < 1e-60);
    }

    #[test]
    fn roots_complex_pair() {
        // z^2 + 1
        let p = RealPoly::new(vec![fp(1.0), fp(0.0), fp(1.0)]);
        let roots = p.roots(256);
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert!(r.re.to_f64().abs() < 1e-60);
            assert!((r.im.to_f64().abs() - 1.0).abs() < 1e-60);
        }
    }

    #[test]
    fn newton_reaches_working_precision() {
        // root at exactly 1/3 of 3z - 1; degree-4 with noise roots
        let p = RealPoly::new(vec![fp(-1.0), fp(3.0), fp(0.0), fp(0.0), fp(1e-3)]);
        let roots = p.roots(256);
        let best = roots
            .iter()
            .filter(|z| z.is_effectively_real(1e-6))
            .map(|z| z.re.to_f64())
            .min_by(|a, b| {
                (a - 1.0 / 3.0).abs().partial_cmp(&(b - 1.0 / 3.0).abs()).unwrap()
            })
            .unwrap();
        // the quartic perturbs the root; just check Newton stabilized it way
        // beyond f64 (residual at the root tiny)
        let z = roots
            .iter()
            .min_by(|a, b| {
                let da = (a.re.to_f64() - best).abs();
                let db = (b.re.to_f64() - best).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let resid = p.eval(z).abs().to_f64();
        assert!(resid < 1e-65, "residual {resid}");
    }

    #[test]
    fn effective_degree_ignores_noise() {
        let p = RealPoly::new(vec![fp(1.0), fp(2.0), fp(1e-70)]);
        assert_eq!(p.effective_degree(&fp(1e-60)), 1);
    }
}
