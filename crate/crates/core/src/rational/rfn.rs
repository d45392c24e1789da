//! Rational functions as coprime numerator/denominator pairs.

use super::{poly::ComplexPoly, poly_roots, RationalError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Quotient of two complex polynomials. `new` cancels common roots so that
/// the pair is coprime up to the clustering tolerance; the degree of the
/// function is `max(deg num, deg den)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalFn {
    num: ComplexPoly,
    den: ComplexPoly,
}

impl RationalFn {
    pub fn new(num: ComplexPoly, den: ComplexPoly) -> Result<Self, RationalError> {
        Self::new_with_tol(num, den, 1e-9)
    }

    /// As `new` but matching common roots within `tol` (relative to 1+|root|).
    pub fn new_with_tol(
        num: ComplexPoly,
        den: ComplexPoly,
        tol: f64,
    ) -> Result<Self, RationalError> {
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        let mut f = RationalFn { num, den };
        f.cancel_common_roots(tol)?;
        Ok(f)
    }

    /// Skips coprimality normalisation; for intermediates that will only be
    /// evaluated, never degree-inspected.
    pub fn new_unreduced(num: ComplexPoly, den: ComplexPoly) -> Result<Self, RationalError> {
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(p: ComplexPoly) -> Self {
        RationalFn { num: p, den: ComplexPoly::one() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_poly(ComplexPoly::constant(c))
    }

    pub fn identity() -> Self {
        Self::from_poly(ComplexPoly::identity())
    }

    pub fn num(&self) -> &ComplexPoly {
        &self.num
    }

    pub fn den(&self) -> &ComplexPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Degree of the rational function.
    pub fn degree(&self) -> usize {
        self.num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    fn cancel_common_roots(&mut self, tol: f64) -> Result<(), RationalError> {
        if self.num.is_zero() {
            self.den = ComplexPoly::one();
            return Ok(());
        }
        if self.num.degree() == Some(0) || self.den.degree() == Some(0) {
            return Ok(());
        }
        let num_roots = expand(poly_roots(&self.num)?);
        let mut den_roots = expand(poly_roots(&self.den)?);
        let mut num = ComplexPoly::constant(self.num.leading());
        for r in num_roots {
            let matched = den_roots
                .iter()
                .position(|&d| (d - r).norm() <= tol * (1.0 + r.norm()));
            match matched {
                Some(i) => {
                    den_roots.swap_remove(i);
                }
                None => num = num.mul(&ComplexPoly::from_roots(Complex64::new(1.0, 0.0), &[r])),
            }
        }
        let den = ComplexPoly::from_roots(self.den.leading(), &den_roots);
        self.num = num;
        self.den = den;
        Ok(())
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        RationalFn {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        RationalFn {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, f: Complex64) -> RationalFn {
        RationalFn {
            num: self.num.scale(f),
            den: self.den.clone(),
        }
    }

    /// Reciprocal; errs when self is the zero function.
    pub fn invert(&self) -> Result<RationalFn, RationalError> {
        if self.num.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(RationalFn {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    /// Quotient rule, unreduced.
    pub fn derivative(&self) -> RationalFn {
        RationalFn {
            num: self
                .num
                .derivative()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.derivative())),
            den: self.den.mul(&self.den),
        }
    }

    /// `f(e^{iθ} z)` as a rational function.
    pub fn rotate_argument(&self, theta: f64) -> RationalFn {
        RationalFn {
            num: self.num.rotate_argument(theta),
            den: self.den.rotate_argument(theta),
        }
    }

    /// Poles (denominator roots) with multiplicity.
    pub fn poles(&self) -> Result<Vec<(Complex64, usize)>, RationalError> {
        if self.den.degree() == Some(0) {
            return Ok(Vec::new());
        }
        poly_roots(&self.den)
    }
}

fn expand(roots: Vec<(Complex64, usize)>) -> Vec<Complex64> {
    roots
        .into_iter()
        .flat_map(|(z, m)| std::iter::repeat(z).take(m))
        .collect()
}

/// d/dθ of arg f(e^{iθ}) at the unimodular point `lambda`, computed as the
/// real part of λ f′(λ)/f(λ). For a rational function unimodular on 𝕋 this
/// quotient is real; a residual imaginary part above 1e-9 is an error.
pub fn phasar_derivative(f: &RationalFn, lambda: Complex64) -> Result<f64, RationalError> {
    if (lambda.norm() - 1.0).abs() > 1e-8 {
        return Err(RationalError::PhasarUndefined("point not on the unit circle"));
    }
    let nv = f.num.eval(lambda);
    let dv = f.den.eval(lambda);
    let nscale = f.num.max_coeff_norm();
    let dscale = f.den.max_coeff_norm();
    if nv.norm() <= 1e-12 * nscale {
        return Err(RationalError::PhasarUndefined("function vanishes at the point"));
    }
    if dv.norm() <= 1e-12 * dscale {
        return Err(RationalError::PhasarUndefined("function has a pole at the point"));
    }
    let dn = f.num.derivative().eval(lambda);
    let dd = f.den.derivative().eval(lambda);
    // f'/f = n'/n - d'/d
    let logderiv = dn / nv - dd / dv;
    let v = lambda * logderiv;
    if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
        return Err(RationalError::PhasarNotReal(v.im));
    }
    Ok(v.re)
}

/// True when max over the sample grid of ||f(e^{iθ})| - 1| is at most 1e-8.
/// Errs when the denominator has a root within 1e-8 of 𝕋.
pub fn is_unimodular_on_circle(f: &RationalFn, samples: usize) -> Result<bool, RationalError> {
    for (pole, _) in f.poles()? {
        if (pole.norm() - 1.0).abs() <= 1e-8 {
            return Err(RationalError::PoleOnCircle);
        }
    }
    let n = samples.max(8);
    let mut worst = 0.0f64;
    for k in 0..n {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
        worst = worst.max((f.eval(z).norm() - 1.0).abs());
    }
    Ok(worst <= 1e-8)
}
