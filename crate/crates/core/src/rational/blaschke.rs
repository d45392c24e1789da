//! Finite Blaschke products: a unimodular constant times factors
//! (z - α)/(1 - ᾱ z) with every α strictly inside the disc.

use super::{poly::ComplexPoly, poly_roots, rfn::RationalFn, RationalError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const CONST_BAND: f64 = 1e-12;
const INTERIOR_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    #[serde(with = "crate::serde_complex")]
    c: Complex64,
    #[serde(with = "crate::serde_complex::vec")]
    zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn new(c: Complex64, zeros: Vec<Complex64>) -> Result<Self, RationalError> {
        if (c.norm() - 1.0).abs() > CONST_BAND {
            return Err(RationalError::NotUnimodular(c.norm()));
        }
        for z in &zeros {
            if z.norm() > 1.0 - INTERIOR_MARGIN {
                return Err(RationalError::ZeroNotInterior(z.norm()));
            }
        }
        Ok(BlaschkeProduct { c, zeros })
    }

    /// The constant function `c`, |c| = 1.
    pub fn constant(c: Complex64) -> Result<Self, RationalError> {
        Self::new(c, Vec::new())
    }

    /// The identity map λ.
    pub fn identity() -> Self {
        BlaschkeProduct {
            c: Complex64::new(1.0, 0.0),
            zeros: vec![Complex64::new(0.0, 0.0)],
        }
    }

    /// A single factor B_α.
    pub fn factor(alpha: Complex64) -> Result<Self, RationalError> {
        Self::new(Complex64::new(1.0, 0.0), vec![alpha])
    }

    /// c · B_α, the general Möbius function of the disc.
    pub fn mobius(c: Complex64, alpha: Complex64) -> Result<Self, RationalError> {
        Self::new(c, vec![alpha])
    }

    pub fn unimodular_constant(&self) -> Complex64 {
        self.c
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.c;
        for &a in &self.zeros {
            acc *= (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z);
        }
        acc
    }

    pub fn scale(&self, f: Complex64) -> Result<Self, RationalError> {
        Self::new(self.c * f, self.zeros.clone())
    }

    pub fn product(&self, other: &BlaschkeProduct) -> BlaschkeProduct {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        BlaschkeProduct {
            c: self.c * other.c,
            zeros,
        }
    }

    pub fn as_rational(&self) -> RationalFn {
        let mut num = ComplexPoly::constant(self.c);
        let mut den = ComplexPoly::one();
        for &a in &self.zeros {
            num = num.mul(&ComplexPoly::new(vec![-a, Complex64::new(1.0, 0.0)]));
            den = den.mul(&ComplexPoly::new(vec![Complex64::new(1.0, 0.0), -a.conj()]));
        }
        RationalFn::new_unreduced(num, den).expect("denominator of a Blaschke product is nonzero")
    }

    /// Recovers the (c, zeros) form from a rational function that actually is
    /// a finite Blaschke product, validating against `tol` at probe points.
    pub fn from_rational(f: &RationalFn, tol: f64) -> Result<Self, RationalError> {
        if f.is_zero() {
            return Err(RationalError::NotBlaschke("zero function"));
        }
        let zeros: Vec<Complex64> = if f.num().degree() == Some(0) {
            Vec::new()
        } else {
            let mut zs = Vec::new();
            for (z, m) in poly_roots(f.num())? {
                if z.norm() > 1.0 - INTERIOR_MARGIN {
                    return Err(RationalError::NotBlaschke("zero outside the open disc"));
                }
                zs.extend(std::iter::repeat(z).take(m));
            }
            zs
        };
        // probe point on 𝕋 away from the zeros
        let probe = (0..16)
            .map(|k| Complex64::from_polar(1.0, 0.37 + k as f64))
            .find(|w| zeros.iter().all(|a| (w - a).norm() > 1e-3))
            .ok_or(RationalError::NotBlaschke("no usable probe point"))?;
        let base = BlaschkeProduct {
            c: Complex64::new(1.0, 0.0),
            zeros: zeros.clone(),
        };
        let ratio = f.eval(probe) / base.eval(probe);
        if (ratio.norm() - 1.0).abs() > tol.max(1e-9) {
            return Err(RationalError::NotBlaschke("not unimodular on the circle"));
        }
        let c = ratio / ratio.norm();
        let b = BlaschkeProduct { c, zeros };
        for k in 0..24 {
            let w = Complex64::from_polar(1.0, 0.11 + 2.0 * std::f64::consts::PI * k as f64 / 24.0);
            if f.den().eval(w).norm() < 1e-6 * f.den().max_coeff_norm() {
                continue;
            }
            if (f.eval(w) - b.eval(w)).norm() > tol {
                return Err(RationalError::NotBlaschke("disagrees with Blaschke form"));
            }
        }
        Ok(b)
    }
}
