//! Möbius transformations of the Riemann sphere in 2×2 coefficient form,
//! and their construction from three point correspondences via cross-ratios.
//! The point at infinity is encoded by `Complex64` infinities.

use super::{chordal_eq, BlaschkeProduct, RationalError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MobiusFn {
    #[serde(with = "crate::serde_complex")]
    pub a: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub b: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub c: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub d: Complex64,
}

impl MobiusFn {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, RationalError> {
        let m = MobiusFn { a, b, c, d };
        if m.det().norm() <= 1e-12 * m.scale() {
            return Err(RationalError::DegenerateCrossRatio("vanishing determinant"));
        }
        Ok(m)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    fn scale(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm_sqr())
            .fold(0.0, f64::max)
            .max(1e-300)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        if z.is_infinite() {
            return if self.c.norm() > 0.0 {
                self.a / self.c
            } else {
                Complex64::new(f64::INFINITY, 0.0)
            };
        }
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        (self.a * z + self.b) / den
    }

    pub fn inverse(&self) -> MobiusFn {
        MobiusFn {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn compose(&self, inner: &MobiusFn) -> MobiusFn {
        MobiusFn {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    /// The unique Möbius map sending (z1, z2, z3) to (0, 1, ∞).
    pub fn to_zero_one_inf(z1: Complex64, z2: Complex64, z3: Complex64) -> MobiusFn {
        let one = Complex64::new(1.0, 0.0);
        if z1.is_infinite() {
            return MobiusFn { a: Complex64::new(0.0, 0.0), b: -(z2 - z3), c: -one, d: z3 };
        }
        if z2.is_infinite() {
            return MobiusFn { a: one, b: -z1, c: one, d: -z3 };
        }
        if z3.is_infinite() {
            return MobiusFn { a: -one, b: z1, c: Complex64::new(0.0, 0.0), d: -(z2 - z1) };
        }
        MobiusFn {
            a: z2 - z3,
            b: -z1 * (z2 - z3),
            c: z2 - z1,
            d: -z3 * (z2 - z1),
        }
    }

    /// Does the map send 𝔻 into 𝔻 (equivalently 𝕋 to 𝕋 and 0 inside)?
    pub fn is_disc_automorphism(&self) -> bool {
        for k in 0..8 {
            let w = Complex64::from_polar(1.0, 0.2 + k as f64 * std::f64::consts::PI / 4.0);
            let v = self.eval(w);
            if v.is_infinite() || (v.norm() - 1.0).abs() > 1e-9 {
                return false;
            }
        }
        let origin = self.eval(Complex64::new(0.0, 0.0));
        origin.is_finite() && origin.norm() < 1.0
    }

    /// Writes a disc automorphism as c·B_α.
    pub fn to_blaschke(&self) -> Result<BlaschkeProduct, RationalError> {
        if !self.is_disc_automorphism() {
            return Err(RationalError::NotBlaschke("not a disc automorphism"));
        }
        if self.a.norm() <= 1e-14 * self.scale().sqrt() {
            return Err(RationalError::NotBlaschke("degenerate leading coefficient"));
        }
        let alpha = -self.b / self.a;
        // probe away from the zero
        let probe = (0..8)
            .map(|k| Complex64::from_polar(1.0, 0.33 + k as f64))
            .find(|w| (w - alpha).norm() > 1e-3)
            .ok_or(RationalError::NotBlaschke("no probe point"))?;
        let base = BlaschkeProduct::factor(alpha)?;
        let ratio = self.eval(probe) / base.eval(probe);
        BlaschkeProduct::mobius(ratio / ratio.norm(), alpha)
    }
}

/// The unique Möbius transformation of the sphere taking each source to its
/// target, from three correspondence pairs.
pub fn mobius_from_cross_ratio(
    pairs: &[(Complex64, Complex64); 3],
) -> Result<MobiusFn, RationalError> {
    let (s, t): (Vec<_>, Vec<_>) = pairs.iter().copied().unzip();
    for i in 0..3 {
        for j in (i + 1)..3 {
            if chordal_eq(s[i], s[j], 1e-12) {
                return Err(RationalError::DegenerateCrossRatio("repeated source point"));
            }
            if chordal_eq(t[i], t[j], 1e-12) {
                return Err(RationalError::DegenerateCrossRatio("repeated target point"));
            }
        }
    }
    let src = MobiusFn::to_zero_one_inf(s[0], s[1], s[2]);
    let tgt = MobiusFn::to_zero_one_inf(t[0], t[1], t[2]);
    let m = tgt.inverse().compose(&src);
    let m = MobiusFn::new(m.a, m.b, m.c, m.d)?;
    for &(from, to) in pairs {
        let got = m.eval(from);
        if !chordal_eq(got, to, 1e-9) {
            return Err(RationalError::DegenerateCrossRatio("verification failed"));
        }
    }
    Ok(m)
}
