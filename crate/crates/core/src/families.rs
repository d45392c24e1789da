//! Closed-form rational maps into Γ used as generators for fixtures and
//! reference solutions: symmetrisations of Blaschke pairs, the aligned
//! degree-4 family, and assorted boundary cases.

use crate::c64;
use crate::gamma::GammaMap;
use crate::rational::{BlaschkeProduct, ComplexPoly, RationalError, RationalFn};
use num_complex::Complex64;

/// (f + g, fg) for Blaschke products f, g.
pub fn symmetrize(f: &BlaschkeProduct, g: &BlaschkeProduct) -> GammaMap {
    let fr = f.as_rational();
    let gr = g.as_rational();
    GammaMap::new(fr.add(&gr), fr.mul(&gr))
}

/// h(λ) = (2rλ, λ²), 0 < r < 1. The pencil condition holds extremally for
/// every unimodular constant but for no genuine degree-1 parameter.
pub fn ex52_1(r: f64) -> GammaMap {
    GammaMap::new(
        RationalFn::from_poly(ComplexPoly::new(vec![c64(0.0, 0.0), c64(2.0 * r, 0.0)])),
        RationalFn::from_poly(ComplexPoly::new(vec![
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(1.0, 0.0),
        ])),
    )
}

/// The aligned degree-4 map
/// h(λ) = (2(1-r)λ²/(1 + rλ³), λ(λ³ + r)/(1 + rλ³)), 0 < r < 1.
pub fn ex52_2(r: f64) -> GammaMap {
    let den = ComplexPoly::new(vec![
        c64(1.0, 0.0),
        c64(0.0, 0.0),
        c64(0.0, 0.0),
        c64(r, 0.0),
    ]);
    let s_num = ComplexPoly::new(vec![
        c64(0.0, 0.0),
        c64(0.0, 0.0),
        c64(2.0 * (1.0 - r), 0.0),
    ]);
    // λ(λ³ + r) = rλ + λ⁴
    let p_num = ComplexPoly::new(vec![
        c64(0.0, 0.0),
        c64(r, 0.0),
        c64(0.0, 0.0),
        c64(0.0, 0.0),
        c64(1.0, 0.0),
    ]);
    GammaMap::new(
        RationalFn::new_unreduced(s_num, den.clone()).unwrap(),
        RationalFn::new_unreduced(p_num, den).unwrap(),
    )
}

/// h = (2f, f²), every Möbius parameter is an auxiliary extremal.
pub fn ex52_3(f: &BlaschkeProduct) -> GammaMap {
    let fr = f.as_rational();
    GammaMap::new(fr.scale(c64(2.0, 0.0)), fr.mul(&fr))
}

/// Symmetrisation of λ² and B_α B_{-α}; caddywhompus for 0 < α < 1.
pub fn excaddy2(alpha: f64) -> Result<GammaMap, RationalError> {
    let sq = BlaschkeProduct::new(c64(1.0, 0.0), vec![c64(0.0, 0.0); 2])?;
    let b = BlaschkeProduct::new(c64(1.0, 0.0), vec![c64(alpha, 0.0), c64(-alpha, 0.0)])?;
    Ok(symmetrize(&sq, &b))
}

/// Symmetrisation of λ³ and B_α; four circle royal nodes for ½ < |α| < 1
/// (caddywhompus), two otherwise.
pub fn excaddy3(alpha: f64) -> Result<GammaMap, RationalError> {
    let cube = BlaschkeProduct::new(c64(1.0, 0.0), vec![c64(0.0, 0.0); 3])?;
    let b = BlaschkeProduct::factor(c64(alpha, 0.0))?;
    Ok(symmetrize(&cube, &b))
}

/// Symmetrisation of λ² and B_α, degree 3; at α = 1/3 the six royal nodes
/// coalesce at 1.
pub fn excaddy4(alpha: f64) -> Result<GammaMap, RationalError> {
    let sq = BlaschkeProduct::new(c64(1.0, 0.0), vec![c64(0.0, 0.0); 2])?;
    let b = BlaschkeProduct::factor(c64(alpha, 0.0))?;
    Ok(symmetrize(&sq, &b))
}

/// h(λ) = (cλ/(1 - āλ), λ(λ-a)/(1 - āλ)) with real c, |c| ≤ 2(1-|a|):
/// a Γ-inner map whose components have different degrees.
pub fn surprise(a: Complex64, c: f64) -> GammaMap {
    let den = ComplexPoly::new(vec![c64(1.0, 0.0), -a.conj()]);
    let s_num = ComplexPoly::new(vec![c64(0.0, 0.0), c64(c, 0.0)]);
    let p_num = ComplexPoly::new(vec![c64(0.0, 0.0), -a, c64(1.0, 0.0)]);
    GammaMap::new(
        RationalFn::new_unreduced(s_num, den.clone()).unwrap(),
        RationalFn::new_unreduced(p_num, den).unwrap(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::gamma;

    #[test]
    fn ex52_2_closed_form_points() {
        let h = ex52_2(0.5);
        let z = c64(0.3, 0.0);
        let pt = h.eval(z);
        let den = 1.0 + 0.5 * 0.027;
        assert!((pt.s - c64(0.09 / den, 0.0)).norm() < 1e-14);
        assert!((pt.p - c64(0.3 * 0.527 / den, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn families_are_gamma_inner() {
        let t = Tolerances::default();
        for h in [
            ex52_1(0.9),
            ex52_2(0.5),
            excaddy2(0.5).unwrap(),
            excaddy3(-1.0 / 3.0f64.sqrt()).unwrap(),
            excaddy4(1.0 / 3.0).unwrap(),
            surprise(c64(0.5, 0.0), 1.0),
        ] {
            let rep = gamma::gamma_inner_check(&h, 256, &t).unwrap();
            assert!(rep.is_inner, "defect {rep:?}");
        }
    }

    #[test]
    fn surprise_degrees_differ() {
        let h = surprise(c64(0.5, 0.0), 1.0);
        assert_eq!(h.s.degree(), 1);
        assert_eq!(h.p.degree(), 2);
    }
}
