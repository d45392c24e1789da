//! Geometry of the symmetrised bidisc: the coordinate functions
//! Φ(z, s, p) = (2zp - s)/(2 - zs), membership tests for G, Γ and the
//! boundary strata, royal nodes, Γ-inner certification, and interpolation
//! with all targets on the topological boundary.

use crate::config::Tolerances;
use crate::nevpick::{self, NevpickError, NPData, Solvability};
use crate::rational::{BlaschkeProduct, RationalError, RationalFn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum GammaError {
    #[error("Φ singular: zs = 2")]
    PhiSingular,
    #[error("not analytic: pole inside the disc (|pole| = {0})")]
    NotAnalytic(f64),
    #[error("point does not lie in ∂Γ \\ bΓ")]
    NotInBoundaryStratum,
    #[error("every/no disc: edge case (point of bΓ)")]
    EdgeOfMobiusBand,
    #[error("targets not co-located: ∂Γ and G targets are mixed")]
    TargetsNotCoLocated,
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Nevpick(#[from] NevpickError),
}

/// A point (s, p) of ℂ², the candidate member of Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    #[serde(with = "crate::serde_complex")]
    pub s: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub p: Complex64,
}

impl GammaPoint {
    pub fn new(s: Complex64, p: Complex64) -> Self {
        GammaPoint { s, p }
    }

    /// The symmetrisation (z + w, zw).
    pub fn from_pair(z: Complex64, w: Complex64) -> Self {
        GammaPoint { s: z + w, p: z * w }
    }
}

/// A rational map h = (s, p) from the disc towards Γ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaMap {
    pub s: RationalFn,
    pub p: RationalFn,
}

impl GammaMap {
    pub fn new(s: RationalFn, p: RationalFn) -> Self {
        GammaMap { s, p }
    }

    pub fn eval(&self, z: Complex64) -> GammaPoint {
        GammaPoint::new(self.s.eval(z), self.p.eval(z))
    }

    /// Degree of the second component, the quantity classifications key on.
    pub fn degree_p(&self) -> usize {
        self.p.degree()
    }

    /// The reparametrised map λ ↦ h(e^{iθ} λ).
    pub fn rotate_argument(&self, theta: f64) -> GammaMap {
        GammaMap {
            s: self.s.rotate_argument(theta),
            p: self.p.rotate_argument(theta),
        }
    }
}

/// A solution of s² = 4p, possibly at infinity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RoyalNode {
    /// `None` encodes the node at infinity.
    pub location: Option<[f64; 2]>,
    pub multiplicity: usize,
    pub on_circle: bool,
}

impl RoyalNode {
    pub fn point(&self) -> Option<Complex64> {
        self.location.map(|[re, im]| Complex64::new(re, im))
    }
}

/// Royal structure of a map: either finitely many nodes or the whole of 𝔻
/// (the map takes values in the royal variety).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum RoyalStructure {
    Nodes(Vec<RoyalNode>),
    RoyalMap,
}

/// Φ(z, s, p) = (2zp - s)/(2 - zs).
pub fn phi(z: Complex64, pt: &GammaPoint) -> Result<Complex64, GammaError> {
    let den = Complex64::new(2.0, 0.0) - z * pt.s;
    if den.norm() <= 1e-12 {
        return Err(GammaError::PhiSingular);
    }
    Ok((2.0 * z * pt.p - pt.s) / den)
}

/// |Φ(e^{iθ}, s, p)| with the removable 0/0 at the edge of the Möbius band
/// replaced by its limit |2p/s|.
fn abs_phi_guarded(z: Complex64, pt: &GammaPoint) -> f64 {
    let num = 2.0 * z * pt.p - pt.s;
    let den = Complex64::new(2.0, 0.0) - z * pt.s;
    if den.norm() <= 1e-10 {
        if num.norm() <= 1e-10 {
            if pt.s.norm() <= 1e-10 {
                return pt.p.norm();
            }
            return (2.0 * pt.p / pt.s).norm();
        }
        return f64::INFINITY;
    }
    (num / den).norm()
}

/// sup over 𝕋 of |Φ(·, s, p)| via a grid plus golden-section refinement
/// around the grid maximiser.
fn sup_abs_phi_circle(pt: &GammaPoint, samples: usize) -> f64 {
    let n = samples.max(16);
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 0usize;
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let v = abs_phi_guarded(Complex64::from_polar(1.0, th), pt);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut lo = best_k as f64 * step - step;
    let mut hi = best_k as f64 * step + step;
    let golden = 0.381_966_011_250_105;
    let eval = |t: f64| abs_phi_guarded(Complex64::from_polar(1.0, t), pt);
    let mut x1 = lo + golden * (hi - lo);
    let mut x2 = hi - golden * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..48 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + golden * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - golden * (hi - lo);
            f2 = eval(x2);
        }
    }
    best.max(f1).max(f2)
}

/// Membership of the open symmetrised bidisc G.
pub fn in_open_gamma(pt: &GammaPoint, tols: &Tolerances) -> bool {
    in_open_gamma_sampled(pt, tols, 2048)
}

pub fn in_open_gamma_sampled(pt: &GammaPoint, tols: &Tolerances, samples: usize) -> bool {
    if pt.s.norm() >= 2.0 {
        return false;
    }
    sup_abs_phi_circle(pt, samples) < 1.0 - tols.mem
}

/// Membership of the closed set Γ.
pub fn in_closed_gamma(pt: &GammaPoint, tols: &Tolerances) -> bool {
    in_closed_gamma_sampled(pt, tols, 2048)
}

pub fn in_closed_gamma_sampled(pt: &GammaPoint, tols: &Tolerances, samples: usize) -> bool {
    if pt.s.norm() > 2.0 + tols.mem || pt.p.norm() > 1.0 + tols.mem {
        return false;
    }
    sup_abs_phi_circle(pt, samples) <= 1.0 + tols.mem
}

/// Royal nodes of a rational map: the solutions of s² = 4p with
/// multiplicity, including a node at infinity when the numerator degree of
/// s² - 4p falls short of 2·d(p).
pub fn royal_nodes(h: &GammaMap, tols: &Tolerances) -> Result<RoyalStructure, GammaError> {
    let ss = h.s.num().mul(h.s.num()).mul(h.p.den());
    let fourp = h.p.num().mul(&h.s.den().mul(h.s.den())).scale(Complex64::new(4.0, 0.0));
    let raw_num = ss.sub(&fourp);
    let scale_ref = ss.max_coeff_norm() + fourp.max_coeff_norm();
    if raw_num.max_coeff_norm() <= 1e-10 * scale_ref.max(1e-300) {
        return Ok(RoyalStructure::RoyalMap);
    }
    let den = h.s.den().mul(h.s.den()).mul(h.p.den());
    let reduced = RationalFn::new_with_tol(raw_num, den, 1e-7)?;
    let finite = if reduced.num().degree() == Some(0) {
        Vec::new()
    } else {
        crate::rational::poly_roots(reduced.num())?
    };
    let mut nodes: Vec<RoyalNode> = finite
        .into_iter()
        .map(|(z, m)| RoyalNode {
            location: Some([z.re, z.im]),
            multiplicity: m,
            on_circle: (z.norm() - 1.0).abs() <= tols.circle_band,
        })
        .collect();
    let total = 2 * h.degree_p();
    let finite_count: usize = nodes.iter().map(|n| n.multiplicity).sum();
    if finite_count < total {
        nodes.push(RoyalNode {
            location: None,
            multiplicity: total - finite_count,
            on_circle: false,
        });
    }
    Ok(RoyalStructure::Nodes(nodes))
}

/// Boundary certification report for a candidate Γ-inner map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnerReport {
    pub is_inner: bool,
    /// max over the grid of ||p| - 1|
    pub p_defect: f64,
    /// max over the grid of |s - s̄ p|
    pub symmetry_defect: f64,
    /// max over the grid of (|s| - 2)₊
    pub s_excess: f64,
    pub max_boundary_defect: f64,
}

/// Checks the three boundary conditions |p| = 1, s = s̄·p and |s| ≤ 2 on a
/// grid of 𝕋. Errs when a denominator root lies inside the disc.
pub fn gamma_inner_check(
    h: &GammaMap,
    samples: usize,
    tols: &Tolerances,
) -> Result<InnerReport, GammaError> {
    for f in [&h.s, &h.p] {
        for (pole, _) in f.poles()? {
            if pole.norm() <= 1.0 - tols.circle_band {
                return Err(GammaError::NotAnalytic(pole.norm()));
            }
        }
    }
    let n = samples.max(32);
    let mut p_defect = 0.0f64;
    let mut symmetry_defect = 0.0f64;
    let mut s_excess = 0.0f64;
    for k in 0..n {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
        let s = h.s.eval(z);
        let p = h.p.eval(z);
        p_defect = p_defect.max((p.norm() - 1.0).abs());
        symmetry_defect = symmetry_defect.max((s - s.conj() * p).norm());
        s_excess = s_excess.max((s.norm() - 2.0).max(0.0));
    }
    let max_boundary_defect = p_defect.max(symmetry_defect).max(s_excess);
    Ok(InnerReport {
        is_inner: max_boundary_defect <= 1e-8,
        p_defect,
        symmetry_defect,
        s_excess,
        max_boundary_defect,
    })
}

/// For a point of ∂Γ \ bΓ, the unique ω ∈ 𝕋 with (s, p) ∈ D_ω, computed
/// from ω̄ = (s - s̄p)/(1 - |p|²).
pub fn d_omega_membership(pt: &GammaPoint, tols: &Tolerances) -> Result<Complex64, GammaError> {
    if !in_closed_gamma(pt, tols) || in_open_gamma(pt, tols) {
        return Err(GammaError::NotInBoundaryStratum);
    }
    let t = 1.0 - pt.p.norm_sqr();
    if t <= 1e-9 {
        return Err(GammaError::EdgeOfMobiusBand);
    }
    let w = pt.s - pt.s.conj() * pt.p;
    if (w.norm() - t).abs() > 1e-7 * (1.0 + t) {
        return Err(GammaError::NotInBoundaryStratum);
    }
    let omega_bar = w / t;
    let omega = omega_bar.conj();
    Ok(omega / omega.norm())
}

/// Outcome of an interpolation problem with all targets in ∂Γ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BoundarySolution {
    /// All targets equal a single point of bΓ; the constant map is the
    /// unique solution.
    Constant(GammaPoint),
    /// All targets lie in one disc D_ω; solutions are h = (ωf + ω̄, f) with
    /// f any Schur interpolant of the p-data. Carries a Blaschke
    /// representative.
    DiscFamily {
        #[serde(with = "crate::serde_complex")]
        omega: Complex64,
        f: BlaschkeProduct,
    },
    Unsolvable,
}

/// Solves the boundary-target problem: constants for bΓ targets, and the
/// disc-family reduction to a scalar Nevanlinna-Pick problem otherwise.
pub fn boundary_interp_solve(
    nodes: &[Complex64],
    targets: &[GammaPoint],
    tols: &Tolerances,
) -> Result<BoundarySolution, GammaError> {
    if targets.is_empty() || nodes.len() != targets.len() {
        return Err(GammaError::TargetsNotCoLocated);
    }
    for t in targets {
        if !in_closed_gamma(t, tols) || in_open_gamma(t, tols) {
            return Err(GammaError::TargetsNotCoLocated);
        }
    }
    let on_edge = |t: &GammaPoint| 1.0 - t.p.norm_sqr() <= 1e-9;
    if targets.iter().any(on_edge) {
        let z1 = targets[0];
        let all_equal = targets.iter().all(|t| {
            (t.s - z1.s).norm() <= 1e-9 * (1.0 + z1.s.norm())
                && (t.p - z1.p).norm() <= 1e-9 * (1.0 + z1.p.norm())
        });
        return Ok(if all_equal && on_edge(&z1) {
            BoundarySolution::Constant(z1)
        } else {
            BoundarySolution::Unsolvable
        });
    }
    let mut omegas = Vec::with_capacity(targets.len());
    for t in targets {
        omegas.push(d_omega_membership(t, tols)?);
    }
    let w0 = omegas[0];
    if omegas.iter().any(|w| (w - w0).norm() > tols.omega_eq) {
        return Ok(BoundarySolution::Unsolvable);
    }
    let p_targets: Vec<Complex64> = targets.iter().map(|t| t.p).collect();
    let data = NPData::new(nodes.to_vec(), p_targets)?;
    if nevpick::np_solvable(&data, tols) == Solvability::Unsolvable {
        return Ok(BoundarySolution::Unsolvable);
    }
    let f = nevpick::np_solve_blaschke(&data, tols)?;
    Ok(BoundarySolution::DiscFamily { omega: w0, f })
}

/// Residual of the scaling identity
/// |2 - zrs|² - |2zrp - rs|² = r²(|2 - zs|² - |2zp - s|²) + 4(1-r)(1 + r - r·Re(zs)),
/// which vanishes for every |z| = 1, s, p ∈ ℂ and r > 0.
pub fn scaling_identity_check(z: Complex64, s: Complex64, p: Complex64, r: f64) -> f64 {
    let two = Complex64::new(2.0, 0.0);
    let lhs = (two - z * r * s).norm_sqr() - (2.0 * z * r * p - r * s).norm_sqr();
    let rhs = r * r * ((two - z * s).norm_sqr() - (2.0 * z * p - s).norm_sqr())
        + 4.0 * (1.0 - r) * (1.0 + r - r * (z * s).re);
    (lhs - rhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::rational::ComplexPoly;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn phi_values() {
        // Φ(0, s, p) = -s/2
        let v = phi(c64(0.0, 0.0), &GammaPoint::new(c64(1.0, 0.0), c64(0.2, 0.0))).unwrap();
        assert!((v - c64(-0.5, 0.0)).norm() < 1e-15);
        // royal points collapse: Φ(z, 2a, a²) = -a for every z
        let a = 0.4;
        for z in [c64(0.3, 0.1), c64(-0.7, 0.2), c64(0.0, 0.9)] {
            let v = phi(z, &GammaPoint::new(c64(2.0 * a, 0.0), c64(a * a, 0.0))).unwrap();
            assert!((v - c64(-a, 0.0)).norm() < 1e-13);
        }
        assert!(matches!(
            phi(c64(1.0, 0.0), &GammaPoint::new(c64(2.0, 0.0), c64(0.3, 0.0))),
            Err(GammaError::PhiSingular)
        ));
    }

    #[test]
    fn membership_basics() {
        let t = tols();
        assert!(in_open_gamma(&GammaPoint::new(c64(0.0, 0.0), c64(0.0, 0.0)), &t));
        // (2, 1) = (2·1, 1²) sits on bΓ: closed but not open
        let edge = GammaPoint::new(c64(2.0, 0.0), c64(1.0, 0.0));
        assert!(!in_open_gamma(&edge, &t));
        assert!(in_closed_gamma(&edge, &t));
        // symmetrisations of interior points are interior
        let pt = GammaPoint::from_pair(c64(0.3, 0.4), c64(-0.2, 0.5));
        assert!(in_open_gamma(&pt, &t));
        // |p| > 1 is outside
        assert!(!in_closed_gamma(&GammaPoint::new(c64(0.0, 0.0), c64(1.2, 0.0)), &t));
    }

    #[test]
    fn royal_nodes_of_royal_map() {
        // h = (2λ, λ²) lands in the royal variety
        let h = GammaMap::new(
            RationalFn::from_poly(ComplexPoly::new(vec![c64(0.0, 0.0), c64(2.0, 0.0)])),
            RationalFn::from_poly(ComplexPoly::new(vec![
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(1.0, 0.0),
            ])),
        );
        assert!(matches!(
            royal_nodes(&h, &tols()),
            Ok(RoyalStructure::RoyalMap)
        ));
    }

    #[test]
    fn d_omega_examples() {
        let t = tols();
        // constructed member of D_i: (ω̄ + ω·0.3, 0.3) with ω = i
        let omega = c64(0.0, 1.0);
        let ptv = GammaPoint::new(omega.conj() + omega * 0.3, c64(0.3, 0.0));
        let got = d_omega_membership(&ptv, &t).unwrap();
        assert!((got - omega).norm() < 1e-9);
        // (1.5, 0.5) lies in D_1
        let got = d_omega_membership(&GammaPoint::new(c64(1.5, 0.0), c64(0.5, 0.0)), &t).unwrap();
        assert!((got - c64(1.0, 0.0)).norm() < 1e-9);
        // bΓ point errors
        assert!(matches!(
            d_omega_membership(&GammaPoint::new(c64(2.0, 0.0), c64(1.0, 0.0)), &t),
            Err(GammaError::EdgeOfMobiusBand)
        ));
    }

    #[test]
    fn boundary_solve_examples() {
        let t = tols();
        // all targets the same bΓ point: constant
        let nodes = vec![c64(0.0, 0.0), c64(0.5, 0.0)];
        let z = GammaPoint::new(c64(2.0, 0.0), c64(1.0, 0.0));
        match boundary_interp_solve(&nodes, &[z, z], &t).unwrap() {
            BoundarySolution::Constant(c) => assert!((c.s - z.s).norm() < 1e-12),
            other => panic!("expected constant, got {other:?}"),
        }
        // distinct bΓ targets: unsolvable
        let z2 = GammaPoint::new(c64(0.0, 0.0), c64(-1.0, 0.0));
        assert!(matches!(
            boundary_interp_solve(&nodes, &[z, z2], &t).unwrap(),
            BoundarySolution::Unsolvable
        ));
        // ω = 1, identity p-data: h = (λ + 1, λ)
        let targets = vec![
            GammaPoint::new(c64(1.0, 0.0), c64(0.0, 0.0)),
            GammaPoint::new(c64(1.5, 0.0), c64(0.5, 0.0)),
        ];
        match boundary_interp_solve(&nodes, &targets, &t).unwrap() {
            BoundarySolution::DiscFamily { omega, f } => {
                assert!((omega - c64(1.0, 0.0)).norm() < 1e-9);
                for (l, tgt) in nodes.iter().zip(&targets) {
                    let fv = f.eval(*l);
                    let h = GammaPoint::new(omega * fv + omega.conj(), fv);
                    assert!((h.s - tgt.s).norm() < 1e-8);
                    assert!((h.p - tgt.p).norm() < 1e-8);
                }
            }
            other => panic!("expected disc family, got {other:?}"),
        }
    }

    #[test]
    fn scaling_identity_point_checks() {
        assert!(scaling_identity_check(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), 0.5) < 1e-14);
        assert!(scaling_identity_check(c64(0.0, 1.0), c64(1.0, 0.0), c64(0.0, 0.2), 0.7) < 1e-12);
    }
}
