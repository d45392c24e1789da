//! Polynomial root finding: Aberth–Ehrlich iteration with Newton polishing,
//! followed by multiplicity detection.
//!
//! Multiple roots of a degree-n polynomial stored in f64 scatter over a disc
//! of radius ≈ eps^{1/m}; a fixed clustering radius cannot both merge such a
//! cluster and keep genuinely close simple roots apart. Clusters are instead
//! accepted only when certified: a candidate m-fold root must annihilate the
//! first m-1 derivatives relative to their coefficient scale. Uncertified
//! clusters are split at ever finer radii, down to a floor of 1e-9 below
//! which points are merged unconditionally.

use super::{poly::ComplexPoly, RationalError};
use num_complex::Complex64;

const MAX_ABERTH_ITER: usize = 400;
const CLUSTER_COARSE: f64 = 1e-2;
const CLUSTER_FLOOR: f64 = 1e-9;
const DERIV_GATE: f64 = 1e-8;

/// All roots of `p` with multiplicities: `deg(p)` counted with multiplicity.
///
/// The scaled residual |p(r)| / (max|coeff| · max(1,|r|)^deg) is at most
/// 1e-8 for every returned root.
pub fn poly_roots(p: &ComplexPoly) -> Result<Vec<(Complex64, usize)>, RationalError> {
    if p.is_zero() {
        return Err(RationalError::ZeroPolyRoots);
    }
    let deg = p.degree().unwrap();
    if deg == 0 {
        return Ok(Vec::new());
    }
    let raw = raw_roots(p)?;
    let scale = p.max_coeff_norm();
    let mut worst = 0.0f64;
    for &r in &raw {
        let res = p.eval(r).norm() / (scale * r.norm().max(1.0).powi(deg as i32));
        worst = worst.max(res);
    }
    if worst > 1e-8 {
        return Err(RationalError::RootsNotConverged(worst));
    }
    Ok(cluster_with_multiplicity(p, raw))
}

fn raw_roots(p: &ComplexPoly) -> Result<Vec<Complex64>, RationalError> {
    let deg = p.degree().unwrap();
    match deg {
        1 => Ok(vec![-p.coeff(0) / p.coeff(1)]),
        2 => Ok(quadratic(p.coeff(0), p.coeff(1), p.coeff(2)).to_vec()),
        _ => Ok(aberth(p)),
    }
}

/// Numerically stable quadratic formula.
fn quadratic(c0: Complex64, c1: Complex64, c2: Complex64) -> [Complex64; 2] {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // pick the sign that avoids cancellation in -c1 ∓ disc
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -0.5 * (c1 + disc)
    } else {
        -0.5 * (c1 - disc)
    };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / c2, c0 / q]
}

fn aberth(p: &ComplexPoly) -> Vec<Complex64> {
    let deg = p.degree().unwrap();
    let dp = p.derivative();
    let lead = p.leading();
    let cauchy = 1.0
        + p.coeffs()[..deg]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let radius = cauchy.min(1e6) * 0.8 + 0.1;
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            Complex64::from_polar(
                radius * (0.6 + 0.4 * (k as f64 + 1.0) / deg as f64),
                2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.41,
            )
        })
        .collect();
    for _ in 0..MAX_ABERTH_ITER {
        let mut max_step = 0.0f64;
        for k in 0..deg {
            let pk = p.eval(z[k]);
            let dk = dp.eval(z[k]);
            if pk.norm() == 0.0 {
                continue;
            }
            let w = if dk.norm() > 1e-300 {
                pk / dk
            } else {
                Complex64::new(1e-8, 1e-8)
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > 1e-300 {
                        s += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 1e-12 { w / denom } else { w };
            z[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish; keeps simple roots at full accuracy, harmless on clusters.
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let pk = p.eval(*zk);
            let dk = dp.eval(*zk);
            if dk.norm() < 1e-300 {
                break;
            }
            let step = pk / dk;
            if step.norm() > 0.5 * (1.0 + zk.norm()) {
                break;
            }
            *zk -= step;
        }
    }
    z
}

fn cluster_with_multiplicity(p: &ComplexPoly, raw: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    let scale = 1.0 + raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = Vec::new();
    split_or_certify(p, &raw, CLUSTER_COARSE * scale, scale, &mut out);
    out.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

fn split_or_certify(
    p: &ComplexPoly,
    pts: &[Complex64],
    radius: f64,
    scale: f64,
    out: &mut Vec<(Complex64, usize)>,
) {
    for group in group_by_radius(pts, radius) {
        let k = group.len();
        let centroid = group.iter().sum::<Complex64>() / k as f64;
        if k == 1 {
            out.push((centroid, 1));
            continue;
        }
        let spread = group
            .iter()
            .map(|z| (z - centroid).norm())
            .fold(0.0, f64::max);
        let center = polish_multiple_root(p, centroid, k, (4.0 * spread).max(1e-12));
        if certify_multiplicity(p, center, k) || radius <= CLUSTER_FLOOR * scale {
            out.push((center, k));
        } else {
            split_or_certify(p, &group, radius / 10.0, scale, out);
        }
    }
}

/// An m-fold root of p is a simple root of p^{(m-1)}; a few Newton steps on
/// that derivative sharpen the cluster centroid from O(eps^{1/m}) accuracy
/// to nearly machine precision. Steps are capped so the polish cannot hop
/// to an unrelated critical point.
fn polish_multiple_root(p: &ComplexPoly, start: Complex64, m: usize, max_move: f64) -> Complex64 {
    let mut d = p.clone();
    for _ in 0..m.saturating_sub(1) {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = start;
    for _ in 0..6 {
        let dv = dd.eval(z);
        if dv.norm() < 1e-300 {
            return start;
        }
        let step = d.eval(z) / dv;
        if (z - step - start).norm() > max_move {
            return start;
        }
        z -= step;
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Connected components under the relation |a - b| ≤ radius.
fn group_by_radius(pts: &[Complex64], radius: f64) -> Vec<Vec<Complex64>> {
    let n = pts.len();
    let mut assigned = vec![false; n];
    let mut groups = Vec::new();
    for start in 0..n {
        if assigned[start] {
            continue;
        }
        let mut stack = vec![start];
        assigned[start] = true;
        let mut group = Vec::new();
        while let Some(i) = stack.pop() {
            group.push(pts[i]);
            for j in 0..n {
                if !assigned[j] && (pts[i] - pts[j]).norm() <= radius {
                    assigned[j] = true;
                    stack.push(j);
                }
            }
        }
        groups.push(group);
    }
    groups
}

/// True when `center` annihilates p, p', …, p^{(m-1)} relative to the
/// coefficient scale of each derivative, while p^{(m)} stays away from zero.
fn certify_multiplicity(p: &ComplexPoly, center: Complex64, m: usize) -> bool {
    let mut d = p.clone();
    let grow = center.norm().max(1.0);
    for j in 0..=m {
        if d.is_zero() {
            return false;
        }
        let ref_scale = d.max_coeff_norm() * grow.powi(d.degree().unwrap() as i32);
        let v = d.eval(center).norm() / ref_scale;
        if j < m {
            if v > DERIV_GATE {
                return false;
            }
        } else if v <= DERIV_GATE {
            // even the m-th derivative vanishes: the cluster is part of
            // something bigger, let the caller split and retry
            return false;
        }
        d = d.derivative();
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn has_root(roots: &[(Complex64, usize)], r: Complex64, m: usize, tol: f64) -> bool {
        roots.iter().any(|&(z, mu)| (z - r).norm() < tol && mu == m)
    }

    #[test]
    fn simple_quadratic() {
        // λ² + 1 → ±i
        let p = ComplexPoly::new(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(has_root(&roots, c64(0.0, 1.0), 1, 1e-12));
        assert!(has_root(&roots, c64(0.0, -1.0), 1, 1e-12));
    }

    #[test]
    fn constant_has_no_roots() {
        let p = ComplexPoly::constant(c64(5.0, 0.0));
        assert!(poly_roots(&p).unwrap().is_empty());
        assert!(matches!(
            poly_roots(&ComplexPoly::zero()),
            Err(RationalError::ZeroPolyRoots)
        ));
    }

    #[test]
    fn sixfold_root_detected() {
        // (z-1)^6 with a relative 1e-14 perturbation, as produced by f64 arithmetic
        let mut p = ComplexPoly::from_roots(c64(1.0, 0.0), &[c64(1.0, 0.0); 6]);
        let mut coeffs = p.coeffs().to_vec();
        coeffs[2] += c64(3e-14, -1e-14);
        p = ComplexPoly::new(coeffs);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 1, "{roots:?}");
        assert_eq!(roots[0].1, 6);
        assert!((roots[0].0 - c64(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn close_but_distinct_roots_stay_apart() {
        let r1 = c64(0.5, 0.0);
        let r2 = c64(0.5 + 3e-4, 0.0);
        let p = ComplexPoly::from_roots(c64(1.0, 0.0), &[r1, r2, c64(-0.3, 0.8)]);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 3, "{roots:?}");
        assert!(has_root(&roots, r1, 1, 1e-7));
        assert!(has_root(&roots, r2, 1, 1e-7));
    }

    #[test]
    fn reconstruction_matches_coefficients() {
        // x² - 4p numerator of the degree-4 symmetrisation family: roots 1, -1, 2, 0.5
        let alpha = 0.4;
        let expect = [
            c64(1.0, 0.0),
            c64(-1.0, 0.0),
            c64((1.0 + (1.0f64 - 4.0 * alpha * alpha).sqrt()) / (2.0 * alpha), 0.0),
            c64((1.0 - (1.0f64 - 4.0 * alpha * alpha).sqrt()) / (2.0 * alpha), 0.0),
        ];
        // (λ²-1)(αλ²-λ+α) expanded
        let f1 = ComplexPoly::new(vec![c64(-1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let f2 = ComplexPoly::new(vec![c64(alpha, 0.0), c64(-1.0, 0.0), c64(alpha, 0.0)]);
        let p = f1.mul(&f2);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 4);
        for e in expect {
            assert!(has_root(&roots, e, 1, 1e-9), "missing {e}");
        }
        assert!((expect[2].re - 2.0).abs() < 1e-12);
        assert!((expect[3].re - 0.5).abs() < 1e-12);
        // reconstruction: leading · ∏(z - r) matches the original coefficients
        let flat: Vec<Complex64> = roots
            .iter()
            .flat_map(|&(z, m)| std::iter::repeat(z).take(m))
            .collect();
        let rec = ComplexPoly::from_roots(p.leading(), &flat);
        let scale = p.max_coeff_norm();
        for k in 0..=p.degree().unwrap() {
            assert!((rec.coeff(k) - p.coeff(k)).norm() <= 1e-7 * scale);
        }
    }
}
