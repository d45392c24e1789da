//! Fuzzed algebraic identities: the royal identity linking s² - 4p to the
//! auxiliary parameters, the boundary symmetry s = s̄p, the scaling
//! identity behind the strict shrinking of G, and the additivity and
//! positivity of phasar derivatives.

use gamma_interp::c64;
use gamma_interp::gamma::scaling_identity_check;
use gamma_interp::rational::{phasar_derivative, BlaschkeProduct, ComplexPoly, RationalFn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn rand_disc(rng: &mut ChaCha8Rng, rmax: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..rmax), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn rand_blaschke(rng: &mut ChaCha8Rng, degree: usize) -> BlaschkeProduct {
    let zeros = (0..degree).map(|_| rand_disc(rng, 0.85)).collect();
    BlaschkeProduct::new(rand_unit(rng), zeros).unwrap()
}

/// A rational function with poles kept away from the closed disc.
fn rand_rational(rng: &mut ChaCha8Rng, deg_num: usize, deg_den: usize) -> RationalFn {
    let num = ComplexPoly::new(
        (0..=deg_num)
            .map(|_| rand_disc(rng, 1.0) + c64(0.1, 0.0))
            .collect(),
    );
    let poles: Vec<Complex64> = (0..deg_den)
        .map(|_| Complex64::from_polar(rng.gen_range(1.6..3.0), rng.gen_range(0.0..6.28)))
        .collect();
    let den = ComplexPoly::from_roots(c64(1.0, 0.0), &poles);
    RationalFn::new_unreduced(num, den).unwrap()
}

/// s = 2(mp - q)/(1 - mq) evaluated pointwise.
fn s_value(m: Complex64, q: Complex64, p: Complex64) -> Complex64 {
    2.0 * (m * p - q) / (1.0 - m * q)
}

#[test]
fn royal_identity_fuzz() {
    // (s² - 4p)(1 - mq)² = 4(m²p - 1)(p - q²) for 100 random parameter sets
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let m = rand_blaschke(&mut rng, 1);
        let q = rand_blaschke(&mut rng, 2);
        let p = rand_rational(&mut rng, 4, 4);
        for _ in 0..50 {
            let z = rand_disc(&mut rng, 0.95);
            let (mv, qv, pv) = (m.eval(z), q.eval(z), p.eval(z));
            if (1.0 - mv * qv).norm() < 1e-2 {
                continue; // pole of the construction, not part of the claim
            }
            let s = s_value(mv, qv, pv);
            let lhs = s * s - 4.0 * pv;
            let rhs = 4.0 * (mv * mv * pv - 1.0) * (pv - qv * qv)
                / ((1.0 - mv * qv) * (1.0 - mv * qv));
            let scale = 1.0 + lhs.norm().max(rhs.norm());
            assert!(
                (lhs - rhs).norm() <= 1e-9 * scale,
                "royal identity defect {} at {z}",
                (lhs - rhs).norm() / scale
            );
        }
    }
}

#[test]
fn boundary_symmetry_fuzz() {
    // with m, q, p all inner, s = 2(mp - q)/(1 - mq) satisfies s̄p = s on 𝕋
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let m = rand_blaschke(&mut rng, 1);
        let q = rand_blaschke(&mut rng, 2);
        let p = rand_blaschke(&mut rng, 4);
        let z = rand_unit(&mut rng);
        let (mv, qv, pv) = (m.eval(z), q.eval(z), p.eval(z));
        if (1.0 - mv * qv).norm() < 1e-3 {
            continue;
        }
        let s = s_value(mv, qv, pv);
        let defect = (s - s.conj() * pv).norm();
        assert!(
            defect <= 1e-9 * (1.0 + s.norm()),
            "symmetry defect {defect} at {z}"
        );
    }
}

#[test]
fn scaling_identity_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = rand_unit(&mut rng);
        let s = rand_disc(&mut rng, 3.0);
        let p = rand_disc(&mut rng, 2.0);
        let r = rng.gen_range(0.05..0.999);
        worst = worst.max(scaling_identity_check(z, s, p, r));
    }
    assert!(worst <= 1e-10, "worst residual {worst}");
}

#[test]
fn phasar_additivity_fuzz() {
    // A(ψφ) = Aψ + Aφ
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let dpsi = rng.gen_range(1..=2);
        let psi = rand_blaschke(&mut rng, dpsi);
        let dphi = rng.gen_range(1..=2);
        let phi = rand_blaschke(&mut rng, dphi);
        let z = rand_unit(&mut rng);
        let a_psi = phasar_derivative(&psi.as_rational(), z).unwrap();
        let a_phi = phasar_derivative(&phi.as_rational(), z).unwrap();
        let a_prod = phasar_derivative(&psi.product(&phi).as_rational(), z).unwrap();
        let defect = (a_prod - a_psi - a_phi).abs();
        assert!(
            defect <= 1e-9 * (1.0 + a_prod.abs()),
            "additivity defect {defect}"
        );
    }
}

#[test]
fn phasar_positivity_on_blaschke_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..64 {
        let db = rng.gen_range(1..=4);
        let b = rand_blaschke(&mut rng, db);
        let z = rand_unit(&mut rng);
        let a = phasar_derivative(&b.as_rational(), z).unwrap();
        assert!(a > 0.0, "phasar derivative {a} not positive");
    }
}

#[test]
fn product_rule_specific_case() {
    // ψ = λ, φ = B_{0.3}, λ = e^{i0.7}
    let psi = BlaschkeProduct::identity();
    let phi = BlaschkeProduct::factor(c64(0.3, 0.0)).unwrap();
    let z = Complex64::from_polar(1.0, 0.7);
    let lhs = phasar_derivative(&psi.product(&phi).as_rational(), z).unwrap();
    let rhs = phasar_derivative(&psi.as_rational(), z).unwrap()
        + phasar_derivative(&phi.as_rational(), z).unwrap();
    assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
}
