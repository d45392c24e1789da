//! The mixed interior/boundary Pick problem for p: three interior
//! interpolation conditions p(λ_j) = p_j together with boundary conditions
//! p(τ_ℓ) = m̄(τ_ℓ)² at the unimodular roots of mq = 1. Feasibility is a
//! rank-constrained positivity question for a bordered Pick matrix whose
//! boundary diagonal is free; the solution itself is a Blaschke product of
//! degree at most 4 found by damped least squares over its parameters.

use crate::config::{GridConfig, Tolerances};
use crate::cpick::InterpProblem;
use crate::linalg;
use crate::nevpick::{self, HermitianMatrix, NPData, NevpickError, PsdStatus};
use crate::optim::{self, disc_to_plane, plane_to_disc};
use crate::rational::{poly_roots, BlaschkeProduct, RationalError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum DiamondError {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("non-simple τ root")]
    NonSimpleTauRoot,
    #[error("root of mq = 1 is off the unit circle (|τ| = {0})")]
    TauOffCircle(f64),
    #[error("problem is infeasible")]
    Infeasible,
    #[error(
        "solution construction failed (best interior residual {best_interior:.3e}, boundary {best_boundary:.3e})"
    )]
    ConstructionFailed {
        best_interior: f64,
        best_boundary: f64,
    },
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Nevpick(#[from] NevpickError),
}

/// Data of the mixed problem, as derived from an interpolation problem and
/// an auxiliary extremal pair (m, q).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiamondProblem {
    #[serde(with = "crate::serde_complex::vec")]
    pub interior_nodes: Vec<Complex64>,
    #[serde(with = "crate::serde_complex::vec")]
    pub interior_targets: Vec<Complex64>,
    #[serde(with = "crate::serde_complex::vec")]
    pub boundary_nodes: Vec<Complex64>,
    #[serde(with = "crate::serde_complex::vec")]
    pub boundary_targets: Vec<Complex64>,
    pub m: BlaschkeProduct,
    pub q: BlaschkeProduct,
}

/// The bordered Pick matrix together with the boundary diagonal used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiamondMatrix {
    pub matrix: HermitianMatrix,
    pub rho: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub rho: Vec<f64>,
    pub rank: usize,
    pub min_eig: f64,
}

/// Assembles the mixed problem: τ_ℓ are the roots of mq(τ) = 1 (all on 𝕋,
/// required simple), with boundary targets m̄(τ_ℓ)².
pub fn make_diamond(
    prob: &InterpProblem,
    m: &BlaschkeProduct,
    q: &BlaschkeProduct,
) -> Result<DiamondProblem, DiamondError> {
    if m.degree() > 1 {
        return Err(DiamondError::InvalidInput("parameter m must have degree at most 1"));
    }
    if q.degree() > prob.len().saturating_sub(1) {
        return Err(DiamondError::InvalidInput("q degree exceeds n - 1"));
    }
    let mq = m.product(q);
    let mut taus = Vec::new();
    if mq.degree() > 0 {
        let r = mq.as_rational();
        let eqn = r.num().sub(r.den());
        for (tau, mult) in poly_roots(&eqn)? {
            if mult > 1 {
                return Err(DiamondError::NonSimpleTauRoot);
            }
            if (tau.norm() - 1.0).abs() > 1e-8 {
                return Err(DiamondError::TauOffCircle(tau.norm()));
            }
            taus.push(tau / tau.norm());
        }
        taus.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        for w in taus.windows(2) {
            if (w[0] - w[1]).norm() <= 1e-8 {
                return Err(DiamondError::NonSimpleTauRoot);
            }
        }
    }
    let boundary_targets: Vec<Complex64> = taus.iter().map(|&t| m.eval(t).conj().powi(2)).collect();
    Ok(DiamondProblem {
        interior_nodes: prob.nodes().to_vec(),
        interior_targets: prob.targets().iter().map(|t| t.p).collect(),
        boundary_nodes: taus,
        boundary_targets,
        m: m.clone(),
        q: q.clone(),
    })
}

/// The bordered Pick matrix at a given boundary diagonal ρ > 0.
pub fn diamond_matrix(dp: &DiamondProblem, rho: &[f64]) -> Result<DiamondMatrix, DiamondError> {
    if rho.len() != dp.boundary_nodes.len() {
        return Err(DiamondError::InvalidInput("ρ length mismatch"));
    }
    if rho.iter().any(|&r| r <= 0.0) {
        return Err(DiamondError::InvalidInput("ρ entries must be positive"));
    }
    Ok(DiamondMatrix {
        matrix: assemble(dp, rho),
        rho: rho.to_vec(),
    })
}

fn assemble(dp: &DiamondProblem, rho: &[f64]) -> HermitianMatrix {
    let ni = dp.interior_nodes.len();
    let k = dp.boundary_nodes.len();
    let one = Complex64::new(1.0, 0.0);
    HermitianMatrix::from_fn(ni + k, |i, j| {
        // upper triangle only (i <= j)
        if i < ni && j < ni {
            (one - dp.interior_targets[i].conj() * dp.interior_targets[j])
                / (one - dp.interior_nodes[i].conj() * dp.interior_nodes[j])
        } else if i < ni {
            let l = j - ni;
            (one - dp.interior_targets[i].conj() * dp.boundary_targets[l])
                / (one - dp.interior_nodes[i].conj() * dp.boundary_nodes[l])
        } else if i == j {
            Complex64::new(rho[i - ni], 0.0)
        } else {
            let (li, lj) = (i - ni, j - ni);
            (one - dp.boundary_targets[li].conj() * dp.boundary_targets[lj])
                / (one - dp.boundary_nodes[li].conj() * dp.boundary_nodes[lj])
        }
    })
}

fn interior_pick(dp: &DiamondProblem) -> Result<HermitianMatrix, DiamondError> {
    let data = NPData::new(dp.interior_nodes.clone(), dp.interior_targets.clone())?;
    Ok(nevpick::pick_matrix(&data))
}

/// Searches for ρ > 0 making the bordered matrix positive semidefinite of
/// rank at most 4. Coordinatewise bisection walks to a minimal PSD point;
/// when that point fails the rank test and the interior block is positive
/// definite, an exact rank-one completion of the Schur complement is tried.
pub fn diamond_feasible(dp: &DiamondProblem, tols: &Tolerances) -> FeasibilityReport {
    let ni = dp.interior_nodes.len();
    let k = dp.boundary_nodes.len();
    if k == 0 {
        let m = assemble(dp, &[]);
        let st = nevpick::psd_status(&m, tols);
        return FeasibilityReport {
            feasible: st != PsdStatus::Indefinite,
            rho: Vec::new(),
            rank: match st {
                PsdStatus::SingularPsd(r) => r,
                _ => ni,
            },
            min_eig: m.min_eigenvalue(),
        };
    }

    let scale = assemble(dp, &vec![1.0; k])
        .entries()
        .iter()
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    let big = 1e4 * scale;
    let eval = |rho: &[f64]| assemble(dp, rho);

    let start = vec![big; k];
    let m_big = eval(&start);
    let delta = tols.eig_threshold(m_big.trace().min(10.0 * scale * (ni + k) as f64), ni + k);
    if m_big.min_eigenvalue() < -delta {
        return FeasibilityReport {
            feasible: false,
            rho: start,
            rank: ni + k,
            min_eig: m_big.min_eigenvalue(),
        };
    }

    // coordinatewise bisection to a minimal PSD diagonal
    let mut rho = start;
    for _sweep in 0..24 {
        let mut moved = 0.0f64;
        for i in 0..k {
            let mut lo = 0.0f64;
            let mut hi = rho[i];
            let mut trial = rho.clone();
            trial[i] = lo;
            if eval(&trial).min_eigenvalue() >= -delta {
                hi = lo;
            } else {
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    trial[i] = mid;
                    if eval(&trial).min_eigenvalue() >= -delta {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
            }
            moved = moved.max((rho[i] - hi).abs());
            rho[i] = hi.max(1e-12 * scale);
        }
        if moved <= 1e-10 * scale {
            break;
        }
    }
    let m_min = eval(&rho);
    let eps = tols.eig_threshold(m_min.trace(), ni + k);
    let eigs = m_min.eigenvalues();
    let rank = eigs.iter().filter(|&&e| e > eps).count();
    let min_eig = eigs[0];
    if min_eig >= -eps && rank <= 4 {
        return FeasibilityReport {
            feasible: true,
            rho,
            rank,
            min_eig,
        };
    }

    // exact rank-≤1 Schur-complement completion
    if let Some(rho2) = rank_one_completion(dp, tols) {
        let m2 = eval(&rho2);
        let eps2 = tols.eig_threshold(m2.trace(), ni + k);
        let eigs2 = m2.eigenvalues();
        let rank2 = eigs2.iter().filter(|&&e| e > eps2).count();
        if eigs2[0] >= -eps2 && rank2 <= 4 {
            return FeasibilityReport {
                feasible: true,
                rho: rho2,
                rank: rank2,
                min_eig: eigs2[0],
            };
        }
    }

    FeasibilityReport {
        feasible: false,
        rho,
        rank,
        min_eig,
    }
}

/// With the interior block P positive definite, M(ρ) is PSD of rank ≤ 4
/// exactly when S = F + diag(ρ) is PSD of rank ≤ 1, where
/// F = C - B*P⁻¹B. Rank-one structure pins |v_i| from the off-diagonal
/// entries of F, leaving ρ_i = |v_i|² - f_ii.
fn rank_one_completion(dp: &DiamondProblem, tols: &Tolerances) -> Option<Vec<f64>> {
    let ni = dp.interior_nodes.len();
    let k = dp.boundary_nodes.len();
    if nevpick::psd_status(&interior_pick(dp).ok()?, tols) != PsdStatus::PositiveDefinite {
        return None;
    }
    let full = assemble(dp, &vec![1.0; k]);
    // interior block P in the convention of the bordered matrix itself
    let p: Vec<Complex64> = (0..ni)
        .flat_map(|i| (0..ni).map(move |j| (i, j)))
        .map(|(i, j)| full.get(i, j))
        .collect();
    // B: ni×k block, C off-diagonal boundary block
    let b: Vec<Complex64> = (0..ni)
        .flat_map(|i| (0..k).map(move |l| (i, l)))
        .map(|(i, l)| full.get(i, ni + l))
        .collect();
    // columns of P⁻¹B by solving P x = B[:, l]
    let mut pinv_b = vec![Complex64::new(0.0, 0.0); ni * k];
    for l in 0..k {
        let col: Vec<Complex64> = (0..ni).map(|i| b[i * k + l]).collect();
        let x = linalg::solve_complex(&p, &col, ni)?;
        for i in 0..ni {
            pinv_b[i * k + l] = x[i];
        }
    }
    let mut f = vec![Complex64::new(0.0, 0.0); k * k];
    for li in 0..k {
        for lj in 0..k {
            let c = if li == lj {
                Complex64::new(0.0, 0.0)
            } else {
                full.get(ni + li, ni + lj)
            };
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..ni {
                dot += b[i * k + li].conj() * pinv_b[i * k + lj];
            }
            f[li * k + lj] = c - dot;
        }
    }
    let fscale = f.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let margin = 1e-11 * fscale.max(1.0);
    let diag = |i: usize| f[i * k + i].re;
    match k {
        1 => Some(vec![(-diag(0)).max(0.0) + margin]),
        2 => {
            let f01 = f[1];
            if f01.norm() <= 1e-9 * fscale {
                // decoupled: one diagonal must vanish
                let (d0, d1) = (diag(0), diag(1));
                if d0 <= margin {
                    return Some(vec![(-d0).max(0.0) + margin, (-d1).max(0.0) + margin]);
                }
                if d1 <= margin {
                    return Some(vec![(-d0).max(0.0) + margin, (-d1).max(0.0) + margin]);
                }
                return None;
            }
            let x_lo = diag(0).max(0.0) + margin;
            let x_hi = if diag(1) > margin {
                f01.norm_sqr() / diag(1)
            } else {
                // any x beyond x_lo works; stay near the low end
                x_lo * 4.0 + 1.0
            };
            if x_hi <= x_lo {
                return None;
            }
            let x = (x_lo * x_hi).sqrt();
            let rho0 = x - diag(0);
            let rho1 = f01.norm_sqr() / x - diag(1);
            (rho0 > 0.0 && rho1 > 0.0).then(|| vec![rho0, rho1])
        }
        3 => {
            let f01 = f[1];
            let f02 = f[2];
            let f12 = f[k + 2];
            if f01.norm() <= 1e-9 * fscale
                || f02.norm() <= 1e-9 * fscale
                || f12.norm() <= 1e-9 * fscale
            {
                return None;
            }
            // v₁v̄₂ = f01, v₁v̄₃ = f02, v₂v̄₃ = f12 forces
            // |v₁|² = |f01||f02|/|f12| and consistency of the phases
            let v1n = (f01.norm() * f02.norm() / f12.norm()).sqrt();
            let v1 = Complex64::new(v1n, 0.0);
            let v2 = f01.conj() / v1;
            let v3 = f02.conj() / v1;
            let defect = (v2 * v3.conj() - f12).norm();
            if defect > 1e-6 * fscale.max(1.0) {
                return None;
            }
            let rho: Vec<f64> = [v1, v2, v3]
                .iter()
                .enumerate()
                .map(|(i, v)| v.norm_sqr() - diag(i))
                .collect();
            rho.iter().all(|&r| r > 0.0).then_some(rho)
        }
        _ => None,
    }
}

/// Solves the mixed problem: a Blaschke product of degree at most 4 with
/// interior residuals ≤ 1e-8 and boundary residuals ≤ 1e-7, found by
/// Levenberg-Marquardt over (c, α₁..α_d) with seeded multistarts.
pub fn diamond_solve(
    dp: &DiamondProblem,
    tols: &Tolerances,
    grid: &GridConfig,
) -> Result<BlaschkeProduct, DiamondError> {
    let interior = NPData::new(dp.interior_nodes.clone(), dp.interior_targets.clone())?;
    let interior_status = nevpick::psd_status(&nevpick::pick_matrix(&interior), tols);

    // a singular interior block pins p to the unique extremal interpolant
    if let PsdStatus::SingularPsd(_) = interior_status {
        let p = nevpick::np_solve_extremal(&interior, tols)?;
        let worst_boundary = dp
            .boundary_nodes
            .iter()
            .zip(&dp.boundary_targets)
            .map(|(&t, &v)| (p.eval(t) - v).norm())
            .fold(0.0, f64::max);
        if worst_boundary <= tols.boundary_residual {
            return Ok(p);
        }
        return Err(DiamondError::ConstructionFailed {
            best_interior: 0.0,
            best_boundary: worst_boundary,
        });
    }

    let feas = diamond_feasible(dp, tols);
    if !feas.feasible {
        return Err(DiamondError::Infeasible);
    }

    let seed_zeros: Vec<Complex64> = nevpick::np_solve_blaschke(&interior, tols)
        .map(|b| b.zeros().to_vec())
        .unwrap_or_default();

    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut best = (f64::INFINITY, f64::INFINITY);
    let degrees: Vec<usize> = {
        let d0 = feas.rank.clamp(3, 4);
        if d0 == 4 { vec![4] } else { vec![d0, 4] }
    };
    for degree in degrees {
        for attempt in 0..grid.multistarts.max(1) {
            let mut zeros: Vec<Complex64> = seed_zeros.iter().copied().take(degree).collect();
            while zeros.len() < degree {
                let r: f64 = rng.gen_range(0.0..0.85);
                let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                zeros.push(Complex64::from_polar(r, th));
            }
            if attempt > 0 {
                // jitter, increasingly aggressive
                let amp = 0.05 + 0.25 * (attempt as f64 / grid.multistarts.max(1) as f64);
                for z in zeros.iter_mut() {
                    let jr: f64 = rng.gen_range(-amp..amp);
                    let ji: f64 = rng.gen_range(-amp..amp);
                    *z += Complex64::new(jr, ji);
                    if z.norm() > 0.95 {
                        *z *= 0.9 / z.norm();
                    }
                }
            }
            let theta0 = seed_constant_angle(dp, &zeros, &mut rng);
            let mut start = vec![theta0];
            for &z in &zeros {
                let v = disc_to_plane(z);
                start.extend_from_slice(&[v.re, v.im]);
            }
            let (p, cost_int, cost_bnd) = run_lm(dp, &start, degree);
            if cost_int <= tols.interior_residual && cost_bnd <= tols.boundary_residual {
                return Ok(p);
            }
            if cost_int + cost_bnd < best.0 + best.1 {
                best = (cost_int, cost_bnd);
            }
        }
    }
    Err(DiamondError::ConstructionFailed {
        best_interior: best.0,
        best_boundary: best.1,
    })
}

fn seed_constant_angle(dp: &DiamondProblem, zeros: &[Complex64], rng: &mut ChaCha8Rng) -> f64 {
    let base = BlaschkeProduct::new(Complex64::new(1.0, 0.0), zeros.to_vec());
    match base {
        Ok(b) => {
            let l = dp.interior_nodes[0];
            let bv = b.eval(l);
            let t = dp.interior_targets[0];
            if bv.norm() > 1e-8 && t.norm() > 1e-12 {
                (t / bv).arg()
            } else {
                rng.gen_range(0.0..std::f64::consts::TAU)
            }
        }
        Err(_) => rng.gen_range(0.0..std::f64::consts::TAU),
    }
}

fn run_lm(dp: &DiamondProblem, start: &[f64], degree: usize) -> (BlaschkeProduct, f64, f64) {
    let interior_nodes = dp.interior_nodes.clone();
    let interior_targets = dp.interior_targets.clone();
    let boundary_nodes = dp.boundary_nodes.clone();
    let boundary_targets = dp.boundary_targets.clone();
    let unpack = move |p: &[f64]| -> BlaschkeProduct {
        let c = Complex64::from_polar(1.0, p[0]);
        let zeros: Vec<Complex64> = (0..degree)
            .map(|k| plane_to_disc(Complex64::new(p[1 + 2 * k], p[2 + 2 * k])))
            .collect();
        BlaschkeProduct::new(c, zeros).expect("chart keeps zeros inside the disc")
    };
    let unpack_res = unpack.clone();
    let mut residuals = move |prm: &[f64], out: &mut Vec<f64>| {
        out.clear();
        let b = unpack_res(prm);
        for (l, t) in interior_nodes.iter().zip(&interior_targets) {
            let v = b.eval(*l) - t;
            out.push(v.re);
            out.push(v.im);
        }
        for (l, t) in boundary_nodes.iter().zip(&boundary_targets) {
            let v = b.eval(*l) - t;
            out.push(v.re);
            out.push(v.im);
        }
    };
    let out = optim::levenberg_marquardt(&mut residuals, start, 250, 1e-28);
    if !out.cost.is_finite() {
        let huge = f64::INFINITY;
        return (unpack(start), huge, huge);
    }
    let p = unpack(&out.params);
    let worst_int = dp
        .interior_nodes
        .iter()
        .zip(&dp.interior_targets)
        .map(|(&l, &t)| (p.eval(l) - t).norm())
        .fold(0.0, f64::max);
    let worst_bnd = dp
        .boundary_nodes
        .iter()
        .zip(&dp.boundary_targets)
        .map(|(&l, &t)| (p.eval(l) - t).norm())
        .fold(0.0, f64::max);
    (p, worst_int, worst_bnd)
}
