//! The pencil condition over Blaschke parameters of degree ≤ ν: matrix
//! assembly, global minimisation of the least eigenvalue over the compact
//! parameter set (𝕋 for ν = 0, 𝕋 × 𝔻 for ν = 1), extremality and activity
//! detection, extraction of the associated Blaschke product q, and
//! membership tests for the classes of rational maps carrying a degree-ν
//! parameter witness.

use crate::config::{GridConfig, Tolerances};
use crate::gamma::{self, GammaError, GammaMap, GammaPoint, RoyalStructure};
use crate::linalg;
use crate::nevpick::{self, HermitianMatrix, NPData, NevpickError, PsdStatus};
use crate::optim::{self, disc_to_plane, plane_to_disc};
use crate::rational::{
    mobius_from_cross_ratio, BlaschkeProduct, RationalError, RationalFn,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CpickError {
    #[error("invalid interpolation problem: {0}")]
    InvalidProblem(&'static str),
    #[error("m is not an auxiliary extremal")]
    NotAuxiliaryExtremal,
    #[error("map is not Γ-inner")]
    NotGammaInner,
    #[error("joint refinement of (m, q) stalled at residual {0:.3e}")]
    RefinementFailed(f64),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Nevpick(#[from] NevpickError),
}

/// Interpolation data for the Γ problem: distinct nodes in 𝔻, targets in
/// the closed symmetrised bidisc.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InterpProblem {
    #[serde(with = "crate::serde_complex::vec")]
    nodes: Vec<Complex64>,
    targets: Vec<GammaPoint>,
    #[serde(default)]
    tolerances: Tolerances,
}

impl InterpProblem {
    pub fn new(
        nodes: Vec<Complex64>,
        targets: Vec<GammaPoint>,
        tolerances: Tolerances,
    ) -> Result<Self, CpickError> {
        if nodes.is_empty() || nodes.len() != targets.len() {
            return Err(CpickError::InvalidProblem("node/target count mismatch"));
        }
        for (i, a) in nodes.iter().enumerate() {
            if a.norm() >= 1.0 {
                return Err(CpickError::InvalidProblem("node outside the open disc"));
            }
            for b in nodes.iter().skip(i + 1) {
                if (a - b).norm() <= tolerances.node_sep {
                    return Err(CpickError::InvalidProblem("nodes not distinct"));
                }
            }
        }
        for t in &targets {
            if !gamma::in_closed_gamma(t, &tolerances) {
                return Err(CpickError::InvalidProblem("target outside closed Γ"));
            }
        }
        Ok(InterpProblem {
            nodes,
            targets,
            tolerances,
        })
    }

    /// Samples a map at the given nodes.
    pub fn from_map(
        h: &GammaMap,
        nodes: &[Complex64],
        tolerances: Tolerances,
    ) -> Result<Self, CpickError> {
        let targets = nodes.iter().map(|&z| h.eval(z)).collect();
        Self::new(nodes.to_vec(), targets, tolerances)
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn targets(&self) -> &[GammaPoint] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }
}

/// Outcome of the pencil scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PencilStatus {
    Holds,
    HoldsExtremally,
    HoldsExtremallyActive,
    Fails,
}

/// Parameter of the minimising Blaschke product: a unimodular constant c
/// and, for degree 1, the zero α.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MinimizerParams {
    #[serde(with = "crate::serde_complex")]
    pub c: Complex64,
    pub alpha: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilReport {
    pub status: PencilStatus,
    /// Global minimum of the least pencil eigenvalue over the scanned set.
    pub min_eigenvalue: f64,
    pub minimizer: MinimizerParams,
    /// Minimum over unimodular constants.
    pub min_deg0: f64,
    /// Minimum over genuinely interior degree-1 parameters (ν ≥ 1 only).
    pub min_deg1: Option<f64>,
    pub auxiliary_extremal: Option<BlaschkeProduct>,
    pub q: Option<BlaschkeProduct>,
}

/// One sample of the eigenvalue surface, for plotting.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub c_theta: f64,
    pub alpha: Option<[f64; 2]>,
    pub min_eig: f64,
}

/// The pencil matrix of the problem at parameter υ:
/// entry (i,j) = [1 - υ_i p_i p̄_j ῡ_j - ½υ_i(s_i - p_i s̄_j)
///                 - ½(s̄_j - p̄_j s_i)ῡ_j - ¼(1 - υ_i ῡ_j)s_i s̄_j]
///               / (1 - λ_i λ̄_j),  υ_i = υ(λ_i).
pub fn c_pencil_matrix(prob: &InterpProblem, upsilon: &BlaschkeProduct) -> HermitianMatrix {
    let n = prob.len();
    let u: Vec<Complex64> = prob.nodes.iter().map(|&l| upsilon.eval(l)).collect();
    let one = Complex64::new(1.0, 0.0);
    HermitianMatrix::from_fn(n, |i, j| {
        let (si, pi) = (prob.targets[i].s, prob.targets[i].p);
        let (sj, pj) = (prob.targets[j].s, prob.targets[j].p);
        let num = one - u[i] * pi * pj.conj() * u[j].conj()
            - 0.5 * u[i] * (si - pi * sj.conj())
            - 0.5 * (sj.conj() - pj.conj() * si) * u[j].conj()
            - 0.25 * (one - u[i] * u[j].conj()) * si * sj.conj();
        num / (one - prob.nodes[i] * prob.nodes[j].conj())
    })
}

/// Allocation-free evaluator of the least pencil eigenvalue as a function
/// of the parameter values u_i = υ(λ_i). Uses the congruence
/// pencil = E·PickΦ·E* with a_i = (2 - u_i s_i)/2, b_i = u_i p_i - s_i/2,
/// N_ij = a_i ā_j - b_i b̄_j.
struct PencilEvaluator {
    n: usize,
    s: Vec<Complex64>,
    p: Vec<Complex64>,
    nodes: Vec<Complex64>,
    kinv: Vec<Complex64>,
}

impl PencilEvaluator {
    fn new(prob: &InterpProblem) -> Self {
        let n = prob.len();
        let one = Complex64::new(1.0, 0.0);
        let mut kinv = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                kinv[i * n + j] = one / (one - prob.nodes[i] * prob.nodes[j].conj());
            }
        }
        PencilEvaluator {
            n,
            s: prob.targets.iter().map(|t| t.s).collect(),
            p: prob.targets.iter().map(|t| t.p).collect(),
            nodes: prob.nodes.clone(),
            kinv,
        }
    }

    fn entries(&self, u: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        let mut a = [Complex64::new(0.0, 0.0); 8];
        let mut b = [Complex64::new(0.0, 0.0); 8];
        for i in 0..n {
            a[i] = Complex64::new(1.0, 0.0) - 0.5 * u[i] * self.s[i];
            b[i] = u[i] * self.p[i] - 0.5 * self.s[i];
        }
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (a[i] * a[j].conj() - b[i] * b[j].conj()) * self.kinv[i * n + j];
            }
        }
    }

    fn min_eig(&self, u: &[Complex64]) -> f64 {
        let n = self.n;
        let mut buf = [Complex64::new(0.0, 0.0); 64];
        self.entries(u, &mut buf[..n * n]);
        if n == 3 {
            linalg::eig3_min_hybrid(&buf[..9])
        } else {
            linalg::hermitian_eigenvalues(&buf[..n * n], n)[0]
        }
    }

    fn u_for_const(&self, theta: f64, u: &mut [Complex64]) {
        let c = Complex64::from_polar(1.0, theta);
        u[..self.n].fill(c);
    }

    fn u_for_mobius(&self, theta: f64, alpha: Complex64, u: &mut [Complex64]) {
        let c = Complex64::from_polar(1.0, theta);
        let one = Complex64::new(1.0, 0.0);
        for i in 0..self.n {
            u[i] = c * (self.nodes[i] - alpha) / (one - alpha.conj() * self.nodes[i]);
        }
    }

    fn min_eig_const(&self, theta: f64) -> f64 {
        let mut u = [Complex64::new(0.0, 0.0); 8];
        self.u_for_const(theta, &mut u);
        self.min_eig(&u[..self.n])
    }

    fn min_eig_mobius(&self, theta: f64, alpha: Complex64) -> f64 {
        let mut u = [Complex64::new(0.0, 0.0); 8];
        self.u_for_mobius(theta, alpha, &mut u);
        self.min_eig(&u[..self.n])
    }
}

/// The derived scalar data λ_j ↦ Φ(m(λ_j), z_j).
pub fn phi_data(prob: &InterpProblem, m: &BlaschkeProduct) -> Result<NPData, CpickError> {
    let mut values = Vec::with_capacity(prob.len());
    for (l, t) in prob.nodes.iter().zip(&prob.targets) {
        values.push(gamma::phi(m.eval(*l), t)?);
    }
    Ok(NPData::new(prob.nodes.clone(), values)?)
}

/// The matrix of the averaged degree-0 pencil, entry (1 - p_i p̄_j)/(1 - λ_i λ̄_j).
pub fn mgeq0_matrix(prob: &InterpProblem) -> HermitianMatrix {
    let one = Complex64::new(1.0, 0.0);
    HermitianMatrix::from_fn(prob.len(), |i, j| {
        (one - prob.targets[i].p * prob.targets[j].p.conj())
            / (one - prob.nodes[i] * prob.nodes[j].conj())
    })
}

/// Discrete average of the degree-0 pencil matrix over `samples` uniform
/// unimodular constants.
pub fn averaged_constant_pencil(prob: &InterpProblem, samples: usize) -> HermitianMatrix {
    let n = prob.len();
    let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let c = BlaschkeProduct::constant(Complex64::from_polar(1.0, theta)).unwrap();
        let m = c_pencil_matrix(prob, &c);
        for (slot, v) in acc.iter_mut().zip(m.entries()) {
            *slot += v;
        }
    }
    let f = 1.0 / samples as f64;
    for v in acc.iter_mut() {
        *v *= f;
    }
    HermitianMatrix::new(acc, n).expect("average of Hermitian matrices is Hermitian")
}

/// Full scan of the pencil condition for ν ∈ {0, 1}.
pub fn check_c_nu(prob: &InterpProblem, nu: usize, grid: &GridConfig) -> PencilReport {
    let tols = prob.tolerances;
    let ev = PencilEvaluator::new(prob);
    let two_pi = 2.0 * std::f64::consts::PI;

    // --- degree-0 scan -------------------------------------------------
    let n0 = grid.deg0_samples.max(16);
    let grid0: Vec<(f64, f64)> = (0..n0)
        .map(|k| {
            let th = two_pi * k as f64 / n0 as f64;
            (th, ev.min_eig_const(th))
        })
        .collect();
    let refine0 = |th0: f64| -> (f64, f64) {
        let (x, v) = optim::nelder_mead(
            &mut |p: &[f64]| ev.min_eig_const(p[0]),
            &[th0],
            two_pi / n0 as f64,
            200,
            1e-15,
        );
        (x[0], v)
    };
    let mut best0: Vec<(f64, f64)> = {
        let mut sorted = grid0.clone();
        sorted.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        sorted
            .iter()
            .take(grid.refine_starts.max(1))
            .map(|&(th, _)| refine0(th))
            .collect()
    };
    best0.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let min_deg0 = best0[0].1;
    let arg_deg0 = best0[0].0;

    // --- degree-1 scan --------------------------------------------------
    let mut min_deg1 = None;
    let mut deg1_candidates: Vec<(f64, Complex64, f64)> = Vec::new(); // (theta, alpha, val)
    if nu >= 1 {
        let mut alphas: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
        for ri in 0..grid.deg1_radial.max(2) {
            let r = 0.96 * (ri as f64 + 0.5) / grid.deg1_radial.max(2) as f64;
            for ai in 0..grid.deg1_angular.max(4) {
                let phi = two_pi * ai as f64 / grid.deg1_angular.max(4) as f64;
                alphas.push(Complex64::from_polar(r, phi));
            }
        }
        let nc = grid.deg1_c_samples.max(16);
        // per-α best cell over the c-grid
        let cells: Vec<(f64, Complex64, f64)> = alphas
            .par_iter()
            .map(|&alpha| {
                let one = Complex64::new(1.0, 0.0);
                let mut beta = [Complex64::new(0.0, 0.0); 8];
                for i in 0..ev.n {
                    beta[i] = (ev.nodes[i] - alpha) / (one - alpha.conj() * ev.nodes[i]);
                }
                let mut best = (0.0f64, f64::INFINITY);
                let mut u = [Complex64::new(0.0, 0.0); 8];
                for k in 0..nc {
                    let th = two_pi * k as f64 / nc as f64;
                    let c = Complex64::from_polar(1.0, th);
                    for i in 0..ev.n {
                        u[i] = c * beta[i];
                    }
                    let v = ev.min_eig(&u[..ev.n]);
                    if v < best.1 {
                        best = (th, v);
                    }
                }
                (best.0, alpha, best.1)
            })
            .collect();
        let mut sorted = cells.clone();
        sorted.sort_by(|a, b| {
            (a.2, a.1.norm(), a.0)
                .partial_cmp(&(b.2, b.1.norm(), b.0))
                .unwrap()
        });
        let step_r = 0.96 / grid.deg1_radial.max(2) as f64;
        // the α = 0 cell always seeds a refinement, so that flat extremal
        // valleys resolve the |α|-smallest witness deterministically
        let mut seeds: Vec<(f64, Complex64, f64)> = vec![cells[0]];
        seeds.extend(sorted.iter().take(grid.refine_starts.max(1)).copied());
        for &(th0, alpha0, _) in &seeds {
            let (x, v) = optim::nelder_mead(
                &mut |p: &[f64]| {
                    let alpha = Complex64::new(p[1], p[2]);
                    if alpha.norm() >= 0.995 {
                        return 1e6 + alpha.norm();
                    }
                    ev.min_eig_mobius(p[0], alpha)
                },
                &[th0, alpha0.re, alpha0.im],
                step_r.min(two_pi / nc as f64).max(1e-3),
                400,
                1e-16,
            );
            deg1_candidates.push((x[0], Complex64::new(x[1], x[2]), v));
        }
        deg1_candidates.sort_by(|a, b| {
            (a.2, a.1.norm(), normalize_angle(a.0))
                .partial_cmp(&(b.2, b.1.norm(), normalize_angle(b.0)))
                .unwrap()
        });
        min_deg1 = deg1_candidates
            .iter()
            .filter(|(_, alpha, _)| alpha.norm() <= tols.alpha_interior)
            .map(|&(_, _, v)| v)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            });
    }

    // --- classify --------------------------------------------------------
    let deg1_global_min = deg1_candidates.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let (global_min, minimizer) = if nu >= 1 && deg1_global_min < min_deg0 {
        let c = &deg1_candidates[0];
        (
            deg1_global_min,
            MinimizerParams {
                c: Complex64::from_polar(1.0, normalize_angle(c.0)),
                alpha: Some([c.1.re, c.1.im]),
            },
        )
    } else {
        (
            min_deg0,
            MinimizerParams {
                c: Complex64::from_polar(1.0, normalize_angle(arg_deg0)),
                alpha: None,
            },
        )
    };

    // threshold scaled by the matrix at the global minimiser
    let eps = {
        let m = match minimizer.alpha {
            Some([x, y]) => BlaschkeProduct::mobius(minimizer.c, Complex64::new(x, y))
                .unwrap_or_else(|_| BlaschkeProduct::constant(minimizer.c).unwrap()),
            None => BlaschkeProduct::constant(minimizer.c).unwrap(),
        };
        let mat = c_pencil_matrix(prob, &m);
        tols.eig_threshold(mat.trace(), mat.n())
    };

    if global_min < -eps {
        return PencilReport {
            status: PencilStatus::Fails,
            min_eigenvalue: global_min,
            minimizer,
            min_deg0,
            min_deg1,
            auxiliary_extremal: None,
            q: None,
        };
    }

    // activity: a genuinely interior degree-1 extremal, smallest |α| then
    // smallest arg(c) among near-zero candidates
    if nu >= 1 {
        let mut active: Vec<&(f64, Complex64, f64)> = deg1_candidates
            .iter()
            .filter(|(_, alpha, v)| alpha.norm() <= tols.alpha_interior && *v <= tols.ext)
            .collect();
        active.sort_by(|a, b| {
            (a.1.norm(), normalize_angle(a.0))
                .partial_cmp(&(b.1.norm(), normalize_angle(b.0)))
                .unwrap()
        });
        for cand in active {
            let m0 = match BlaschkeProduct::mobius(
                Complex64::from_polar(1.0, cand.0),
                cand.1,
            ) {
                Ok(m) => m,
                Err(_) => continue,
            };
            if let Ok((m, q)) = refine_extremal_pair(prob, &m0) {
                return PencilReport {
                    status: PencilStatus::HoldsExtremallyActive,
                    min_eigenvalue: global_min,
                    minimizer: MinimizerParams {
                        c: m.unimodular_constant(),
                        alpha: m.zeros().first().map(|a| [a.re, a.im]),
                    },
                    min_deg0,
                    min_deg1,
                    auxiliary_extremal: Some(m),
                    q: Some(q),
                };
            }
        }
    }

    // degree-0 extremality: smallest-argument constant reaching the band
    if min_deg0 <= tols.ext {
        let mut thetas: Vec<f64> = best0.iter().map(|&(th, _)| normalize_angle(th)).collect();
        // also sweep the grid for the earliest angle entering the band
        for &(th, v) in &grid0 {
            if v <= 100.0 * tols.ext {
                thetas.push(normalize_angle(refine0(th).0));
            }
        }
        thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for th in thetas {
            if ev.min_eig_const(th) > tols.ext {
                continue;
            }
            let m0 = BlaschkeProduct::constant(Complex64::from_polar(1.0, th)).unwrap();
            if let Ok((m, q)) = refine_extremal_pair(prob, &m0) {
                return PencilReport {
                    status: PencilStatus::HoldsExtremally,
                    min_eigenvalue: global_min,
                    minimizer: MinimizerParams {
                        c: m.unimodular_constant(),
                        alpha: None,
                    },
                    min_deg0,
                    min_deg1,
                    auxiliary_extremal: Some(m),
                    q: Some(q),
                };
            }
        }
    }

    PencilReport {
        status: PencilStatus::Holds,
        min_eigenvalue: global_min,
        minimizer,
        min_deg0,
        min_deg1,
        auxiliary_extremal: None,
        q: None,
    }
}

fn normalize_angle(th: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    th.rem_euclid(two_pi)
}

/// Samples the eigenvalue surface for plotting.
pub fn pencil_surface(prob: &InterpProblem, nu: usize, grid: &GridConfig) -> Vec<SurfacePoint> {
    let ev = PencilEvaluator::new(prob);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = Vec::new();
    if nu == 0 {
        for k in 0..grid.deg0_samples.max(16) {
            let th = two_pi * k as f64 / grid.deg0_samples.max(16) as f64;
            out.push(SurfacePoint {
                c_theta: th,
                alpha: None,
                min_eig: ev.min_eig_const(th),
            });
        }
        return out;
    }
    let nc = grid.deg1_c_samples.clamp(16, 90);
    let nr = grid.deg1_radial.clamp(2, 12);
    let na = grid.deg1_angular.clamp(4, 24);
    for ri in 0..=nr {
        let r = 0.96 * ri as f64 / nr as f64;
        for ai in 0..na {
            let phi = two_pi * ai as f64 / na as f64;
            let alpha = Complex64::from_polar(r, phi);
            for k in 0..nc {
                let th = two_pi * k as f64 / nc as f64;
                out.push(SurfacePoint {
                    c_theta: th,
                    alpha: Some([alpha.re, alpha.im]),
                    min_eig: ev.min_eig_mobius(th, alpha),
                });
            }
            if ri == 0 {
                break; // α = 0 once
            }
        }
    }
    out
}

/// The unique Blaschke product of degree ≤ n-1 interpolating the derived
/// data of an auxiliary extremal m.
pub fn compute_q(prob: &InterpProblem, m: &BlaschkeProduct) -> Result<BlaschkeProduct, CpickError> {
    let data = phi_data(prob, m)?;
    match nevpick::np_solve_extremal(&data, &prob.tolerances) {
        Ok(q) => Ok(q),
        Err(NevpickError::NotExtremal) => Err(CpickError::NotAuxiliaryExtremal),
        Err(e) => Err(e.into()),
    }
}

/// Polishes a near-extremal parameter m (and the associated q) by jointly
/// minimising |Φ(m(λ_j), z_j) - q(λ_j)|² over the parameters of both
/// Blaschke products. At a genuine auxiliary extremal the objective has an
/// exact zero, so the refined pair satisfies the interpolation identities
/// to near machine precision.
pub fn refine_extremal_pair(
    prob: &InterpProblem,
    m0: &BlaschkeProduct,
) -> Result<(BlaschkeProduct, BlaschkeProduct), CpickError> {
    let tols = prob.tolerances;
    let data0 = phi_data(prob, m0)?;
    let rank = match nevpick::psd_status(&nevpick::pick_matrix(&data0), &tols) {
        PsdStatus::SingularPsd(r) => r.min(prob.len() - 1),
        _ => prob.len() - 1,
    };
    let q0 = nevpick::np_solve_forced(&data0, rank, &tols)?;

    let m_deg = m0.degree();
    let q_deg = q0.degree();
    // parameter vector: θ_m [, v_m (2)] , θ_q, v_{q,k} (2 each)
    let mut start = vec![m0.unimodular_constant().arg()];
    if m_deg == 1 {
        let v = disc_to_plane(m0.zeros()[0]);
        start.extend_from_slice(&[v.re, v.im]);
    }
    start.push(q0.unimodular_constant().arg());
    for &z in q0.zeros() {
        let v = disc_to_plane(z);
        start.extend_from_slice(&[v.re, v.im]);
    }

    let nodes = prob.nodes.clone();
    let targets = prob.targets.clone();
    let unpack = move |p: &[f64]| -> (BlaschkeProduct, BlaschkeProduct) {
        let mut idx = 0;
        let cm = Complex64::from_polar(1.0, p[idx]);
        idx += 1;
        let m = if m_deg == 1 {
            let alpha = plane_to_disc(Complex64::new(p[idx], p[idx + 1]));
            idx += 2;
            BlaschkeProduct::mobius(cm, alpha).unwrap()
        } else {
            BlaschkeProduct::constant(cm).unwrap()
        };
        let cq = Complex64::from_polar(1.0, p[idx]);
        idx += 1;
        let mut zeros = Vec::with_capacity(q_deg);
        for _ in 0..q_deg {
            zeros.push(plane_to_disc(Complex64::new(p[idx], p[idx + 1])));
            idx += 2;
        }
        (m, BlaschkeProduct::new(cq, zeros).unwrap())
    };

    let unpack_res = unpack.clone();
    let mut residuals = move |p: &[f64], out: &mut Vec<f64>| {
        out.clear();
        let (m, q) = unpack_res(p);
        for (l, t) in nodes.iter().zip(&targets) {
            let v = match gamma::phi(m.eval(*l), t) {
                Ok(v) => v - q.eval(*l),
                Err(_) => Complex64::new(1e3, 0.0),
            };
            out.push(v.re);
            out.push(v.im);
        }
    };
    let out = optim::levenberg_marquardt(&mut residuals, &start, 300, 1e-28);
    let (m, q) = unpack(&out.params);
    let mut worst = 0.0f64;
    for (l, t) in prob.nodes.iter().zip(&prob.targets) {
        let v = gamma::phi(m.eval(*l), t)? - q.eval(*l);
        worst = worst.max(v.norm());
    }
    if worst > tols.root_residual {
        return Err(CpickError::RefinementFailed(worst));
    }
    Ok((m, q))
}

/// Membership report for the classes of Γ-inner maps admitting a Blaschke
/// parameter of degree ≤ ν (member) or exactly ν (member_exact) whose
/// associated quotient has degree at most n-1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EClassReport {
    pub member: bool,
    pub witness_m: Option<BlaschkeProduct>,
    pub member_exact: bool,
    pub witness_m_exact: Option<BlaschkeProduct>,
}

/// Tests whether (2mp - s)/(2 - ms) reduces to a Blaschke product of degree
/// ≤ n-1 for some m of degree ≤ ν. Witness construction goes through the
/// circle royal nodes: any cancellation happens at a node ω with
/// m(ω) = ½·conj(s(ω)), so candidate parameters interpolate those targets.
pub fn e_class_membership(
    h: &GammaMap,
    nu: usize,
    n: usize,
    tols: &Tolerances,
) -> Result<EClassReport, CpickError> {
    let inner = gamma::gamma_inner_check(h, 512, tols)?;
    if !inner.is_inner {
        return Err(CpickError::NotGammaInner);
    }
    let mut report = EClassReport {
        member: false,
        witness_m: None,
        member_exact: false,
        witness_m_exact: None,
    };
    let royal = gamma::royal_nodes(h, tols)?;
    let mut candidates: Vec<BlaschkeProduct> = Vec::new();
    match royal {
        RoyalStructure::RoyalMap => {
            // h lands in the royal variety: the quotient is -f for any m
            if nu >= 1 {
                candidates.push(BlaschkeProduct::identity());
            }
            candidates.push(BlaschkeProduct::constant(Complex64::new(1.0, 0.0)).unwrap());
        }
        RoyalStructure::Nodes(nodes) => {
            let circle: Vec<(Complex64, Complex64)> = nodes
                .iter()
                .filter(|nd| nd.on_circle)
                .filter_map(|nd| nd.point())
                .map(|w| {
                    let w = w / w.norm();
                    (w, 0.5 * h.s.eval(w).conj())
                })
                .collect();
            let dp = h.degree_p();
            for nu_used in (0..=nu).rev() {
                let need = (dp + nu_used).saturating_sub(n - 1);
                candidates.extend(candidate_params(&circle, nu_used, need));
            }
        }
    }
    for m in candidates {
        if let Some(q) = try_reduce(h, &m, n, tols) {
            if !report.member {
                report.member = true;
                report.witness_m = Some(m.clone());
            }
            if m.degree() == nu && !report.member_exact {
                report.member_exact = true;
                report.witness_m_exact = Some(m.clone());
            }
            let _ = q;
            if report.member_exact {
                break;
            }
        }
    }
    Ok(report)
}

/// Candidate degree-`nu_used` parameters matching `need` of the circle
/// royal-node targets.
fn candidate_params(
    circle: &[(Complex64, Complex64)],
    nu_used: usize,
    need: usize,
) -> Vec<BlaschkeProduct> {
    let mut out = Vec::new();
    let k = circle.len();
    if nu_used == 0 {
        if need == 0 {
            out.extend(BlaschkeProduct::constant(Complex64::new(1.0, 0.0)));
        }
        // constants equal to a target value shared by at least `need` nodes
        for i in 0..k {
            let t = circle[i].1;
            let count = circle
                .iter()
                .filter(|(_, tj)| (tj - t).norm() <= 1e-7)
                .count();
            if count >= need.max(1) {
                if let Ok(c) = BlaschkeProduct::constant(t / t.norm()) {
                    out.push(c);
                }
            }
        }
        return out;
    }
    // degree one
    match need {
        0 | 1 => {
            // underdetermined: automorphisms c·B_β with c = t/B_β(ω) hit a
            // single boundary condition for every β; sweep a few β values
            out.push(BlaschkeProduct::identity());
            for &(w, t) in circle.iter() {
                let t = t / t.norm();
                for beta in [
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.3, 0.0),
                    Complex64::new(-0.3, 0.0),
                    Complex64::new(0.0, 0.3),
                    Complex64::new(0.0, -0.3),
                    Complex64::new(0.5, 0.0),
                    Complex64::new(0.0, 0.5),
                ] {
                    let bw = (w - beta) / (Complex64::new(1.0, 0.0) - beta.conj() * w);
                    let c = t / bw;
                    if let Ok(b) = BlaschkeProduct::mobius(c / c.norm(), beta) {
                        out.push(b);
                    }
                }
            }
        }
        2 => {
            // two boundary conditions leave a one-parameter family: sweep a
            // synthetic third condition along the circle
            for i in 0..k {
                for j in (i + 1)..k {
                    let (w1, t1) = circle[i];
                    let (w2, t2) = circle[j];
                    let (t1, t2) = (t1 / t1.norm(), t2 / t2.norm());
                    if (t1 - t2).norm() <= 1e-9 {
                        continue;
                    }
                    let mid = w1 + w2;
                    let zeta = if mid.norm() > 1e-3 {
                        mid / mid.norm()
                    } else {
                        w1 * Complex64::from_polar(1.0, 0.5 * std::f64::consts::FRAC_PI_2)
                    };
                    for step in 0..48 {
                        let tau = Complex64::from_polar(
                            1.0,
                            2.0 * std::f64::consts::PI * step as f64 / 48.0,
                        );
                        if let Ok(m) = mobius_from_cross_ratio(&[(w1, t1), (w2, t2), (zeta, tau)])
                        {
                            if m.is_disc_automorphism() {
                                if let Ok(b) = m.to_blaschke() {
                                    out.push(b);
                                }
                            }
                        }
                    }
                }
            }
        }
        _ => {
            // three conditions determine the automorphism when the targets
            // share the cyclic order of the nodes
            for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        if i == j || j == l || i == l {
                            continue;
                        }
                        let (w1, t1) = circle[i];
                        let (w2, t2) = circle[j];
                        let (w3, t3) = circle[l];
                        let ts = [t1 / t1.norm(), t2 / t2.norm(), t3 / t3.norm()];
                        if (ts[0] - ts[1]).norm() <= 1e-9
                            || (ts[1] - ts[2]).norm() <= 1e-9
                            || (ts[0] - ts[2]).norm() <= 1e-9
                        {
                            continue;
                        }
                        if let Ok(m) =
                            mobius_from_cross_ratio(&[(w1, ts[0]), (w2, ts[1]), (w3, ts[2])])
                        {
                            if m.is_disc_automorphism() {
                                if let Ok(b) = m.to_blaschke() {
                                    out.push(b);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Reduces (2mp - s)/(2 - ms) and accepts it when it is a Blaschke product
/// of degree ≤ n-1.
fn try_reduce(
    h: &GammaMap,
    m: &BlaschkeProduct,
    n: usize,
    _tols: &Tolerances,
) -> Option<BlaschkeProduct> {
    let quotient = phi_of_parameter(h, m).ok()?;
    let b = BlaschkeProduct::from_rational(&quotient, 1e-6).ok()?;
    (b.degree() <= n - 1).then_some(b)
}

/// (2mp - s)/(2 - ms) as a reduced rational function.
pub fn phi_of_parameter(h: &GammaMap, m: &BlaschkeProduct) -> Result<RationalFn, CpickError> {
    let mr = m.as_rational();
    let two = RationalFn::constant(Complex64::new(2.0, 0.0));
    let num = mr.mul(&h.p).scale(Complex64::new(2.0, 0.0)).sub(&h.s);
    let den = two.sub(&mr.mul(&h.s));
    let raw = num.mul(&den.invert()?);
    Ok(RationalFn::new_with_tol(
        raw.num().clone(),
        raw.den().clone(),
        1e-6,
    )?)
}
