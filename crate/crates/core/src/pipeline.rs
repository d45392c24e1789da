//! End-to-end solver for the 3-point problem: special-case dispatch (royal
//! targets, boundary targets, singular interior Pick block), construction
//! of s = 2(mp - q)/(1 - mq) with explicit cancellation of the boundary
//! factors, verification (|s| ≤ 2 on 𝕋, interpolation, Γ-inner), and the
//! aligned/caddywhompus classification by cyclic order of royal-node data.

use crate::config::{GridConfig, Tolerances};
use crate::cpick::{self, CpickError, InterpProblem, PencilReport, PencilStatus};
use crate::diamond::{self, DiamondError};
use crate::gamma::{
    self, BoundarySolution, GammaError, GammaMap, InnerReport, RoyalNode, RoyalStructure,
};
use crate::nevpick::{self, NPData, NevpickError, PsdStatus, Solvability};
use crate::rational::{
    poly_roots, BlaschkeProduct, ComplexPoly, RationalError, RationalFn,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum PipelineError {
    #[error("targets not co-located: ∂Γ and G targets are mixed")]
    MixedTargets,
    #[error("repeated points in the reference triple")]
    RepeatedTriplePoints,
    #[error("superficial map: image lies in the boundary of Γ")]
    SuperficialMap,
    #[error("map is not Γ-inner (defect {0:.3e})")]
    NotGammaInner(f64),
    #[error("cancellation failed at τ = {tau} (numerator residual {residual:.3e})")]
    CancellationFailed { tau: Complex64, residual: f64 },
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Nevpick(#[from] NevpickError),
    #[error(transparent)]
    Cpick(#[from] CpickError),
    #[error(transparent)]
    Diamond(#[from] DiamondError),
}

/// Final status of a solve run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    UnsolvableC1,
    DiamondInfeasible,
    VerificationFailed,
    Inconclusive,
}

/// Coarse class of a successfully constructed interpolant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvedClass {
    Aligned,
    RoyalVarietyCase,
    DegenerateLowDegree,
}

/// Kind of a rational Γ-inner map by its circle royal-node data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Aligned,
    Caddywhompus,
    Neither,
    RoyalMap,
}

/// A triple of circle royal nodes whose half-conjugate s-values share the
/// nodes' cyclic order, witnessing alignment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AlignedTriple {
    pub nodes: [[f64; 2]; 3],
    pub targets: [[f64; 2]; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub kind: ClassKind,
    pub degree_p: usize,
    /// Distinct royal nodes on 𝕋.
    pub circle_nodes: Vec<[f64; 2]>,
    pub multiplicities: Vec<usize>,
    /// ½·conj(s(ω)) for each circle node.
    pub target_points: Vec<[f64; 2]>,
    /// A same-cyclic-order triple, when one exists.
    pub orientation_evidence: Option<AlignedTriple>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    /// Smallest pole modulus across both components.
    pub min_pole_modulus: f64,
    /// max over the boundary grid (refined) of |s|.
    pub max_abs_s: f64,
    /// max over nodes of |h(λ_j) - z_j| (both components).
    pub interp_residual: f64,
    pub inner: Option<InnerReport>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub interp_residual: Option<f64>,
    pub max_abs_s: Option<f64>,
    pub royal_nodes: Vec<RoyalNode>,
    pub classification: Option<SolvedClass>,
    pub class_detail: Option<Classification>,
    pub pencil_min_eigenvalue: Option<f64>,
    pub pencil_status: Option<PencilStatus>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub h: Option<GammaMap>,
    pub m: Option<BlaschkeProduct>,
    pub q: Option<BlaschkeProduct>,
    pub diagnostics: SolveDiagnostics,
}

/// Replay overrides: pin the auxiliary extremal and/or q instead of
/// searching for them.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveOptions {
    pub fixed_m: Option<BlaschkeProduct>,
    pub fixed_q: Option<BlaschkeProduct>,
}

/// Orientation of a circle triple: positive for counterclockwise.
fn orientation(x: Complex64, y: Complex64, z: Complex64) -> f64 {
    -((y - x) * (z - x).conj()).im
}

/// Do two triples on 𝕋 share a cyclic order? A repeated point in `b` makes
/// the answer false; a repeated point in `a` is an error.
pub fn cyclic_order_same(a: &[Complex64; 3], b: &[Complex64; 3]) -> Result<bool, PipelineError> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (a[i] - a[j]).norm() <= 1e-12 {
                return Err(PipelineError::RepeatedTriplePoints);
            }
        }
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (b[i] - b[j]).norm() <= 1e-12 {
                return Ok(false);
            }
        }
    }
    let oa = orientation(a[0], a[1], a[2]);
    let ob = orientation(b[0], b[1], b[2]);
    Ok(oa * ob > 0.0)
}

/// Classifies a rational Γ-inner map with interior range by the cyclic
/// order of its circle royal nodes against ½·conj(s(ω)).
pub fn classify(h: &GammaMap, tols: &Tolerances) -> Result<Classification, PipelineError> {
    let inner = gamma::gamma_inner_check(h, 512, tols)?;
    if !inner.is_inner {
        return Err(PipelineError::NotGammaInner(inner.max_boundary_defect));
    }
    let interior_ok = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, -0.2),
        Complex64::new(-0.1, 0.4),
    ]
    .iter()
    .any(|&z| gamma::in_open_gamma(&h.eval(z), tols));
    if !interior_ok {
        return Err(PipelineError::SuperficialMap);
    }
    let royal = gamma::royal_nodes(h, tols)?;
    let nodes = match royal {
        RoyalStructure::RoyalMap => {
            return Ok(Classification {
                kind: ClassKind::RoyalMap,
                degree_p: h.degree_p(),
                circle_nodes: Vec::new(),
                multiplicities: Vec::new(),
                target_points: Vec::new(),
                orientation_evidence: None,
            })
        }
        RoyalStructure::Nodes(n) => n,
    };
    let mut circle: Vec<(Complex64, usize)> = Vec::new();
    for nd in &nodes {
        if nd.on_circle {
            if let Some(w) = nd.point() {
                circle.push((w / w.norm(), nd.multiplicity));
            }
        }
    }
    let targets: Vec<Complex64> = circle
        .iter()
        .map(|&(w, _)| 0.5 * h.s.eval(w).conj())
        .collect();
    let dp = h.degree_p();
    let k = circle.len();

    // hunt for a triple of distinct nodes with distinct targets in the same
    // cyclic order as the nodes
    let mut evidence = None;
    'outer: for i in 0..k {
        for j in (i + 1)..k {
            for l in (j + 1)..k {
                let a = [circle[i].0, circle[j].0, circle[l].0];
                let b = [targets[i], targets[j], targets[l]];
                if cyclic_order_same(&a, &b)? {
                    evidence = Some(AlignedTriple {
                        nodes: a.map(|z| [z.re, z.im]),
                        targets: b.map(|z| [z.re, z.im]),
                    });
                    break 'outer;
                }
            }
        }
    }

    let kind = if dp <= 4 && k + 1 >= dp && (dp < 4 || evidence.is_some()) {
        ClassKind::Aligned
    } else if dp == 4 && k >= 3 && evidence.is_none() {
        ClassKind::Caddywhompus
    } else {
        ClassKind::Neither
    };
    Ok(Classification {
        kind,
        degree_p: dp,
        circle_nodes: circle.iter().map(|&(w, _)| [w.re, w.im]).collect(),
        multiplicities: circle.iter().map(|&(_, m)| m).collect(),
        target_points: targets.iter().map(|t| [t.re, t.im]).collect(),
        orientation_evidence: evidence,
    })
}

/// Builds s = 2(mp - q)/(1 - mq), cancelling the factor (λ - τ) for every
/// root τ of mq = 1. The boundary interpolation conditions on p make the
/// numerator vanish there; a surviving numerator value above the gate
/// aborts the construction. On success s shares p's denominator.
pub fn construct_s(
    m: &BlaschkeProduct,
    q: &BlaschkeProduct,
    p: &BlaschkeProduct,
    tols: &Tolerances,
) -> Result<RationalFn, PipelineError> {
    let mr = m.as_rational();
    let qr = q.as_rational();
    let pr = p.as_rational();
    let (nm, dm) = (mr.num(), mr.den());
    let (nq, dq) = (qr.num(), qr.den());
    let (np, dp) = (pr.num(), pr.den());

    // 2(N_m N_p D_q - N_q D_m D_p) over (D_m D_q - N_m N_q) D_p
    let mut num = nm
        .mul(np)
        .mul(dq)
        .sub(&nq.mul(dm).mul(dp))
        .scale(Complex64::new(2.0, 0.0));
    let mut gate_poly = dm.mul(dq).sub(&nm.mul(nq));
    let scale = num.max_coeff_norm().max(1e-300);

    if gate_poly.degree().unwrap_or(0) > 0 {
        for (tau, mult) in poly_roots(&gate_poly.clone())? {
            for _ in 0..mult {
                let res = num.eval(tau).norm() / scale;
                if res > tols.cancel_gate {
                    return Err(PipelineError::CancellationFailed {
                        tau,
                        residual: res,
                    });
                }
                num = num.deflate(tau);
                gate_poly = gate_poly.deflate(tau);
            }
        }
    }
    // what is left of the gate polynomial is a constant
    let lead = gate_poly.coeff(0);
    let den = dp.scale(lead);
    Ok(RationalFn::new_unreduced(num, den)?)
}

/// max over a refined boundary grid of |s(e^{iθ})|.
pub fn max_abs_s_on_circle(s: &RationalFn, samples: usize) -> f64 {
    let n = samples.max(64);
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 0;
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let v = s.eval(Complex64::from_polar(1.0, th)).norm();
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let eval = |t: f64| s.eval(Complex64::from_polar(1.0, t)).norm();
    let (mut lo, mut hi) = (best_k as f64 * step - step, best_k as f64 * step + step);
    let golden = 0.381_966_011_250_105;
    let (mut x1, mut x2) = (lo + golden * (hi - lo), hi - golden * (hi - lo));
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..40 {
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

/// Full verification of a candidate interpolant: analyticity across the
/// closed disc, |s| ≤ 2 on 𝕋, interpolation residuals, and the Γ-inner
/// boundary conditions. Failures are reported, not thrown.
pub fn verify_interpolant(
    h: &GammaMap,
    prob: &InterpProblem,
    grid: &GridConfig,
) -> VerifyReport {
    let tols = prob.tolerances();
    let mut failures = Vec::new();
    let mut min_pole = f64::INFINITY;
    for f in [&h.s, &h.p] {
        match f.poles() {
            Ok(poles) => {
                for (pole, _) in poles {
                    min_pole = min_pole.min(pole.norm());
                }
            }
            Err(e) => failures.push(format!("pole analysis failed: {e}")),
        }
    }
    if min_pole < 1.0 + 1e-9 {
        failures.push(format!(
            "denominator root with modulus {min_pole} inside or too close to the closed disc"
        ));
    }
    let max_abs_s = max_abs_s_on_circle(&h.s, grid.s_bound_samples);
    if max_abs_s > 2.0 + tols.s_bound {
        failures.push(format!("|s| reaches {max_abs_s} on the circle"));
    }
    let mut interp = 0.0f64;
    for (l, t) in prob.nodes().iter().zip(prob.targets()) {
        let v = h.eval(*l);
        interp = interp.max((v.s - t.s).norm()).max((v.p - t.p).norm());
    }
    if interp > tols.interp {
        failures.push(format!("interpolation residual {interp:.3e}"));
    }
    let inner = match gamma::gamma_inner_check(h, grid.inner_samples, tols) {
        Ok(rep) => {
            if !rep.is_inner {
                failures.push(format!(
                    "boundary conditions fail (defect {:.3e})",
                    rep.max_boundary_defect
                ));
            }
            Some(rep)
        }
        Err(e) => {
            failures.push(format!("inner check failed: {e}"));
            None
        }
    };
    VerifyReport {
        pass: failures.is_empty(),
        min_pole_modulus: min_pole,
        max_abs_s,
        interp_residual: interp,
        inner,
        failures,
    }
}

/// Which cancellation mechanism applies at a candidate point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CancellationEntry {
    #[serde(with = "crate::serde_complex")]
    pub point: Complex64,
    pub case: String,
    pub cancellations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CancellationReport {
    pub entries: Vec<CancellationEntry>,
    pub predicted_degree: usize,
    pub numeric_degree: usize,
}

/// Locates every candidate cancellation point of
/// φ_υ = (2υp - s)/(2 - υs) — the roots of m²p = 1, of p = q², and of
/// mq = 1 — decides which mechanism fires, and cross-checks the predicted
/// degree d(υ) + d(p) - (total cancellations) against the numerically
/// reduced function.
pub fn cancellation_analysis(
    m: &BlaschkeProduct,
    q: &BlaschkeProduct,
    p: &BlaschkeProduct,
    upsilon: &BlaschkeProduct,
    tols: &Tolerances,
) -> Result<CancellationReport, PipelineError> {
    let s = construct_s(m, q, p, tols)?;
    let mr = m.as_rational();
    let qr = q.as_rational();
    let pr = p.as_rational();

    // root sets with multiplicities
    let m2p = mr.mul(&mr).mul(&pr);
    let m2p_minus_1 = m2p.num().sub(m2p.den());
    let pq2 = pr.sub(&qr.mul(&qr));
    let mq = mr.mul(&qr);
    let mq_minus_1 = mq.num().sub(mq.den());

    let roots_of = |poly: &ComplexPoly| -> Result<Vec<(Complex64, usize)>, PipelineError> {
        if poly.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        Ok(poly_roots(poly)?)
    };
    let sigma_roots = roots_of(&m2p_minus_1)?;
    let beta_roots = roots_of(&pq2.num().clone())?;
    let tau_roots = roots_of(&mq_minus_1)?;

    let order_at = |set: &[(Complex64, usize)], z: Complex64| -> usize {
        set.iter()
            .find(|(w, _)| (w - z).norm() <= 1e-6 * (1.0 + z.norm()))
            .map(|&(_, m)| m)
            .unwrap_or(0)
    };

    // merge candidate points
    let mut points: Vec<Complex64> = Vec::new();
    for (z, _) in sigma_roots.iter().chain(&beta_roots).chain(&tau_roots) {
        if !points.iter().any(|w| (w - z).norm() <= 1e-6 * (1.0 + z.norm())) {
            points.push(*z);
        }
    }

    let mut entries = Vec::new();
    let mut total = 0usize;
    for &z in &points {
        let nu_sigma = order_at(&sigma_roots, z);
        let nu_beta = order_at(&beta_roots, z);
        let nu_tau = order_at(&tau_roots, z);
        let uz = upsilon.eval(z);
        let mz = m.eval(z);
        let qz = q.eval(z);
        let close = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-6;
        let (case, count): (&str, usize) = if nu_tau >= 1 {
            // τ points: cancellation only through υ(τ) = -m(τ) and a double
            // zero of p - q² (the boundary interpolation structure)
            if nu_beta >= 2 && close(uz, -mz) {
                ("tau", 1)
            } else if nu_beta >= 3 {
                ("tau-beta", 0)
            } else {
                ("tau", 0)
            }
        } else if nu_sigma >= 1 && nu_beta >= 2 {
            // double zero of p - q² at an m²p = 1 point
            if close(uz, -1.0 / qz) {
                let a_ups = blaschke_phasar(upsilon, z);
                let a_q = blaschke_phasar(q, z);
                match (a_ups, a_q) {
                    (Some(au), Some(aq)) if (au + aq).abs() <= 1e-6 => ("beta-beta", 2),
                    _ => ("beta-beta", 1),
                }
            } else {
                ("beta-beta", 0)
            }
        } else if nu_sigma >= 1 && nu_beta >= 1 {
            if close(uz, mz) {
                // a double cancellation would need Aυ = -½Ap, impossible
                // for inner p
                ("beta-sigma", 1)
            } else {
                ("beta-sigma", 0)
            }
        } else if nu_sigma >= 1 {
            if close(uz, mz) {
                // order of the υ - m zero, capped by the m²p - 1 order
                let du = derivative_gap(upsilon, m, z);
                let n = if du <= 1e-6 { 2.min(nu_sigma) } else { 1 };
                ("sigma", n)
            } else {
                ("sigma", 0)
            }
        } else if nu_beta >= 1 {
            if qz.norm() > 1e-9 && close(uz, -1.0 / qz) {
                ("beta", 1)
            } else {
                ("beta", 0)
            }
        } else {
            ("none", 0)
        };
        total += count;
        entries.push(CancellationEntry {
            point: z,
            case: case.to_string(),
            cancellations: count,
        });
    }

    // numeric degree of the reduced φ_υ
    let ur = upsilon.as_rational();
    let two = RationalFn::constant(Complex64::new(2.0, 0.0));
    let num = ur.mul(&pr).scale(Complex64::new(2.0, 0.0)).sub(&s);
    let den = two.sub(&ur.mul(&s));
    let raw = num.mul(&den.invert()?);
    let reduced = RationalFn::new_with_tol(raw.num().clone(), raw.den().clone(), 1e-6)?;
    let predicted = (upsilon.degree() + p.degree()).saturating_sub(total);
    Ok(CancellationReport {
        entries,
        predicted_degree: predicted,
        numeric_degree: reduced.degree(),
    })
}

fn blaschke_phasar(b: &BlaschkeProduct, z: Complex64) -> Option<f64> {
    if (z.norm() - 1.0).abs() > 1e-8 {
        return None;
    }
    crate::rational::phasar_derivative(&b.as_rational(), z).ok()
}

fn derivative_gap(u: &BlaschkeProduct, m: &BlaschkeProduct, z: Complex64) -> f64 {
    let h = 1e-6;
    let d = |b: &BlaschkeProduct| (b.eval(z + h) - b.eval(z - h)) / (2.0 * h);
    (d(u) - d(m)).norm()
}

/// The full 3-point algorithm.
pub fn solve_3pt(prob: &InterpProblem, opts: &SolveOptions, grid: &GridConfig) -> SolveReport {
    let tols = *prob.tolerances();
    let mut notes = Vec::new();

    // target location: all interior or all boundary
    let in_g: Vec<bool> = prob
        .targets()
        .iter()
        .map(|t| gamma::in_open_gamma(t, &tols))
        .collect();
    if in_g.iter().any(|&b| b) && !in_g.iter().all(|&b| b) {
        return report_error(
            SolveStatus::Inconclusive,
            "targets not co-located: no analytic map mixes G with ∂Γ",
        );
    }
    if !in_g.iter().all(|&b| b) {
        return solve_boundary(prob, grid, notes);
    }

    // royal targets: s² = 4p throughout
    let royal = prob.targets().iter().all(|t| {
        (t.s * t.s - 4.0 * t.p).norm() <= tols.royal_eq * (1.0 + t.s.norm_sqr() + 4.0 * t.p.norm())
    });
    if royal {
        return solve_royal(prob, &mut notes);
    }

    // pencil scan (always run: dispatch + diagnostics)
    let pencil = cpick::check_c_nu(prob, 1, grid);
    if pencil.status == PencilStatus::Fails {
        return SolveReport {
            status: SolveStatus::UnsolvableC1,
            h: None,
            m: None,
            q: None,
            diagnostics: diag_from_pencil(&pencil, notes),
        };
    }

    // choose the working (m, q)
    let pair: Option<(BlaschkeProduct, BlaschkeProduct)> = if let Some(fm) = &opts.fixed_m {
        let q = match &opts.fixed_q {
            Some(fq) => Some(fq.clone()),
            None => match cpick::compute_q(prob, fm) {
                Ok(q) => Some(q),
                Err(_) => match cpick::refine_extremal_pair(prob, fm) {
                    Ok((_, q)) => Some(q),
                    Err(e) => {
                        notes.push(format!("override m rejected: {e}"));
                        None
                    }
                },
            },
        };
        q.map(|q| (fm.clone(), q))
    } else {
        match (&pencil.auxiliary_extremal, &pencil.q) {
            (Some(m), Some(q)) => Some((m.clone(), q.clone())),
            _ => None,
        }
    };

    let (m_use, q_use) = match pair {
        Some(p) => p,
        None => {
            notes.push(
                "pencil condition holds but no auxiliary extremal parameter is available; \
                 no construction is attempted"
                    .into(),
            );
            return SolveReport {
                status: SolveStatus::Inconclusive,
                h: None,
                m: None,
                q: None,
                diagnostics: diag_from_pencil(&pencil, notes),
            };
        }
    };

    // singular interior Pick block: p is the unique extremal interpolant
    let p_data = match NPData::new(
        prob.nodes().to_vec(),
        prob.targets().iter().map(|t| t.p).collect(),
    ) {
        Ok(d) => d,
        Err(e) => {
            notes.push(format!("interior data invalid: {e}"));
            return SolveReport {
                status: SolveStatus::Inconclusive,
                h: None,
                m: Some(m_use),
                q: Some(q_use),
                diagnostics: diag_from_pencil(&pencil, notes),
            };
        }
    };
    let interior_status = nevpick::psd_status(&nevpick::pick_matrix(&p_data), &tols);
    let p_hat: Result<BlaschkeProduct, PipelineError> = match interior_status {
        PsdStatus::Indefinite => {
            // the averaged pencil bound fails, contradicting the scan
            notes.push("interior Pick block indefinite".into());
            return SolveReport {
                status: SolveStatus::UnsolvableC1,
                h: None,
                m: Some(m_use),
                q: Some(q_use),
                diagnostics: diag_from_pencil(&pencil, notes),
            };
        }
        PsdStatus::SingularPsd(_) => {
            notes.push("interior Pick block singular: taking the unique extremal p".into());
            nevpick::np_solve_extremal(&p_data, &tols).map_err(Into::into)
        }
        PsdStatus::PositiveDefinite => match diamond::make_diamond(prob, &m_use, &q_use) {
            Ok(dp) => {
                let feas = diamond::diamond_feasible(&dp, &tols);
                if !feas.feasible {
                    notes.push(format!(
                        "mixed Pick matrix not completable to rank ≤ 4 (rank {}, min eig {:.3e})",
                        feas.rank, feas.min_eig
                    ));
                    return SolveReport {
                        status: SolveStatus::DiamondInfeasible,
                        h: None,
                        m: Some(m_use),
                        q: Some(q_use),
                        diagnostics: diag_from_pencil(&pencil, notes),
                    };
                }
                notes.push(format!(
                    "mixed problem feasible at rank {} with ρ = {:?}",
                    feas.rank, feas.rho
                ));
                diamond::diamond_solve(&dp, &tols, grid).map_err(Into::into)
            }
            Err(e) => Err(e.into()),
        },
    };

    let p_hat = match p_hat {
        Ok(p) => p,
        Err(e) => {
            notes.push(format!("construction of p failed: {e}"));
            return SolveReport {
                status: SolveStatus::Inconclusive,
                h: None,
                m: Some(m_use),
                q: Some(q_use),
                diagnostics: diag_from_pencil(&pencil, notes),
            };
        }
    };

    let s_hat = match construct_s(&m_use, &q_use, &p_hat, &tols) {
        Ok(s) => s,
        Err(e) => {
            notes.push(format!("construction of s failed: {e}"));
            return SolveReport {
                status: SolveStatus::Inconclusive,
                h: None,
                m: Some(m_use),
                q: Some(q_use),
                diagnostics: diag_from_pencil(&pencil, notes),
            };
        }
    };
    let h = GammaMap::new(s_hat, p_hat.as_rational());
    finish(h, Some((m_use, q_use)), prob, grid, Some(&pencil), notes)
}

fn solve_royal(prob: &InterpProblem, notes: &mut Vec<String>) -> SolveReport {
    let tols = *prob.tolerances();
    notes.push("royal targets: reducing to a scalar problem".into());
    let data = match NPData::new(
        prob.nodes().to_vec(),
        prob.targets().iter().map(|t| -0.5 * t.s).collect(),
    ) {
        Ok(d) => d,
        Err(e) => return report_error(SolveStatus::Inconclusive, &format!("{e}")),
    };
    let f = match nevpick::np_solvable(&data, &tols) {
        Solvability::Unsolvable => {
            notes.push("scalar problem for the royal coordinate unsolvable".into());
            return SolveReport {
                status: SolveStatus::UnsolvableC1,
                h: None,
                m: None,
                q: None,
                diagnostics: SolveDiagnostics {
                    interp_residual: None,
                    max_abs_s: None,
                    royal_nodes: Vec::new(),
                    classification: None,
                    class_detail: None,
                    pencil_min_eigenvalue: None,
                    pencil_status: None,
                    notes: std::mem::take(notes),
                },
            };
        }
        Solvability::ExtremallySolvable => nevpick::np_solve_extremal(&data, &tols),
        Solvability::Solvable => nevpick::np_solve_blaschke(&data, &tols),
    };
    let f = match f {
        Ok(f) => f,
        Err(e) => return report_error(SolveStatus::Inconclusive, &format!("{e}")),
    };
    // g = -f interpolates s_j/2; h = (2g, g²)
    let g = f.scale(Complex64::new(-1.0, 0.0)).expect("unimodular scale");
    let gr = g.as_rational();
    let h = GammaMap::new(gr.scale(Complex64::new(2.0, 0.0)), gr.mul(&gr));
    finish(
        h,
        None,
        prob,
        &GridConfig::default(),
        None,
        std::mem::take(notes),
    )
}

fn solve_boundary(prob: &InterpProblem, grid: &GridConfig, mut notes: Vec<String>) -> SolveReport {
    let tols = *prob.tolerances();
    notes.push("all targets on ∂Γ: boundary routing".into());
    match gamma::boundary_interp_solve(prob.nodes(), prob.targets(), &tols) {
        Ok(BoundarySolution::Constant(z)) => {
            let h = GammaMap::new(RationalFn::constant(z.s), RationalFn::constant(z.p));
            notes.push("all targets equal a point of bΓ: constant map".into());
            finish(h, None, prob, grid, None, notes)
        }
        Ok(BoundarySolution::DiscFamily { omega, f }) => {
            let fr = f.as_rational();
            let s = fr
                .scale(omega)
                .add(&RationalFn::constant(omega.conj()));
            let h = GammaMap::new(s, fr);
            notes.push(format!(
                "targets lie in the boundary disc of ω = {omega}; representative Schur solution"
            ));
            finish(h, None, prob, grid, None, notes)
        }
        Ok(BoundarySolution::Unsolvable) => {
            // certify through the pencil when possible
            let pencil = cpick::check_c_nu(prob, 1, grid);
            let status = if pencil.status == PencilStatus::Fails {
                SolveStatus::UnsolvableC1
            } else {
                notes.push(
                    "boundary geometry obstructs every interpolant, but the pencil scan \
                     did not certify failure"
                        .into(),
                );
                SolveStatus::Inconclusive
            };
            SolveReport {
                status,
                h: None,
                m: None,
                q: None,
                diagnostics: diag_from_pencil(&pencil, notes),
            }
        }
        Err(e) => report_error(SolveStatus::Inconclusive, &format!("{e}")),
    }
}

/// Shared tail: verify, classify, package.
fn finish(
    h: GammaMap,
    pair: Option<(BlaschkeProduct, BlaschkeProduct)>,
    prob: &InterpProblem,
    grid: &GridConfig,
    pencil: Option<&PencilReport>,
    mut notes: Vec<String>,
) -> SolveReport {
    let tols = prob.tolerances();
    let verify = verify_interpolant(&h, prob, grid);
    let royal = gamma::royal_nodes(&h, tols)
        .map(|r| match r {
            RoyalStructure::Nodes(n) => n,
            RoyalStructure::RoyalMap => Vec::new(),
        })
        .unwrap_or_default();
    let (classification, class_detail) = match classify(&h, tols) {
        Ok(c) => {
            let label = match c.kind {
                ClassKind::RoyalMap => Some(SolvedClass::RoyalVarietyCase),
                ClassKind::Aligned => Some(SolvedClass::Aligned),
                _ => Some(SolvedClass::DegenerateLowDegree),
            };
            (label, Some(c))
        }
        Err(PipelineError::SuperficialMap) => {
            notes.push("image lies in ∂Γ: superficial solution".into());
            (Some(SolvedClass::DegenerateLowDegree), None)
        }
        Err(e) => {
            notes.push(format!("classification unavailable: {e}"));
            (None, None)
        }
    };
    let pass = verify.pass && classification.is_some();
    if !verify.pass {
        notes.extend(verify.failures.iter().cloned());
    }
    let (m, q) = match pair {
        Some((m, q)) => (Some(m), Some(q)),
        None => (None, None),
    };
    SolveReport {
        status: if pass {
            SolveStatus::Solved
        } else {
            SolveStatus::VerificationFailed
        },
        h: Some(h),
        m,
        q,
        diagnostics: SolveDiagnostics {
            interp_residual: Some(verify.interp_residual),
            max_abs_s: Some(verify.max_abs_s),
            royal_nodes: royal,
            classification: if pass { classification } else { None },
            class_detail,
            pencil_min_eigenvalue: pencil.map(|p| p.min_eigenvalue),
            pencil_status: pencil.map(|p| p.status),
            notes,
        },
    }
}

fn diag_from_pencil(pencil: &PencilReport, notes: Vec<String>) -> SolveDiagnostics {
    SolveDiagnostics {
        interp_residual: None,
        max_abs_s: None,
        royal_nodes: Vec::new(),
        classification: None,
        class_detail: None,
        pencil_min_eigenvalue: Some(pencil.min_eigenvalue),
        pencil_status: Some(pencil.status),
        notes,
    }
}

fn report_error(status: SolveStatus, msg: &str) -> SolveReport {
    SolveReport {
        status,
        h: None,
        m: None,
        q: None,
        diagnostics: SolveDiagnostics {
            interp_residual: None,
            max_abs_s: None,
            royal_nodes: Vec::new(),
            classification: None,
            class_detail: None,
            pencil_min_eigenvalue: None,
            pencil_status: None,
            notes: vec![msg.to_string()],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::families;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn nodes() -> Vec<Complex64> {
        vec![c64(0.3, 0.0), c64(-0.2, 0.0), c64(0.0, 0.4)]
    }

    #[test]
    fn cyclic_order_examples() {
        let one = c64(1.0, 0.0);
        let i = c64(0.0, 1.0);
        let m1 = c64(-1.0, 0.0);
        assert!(cyclic_order_same(&[one, i, m1], &[one, i, m1]).unwrap());
        assert!(!cyclic_order_same(&[one, i, m1], &[one, -i, m1]).unwrap());
        // repeated point in the second triple: never the same order
        assert!(!cyclic_order_same(&[one, i, m1], &[one, m1, one]).unwrap());
        assert!(matches!(
            cyclic_order_same(&[one, one, m1], &[one, i, m1]),
            Err(PipelineError::RepeatedTriplePoints)
        ));
    }

    #[test]
    fn construct_s_reproduces_aligned_family() {
        let r = 0.5;
        let m = BlaschkeProduct::mobius(c64(-1.0, 0.0), c64(0.0, 0.0)).unwrap();
        let q = BlaschkeProduct::new(c64(-1.0, 0.0), vec![c64(0.0, 0.0); 2]).unwrap();
        // p = λ(λ³+r)/(1+rλ³) as a Blaschke product: zeros at 0 and (-r)^{1/3}
        let cube = (-r as f64).abs().powf(1.0 / 3.0);
        let mut zeros = vec![c64(0.0, 0.0)];
        for k in 0..3 {
            let th = std::f64::consts::PI * (2.0 * k as f64 + 1.0) / 3.0;
            zeros.push(Complex64::from_polar(cube, th));
        }
        let p = BlaschkeProduct::new(c64(1.0, 0.0), zeros).unwrap();
        // sanity: p matches the closed form
        let p_true = |z: Complex64| z * (z.powi(3) + r) / (1.0 + r * z.powi(3));
        for z in [c64(0.3, 0.1), c64(-0.2, 0.4)] {
            assert!((p.eval(z) - p_true(z)).norm() < 1e-12);
        }
        let s = construct_s(&m, &q, &p, &tols()).unwrap();
        let s_true = |z: Complex64| 2.0 * (1.0 - r) * z * z / (1.0 + r * z.powi(3));
        for k in 0..12 {
            let z = Complex64::from_polar(0.07 * k as f64, 1.1 * k as f64);
            assert!(
                (s.eval(z) - s_true(z)).norm() <= 1e-9,
                "at {z}: {}",
                (s.eval(z) - s_true(z)).norm()
            );
        }
        // max |s| on the circle is 2, attained at the royal nodes
        let m = max_abs_s_on_circle(&s, 512);
        assert!((m - 2.0).abs() < 1e-9, "{m}");
    }

    #[test]
    fn construct_s_constant_parameter() {
        // m = 1, p = q²: s = -2q
        let q = BlaschkeProduct::new(c64(1.0, 0.0), vec![c64(0.3, 0.1), c64(-0.2, 0.2)]).unwrap();
        let m = BlaschkeProduct::constant(c64(1.0, 0.0)).unwrap();
        let p = q.product(&q);
        let s = construct_s(&m, &q, &p, &tols()).unwrap();
        for z in [c64(0.4, 0.2), c64(-0.1, -0.3)] {
            assert!((s.eval(z) + 2.0 * q.eval(z)).norm() < 1e-9);
        }
    }

    #[test]
    fn construct_s_rejects_broken_boundary_condition() {
        let m = BlaschkeProduct::mobius(c64(-1.0, 0.0), c64(0.0, 0.0)).unwrap();
        let q = BlaschkeProduct::new(c64(-1.0, 0.0), vec![c64(0.0, 0.0); 2]).unwrap();
        // perturb one zero of the correct p so that p(τ) is off by ~1e-2
        let cube = 0.5f64.powf(1.0 / 3.0);
        let mut zeros = vec![c64(0.0, 0.0)];
        for k in 0..3 {
            let th = std::f64::consts::PI * (2.0 * k as f64 + 1.0) / 3.0;
            zeros.push(Complex64::from_polar(cube, th));
        }
        zeros[1] += c64(0.01, 0.0);
        let p = BlaschkeProduct::new(c64(1.0, 0.0), zeros).unwrap();
        assert!(matches!(
            construct_s(&m, &q, &p, &tols()),
            Err(PipelineError::CancellationFailed { .. })
        ));
    }

    #[test]
    fn classify_corpus() {
        let t = tols();
        let c = classify(&families::ex52_2(0.5), &t).unwrap();
        assert_eq!(c.kind, ClassKind::Aligned, "{c:?}");
        assert_eq!(c.circle_nodes.len(), 3);

        let c = classify(&families::excaddy2(0.5).unwrap(), &t).unwrap();
        assert_eq!(c.kind, ClassKind::Caddywhompus, "{c:?}");
        assert_eq!(c.circle_nodes.len(), 4);

        let c = classify(&families::excaddy3(-1.0 / 3.0f64.sqrt()).unwrap(), &t).unwrap();
        assert_eq!(c.kind, ClassKind::Caddywhompus, "{c:?}");

        // |α| < ½: only two circle nodes at degree 4 → neither
        let c = classify(&families::excaddy3(0.4).unwrap(), &t).unwrap();
        assert_eq!(c.kind, ClassKind::Neither, "{c:?}");
        assert_eq!(c.circle_nodes.len(), 2);

        // royal map
        let f = BlaschkeProduct::factor(c64(0.3, 0.0)).unwrap();
        let c = classify(&families::ex52_3(&f), &t).unwrap();
        assert_eq!(c.kind, ClassKind::RoyalMap);
    }

    #[test]
    fn classify_rejects_superficial() {
        // h = (λ + 1, λ) maps into ∂Γ
        let f = RationalFn::identity();
        let s = f.add(&RationalFn::constant(c64(1.0, 0.0)));
        let h = GammaMap::new(s, f);
        assert!(matches!(
            classify(&h, &tols()),
            Err(PipelineError::SuperficialMap)
        ));
    }

    #[test]
    fn solve_royal_branch() {
        // targets (2λ_j², λ_j⁴) from f(λ) = λ²
        let t = tols();
        let targets: Vec<_> = nodes()
            .iter()
            .map(|&z| crate::gamma::GammaPoint::new(2.0 * z * z, z.powi(4)))
            .collect();
        let prob = InterpProblem::new(nodes(), targets, t).unwrap();
        let rep = solve_3pt(&prob, &SolveOptions::default(), &GridConfig::default());
        assert_eq!(rep.status, SolveStatus::Solved, "{:?}", rep.diagnostics.notes);
        assert_eq!(rep.diagnostics.classification, Some(SolvedClass::RoyalVarietyCase));
        let h = rep.h.unwrap();
        for &z in nodes().iter() {
            let v = h.eval(z);
            assert!((v.s - 2.0 * z * z).norm() < 1e-9);
            assert!((v.p - z.powi(4)).norm() < 1e-9);
        }
    }
}
