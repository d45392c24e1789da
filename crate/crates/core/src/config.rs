//! Numeric thresholds and search resolutions, collected in one place so the
//! CLI can override them per run.

use serde::{Deserialize, Serialize};

/// Every tolerance used by the library.
///
/// The underlying theory is exact-rank / exact-boundary language; these
/// bands are its floating-point proxies. Defaults are chosen so that the
/// worked examples of the reference corpus pass with wide margins.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative threshold below which leading polynomial coefficients are trimmed.
    pub leading_zero: f64,
    /// Floor for clustering polynomial roots into multiple roots and for
    /// matching common roots of numerator/denominator.
    pub root_cluster: f64,
    /// Relative residual accepted for a computed polynomial root.
    pub root_residual: f64,
    /// Modulus band |1 - |z|| within which a point counts as lying on 𝕋.
    pub circle_band: f64,
    /// Band for |c| = 1 checks on Blaschke unimodular constants.
    pub unimodular_const: f64,
    /// Allowed defect of ||b(e^iθ)| - 1| for a Blaschke product on 𝕋.
    pub unimodular_eval: f64,
    /// Interiority margin required of Blaschke zeros: |α| ≤ 1 - this.
    pub zero_interior: f64,
    /// Relative eigenvalue threshold: ε = eig_rel · (trace/n + 1).
    pub eig_rel: f64,
    /// Extremality band on the pencil minimum eigenvalue.
    pub ext: f64,
    /// Membership band for the open/closed Γ tests.
    pub mem: f64,
    /// Interpolation residual accepted for a solved problem.
    pub interp: f64,
    /// Interior residual target for the mixed Pick problem.
    pub interior_residual: f64,
    /// Boundary residual target for the mixed Pick problem.
    pub boundary_residual: f64,
    /// Relative size of the surviving numerator value at a boundary factor
    /// above which cancellation is refused.
    pub cancel_gate: f64,
    /// Minimum pairwise separation of interpolation nodes.
    pub node_sep: f64,
    /// Band for detecting royal target data s² = 4p.
    pub royal_eq: f64,
    /// Equality band for the boundary-disc parameters ω.
    pub omega_eq: f64,
    /// Slack on the boundary bound |s| ≤ 2 + s_bound.
    pub s_bound: f64,
    /// Largest |α| at which a degree-1 pencil minimiser is treated as
    /// genuinely interior rather than as a constant in disguise.
    pub alpha_interior: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            leading_zero: 1e-12,
            root_cluster: 1e-9,
            root_residual: 1e-8,
            circle_band: 1e-8,
            unimodular_const: 1e-12,
            unimodular_eval: 1e-10,
            zero_interior: 1e-12,
            eig_rel: 1e-9,
            ext: 1e-6,
            mem: 1e-9,
            interp: 1e-7,
            interior_residual: 1e-8,
            boundary_residual: 1e-7,
            cancel_gate: 1e-5,
            node_sep: 1e-10,
            royal_eq: 1e-9,
            omega_eq: 1e-9,
            s_bound: 1e-7,
            alpha_interior: 0.95,
        }
    }
}

impl Tolerances {
    /// Eigenvalue threshold scaled to the matrix at hand.
    pub fn eig_threshold(&self, trace: f64, n: usize) -> f64 {
        self.eig_rel * (trace / n.max(1) as f64 + 1.0)
    }
}

/// Grid resolutions for the searches over Blaschke parameters and over 𝕋.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    /// Samples of 𝕋 for the degree-0 pencil scan.
    pub deg0_samples: usize,
    /// Samples of the unimodular constant in the degree-1 scan.
    pub deg1_c_samples: usize,
    /// Radial resolution of the zero α in the degree-1 scan.
    pub deg1_radial: usize,
    /// Angular resolution of the zero α in the degree-1 scan.
    pub deg1_angular: usize,
    /// Number of best grid cells seeding local refinement.
    pub refine_starts: usize,
    /// Boundary samples for Γ-membership suprema.
    pub membership_samples: usize,
    /// Boundary samples for Γ-inner certification.
    pub inner_samples: usize,
    /// Boundary samples plus refinement for the |s| ≤ 2 verification.
    pub s_bound_samples: usize,
    /// Multistart budget for the mixed Pick solver.
    pub multistarts: usize,
    /// RNG seed for every randomised search.
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            deg0_samples: 720,
            deg1_c_samples: 720,
            deg1_radial: 24,
            deg1_angular: 96,
            refine_starts: 5,
            membership_samples: 2048,
            inner_samples: 512,
            s_bound_samples: 4096,
            multistarts: 32,
            seed: 0,
        }
    }
}
