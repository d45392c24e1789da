//! On-disk JSON formats: the problem file, the map file, and option
//! overrides. Complex scalars are `[re, im]` pairs, polynomials ascending
//! coefficient arrays.

use gamma_interp::cpick::InterpProblem;
use gamma_interp::gamma::{GammaMap, GammaPoint};
use gamma_interp::pipeline::SolveOptions;
use gamma_interp::rational::BlaschkeProduct;
use gamma_interp::{GridConfig, Tolerances};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const PROBLEM_VERSION: &str = "gamma-interp/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub version: String,
    pub nodes: Vec<[f64; 2]>,
    pub targets: Vec<TargetEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<Overrides>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetEntry {
    pub s: [f64; 2],
    pub p: [f64; 2],
}

/// Optional per-file settings. Omitted fields of `tol`/`grid` fall back to
/// library defaults; `m`/`q` pin the auxiliary parameters for replay.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<BlaschkeProduct>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<BlaschkeProduct>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapFile {
    pub version: String,
    pub s: RationalEntry,
    pub p: RationalEntry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalEntry {
    pub num: Vec<[f64; 2]>,
    pub den: Vec<[f64; 2]>,
}

fn c(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn cv(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl ProblemFile {
    pub fn from_problem(prob: &InterpProblem) -> Self {
        ProblemFile {
            version: PROBLEM_VERSION.into(),
            nodes: prob.nodes().iter().map(|&z| cv(z)).collect(),
            targets: prob
                .targets()
                .iter()
                .map(|t| TargetEntry {
                    s: cv(t.s),
                    p: cv(t.p),
                })
                .collect(),
            overrides: None,
        }
    }

    pub fn validate_version(&self) -> Result<(), String> {
        if self.version != PROBLEM_VERSION {
            return Err(format!(
                "unsupported problem file version {:?} (expected {PROBLEM_VERSION:?})",
                self.version
            ));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        self.overrides
            .as_ref()
            .and_then(|o| o.tol)
            .unwrap_or_default()
    }

    pub fn grid(&self) -> GridConfig {
        self.overrides
            .as_ref()
            .and_then(|o| o.grid)
            .unwrap_or_default()
    }

    pub fn to_problem(&self, tols: Tolerances) -> Result<InterpProblem, String> {
        self.validate_version()?;
        let nodes: Vec<Complex64> = self.nodes.iter().map(|&v| c(v)).collect();
        let targets: Vec<GammaPoint> = self
            .targets
            .iter()
            .map(|t| GammaPoint::new(c(t.s), c(t.p)))
            .collect();
        InterpProblem::new(nodes, targets, tols).map_err(|e| e.to_string())
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            fixed_m: self.overrides.as_ref().and_then(|o| o.m.clone()),
            fixed_q: self.overrides.as_ref().and_then(|o| o.q.clone()),
        }
    }
}

impl MapFile {
    pub fn from_map(h: &GammaMap) -> Self {
        let conv = |f: &gamma_interp::rational::RationalFn| RationalEntry {
            num: f.num().coeffs().iter().map(|&z| cv(z)).collect(),
            den: f.den().coeffs().iter().map(|&z| cv(z)).collect(),
        };
        MapFile {
            version: PROBLEM_VERSION.into(),
            s: conv(&h.s),
            p: conv(&h.p),
        }
    }

    pub fn to_map(&self) -> Result<GammaMap, String> {
        use gamma_interp::rational::{ComplexPoly, RationalFn};
        let conv = |e: &RationalEntry| -> Result<RationalFn, String> {
            RationalFn::new(
                ComplexPoly::new(e.num.iter().map(|&v| c(v)).collect()),
                ComplexPoly::new(e.den.iter().map(|&v| c(v)).collect()),
            )
            .map_err(|e| e.to_string())
        };
        Ok(GammaMap::new(conv(&self.s)?, conv(&self.p)?))
    }
}
