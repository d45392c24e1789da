//! Classical scalar Nevanlinna-Pick machinery: Pick matrices, three-way
//! solvability, Schur reduction, and extraction of Blaschke-product
//! interpolants. Extremally solvable data (singular positive semidefinite
//! Pick matrix) admit a unique interpolant of degree equal to the Pick rank;
//! it is recovered by running Schur reductions until the data degenerate to
//! a unimodular constant and back-substituting Möbius maps.

use crate::config::Tolerances;
use crate::linalg;
use crate::rational::{BlaschkeProduct, ComplexPoly, RationalError, RationalFn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum NevpickError {
    #[error("interpolation nodes must be distinct points of the open disc")]
    InvalidNodes,
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("boundary value: reduction undefined")]
    BoundaryValue,
    #[error("need at least two nodes to reduce")]
    TooFewNodes,
    #[error("not extremal: solution not unique")]
    NotExtremal,
    #[error("unsolvable")]
    Unsolvable,
    #[error("interpolation residual {0:.3e} exceeds tolerance")]
    ResidualTooLarge(f64),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// Scalar interpolation data λ_j ↦ w_j with distinct nodes in 𝔻.
///
/// Values are normally points of Δ; moduli above 1 are representable (they
/// arise from Schur reductions of unsolvable data) and simply make the data
/// unsolvable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NPData {
    #[serde(with = "crate::serde_complex::vec")]
    nodes: Vec<Complex64>,
    #[serde(with = "crate::serde_complex::vec")]
    values: Vec<Complex64>,
}

impl NPData {
    pub fn new(nodes: Vec<Complex64>, values: Vec<Complex64>) -> Result<Self, NevpickError> {
        if nodes.len() != values.len() || nodes.is_empty() {
            return Err(NevpickError::InvalidNodes);
        }
        for (i, a) in nodes.iter().enumerate() {
            if a.norm() >= 1.0 {
                return Err(NevpickError::InvalidNodes);
            }
            for b in nodes.iter().skip(i + 1) {
                if (a - b).norm() <= 1e-10 {
                    return Err(NevpickError::InvalidNodes);
                }
            }
        }
        Ok(NPData { nodes, values })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Square complex matrix kept Hermitian by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HermitianMatrix {
    n: usize,
    #[serde(with = "crate::serde_complex::vec")]
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn new(entries: Vec<Complex64>, n: usize) -> Result<Self, NevpickError> {
        if entries.len() != n * n {
            return Err(NevpickError::NotHermitian(f64::INFINITY));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((entries[i * n + j] - entries[j * n + i].conj()).norm());
            }
        }
        if defect > 1e-12 * scale {
            return Err(NevpickError::NotHermitian(defect));
        }
        let mut m = HermitianMatrix { n, entries };
        m.resymmetrize();
        Ok(m)
    }

    /// Builds from the upper triangle of `f`, mirroring the rest.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v.conj();
            }
        }
        let mut m = HermitianMatrix { n, entries };
        m.resymmetrize();
        m
    }

    fn resymmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            self.entries[i * n + i] = Complex64::new(self.entries[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let v = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i].conj());
                self.entries[i * n + j] = v;
                self.entries[j * n + i] = v.conj();
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.entries, self.n)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Classification of a Hermitian matrix by its spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "rank")]
pub enum PsdStatus {
    PositiveDefinite,
    SingularPsd(usize),
    Indefinite,
}

/// Three-way solvability of Nevanlinna-Pick data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solvability {
    Solvable,
    ExtremallySolvable,
    Unsolvable,
}

/// The Pick matrix [(1 - w_i w̄_j)/(1 - λ_i λ̄_j)].
pub fn pick_matrix(data: &NPData) -> HermitianMatrix {
    let one = Complex64::new(1.0, 0.0);
    HermitianMatrix::from_fn(data.len(), |i, j| {
        (one - data.values[i] * data.values[j].conj())
            / (one - data.nodes[i] * data.nodes[j].conj())
    })
}

/// Spectral classification with threshold ε = eig_rel · (trace/n + 1).
pub fn psd_status(m: &HermitianMatrix, tols: &Tolerances) -> PsdStatus {
    let eps = tols.eig_threshold(m.trace(), m.n());
    let eigs = m.eigenvalues();
    if eigs.first().map_or(false, |&e| e < -eps) {
        return PsdStatus::Indefinite;
    }
    let rank = eigs.iter().filter(|&&e| e > eps).count();
    if rank == m.n() {
        PsdStatus::PositiveDefinite
    } else {
        PsdStatus::SingularPsd(rank)
    }
}

/// Solvability through Pick positivity.
pub fn np_solvable(data: &NPData, tols: &Tolerances) -> Solvability {
    match psd_status(&pick_matrix(data), tols) {
        PsdStatus::PositiveDefinite => Solvability::Solvable,
        PsdStatus::SingularPsd(_) => Solvability::ExtremallySolvable,
        PsdStatus::Indefinite => Solvability::Unsolvable,
    }
}

/// One Schur reduction step: drops the first node, sending the remaining
/// values through w ↦ B_{w₁}(w)/B_{λ₁}(λ). Preserves solvability status.
pub fn schur_reduce(data: &NPData, tols: &Tolerances) -> Result<NPData, NevpickError> {
    if data.len() < 2 {
        return Err(NevpickError::TooFewNodes);
    }
    let w1 = data.values[0];
    if w1.norm() >= 1.0 - tols.circle_band {
        return Err(NevpickError::BoundaryValue);
    }
    let l1 = data.nodes[0];
    let one = Complex64::new(1.0, 0.0);
    let mut nodes = Vec::with_capacity(data.len() - 1);
    let mut values = Vec::with_capacity(data.len() - 1);
    for k in 1..data.len() {
        let w = data.values[k];
        let l = data.nodes[k];
        let bw = (w - w1) / (one - w1.conj() * w);
        let bl = (l - l1) / (one - l1.conj() * l);
        nodes.push(l);
        values.push(bw / bl);
    }
    NPData::new(nodes, values)
}

/// The unique Blaschke interpolant of extremally solvable data; its degree
/// equals the rank of the Pick matrix and residuals are at most 1e-8.
pub fn np_solve_extremal(
    data: &NPData,
    tols: &Tolerances,
) -> Result<BlaschkeProduct, NevpickError> {
    let rank = match psd_status(&pick_matrix(data), tols) {
        PsdStatus::PositiveDefinite => return Err(NevpickError::NotExtremal),
        PsdStatus::Indefinite => return Err(NevpickError::Unsolvable),
        PsdStatus::SingularPsd(r) => r,
    };
    let f = chain_solve(data, Some(rank), tols)?;
    let b = BlaschkeProduct::from_rational(&f, 1e-7)?;
    check_residuals(&b, data, tols.root_residual)?;
    Ok(b)
}

/// A Blaschke interpolant of degree at most n for any solvable data; for
/// strictly solvable data the bottom of the reduction chain is completed by
/// a Möbius map instead of a constant.
pub fn np_solve_blaschke(
    data: &NPData,
    tols: &Tolerances,
) -> Result<BlaschkeProduct, NevpickError> {
    if np_solvable(data, tols) == Solvability::Unsolvable {
        return Err(NevpickError::Unsolvable);
    }
    let f = chain_solve(data, None, tols)?;
    let b = BlaschkeProduct::from_rational(&f, 1e-7)?;
    check_residuals(&b, data, tols.root_residual)?;
    Ok(b)
}

/// Runs the extremal reduction chain with a prescribed rank and returns the
/// resulting Blaschke product without gating on interpolation residuals.
/// On nearly-extremal data the output is only approximate; it serves as a
/// seed for local refinement.
pub fn np_solve_forced(
    data: &NPData,
    rank: usize,
    tols: &Tolerances,
) -> Result<BlaschkeProduct, NevpickError> {
    let f = chain_solve(data, Some(rank), tols)?;
    let mut zeros = Vec::new();
    if f.num().degree().unwrap_or(0) > 0 {
        for (z, m) in crate::rational::poly_roots(f.num())? {
            // clamp stray roots back into the disc; only a seed
            let z = if z.norm() > 0.999 {
                z * (0.999 / z.norm())
            } else {
                z
            };
            zeros.extend(std::iter::repeat(z).take(m));
        }
    }
    let probe = (0..16)
        .map(|k| Complex64::from_polar(1.0, 0.29 + k as f64))
        .find(|w| zeros.iter().all(|a: &Complex64| (w - a).norm() > 1e-3))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let base = BlaschkeProduct::new(Complex64::new(1.0, 0.0), zeros.clone())
        .map_err(NevpickError::from)?;
    let ratio = f.eval(probe) / base.eval(probe);
    let c = if ratio.norm() > 1e-12 {
        ratio / ratio.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(BlaschkeProduct::new(c, zeros)?)
}

fn check_residuals(b: &BlaschkeProduct, data: &NPData, tol: f64) -> Result<(), NevpickError> {
    let worst = data
        .nodes
        .iter()
        .zip(&data.values)
        .map(|(&l, &w)| (b.eval(l) - w).norm())
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(NevpickError::ResidualTooLarge(worst));
    }
    Ok(())
}

/// Recursive Schur-reduction solve. `budget = Some(rank)` forces the
/// constant bottom after `rank` reductions (extremal route); `None` allows a
/// final Möbius step (general route).
fn chain_solve(
    data: &NPData,
    budget: Option<usize>,
    tols: &Tolerances,
) -> Result<RationalFn, NevpickError> {
    // A boundary value anywhere forces a constant by the maximum principle.
    if let Some(k) = data
        .values
        .iter()
        .position(|w| w.norm() >= 1.0 - loose_band(budget, tols))
    {
        let w = data.values[k];
        let c = w / w.norm();
        return Ok(RationalFn::constant(c));
    }
    if budget == Some(0) {
        // rank exhausted: the data should have been constant; the final
        // residual check rejects if it was not
        let w = data.values[0];
        let c = if w.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            w / w.norm()
        };
        return Ok(RationalFn::constant(c));
    }
    if data.len() == 1 {
        // interior one-point problem: B_{-w} ∘ B_{λ} has degree one
        let w = data.values[0];
        let l = data.nodes[0];
        let bl = blaschke_factor_rational(l);
        return Ok(mobius_shift(&bl, w));
    }
    let reduced = schur_reduce(data, tols)?;
    let g = chain_solve(&reduced, budget.map(|b| b - 1), tols)?;
    // f = B_{-w1} ∘ (g · B_{λ1})
    let inner = g.mul(&blaschke_factor_rational(data.nodes[0]));
    Ok(mobius_shift(&inner, data.values[0]))
}

fn loose_band(budget: Option<usize>, tols: &Tolerances) -> f64 {
    // slightly looser detection band on the extremal route, where values
    // funnel towards the circle as the rank is consumed
    match budget {
        Some(_) => 1e-6,
        None => tols.circle_band,
    }
}

fn blaschke_factor_rational(alpha: Complex64) -> RationalFn {
    RationalFn::new_unreduced(
        ComplexPoly::new(vec![-alpha, Complex64::new(1.0, 0.0)]),
        ComplexPoly::new(vec![Complex64::new(1.0, 0.0), -alpha.conj()]),
    )
    .expect("denominator 1 - ᾱz is nonzero")
}

/// (g + w)/(1 + w̄ g), the Möbius shift moving 0 to w.
fn mobius_shift(g: &RationalFn, w: Complex64) -> RationalFn {
    let num = g.num().add(&g.den().scale(w));
    let den = g.den().add(&g.num().scale(w.conj()));
    RationalFn::new_unreduced(num, den).expect("shift denominator is nonzero")
}
