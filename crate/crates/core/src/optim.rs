//! Derivative-free and least-squares local optimisers for the low-dimensional
//! parameter searches (≤ 9 real unknowns throughout).

use crate::linalg;
use num_complex::Complex64;

/// Smooth chart ℝ² → 𝔻, v ↦ tanh(|v|)·v/|v|, capped strictly inside the
/// disc so Blaschke constructors accept the image.
pub fn plane_to_disc(v: Complex64) -> Complex64 {
    let r = v.norm();
    if r < 1e-12 {
        return v;
    }
    v * (r.tanh().min(1.0 - 1e-10) / r)
}

pub fn disc_to_plane(alpha: Complex64) -> Complex64 {
    let r = alpha.norm().min(0.999_999);
    if r < 1e-12 {
        return alpha;
    }
    alpha * (r.atanh() / alpha.norm())
}

/// Nelder-Mead simplex minimisation. Returns (argmin, min).
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    start: &[f64],
    initial_step: f64,
    max_iter: usize,
    ftol: f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += initial_step;
        let v = f(&p);
        simplex.push((p, v));
    }
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if (simplex[n].1 - simplex[0].1).abs() <= ftol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(p, _)| p[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let combine = |a: f64, b: f64| -> Vec<f64> {
            (0..n).map(|k| a * centroid[k] + b * worst.0[k]).collect()
        };
        let refl = combine(2.0, -1.0);
        let fr = f(&refl);
        if fr < simplex[0].1 {
            let exp = combine(3.0, -2.0);
            let fe = f(&exp);
            simplex[n] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (refl, fr);
        } else {
            let contr = if fr < worst.1 {
                combine(1.5, -0.5)
            } else {
                combine(0.5, 0.5)
            };
            let fc = f(&contr);
            if fc < worst.1.min(fr) {
                simplex[n] = (contr, fc);
            } else {
                // shrink towards the best vertex
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for k in 0..n {
                        entry.0[k] = 0.5 * (entry.0[k] + best[k]);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    simplex.swap_remove(0)
}

pub struct LmOutcome {
    pub params: Vec<f64>,
    pub cost: f64,
}

/// Levenberg-Marquardt on a real residual vector with a forward-difference
/// Jacobian. `cost` is the sum of squared residuals.
pub fn levenberg_marquardt(
    residuals: &mut dyn FnMut(&[f64], &mut Vec<f64>),
    start: &[f64],
    max_iter: usize,
    cost_tol: f64,
) -> LmOutcome {
    let n = start.len();
    let mut x = start.to_vec();
    let mut r = Vec::new();
    residuals(&x, &mut r);
    let m = r.len();
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut mu = 1e-3;
    let mut jac = vec![0.0; m * n];
    let mut r_pert = Vec::new();
    for _ in 0..max_iter {
        if cost <= cost_tol {
            break;
        }
        // forward differences
        for k in 0..n {
            let h = 1e-7 * (1.0 + x[k].abs());
            let saved = x[k];
            x[k] = saved + h;
            residuals(&x, &mut r_pert);
            x[k] = saved;
            for i in 0..m {
                jac[i * n + k] = (r_pert[i] - r[i]) / h;
            }
        }
        // normal equations (JᵀJ + μ diag(JᵀJ)) δ = -Jᵀ r
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for i in 0..m {
            for a in 0..n {
                jtr[a] -= jac[i * n + a] * r[i];
                for b in a..n {
                    jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                jtj[a * n + b] = jtj[b * n + a];
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut damped = jtj.clone();
            for a in 0..n {
                damped[a * n + a] += mu * (jtj[a * n + a].max(1e-12));
            }
            if let Some(delta) = linalg::solve_real(&damped, &jtr, n) {
                let trial: Vec<f64> = x.iter().zip(&delta).map(|(xi, di)| xi + di).collect();
                residuals(&trial, &mut r_pert);
                let trial_cost: f64 = r_pert.iter().map(|v| v * v).sum();
                if trial_cost < cost {
                    x = trial;
                    std::mem::swap(&mut r, &mut r_pert);
                    cost = trial_cost;
                    mu = (mu / 3.0).max(1e-14);
                    improved = true;
                    break;
                }
            }
            mu *= 4.0;
            if mu > 1e12 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    LmOutcome { params: x, cost }
}
