//! Small dense numerics: Hermitian eigenvalues (cyclic Jacobi, plus a closed
//! form for the hot 3×3 path) and tiny LU solves. Every matrix in this crate
//! has order ≤ 8, so simplicity and robustness win over BLAS-style code.

use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix given as a flat row-major `n*n` slice,
/// sorted ascending. Uses cyclic Jacobi with phase rotations.
pub fn hermitian_eigenvalues(a: &[Complex64], n: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a[0].re];
    }
    let mut m = a.to_vec();
    let scale: f64 = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[p * n + q].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[p * n + q];
                let gn = g.norm();
                if gn <= tol * 1e-2 {
                    continue;
                }
                let phi = g / gn; // e^{i arg g}
                let alpha = m[p * n + p].re;
                let beta = m[q * n + q].re;
                let tau = (beta - alpha) / (2.0 * gn);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns: col_p <- c col_p - s conj(phi) col_q, col_q <- s phi col_p + c col_q
                for i in 0..n {
                    let aip = m[i * n + p];
                    let aiq = m[i * n + q];
                    m[i * n + p] = c * aip - s * phi.conj() * aiq;
                    m[i * n + q] = s * phi * aip + c * aiq;
                }
                // Rows: row_p <- c row_p - s phi row_q, row_q <- s conj(phi) row_p + c row_q
                for j in 0..n {
                    let apj = m[p * n + j];
                    let aqj = m[q * n + j];
                    m[p * n + j] = c * apj - s * phi * aqj;
                    m[q * n + j] = s * phi.conj() * apj + c * aqj;
                }
                // restore exact Hermitian structure on the touched entries
                m[p * n + q] = Complex64::new(0.0, 0.0);
                m[q * n + p] = Complex64::new(0.0, 0.0);
                m[p * n + p] = Complex64::new(m[p * n + p].re, 0.0);
                m[q * n + q] = Complex64::new(m[q * n + q].re, 0.0);
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Minimum eigenvalue of a 3×3 Hermitian matrix at full absolute accuracy:
/// the closed form is replaced by a Jacobi pass near zero, where the
/// trigonometric formula loses up to √eps·‖A‖ on clustered eigenvalues.
pub fn eig3_min_hybrid(a: &[Complex64]) -> f64 {
    let v = eig3(a)[0];
    if v.abs() <= 1e-5 {
        hermitian_eigenvalues(a, 3)[0]
    } else {
        v
    }
}

/// Closed-form eigenvalues of a 3×3 Hermitian matrix, ascending.
/// Absolute accuracy degrades to ~√eps·‖A‖ near multiple eigenvalues; use
/// [`eig3_min_hybrid`] or the Jacobi path when decisions hinge on signs.
pub fn eig3(a: &[Complex64]) -> [f64; 3] {
    let d0 = a[0].re;
    let d1 = a[4].re;
    let d2 = a[8].re;
    let p1 = a[1].norm_sqr() + a[2].norm_sqr() + a[5].norm_sqr();
    let q = (d0 + d1 + d2) / 3.0;
    let p2 = (d0 - q).powi(2) + (d1 - q).powi(2) + (d2 - q).powi(2) + 2.0 * p1;
    if p2 <= 1e-30 * (1.0 + q * q) {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    let inv = 1.0 / p;
    // B = (A - qI)/p, r = det(B)/2
    let b = |z: Complex64| z * inv;
    let b00 = (d0 - q) * inv;
    let b11 = (d1 - q) * inv;
    let b22 = (d2 - q) * inv;
    let b01 = b(a[1]);
    let b02 = b(a[2]);
    let b12 = b(a[5]);
    let det = b00 * (b11 * b22 - b12.norm_sqr())
        - (b01 * (b01.conj() * b22 - b12 * b02.conj())).re
        + (b02 * (b01.conj() * b12.conj() - b11 * b02.conj())).re;
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * (phi).cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    let mut e = [e1, e2, e3];
    e.sort_by(|x, y| x.partial_cmp(y).unwrap());
    e
}

/// Solves the complex linear system `A x = b` in place (LU, partial pivoting).
/// Returns `None` when the pivot collapses.
pub fn solve_complex(a: &[Complex64], b: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let (piv, pmag) = (k..n)
            .map(|i| (i, m[i * n + k].norm()))
            .max_by(|u, v| u.1.partial_cmp(&v.1).unwrap())?;
        if pmag < 1e-300 {
            return None;
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        let inv_p = Complex64::new(1.0, 0.0) / m[k * n + k];
        for i in (k + 1)..n {
            let f = m[i * n + k] * inv_p;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k..n {
                let t = m[k * n + j];
                m[i * n + j] -= f * t;
            }
            let t = x[k];
            x[i] -= f * t;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s -= m[k * n + j] * x[j];
        }
        x[k] = s / m[k * n + k];
    }
    Some(x)
}

/// Solves the real system `A x = b` (LU, partial pivoting) for the small
/// normal equations of the least-squares refinements.
pub fn solve_real(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let (piv, pmag) = (k..n)
            .map(|i| (i, m[i * n + k].abs()))
            .max_by(|u, v| u.1.partial_cmp(&v.1).unwrap())?;
        if pmag < 1e-300 {
            return None;
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        for i in (k + 1)..n {
            let f = m[i * n + k] / m[k * n + k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                m[i * n + j] -= f * m[k * n + j];
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s -= m[k * n + j] * x[j];
        }
        x[k] = s / m[k * n + k];
    }
    Some(x)
}
