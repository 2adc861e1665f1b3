//! Small dense linear algebra: symmetric eigenvalues and polynomial roots.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

/// Eigenvalues of a real symmetric matrix (row-major, `n × n`) by cyclic
/// Jacobi rotations, sorted ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix must be n × n");
    let mut m = a.to_vec();
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix through its real `2n × 2n` embedding
/// `[[Re, -Im], [Im, Re]]`; each eigenvalue appears once.
pub fn hermitian_eigenvalues(h: &[Complex64], n: usize) -> Vec<f64> {
    assert_eq!(h.len(), n * n, "matrix must be n × n");
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize to absorb rounding asymmetry.
            let z = (h[i * n + j] + h[j * n + i].conj()) * 0.5;
            a[i * m + j] = z.re;
            a[i * m + j + n] = -z.im;
            a[(i + n) * m + j] = z.im;
            a[(i + n) * m + j + n] = z.re;
        }
    }
    let ev = symmetric_eigenvalues(&a, m);
    // Eigenvalues come in equal pairs; keep every other one.
    ev.into_iter().step_by(2).collect()
}

/// Counts of (negative, zero, positive) eigenvalues, with `|λ| ≤ threshold`
/// counted as zero.
pub fn inertia(eigenvalues: &[f64], threshold: f64) -> (usize, usize, usize) {
    let mut out = (0, 0, 0);
    for &l in eigenvalues {
        if l < -threshold {
            out.0 += 1;
        } else if l > threshold {
            out.2 += 1;
        } else {
            out.1 += 1;
        }
    }
    out
}

/// Solves `A x = b` (row-major `n × n`) by Gaussian elimination with partial
/// pivoting. `None` when a pivot vanishes.
pub fn solve_complex(a: &[Complex64], b: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    assert_eq!(a.len(), n * n, "matrix must be n × n");
    assert_eq!(b.len(), n, "right-hand side must have length n");
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i * n + col].norm().total_cmp(&m[j * n + col].norm()))?;
        if m[piv * n + col].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            x.swap(piv, col);
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / d;
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                let v = m[col * n + k];
                m[row * n + k] -= f * v;
            }
            let v = x[col];
            x[row] -= f * v;
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= m[col * n + k] * x[k];
        }
        x[col] = s / m[col * n + col];
    }
    Some(x)
}

/// Roots of `Σ c_k z^k` (ascending coefficients) by Durand–Kerner iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1].is_zero() {
        deg -= 1;
    }
    if deg <= 1 {
        return Vec::new();
    }
    let lead = coeffs[deg - 1];
    let mon: Vec<Complex64> = coeffs[..deg].iter().map(|c| c / lead).collect();
    let n = deg - 1;
    let bound = 1.0 + mon[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * bound, 0.4 + core::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    let eval = |x: Complex64| mon.iter().rev().fold(Complex64::zero(), |acc, c| acc * x + c);
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    z
}
