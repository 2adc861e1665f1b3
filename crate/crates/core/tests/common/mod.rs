//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use smero_core::TruncatedLaurentSeries;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

type State = [Complex64; 2];

fn rk4_step(f: &impl Fn(f64, State) -> State, t: f64, y: State, h: f64) -> State {
    let add = |a: State, b: State, s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, add(y, k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, add(y, k2, 0.5 * h));
    let k4 = f(t + h, add(y, k3, h));
    [
        y[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * (h / 6.0),
        y[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * (h / 6.0),
    ]
}

/// Fundamental matrix of `d/dt (ψ, ψ') = (ψ', (u - α)ψ)·(dx/dt)` along a
/// path, columns started from the identity.
fn transport(rhs: impl Fn(f64, State) -> State, t0: f64, t1: f64, steps: usize) -> [[Complex64; 2]; 2] {
    let h = (t1 - t0) / steps as f64;
    let mut cols = [[c(1.0), c(0.0)], [c(0.0), c(1.0)]];
    for col in cols.iter_mut() {
        let mut y = *col;
        for k in 0..steps {
            y = rk4_step(&rhs, t0 + k as f64 * h, y, h);
        }
        *col = y;
    }
    // Row-major: m[i][j] = component i of column j.
    [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]
}

/// `max |M - I|` for the monodromy of `-ψ'' + uψ = αψ` around the circle
/// `|y| = radius`, with `u(y) = Σ coeffs[i]·y^{min_degree + i}`.
pub fn monodromy_defect(min_degree: i32, coeffs: &[Complex64], alpha: Complex64, radius: f64) -> f64 {
    let u = |y: Complex64| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * y.powi(min_degree + i as i32))
            .sum::<Complex64>()
    };
    let rhs = |theta: f64, s: State| {
        let y = Complex64::from_polar(radius, theta);
        let dy = I * y;
        [s[1] * dy, (u(y) - alpha) * s[0] * dy]
    };
    let m = transport(rhs, 0.0, std::f64::consts::TAU, 6000);
    let scale = m.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = [
        (m[0][0] - 1.0).norm(),
        m[0][1].norm(),
        m[1][0].norm(),
        (m[1][1] - 1.0).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    defect / scale
}

/// Trace of the period map of `-ψ'' + uψ = αψ` on `[0, period]`.
pub fn hill_discriminant(u: impl Fn(f64) -> Complex64, alpha: Complex64, period: f64, steps: usize) -> Complex64 {
    let rhs = |x: f64, s: State| [s[1], (u(x) - alpha) * s[0]];
    let m = transport(rhs, 0.0, period, steps);
    m[0][0] + m[1][1]
}

/// Product of two series by the schoolbook double loop.
pub fn brute_force_product(a: &TruncatedLaurentSeries, b: &TruncatedLaurentSeries) -> Vec<(i32, Complex64)> {
    let hi = (a.min_degree() + b.max_degree()).min(a.max_degree() + b.min_degree());
    let lo = a.min_degree() + b.min_degree();
    (lo..=hi)
        .map(|k| {
            let mut s = c(0.0);
            for i in a.min_degree()..=a.max_degree() {
                let j = k - i;
                if j >= b.min_degree() && j <= b.max_degree() {
                    s += a.coeff_or_zero(i) * b.coeff_or_zero(j);
                }
            }
            (k, s)
        })
        .collect()
}

/// Laurent coefficients by Cauchy integrals on two radii; returns both.
pub fn cauchy_two_radii(
    f: impl Fn(Complex64) -> Complex64,
    k: i32,
    radii: (f64, f64),
    samples: usize,
) -> (Complex64, Complex64) {
    let coeff = |r: f64| {
        let mut s = c(0.0);
        for m in 0..samples {
            let w = Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 / samples as f64);
            s += f(w * r) * w.powi(-k);
        }
        s / (samples as f64 * r.powi(k))
    };
    (coeff(radii.0), coeff(radii.1))
}

/// Eighth-order central second derivative.
pub fn second_derivative(f: impl Fn(Complex64) -> Complex64, x: Complex64, h: f64) -> Complex64 {
    const W: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let mut s = f(x) * W[0];
    for (k, w) in W.iter().enumerate().skip(1) {
        let d = h * k as f64;
        s += (f(x + d) + f(x - d)) * *w;
    }
    s / (h * h)
}

/// `℘` Laurent coefficients from the differential equation
/// `℘'' = 6℘² - g₂/2`, solved term by term.
pub fn wp_coefficients_from_ode(g2: Complex64, g3: Complex64, count: usize) -> Vec<Complex64> {
    // ℘ = z⁻² + Σ_{k≥1} a_k z^{2k}; a₁ = g₂/20, a₂ = g₃/28, and for k ≥ 3
    // (2k)(2k-1) a_k = 6(2 a_k + Σ_{m=1}^{k-2} a_m a_{k-1-m}).
    let mut a = Vec::with_capacity(count);
    for k in 1..=count {
        let v = match k {
            1 => g2 / 20.0,
            2 => g3 / 28.0,
            _ => {
                let conv: Complex64 = (1..=k - 2).map(|m| a[m - 1] * a[k - 2 - m]).sum();
                conv * 6.0 / ((2 * k * (2 * k - 1)) as f64 - 12.0)
            }
        };
        a.push(v);
    }
    a
}

/// Singular 2-soliton `τ` for `k = (1, 2)`, zero phases, signs `(-1, +1)`.
pub fn two_soliton_tau(x: f64, t: f64) -> [f64; 4] {
    // τ = 1 - e^{θ₁} + e^{θ₂} - e^{θ₁+θ₂}/9, θ₁ = 2x - 8t, θ₂ = 4x - 64t.
    let terms = [
        (1.0, 0.0, 0.0),
        (-1.0, 2.0, -8.0),
        (1.0, 4.0, -64.0),
        (-1.0 / 9.0, 6.0, -72.0),
    ];
    let mut d = [0.0; 4];
    for (a, k, w) in terms {
        let e = a * (k * x + w * t).exp();
        for (j, dj) in d.iter_mut().enumerate() {
            *dj += e * k.powi(j as i32);
        }
    }
    d
}

/// Real zeros of `x ↦ τ(x, t)` on a window by a dense sign scan.
pub fn tau_real_zeros(t: f64, window: (f64, f64), samples: usize) -> Vec<f64> {
    let h = (window.1 - window.0) / samples as f64;
    let mut out = Vec::new();
    let mut prev = two_soliton_tau(window.0, t)[0];
    for i in 1..=samples {
        let x = window.0 + i as f64 * h;
        let v = two_soliton_tau(x, t)[0];
        if prev.signum() != v.signum() {
            let (mut lo, mut hi) = (x - h, x);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if two_soliton_tau(mid, t)[0].signum() == two_soliton_tau(lo, t)[0].signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev = v;
    }
    out
}

/// Time and place where the two real zeros of the singular 2-soliton `τ`
/// merge into a triple zero.
pub fn two_soliton_triple_zero() -> (f64, f64) {
    let l3 = 3.0f64.ln();
    (l3 / 48.0, 7.0 * l3 / 12.0)
}
