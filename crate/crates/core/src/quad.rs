//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use num_complex::Complex64;
use num_traits::Zero;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Measure `rel_tol` against `∫|f|` instead of `|∫f|`.
    pub relative_to_magnitude: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_intervals: 4000,
            relative_to_magnitude: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
    /// Estimate of `∫|f|`.
    pub magnitude: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// One Kronrod panel: (K15 value, |K15 - G7|, K15 of |f|).
pub fn gk15(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut m = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(mid - dx), f(mid + dx));
        let s = lo + hi;
        k += s * WGK[j];
        m += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * half, ((k - g) * half).norm(), m * half.abs())
}

/// Integrates `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until the total error meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(mut f: impl FnMut(f64) -> Complex64, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult {
            value: Complex64::zero(),
            error: 0.0,
            intervals: 0,
            converged: true,
            magnitude: 0.0,
        };
    }
    let (v, e, m) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        a,
        b,
        value: v,
        error: e,
        magnitude: m,
    });
    let mut total = v;
    let mut err = e;
    let mut mag = m;
    let mut count = 1;
    loop {
        let reference = if opts.relative_to_magnitude { mag } else { total.norm() };
        let target = opts.abs_tol.max(opts.rel_tol * reference);
        if err <= target {
            break;
        }
        if count >= opts.max_intervals {
            return QuadResult {
                value: total,
                error: err,
                intervals: count,
                converged: false,
                magnitude: mag,
            };
        }
        let p = heap.pop().expect("heap holds every panel");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Panel can no longer be split in floating point.
            heap.push(p);
            return QuadResult {
                value: total,
                error: err,
                intervals: count,
                converged: false,
                magnitude: mag,
            };
        }
        let (v1, e1, m1) = gk15(&mut f, p.a, m);
        let (v2, e2, m2) = gk15(&mut f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        mag += m1 + m2 - p.magnitude;
        heap.push(Piece {
            a: p.a,
            b: m,
            value: v1,
            error: e1,
            magnitude: m1,
        });
        heap.push(Piece {
            a: m,
            b: p.b,
            value: v2,
            error: e2,
            magnitude: m2,
        });
        count += 1;
    }
    // Resum to shed the drift of incremental updates.
    let value = heap.iter().fold(Complex64::zero(), |s, p| s + p.value);
    let error = heap.iter().map(|p| p.error).sum::<f64>().abs();
    let magnitude = heap.iter().map(|p| p.magnitude).sum::<f64>();
    QuadResult {
        value,
        error,
        intervals: count,
        converged: true,
        magnitude,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(
            |x| Complex64::new(x.powi(5) - 3.0 * x * x, x),
            0.0,
            2.0,
            &QuadOptions::default(),
        );
        assert!(r.converged);
        assert!((r.value - Complex64::new(64.0 / 6.0 - 8.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let r = integrate(
            |x| Complex64::from_polar(1.0, 40.0 * x),
            0.0,
            PI,
            &QuadOptions::default(),
        );
        assert!(r.converged);
        assert!(r.value.norm() < 1e-9);
    }

    #[test]
    fn near_singular_integrand() {
        let r = integrate(
            |x| Complex64::new(1.0 / x.sqrt(), 0.0),
            1e-8,
            1.0,
            &QuadOptions::default(),
        );
        assert!(r.converged);
        assert!((r.value.re - (2.0 - 2.0 * 1e-4)).abs() < 1e-8);
    }

    #[test]
    fn magnitude_relative_stopping_handles_cancellation() {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            relative_to_magnitude: true,
            ..QuadOptions::default()
        };
        let r = integrate(|x| Complex64::new(x.sin(), 0.0), -3.0, 3.0, &opts);
        assert!(r.converged);
        assert!(r.value.norm() < 1e-12);
        // The magnitude is a Kronrod estimate of a kinked integrand.
        let exact = 2.0 * (1.0 - 3.0f64.cos());
        assert!((r.magnitude - exact).abs() < 0.05 * exact);
    }

    #[test]
    fn reports_failure_when_capped() {
        let opts = QuadOptions {
            max_intervals: 2,
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            relative_to_magnitude: false,
        };
        let r = integrate(|x| Complex64::new((1.0 / (x + 1e-6)).sin(), 0.0), 0.0, 1.0, &opts);
        assert!(!r.converged);
    }
}
