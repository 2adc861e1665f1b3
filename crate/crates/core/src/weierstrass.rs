//! Weierstrass ℘, ℘', ζ and σ for a lattice with real half-period `ω₁`.
//!
//! Values come from theta-function and Lambert series in the nome
//! `q = e^{iπτ}`, `τ = ω₂/ω₁`, after reducing the argument to the centered
//! period parallelogram.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::WeierstrassError;
use crate::I;

/// Relative tolerance used to classify a lattice as rectangular or rhombic.
pub const CLASS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeClass {
    /// `ω₂ ∈ iℝ₊`.
    Rectangular,
    /// `Re ω₂ = ω₁/2`.
    Rhombic,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeierstrassValues {
    pub wp: Complex64,
    pub wp_prime: Complex64,
    pub zeta: Complex64,
    pub sigma: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassData {
    omega1: f64,
    omega2: Complex64,
    g2: Complex64,
    g3: Complex64,
    eta1: Complex64,
    eta2: Complex64,
    class: LatticeClass,
    tau: Complex64,
    q: Complex64,
    k: f64,
    theta1_prime: Complex64,
}

/// Sums `term(n)` for `n = start, start+1, ...` until terms drop below
/// `1e-18` of the running total (at least four terms).
fn converge(start: u32, mut term: impl FnMut(u32) -> Complex64) -> Complex64 {
    let mut sum = Complex64::zero();
    let mut n = start;
    loop {
        let t = term(n);
        sum += t;
        if n >= start + 3 && t.norm() <= 1e-18 * sum.norm().max(1e-300) {
            return sum;
        }
        if n > start + 100_000 {
            return sum;
        }
        n += 1;
    }
}

impl WeierstrassData {
    pub fn new(omega1: f64, omega2: Complex64) -> Result<Self, WeierstrassError> {
        if !(omega1.is_finite() && omega1 > 0.0) {
            return Err(WeierstrassError::InvalidLattice("omega1 must be real and positive"));
        }
        if !(omega2.re.is_finite() && omega2.im.is_finite()) {
            return Err(WeierstrassError::InvalidLattice("omega2 must be finite"));
        }
        let tau = omega2 / omega1;
        if tau.im <= 0.0 {
            return Err(WeierstrassError::InvalidLattice("Im(omega2/omega1) must be positive"));
        }
        if tau.im < 0.05 {
            return Err(WeierstrassError::InvalidLattice(
                "Im(omega2/omega1) below 0.05 is too degenerate",
            ));
        }
        let class = if omega2.re.abs() <= CLASS_TOL * omega1 {
            LatticeClass::Rectangular
        } else if (omega2.re - 0.5 * omega1).abs() <= CLASS_TOL * omega1 {
            LatticeClass::Rhombic
        } else {
            LatticeClass::Generic
        };
        let q = (I * PI * tau).exp();
        let q2 = q * q;
        let k = PI / (2.0 * omega1);
        let nome_pow = |e: f64| (I * PI * tau * e).exp();

        let theta1_prime = converge(0, |n| {
            let s = if n % 2 == 0 { 2.0 } else { -2.0 };
            nome_pow((n as f64 + 0.5).powi(2)) * (s * (2 * n + 1) as f64)
        });
        let theta1_third = converge(0, |n| {
            let s = if n % 2 == 0 { -2.0 } else { 2.0 };
            nome_pow((n as f64 + 0.5).powi(2)) * (s * ((2 * n + 1) as f64).powi(3))
        });
        let eta1 = -(PI * PI) * theta1_third / (12.0 * omega1 * theta1_prime);

        let lambert = |power: i32| {
            converge(1, |n| {
                let qn = q2.powu(n);
                qn / (Complex64::new(1.0, 0.0) - qn) * (n as f64).powi(power)
            })
        };
        let e4 = 1.0 + 240.0 * lambert(3);
        let e6 = 1.0 - 504.0 * lambert(5);
        let g2 = (PI / omega1).powi(4) / 12.0 * e4;
        let g3 = (PI / omega1).powi(6) / 216.0 * e6;

        let mut data = Self {
            omega1,
            omega2,
            g2,
            g3,
            eta1,
            eta2: Complex64::zero(),
            class,
            tau,
            q,
            k,
            theta1_prime,
        };
        data.eta2 = data.zeta_unreduced(omega2);
        Ok(data)
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    /// `η₁ = ζ(ω₁)`.
    pub fn eta1(&self) -> Complex64 {
        self.eta1
    }

    /// `η₂ = ζ(ω₂)`.
    pub fn eta2(&self) -> Complex64 {
        self.eta2
    }

    pub fn lattice_class(&self) -> LatticeClass {
        self.class
    }

    /// Real period `T = 2ω₁`.
    pub fn period(&self) -> f64 {
        2.0 * self.omega1
    }

    /// Lattice coordinates `(s, t)` with `z = 2sω₁ + 2tω₂`.
    pub fn lattice_coords(&self, z: Complex64) -> (f64, f64) {
        let t = z.im / (2.0 * self.omega2.im);
        let s = (z.re - 2.0 * t * self.omega2.re) / (2.0 * self.omega1);
        (s, t)
    }

    pub fn from_lattice_coords(&self, s: f64, t: f64) -> Complex64 {
        2.0 * s * self.omega1 + 2.0 * t * self.omega2
    }

    /// `z = z₀ + 2mω₁ + 2nω₂` with `z₀` in the centered parallelogram.
    pub fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let (s, t) = self.lattice_coords(z);
        let (m, n) = (s.round(), t.round());
        let z0 = z - 2.0 * m * self.omega1 - 2.0 * n * self.omega2;
        (z0, m as i64, n as i64)
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn lattice_distance(&self, z: Complex64) -> f64 {
        let (z0, _, _) = self.reduce(z);
        let mut best = z0.norm();
        for dm in -1..=1 {
            for dn in -1..=1 {
                let w = z0 - 2.0 * dm as f64 * self.omega1 - 2.0 * dn as f64 * self.omega2;
                best = best.min(w.norm());
            }
        }
        best
    }

    fn reduce_checked(&self, z: Complex64) -> Result<(Complex64, i64, i64), WeierstrassError> {
        let r = self.reduce(z);
        if r.0.norm() <= 1e-14 * self.omega1 {
            Err(WeierstrassError::LatticePoint { z })
        } else {
            Ok(r)
        }
    }

    fn lambert_trig(&self, v: Complex64, kind: u8) -> Complex64 {
        let q2 = self.q * self.q;
        converge(1, |n| {
            let qn = q2.powu(n);
            let c = qn / (Complex64::new(1.0, 0.0) - qn);
            let nv = v * (2 * n) as f64;
            let nf = n as f64;
            match kind {
                0 => c * nv.sin() * 4.0,
                1 => c * nv.cos() * (8.0 * nf),
                _ => c * nv.sin() * (-16.0 * nf * nf),
            }
        })
    }

    fn zeta_unreduced(&self, z: Complex64) -> Complex64 {
        let v = z * self.k;
        self.eta1 * z / self.omega1 + self.k * (v.cos() / v.sin() + self.lambert_trig(v, 0))
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64, WeierstrassError> {
        let (z0, _, _) = self.reduce_checked(z)?;
        let v = z0 * self.k;
        let s = v.sin();
        Ok(-self.eta1 / self.omega1 + self.k * self.k * (Complex64::new(1.0, 0.0) / (s * s) - self.lambert_trig(v, 1)))
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64, WeierstrassError> {
        let (z0, _, _) = self.reduce_checked(z)?;
        let v = z0 * self.k;
        let s = v.sin();
        Ok(self.k.powi(3) * (-2.0 * v.cos() / (s * s * s) - self.lambert_trig(v, 2)))
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64, WeierstrassError> {
        let (z0, m, n) = self.reduce_checked(z)?;
        Ok(self.zeta_unreduced(z0) + 2.0 * m as f64 * self.eta1 + 2.0 * n as f64 * self.eta2)
    }

    /// `σ(z) = (1/k)·exp(η₁z²/(2ω₁))·θ₁(kz)/θ₁'(0)`, summed without reduction.
    pub fn sigma(&self, z: Complex64) -> Complex64 {
        let v = z * self.k;
        let tau = self.tau;
        let theta = converge(0, |n| {
            let s = if n % 2 == 0 { 2.0 } else { -2.0 };
            (I * PI * tau * (n as f64 + 0.5).powi(2)).exp() * (v * (2 * n + 1) as f64).sin() * s
        });
        (self.eta1 * z * z / (2.0 * self.omega1)).exp() * theta / (self.theta1_prime * self.k)
    }

    pub fn evaluate(&self, z: Complex64) -> Result<WeierstrassValues, WeierstrassError> {
        Ok(WeierstrassValues {
            wp: self.wp(z)?,
            wp_prime: self.wp_prime(z)?,
            zeta: self.zeta(z)?,
            sigma: self.sigma(z),
        })
    }

    /// Coefficients `c₁, ..., c_count` of `℘(z) = z⁻² + Σ c_k z^{2k}`.
    pub fn wp_laurent_coeffs(&self, count: usize) -> Vec<Complex64> {
        let mut c: Vec<Complex64> = Vec::with_capacity(count);
        for k in 1..=count {
            let v = match k {
                1 => self.g2 / 20.0,
                2 => self.g3 / 28.0,
                _ => {
                    let s = (1..=k - 2).fold(Complex64::zero(), |acc, m| acc + c[m - 1] * c[k - m - 2]);
                    s * (3.0 / (((2 * k + 3) * (k - 2)) as f64))
                }
            };
            c.push(v);
        }
        c
    }
}

/// `(℘, ℘', ζ, σ)` at `z`.
pub fn weierstrass(z: Complex64, data: &WeierstrassData) -> Result<WeierstrassValues, WeierstrassError> {
    data.evaluate(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemniscatic_invariants() {
        let w = WeierstrassData::new(1.0, I).unwrap();
        assert_eq!(w.lattice_class(), LatticeClass::Rectangular);
        assert!(w.g3().norm() < 1e-12);
        assert!((w.eta1() - Complex64::new(PI / 4.0, 0.0)).norm() < 1e-13);
        // g₂ = Γ(1/4)⁸ / (256 π²) for ω₁ = 1, ω₂ = i.
        let gamma_quarter: f64 = 3.625_609_908_221_908;
        assert!((w.g2().re - gamma_quarter.powi(8) / (256.0 * PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn classes() {
        let w = WeierstrassData::new(1.0, Complex64::new(0.5, 0.6)).unwrap();
        assert_eq!(w.lattice_class(), LatticeClass::Rhombic);
        let w = WeierstrassData::new(1.0, Complex64::new(0.3, 0.9)).unwrap();
        assert_eq!(w.lattice_class(), LatticeClass::Generic);
    }

    #[test]
    fn rejects_bad_lattices() {
        assert!(WeierstrassData::new(-1.0, I).is_err());
        assert!(WeierstrassData::new(1.0, -I).is_err());
    }

    #[test]
    fn lattice_points_are_rejected() {
        let w = WeierstrassData::new(1.0, I).unwrap();
        assert!(matches!(
            w.wp(Complex64::new(2.0, 2.0)),
            Err(WeierstrassError::LatticePoint { .. })
        ));
        assert!(w.zeta(Complex64::zero()).is_err());
    }

    #[test]
    fn legendre_relation() {
        for om2 in [I, Complex64::new(0.5, 0.6)] {
            let w = WeierstrassData::new(1.0, om2).unwrap();
            let lhs = w.eta1() * om2 - w.eta2() * 1.0;
            assert!((lhs - I * (PI / 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn laurent_coefficients_from_invariants() {
        let w = WeierstrassData::new(1.0, Complex64::new(0.5, 0.6)).unwrap();
        let c = w.wp_laurent_coeffs(3);
        assert!((c[0] - w.g2() / 20.0).norm() < 1e-15);
        assert!((c[1] - w.g3() / 28.0).norm() < 1e-15);
        assert!((c[2] - w.g2() * w.g2() / 1200.0).norm() < 1e-13 * c[2].norm());
    }
}
