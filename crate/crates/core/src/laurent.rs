//! Truncated Laurent series in the local variable `y = x - center`.
//!
//! A series stores the coefficients of `y^min_degree ..= y^max_degree`.
//! Everything above `max_degree` is unknown, so every operation reports the
//! largest degree its inputs actually determine.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::LaurentError;
use crate::I;

/// Absolute tolerance for deciding that two centers coincide.
pub const CENTER_TOL: f64 = 1e-12;

/// Half-plane through which a semicircular detour passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedLaurentSeries {
    center: Complex64,
    min_degree: i32,
    coeffs: Vec<Complex64>,
}

impl TruncatedLaurentSeries {
    /// Series with coefficients for degrees `min_degree .. min_degree + coeffs.len()`.
    pub fn new(center: Complex64, min_degree: i32, coeffs: Vec<Complex64>) -> Result<Self, LaurentError> {
        if coeffs.is_empty() {
            return Err(LaurentError::InvalidWindow {
                min: min_degree,
                max: min_degree - 1,
            });
        }
        Ok(Self {
            center,
            min_degree,
            coeffs,
        })
    }

    pub fn zero(center: Complex64, min_degree: i32, max_degree: i32) -> Result<Self, LaurentError> {
        if max_degree < min_degree {
            return Err(LaurentError::InvalidWindow {
                min: min_degree,
                max: max_degree,
            });
        }
        let len = (max_degree - min_degree + 1) as usize;
        Ok(Self {
            center,
            min_degree,
            coeffs: vec![Complex64::zero(); len],
        })
    }

    /// `coeff · y^degree`, known exactly up to `max_degree`.
    pub fn monomial(center: Complex64, degree: i32, coeff: Complex64, max_degree: i32) -> Result<Self, LaurentError> {
        let mut s = Self::zero(center, degree, max_degree)?;
        s.coeffs[0] = coeff;
        Ok(s)
    }

    /// Builds a series from a coefficient function on `min..=max`.
    pub fn from_fn(
        center: Complex64,
        min_degree: i32,
        max_degree: i32,
        mut f: impl FnMut(i32) -> Complex64,
    ) -> Result<Self, LaurentError> {
        let mut s = Self::zero(center, min_degree, max_degree)?;
        for (i, c) in s.coeffs.iter_mut().enumerate() {
            *c = f(min_degree + i as i32);
        }
        Ok(s)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `y^k`: zero below the window, `None` above it.
    pub fn coeff(&self, k: i32) -> Option<Complex64> {
        if k < self.min_degree {
            Some(Complex64::zero())
        } else if k > self.max_degree() {
            None
        } else {
            Some(self.coeffs[(k - self.min_degree) as usize])
        }
    }

    /// Like [`coeff`](Self::coeff) but treats unknown degrees as zero.
    pub fn coeff_or_zero(&self, k: i32) -> Complex64 {
        self.coeff(k).unwrap_or_else(Complex64::zero)
    }

    pub fn set_coeff(&mut self, k: i32, value: Complex64) {
        assert!(
            k >= self.min_degree && k <= self.max_degree(),
            "degree {k} outside window"
        );
        self.coeffs[(k - self.min_degree) as usize] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest degree with a nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<i32> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.min_degree + i as i32)
    }

    /// Drops exactly-zero leading coefficients. The zero series keeps a
    /// single zero coefficient at `max_degree`.
    pub fn normalized(&self) -> Self {
        let start = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len() - 1);
        Self {
            center: self.center,
            min_degree: self.min_degree + start as i32,
            coeffs: self.coeffs[start..].to_vec(),
        }
    }

    /// Re-expresses the series on the window `min..=max`. Degrees below the
    /// current window are zero-filled; `max` may not exceed `max_degree`.
    pub fn window(&self, min: i32, max: i32) -> Result<Self, LaurentError> {
        if max > self.max_degree() || max < min {
            return Err(LaurentError::InvalidWindow { min, max });
        }
        Self::from_fn(self.center, min, max, |k| self.coeff_or_zero(k))
    }

    pub fn truncate(&self, max: i32) -> Result<Self, LaurentError> {
        self.window(self.min_degree.min(max), max.min(self.max_degree()))
    }

    /// Negative-degree part, empty (`None`) when the series has no poles.
    pub fn principal_part(&self) -> Option<Self> {
        if self.min_degree >= 0 {
            return None;
        }
        let top = (-1).min(self.max_degree());
        Some(Self {
            center: self.center,
            min_degree: self.min_degree,
            coeffs: self.coeffs[..(top - self.min_degree + 1) as usize].to_vec(),
        })
    }

    /// Nonnegative-degree part on `0..=max_degree`.
    pub fn regular_part(&self) -> Option<Self> {
        if self.max_degree() < 0 {
            return None;
        }
        Self::from_fn(self.center, 0, self.max_degree(), |k| self.coeff_or_zero(k)).ok()
    }

    fn check_center(&self, other: &Self) -> Result<(), LaurentError> {
        if (self.center - other.center).norm() > CENTER_TOL {
            Err(LaurentError::CenterMismatch {
                left: self.center,
                right: other.center,
            })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_center(other)?;
        let min = self.min_degree.min(other.min_degree);
        let max = self.max_degree().min(other.max_degree());
        Self::from_fn(self.center, min, max, |k| {
            self.coeff_or_zero(k) + other.coeff_or_zero(k)
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            center: self.center,
            min_degree: self.min_degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Cauchy product on the window the inputs determine.
    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_center(other)?;
        let min = self.min_degree + other.min_degree;
        let max = (self.max_degree() + other.min_degree).min(other.max_degree() + self.min_degree);
        let mut out = Self::zero(self.center, min, max)?;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let da = self.min_degree + i as i32;
            for (j, b) in other.coeffs.iter().enumerate() {
                let d = da + other.min_degree + j as i32;
                if d > max {
                    break;
                }
                out.coeffs[(d - min) as usize] += a * b;
            }
        }
        Ok(out)
    }

    /// Term-wise derivative in `y`.
    pub fn differentiate(&self) -> Self {
        let min = self.min_degree - 1;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (self.min_degree + i as i32) as f64)
            .collect();
        Self {
            center: self.center,
            min_degree: min,
            coeffs,
        }
    }

    pub fn residue(&self) -> Complex64 {
        self.coeff(-1).unwrap_or_else(Complex64::zero)
    }

    /// Coefficients conjugated: the local series of `conj(f(conj(x)))` for a
    /// series centered on the real axis.
    pub fn conj_coeffs(&self) -> Self {
        Self {
            center: self.center.conj(),
            min_degree: self.min_degree,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Evaluates the truncated sum at offset `y` from the center.
    pub fn eval_offset(&self, y: Complex64) -> Complex64 {
        // Horner in y over the shifted polynomial, then multiply by y^min.
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * y + c;
        }
        acc * y.powi(self.min_degree)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.eval_offset(x - self.center)
    }

    /// ∫ a(y) dy along the semicircle of the given radius from `-radius` to
    /// `+radius` through the chosen half-plane, evaluated term by term.
    pub fn semicircle_integral(&self, radius: f64, orientation: Orientation) -> Complex64 {
        let mut total = Complex64::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.min_degree + i as i32;
            if k == -1 {
                let half_turn = match orientation {
                    Orientation::Upper => -PI,
                    Orientation::Lower => PI,
                };
                total += c * I * half_turn;
            } else if k % 2 == 0 {
                // Odd powers of y integrate to zero between symmetric endpoints.
                total += c * (2.0 * radius.powi(k + 1) / (k + 1) as f64);
            }
        }
        total
    }

    /// Real-line integral of the series over `[-outer, -inner] ∪ [inner, outer]`.
    pub fn symmetric_annulus_integral(&self, inner: f64, outer: f64) -> Complex64 {
        let mut total = Complex64::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.min_degree + i as i32;
            if k % 2 == 0 {
                let e = k + 1;
                total += c * (2.0 * (outer.powi(e) - inner.powi(e)) / e as f64);
            }
        }
        total
    }
}

/// Laurent coefficients of `f` on `min..=max` by the trapezoidal rule on the
/// circle `|x - center| = radius` with `samples` nodes.
///
/// Accurate when `f` is analytic in an annulus around that circle and
/// `samples` exceeds the degree span by a comfortable margin.
pub fn laurent_by_cauchy(
    mut f: impl FnMut(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
    min: i32,
    max: i32,
    samples: usize,
) -> Result<TruncatedLaurentSeries, LaurentError> {
    let mut out = TruncatedLaurentSeries::zero(center, min, max)?;
    let n = samples as f64;
    let values: Vec<(Complex64, Complex64)> = (0..samples)
        .map(|m| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n);
            (w, f(center + w * radius))
        })
        .collect();
    for k in min..=max {
        let mut acc = Complex64::zero();
        for (w, v) in &values {
            acc += v * w.powi(-k);
        }
        out.set_coeff(k, acc / (n * radius.powi(k)));
    }
    Ok(out)
}
