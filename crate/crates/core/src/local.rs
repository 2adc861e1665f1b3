//! Frobenius analysis of `-ψ'' + uψ = αψ` at a double pole of `u`.
//!
//! At a pole with `u = r(r+1)/y² + ...` the indicial exponents are `-r` and
//! `r+1`. The `y^{-r}` branch hits a resonance at degree `r+1`; the
//! coefficient that must vanish there decides whether a logarithm appears.
//! All solutions are meromorphic for every `α` exactly when the `y^{-1}`
//! coefficient and the odd coefficients of degrees `1, 3, ..., 2r-1` vanish.

use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dd::ComplexDD;
use crate::error::LocalError;
use crate::laurent::TruncatedLaurentSeries;

/// Tolerance for `|c_{-2} - r(r+1)|` and for coefficients required to vanish.
pub const INTEGER_TOL: f64 = 1e-9;

/// Relative tolerance for the resonance coefficient.
pub const OBSTRUCTION_TOL: f64 = 1e-9;

/// Seed of the default spectral-parameter samples.
pub const ALPHA_SEED: u64 = 0x5eed_a1fa;

/// Laurent data of the potential at one pole.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperatorData {
    center: Complex64,
    u: TruncatedLaurentSeries,
    claimed_r: Option<u32>,
}

impl LocalOperatorData {
    pub fn new(u: TruncatedLaurentSeries, claimed_r: Option<u32>) -> Result<Self, LocalError> {
        let u = if u.is_zero() { u } else { u.normalized() };
        if u.min_degree() < -2 && !u.is_zero() {
            return Err(LocalError::PoleTooStrong { order: -u.min_degree() });
        }
        let u = if u.min_degree() > -2 {
            u.window(-2, u.max_degree()).expect("window extends downward")
        } else {
            u
        };
        if let Some(r) = claimed_r {
            let found = u.coeff_or_zero(-2);
            if (found - Complex64::new((r * (r + 1)) as f64, 0.0)).norm() > INTEGER_TOL {
                return Err(LocalError::ClaimedRMismatch { r, found });
            }
        }
        Ok(Self {
            center: u.center(),
            u,
            claimed_r,
        })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn u_coeffs(&self) -> &TruncatedLaurentSeries {
        &self.u
    }

    pub fn claimed_r(&self) -> Option<u32> {
        self.claimed_r
    }

    /// `r` with `c_{-2} = r(r+1)`, if the indicial exponents are integers.
    pub fn detected_r(&self) -> Option<u32> {
        detect_r(self.u.coeff_or_zero(-2))
    }
}

/// Roots of `ρ(ρ-1) = c`, larger real part first.
pub fn indicial_exponents(c_minus2: Complex64) -> (Complex64, Complex64) {
    let disc = (Complex64::new(1.0, 0.0) + c_minus2 * 4.0).sqrt();
    let a = (Complex64::new(1.0, 0.0) + disc) * 0.5;
    let b = (Complex64::new(1.0, 0.0) - disc) * 0.5;
    if a.re >= b.re {
        (a, b)
    } else {
        (b, a)
    }
}

/// `r ≥ 0` with `|c - r(r+1)| < INTEGER_TOL`, from the larger indicial root.
pub fn detect_r(c_minus2: Complex64) -> Option<u32> {
    let (top, _) = indicial_exponents(c_minus2);
    let r = top.re.round() - 1.0;
    if r < 0.0 {
        return None;
    }
    let target = r * (r + 1.0);
    if (c_minus2 - Complex64::new(target, 0.0)).norm() < INTEGER_TOL {
        Some(r as u32)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Double,
    /// About 106-bit mantissa; slower, for recursions past order ~40.
    DoubleDouble,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrobeniusOptions {
    pub precision: Precision,
    pub obstruction_tol: f64,
}

impl Default for FrobeniusOptions {
    fn default() -> Self {
        Self {
            precision: Precision::Double,
            obstruction_tol: OBSTRUCTION_TOL,
        }
    }
}

/// Two local solutions with leading terms `y^{-r}` and `y^{r+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusBasis {
    pub r: u32,
    pub singular: TruncatedLaurentSeries,
    pub regular: TruncatedLaurentSeries,
    /// The resonance coefficient that was found to vanish.
    pub resonance_value: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogObstruction {
    /// Degree of the resonance, `r + 1`.
    pub degree: i32,
    pub alpha: Complex64,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FrobeniusOutcome {
    Basis(FrobeniusBasis),
    Obstruction(LogObstruction),
}

trait Field: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> {
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
}

impl Field for Complex64 {
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(self) -> Complex64 {
        self
    }
}

impl Field for ComplexDD {
    fn from_c64(z: Complex64) -> Self {
        z.into()
    }
    fn to_c64(self) -> Complex64 {
        ComplexDD::to_c64(self)
    }
}

struct Branch {
    coeffs: Vec<Complex64>,
    resonance: Option<(Complex64, f64)>,
}

/// Coefficients `a_0..=a_last` of `Σ a_n y^{n+ρ}` with `a_0 = 1`, where
/// `v[k + 1]` holds the degree-`k` coefficient of `u - α` (`k ≥ -1`).
/// `indicial(n)` is `P(n + ρ)`; at `resonance` the free coefficient is set to 0.
fn recurse<T: Field>(
    v: &[Complex64],
    last: usize,
    indicial: impl Fn(usize) -> f64,
    resonance: Option<usize>,
) -> Branch {
    let v: Vec<T> = v.iter().map(|&z| T::from_c64(z)).collect();
    let zero = T::from_c64(Complex64::zero());
    let mut a: Vec<T> = Vec::with_capacity(last + 1);
    a.push(T::from_c64(Complex64::new(1.0, 0.0)));
    let mut res = None;
    for n in 1..=last {
        // RHS_n = Σ_{m<n} v_{n-2-m} a_m, with v_{n-2-m} stored at v[n-1-m].
        let mut rhs = zero;
        let mut scale = 0.0;
        for (m, am) in a.iter().enumerate() {
            let idx = n - 1 - m;
            if idx < v.len() {
                let term = v[idx] * *am;
                scale += term.to_c64().norm();
                rhs = rhs + term;
            }
        }
        if Some(n) == resonance {
            res = Some((rhs.to_c64(), scale));
            a.push(zero);
        } else {
            let p = T::from_c64(Complex64::new(indicial(n), 0.0));
            a.push(rhs / p);
        }
    }
    Branch {
        coeffs: a.into_iter().map(Field::to_c64).collect(),
        resonance: res,
    }
}

/// Frobenius basis of `-ψ'' + uψ = αψ` up to degree `order`, or the log
/// obstruction found at the resonance.
pub fn frobenius_basis(op: &LocalOperatorData, alpha: Complex64, order: i32) -> Result<FrobeniusOutcome, LocalError> {
    frobenius_basis_with(op, alpha, order, &FrobeniusOptions::default())
}

pub fn frobenius_basis_with(
    op: &LocalOperatorData,
    alpha: Complex64,
    order: i32,
    opts: &FrobeniusOptions,
) -> Result<FrobeniusOutcome, LocalError> {
    let u = op.u_coeffs();
    let c_minus2 = u.coeff_or_zero(-2);
    let r = detect_r(c_minus2).ok_or(LocalError::NonIntegerExponents { c_minus2 })?;
    let c_minus1 = u.coeff_or_zero(-1);
    if c_minus1.norm() > INTEGER_TOL {
        return Err(LocalError::FirstOrderPolePresent { value: c_minus1 });
    }
    let ri = r as i32;
    if order < 2 * ri + 4 {
        return Err(LocalError::TruncationTooShort {
            needed: 2 * ri + 4,
            available: order,
        });
    }
    let needed = (2 * ri - 1).max(0);
    if u.max_degree() < needed {
        return Err(LocalError::TruncationTooShort {
            needed,
            available: u.max_degree(),
        });
    }

    // v_k = u_k - α δ_{k0} for k = -1..=u.max_degree
    let v: Vec<Complex64> = (-1..=u.max_degree())
        .map(|k| {
            let uk = u.coeff_or_zero(k);
            if k == 0 {
                uk - alpha
            } else {
                uk
            }
        })
        .collect();

    let rf = r as f64;
    let sing_max = order.min(u.max_degree() + 2 - ri);
    let reg_max = order.min(u.max_degree() + ri + 3);
    let sing_last = (sing_max + ri) as usize;
    let reg_last = (reg_max - ri - 1) as usize;
    let resonance = 2 * r as usize + 1;

    let sing_p = |n: usize| {
        let n = n as f64;
        (n - 2.0 * rf - 1.0) * n
    };
    let reg_p = |n: usize| {
        let n = n as f64;
        n * (n + 2.0 * rf + 1.0)
    };
    let (sing, reg) = match opts.precision {
        Precision::Double => (
            recurse::<Complex64>(&v, sing_last, sing_p, Some(resonance)),
            recurse::<Complex64>(&v, reg_last, reg_p, None),
        ),
        Precision::DoubleDouble => (
            recurse::<ComplexDD>(&v, sing_last, sing_p, Some(resonance)),
            recurse::<ComplexDD>(&v, reg_last, reg_p, None),
        ),
    };

    let (value, scale) = sing.resonance.unwrap_or((Complex64::zero(), 0.0));
    if value.norm() > opts.obstruction_tol * (1.0 + scale) {
        return Ok(FrobeniusOutcome::Obstruction(LogObstruction {
            degree: ri + 1,
            alpha,
            value,
        }));
    }

    let center = op.center();
    let singular = TruncatedLaurentSeries::new(center, -ri, sing.coeffs).expect("nonempty coefficients");
    let regular = TruncatedLaurentSeries::new(center, ri + 1, reg.coeffs).expect("nonempty coefficients");
    Ok(FrobeniusOutcome::Basis(FrobeniusBasis {
        r,
        singular,
        regular,
        resonance_value: value,
    }))
}

/// Which condition of the decision procedure failed first.
#[derive(Clone, Debug, PartialEq)]
pub enum FailedCondition {
    None,
    NonIntegerIndicial,
    /// A coefficient of `u` at this odd degree (`-1` or `1..2r-1`) is nonzero.
    OddCoefficientNonzero(i32),
    LogObstruction {
        degree: i32,
        alpha: Complex64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SMeroCertificate {
    pub verdict: bool,
    pub r: Option<u32>,
    pub failed_condition: FailedCondition,
    pub checked_alphas: Vec<Complex64>,
}

/// Five pseudo-random spectral parameters of modulus at most 10 (fixed
/// seed), followed by `α = 0`.
pub fn default_alpha_samples() -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(ALPHA_SEED);
    let mut out: Vec<Complex64> = (0..5)
        .map(|_| {
            let modulus = 10.0 * rng.random::<f64>().sqrt();
            let angle = core::f64::consts::TAU * rng.random::<f64>();
            Complex64::from_polar(modulus, angle)
        })
        .collect();
    out.push(Complex64::zero());
    out
}

/// Decides whether every solution of `Lψ = αψ` is meromorphic at the pole.
pub fn is_s_meromorphic_at_pole(
    op: &LocalOperatorData,
    alpha_samples: &[Complex64],
) -> Result<SMeroCertificate, LocalError> {
    let u = op.u_coeffs();
    let fail = |r, cond, checked: Vec<Complex64>| SMeroCertificate {
        verdict: false,
        r,
        failed_condition: cond,
        checked_alphas: checked,
    };

    let Some(r) = op.detected_r() else {
        return Ok(fail(None, FailedCondition::NonIntegerIndicial, Vec::new()));
    };
    if u.coeff_or_zero(-1).norm() > INTEGER_TOL {
        return Ok(fail(Some(r), FailedCondition::OddCoefficientNonzero(-1), Vec::new()));
    }
    let ri = r as i32;
    if ri > 0 && u.max_degree() < 2 * ri - 1 {
        return Err(LocalError::TruncationTooShort {
            needed: 2 * ri - 1,
            available: u.max_degree(),
        });
    }
    for k in (1..2 * ri).step_by(2) {
        if u.coeff_or_zero(k).norm() > INTEGER_TOL {
            return Ok(fail(Some(r), FailedCondition::OddCoefficientNonzero(k), Vec::new()));
        }
    }

    let mut checked = Vec::with_capacity(alpha_samples.len());
    for &alpha in alpha_samples {
        checked.push(alpha);
        if let FrobeniusOutcome::Obstruction(obs) = frobenius_basis(op, alpha, 2 * ri + 4)? {
            return Ok(fail(
                Some(r),
                FailedCondition::LogObstruction {
                    degree: obs.degree,
                    alpha,
                },
                checked,
            ));
        }
    }
    Ok(SMeroCertificate {
        verdict: true,
        r: Some(r),
        failed_condition: FailedCondition::None,
        checked_alphas: checked,
    })
}

/// Negative exponents of the admissible window at a pole of type `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeSubspace {
    pub exponents: Vec<i32>,
    pub dim: usize,
}

pub fn negative_subspace(r: u32) -> NegativeSubspace {
    let exponents: Vec<i32> = (0..).map(|i| -(r as i32) + 2 * i).take_while(|&k| k < 0).collect();
    let dim = exponents.len();
    debug_assert_eq!(dim, (r as usize).div_ceil(2));
    NegativeSubspace { exponents, dim }
}

/// Only second-order operators are classified.
pub fn check_operator_order(order: u32) -> Result<(), LocalError> {
    if order == 2 {
        Ok(())
    } else {
        Err(LocalError::UnsupportedOrder { order })
    }
}
