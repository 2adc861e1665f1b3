//! Global potentials: rational with double poles, KdV soliton tau functions
//! and elliptic (Lamé) potentials.
//!
//! KdV is taken as `u_t = 6uu_x - u_xxx`. Solitons use
//! `u = -2 ∂²_x log τ` with
//! `τ = Σ_S Π_{i∈S} ε_i E_i Π_{i<j∈S} A_ij`,
//! `E_i = exp(2k_i(x - 4k_i²t - x_i))`, `A_ij = ((k_i-k_j)/(k_i+k_j))²`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::PotentialError;
use crate::laurent::TruncatedLaurentSeries;
use crate::linalg::polynomial_roots;
use crate::local::LocalOperatorData;
use crate::weierstrass::{LatticeClass, WeierstrassData};

/// Largest supported number of solitons.
pub const MAX_SOLITONS: usize = 8;

/// Minimum distance to a pole accepted by [`evaluate`].
pub const POLE_PROXIMITY: f64 = 1e-10;

/// Thresholds for confirming a multiplicity jump.
pub const JUMP_PAIR_EPS: f64 = 1e-6;
pub const JUMP_TAU_XX_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalPole {
    pub position: f64,
    pub r: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    /// `Σ r_j(r_j+1)/(x-x_j)² + Σ a_k x^k`.
    RationalSingular {
        poles: Vec<RationalPole>,
        regular: Vec<f64>,
    },
    SolitonTau {
        k: Vec<f64>,
        phase: Vec<f64>,
        sign: Vec<i8>,
    },
    /// `n(n+1)℘(x - shift)`.
    Elliptic {
        omega1: f64,
        omega2: Complex64,
        n: u32,
        shift: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    kind: PotentialKind,
    time: f64,
    tau: Option<TauFunction>,
    lattice: Option<WeierstrassData>,
}

impl PotentialSpec {
    pub fn rational(poles: Vec<RationalPole>, regular: Vec<f64>) -> Result<Self, PotentialError> {
        if poles.iter().any(|p| !p.position.is_finite()) || regular.iter().any(|a| !a.is_finite()) {
            return Err(PotentialError::InvalidPotential("non-finite rational data"));
        }
        for (i, a) in poles.iter().enumerate() {
            if poles[..i].iter().any(|b| (a.position - b.position).abs() < 1e-12) {
                return Err(PotentialError::InvalidPotential("duplicate pole positions"));
            }
        }
        Ok(Self {
            kind: PotentialKind::RationalSingular { poles, regular },
            time: 0.0,
            tau: None,
            lattice: None,
        })
    }

    pub fn soliton(k: Vec<f64>, phase: Vec<f64>, sign: Vec<i8>, time: f64) -> Result<Self, PotentialError> {
        let tau = TauFunction::new(&k, &phase, &sign)?;
        if !time.is_finite() {
            return Err(PotentialError::InvalidPotential("time must be finite"));
        }
        Ok(Self {
            kind: PotentialKind::SolitonTau { k, phase, sign },
            time,
            tau: Some(tau),
            lattice: None,
        })
    }

    pub fn elliptic(omega1: f64, omega2: Complex64, n: u32, shift: f64) -> Result<Self, PotentialError> {
        let lattice = WeierstrassData::new(omega1, omega2)?;
        if lattice.lattice_class() == LatticeClass::Generic {
            return Err(PotentialError::InvalidPotential(
                "lattice must be rectangular or rhombic (conjugation-stable)",
            ));
        }
        if !shift.is_finite() {
            return Err(PotentialError::InvalidPotential("shift must be finite"));
        }
        Ok(Self {
            kind: PotentialKind::Elliptic {
                omega1,
                omega2,
                n,
                shift,
            },
            time: 0.0,
            tau: None,
            lattice: Some(lattice),
        })
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn tau(&self) -> Option<&TauFunction> {
        self.tau.as_ref()
    }

    pub fn lattice(&self) -> Option<&WeierstrassData> {
        self.lattice.as_ref()
    }

    /// Whether the potential depends on time.
    pub fn is_time_dependent(&self) -> bool {
        self.tau.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
struct TauTerm {
    sign: f64,
    /// `∂_x` rate `Σ 2k_i`.
    kappa: f64,
    /// `∂_t` rate `-Σ 8k_i³`.
    omega: f64,
    offset: f64,
}

/// The exponential sum `τ(x, t)`, stored term by term.
#[derive(Clone, Debug, PartialEq)]
pub struct TauFunction {
    terms: Vec<TauTerm>,
    k_max: f64,
}

/// Derivatives `∂_x^j τ` at one point, all multiplied by the same factor
/// `e^{-shift}`, plus `scale_j = Σ |term|·|κ|^j` under that factor.
#[derive(Clone, Debug, PartialEq)]
pub struct TauJet {
    pub values: Vec<Complex64>,
    pub scales: Vec<f64>,
    pub shift: f64,
}

impl TauJet {
    /// `u = -2(τ''/τ - (τ'/τ)²)`.
    pub fn potential(&self) -> Complex64 {
        let (t0, t1, t2) = (self.values[0], self.values[1], self.values[2]);
        let l1 = t1 / t0;
        -2.0 * (t2 / t0 - l1 * l1)
    }

    pub fn normalized(&self, j: usize) -> Complex64 {
        self.values[j] / self.scales[j]
    }
}

impl TauFunction {
    pub fn new(k: &[f64], phase: &[f64], sign: &[i8]) -> Result<Self, PotentialError> {
        let n = k.len();
        if n == 0 || n > MAX_SOLITONS {
            return Err(PotentialError::InvalidPotential(
                "soliton count must be between 1 and 8",
            ));
        }
        if phase.len() != n || sign.len() != n {
            return Err(PotentialError::InvalidPotential(
                "k, phase and sign must have equal length",
            ));
        }
        if k.iter().chain(phase).any(|v| !v.is_finite()) {
            return Err(PotentialError::InvalidPotential("non-finite soliton data"));
        }
        if k[0] <= 0.0 || k.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PotentialError::InvalidPotential(
                "wave numbers must be positive and strictly increasing",
            ));
        }
        if sign.iter().any(|&s| s != 1 && s != -1) {
            return Err(PotentialError::InvalidPotential("sign flags must be +1 or -1"));
        }
        let mut terms = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let mut term = TauTerm {
                sign: 1.0,
                kappa: 0.0,
                omega: 0.0,
                offset: 0.0,
            };
            for (a, &i) in members.iter().enumerate() {
                term.sign *= sign[i] as f64;
                term.kappa += 2.0 * k[i];
                term.omega -= 8.0 * k[i].powi(3);
                term.offset -= 2.0 * k[i] * phase[i];
                for &j in &members[a + 1..] {
                    term.offset += 2.0 * ((k[i] - k[j]) / (k[i] + k[j])).abs().ln();
                }
            }
            terms.push(term);
        }
        Ok(Self { terms, k_max: k[n - 1] })
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    /// `∂_x^a ∂_t^b τ` for `a = 0..=order`, common scaling.
    pub fn jet_mixed(&self, x: Complex64, t: f64, order: usize, dt_order: u32) -> TauJet {
        let exps: Vec<Complex64> = self
            .terms
            .iter()
            .map(|s| x * s.kappa + s.omega * t + s.offset)
            .collect();
        let shift = exps.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        let mut values = vec![Complex64::zero(); order + 1];
        let mut scales = vec![0.0; order + 1];
        for (s, e) in self.terms.iter().zip(&exps) {
            let w = (e - shift).exp() * s.sign * s.omega.powi(dt_order as i32);
            let mut pow = 1.0;
            for j in 0..=order {
                values[j] += w * pow;
                scales[j] += w.norm() * pow.abs();
                pow *= s.kappa;
            }
        }
        for s in &mut scales {
            if *s == 0.0 {
                *s = f64::MIN_POSITIVE;
            }
        }
        TauJet { values, scales, shift }
    }

    pub fn jet(&self, x: Complex64, t: f64, order: usize) -> TauJet {
        self.jet_mixed(x, t, order, 0)
    }

    /// `τ(x, t)` with `x` real; sign-exact up to rounding.
    fn normalized_value(&self, x: f64, t: f64) -> (f64, f64) {
        // n = τ/S and its x-derivative, S = Σ|term|.
        let j = self.jet(Complex64::new(x, 0.0), t, 1);
        let s = j.scales[0];
        let s1: f64 = {
            let exps = self
                .terms
                .iter()
                .map(|term| (x * term.kappa + term.omega * t + term.offset - j.shift).exp());
            self.terms.iter().zip(exps).map(|(term, e)| e * term.kappa).sum()
        };
        let n = j.values[0].re / s;
        let dn = (j.values[1].re - j.values[0].re * s1 / s) / s;
        (n, dn)
    }

    /// Taylor coefficients `τ_j = ∂^j τ / j!` at `x`, `j = 0..=order`, under a
    /// common scaling.
    pub fn taylor(&self, x: Complex64, t: f64, order: usize) -> Vec<Complex64> {
        let exps: Vec<Complex64> = self
            .terms
            .iter()
            .map(|s| x * s.kappa + s.omega * t + s.offset)
            .collect();
        let shift = exps.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        let mut out = vec![Complex64::zero(); order + 1];
        for (s, e) in self.terms.iter().zip(&exps) {
            let mut w = (e - shift).exp() * s.sign;
            for (j, o) in out.iter_mut().enumerate() {
                *o += w;
                w *= s.kappa / (j + 1) as f64;
            }
        }
        out
    }
}

/// Distance estimate to the nearest zero of `τ` from a jet of order ≥ 3.
fn zero_distance_estimate(jet: &TauJet) -> f64 {
    let t0 = jet.values[0].norm();
    let mut best = f64::INFINITY;
    let mut fact = 1.0;
    for m in 1..jet.values.len().min(4) {
        fact *= m as f64;
        let tm = jet.values[m].norm();
        if tm > 0.0 {
            best = best.min((fact * t0 / tm).powf(1.0 / m as f64));
        }
    }
    best
}

fn rational_value(poles: &[RationalPole], regular: &[f64], x: Complex64) -> Complex64 {
    let mut v = regular.iter().rev().fold(Complex64::zero(), |acc, &a| acc * x + a);
    for p in poles {
        let y = x - p.position;
        v += (p.r * (p.r + 1)) as f64 / (y * y);
    }
    v
}

/// `u(x, t)` at complex `x`.
pub fn evaluate(p: &PotentialSpec, x: Complex64) -> Result<Complex64, PotentialError> {
    match &p.kind {
        PotentialKind::RationalSingular { poles, regular } => {
            for pole in poles {
                let d = (x - pole.position).norm();
                if d < POLE_PROXIMITY && pole.r > 0 {
                    return Err(PotentialError::PoleProximity { x, distance: d });
                }
            }
            Ok(rational_value(poles, regular, x))
        }
        PotentialKind::SolitonTau { .. } => {
            let tau = p.tau.as_ref().expect("soliton potential has a tau function");
            let jet = tau.jet(x, p.time, 3);
            let d = zero_distance_estimate(&jet);
            if d < POLE_PROXIMITY {
                return Err(PotentialError::PoleProximity { x, distance: d });
            }
            Ok(jet.potential())
        }
        PotentialKind::Elliptic { n, shift, .. } => {
            let w = p.lattice.as_ref().expect("elliptic potential has lattice data");
            let z = x - shift;
            let d = w.lattice_distance(z);
            if d < POLE_PROXIMITY && *n > 0 {
                return Err(PotentialError::PoleProximity { x, distance: d });
            }
            if *n == 0 {
                return Ok(Complex64::zero());
            }
            Ok(w.wp(z)? * (n * (n + 1)) as f64)
        }
    }
}

/// `r` with `r(r+1) = 2m`, if any.
pub fn r_from_multiplicity(m: u32) -> Option<u32> {
    let r = ((((8 * m + 1) as f64).sqrt() - 1.0) / 2.0).round() as u32;
    (r * (r + 1) == 2 * m).then_some(r)
}

/// Winding number and zero centroid of `τ` inside `|x - center| = radius`.
fn winding_and_centroid(tau: &TauFunction, t: f64, center: Complex64, radius: f64) -> (i64, Complex64) {
    const M: usize = 256;
    let mut wind = Complex64::zero();
    let mut first = Complex64::zero();
    for i in 0..M {
        let y = Complex64::from_polar(radius, TAU * i as f64 / M as f64);
        let jet = tau.jet(center + y, t, 1);
        let log_deriv = jet.values[1] / jet.values[0];
        wind += log_deriv * y;
        first += log_deriv * y * y;
    }
    let m = (wind.re / M as f64).round() as i64;
    let moment = first / M as f64;
    let centroid = if m > 0 { center + moment / m as f64 } else { center };
    (m, centroid)
}

/// Laurent data of `u` at a pole. Soliton potentials are expanded from the
/// exact Taylor coefficients of `τ` at the (refined) zero; the zero's
/// multiplicity `m` comes from the winding number of `τ`.
pub fn local_expansion(p: &PotentialSpec, center: Complex64, order: i32) -> Result<LocalOperatorData, PotentialError> {
    let order = order.max(0);
    match &p.kind {
        PotentialKind::RationalSingular { poles, regular } => {
            let pole = poles
                .iter()
                .find(|q| (center - q.position).norm() < 1e-9)
                .ok_or(PotentialError::NotAPole { center })?;
            let c0 = Complex64::new(pole.position, 0.0);
            let series = TruncatedLaurentSeries::from_fn(c0, -2, order, |k| {
                let mut v = Complex64::zero();
                if k == -2 {
                    v += (pole.r * (pole.r + 1)) as f64;
                }
                if k >= 0 {
                    let k = k as usize;
                    // Taylor shift of the polynomial part.
                    for (j, &a) in regular.iter().enumerate().skip(k) {
                        v += a * binomial(j, k) * pole.position.powi((j - k) as i32);
                    }
                    for other in poles.iter().filter(|q| q.position != pole.position) {
                        // s/(y+d)² = s Σ (k+1)(-1)^k y^k / d^{k+2}
                        let d = pole.position - other.position;
                        let s = (other.r * (other.r + 1)) as f64;
                        let sgn = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                        v += s * sgn * (k + 1) as f64 / d.powi(k as i32 + 2);
                    }
                }
                v
            })
            .expect("valid window");
            Ok(LocalOperatorData::new(series, Some(pole.r))?)
        }
        PotentialKind::Elliptic { n, shift, .. } => {
            let w = p.lattice.as_ref().expect("elliptic potential has lattice data");
            let z = center - shift;
            if w.lattice_distance(z) > 1e-9 {
                return Err(PotentialError::NotAPole { center });
            }
            let strength = (n * (n + 1)) as f64;
            let coeffs = w.wp_laurent_coeffs((order / 2 + 1) as usize);
            let series = TruncatedLaurentSeries::from_fn(center, -2, order, |k| {
                if k == -2 {
                    Complex64::new(strength, 0.0)
                } else if k >= 2 && k % 2 == 0 {
                    coeffs[(k / 2 - 1) as usize] * strength
                } else {
                    Complex64::zero()
                }
            })
            .expect("valid window");
            Ok(LocalOperatorData::new(series, Some(*n))?)
        }
        PotentialKind::SolitonTau { .. } => {
            let tau = p.tau.as_ref().expect("soliton potential has a tau function");
            soliton_expansion(tau, p.time, center, order)
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Sampling radius for the zero count: the largest of `0.1, 0.05, ...` at
/// which the winding number is stable under halving.
fn choose_radius(tau: &TauFunction, t: f64, center: Complex64) -> Result<(f64, i64), PotentialError> {
    let mut radius = 0.1;
    let mut any = false;
    while radius > 1e-5 {
        let (outer, _) = winding_and_centroid(tau, t, center, radius);
        let (inner, _) = winding_and_centroid(tau, t, center, 0.5 * radius);
        if inner > 0 {
            any = true;
        }
        if outer == inner && inner > 0 {
            return Ok((0.5 * radius, inner));
        }
        radius *= 0.5;
    }
    if any {
        Err(PotentialError::RadiusCollision { center })
    } else {
        Err(PotentialError::NotAPole { center })
    }
}

fn soliton_expansion(
    tau: &TauFunction,
    t: f64,
    center: Complex64,
    order: i32,
) -> Result<LocalOperatorData, PotentialError> {
    let (radius, m) = choose_radius(tau, t, center)?;
    let real_center = center.im == 0.0;
    let mut c = center;
    for _ in 0..3 {
        let (wm, centroid) = winding_and_centroid(tau, t, c, radius);
        if wm != m {
            return Err(PotentialError::RadiusCollision { center });
        }
        c = if real_center {
            Complex64::new(centroid.re, 0.0)
        } else {
            centroid
        };
    }
    if (c - center).norm() > 0.5 * radius {
        return Err(PotentialError::NotAPole { center });
    }
    let m = m as usize;
    let need = order as usize + 2;
    let tj = tau.taylor(c, t, m + need);
    // Lower coefficients belong to the zero cluster; they must be negligible.
    let lead = tj[m].norm();
    let spread = (0..m)
        .map(|j| (tj[j].norm() / lead).powf(1.0 / (m - j) as f64))
        .fold(0.0, f64::max);
    if spread > 1e-4 {
        return Err(PotentialError::RadiusCollision { center });
    }
    // log B for B = Σ b_j y^j, b_j = τ_{m+j}: l_j = (b_j - (1/j)Σ i l_i b_{j-i}) / b_0.
    let b = &tj[m..];
    let mut l = vec![Complex64::zero(); need + 1];
    for j in 1..=need {
        let mut acc = b[j];
        for i in 1..j {
            acc -= l[i] * b[j - i] * (i as f64 / j as f64);
        }
        l[j] = acc / b[0];
    }
    let series = TruncatedLaurentSeries::from_fn(c, -2, order, |k| {
        if k == -2 {
            Complex64::new(2.0 * m as f64, 0.0)
        } else if k < 0 {
            Complex64::zero()
        } else {
            let j = (k + 2) as usize;
            l[j] * (-2.0 * (j * (j - 1)) as f64)
        }
    })
    .expect("valid window");
    Ok(LocalOperatorData::new(series, None)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleSource {
    TauZero,
    Rational,
    Elliptic,
}

/// A real pole of `u`: position, `τ`-zero multiplicity `m` (or its
/// equivalent `r(r+1)/2`), and `r` when `2m = r(r+1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealPole {
    pub position: f64,
    pub multiplicity: u32,
    pub r: Option<u32>,
    pub source: PoleSource,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleSearchOptions {
    /// Grid step of the sign scan.
    pub grid_step: f64,
    /// Relative size below which a derivative counts as vanishing.
    pub derivative_tol: f64,
}

impl Default for PoleSearchOptions {
    fn default() -> Self {
        Self {
            grid_step: 1e-2,
            derivative_tol: 1e-6,
        }
    }
}

pub fn find_real_poles(p: &PotentialSpec, window: (f64, f64)) -> Result<Vec<RealPole>, PotentialError> {
    find_real_poles_with(p, window, &PoleSearchOptions::default())
}

pub fn find_real_poles_with(
    p: &PotentialSpec,
    window: (f64, f64),
    opts: &PoleSearchOptions,
) -> Result<Vec<RealPole>, PotentialError> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(PotentialError::InvalidPotential("window must be a bounded interval"));
    }
    match &p.kind {
        PotentialKind::RationalSingular { poles, .. } => {
            let mut out: Vec<RealPole> = poles
                .iter()
                .filter(|q| q.r > 0 && q.position >= lo && q.position <= hi)
                .map(|q| RealPole {
                    position: q.position,
                    multiplicity: q.r * (q.r + 1) / 2,
                    r: Some(q.r),
                    source: PoleSource::Rational,
                })
                .collect();
            out.sort_by(|a, b| a.position.total_cmp(&b.position));
            Ok(out)
        }
        PotentialKind::Elliptic { omega1, n, shift, .. } => {
            if *n == 0 {
                return Ok(Vec::new());
            }
            let period = 2.0 * omega1;
            let first = ((lo - shift) / period).ceil() as i64;
            let last = ((hi - shift) / period).floor() as i64;
            Ok((first..=last)
                .map(|j| RealPole {
                    position: shift + j as f64 * period,
                    multiplicity: n * (n + 1) / 2,
                    r: Some(*n),
                    source: PoleSource::Elliptic,
                })
                .collect())
        }
        PotentialKind::SolitonTau { .. } => {
            let tau = p.tau.as_ref().expect("soliton potential has a tau function");
            tau_real_zeros(tau, p.time, window, opts)
        }
    }
}

/// Sign scan of `τ(·, t)` on a grid, with a Hermite-cubic check for roots
/// hidden between same-sign samples.
fn tau_real_zeros(
    tau: &TauFunction,
    t: f64,
    (lo, hi): (f64, f64),
    opts: &PoleSearchOptions,
) -> Result<Vec<RealPole>, PotentialError> {
    let cells = ((hi - lo) / opts.grid_step).ceil().max(1.0) as usize;
    let h = (hi - lo) / cells as f64;
    let xs: Vec<f64> = (0..=cells)
        .map(|i| if i == cells { hi } else { lo + i as f64 * h })
        .collect();
    let vals: Vec<(f64, f64)> = xs.iter().map(|&x| tau.normalized_value(x, t)).collect();
    let mut roots = Vec::new();
    for i in 0..cells {
        let (a, b) = (xs[i], xs[i + 1]);
        let ((fa, da), (fb, db)) = (vals[i], vals[i + 1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb < 0.0 {
            roots.push(refine_root(tau, t, a, b));
            continue;
        }
        if fb == 0.0 {
            continue;
        }
        // Hermite cubic on [a, b]; a sign change inside means the grid
        // cannot resolve the zeros there.
        let w = b - a;
        for s in 1..8 {
            let s = s as f64 / 8.0;
            let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
            let h10 = s.powi(3) - 2.0 * s * s + s;
            let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
            let h11 = s.powi(3) - s * s;
            let v = h00 * fa + h10 * w * da + h01 * fb + h11 * w * db;
            if v * fa < 0.0 {
                return Err(PotentialError::GridTooCoarse { x: a + s * w });
            }
        }
    }
    let mut out = Vec::with_capacity(roots.len());
    for x in roots {
        let m = tau_multiplicity(tau, x, t, opts.derivative_tol);
        out.push(RealPole {
            position: x,
            multiplicity: m,
            r: r_from_multiplicity(m),
            source: PoleSource::TauZero,
        });
    }
    Ok(out)
}

/// Safeguarded Newton on a sign-change bracket of `τ(·, t)`.
fn refine_root(tau: &TauFunction, t: f64, mut a: f64, mut b: f64) -> f64 {
    let sign_a = tau.normalized_value(a, t).0.signum();
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let jet = tau.jet(Complex64::new(x, 0.0), t, 1);
        let f = jet.values[0].re;
        if f == 0.0 {
            return x;
        }
        if f.signum() == sign_a {
            a = x;
        } else {
            b = x;
        }
        let df = jet.values[1].re;
        let newton = x - f / df;
        x = if df != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (b - a).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Order of the first derivative of `τ` at `x` that is not negligible.
pub fn tau_multiplicity(tau: &TauFunction, x: f64, t: f64, tol: f64) -> u32 {
    let jet = tau.jet(Complex64::new(x, 0.0), t, 8);
    for m in 1..=8 {
        if jet.normalized(m).norm() > tol {
            return m as u32;
        }
    }
    8
}

/// One pole at one time; `pole_type_coefficient = 2m`, so
/// `u ≈ 2m/(x - x₀)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleEvent {
    pub time: f64,
    pub position: f64,
    pub tau_zero_multiplicity: u32,
    pub pole_type_coefficient: u32,
    pub r: Option<u32>,
    /// `2m` is not of the form `r(r+1)`.
    pub artifact: bool,
}

impl PoleEvent {
    fn new(time: f64, position: f64, m: u32) -> Self {
        let r = r_from_multiplicity(m);
        Self {
            time,
            position,
            tau_zero_multiplicity: m,
            pole_type_coefficient: 2 * m,
            r,
            artifact: r.is_none(),
        }
    }

    /// `⌊(r+1)/2⌋`, zero for artifacts.
    pub fn negative_squares(&self) -> usize {
        self.r.map_or(0, |r| (r as usize).div_ceil(2))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub id: usize,
    pub samples: Vec<PoleEvent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpEvent {
    pub trajectory: usize,
    pub before: PoleEvent,
    pub at: PoleEvent,
    pub after: PoleEvent,
    /// Distance of the nearest complex zero pair from the real axis.
    pub pair_distance: f64,
    /// `|τ''(x₀)|` relative to the term scale.
    pub tau_xx: f64,
    pub negative_squares: usize,
}

impl JumpEvent {
    /// Human-readable type change, e.g. `2/y^2 → 6/y^2`.
    pub fn transition(&self) -> String {
        format!(
            "{}/y^2 → {}/y^2",
            self.before.pole_type_coefficient, self.at.pole_type_coefficient
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveResult {
    pub times: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    pub events: Vec<JumpEvent>,
    /// `Σ ⌊(r_j+1)/2⌋` over the window, per sampled time.
    pub negative_counts: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub search: PoleSearchOptions,
    pub pair_eps: f64,
    pub tau_xx_eps: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            search: PoleSearchOptions::default(),
            pair_eps: JUMP_PAIR_EPS,
            tau_xx_eps: JUMP_TAU_XX_EPS,
        }
    }
}

pub fn evolve_track(
    p: &PotentialSpec,
    t_range: (f64, f64),
    t_steps: usize,
    window: (f64, f64),
) -> Result<EvolveResult, PotentialError> {
    evolve_track_with(p, t_range, t_steps, window, &EvolveOptions::default())
}

struct Open {
    id: usize,
    last: f64,
}

pub fn evolve_track_with(
    p: &PotentialSpec,
    (t0, t1): (f64, f64),
    t_steps: usize,
    window: (f64, f64),
    opts: &EvolveOptions,
) -> Result<EvolveResult, PotentialError> {
    let tau = p.tau.as_ref().ok_or(PotentialError::NotSoliton)?;
    if t_steps == 0 || t0.is_nan() || t1.is_nan() || t0 >= t1 {
        return Err(PotentialError::InvalidPotential(
            "need t_steps ≥ 1 and an increasing time range",
        ));
    }
    let dt = (t1 - t0) / t_steps as f64;
    let times: Vec<f64> = (0..=t_steps)
        .map(|i| if i == t_steps { t1 } else { t0 + i as f64 * dt })
        .collect();
    let snapshots: Vec<Vec<RealPole>> = times
        .iter()
        .map(|&t| tau_real_zeros(tau, t, window, &opts.search))
        .collect::<Result<_, _>>()?;

    // Edge margin: far-field soliton speed over one step.
    let margin = 4.0 * tau.k_max().powi(2) * dt * 1.5 + 1e-6;
    let mut trajectories: Vec<Trajectory> = Vec::new();
    let mut open: Vec<Open> = Vec::new();
    for (step, (t, poles)) in times.iter().zip(&snapshots).enumerate() {
        if step == 0 {
            for pole in poles {
                let id = trajectories.len();
                trajectories.push(Trajectory {
                    id,
                    samples: vec![PoleEvent::new(*t, pole.position, pole.multiplicity)],
                });
                open.push(Open {
                    id,
                    last: pole.position,
                });
            }
            continue;
        }
        let prev: Vec<f64> = open.iter().map(|o| o.last).collect();
        let curr: Vec<f64> = poles.iter().map(|q| q.position).collect();
        let shift = align(&prev, &curr, window, margin).ok_or_else(|| {
            let x = prev.first().copied().unwrap_or(window.0);
            PotentialError::TrackingLost { t: *t, x }
        })?;
        let mut next_open = Vec::with_capacity(curr.len());
        for (j, pole) in poles.iter().enumerate() {
            let i = j as isize - shift;
            let event = PoleEvent::new(*t, pole.position, pole.multiplicity);
            if i >= 0 && (i as usize) < open.len() {
                let id = open[i as usize].id;
                trajectories[id].samples.push(event);
                next_open.push(Open {
                    id,
                    last: pole.position,
                });
            } else {
                let id = trajectories.len();
                trajectories.push(Trajectory {
                    id,
                    samples: vec![event],
                });
                next_open.push(Open {
                    id,
                    last: pole.position,
                });
            }
        }
        open = next_open;
    }

    // Candidates: sign changes of τ'' at the tracked zero, and local minima
    // of |τ'| there (a touching zero of τ' leaves τ'' sign-stable on a
    // coarse grid).
    let mut events: Vec<JumpEvent> = Vec::new();
    for traj in &trajectories {
        let samples = &traj.samples;
        let g: Vec<f64> = samples
            .iter()
            .map(|s| second_derivative_indicator(tau, s.position, s.time))
            .collect();
        let d1: Vec<f64> = samples
            .iter()
            .map(|s| first_derivative_indicator(tau, s.position, s.time))
            .collect();
        let mut brackets = Vec::new();
        for i in 0..samples.len().saturating_sub(1) {
            if g[i] * g[i + 1] < 0.0 {
                brackets.push((i, i + 1));
            }
        }
        for i in 1..samples.len().saturating_sub(1) {
            if d1[i] <= d1[i - 1] && d1[i] <= d1[i + 1] {
                brackets.push((i - 1, i + 1));
            }
        }
        for (i, j) in brackets {
            if let Some(ev) = locate_jump(tau, &samples[i], &samples[j], opts)? {
                if events.iter().any(|e| (e.at.time - ev.at.time).abs() < 1e-9) {
                    continue;
                }
                events.push(JumpEvent {
                    trajectory: traj.id,
                    ..ev
                });
            }
        }
    }
    events.sort_by(|a, b| a.at.time.total_cmp(&b.at.time));

    let negative_counts = snapshots
        .iter()
        .map(|poles| poles.iter().map(|q| q.r.map_or(0, |r| (r as usize).div_ceil(2))).sum())
        .collect();
    Ok(EvolveResult {
        times,
        trajectories,
        events,
        negative_counts,
    })
}

/// Index offset `s` with `curr[j] ↔ prev[j - s]`; unmatched poles must sit
/// within `margin` of the window edges.
fn align(prev: &[f64], curr: &[f64], (lo, hi): (f64, f64), margin: f64) -> Option<isize> {
    let near_lo = |x: f64| x - lo <= margin;
    let near_hi = |x: f64| hi - x <= margin;
    let mut best: Option<(f64, isize)> = None;
    let span = (prev.len() + curr.len()) as isize;
    for s in -span..=span {
        let mut ok = true;
        let mut cost = 0.0f64;
        let mut matched = 0;
        for (i, &x) in prev.iter().enumerate() {
            let j = i as isize + s;
            if j >= 0 && (j as usize) < curr.len() {
                cost = cost.max((curr[j as usize] - x).abs());
                matched += 1;
            } else if !(if j < 0 { near_lo(x) } else { near_hi(x) }) {
                ok = false;
            }
        }
        for (j, &x) in curr.iter().enumerate() {
            let i = j as isize - s;
            if i < 0 || i as usize >= prev.len() {
                let edge_ok = if i < 0 { near_lo(x) } else { near_hi(x) };
                if !edge_ok {
                    ok = false;
                }
            }
        }
        if !ok || (matched == 0 && !prev.is_empty() && !curr.is_empty()) {
            continue;
        }
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, s));
        }
    }
    best.map(|(_, s)| s)
}

fn first_derivative_indicator(tau: &TauFunction, x: f64, t: f64) -> f64 {
    let jet = tau.jet(Complex64::new(x, 0.0), t, 1);
    jet.normalized(1).norm()
}

fn second_derivative_indicator(tau: &TauFunction, x: f64, t: f64) -> f64 {
    let jet = tau.jet(Complex64::new(x, 0.0), t, 2);
    jet.normalized(2).re
}

/// Real zero of `τ(·, t)` nearest to `guess`, by bracketing outward.
fn track_root(tau: &TauFunction, t: f64, guess: f64, reach: f64) -> Option<f64> {
    let f = |x: f64| tau.normalized_value(x, t).0;
    let f0 = f(guess);
    if f0 == 0.0 {
        return Some(guess);
    }
    let mut step = 1e-6f64.max(1e-3 * reach);
    while step <= reach {
        for x in [guess - step, guess + step] {
            let fx = f(x);
            if fx * f0 <= 0.0 {
                let (a, b) = if x < guess { (x, guess) } else { (guess, x) };
                return Some(refine_root(tau, t, a, b));
            }
        }
        step *= 1.6;
    }
    None
}

fn locate_jump(
    tau: &TauFunction,
    a: &PoleEvent,
    b: &PoleEvent,
    opts: &EvolveOptions,
) -> Result<Option<JumpEvent>, PotentialError> {
    let reach = 2.0 * (b.position - a.position).abs() + 0.5;
    let span = b.time - a.time;
    let guess = |t: f64| a.position + (b.position - a.position) * (t - a.time) / span;
    let indicator = |t: f64| -> Result<(f64, f64), PotentialError> {
        let x = track_root(tau, t, guess(t), reach).ok_or(PotentialError::TrackingLost { t, x: guess(t) })?;
        Ok((first_derivative_indicator(tau, x, t), x))
    };
    // Golden-section search for the smallest |τ'| at the tracked zero.
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a.time, b.time);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut xc) = indicator(c)?;
    let (mut fd, mut xd) = indicator(d)?;
    for _ in 0..90 {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            xd = xc;
            c = hi - ratio * (hi - lo);
            (fc, xc) = indicator(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            xc = xd;
            d = lo + ratio * (hi - lo);
            (fd, xd) = indicator(d)?;
        }
        if hi - lo <= 1e-13 * span {
            break;
        }
    }
    let (xa, xb, ta, tb) = (xc, xd, c, d);
    // Newton on (τ_x, τ_xx) = 0 in (x, t).
    let (mut x, mut t) = (0.5 * (xa + xb), 0.5 * (ta + tb));
    for _ in 0..40 {
        let z = Complex64::new(x, 0.0);
        let jx = tau.jet_mixed(z, t, 3, 0);
        let jt = tau.jet_mixed(z, t, 2, 1);
        // Both jets share the same exponential shift.
        let (f1, f2) = (jx.values[1].re, jx.values[2].re);
        let (a11, a12) = (jx.values[2].re, jt.values[1].re);
        let (a21, a22) = (jx.values[3].re, jt.values[2].re);
        let det = a11 * a22 - a12 * a21;
        if det == 0.0 {
            break;
        }
        let dx = (f1 * a22 - f2 * a12) / det;
        let dtt = (a11 * f2 - a21 * f1) / det;
        x -= dx;
        t -= dtt;
        if dx.abs() < 1e-16 * x.abs().max(1.0) && dtt.abs() < 1e-16 * t.abs().max(1.0) {
            break;
        }
    }
    if !(t >= a.time - 1e-12 && t <= b.time + 1e-12) {
        return Ok(None);
    }
    let jet = tau.jet(Complex64::new(x, 0.0), t, 3);
    let tau0 = jet.normalized(0).norm();
    let tau_xx = (jet.values[2] / jet.scales[0]).norm();
    if tau0 >= 1e-8 || tau_xx >= opts.tau_xx_eps {
        return Ok(None);
    }
    let pair_distance = complex_pair_distance(tau, x, t);
    if pair_distance >= opts.pair_eps {
        return Ok(None);
    }
    let m_at = tau_multiplicity(tau, x, t, opts.search.derivative_tol);
    let at = PoleEvent::new(t, x, m_at);
    if at.tau_zero_multiplicity == a.tau_zero_multiplicity {
        return Ok(None);
    }
    let negative_squares = at.negative_squares();
    Ok(Some(JumpEvent {
        trajectory: 0,
        before: a.clone(),
        at,
        after: b.clone(),
        pair_distance,
        tau_xx,
        negative_squares,
    }))
}

/// Smallest `|Im z|` over non-real zeros of `τ(x + ·, t)` near `x`, from the
/// Taylor polynomial with the real zero at `x` divided out.
fn complex_pair_distance(tau: &TauFunction, x: f64, t: f64) -> f64 {
    let tj = tau.taylor(Complex64::new(x, 0.0), t, 10);
    let roots = polynomial_roots(&tj[1..]);
    roots
        .iter()
        .filter(|z| z.norm() < 0.1)
        .map(|z| z.im.abs())
        .fold(f64::INFINITY, f64::min)
}

/// `max |u_t - 6uu_x + u_xxx|` over the grid, by eighth-order central
/// differences. The x-step is `min(1e-2, d/80)` for a grid point at
/// distance `d` from the nearest real pole.
pub fn kdv_residual(p: &PotentialSpec, t: f64, grid: &[f64]) -> Result<f64, PotentialError> {
    if grid.is_empty() {
        return Ok(0.0);
    }
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let at_t = p.clone().with_time(t);
    let poles = find_real_poles(&at_t, (lo, hi))?;
    let speed = match &p.tau {
        Some(tau) => 4.0 * tau.k_max().powi(2),
        None => 0.0,
    };
    let mut worst = 0.0f64;
    for &x in grid {
        let d = poles
            .iter()
            .map(|q| (q.position - x).abs())
            .fold(f64::INFINITY, f64::min);
        if d < 0.05 {
            return Err(PotentialError::PoleProximity {
                x: Complex64::new(x, 0.0),
                distance: d,
            });
        }
        let h = 1e-2f64.min(d / 80.0);
        let u_at = |xx: f64, tt: f64| -> Result<f64, PotentialError> {
            Ok(evaluate(&p.clone().with_time(tt), Complex64::new(xx, 0.0))?.re)
        };
        let samples: Vec<f64> = (-5..=5).map(|i| u_at(x + i as f64 * h, t)).collect::<Result<_, _>>()?;
        let u = samples[5];
        let ux = stencil(&D1, &samples) / h;
        let uxxx = stencil(&D3, &samples) / h.powi(3);
        let ut = if p.is_time_dependent() {
            let dt = h / speed.max(1.0);
            let ts: Vec<f64> = (-5..=5).map(|i| u_at(x, t + i as f64 * dt)).collect::<Result<_, _>>()?;
            stencil(&D1, &ts) / dt
        } else {
            0.0
        };
        worst = worst.max((ut - 6.0 * u * ux + uxxx).abs());
    }
    Ok(worst)
}

/// Eighth-order central first derivative on offsets -4..=4 (padded to 11).
const D1: [f64; 11] = [
    0.0,
    1.0 / 280.0,
    -4.0 / 105.0,
    1.0 / 5.0,
    -4.0 / 5.0,
    0.0,
    4.0 / 5.0,
    -1.0 / 5.0,
    4.0 / 105.0,
    -1.0 / 280.0,
    0.0,
];

/// Eighth-order central third derivative on offsets -5..=5.
const D3: [f64; 11] = [
    41.0 / 6048.0,
    -1261.0 / 15120.0,
    541.0 / 1120.0,
    -4369.0 / 2520.0,
    1669.0 / 720.0,
    0.0,
    -1669.0 / 720.0,
    4369.0 / 2520.0,
    -541.0 / 1120.0,
    1261.0 / 15120.0,
    -41.0 / 6048.0,
];

fn stencil(w: &[f64; 11], v: &[f64]) -> f64 {
    w.iter().zip(v).map(|(a, b)| a * b).sum()
}
