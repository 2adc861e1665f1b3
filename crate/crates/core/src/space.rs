//! Singular function spaces with the indefinite pairing
//! `⟨f, g⟩ = ∫ f(x) conj(g(conj x)) dx`, taken along the real line with
//! semicircular detours of radius `ρ` around the poles.
//!
//! Every element is analytic on a neighbourhood of each detour circle. On a
//! detour the integrand's Laurent series is sampled on the circle and
//! integrated term by term, except for the residue, which comes from the
//! stored windows. For admissible pairs that residue is exactly zero, so the
//! upper and lower detours give the same value bit for bit.
//!
//! Elements built here are combinations of Gaussian-windowed atoms
//! `(x - c)^k e^{-(x-c)²/w²}` and `e^{-(x-c)²/w²} cos(ν(x-c) + φ)`, periodized
//! with the Bloch multiplier when the space is quasi-periodic, and corrected
//! at each pole so that forbidden-parity coefficients vanish.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use num_complex::Complex64;
use num_traits::Euclid;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PotentialError, SpaceError};
use crate::laurent::{laurent_by_cauchy, Orientation, TruncatedLaurentSeries};
use crate::linalg::{hermitian_eigenvalues, inertia, solve_complex};
use crate::local::{default_alpha_samples, is_s_meromorphic_at_pole, negative_subspace, SMeroCertificate};
use crate::potential::{evaluate, find_real_poles, local_expansion, PotentialKind, PotentialSpec};
use crate::quad::{integrate, QuadOptions};

pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
pub const MAX_DETOUR_RADIUS: f64 = 0.05;
/// Eigenvalues below `-EIGEN_REL_THRESHOLD · spectral radius` count as negative.
pub const EIGEN_REL_THRESHOLD: f64 = 1e-10;
/// Sample count on each detour circle.
pub const CIRCLE_SAMPLES: usize = 128;
const SERIES_DEGREE: i32 = 48;
const PARITY_TOL: f64 = 1e-9;
const KAPPA_TOL: f64 = 1e-12;
const TAIL_WIDTHS: f64 = 10.0;
const MAX_ENVELOPE: f64 = 0.5;

/// Second-derivative stencil, eighth order, offsets `-4..=4`.
const D2: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -1.0 / 5.0,
    8.0 / 5.0,
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacePole {
    pub position: f64,
    pub r: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceMode {
    /// Functions on `[a, b]`, negligible near both ends.
    CompactSupport { a: f64, b: f64 },
    /// `f(x + period) = kappa · f(x)`.
    Bloch { period: f64, kappa: Complex64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec {
    poles: Vec<SpacePole>,
    mode: SpaceMode,
    detour_radius: f64,
    quad_tol: f64,
}

impl SpaceSpec {
    /// Space with the default detour radius `min(0.05, separation / 4)` and
    /// quadrature tolerance `1e-8`. In compact mode the distance from a pole
    /// to the interval ends also counts as a separation.
    pub fn new(poles: Vec<SpacePole>, mode: SpaceMode) -> Result<Self, SpaceError> {
        match mode {
            SpaceMode::CompactSupport { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(SpaceError::InvalidSpace("interval must satisfy a < b"));
                }
            }
            SpaceMode::Bloch { period, kappa } => {
                if !(period.is_finite() && period > 0.0) {
                    return Err(SpaceError::InvalidSpace("period must be positive"));
                }
                if (kappa.norm() - 1.0).abs() > KAPPA_TOL {
                    return Err(SpaceError::InvalidSpace("Bloch multiplier must be unimodular"));
                }
            }
        }
        if poles.iter().any(|p| !p.position.is_finite()) {
            return Err(SpaceError::InvalidSpace("pole positions must be finite"));
        }
        let mut s = Self {
            poles,
            mode,
            detour_radius: MAX_DETOUR_RADIUS,
            quad_tol: DEFAULT_QUAD_TOL,
        };
        if let SpaceMode::CompactSupport { a, b } = mode {
            if s.poles.iter().any(|p| p.position <= a || p.position >= b) {
                return Err(SpaceError::InvalidSpace("poles must lie inside the interval"));
            }
        }
        let sep = s.min_separation();
        if sep <= 0.0 {
            return Err(SpaceError::InvalidSpace("poles must be distinct (modulo the period)"));
        }
        let rho = MAX_DETOUR_RADIUS.min(sep / 4.0).min(s.min_boundary_distance() / 4.0);
        s = s.with_detour_radius(rho)?;
        Ok(s)
    }

    pub fn with_detour_radius(mut self, rho: f64) -> Result<Self, SpaceError> {
        self.check_radius(rho)?;
        self.detour_radius = rho;
        Ok(self)
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Result<Self, SpaceError> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(SpaceError::InvalidSpace("quadrature tolerance must be positive"));
        }
        self.quad_tol = tol;
        Ok(self)
    }

    pub fn poles(&self) -> &[SpacePole] {
        &self.poles
    }

    pub fn mode(&self) -> SpaceMode {
        self.mode
    }

    pub fn detour_radius(&self) -> f64 {
        self.detour_radius
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    fn check_radius(&self, rho: f64) -> Result<(), SpaceError> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(SpaceError::InvalidSpace("detour radius must be positive"));
        }
        if self.min_separation() <= 2.0 * rho {
            return Err(SpaceError::InvalidSpace("poles must be separated by more than 2ρ"));
        }
        if self.min_boundary_distance() <= rho {
            return Err(SpaceError::InvalidSpace("detours must stay inside the interval"));
        }
        Ok(())
    }

    fn period(&self) -> Option<(f64, Complex64)> {
        match self.mode {
            SpaceMode::Bloch { period, kappa } => Some((period, kappa)),
            SpaceMode::CompactSupport { .. } => None,
        }
    }

    fn gap(&self, x: f64, y: f64) -> f64 {
        match self.period() {
            Some((t, _)) => {
                let d = Euclid::rem_euclid(&(x - y), &t);
                d.min(t - d)
            }
            None => (x - y).abs(),
        }
    }

    fn min_separation(&self) -> f64 {
        let mut sep = f64::INFINITY;
        for (i, p) in self.poles.iter().enumerate() {
            for q in &self.poles[..i] {
                sep = sep.min(self.gap(p.position, q.position));
            }
            if let Some((t, _)) = self.period() {
                sep = sep.min(t);
            }
        }
        sep
    }

    fn min_boundary_distance(&self) -> f64 {
        match self.mode {
            SpaceMode::CompactSupport { a, b } => self
                .poles
                .iter()
                .map(|p| (p.position - a).min(b - p.position))
                .fold(f64::INFINITY, f64::min),
            SpaceMode::Bloch { .. } => f64::INFINITY,
        }
    }

    /// Integration window: `[a, b]`, or one period starting in the middle of
    /// the widest gap between poles.
    pub fn domain(&self) -> (f64, f64) {
        match self.mode {
            SpaceMode::CompactSupport { a, b } => (a, b),
            SpaceMode::Bloch { period, .. } => {
                if self.poles.is_empty() {
                    return (0.0, period);
                }
                let mut xs: Vec<f64> = self
                    .poles
                    .iter()
                    .map(|p| Euclid::rem_euclid(&p.position, &period))
                    .collect();
                xs.sort_by(f64::total_cmp);
                let mut best = (xs[0] + period - xs[xs.len() - 1], xs[xs.len() - 1]);
                for w in xs.windows(2) {
                    if w[1] - w[0] > best.0 {
                        best = (w[1] - w[0], w[0]);
                    }
                }
                let lo = best.1 + 0.5 * best.0;
                (lo, lo + period)
            }
        }
    }

    /// `(pole index, position)` of the poles inside [`Self::domain`], sorted.
    pub fn poles_in_domain(&self) -> Vec<(usize, f64)> {
        let (lo, _) = self.domain();
        let mut out: Vec<(usize, f64)> = self
            .poles
            .iter()
            .enumerate()
            .map(|(j, p)| match self.period() {
                Some((t, _)) => (j, lo + Euclid::rem_euclid(&(p.position - lo), &t)),
                None => (j, p.position),
            })
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1));
        out
    }

    /// Envelope width of the atoms attached to pole `j`.
    fn envelope_width(&self, j: usize) -> f64 {
        let x = self.poles[j].position;
        let mut w = MAX_ENVELOPE;
        for (i, q) in self.poles.iter().enumerate() {
            if i != j {
                w = w.min(self.gap(x, q.position) / 3.0);
            }
        }
        if let Some((t, _)) = self.period() {
            w = w.min(t / 3.0);
        }
        if let SpaceMode::CompactSupport { a, b } = self.mode {
            w = w.min((x - a).min(b - x) / 7.0);
        }
        w
    }

    fn pole_positions(&self) -> Vec<f64> {
        self.poles.iter().map(|p| p.position).collect()
    }
}

/// Distance from `z` to the nearest pole or periodic image.
fn pole_distance(positions: &[f64], period: Option<f64>, z: Complex64) -> f64 {
    positions
        .iter()
        .map(|&x| {
            let dx = match period {
                Some(t) => {
                    let d = Euclid::rem_euclid(&(z.re - x), &t);
                    d.min(t - d)
                }
                None => z.re - x,
            };
            dx.hypot(z.im)
        })
        .fold(f64::INFINITY, f64::min)
}

/// `Σ floor((r_j + 1) / 2)` over the poles of one window or period.
pub fn negative_count_formula(s: &SpaceSpec) -> usize {
    s.poles.iter().map(|p| negative_subspace(p.r).dim).sum()
}

/// `Σ (2 r_j + 2)`, at least 8.
pub fn recommended_basis_size(s: &SpaceSpec) -> usize {
    s.poles.iter().map(|p| 2 * p.r as usize + 2).sum::<usize>().max(8)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape {
    Power(i32),
    Wave { freq: f64, phase: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Atom {
    coeff: Complex64,
    center: f64,
    width: f64,
    shape: Shape,
}

impl Atom {
    fn eval(&self, z: Complex64) -> Complex64 {
        let y = z - self.center;
        let q = y / self.width;
        let envelope = (-(q * q)).exp();
        let shape = match self.shape {
            Shape::Power(k) => y.powi(k),
            Shape::Wave { freq, phase } => (y * freq + phase).cos(),
        };
        self.coeff * envelope * shape
    }

    fn second_derivative(&self, z: Complex64) -> Complex64 {
        let y = z - self.center;
        let w2 = self.width * self.width;
        let q = y / self.width;
        let e = (-(q * q)).exp();
        let e1 = -2.0 * y / w2 * e;
        let e2 = (4.0 * y * y / (w2 * w2) - 2.0 / w2) * e;
        let (s0, s1, s2) = match self.shape {
            Shape::Power(k) => {
                let kf = k as f64;
                (y.powi(k), y.powi(k - 1) * kf, y.powi(k - 2) * (kf * (kf - 1.0)))
            }
            Shape::Wave { freq, phase } => {
                let arg = y * freq + phase;
                let (c, s) = (arg.cos(), arg.sin());
                (c, -s * freq, -c * (freq * freq))
            }
        };
        self.coeff * (e2 * s0 + 2.0 * e1 * s1 + e * s2)
    }

    fn periodized(
        &self,
        z: Complex64,
        period: Option<(f64, Complex64)>,
        eval: impl Fn(&Self, Complex64) -> Complex64,
    ) -> Complex64 {
        let Some((t, kappa)) = period else {
            return eval(self, z);
        };
        let reach = TAIL_WIDTHS * self.width;
        let n0 = ((self.center - reach - z.re) / t).ceil() as i64;
        let n1 = ((self.center + reach - z.re) / t).floor() as i64;
        let mut acc = Complex64::zero();
        for n in n0..=n1 {
            acc += kappa.powi(-(n as i32)) * eval(self, z + n as f64 * t);
        }
        acc
    }
}

pub type ElementFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Atoms {
        atoms: Arc<[Atom]>,
        period: Option<(f64, Complex64)>,
    },
    Function(ElementFn),
}

/// A function together with its Laurent windows `[-r_j, r_j]` at the poles
/// of its space, in the order of [`SpaceSpec::poles`].
#[derive(Clone)]
pub struct SpaceElement {
    repr: Repr,
    local: Vec<TruncatedLaurentSeries>,
}

impl fmt::Debug for SpaceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let repr = match &self.repr {
            Repr::Atoms { atoms, .. } => format!("{} atoms", atoms.len()),
            Repr::Function(_) => String::from("function"),
        };
        f.debug_struct("SpaceElement")
            .field("repr", &repr)
            .field("local", &self.local)
            .finish()
    }
}

impl SpaceElement {
    /// Element from an arbitrary function, analytic near each detour circle,
    /// and its windows.
    pub fn from_fn(func: ElementFn, local: Vec<TruncatedLaurentSeries>) -> Self {
        Self {
            repr: Repr::Function(func),
            local,
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        match &self.repr {
            Repr::Atoms { atoms, period } => atoms.iter().map(|a| a.periodized(z, *period, Atom::eval)).sum(),
            Repr::Function(f) => f(z),
        }
    }

    /// `f''(z)`: exact for atom combinations, otherwise an eighth-order
    /// central difference with step `min(h_max, distance to nearest pole / 64)`.
    fn second_derivative(&self, z: Complex64, pole_distance: f64, h_max: f64) -> Complex64 {
        match &self.repr {
            Repr::Atoms { atoms, period } => atoms
                .iter()
                .map(|a| a.periodized(z, *period, Atom::second_derivative))
                .sum(),
            Repr::Function(f) => {
                let h = (pole_distance / 64.0).min(h_max);
                let mut d2 = Complex64::zero();
                for (i, w) in D2.iter().enumerate() {
                    d2 += f(z + (i as f64 - 4.0) * h) * *w;
                }
                d2 / (h * h)
            }
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_complex(Complex64::new(x, 0.0))
    }

    /// `Σ |atom(z)|`, the cancellation-free size used as a noise floor.
    fn magnitude(&self, z: Complex64) -> f64 {
        match &self.repr {
            Repr::Atoms { atoms, period } => atoms.iter().map(|a| a.periodized(z, *period, Atom::eval).norm()).sum(),
            Repr::Function(f) => f(z).norm(),
        }
    }

    pub fn local_data(&self) -> &[TruncatedLaurentSeries] {
        &self.local
    }

    /// `Σ c_i e_i`.
    pub fn combine(terms: &[(Complex64, &SpaceElement)]) -> Result<Self, SpaceError> {
        let Some((_, first)) = terms.first() else {
            return Err(SpaceError::InvalidSpace("empty linear combination"));
        };
        let n = first.local.len();
        if let Some((_, e)) = terms.iter().find(|(_, e)| e.local.len() != n) {
            return Err(SpaceError::MissingLocalData {
                expected: n,
                found: e.local.len(),
            });
        }
        let mut local = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = terms[0].1.local[j].scale(terms[0].0);
            for (c, e) in &terms[1..] {
                acc = acc.add(&e.local[j].scale(*c))?;
            }
            local.push(acc);
        }
        let period = match &first.repr {
            Repr::Atoms { period, .. } => Some(*period),
            Repr::Function(_) => None,
        };
        let all_atoms = period.is_some()
            && terms
                .iter()
                .all(|(_, e)| matches!(&e.repr, Repr::Atoms { period: p, .. } if Some(*p) == period));
        let repr = if all_atoms {
            let atoms: Vec<Atom> = terms
                .iter()
                .flat_map(|(c, e)| match &e.repr {
                    Repr::Atoms { atoms, .. } => atoms
                        .iter()
                        .map(|a| Atom {
                            coeff: a.coeff * c,
                            ..*a
                        })
                        .collect::<Vec<_>>(),
                    Repr::Function(_) => unreachable!("checked above"),
                })
                .collect();
            Repr::Atoms {
                atoms: atoms.into(),
                period: period.flatten(),
            }
        } else {
            let parts: Vec<(Complex64, SpaceElement)> = terms.iter().map(|(c, e)| (*c, (*e).clone())).collect();
            Repr::Function(Arc::new(move |z| {
                parts.iter().map(|(c, e)| c * e.eval_complex(z)).sum()
            }))
        };
        Ok(Self { repr, local })
    }
}

impl SpaceSpec {
    /// Window `[-r_j, r_j]` of `func` at pole `j`, sampled on the detour
    /// circle; forbidden-parity coefficients must be negligible next to the
    /// size of `func` on the circle and are set to zero.
    pub fn local_window(
        &self,
        func: &dyn Fn(Complex64) -> Complex64,
        j: usize,
    ) -> Result<TruncatedLaurentSeries, SpaceError> {
        self.window_with_floor(func, &|z| func(z).norm(), j)
    }

    fn window_with_floor(
        &self,
        func: &dyn Fn(Complex64) -> Complex64,
        magnitude: &dyn Fn(Complex64) -> f64,
        j: usize,
    ) -> Result<TruncatedLaurentSeries, SpaceError> {
        let p = self.poles[j];
        let r = p.r as i32;
        let rho = self.detour_radius;
        let center = Complex64::new(p.position, 0.0);
        let raw = laurent_by_cauchy(func, center, rho, -r, r, CIRCLE_SAMPLES)?;
        let floor = (0..16)
            .map(|m| magnitude(center + Complex64::from_polar(rho, TAU * m as f64 / 16.0)))
            .fold(0.0, f64::max);
        clean_window(raw, p.r, rho, floor, j)
    }

    /// Element from a function that is analytic in a punctured neighbourhood
    /// of every pole; windows are extracted numerically.
    pub fn element_from_fn(&self, func: ElementFn) -> Result<SpaceElement, SpaceError> {
        let local = (0..self.poles.len())
            .map(|j| self.local_window(&*func, j))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SpaceElement::from_fn(func, local))
    }

    fn atoms_element(&self, atoms: Vec<Atom>) -> SpaceElement {
        SpaceElement {
            repr: Repr::Atoms {
                atoms: atoms.into(),
                period: self.period(),
            },
            local: Vec::new(),
        }
    }

    /// Subtracts Gaussian-windowed monomials of forbidden parity so that every
    /// window becomes admissible, then records the windows.
    fn admissible(&self, raw: Vec<Atom>) -> Result<SpaceElement, SpaceError> {
        let rho = self.detour_radius;
        let mut rows: Vec<(usize, i32)> = Vec::new();
        for (j, p) in self.poles.iter().enumerate() {
            for d in 0..=p.r as i32 {
                if (d + p.r as i32) % 2 != 0 {
                    rows.push((j, d));
                }
            }
        }
        let mut atoms = raw;
        if !rows.is_empty() {
            let corrections: Vec<Atom> = rows
                .iter()
                .map(|&(j, d)| Atom {
                    coeff: Complex64::new(1.0, 0.0),
                    center: self.poles[j].position,
                    width: self.envelope_width(j),
                    shape: Shape::Power(d),
                })
                .collect();
            let taylor = |e: &SpaceElement| -> Result<Vec<Complex64>, SpaceError> {
                let mut out = Vec::with_capacity(rows.len());
                for (j, p) in self.poles.iter().enumerate() {
                    let series = laurent_by_cauchy(
                        |z| e.eval_complex(z),
                        Complex64::new(p.position, 0.0),
                        rho,
                        0,
                        p.r as i32,
                        CIRCLE_SAMPLES,
                    )?;
                    for &(_, d) in rows.iter().filter(|(i, _)| *i == j) {
                        out.push(series.coeff_or_zero(d));
                    }
                }
                Ok(out)
            };
            let n = rows.len();
            let rhs = taylor(&self.atoms_element(atoms.clone()))?;
            let mut a = vec![Complex64::zero(); n * n];
            for (col, atom) in corrections.iter().enumerate() {
                let column = taylor(&self.atoms_element(vec![*atom]))?;
                for (row, v) in column.into_iter().enumerate() {
                    a[row * n + col] = v;
                }
            }
            let c = solve_complex(&a, &rhs, n).ok_or(SpaceError::InvalidSpace("singular correction system"))?;
            atoms.extend(corrections.iter().zip(c).map(|(atom, ci)| Atom { coeff: -ci, ..*atom }));
        }
        let mut e = self.atoms_element(atoms);
        let mut local = Vec::with_capacity(self.poles.len());
        for j in 0..self.poles.len() {
            local.push(self.window_with_floor(&|z| e.eval_complex(z), &|z| e.magnitude(z), j)?);
        }
        e.local = local;
        Ok(e)
    }

    /// `y^k e^{-y²/w²}` at pole `j` (periodized in Bloch mode), with
    /// `k ≥ -r_j` of the window's parity, made admissible at the other poles.
    pub fn windowed_monomial(&self, j: usize, k: i32) -> Result<SpaceElement, SpaceError> {
        let p = *self
            .poles
            .get(j)
            .ok_or(SpaceError::InvalidSpace("pole index out of range"))?;
        let r = p.r as i32;
        if k < -r || (k + r) % 2 != 0 {
            return Err(SpaceError::InvalidSpace("exponent outside the admissible window"));
        }
        self.admissible(vec![Atom {
            coeff: Complex64::new(1.0, 0.0),
            center: p.position,
            width: self.envelope_width(j),
            shape: Shape::Power(k),
        }])
    }

    /// `e^{-(x-c)²/w²} cos(ν(x - c) + φ)`, made admissible.
    pub fn bump(&self, center: f64, width: f64, freq: f64, phase: f64) -> Result<SpaceElement, SpaceError> {
        if !(center.is_finite() && width.is_finite() && width > 0.0 && freq.is_finite() && phase.is_finite()) {
            return Err(SpaceError::InvalidSpace(
                "bump parameters must be finite with positive width",
            ));
        }
        self.admissible(vec![Atom {
            coeff: Complex64::new(1.0, 0.0),
            center,
            width,
            shape: Shape::Wave { freq, phase },
        }])
    }

    fn random_bump(&self, rng: &mut impl Rng) -> Result<SpaceElement, SpaceError> {
        let (lo, hi) = self.domain();
        let len = hi - lo;
        let (center, width) = match self.mode {
            SpaceMode::CompactSupport { .. } => (
                lo + len * (0.25 + 0.5 * rng.random::<f64>()),
                len / 28.0 * (0.6 + 0.4 * rng.random::<f64>()),
            ),
            SpaceMode::Bloch { .. } => (
                lo + len * rng.random::<f64>(),
                len * (0.06 + 0.09 * rng.random::<f64>()),
            ),
        };
        let freq = 3.0 / width * rng.random::<f64>();
        let phase = TAU * rng.random::<f64>();
        self.bump(center, width, freq, phase)
    }

    /// Gram family: the pure singular windows of every pole, `r_j + 1`
    /// centered bumps of alternating parity per pole, then seeded random
    /// bumps.
    pub fn gram_basis(&self, size: usize, seed: u64) -> Result<Vec<SpaceElement>, SpaceError> {
        let mut out = Vec::with_capacity(size);
        for (j, p) in self.poles.iter().enumerate() {
            for k in negative_subspace(p.r).exponents {
                out.push(self.windowed_monomial(j, k)?);
            }
        }
        for (j, p) in self.poles.iter().enumerate() {
            let w = self.envelope_width(j);
            for i in 0..=p.r {
                let fi = i as f64;
                out.push(self.bump(
                    p.position,
                    w * (1.0 - 0.15 * fi),
                    (1.5 + fi) / w,
                    0.5 * core::f64::consts::PI * fi,
                )?);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while out.len() < size {
            out.push(self.random_bump(&mut rng)?);
        }
        out.truncate(size);
        Ok(out)
    }

    /// Random real combination of every admissible windowed monomial with
    /// `|k| ≤ r_j` and three random bumps; coefficients uniform in `[-1, 1]`.
    pub fn random_admissible(&self, rng: &mut impl Rng) -> Result<SpaceElement, SpaceError> {
        let mut parts = Vec::new();
        for (j, p) in self.poles.iter().enumerate() {
            let r = p.r as i32;
            for k in (-r..=r).step_by(2) {
                parts.push(self.windowed_monomial(j, k)?);
            }
        }
        for _ in 0..3 {
            parts.push(self.random_bump(rng)?);
        }
        let coeffs: Vec<Complex64> = parts
            .iter()
            .map(|_| Complex64::new(2.0 * rng.random::<f64>() - 1.0, 0.0))
            .collect();
        let terms: Vec<(Complex64, &SpaceElement)> = coeffs.into_iter().zip(parts.iter()).collect();
        SpaceElement::combine(&terms)
    }
}

/// Zeroes forbidden-parity coefficients after checking they are negligible
/// on the circle of the given radius, relative to the largest term or to
/// `floor`, whichever is bigger.
fn clean_window(
    mut w: TruncatedLaurentSeries,
    r: u32,
    radius: f64,
    floor: f64,
    pole: usize,
) -> Result<TruncatedLaurentSeries, SpaceError> {
    let r = r as i32;
    let size = |k: i32, c: Complex64| c.norm() * radius.powi(k);
    let scale = (w.min_degree()..=w.max_degree())
        .map(|k| size(k, w.coeff_or_zero(k)))
        .fold(floor, f64::max);
    for k in w.min_degree()..=w.max_degree() {
        if (k + r) % 2 != 0 {
            let c = w.coeff_or_zero(k);
            if size(k, c) > PARITY_TOL * scale {
                return Err(SpaceError::MembershipViolation(format!(
                    "pole {pole}: coefficient {c} at degree {k} has forbidden parity"
                )));
            }
            w.set_coeff(k, Complex64::zero());
        }
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    CenterMismatch { pole: usize },
    WindowTooShort { pole: usize, max_degree: i32 },
    ForbiddenCoefficient { pole: usize, degree: i32, value: Complex64 },
    QuasiPeriodicity { x: f64, defect: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CenterMismatch { pole } => write!(f, "window {pole} is not centered at its pole"),
            Violation::WindowTooShort { pole, max_degree } => {
                write!(f, "window {pole} stops at degree {max_degree}")
            }
            Violation::ForbiddenCoefficient { pole, degree, value } => {
                write!(f, "pole {pole}: forbidden coefficient {value} at degree {degree}")
            }
            Violation::QuasiPeriodicity { x, defect } => {
                write!(f, "f(x + T) - κ f(x) = {defect:e} at x = {x}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub violations: Vec<Violation>,
}

pub fn check_membership(f: &SpaceElement, s: &SpaceSpec) -> Result<Membership, SpaceError> {
    if f.local.len() != s.poles.len() {
        return Err(SpaceError::MissingLocalData {
            expected: s.poles.len(),
            found: f.local.len(),
        });
    }
    let rho = s.detour_radius;
    let mut violations = Vec::new();
    for (j, (w, p)) in f.local.iter().zip(&s.poles).enumerate() {
        let r = p.r as i32;
        if (w.center() - Complex64::new(p.position, 0.0)).norm() > crate::laurent::CENTER_TOL {
            violations.push(Violation::CenterMismatch { pole: j });
            continue;
        }
        if w.max_degree() < r - 1 {
            violations.push(Violation::WindowTooShort {
                pole: j,
                max_degree: w.max_degree(),
            });
        }
        let scale = (w.min_degree()..=w.max_degree())
            .map(|k| w.coeff_or_zero(k).norm() * rho.powi(k))
            .fold(0.0, f64::max);
        for k in w.min_degree()..=w.max_degree().min(r) {
            let c = w.coeff_or_zero(k);
            let forbidden = k < -r || (k + r) % 2 != 0;
            if forbidden && c.norm() * rho.powi(k) > PARITY_TOL * scale {
                violations.push(Violation::ForbiddenCoefficient {
                    pole: j,
                    degree: k,
                    value: c,
                });
            }
        }
    }
    if let Some((t, kappa)) = s.period() {
        let (lo, _) = s.domain();
        let positions = s.pole_positions();
        let samples: Vec<f64> = (0..8)
            .map(|m| lo + t * (m as f64 + 0.37) / 8.0)
            .filter(|&x| pole_distance(&positions, Some(t), Complex64::new(x, 0.0)) > 2.0 * rho)
            .collect();
        let values: Vec<(f64, Complex64, Complex64)> = samples.iter().map(|&x| (x, f.eval(x), f.eval(x + t))).collect();
        let scale = (0..64)
            .map(|m| lo + t * (m as f64 + 0.5) / 64.0)
            .filter(|&x| pole_distance(&positions, Some(t), Complex64::new(x, 0.0)) > 2.0 * rho)
            .map(|x| f.magnitude(Complex64::new(x, 0.0)))
            .fold(1e-300, f64::max);
        for (x, v0, v1) in values {
            let defect = (v1 - kappa * v0).norm();
            if defect > 1e-8 * scale {
                violations.push(Violation::QuasiPeriodicity { x, defect });
            }
        }
    }
    Ok(Membership {
        member: violations.is_empty(),
        violations,
    })
}

/// Residue of the product of the windows of `f` and `conj(g(conj ·))`.
pub fn pair_residue(f: &SpaceElement, g: &SpaceElement, pole: usize) -> Result<Complex64, SpaceError> {
    let missing = |e: &SpaceElement| SpaceError::MissingLocalData {
        expected: pole + 1,
        found: e.local.len(),
    };
    let a = f.local.get(pole).ok_or_else(|| missing(f))?;
    let b = g.local.get(pole).ok_or_else(|| missing(g))?;
    Ok(a.mul(&b.conj_coeffs())?.residue())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerProductOptions {
    pub orientation: Orientation,
    /// Overrides the space's detour radius.
    pub detour_radius: Option<f64>,
}

impl Default for InnerProductOptions {
    fn default() -> Self {
        Self {
            orientation: Orientation::Upper,
            detour_radius: None,
        }
    }
}

fn require_member(f: &SpaceElement, s: &SpaceSpec) -> Result<(), SpaceError> {
    let m = check_membership(f, s)?;
    match m.violations.first() {
        None => Ok(()),
        Some(v) => Err(SpaceError::MembershipViolation(format!("{v}"))),
    }
}

fn quad_options(s: &SpaceSpec) -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-2 * s.quad_tol,
        max_intervals: 4000,
        relative_to_magnitude: true,
    }
}

/// Integrates over `[a, b]`, aiming at `1e-2·tol` relative to `∫|h|` and
/// accepting anything within `tol`.
fn integrate_segment(h: impl FnMut(f64) -> Complex64, a: f64, b: f64, s: &SpaceSpec) -> Result<Complex64, SpaceError> {
    let res = integrate(h, a, b, &quad_options(s));
    let acceptable = res.converged || res.error <= s.quad_tol * res.magnitude.max(1e-300);
    if !acceptable || !res.value.is_finite() {
        return Err(SpaceError::QuadratureFailure {
            tol: s.quad_tol,
            estimate: res.error / res.magnitude.max(1e-300),
        });
    }
    Ok(res.value)
}

/// Real-line pieces of the domain outside the detour disks.
fn segments(s: &SpaceSpec, rho: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = s.domain();
    let mut out = Vec::new();
    let mut a = lo;
    for (_, x) in s.poles_in_domain() {
        out.push((a, x - rho));
        a = x + rho;
    }
    out.push((a, hi));
    out
}

/// `⟨f, g⟩` with the upper detour and the space's radius.
pub fn inner_product(f: &SpaceElement, g: &SpaceElement, s: &SpaceSpec) -> Result<Complex64, SpaceError> {
    inner_product_with(f, g, s, &InnerProductOptions::default())
}

pub fn inner_product_with(
    f: &SpaceElement,
    g: &SpaceElement,
    s: &SpaceSpec,
    opts: &InnerProductOptions,
) -> Result<Complex64, SpaceError> {
    require_member(f, s)?;
    require_member(g, s)?;
    let rho = opts.detour_radius.unwrap_or(s.detour_radius);
    s.check_radius(rho)?;
    let mut total = Complex64::zero();
    for (a, b) in segments(s, rho) {
        total += integrate_segment(|x| f.eval(x) * g.eval(x).conj(), a, b, s)?;
    }
    for (j, x) in s.poles_in_domain() {
        let r = s.poles[j].r as i32;
        let mut series = laurent_by_cauchy(
            |z| f.eval_complex(z) * g.eval_complex(z.conj()).conj(),
            Complex64::new(x, 0.0),
            rho,
            -2 * r - 2,
            SERIES_DEGREE,
            CIRCLE_SAMPLES,
        )?;
        series.set_coeff(-1, pair_residue(f, g, j)?);
        total += series.semicircle_integral(rho, opts.orientation);
    }
    Ok(total)
}

/// `(∫ |f|²)^{1/2}` over the domain outside the detour disks.
pub fn detour_norm(f: &SpaceElement, s: &SpaceSpec) -> Result<f64, SpaceError> {
    let mut total = 0.0;
    for (a, b) in segments(s, s.detour_radius) {
        total += integrate_segment(|x| Complex64::new(f.eval(x).norm_sqr(), 0.0), a, b, s)?.re;
    }
    Ok(total.sqrt())
}

/// Row-major Gram matrix `G_ij = ⟨e_i, e_j⟩`, Hermitian by construction.
pub fn gram_matrix(basis: &[SpaceElement], s: &SpaceSpec) -> Result<Vec<Complex64>, SpaceError> {
    let n = basis.len();
    let mut g = vec![Complex64::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let v = inner_product(&basis[i], &basis[j], s)?;
            g[i * n + j] = v;
            g[j * n + i] = v.conj();
        }
        g[i * n + i].im = 0.0;
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramSignature {
    pub size: usize,
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
    /// Eigenvalues of the diagonally rescaled Gram matrix, ascending.
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
}

/// Inertia of a Gram matrix after the congruence `D G D` with
/// `D = diag(|G_ii|^{-1/2})`.
pub fn signature_of(gram: &[Complex64], n: usize) -> GramSignature {
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let v = gram[i * n + i].norm();
            if v > 0.0 {
                1.0 / v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let scaled: Vec<Complex64> = (0..n * n).map(|k| gram[k] * d[k / n] * d[k % n]).collect();
    let eigenvalues = hermitian_eigenvalues(&scaled, n);
    let radius = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let threshold = EIGEN_REL_THRESHOLD * radius;
    let (negative, zero, positive) = inertia(&eigenvalues, threshold);
    GramSignature {
        size: n,
        negative,
        zero,
        positive,
        eigenvalues,
        threshold,
    }
}

pub fn gram_signature(s: &SpaceSpec, basis_size: usize, seed: u64) -> Result<GramSignature, SpaceError> {
    let basis = s.gram_basis(basis_size, seed)?;
    let g = gram_matrix(&basis, s)?;
    Ok(signature_of(&g, basis.len()))
}

/// Number of negative eigenvalues of the Gram matrix of [`SpaceSpec::gram_basis`].
pub fn negative_count_gram(s: &SpaceSpec, basis_size: usize, seed: u64) -> Result<usize, SpaceError> {
    Ok(gram_signature(s, basis_size, seed)?.negative)
}

/// Poles of `p` inside `[lo, hi]`.
fn potential_poles(p: &PotentialSpec, lo: f64, hi: f64) -> Result<Vec<f64>, SpaceError> {
    Ok(match p.kind() {
        PotentialKind::RationalSingular { poles, .. } => poles
            .iter()
            .filter(|q| q.r > 0 && q.position >= lo && q.position <= hi)
            .map(|q| q.position)
            .collect(),
        PotentialKind::SolitonTau { .. } => find_real_poles(p, (lo, hi))?.into_iter().map(|q| q.position).collect(),
        PotentialKind::Elliptic { omega1, n, shift, .. } => {
            if *n == 0 {
                Vec::new()
            } else {
                let t = 2.0 * omega1;
                let m0 = ((lo - shift) / t).ceil() as i64;
                let m1 = ((hi - shift) / t).floor() as i64;
                (m0..=m1).map(|m| shift + m as f64 * t).collect()
            }
        }
    })
}

/// Checks that the poles of `p` and of `s` coincide with matching types and
/// certifies `p` at every pole.
pub fn certify_potential(p: &PotentialSpec, s: &SpaceSpec) -> Result<Vec<SMeroCertificate>, SpaceError> {
    let (lo, hi) = s.domain();
    for x in potential_poles(p, lo, hi)? {
        if !s.poles.iter().any(|q| s.gap(q.position, x) < 1e-9) {
            return Err(SpaceError::PotentialSpaceMismatch {
                position: x,
                reason: "potential pole missing from the space",
            });
        }
    }
    let alphas = default_alpha_samples();
    let mut out = Vec::with_capacity(s.poles.len());
    for (j, q) in s.poles.iter().enumerate() {
        let op = match local_expansion(p, Complex64::new(q.position, 0.0), 2 * q.r as i32 + 4) {
            Ok(op) => op,
            Err(PotentialError::NotAPole { .. }) if q.r == 0 => continue,
            Err(PotentialError::NotAPole { .. }) => {
                return Err(SpaceError::PotentialSpaceMismatch {
                    position: q.position,
                    reason: "potential is regular at a pole of the space",
                })
            }
            Err(e) => return Err(e.into()),
        };
        if op.detected_r() != Some(q.r) {
            return Err(SpaceError::PotentialSpaceMismatch {
                position: q.position,
                reason: "pole type of the potential differs from the space",
            });
        }
        let cert = is_s_meromorphic_at_pole(&op, &alphas).map_err(PotentialError::from)?;
        if !cert.verdict {
            return Err(SpaceError::NonSMeromorphicPotential { pole_index: j });
        }
        out.push(cert);
    }
    Ok(out)
}

/// `L f = -f'' + u f`; the windows come from the Laurent series of `u` and `f`.
pub fn apply_operator(p: &PotentialSpec, f: &SpaceElement, s: &SpaceSpec) -> Result<SpaceElement, SpaceError> {
    certify_potential(p, s)?;
    require_member(f, s)?;
    let rho = s.detour_radius;
    let mut local = Vec::with_capacity(s.poles.len());
    for (j, q) in s.poles.iter().enumerate() {
        let r = q.r as i32;
        let center = Complex64::new(q.position, 0.0);
        let mut fs = laurent_by_cauchy(|z| f.eval_complex(z), center, rho, -r, r + 2, CIRCLE_SAMPLES)?;
        for k in -r..=r {
            fs.set_coeff(k, f.local[j].coeff_or_zero(k));
        }
        let u = match local_expansion(p, center, 2 * r + 2) {
            Ok(op) => {
                let u = op.u_coeffs();
                TruncatedLaurentSeries::new(center, u.min_degree(), u.coeffs().to_vec())?
            }
            Err(PotentialError::NotAPole { .. }) => laurent_by_cauchy(
                |z| evaluate(p, z).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                center,
                rho,
                0,
                2 * r + 2,
                CIRCLE_SAMPLES,
            )?,
            Err(e) => return Err(e.into()),
        };
        let lf = u.mul(&fs)?.sub(&fs.differentiate().differentiate())?;
        let scale = (-r..=r)
            .map(|k| lf.coeff_or_zero(k).norm() * rho.powi(k))
            .fold(0.0, f64::max);
        for k in lf.min_degree()..-r {
            if lf.coeff_or_zero(k).norm() * rho.powi(k) > PARITY_TOL * scale.max(1e-300) {
                return Err(SpaceError::MembershipViolation(format!(
                    "pole {j}: L f has a term of degree {k} below the window"
                )));
            }
        }
        local.push(clean_window(lf.window(-r, r)?, q.r, rho, 0.0, j)?);
    }
    let f = f.clone();
    let p = p.clone();
    let positions = s.pole_positions();
    let period = s.period().map(|(t, _)| t);
    let func: ElementFn = Arc::new(move |z| {
        let d2 = f.second_derivative(z, pole_distance(&positions, period, z), 1e-2);
        let u = evaluate(&p, z).unwrap_or(Complex64::new(f64::NAN, 0.0));
        u * f.eval_complex(z) - d2
    });
    Ok(SpaceElement::from_fn(func, local))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryDefect {
    /// `|⟨Lf, g⟩ - ⟨f, Lg⟩|`.
    pub defect: f64,
    /// `‖f‖ · ‖g‖` with [`detour_norm`].
    pub scale: f64,
    pub relative: f64,
}

pub fn symmetry_defect(
    p: &PotentialSpec,
    f: &SpaceElement,
    g: &SpaceElement,
    s: &SpaceSpec,
) -> Result<SymmetryDefect, SpaceError> {
    let lf = apply_operator(p, f, s)?;
    let lg = apply_operator(p, g, s)?;
    let a = inner_product(&lf, g, s)?;
    let b = inner_product(f, &lg, s)?;
    let defect = (a - b).norm();
    let scale = detour_norm(f, s)? * detour_norm(g, s)?;
    Ok(SymmetryDefect {
        defect,
        scale,
        relative: defect / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::RationalPole;

    fn one_pole(r: u32) -> SpaceSpec {
        SpaceSpec::new(
            vec![SpacePole { position: 0.0, r }],
            SpaceMode::CompactSupport { a: -4.0, b: 4.0 },
        )
        .unwrap()
    }

    fn with_window(s: &SpaceSpec, coeffs: &[(i32, f64)], r: u32) -> SpaceElement {
        let base = s.bump(0.0, 0.5, 0.0, 0.0).unwrap();
        let mut w = TruncatedLaurentSeries::zero(Complex64::zero(), -(r as i32), r as i32).unwrap();
        for &(k, c) in coeffs {
            w.set_coeff(k, Complex64::new(c, 0.0));
        }
        SpaceElement {
            repr: base.repr,
            local: vec![w],
        }
    }

    #[test]
    fn membership_follows_the_parity_window() {
        let s = one_pole(1);
        assert!(
            check_membership(&with_window(&s, &[(-1, 1.0), (1, 2.0)], 1), &s)
                .unwrap()
                .member
        );
        let bad = check_membership(&with_window(&s, &[(-1, 1.0), (0, 1.0)], 1), &s).unwrap();
        assert!(!bad.member);
        assert!(matches!(
            bad.violations[0],
            Violation::ForbiddenCoefficient { degree: 0, .. }
        ));
        let free = SpaceSpec::new(vec![], SpaceMode::CompactSupport { a: -1.0, b: 1.0 }).unwrap();
        assert!(
            check_membership(&free.bump(0.0, 0.1, 0.0, 0.0).unwrap(), &free)
                .unwrap()
                .member
        );
        let missing = SpaceElement::from_fn(Arc::new(|_| Complex64::zero()), vec![]);
        assert!(matches!(
            check_membership(&missing, &s),
            Err(SpaceError::MissingLocalData { .. })
        ));
    }

    #[test]
    fn pair_residues() {
        let s = one_pole(1);
        let f = s.windowed_monomial(0, -1).unwrap();
        let g = s.bump(0.3, 0.4, 2.0, 0.5).unwrap();
        assert_eq!(pair_residue(&f, &g, 0).unwrap(), Complex64::zero());
        let forbidden = with_window(&s, &[(-1, 1.0), (0, 1.0)], 1);
        assert!((pair_residue(&forbidden, &forbidden, 0).unwrap() - 2.0).norm() < 1e-15);
        let s2 = one_pole(2);
        let w = with_window(&s2, &[(-2, 1.0)], 2);
        assert_eq!(pair_residue(&w, &w, 0).unwrap(), Complex64::zero());
    }

    #[test]
    fn admissible_windows_are_exact() {
        let s = one_pole(3);
        let g = s.bump(0.2, 0.3, 4.0, 1.0).unwrap();
        let w = &g.local_data()[0];
        for k in [-2, 0, 2] {
            assert_eq!(w.coeff_or_zero(k), Complex64::zero());
        }
        for k in [-3, -1] {
            assert!(w.coeff_or_zero(k).norm() < 1e-15);
        }
        let direct = laurent_by_cauchy(|z| g.eval_complex(z), Complex64::zero(), 0.02, 0, 3, 64).unwrap();
        assert!(direct.coeff_or_zero(0).norm() < 1e-10);
        assert!(direct.coeff_or_zero(2).norm() < 1e-8);
        assert!((direct.coeff_or_zero(1) - w.coeff_or_zero(1)).norm() < 1e-9);
    }

    #[test]
    fn formula_counts() {
        let mk = |rs: &[u32]| {
            let poles = rs
                .iter()
                .enumerate()
                .map(|(i, &r)| SpacePole { position: i as f64, r })
                .collect();
            SpaceSpec::new(poles, SpaceMode::CompactSupport { a: -3.0, b: 5.0 }).unwrap()
        };
        assert_eq!(negative_count_formula(&mk(&[1])), 1);
        assert_eq!(negative_count_formula(&mk(&[2])), 1);
        assert_eq!(negative_count_formula(&mk(&[1, 3])), 3);
    }

    #[test]
    fn pole_free_bump_has_positive_norm() {
        let s = SpaceSpec::new(vec![], SpaceMode::CompactSupport { a: -2.0, b: 2.0 }).unwrap();
        let f = s.bump(0.0, 0.3, 0.0, 0.0).unwrap();
        let v = inner_product(&f, &f, &s).unwrap();
        let exact = 0.3 * (core::f64::consts::PI / 2.0).sqrt();
        assert!((v.re - exact).abs() < 1e-12 && v.im.abs() < 1e-15);
    }

    #[test]
    fn finite_part_of_a_windowed_pole() {
        // ∫ y^{-2} e^{-2y²/w²} = Γ(-1/2) (2/w²)^{1/2} = -2√π √2 / w.
        let s = one_pole(1);
        let f = s.windowed_monomial(0, -1).unwrap();
        let w = s.envelope_width(0);
        let v = inner_product(&f, &f, &s).unwrap();
        let exact = -2.0 * core::f64::consts::PI.sqrt() * 2.0f64.sqrt() / w;
        assert!((v.re - exact).abs() < 1e-9 * exact.abs(), "{v} vs {exact}");
    }

    #[test]
    fn detour_orientation_and_radius() {
        let s = one_pole(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = s.random_admissible(&mut rng).unwrap();
        let g = s.random_admissible(&mut rng).unwrap();
        let up = inner_product(&f, &g, &s).unwrap();
        let down = inner_product_with(
            &f,
            &g,
            &s,
            &InnerProductOptions {
                orientation: Orientation::Lower,
                detour_radius: None,
            },
        )
        .unwrap();
        assert_eq!(up, down);
        let half = inner_product_with(
            &f,
            &g,
            &s,
            &InnerProductOptions {
                orientation: Orientation::Upper,
                detour_radius: Some(s.detour_radius() / 2.0),
            },
        )
        .unwrap();
        assert!((up - half).norm() < 1e-8 * up.norm().max(1.0), "{up} vs {half}");
    }

    #[test]
    fn gram_counts() {
        assert_eq!(negative_count_gram(&one_pole(1), 12, 7).unwrap(), 1);
        assert_eq!(negative_count_gram(&one_pole(3), 16, 7).unwrap(), 2);
        let free = SpaceSpec::new(vec![], SpaceMode::CompactSupport { a: -2.0, b: 2.0 }).unwrap();
        assert_eq!(negative_count_gram(&free, 8, 7).unwrap(), 0);
    }

    #[test]
    fn symmetry_for_an_s_meromorphic_potential() {
        let s = one_pole(1);
        let p = PotentialSpec::rational(vec![RationalPole { position: 0.0, r: 1 }], vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = s.random_admissible(&mut rng).unwrap();
        let g = s.random_admissible(&mut rng).unwrap();
        let d = symmetry_defect(&p, &f, &g, &s).unwrap();
        assert!(d.relative < 1e-7, "{d:?}");
    }

    #[test]
    fn non_s_meromorphic_potential_is_rejected() {
        let s = one_pole(1);
        let p = PotentialSpec::rational(vec![RationalPole { position: 0.0, r: 1 }], vec![0.0, 1.0]).unwrap();
        let f = s.windowed_monomial(0, -1).unwrap();
        assert!(matches!(
            symmetry_defect(&p, &f, &f, &s),
            Err(SpaceError::NonSMeromorphicPotential { pole_index: 0 })
        ));
    }
}
