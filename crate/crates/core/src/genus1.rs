//! The Lamé operator `-∂² + 2℘(x)` on a lattice with real period `T = 2ω₁`.
//!
//! The Bloch solution is
//! `ψ(a, x) = σ(a - x) / (σ(a) σ(x)) · e^{ζ(a) x}` with eigenvalue
//! `α = -℘(a)` and multiplier `ψ(a, x + T) = e^{i p(a) T} ψ(a, x)`, where
//! `p(a) = -i (ζ(a) - η₁ a / ω₁)`. The canonical contour is the level set
//! `Im p = 0` on the torus `ℂ / Λ`; its image under `α` is the spectrum.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Genus1Error;
use crate::linalg::{hermitian_eigenvalues, inertia};
use crate::space::{detour_norm, inner_product, SpaceElement, SpaceMode, SpacePole, SpaceSpec};
use crate::weierstrass::WeierstrassData;
use crate::I;

/// Smallest accepted contour grid.
pub const MIN_RESOLUTION: usize = 64;
/// Grid used by [`bloch_norm_signs`].
pub const DEFAULT_RESOLUTION: usize = 128;
/// Contour points satisfy `|Im p| < CONTOUR_TOL`.
pub const CONTOUR_TOL: f64 = 1e-8;
/// A spectral component is real when `max |Im α|` stays below this.
pub const REAL_SPECTRUM_TOL: f64 = 1e-6;
/// Tolerance of the convention self-check.
pub const CONVENTION_TOL: f64 = 1e-8;
/// Norms below this fraction of `‖ψ‖²` are treated as noise.
pub const NORM_NOISE_REL: f64 = 1e-6;

/// Bloch solution and eigenvalue at spectral parameter `a`.
pub fn lame_bloch(a: Complex64, x: Complex64, data: &WeierstrassData) -> Result<(Complex64, Complex64), Genus1Error> {
    let alpha = -data.wp(a)?;
    let za = data.zeta(a)?;
    // ψ''/ψ = L' + L² with L = ψ'/ψ; the addition theorem reduces
    // -ψ''/ψ + 2℘(x) to -℘(a).
    let log_d = za - data.zeta(a - x)? - data.zeta(x)?;
    let log_dd = data.wp(x)? - data.wp(a - x)?;
    let calibrated = -(log_dd + log_d * log_d) + 2.0 * data.wp(x)?;
    let defect = (calibrated - alpha).norm();
    if defect > CONVENTION_TOL * (1.0 + alpha.norm() + data.wp(x)?.norm()) {
        return Err(Genus1Error::ConventionMismatch { defect });
    }
    Ok((bloch_value(a, x, data), alpha))
}

/// `ψ(a, x)` without the eigenvalue check.
fn bloch_value(a: Complex64, x: Complex64, data: &WeierstrassData) -> Complex64 {
    let za = data.zeta(a).unwrap_or(Complex64::new(f64::NAN, 0.0));
    data.sigma(a - x) / (data.sigma(a) * data.sigma(x)) * (za * x).exp()
}

fn p_of(a: Complex64, data: &WeierstrassData) -> Result<Complex64, Genus1Error> {
    Ok(-I * (data.zeta(a)? - data.eta1() * a / data.omega1()))
}

fn p_prime(a: Complex64, data: &WeierstrassData) -> Result<Complex64, Genus1Error> {
    Ok(I * (data.wp(a)? + data.eta1() / data.omega1()))
}

/// Quasimomentum `p(a)`, checked against the multiplier of `ψ`.
pub fn quasimomentum(a: Complex64, data: &WeierstrassData) -> Result<Complex64, Genus1Error> {
    let p = p_of(a, data)?;
    let x = Complex64::new(0.37 * data.omega1(), 0.11 * data.omega2().im);
    let t = data.period();
    let ratio = bloch_value(a, x + t, data) / bloch_value(a, x, data);
    let expected = (I * p * t).exp();
    let defect = (ratio - expected).norm() / expected.norm().max(1e-300);
    if defect.is_nan() || defect > CONVENTION_TOL {
        return Err(Genus1Error::ConventionMismatch { defect });
    }
    Ok(p)
}

/// Runs the convention checks at a few fixed parameters.
pub fn check_conventions(data: &WeierstrassData) -> Result<(), Genus1Error> {
    for (s, t) in [(0.21, 0.13), (-0.34, 0.27), (0.05, -0.41)] {
        let a = data.from_lattice_coords(s, t);
        quasimomentum(a, data)?;
        lame_bloch(a, Complex64::new(0.3 * data.omega1(), 0.05), data)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasimomentumSample {
    pub a: Complex64,
    pub alpha: Complex64,
    pub p: Complex64,
    pub kappa: Complex64,
}

impl QuasimomentumSample {
    fn at(a: Complex64, data: &WeierstrassData) -> Result<Self, Genus1Error> {
        let p = p_of(a, data)?;
        Ok(Self {
            a,
            alpha: -data.wp(a)?,
            p,
            kappa: (I * p * data.period()).exp(),
        })
    }
}

/// Polyline on the torus, in continuation order.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourComponent {
    pub samples: Vec<QuasimomentumSample>,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalContour {
    pub resolution: usize,
    pub components: Vec<ContourComponent>,
}

impl CanonicalContour {
    pub fn point_count(&self) -> usize {
        self.components.iter().map(|c| c.samples.len()).sum()
    }
}

/// Cell diagonal of the grid, the largest step between contour neighbours.
fn cell_diameter(data: &WeierstrassData, resolution: usize) -> f64 {
    let (w1, w2) = (Complex64::new(data.omega1(), 0.0), data.omega2());
    2.0 * (w1 + w2).norm().max((w1 - w2).norm()) / resolution as f64
}

/// Traces `Im p = 0` by marching squares on a periodic grid in lattice
/// coordinates, refining each crossing by bisection.
pub fn canonical_contour(data: &WeierstrassData, resolution: usize) -> Result<CanonicalContour, Genus1Error> {
    if resolution < MIN_RESOLUTION {
        return Err(Genus1Error::ResolutionTooLow { resolution });
    }
    check_conventions(data)?;
    let n = resolution;
    let h = 1.0 / n as f64;
    let coord = |i: usize| (i as f64 + 0.5) * h - 0.5;
    let node = |i: usize, j: usize| data.from_lattice_coords(coord(i), coord(j));
    let im_p = |a: Complex64| p_of(a, data).map(|p| p.im);

    let mut grid = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            grid[j * n + i] = im_p(node(i, j))?;
        }
    }
    let positive = |i: usize, j: usize| grid[(j % n) * n + (i % n)] > 0.0;

    // Edge ids: 2·(j·n + i) is horizontal from node (i, j), +1 vertical.
    let edge_count = 2 * n * n;
    let mut crossing = vec![false; edge_count];
    for j in 0..n {
        for i in 0..n {
            crossing[2 * (j * n + i)] = positive(i, j) != positive(i + 1, j);
            crossing[2 * (j * n + i) + 1] = positive(i, j) != positive(i, j + 1);
        }
    }
    if !crossing.iter().any(|&c| c) {
        return Err(Genus1Error::DegenerateLevelSet);
    }

    // Refined crossing point on each edge; None for sign flips across the pole.
    let step_s = data.from_lattice_coords(h, 0.0);
    let step_t = data.from_lattice_coords(0.0, h);
    let mut points: Vec<Option<Complex64>> = vec![None; edge_count];
    for j in 0..n {
        for i in 0..n {
            for dir in 0..2 {
                let e = 2 * (j * n + i) + dir;
                if !crossing[e] {
                    continue;
                }
                let start = node(i, j);
                let step = if dir == 0 { step_s } else { step_t };
                let mut lo = 0.0;
                let mut hi = 1.0;
                let lo_pos = grid[j * n + i] > 0.0;
                for _ in 0..64 {
                    let mid = 0.5 * (lo + hi);
                    let v = im_p(start + step * mid)?;
                    if (v > 0.0) == lo_pos {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let a = start + step * (0.5 * (lo + hi));
                if im_p(a)?.abs() < CONTOUR_TOL {
                    points[e] = Some(a);
                }
            }
        }
    }

    // Pair crossing edges inside each cell; saddles are split by the
    // sign at the cell centre.
    let mut links: Vec<Vec<usize>> = vec![Vec::new(); edge_count];
    for j in 0..n {
        for i in 0..n {
            let (i1, j1) = ((i + 1) % n, (j + 1) % n);
            let bottom = 2 * (j * n + i);
            let right = 2 * (j * n + i1) + 1;
            let top = 2 * (j1 * n + i);
            let left = 2 * (j * n + i) + 1;
            let active: Vec<usize> = [bottom, right, top, left]
                .into_iter()
                .filter(|&e| crossing[e])
                .collect();
            let pairs: Vec<(usize, usize)> = match active.len() {
                2 => vec![(active[0], active[1])],
                4 => {
                    let centre = data.from_lattice_coords(coord(i) + 0.5 * h, coord(j) + 0.5 * h);
                    let centre_pos = im_p(centre).map(|v| v > 0.0).unwrap_or(true);
                    if centre_pos == positive(i, j) {
                        vec![(bottom, right), (top, left)]
                    } else {
                        vec![(left, bottom), (right, top)]
                    }
                }
                _ => Vec::new(),
            };
            for (x, y) in pairs {
                links[x].push(y);
                links[y].push(x);
            }
        }
    }

    let mut visited = vec![false; edge_count];
    let mut components = Vec::new();
    for start in 0..edge_count {
        if !crossing[start] || visited[start] {
            continue;
        }
        // Walk to one end (or around the loop), then collect forward.
        let mut chain = vec![start];
        visited[start] = true;
        let closed;
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = links[cur].iter().copied().find(|&x| x != prev && !visited[x]);
            match next {
                Some(x) => {
                    visited[x] = true;
                    chain.push(x);
                    prev = cur;
                    cur = x;
                }
                None => {
                    closed = chain.len() > 2 && links[cur].contains(&start);
                    break;
                }
            }
        }
        if !closed {
            // Extend backwards from the start.
            let mut back = Vec::new();
            let mut prev = chain.get(1).copied().unwrap_or(usize::MAX);
            let mut cur = start;
            while let Some(x) = links[cur].iter().copied().find(|&x| x != prev && !visited[x]) {
                visited[x] = true;
                back.push(x);
                prev = cur;
                cur = x;
            }
            back.reverse();
            back.extend(chain);
            chain = back;
        }
        // Split at rejected points.
        let mut pieces: Vec<Vec<Complex64>> = vec![Vec::new()];
        let mut broken = false;
        for e in &chain {
            match points[*e] {
                Some(a) => pieces.last_mut().expect("non-empty").push(a),
                None => {
                    broken = true;
                    pieces.push(Vec::new());
                }
            }
        }
        if broken && closed && pieces.len() > 1 {
            let first = pieces.remove(0);
            pieces.last_mut().expect("non-empty").extend(first);
        }
        for piece in pieces.into_iter().filter(|p| !p.is_empty()) {
            let samples = piece
                .into_iter()
                .map(|a| QuasimomentumSample::at(a, data))
                .collect::<Result<Vec<_>, _>>()?;
            components.push(ContourComponent {
                samples,
                closed: closed && !broken,
            });
        }
    }
    if components.is_empty() {
        return Err(Genus1Error::DegenerateLevelSet);
    }
    Ok(CanonicalContour { resolution, components })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumLabel {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumComponent {
    pub id: usize,
    pub label: SpectrumLabel,
    pub max_imag: f64,
    pub alphas: Vec<Complex64>,
}

/// Image of the contour under `α = -℘(a)`, one entry per contour component.
pub fn spectrum_projection(contour: &CanonicalContour) -> Vec<SpectrumComponent> {
    contour
        .components
        .iter()
        .enumerate()
        .map(|(id, c)| {
            let alphas: Vec<Complex64> = c.samples.iter().map(|s| s.alpha).collect();
            let max_imag = alphas.iter().map(|a| a.im.abs()).fold(0.0, f64::max);
            SpectrumComponent {
                id,
                label: if max_imag < REAL_SPECTRUM_TOL {
                    SpectrumLabel::Real
                } else {
                    SpectrumLabel::Complex
                },
                max_imag,
                alphas,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochPoint {
    pub sample: QuasimomentumSample,
    /// `n` in `p T = arg κ + 2πn`.
    pub branch: i64,
    /// Contour component, `usize::MAX` for points seeded from the pole
    /// asymptotics.
    pub component: usize,
}

fn check_unimodular(kappa: Complex64) -> Result<(), Genus1Error> {
    let modulus = kappa.norm();
    if modulus.is_nan() || (modulus - 1.0).abs() > 1e-12 {
        return Err(Genus1Error::NotUnimodular { modulus });
    }
    Ok(())
}

/// Solves `p(a) = target` near `guess`; near the pole `1/p` is used.
fn newton_p(guess: Complex64, target: f64, data: &WeierstrassData) -> Option<Complex64> {
    let use_inverse = target.abs() > 1.0;
    let mut a = guess;
    for _ in 0..60 {
        let p = p_of(a, data).ok()?;
        let dp = p_prime(a, data).ok()?;
        let step = if use_inverse {
            (1.0 / p - 1.0 / target) / (-dp / (p * p))
        } else {
            (p - target) / dp
        };
        if !step.is_finite() {
            return None;
        }
        a -= step;
        if step.norm() <= 1e-15 * (1.0 + a.norm()) {
            break;
        }
    }
    let p = p_of(a, data).ok()?;
    ((p - target).norm() <= 1e-10 * (1.0 + target.abs())).then_some(a)
}

fn by_modulus(x: &BlochPoint, y: &BlochPoint) -> core::cmp::Ordering {
    x.sample
        .alpha
        .norm()
        .total_cmp(&y.sample.alpha.norm())
        .then(x.sample.a.re.total_cmp(&y.sample.a.re))
        .then(x.sample.a.im.total_cmp(&y.sample.a.im))
}

/// Points of the contour with `e^{i p T} = κ`, ordered by `|α|`.
///
/// Crossings of `p T` through `arg κ + 2πn` are bracketed between
/// neighbouring contour samples and refined by Newton's method. Segments
/// next to the pole are skipped; the branches there are solved from the
/// asymptotic seed `a ≈ -i/p`.
pub fn bloch_points(
    kappa: Complex64,
    contour: &CanonicalContour,
    data: &WeierstrassData,
    max_count: usize,
) -> Result<Vec<BlochPoint>, Genus1Error> {
    check_unimodular(kappa)?;
    let t = data.period();
    let theta = kappa.arg();
    let phase = |p: Complex64| (p.re * t - theta) / TAU;
    let near_pole = cell_diameter(data, contour.resolution);
    let mut cutoff = f64::INFINITY;
    let mut found: Vec<BlochPoint> = Vec::new();
    for (cid, comp) in contour.components.iter().enumerate() {
        let m = comp.samples.len();
        let segs = if comp.closed { m } else { m.saturating_sub(1) };
        for k in 0..segs {
            let s1 = comp.samples[k];
            let s2 = comp.samples[(k + 1) % m];
            let a1 = s1.a;
            let a2 = a1 + data.reduce(s2.a - a1).0;
            let mid = 0.5 * (a1 + a2);
            if data.lattice_distance(mid) < near_pole {
                cutoff = cutoff.min(s1.alpha.norm()).min(s2.alpha.norm());
                continue;
            }
            let (f1, f2) = (phase(p_of(a1, data)?), phase(p_of(a2, data)?));
            let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            let mut branch = lo.ceil() as i64;
            while (branch as f64) <= hi && hi > lo {
                let lambda = (branch as f64 - f1) / (f2 - f1);
                let target = (theta + TAU * branch as f64) / t;
                if let Some(a) = newton_p(a1 + (a2 - a1) * lambda, target, data) {
                    let a = data.reduce(a).0;
                    if !found.iter().any(|b| data.lattice_distance(b.sample.a - a) < 1e-7) {
                        found.push(BlochPoint {
                            sample: QuasimomentumSample::at(a, data)?,
                            branch,
                            component: cid,
                        });
                    }
                }
                branch += 1;
            }
        }
    }
    if cutoff.is_finite() {
        // Near the pole p ≈ -i/a, so a₀ = -i/p seeds every branch past the cut.
        let p_cut = cutoff.sqrt();
        let spacing = TAU / t;
        let first = ((0.5 * p_cut) / spacing).floor() as i64;
        let mut complete = true;
        for m in 0..(max_count as i64 + 4) {
            for branch in [first + m, -first - m] {
                let target = (theta + TAU * branch as f64) / t;
                if target.abs() < 0.5 * p_cut {
                    continue;
                }
                match newton_p(-I / target, target, data) {
                    Some(a) => {
                        let a = data.reduce(a).0;
                        if !found.iter().any(|b| data.lattice_distance(b.sample.a - a) < 1e-7) {
                            found.push(BlochPoint {
                                sample: QuasimomentumSample::at(a, data)?,
                                branch,
                                component: usize::MAX,
                            });
                        }
                    }
                    None => complete = false,
                }
            }
        }
        if !complete {
            found.retain(|b| b.sample.alpha.norm() < 0.9 * cutoff);
        }
    }
    found.sort_by(by_modulus);
    found.truncate(max_count);
    Ok(found)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormSign {
    Positive,
    Negative,
    /// Non-real eigenvalue: the self-norm vanishes.
    Neutral,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochNormEntry {
    pub point: BlochPoint,
    pub norm: Complex64,
    pub sign: NormSign,
    /// Index of the group of points sharing `α` or `conj α`.
    pub group: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlochNormSigns {
    pub kappa: Complex64,
    pub entries: Vec<BlochNormEntry>,
    /// Negative squares of the Gram matrix of each group, summed.
    pub negative_total: usize,
    /// Entries whose self-norm is negative.
    pub negative_entries: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochNormOptions {
    pub resolution: usize,
    pub quad_tol: f64,
}

impl Default for BlochNormOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            quad_tol: crate::space::DEFAULT_QUAD_TOL,
        }
    }
}

/// `ψ(a, · - shift)` as an element of the Bloch space.
pub fn bloch_element(
    a: Complex64,
    shift: f64,
    data: &WeierstrassData,
    s: &SpaceSpec,
) -> Result<SpaceElement, Genus1Error> {
    let data = data.clone();
    let f = Arc::new(move |z: Complex64| bloch_value(a, z - shift, &data));
    Ok(s.element_from_fn(f)?)
}

pub fn bloch_norm_signs(
    kappa: Complex64,
    data: &WeierstrassData,
    pole_shift: f64,
    count: usize,
) -> Result<BlochNormSigns, Genus1Error> {
    bloch_norm_signs_with(kappa, data, pole_shift, count, &BlochNormOptions::default())
}

/// Indefinite norms `⟨ψ_l, ψ_l⟩` of the first `count` Bloch solutions for
/// the potential `2℘(x - pole_shift)`. Points with equal or conjugate `α`
/// form a group whose Gram matrix gives the negative squares.
pub fn bloch_norm_signs_with(
    kappa: Complex64,
    data: &WeierstrassData,
    pole_shift: f64,
    count: usize,
    opts: &BlochNormOptions,
) -> Result<BlochNormSigns, Genus1Error> {
    check_unimodular(kappa)?;
    let contour = canonical_contour(data, opts.resolution)?;
    let mut points = bloch_points(kappa, &contour, data, count + 2)?;
    // Keep a conjugate partner that falls just past the cut.
    let same = |x: Complex64, y: Complex64| (x - y).norm() <= 1e-6 * (1.0 + x.norm());
    let mut keep = count.min(points.len());
    while keep < points.len()
        && points[..keep].iter().any(|q| {
            same(q.sample.alpha, points[keep].sample.alpha) || same(q.sample.alpha.conj(), points[keep].sample.alpha)
        })
    {
        keep += 1;
    }
    points.truncate(keep);

    let s = SpaceSpec::new(
        vec![SpacePole {
            position: pole_shift,
            r: 1,
        }],
        SpaceMode::Bloch {
            period: data.period(),
            kappa,
        },
    )?
    .with_quad_tol(opts.quad_tol)?;
    let elements = points
        .iter()
        .map(|b| bloch_element(b.sample.a, pole_shift, data, &s))
        .collect::<Result<Vec<_>, _>>()?;

    let mut group_of = vec![usize::MAX; points.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for l in 0..points.len() {
        if group_of[l] != usize::MAX {
            continue;
        }
        let al = points[l].sample.alpha;
        let members: Vec<usize> = (l..points.len())
            .filter(|&m| {
                group_of[m] == usize::MAX
                    && (same(al, points[m].sample.alpha) || same(al.conj(), points[m].sample.alpha))
            })
            .collect();
        for &m in &members {
            group_of[m] = groups.len();
        }
        groups.push(members);
    }

    let mut entries = Vec::with_capacity(points.len());
    let mut norms = vec![Complex64::new(0.0, 0.0); points.len()];
    let mut negative_total = 0;
    for members in &groups {
        let k = members.len();
        let mut gram = vec![Complex64::new(0.0, 0.0); k * k];
        let mut scale = 0.0f64;
        for (x, &l) in members.iter().enumerate() {
            let nl = detour_norm(&elements[l], &s)?;
            scale = scale.max(nl * nl);
            for (y, &m) in members.iter().enumerate() {
                gram[x * k + y] = inner_product(&elements[l], &elements[m], &s)?;
            }
            norms[l] = gram[x * k + x];
        }
        let floor = NORM_NOISE_REL * scale;
        let alpha = points[members[0]].sample.alpha;
        let real = alpha.im.abs() < REAL_SPECTRUM_TOL * (1.0 + alpha.norm());
        if real {
            for &l in members {
                if norms[l].re.abs() < floor {
                    return Err(Genus1Error::NormTooSmall {
                        value: norms[l].re,
                        alpha: points[l].sample.alpha,
                        floor,
                    });
                }
            }
        }
        let ev = hermitian_eigenvalues(&gram, k);
        negative_total += inertia(&ev, floor).0;
        for &l in members {
            let sign = if !real {
                NormSign::Neutral
            } else if norms[l].re < 0.0 {
                NormSign::Negative
            } else {
                NormSign::Positive
            };
            entries.push((l, sign));
        }
    }
    entries.sort_by_key(|e| e.0);
    let entries: Vec<BlochNormEntry> = entries
        .into_iter()
        .map(|(l, sign)| BlochNormEntry {
            point: points[l],
            norm: norms[l],
            sign,
            group: group_of[l],
        })
        .collect();
    let negative_entries = entries
        .iter()
        .filter(|e: &&BlochNormEntry| e.sign == NormSign::Negative)
        .count();
    Ok(BlochNormSigns {
        kappa,
        entries,
        negative_total,
        negative_entries,
    })
}

/// `T`-periodic part of the level set check: `max |Im p|` over the contour.
pub fn contour_defect(contour: &CanonicalContour) -> f64 {
    contour
        .components
        .iter()
        .flat_map(|c| c.samples.iter())
        .map(|s| s.p.im.abs())
        .fold(0.0, f64::max)
}

/// Half the real period, where `p` vanishes on real-spectrum lattices.
pub fn half_period_quasimomentum(data: &WeierstrassData) -> Result<Complex64, Genus1Error> {
    quasimomentum(Complex64::new(data.omega1(), 0.0), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use core::f64::consts::PI;

    fn rect() -> WeierstrassData {
        WeierstrassData::new(1.0, I).unwrap()
    }

    fn rhombic() -> WeierstrassData {
        WeierstrassData::new(1.0, Complex64::new(0.5, 0.6)).unwrap()
    }

    #[test]
    fn bloch_solution_satisfies_lame_by_finite_differences() {
        let w = rhombic();
        let a = Complex64::new(0.3, 0.2);
        let x = Complex64::new(0.4, 0.1);
        let (_, alpha) = lame_bloch(a, x, &w).unwrap();
        let h = 1e-3;
        let f = |k: f64| bloch_value(a, x + h * k, &w);
        let d2 = (-f(2.0) + 16.0 * f(1.0) - 30.0 * f(0.0) + 16.0 * f(-1.0) - f(-2.0)) / (12.0 * h * h);
        let lhs = -d2 + 2.0 * w.wp(x).unwrap() * f(0.0);
        assert!((lhs - alpha * f(0.0)).norm() < 1e-8 * f(0.0).norm().max(1.0));
    }

    #[test]
    fn multiplier_matches_quasimomentum() {
        for w in [rect(), rhombic()] {
            check_conventions(&w).unwrap();
            assert!(half_period_quasimomentum(&w).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn rectangular_contour_is_two_real_lines() {
        let w = rect();
        let contour = canonical_contour(&w, 64).unwrap();
        assert!(contour_defect(&contour) < CONTOUR_TOL);
        let spec = spectrum_projection(&contour);
        assert!(spec.len() >= 2);
        assert!(spec.iter().all(|s| s.label == SpectrumLabel::Real));
        for comp in &contour.components {
            for s in &comp.samples {
                let x = s.a.re.abs();
                assert!(x < 1e-7 || (x - 1.0).abs() < 1e-7, "{}", s.a);
            }
        }
    }

    #[test]
    fn rhombic_contour_has_complex_spectrum() {
        let contour = canonical_contour(&rhombic(), 64).unwrap();
        let spec = spectrum_projection(&contour);
        assert!(spec
            .iter()
            .any(|s| s.label == SpectrumLabel::Complex && s.max_imag > 1e-2));
    }

    #[test]
    fn low_resolution_and_non_unimodular_are_rejected() {
        let w = rect();
        assert_eq!(
            canonical_contour(&w, 32),
            Err(Genus1Error::ResolutionTooLow { resolution: 32 })
        );
        let contour = canonical_contour(&w, 64).unwrap();
        assert!(matches!(
            bloch_points(c(1.5), &contour, &w, 4),
            Err(Genus1Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn bloch_points_solve_the_multiplier_equation() {
        let w = rhombic();
        let kappa = Complex64::from_polar(1.0, PI / 7.0);
        let contour = canonical_contour(&w, 96).unwrap();
        let pts = bloch_points(kappa, &contour, &w, 12).unwrap();
        assert_eq!(pts.len(), 12);
        for b in &pts {
            assert!(((I * b.sample.p * w.period()).exp() - kappa).norm() < 1e-9);
        }
        assert!(pts
            .windows(2)
            .all(|x| x[0].sample.alpha.norm() <= x[1].sample.alpha.norm()));
    }

    #[test]
    fn rectangular_norms_have_one_negative_square() {
        let w = rect();
        let signs = bloch_norm_signs_with(
            c(1.0),
            &w,
            0.0,
            8,
            &BlochNormOptions {
                resolution: 64,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(signs.negative_total, 1);
        assert_eq!(signs.entries[0].sign, NormSign::Negative);
    }
}
