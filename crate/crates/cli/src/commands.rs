use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use smero_core::genus1::{
    bloch_norm_signs_with, canonical_contour, check_conventions, contour_defect, half_period_quasimomentum,
    spectrum_projection, BlochNormOptions, NormSign, SpectrumLabel, DEFAULT_RESOLUTION,
};
use smero_core::local::{
    default_alpha_samples, frobenius_basis_with, is_s_meromorphic_at_pole, negative_subspace, FailedCondition,
    FrobeniusOptions, FrobeniusOutcome,
};
use smero_core::potential::{
    evaluate, evolve_track, find_real_poles, local_expansion, PoleEvent, PoleSource, PotentialSpec, RationalPole,
};
use smero_core::space::{
    detour_norm, gram_signature, inner_product_with, negative_count_formula, recommended_basis_size, symmetry_defect,
    InnerProductOptions, SpaceElement, SpaceMode, SpacePole, SpaceSpec,
};
use smero_core::weierstrass::WeierstrassData;
use smero_core::{Orientation, TruncatedLaurentSeries};

use crate::output::{PlotSpec, Table};
use crate::schema::*;
use crate::{Command, CommandOutput, Failure, JobConfig};

const DEFAULT_SAMPLES: usize = 400;
const DEFAULT_SEED: u64 = 0;

pub(crate) fn dispatch(cfg: &JobConfig, doc: &InputDoc) -> Result<CommandOutput, Failure> {
    match cfg.command {
        Command::Check => check(cfg, doc),
        Command::Basis => basis(cfg, doc),
        Command::Ip => ip(cfg, doc),
        Command::Count => count(cfg, doc),
        Command::Evolve => evolve(doc),
        Command::Spectrum => spectrum(cfg, doc),
        Command::Bloch => bloch(cfg, doc),
    }
}

fn missing(section: &str) -> Failure {
    Failure::validation("MissingSection", format!("input has no `{section}` section"))
}

fn cx(p: ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pair(z: Complex64) -> ComplexPair {
    [z.re, z.im]
}

fn to_value(v: impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).expect("payloads serialize")
}

fn build_potential(doc: &InputDoc) -> Result<PotentialSpec, Failure> {
    let spec = match doc.potential.as_ref().ok_or_else(|| missing("potential"))? {
        PotentialInput::Rational { poles, regular } => PotentialSpec::rational(
            poles
                .iter()
                .map(|p| RationalPole {
                    position: p.position,
                    r: p.r,
                })
                .collect(),
            regular.clone(),
        )?,
        PotentialInput::Soliton { k, phase, sign, time } => {
            PotentialSpec::soliton(k.clone(), phase.clone(), sign.clone(), *time)?
        }
        PotentialInput::Elliptic {
            omega1,
            omega2,
            n,
            shift,
        } => PotentialSpec::elliptic(*omega1, cx(*omega2), *n, *shift)?,
    };
    Ok(spec)
}

fn build_space(doc: &InputDoc, tol: Option<f64>) -> Result<SpaceSpec, Failure> {
    let input = doc.space.as_ref().ok_or_else(|| missing("space"))?;
    let poles = input
        .poles
        .iter()
        .map(|p| SpacePole {
            position: p.position,
            r: p.r,
        })
        .collect();
    let mode = match input.mode {
        ModeInput::Compact { a, b } => SpaceMode::CompactSupport { a, b },
        ModeInput::Bloch { period, kappa } => SpaceMode::Bloch {
            period,
            kappa: cx(kappa),
        },
    };
    let mut space = SpaceSpec::new(poles, mode)?;
    if let Some(rho) = input.detour_radius {
        space = space.with_detour_radius(rho)?;
    }
    if let Some(tol) = tol {
        space = space.with_quad_tol(tol)?;
    }
    Ok(space)
}

fn build_lattice(doc: &InputDoc) -> Result<WeierstrassData, Failure> {
    let l = doc.lattice.as_ref().ok_or_else(|| missing("lattice"))?;
    Ok(WeierstrassData::new(l.omega1, cx(l.omega2))?)
}

fn window(w: [f64; 2]) -> Result<(f64, f64), Failure> {
    if !(w[0].is_finite() && w[1].is_finite() && w[0] < w[1]) {
        return Err(Failure::validation(
            "InvalidOption",
            "window must be increasing and finite",
        ));
    }
    Ok((w[0], w[1]))
}

fn samples(cfg: &JobConfig) -> Result<usize, Failure> {
    match cfg.resolution {
        Some(n) if n < 2 => Err(Failure::validation("InvalidOption", "--resolution must be at least 2")),
        Some(n) => Ok(n),
        None => Ok(DEFAULT_SAMPLES),
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

// check

#[derive(Serialize)]
struct PoleVerdict {
    position: f64,
    multiplicity: u32,
    source: &'static str,
    c_minus2: ComplexPair,
    r: Option<u32>,
    s_meromorphic: bool,
    failed_condition: &'static str,
    failed_degree: Option<i32>,
    failed_alpha: Option<ComplexPair>,
    checked_alphas: usize,
}

fn source_name(s: PoleSource) -> &'static str {
    match s {
        PoleSource::TauZero => "tau_zero",
        PoleSource::Rational => "rational",
        PoleSource::Elliptic => "elliptic",
    }
}

fn check(cfg: &JobConfig, doc: &InputDoc) -> Result<CommandOutput, Failure> {
    let p = build_potential(doc)?;
    let input = doc.check.as_ref().ok_or_else(|| missing("check"))?;
    let (lo, hi) = window(input.window)?;
    let alphas = match &input.alphas {
        Some(list) => list.iter().copied().map(cx).collect(),
        None => default_alpha_samples(),
    };
    let mut verdicts = Vec::new();
    let mut table = Table::new(
        "poles",
        &["position", "c_minus2_re", "c_minus2_im", "r", "s_meromorphic"],
    );
    for pole in find_real_poles(&p, (lo, hi))? {
        let op = local_expansion(&p, Complex64::new(pole.position, 0.0), input.order)?;
        let cert = is_s_meromorphic_at_pole(&op, &alphas)?;
        let c_minus2 = op.u_coeffs().coeff_or_zero(-2);
        let (failed_condition, failed_degree, failed_alpha) = match cert.failed_condition {
            FailedCondition::None => ("None", None, None),
            FailedCondition::NonIntegerIndicial => ("NonIntegerIndicial", None, None),
            FailedCondition::OddCoefficientNonzero(d) => ("OddCoefficientNonzero", Some(d), None),
            FailedCondition::LogObstruction { degree, alpha } => ("LogObstruction", Some(degree), Some(pair(alpha))),
        };
        table.push(vec![
            pole.position,
            c_minus2.re,
            c_minus2.im,
            cert.r.map_or(f64::NAN, f64::from),
            f64::from(u8::from(cert.verdict)),
        ]);
        verdicts.push(PoleVerdict {
            position: pole.position,
            multiplicity: pole.multiplicity,
            source: source_name(pole.source),
            c_minus2: pair(c_minus2),
            r: cert.r,
            s_meromorphic: cert.verdict,
            failed_condition,
            failed_degree,
            failed_alpha,
            checked_alphas: cert.checked_alphas.len(),
        });
    }
    let mut curve = Table::new("potential", &["x", "u_re", "u_im"]);
    for x in grid(lo, hi, samples(cfg)?) {
        let u = evaluate(&p, Complex64::new(x, 0.0)).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        curve.push(vec![x, u.re, u.im]);
    }
    let payload = json!({
        "window": [lo, hi],
        "order": input.order,
        "pole_count": verdicts.len(),
        "all_s_meromorphic": verdicts.iter().all(|v| v.s_meromorphic),
        "poles": to_value(&verdicts),
    });
    Ok(CommandOutput {
        payload,
        tables: vec![table, curve],
        plots: vec![PlotSpec {
            table: "potential",
            title: "potential on the real window",
            x: "x",
            y: vec!["u_re"],
            style: "lines",
            yrange: Some((-50.0, 50.0)),
        }],
    })
}

// basis

#[derive(Serialize)]
struct Coefficient {
    degree: i32,
    value: ComplexPair,
}

fn coefficients(s: &TruncatedLaurentSeries) -> Vec<Coefficient> {
    (s.min_degree()..=s.max_degree())
        .map(|k| Coefficient {
            degree: k,
            value: pair(s.coeff_or_zero(k)),
        })
        .collect()
}

fn basis(cfg: &JobConfig, doc: &InputDoc) -> Result<CommandOutput, Failure> {
    let p = build_potential(doc)?;
    let input = doc.basis.as_ref().ok_or_else(|| missing("basis"))?;
    let op = local_expansion(&p, cx(input.center), input.order)?;
    let mut opts = FrobeniusOptions::default();
    if let Some(tol) = cfg.tol {
        opts.obstruction_tol = tol;
    }
    let alpha = cx(input.alpha);
    let mut table = Table::new(
        "coefficients",
        &["degree", "singular_re", "singular_im", "regular_re", "regular_im"],
    );
    let payload = match frobenius_basis_with(&op, alpha, input.order, &opts)? {
        FrobeniusOutcome::Basis(b) => {
            let lo = b.singular.min_degree().min(b.regular.min_degree());
            let hi = b.singular.max_degree().max(b.regular.max_degree());
            let inside = |s: &TruncatedLaurentSeries, k: i32| {
                if (s.min_degree()..=s.max_degree()).contains(&k) {
                    s.coeff_or_zero(k)
                } else {
                    Complex64::new(f64::NAN, f64::NAN)
                }
            };
            for k in lo..=hi {
                let (a, b) = (inside(&b.singular, k), inside(&b.regular, k));
                table.push(vec![f64::from(k), a.re, a.im, b.re, b.im]);
            }
            json!({
                "outcome": "basis",
                "center": input.center,
                "alpha": input.alpha,
                "r": b.r,
                "resonance_value": pair(b.resonance_value),
                "negative_exponents": negative_subspace(b.r).exponents,
                "singular": to_value(coefficients(&b.singular)),
                "regular": to_value(coefficients(&b.regular)),
            })
        }
        FrobeniusOutcome::Obstruction(o) => json!({
            "outcome": "obstruction",
            "center": input.center,
            "alpha": input.alpha,
            "degree": o.degree,
            "value": pair(o.value),
        }),
    };
    Ok(CommandOutput {
        payload,
        tables: vec![table],
        plots: vec![PlotSpec {
            table: "coefficients",
            title: "Frobenius coefficients",
            x: "degree",
            y: vec!["singular_re", "regular_re"],
            style: "linespoints",
            yrange: None,
        }],
    })
}

// ip

fn build_element(s: &SpaceSpec, input: &ElementInput, seed: u64) -> Result<SpaceElement, Failure> {
    if input.terms.is_empty() {
        return Err(Failure::validation(
            "InvalidOption",
            "an element needs at least one term",
        ));
    }
    let mut parts = Vec::with_capacity(input.terms.len());
    for term in &input.terms {
        let (coeff, elem) = match *term {
            TermInput::Monomial { pole, degree, coeff } => {
                if pole >= s.poles().len() {
                    return Err(Failure::validation(
                        "InvalidOption",
                        format!("pole index {pole} out of range"),
                    ));
                }
                (coeff, s.windowed_monomial(pole, degree)?)
            }
            TermInput::Bump {
                center,
                width,
                freq,
                phase,
                coeff,
            } => (coeff, s.bump(center, width, freq, phase)?),
            TermInput::Random { offset, coeff } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(offset));
                (coeff, s.random_admissible(&mut rng)?)
            }
        };
        parts.push((cx(coeff), elem));
    }
    let refs: Vec<(Complex64, &SpaceElement)> = parts.iter().map(|(c, e)| (*c, e)).collect();
    Ok(SpaceElement::combine(&refs)?)
}

fn ip(cfg: &JobConfig, doc: &InputDoc) -> Result<CommandOutput, Failure> {
    let s = build_space(doc, cfg.tol)?;
    let input = doc.ip.as_ref().ok_or_else(|| missing("ip"))?;
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let f = build_element(&s, &input.f, seed)?;
    let g = build_element(&s, &input.g, seed)?;
    let opts = InnerProductOptions {
        orientation: match input.orientation {
            OrientationInput::Upper => Orientation::Upper,
            OrientationInput::Lower => Orientation::Lower,
        },
        detour_radius: None,
    };
    let fg = inner_product_with(&f, &g, &s, &opts)?;
    let ff = inner_product_with(&f, &f, &s, &opts)?;
    let gg = inner_product_with(&g, &g, &s, &opts)?;
    let scale = detour_norm(&f, &s)? * detour_norm(&g, &s)?;
    let symmetry = match doc.potential {
        Some(_) => {
            let d = symmetry_defect(&build_potential(doc)?, &f, &g, &s)?;
            json!({ "defect": d.defect, "scale": d.scale, "relative": d.relative })
        }
        None => serde_json::Value::Null,
    };
    let (lo, hi) = s.domain();
    let mut table = Table::new("elements", &["x", "f_re", "f_im", "g_re", "g_im"]);
    for x in grid(lo, hi, samples(cfg)?) {
        let (a, b) = (f.eval(x), g.eval(x));
        table.push(vec![x, a.re, a.im, b.re, b.im]);
    }
    let payload = json!({
        "orientation": input.orientation,
        "detour_radius": s.detour_radius(),
        "quad_tol": s.quad_tol(),
        "value": pair(fg),
        "f_self": pair(ff),
        "g_self": pair(gg),
        "norm_product": scale,
        "symmetry": symmetry,
    });
    Ok(CommandOutput {
        payload,
        tables: vec![table],
        plots: vec![PlotSpec {
            table: "elements",
            title: "elements on the real line",
            x: "x",
            y: vec!["f_re", "g_re"],
            style: "lines",
            yrange: Some((-20.0, 20.0)),
        }],
    })
}

// count

fn count(cfg: &JobConfig, doc: &InputDoc) -> Result<CommandOutput, Failure> {
    let s = build_space(doc, cfg.tol)?;
    let input = doc.count.unwrap_or_default();
    let size = input.basis_size.unwrap_or_else(|| recommended_basis_size(&s));
    let formula = negative_count_formula(&s);
    let sig = gram_signature(&s, size, cfg.seed.unwrap_or(DEFAULT_SEED))?;
    let mut table = Table::new("eigenvalues", &["index", "eigenvalue"]);
    for (i, l) in sig.eigenvalues.iter().enumerate() {
        table.push(vec![i as f64, *l]);
    }
    let per_pole: Vec<serde_json::Value> = s
        .poles()
        .iter()
        .map(|p| {
            let ns = negative_subspace(p.r);
            json!({ "position": p.position, "r": p.r, "negative_exponents": ns.exponents, "dim": ns.dim })
        })
        .collect();
    let payload = json!({
        "formula": formula,
        "gram": {
            "size": sig.size,
            "negative": sig.negative,
            "zero": sig.zero,
            "positive": sig.positive,
            "threshold": sig.threshold,
        },
        "agree": formula == sig.negative,
        "poles": per_pole,
    });
    Ok(CommandOutput {
        payload,
        tables: vec![table],
        plots: vec![PlotSpec {
            table: "eigenvalues",
            title: "scaled Gram eigenvalues",
            x: "index",
            y: vec!["eigenvalue"],
            style: "points",
            yrange: None,
        }],
    })
}

// evolve

#[derive(Serialize)]
struct PoleState {
    time: f64,
    position: f64,
    tau_zero_multiplicity: u32,
    pole_type_coefficient: u32,
    r: Option<u32>,
    artifact: bool,
}

impl From<&PoleEvent> for PoleState {
    fn from(e: &PoleEvent) -> Self {
        Self {
            time: e.time,
            position: e.position,
            tau_zero_multiplicity: e.tau_zero_multiplicity,
            pole_type_coefficient: e.pole_type_coefficient,
            r: e.r,
            artifact: e.artifact,
        }
    }
}

fn evolve(doc: &InputDoc) -> Result<CommandOutput, Failure> {
    let p = build_potential(doc)?;
    let input = doc.evolve.as_ref().ok_or_else(|| missing("evolve"))?;
    let t_range = window(input.t_range)?;
    let res = evolve_track(&p, t_range, input.t_steps, window(input.window)?)?;
    let events: Vec<serde_json::Value> = res
        .events
        .iter()
        .map(|e| {
            json!({
                "trajectory": e.trajectory,
                "transition": e.transition(),
                "before": to_value(PoleState::from(&e.before)),
                "at": to_value(PoleState::from(&e.at)),
                "after": to_value(PoleState::from(&e.after)),
                "pair_distance": e.pair_distance,
                "tau_xx": e.tau_xx,
                "negative_squares": e.negative_squares,
            })
        })
        .collect();
    let mut tracks = Table::new("tracks", &["trajectory", "time", "position", "coefficient", "r"]);
    for t in &res.trajectories {
        for e in &t.samples {
            tracks.push(vec![
                t.id as f64,
                e.time,
                e.position,
                f64::from(e.pole_type_coefficient),
                e.r.map_or(f64::NAN, f64::from),
            ]);
        }
    }
    let mut counts = Table::new("counts", &["time", "negative_count"]);
    for (t, n) in res.times.iter().zip(&res.negative_counts) {
        counts.push(vec![*t, *n as f64]);
    }
    let payload = json!({
        "t_range": [t_range.0, t_range.1],
        "t_steps": input.t_steps,
        "trajectory_count": res.trajectories.len(),
        "events": events,
        "negative_counts": res.negative_counts,
    });
    Ok(CommandOutput {
        payload,
        tables: vec![tracks, counts],
        plots: vec![
            PlotSpec {
                table: "tracks",
                title: "real poles",
                x: "time",
                y: vec!["position"],
                style: "points",
                yrange: None,
            },
            PlotSpec {
                table: "counts",
                title: "negative squares",
                x: "time",
                y: vec!["negative_count"],
                style: "steps",
                yrange: None,
            },
        ],
    })
}

// spectrum

fn contour_resolution(cfg: &JobConfig) -> usize {
    cfg.resolution.unwrap_or(DEFAULT_RESOLUTION)
}

fn spectrum(cfg: &JobConfig, doc: &InputDoc) -> Result<CommandOutput, Failure> {
    let w = build_lattice(doc)?;
    check_conventions(&w)?;
    let contour = canonical_contour(&w, contour_resolution(cfg))?;
    let components = spectrum_projection(&contour);
    let mut table = Table::new(
        "contour",
        &["component", "a_re", "a_im", "alpha_re", "alpha_im", "p_re", "p_im"],
    );
    for (id, comp) in contour.components.iter().enumerate() {
        for s in &comp.samples {
            table.push(vec![id as f64, s.a.re, s.a.im, s.alpha.re, s.alpha.im, s.p.re, s.p.im]);
        }
    }
    let summary: Vec<serde_json::Value> = components
        .iter()
        .zip(&contour.components)
        .map(|(s, c)| {
            json!({
                "id": s.id,
                "label": match s.label {
                    SpectrumLabel::Real => "real",
                    SpectrumLabel::Complex => "complex",
                },
                "max_imag": s.max_imag,
                "points": s.alphas.len(),
                "closed": c.closed,
            })
        })
        .collect();
    let payload = json!({
        "omega1": w.omega1(),
        "omega2": pair(w.omega2()),
        "resolution": contour.resolution,
        "point_count": contour.point_count(),
        "contour_defect": contour_defect(&contour),
        "half_period_quasimomentum": pair(half_period_quasimomentum(&w)?),
        "real_spectrum": components.iter().all(|s| s.label == SpectrumLabel::Real),
        "components": summary,
    });
    Ok(CommandOutput {
        payload,
        tables: vec![table],
        plots: vec![
            PlotSpec {
                table: "contour",
                title: "canonical contour",
                x: "a_re",
                y: vec!["a_im"],
                style: "points pointtype 7 pointsize 0.3",
                yrange: None,
            },
            PlotSpec {
                table: "contour",
                title: "spectrum",
                x: "alpha_re",
                y: vec!["alpha_im"],
                style: "points pointtype 7 pointsize 0.3",
                yrange: Some((-20.0, 20.0)),
            },
        ],
    })
}

// bloch

fn bloch(cfg: &JobConfig, doc: &InputDoc) -> Result<CommandOutput, Failure> {
    let w = build_lattice(doc)?;
    let input = doc.bloch.as_ref().ok_or_else(|| missing("bloch"))?;
    let defaults = BlochNormOptions::default();
    let opts = BlochNormOptions {
        resolution: contour_resolution(cfg),
        quad_tol: cfg.tol.unwrap_or(defaults.quad_tol),
    };
    let kappa = cx(input.kappa);
    let signs = bloch_norm_signs_with(kappa, &w, input.pole_shift, input.count, &opts)?;
    let reference = SpaceSpec::new(
        vec![SpacePole {
            position: input.pole_shift,
            r: 1,
        }],
        SpaceMode::Bloch {
            period: w.period(),
            kappa,
        },
    )?;
    let sign_value = |s: NormSign| match s {
        NormSign::Positive => 1.0,
        NormSign::Negative => -1.0,
        NormSign::Neutral => 0.0,
    };
    let mut table = Table::new(
        "norms",
        &["index", "alpha_re", "alpha_im", "norm_re", "norm_im", "sign", "group"],
    );
    let entries: Vec<serde_json::Value> = signs
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let s = e.point.sample;
            table.push(vec![
                i as f64,
                s.alpha.re,
                s.alpha.im,
                e.norm.re,
                e.norm.im,
                sign_value(e.sign),
                e.group as f64,
            ]);
            json!({
                "a": pair(s.a),
                "alpha": pair(s.alpha),
                "p": pair(s.p),
                "branch": e.point.branch,
                "norm": pair(e.norm),
                "sign": match e.sign {
                    NormSign::Positive => "positive",
                    NormSign::Negative => "negative",
                    NormSign::Neutral => "neutral",
                },
                "group": e.group,
            })
        })
        .collect();
    let formula = negative_count_formula(&reference);
    let payload = json!({
        "kappa": pair(signs.kappa),
        "pole_shift": input.pole_shift,
        "resolution": opts.resolution,
        "negative_total": signs.negative_total,
        "negative_entries": signs.negative_entries,
        "formula": formula,
        "agree": formula == signs.negative_total,
        "entries": entries,
    });
    Ok(CommandOutput {
        payload,
        tables: vec![table],
        plots: vec![PlotSpec {
            table: "norms",
            title: "Bloch norms",
            x: "alpha_re",
            y: vec!["norm_re"],
            style: "points pointtype 7",
            yrange: None,
        }],
    })
}
