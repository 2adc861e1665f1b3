//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{c, monodromy_defect, second_derivative, two_soliton_triple_zero, I};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smero_core::genus1::{
    bloch_norm_signs, canonical_contour, contour_defect, lame_bloch, spectrum_projection, NormSign, SpectrumLabel,
};
use smero_core::local::{default_alpha_samples, is_s_meromorphic_at_pole, LocalOperatorData};
use smero_core::potential::{evolve_track, local_expansion, PotentialSpec, RationalPole};
use smero_core::space::*;
use smero_core::weierstrass::WeierstrassData;
use smero_core::{Orientation, TruncatedLaurentSeries};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Criterion = fn() -> Result<Outcome, String>;

const CONFIGURATIONS: [&[u32]; 7] = [&[1], &[2], &[3], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]];

fn compact(rs: &[u32]) -> SpaceSpec {
    let poles = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| SpacePole {
            position: -1.0 + 1.1 * i as f64,
            r,
        })
        .collect();
    SpaceSpec::new(poles, SpaceMode::CompactSupport { a: -4.0, b: 4.0 }).expect("valid space")
}

fn normal_form_classification() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let alphas = [Complex64::new(1.3, 0.4), Complex64::new(-2.1, 0.9)];
    let mut agree = 0;
    let mut disagreements = Vec::new();
    for case in 0..200 {
        let r = 1 + (case % 3) as u32;
        let odd = if case % 2 == 0 {
            None
        } else {
            let choices: Vec<i32> = (-1..2 * r as i32).filter(|k| k % 2 != 0).collect();
            Some(choices[rng.random_range(0..choices.len())])
        };
        let top = 2 * r as i32 + 2;
        let coeffs: Vec<Complex64> = (-2..=top)
            .map(|k| {
                if k == -2 {
                    c((r * (r + 1)) as f64)
                } else if Some(k) == odd {
                    c(1e-3)
                } else if k >= 0 && k % 2 == 0 {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    c(0.0)
                }
            })
            .collect();
        let series = TruncatedLaurentSeries::new(c(0.0), -2, coeffs.clone()).map_err(|e| e.to_string())?;
        let op = LocalOperatorData::new(series, None).map_err(|e| e.to_string())?;
        let verdict = is_s_meromorphic_at_pole(&op, &default_alpha_samples())
            .map_err(|e| e.to_string())?
            .verdict;
        let defect = alphas
            .iter()
            .map(|&a| monodromy_defect(-2, &coeffs, a, 0.5))
            .fold(0.0, f64::max);
        let oracle = defect < 1e-6;
        if verdict == oracle && verdict == odd.is_none() {
            agree += 1;
        } else {
            disagreements.push(case);
        }
    }
    Ok(outcome(
        agree == 200,
        format!("{agree}/200 agree with RK monodromy; mismatches {disagreements:?}"),
    ))
}

fn gram_counts() -> Result<Outcome, String> {
    let mut lines = Vec::new();
    let mut ok = true;
    for rs in CONFIGURATIONS {
        let s = compact(rs);
        let n = recommended_basis_size(&s);
        let gram = negative_count_gram(&s, n, 1).map_err(|e| e.to_string())?;
        let formula = negative_count_formula(&s);
        ok &= gram == formula;
        lines.push(format!("{rs:?}:{gram}/{formula}"));
    }
    Ok(outcome(ok, format!("gram/formula {}", lines.join(" "))))
}

fn detour_independence() -> Result<Outcome, String> {
    let spaces = [
        compact(&[1]),
        compact(&[2]),
        compact(&[1, 3]),
        SpaceSpec::new(
            compact(&[1, 2]).poles().to_vec(),
            SpaceMode::Bloch {
                period: 4.0,
                kappa: Complex64::from_polar(1.0, 0.6),
            },
        )
        .map_err(|e| e.to_string())?,
    ];
    let mut worst_orientation: f64 = 0.0;
    let mut worst_radius: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for s in &spaces {
        for _ in 0..100 {
            let f = s.random_admissible(&mut rng).map_err(|e| e.to_string())?;
            let g = s.random_admissible(&mut rng).map_err(|e| e.to_string())?;
            let upper = inner_product(&f, &g, s).map_err(|e| e.to_string())?;
            let lower = inner_product_with(
                &f,
                &g,
                s,
                &InnerProductOptions {
                    orientation: Orientation::Lower,
                    detour_radius: None,
                },
            )
            .map_err(|e| e.to_string())?;
            let halved = inner_product_with(
                &f,
                &g,
                s,
                &InnerProductOptions {
                    orientation: Orientation::Upper,
                    detour_radius: Some(0.5 * s.detour_radius()),
                },
            )
            .map_err(|e| e.to_string())?;
            let scale = (detour_norm(&f, s).map_err(|e| e.to_string())?
                * detour_norm(&g, s).map_err(|e| e.to_string())?)
            .max(1.0);
            worst_orientation = worst_orientation.max((upper - lower).norm() / scale);
            worst_radius = worst_radius.max((upper - halved).norm() / scale);
        }
    }
    let pass = worst_orientation < 1e-12 && worst_radius < DEFAULT_QUAD_TOL;
    Ok(outcome(
        pass,
        format!("400 pairs: upper-lower {worst_orientation:.2e} (< 1e-12), rho-halving {worst_radius:.2e} (< 1e-8)"),
    ))
}

fn symmetry() -> Result<Outcome, String> {
    let mut worst = [0.0f64; 2];
    for (slot, r) in [1u32, 2].into_iter().enumerate() {
        let s = SpaceSpec::new(
            vec![SpacePole { position: 0.0, r }],
            SpaceMode::CompactSupport { a: -4.0, b: 4.0 },
        )
        .map_err(|e| e.to_string())?;
        let p = PotentialSpec::rational(vec![RationalPole { position: 0.0, r }], vec![]).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(100 + r as u64);
        for _ in 0..20 {
            let f = s.random_admissible(&mut rng).map_err(|e| e.to_string())?;
            let g = s.random_admissible(&mut rng).map_err(|e| e.to_string())?;
            let d = symmetry_defect(&p, &f, &g, &s).map_err(|e| e.to_string())?;
            worst[slot] = worst[slot].max(d.relative);
        }
    }
    Ok(outcome(
        worst[0] < 1e-7 && worst[1] < 1e-7,
        format!(
            "worst relative defect 2/x^2 {:.2e}, 6/x^2 {:.2e} (< 1e-7)",
            worst[0], worst[1]
        ),
    ))
}

fn soliton_jump() -> Result<Outcome, String> {
    let p = PotentialSpec::soliton(vec![1.0, 2.0], vec![0.0, 0.0], vec![-1, 1], 0.0).map_err(|e| e.to_string())?;
    let res = evolve_track(&p, (-2.0, 2.0), 200, (-20.0, 20.0)).map_err(|e| e.to_string())?;
    let counts_ok = res.negative_counts.iter().all(|&n| n == 1);
    let Some(e) = res.events.iter().find(|e| e.transition() == "2/y^2 → 6/y^2") else {
        return Ok(outcome(
            false,
            format!("{} events, none 2/y^2 → 6/y^2", res.events.len()),
        ));
    };
    let at = p.clone().with_time(e.at.time);
    let op = local_expansion(&at, c(e.at.position), 8).map_err(|e| e.to_string())?;
    let c2 = op.u_coeffs().coeff_or_zero(-2);
    let cert = is_s_meromorphic_at_pole(&op, &default_alpha_samples()).map_err(|e| e.to_string())?;
    let (t_star, x_star) = two_soliton_triple_zero();
    let pass = counts_ok
        && e.at.tau_zero_multiplicity == 3
        && e.before.tau_zero_multiplicity == 1
        && (c2 - 6.0).norm() < 1e-3
        && cert.verdict
        && cert.r == Some(2)
        && e.negative_squares == 1;
    Ok(outcome(
        pass,
        format!(
            "{} event(s); jump at t={:.6} x={:.6} (closed form {t_star:.6}, {x_star:.6}), c_-2={:.6}, r=2 certified {}, count 1 at all {} times {}",
            res.events.len(),
            e.at.time,
            e.at.position,
            c2.re,
            cert.verdict && cert.r == Some(2),
            res.negative_counts.len(),
            counts_ok
        ),
    ))
}

fn genus1_spectra() -> Result<Outcome, String> {
    let rect = WeierstrassData::new(1.0, I).map_err(|e| e.to_string())?;
    let rhombic = WeierstrassData::new(1.0, Complex64::new(0.5, 0.6)).map_err(|e| e.to_string())?;
    let rc = canonical_contour(&rect, 256).map_err(|e| e.to_string())?;
    let hc = canonical_contour(&rhombic, 256).map_err(|e| e.to_string())?;
    let rs = spectrum_projection(&rc);
    let hs = spectrum_projection(&hc);
    let rect_max = rs.iter().map(|s| s.max_imag).fold(0.0, f64::max);
    let rhombic_max = hs
        .iter()
        .filter(|s| s.label == SpectrumLabel::Complex)
        .map(|s| s.max_imag)
        .fold(0.0, f64::max);
    let defect = contour_defect(&rc).max(contour_defect(&hc));
    let pass = rect_max < 1e-5 && rhombic_max > 1e-2 && defect < 1e-8 && rs.len() >= 2 && hs.len() >= 2;
    Ok(outcome(
        pass,
        format!(
            "rectangular {} components, max|Im alpha| {rect_max:.1e}; rhombic {} components, complex max|Im alpha| {rhombic_max:.3}; max|Im p| {defect:.1e}",
            rs.len(),
            hs.len()
        ),
    ))
}

fn genus1_count() -> Result<Outcome, String> {
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, om2) in [("rectangular", I), ("rhombic", Complex64::new(0.5, 0.6))] {
        let w = WeierstrassData::new(1.0, om2).map_err(|e| e.to_string())?;
        let mut totals = Vec::new();
        for kappa in [c(1.0), I, Complex64::from_polar(1.0, std::f64::consts::PI / 7.0)] {
            let signs = bloch_norm_signs(kappa, &w, 0.0, 24).map_err(|e| e.to_string())?;
            let tail_positive = signs.entries.iter().skip(10).all(|e| e.sign == NormSign::Positive);
            pass &= signs.negative_total == 1 && tail_positive;
            totals.push(format!(
                "{}{}",
                signs.negative_total,
                if tail_positive { "" } else { "!" }
            ));
        }
        lines.push(format!("{name} {}", totals.join("/")));
    }
    Ok(outcome(
        pass,
        format!(
            "negative totals for kappa = 1/i/e^(i pi/7): {}; tail beyond 10th point positive",
            lines.join(", ")
        ),
    ))
}

fn special_functions() -> Result<Outcome, String> {
    let mut worst = [0.0f64; 3];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for om2 in [I, Complex64::new(0.5, 0.6)] {
        let w = WeierstrassData::new(1.0, om2).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let z = w.from_lattice_coords(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            if w.lattice_distance(z) < 0.05 {
                continue;
            }
            let p = w.wp(z).map_err(|e| e.to_string())?;
            let dp = w.wp_prime(z).map_err(|e| e.to_string())?;
            let rhs = 4.0 * p * p * p - w.g2() * p - w.g3();
            worst[0] = worst[0].max((dp * dp - rhs).norm() / (1.0 + rhs.norm()));
            for (shift, eta, half) in [
                (2.0 * c(w.omega1()), w.eta1(), c(w.omega1())),
                (2.0 * om2, w.eta2(), om2),
            ] {
                let lhs = w.sigma(z + shift);
                let expected = -(2.0 * eta * (z + half)).exp() * w.sigma(z);
                worst[1] = worst[1].max((lhs - expected).norm() / (1.0 + expected.norm()));
            }
            let a = w.from_lattice_coords(rng.random_range(-0.45..0.45), rng.random_range(-0.45..0.45));
            let x = Complex64::new(rng.random_range(0.3..0.7), rng.random_range(-0.1..0.1));
            if w.lattice_distance(a) < 0.1 || w.lattice_distance(a - x) < 0.1 {
                continue;
            }
            let (psi, alpha) = lame_bloch(a, x, &w).map_err(|e| e.to_string())?;
            let h = (w.lattice_distance(x) / 50.0).min(1e-2);
            let d2 = second_derivative(|z| lame_bloch(a, z, &w).map(|v| v.0).unwrap_or(c(f64::NAN)), x, h);
            let wpx = w.wp(x).map_err(|e| e.to_string())?;
            let residual = -d2 + 2.0 * wpx * psi - alpha * psi;
            let scale = (psi.norm() * (1.0 + wpx.norm() + alpha.norm())).max(1.0);
            worst[2] = worst[2].max(residual.norm() / scale);
        }
    }
    Ok(outcome(
        worst[0] < 1e-10 && worst[1] < 1e-10 && worst[2] < 1e-8,
        format!(
            "(wp')^2 identity {:.1e} (< 1e-10), sigma quasi-periodicity {:.1e} (< 1e-10), Lame residual {:.1e} (< 1e-8)",
            worst[0], worst[1], worst[2]
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion, Duration); 8] = [
        (
            "1 normal-form classification",
            normal_form_classification,
            Duration::from_secs(60),
        ),
        ("2 negative-square counts", gram_counts, Duration::from_secs(300)),
        ("3 detour independence", detour_independence, Duration::from_secs(600)),
        ("4 symmetry of L", symmetry, Duration::from_secs(600)),
        ("5 singular 2-soliton jump", soliton_jump, Duration::from_secs(120)),
        ("6 genus-1 spectra", genus1_spectra, Duration::from_secs(300)),
        ("7 genus-1 Bloch-norm count", genus1_count, Duration::from_secs(600)),
        (
            "8 special-function self-tests",
            special_functions,
            Duration::from_secs(600),
        ),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {name}: {} [{:.2}s / {}s] {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {}/8 criteria passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
