mod common;

use common::{c, tau_real_zeros, two_soliton_tau, two_soliton_triple_zero};
use proptest::prelude::*;
use smero_core::local::{default_alpha_samples, is_s_meromorphic_at_pole};
use smero_core::potential::{evaluate, evolve_track, find_real_poles, kdv_residual, local_expansion, PotentialSpec};

fn singular_pair() -> PotentialSpec {
    PotentialSpec::soliton(vec![1.0, 2.0], vec![0.0, 0.0], vec![-1, 1], 0.0).unwrap()
}

#[test]
fn jump_matches_the_closed_form_triple_zero() {
    let (t_star, x_star) = two_soliton_triple_zero();
    let d = two_soliton_tau(x_star, t_star);
    assert!(d[0].abs() < 1e-12 && d[1].abs() < 1e-12 && d[2].abs() < 1e-11 && d[3].abs() > 1e-3);

    let res = evolve_track(&singular_pair(), (-2.0, 2.0), 200, (-20.0, 20.0)).unwrap();
    assert_eq!(res.events.len(), 1);
    let e = &res.events[0];
    assert_eq!(e.transition(), "2/y^2 → 6/y^2");
    assert!((e.at.time - t_star).abs() < 1e-8, "t = {}", e.at.time);
    assert!((e.at.position - x_star).abs() < 1e-6, "x = {}", e.at.position);
    assert!(res.negative_counts.iter().all(|&n| n == 1));

    let at = singular_pair().with_time(e.at.time);
    let op = local_expansion(&at, c(e.at.position), 8).unwrap();
    assert!((op.u_coeffs().coeff_or_zero(-2) - 6.0).norm() < 1e-3);
    let cert = is_s_meromorphic_at_pole(&op, &default_alpha_samples()).unwrap();
    assert!(cert.verdict && cert.r == Some(2));
}

#[test]
fn pole_search_agrees_with_a_dense_tau_scan() {
    for t in [-1.5, -0.3, 0.01, 0.2, 1.1] {
        let p = singular_pair().with_time(t);
        let found: Vec<f64> = find_real_poles(&p, (-20.0, 20.0))
            .unwrap()
            .iter()
            .map(|q| q.position)
            .collect();
        let scan = tau_real_zeros(t, (-20.0, 20.0), 40_000);
        assert_eq!(found.len(), scan.len(), "t = {t}");
        for (a, b) in found.iter().zip(&scan) {
            assert!((a - b).abs() < 1e-8, "t = {t}: {a} vs {b}");
        }
    }
}

#[test]
fn potential_solves_kdv_away_from_poles() {
    for t in [-0.5, 0.3] {
        let p = singular_pair().with_time(t);
        let poles: Vec<f64> = find_real_poles(&p, (-20.0, 20.0))
            .unwrap()
            .iter()
            .map(|q| q.position)
            .collect();
        let grid: Vec<f64> = (0..40)
            .map(|i| -6.0 + 0.3 * i as f64)
            .filter(|x| poles.iter().all(|q| (x - q).abs() > 0.2))
            .collect();
        let res = kdv_residual(&p, t, &grid).unwrap();
        assert!(res < 1e-4, "t = {t}: residual {res:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_matches_minus_two_log_tau_derivative(x in -5.0f64..5.0, t in -1.0f64..1.0) {
        let d = two_soliton_tau(x, t);
        prop_assume!(d[0].abs() > 1e-3);
        let expected = -2.0 * (d[2] / d[0] - (d[1] / d[0]).powi(2));
        let got = evaluate(&singular_pair().with_time(t), c(x)).unwrap();
        prop_assert!((got.re - expected).abs() <= 1e-8 * (1.0 + expected.abs()));
        prop_assert!(got.im.abs() <= 1e-10 * (1.0 + expected.abs()));
    }
}
