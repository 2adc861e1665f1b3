mod common;

use common::{c, I};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smero_core::linalg::{hermitian_eigenvalues, inertia};
use smero_core::space::*;
use smero_core::Orientation;

fn compact(rs: &[u32]) -> SpaceSpec {
    let poles = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| SpacePole {
            position: -1.0 + 1.1 * i as f64,
            r,
        })
        .collect();
    SpaceSpec::new(poles, SpaceMode::CompactSupport { a: -4.0, b: 4.0 }).unwrap()
}

fn bloch(rs: &[u32], kappa: Complex64) -> SpaceSpec {
    SpaceSpec::new(compact(rs).poles().to_vec(), SpaceMode::Bloch { period: 4.0, kappa }).unwrap()
}

fn pair(s: &SpaceSpec, seed: u64) -> (SpaceElement, SpaceElement) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (
        s.random_admissible(&mut rng).unwrap(),
        s.random_admissible(&mut rng).unwrap(),
    )
}

fn space_strategy() -> impl Strategy<Value = SpaceSpec> {
    (
        prop::collection::vec(1u32..=3, 1..=2),
        any::<bool>(),
        0.0f64..std::f64::consts::TAU,
    )
        .prop_map(|(rs, periodic, phase)| {
            if periodic {
                bloch(&rs, Complex64::from_polar(1.0, phase))
            } else {
                compact(&rs)
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn detour_radius_and_orientation_do_not_matter(s in space_strategy(), seed in any::<u64>()) {
        let (f, g) = pair(&s, seed);
        let base = inner_product(&f, &g, &s).unwrap();
        let lower = inner_product_with(&f, &g, &s, &InnerProductOptions {
            orientation: Orientation::Lower,
            detour_radius: None,
        }).unwrap();
        let half = inner_product_with(&f, &g, &s, &InnerProductOptions {
            orientation: Orientation::Upper,
            detour_radius: Some(0.5 * s.detour_radius()),
        }).unwrap();
        let scale = detour_norm(&f, &s).unwrap() * detour_norm(&g, &s).unwrap();
        prop_assert!((base - lower).norm() <= 1e-12 * scale.max(1.0));
        prop_assert!((base - half).norm() <= s.quad_tol() * scale.max(1.0));
    }

    #[test]
    fn pairing_is_hermitian(s in space_strategy(), seed in any::<u64>()) {
        let (f, g) = pair(&s, seed);
        let fg = inner_product(&f, &g, &s).unwrap();
        let gf = inner_product(&g, &f, &s).unwrap();
        let scale = detour_norm(&f, &s).unwrap() * detour_norm(&g, &s).unwrap();
        prop_assert!((fg - gf.conj()).norm() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn admissible_pairs_have_no_residue(s in space_strategy(), seed in any::<u64>()) {
        let (f, g) = pair(&s, seed);
        for j in 0..s.poles().len() {
            let res = pair_residue(&f, &g, j).unwrap();
            prop_assert!(res.norm() < 1e-9);
        }
    }
}

#[test]
fn negative_count_does_not_depend_on_the_multiplier() {
    for rs in [vec![1], vec![2, 3]] {
        let counts: Vec<usize> = [
            c(1.0),
            I,
            c(-1.0),
            Complex64::from_polar(1.0, std::f64::consts::PI / 5.0),
        ]
        .into_iter()
        .map(|k| {
            let s = bloch(&rs, k);
            negative_count_gram(&s, recommended_basis_size(&s), 3).unwrap()
        })
        .collect();
        let formula = negative_count_formula(&bloch(&rs, c(1.0)));
        assert!(counts.iter().all(|&n| n == formula), "{rs:?}: {counts:?}");
    }
}

#[test]
fn singular_window_and_bump_span_one_negative_square() {
    let s = compact(&[1]);
    let singular = s.windowed_monomial(0, -1).unwrap();
    let bump = s.bump(-1.0, 0.8, 0.0, 0.0).unwrap();
    let gram = gram_matrix(&[singular, bump], &s).unwrap();
    let ev = hermitian_eigenvalues(&gram, 2);
    assert_eq!(inertia(&ev, 1e-10 * ev[1].abs()), (1, 0, 1));
}

#[test]
fn forbidden_constant_term_is_detected() {
    let s = SpaceSpec::new(
        vec![SpacePole { position: 0.0, r: 1 }],
        SpaceMode::CompactSupport { a: -3.0, b: 3.0 },
    )
    .unwrap();
    let good = s.windowed_monomial(0, -1).unwrap();
    let raw_fn: ElementFn = std::sync::Arc::new(|z: Complex64| (-z * z).exp() * (1.0 / z + 1.0));
    let err = s.element_from_fn(raw_fn).unwrap_err();
    assert_eq!(err.name(), "MembershipViolation");
    // y⁻¹·(y⁻¹ + 1) has residue 1 by direct convolution.
    let good_window = good.local_data()[0].clone();
    let mut raw = good_window.clone();
    raw.set_coeff(0, raw.coeff_or_zero(0) + 1.0);
    let direct = good_window.mul(&raw.conj_coeffs()).unwrap().residue();
    assert!(direct.norm() > 0.5);
    assert!(check_membership(&good, &s).unwrap().member);
}
