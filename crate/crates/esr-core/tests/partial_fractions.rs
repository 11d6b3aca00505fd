use esr_core::partial_fractions::{
    eval_j0_exact, eval_j0_highsnr, eval_j1_exact, eval_j1_highsnr, eval_j_asymptotic, expand, group_poles, Pole,
    PoleStructure,
};
use esr_core::quadrature::{integrate_to_infinity, QuadOptions};
use esr_core::real::{Arith, MpCtx, Real, F64};
use esr_core::EsrError;
use proptest::prelude::*;

fn tight() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_panels: 4000,
    }
}

/// `∫_1^∞ e^{-l̃ x / λ_D} R(x) dx`, or without the exponential when `l_tilde` is 0.
fn oracle(s: &PoleStructure, l_tilde: u32) -> f64 {
    let a = l_tilde as f64 / s.lambda_d;
    let c_max = (0..s.poles.len()).map(|i| s.location_f64(i)).fold(1.0, f64::max);
    let scale = if l_tilde > 0 { (1.0 / a).min(c_max).max(1.0) } else { c_max };
    integrate_to_infinity(|x| (-a * x).exp() * s.eval(&F64, &x), 1.0, scale, &tight())
        .unwrap()
        .value
}

fn coeff(s: &PoleStructure, c: f64, t: u32) -> f64 {
    expand(&F64, s)
        .terms
        .iter()
        .find(|x| (x.location - c).abs() < 1e-12 && x.power == t)
        .map(|x| x.coeff)
        .unwrap()
}

#[test]
fn grouping_examples() {
    let s = group_poles(&[1], &[0], 1, 5.0, 2.0, false);
    assert_eq!(s.poles.len(), 1);
    assert_eq!(s.poles[0].multiplicity, 1);
    assert_eq!(s.location_f64(0), 2.5);
    assert_eq!(s.singleton_indices(), vec![0]);

    let s = group_poles(&[2, 2], &[0, 1], 1, 3.0, 1.0, false);
    assert_eq!(s.poles.len(), 1);
    assert_eq!(s.poles[0].multiplicity, 3);
    assert_eq!(s.location_f64(0), 1.5);
    assert_eq!(s.repeated_groups().count(), 1);

    let s = group_poles(&[1, 2], &[0, 0], 2, 1.0, 1.0, false);
    assert_eq!(s.poles.len(), 2);
    assert!(s.poles.iter().all(|p| p.multiplicity == 2 && p.members.len() == 1));
}

#[test]
fn expansion_examples() {
    let s = group_poles(&[1], &[0], 1, 2.0, 1.0, true);
    assert!((expand(&F64, &s).a_coeff.unwrap() - 0.5).abs() < 1e-15);
    assert!((coeff(&s, 2.0, 1) + 0.5).abs() < 1e-15);

    let s = group_poles(&[1], &[1], 1, 1.0, 1.0, true);
    let pf = expand(&F64, &s);
    assert!((pf.a_coeff.unwrap() - 1.0).abs() < 1e-15);
    assert!((coeff(&s, 1.0, 1) + 1.0).abs() < 1e-15);
    assert!((coeff(&s, 1.0, 2) + 1.0).abs() < 1e-15);
    for x in [1.0, 2.0, 3.7] {
        let want = 1.0 / (x * (x + 1.0) * (x + 1.0));
        assert!((pf.eval(&F64, &x) - want).abs() < 1e-14 * want);
    }

    let s = group_poles(&[3, 1], &[0, 0], 1, 3.0, 1.0, false);
    assert!((coeff(&s, 1.0, 1) - 0.5).abs() < 1e-15);
    assert!((coeff(&s, 3.0, 1) + 0.5).abs() < 1e-15);
}

#[test]
fn j0_exact_examples() {
    let s = group_poles(&[1], &[0], 1, 1.0, 1.0, true);
    let v = eval_j0_exact(&F64, &s, 1).unwrap();
    // Γ(0,1) - e Γ(0,2).
    assert!((v - 0.086_458_564_735_430_77).abs() < 1e-14);
    assert!((v - oracle(&s, 1)).abs() < 1e-12 * v);

    let s = group_poles(&[1], &[0], 1, 1e4, 1.0, true);
    let v = eval_j0_exact(&F64, &s, 1).unwrap();
    assert!((v - oracle(&s, 1)).abs() < 1e-9 * v);

    let s = group_poles(&[1, 2], &[0, 0], 1, 2.0, 1.0, true);
    let v = eval_j0_exact(&F64, &s, 3).unwrap();
    assert!((v - oracle(&s, 3)).abs() < 1e-9 * v);
}

#[test]
fn j1_exact_examples() {
    let s = group_poles(&[1], &[0], 1, 1.0, 1.0, false);
    let v = eval_j1_exact(&F64, &s, 1).unwrap();
    // e Γ(0,2).
    assert!((v - 0.132_925_369_660_089_5).abs() < 1e-14);
    assert!((v - oracle(&s, 1)).abs() < 1e-12 * v);

    let s = group_poles(&[1, 1], &[0, 0], 1, 1.0, 1.0, false);
    let v = eval_j1_exact(&F64, &s, 2).unwrap();
    assert!((v - oracle(&s, 2)).abs() < 1e-9 * v);

    let s = group_poles(&[1, 2], &[0, 0], 1, 1.0, 1.0, false).with_numerator(1);
    let v = eval_j1_exact(&F64, &s, 3).unwrap();
    assert!((v - oracle(&s, 3)).abs() < 1e-9 * v);
}

#[test]
fn divergent_high_snr_integrals_are_rejected() {
    let s = group_poles(&[1], &[0], 1, 1.0, 1.0, false);
    assert!(matches!(eval_j1_highsnr(&F64, &s), Err(EsrError::Domain(_))));
    assert!(matches!(eval_j_asymptotic(&F64, &s), Err(EsrError::Domain(_))));
    assert!(eval_j1_exact(&F64, &s, 1).is_ok());
}

#[test]
fn contracts() {
    let s = group_poles(&[1], &[0], 1, 1.0, 1.0, true);
    assert!(matches!(eval_j1_exact(&F64, &s, 1), Err(EsrError::Contract(_))));
    assert!(matches!(eval_j1_highsnr(&F64, &s), Err(EsrError::Contract(_))));
    let s = group_poles(&[1], &[0], 1, 1.0, 1.0, false);
    assert!(matches!(eval_j0_exact(&F64, &s, 1), Err(EsrError::Contract(_))));
    assert!(matches!(eval_j0_highsnr(&F64, &s), Err(EsrError::Contract(_))));
}

#[test]
fn j0_highsnr_examples() {
    let s = group_poles(&[1], &[0], 1, 1.0, 1.0, true);
    let v = eval_j0_highsnr(&F64, &s).unwrap();
    assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    assert!((v - oracle(&s, 0)).abs() < 1e-12);

    let s = group_poles(&[1], &[0], 1, 1e-8, 1.0, true);
    let v = eval_j0_highsnr(&F64, &s).unwrap();
    let q = integrate_to_infinity(|x| 1.0 / (x * (x + 1e-8)), 1.0, 1.0, &tight()).unwrap().value;
    assert!((v - q).abs() < 1e-6 * q);

    let s = group_poles(&[1, 2], &[0, 0], 1, 2.0, 1.0, true);
    let v = eval_j0_highsnr(&F64, &s).unwrap();
    assert!((v - oracle(&s, 0)).abs() < 1e-9 * v);
}

#[test]
fn j1_highsnr_examples() {
    let s = group_poles(&[1], &[1], 1, 1.0, 1.0, false);
    assert!((eval_j1_highsnr(&F64, &s).unwrap() - 0.5).abs() < 1e-15);
    let s = PoleStructure {
        poles: vec![Pole {
            l: 1,
            multiplicity: 3,
            members: vec![0],
        }],
        ..group_poles(&[1], &[0], 2, 1.0, 1.0, false).with_numerator(1)
    };
    let v = eval_j1_highsnr(&F64, &s).unwrap();
    assert!((v - 0.375).abs() < 1e-15);
    assert!((v - oracle(&s, 0)).abs() < 1e-12);

    let s = group_poles(&[1, 2], &[0, 1], 1, 3.0, 1.0, false).with_numerator(1);
    let v = eval_j1_highsnr(&F64, &s).unwrap();
    assert!((v - oracle(&s, 0)).abs() < 1e-9 * v);
}

#[test]
fn asymptotic_examples() {
    let s = group_poles(&[1], &[0], 1, 1e6, 1.0, true);
    let hs = eval_j0_highsnr(&F64, &s).unwrap();
    assert!(((hs - eval_j_asymptotic(&F64, &s).unwrap()) / hs).abs() < 2e-6);

    let s = group_poles(&[1, 1], &[0, 0], 1, 1e6, 1.0, false);
    let hs = eval_j1_highsnr(&F64, &s).unwrap();
    assert!(((hs - eval_j_asymptotic(&F64, &s).unwrap()) / hs).abs() < 2e-6);

    let s = group_poles(&[1], &[0], 1, 1.0, 1.0, true);
    let gap = eval_j0_highsnr(&F64, &s).unwrap() - eval_j_asymptotic(&F64, &s).unwrap();
    assert!(gap.abs() > 0.1);
}

fn structure() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, u32, f64, bool)> {
    (1usize..=3)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(1u32..=3, k),
                prop::collection::vec(0u32..=2, k),
                1u32..=3,
                -1.0f64..2.0,
                any::<bool>(),
            )
        })
        .prop_map(|(l, off, m_e, e, origin)| (l, off, m_e, 10f64.powf(e), origin))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn recombination(
        (l_vec, off, m_e, ratio, origin) in structure(),
        xs in prop::collection::vec(1.5f64..50.0, 32),
        num in 0u32..=2,
    ) {
        let s = group_poles(&l_vec, &off, m_e, ratio, 1.0, origin);
        let num = if origin { 0 } else { num.min(s.denominator_degree() - 1) };
        let s = s.clone().with_numerator(num);
        // Close repeated poles cancel about 30 digits; the engine raises precision the same way.
        let ar = MpCtx::new(256);
        let pf = expand(&ar, &s);
        for x in xs {
            let xm = ar.num(x);
            let want = s.eval(&ar, &xm).to_f64();
            let got = pf.eval(&ar, &xm).to_f64();
            prop_assert!((got - want).abs() <= 1e-9 * want.abs(), "x={} {} vs {}", x, got, want);
        }
    }

    #[test]
    fn residues_sum_to_zero((l_vec, off, m_e, ratio, origin) in structure()) {
        let s = group_poles(&l_vec, &off, m_e, ratio, 1.0, origin);
        prop_assume!(s.denominator_degree() >= 2);
        let pf = expand(&F64, &s);
        let mut total = pf.a_coeff.unwrap_or(0.0);
        let mut scale = total.abs();
        for t in pf.terms.iter().filter(|t| t.power == 1) {
            total += t.coeff;
            scale = scale.max(t.coeff.abs());
        }
        prop_assert!(total.abs() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn permutation_invariance((l_vec, off, m_e, ratio, origin) in structure(), rot in 0usize..3) {
        let k = l_vec.len();
        let mut l2 = l_vec.clone();
        let mut o2 = off.clone();
        l2.rotate_left(rot % k);
        o2.rotate_left(rot % k);
        l2.reverse();
        o2.reverse();
        let a = group_poles(&l_vec, &off, m_e, ratio, 1.0, origin);
        let b = group_poles(&l2, &o2, m_e, ratio, 1.0, origin);
        let l_tilde: u32 = l_vec.iter().sum();
        let (va, vb) = if origin {
            (eval_j0_exact(&F64, &a, l_tilde).unwrap(), eval_j0_exact(&F64, &b, l_tilde).unwrap())
        } else {
            (eval_j1_exact(&F64, &a, l_tilde).unwrap(), eval_j1_exact(&F64, &b, l_tilde).unwrap())
        };
        prop_assert!((va - vb).abs() <= 1e-12 * va.abs().max(vb.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_forms_match_quadrature((l_vec, off, m_e, ratio, origin) in structure()) {
        let l_tilde: u32 = l_vec.iter().sum();
        let s = group_poles(&l_vec, &off, m_e, ratio, 1.0, origin);
        let ar = MpCtx::new(128);
        let (exact, hs) = if origin {
            (eval_j0_exact(&ar, &s, l_tilde).unwrap(), eval_j0_highsnr(&ar, &s))
        } else {
            (eval_j1_exact(&ar, &s, l_tilde).unwrap(), eval_j1_highsnr(&ar, &s))
        };
        let exact = exact.to_f64();
        let hs = hs.map(|v| v.to_f64());
        let qe = oracle(&s, l_tilde);
        prop_assert!((exact - qe).abs() <= 1e-8 * qe.abs(), "exact {} vs {}", exact, qe);
        let Ok(hs) = hs else {
            prop_assert!(s.denominator_degree() < 2);
            return Ok(());
        };
        let qh = oracle(&s, 0);
        prop_assert!((hs - qh).abs() <= 1e-8 * qh.abs(), "high-snr {} vs {}", hs, qh);
    }
}
