use esr_core::channel::{CorrelationConfig, SystemConfig};
use esr_core::engine::{esr_os_exact, esr_ss_exact, Scheme};
use esr_core::quadrature::QuadOptions;
use esr_core::simulation::{
    draw_channels, estimate_esr, quadrature_esr, quadrature_esr_with, select_os, select_os_snr, select_ss,
    select_ss_snr, ChannelSynth, McPlan, ToeplitzCorrelation, CHUNK_SIZE,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

fn cfg(k: u32, l: u32, m_d: u32, m_e: u32, ld: f64, le: f64) -> SystemConfig {
    SystemConfig::new(k, l, m_d, m_e, ld, le).unwrap()
}

fn corr(s: f64, d: f64, e: f64) -> CorrelationConfig {
    CorrelationConfig::new(s, d, e).unwrap()
}

#[test]
fn white_tensor_has_unit_variance() {
    let c = cfg(1, 1, 1, 1, 1.0, 1.0);
    let synth = ChannelSynth::new(&c, &CorrelationConfig::IID);
    let n = 1_000_000;
    let len = synth.white_len();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut white = vec![0.0; 2 * len];
    let mut power = vec![0.0; len];
    let mut mean = vec![Complex64::new(0.0, 0.0); len];
    for _ in 0..n {
        synth.draw_white(&mut rng, &mut white);
        for i in 0..len {
            let z = Complex64::new(white[2 * i], white[2 * i + 1]);
            power[i] += z.norm_sqr();
            mean[i] += z;
        }
    }
    let err: f64 = power.iter().map(|p| (p / n as f64 - 1.0).abs()).sum::<f64>() / len as f64;
    assert!(err < 5e-3, "{err}");
    let bias: f64 = mean.iter().map(|m| m.norm() / n as f64).sum::<f64>() / len as f64;
    assert!(bias < 5e-3);
}

/// Sample `E[a b*]` over `n` draws.
fn covariance(c: &SystemConfig, cr: &CorrelationConfig, n: usize, seed: u64, pick: &[usize]) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = pick.len();
    let mut acc = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for _ in 0..n {
        let r = draw_channels(c, cr, &mut rng);
        for i in 0..d {
            for j in 0..d {
                acc[i][j] += r.h_d[pick[i]] * r.h_d[pick[j]].conj();
            }
        }
    }
    for row in &mut acc {
        for v in row.iter_mut() {
            *v /= n as f64;
        }
    }
    acc
}

#[test]
fn iid_covariance_is_scaled_identity() {
    let ld = 3.0;
    let c = cfg(2, 1, 2, 1, ld, 1.0);
    let n = 100_000;
    let cov = covariance(&c, &CorrelationConfig::IID, n, 5, &[0, 1, 2, 3]);
    let tol = 3.0 * ld / (n as f64).sqrt();
    for (i, row) in cov.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j { ld } else { 0.0 };
            assert!((v.re - want).abs() < tol && v.im.abs() < tol, "({i},{j}) {v}");
        }
    }
}

fn correlation(cov: &[Vec<Complex64>]) -> f64 {
    cov[0][1].re / (cov[0][0].re * cov[1][1].re).sqrt()
}

#[test]
fn path_correlation() {
    let c = cfg(1, 1, 2, 1, 1.0, 1.0);
    let cov = covariance(&c, &corr(0.0, 0.9, 0.0), 100_000, 6, &[0, 1]);
    assert!((correlation(&cov) - 0.9).abs() < 0.01);
}

#[test]
fn transmitter_correlation() {
    // h_d is laid out as [(l K + k) M_D + i]: entries 0 and 1 share l and i.
    let c = cfg(2, 1, 1, 1, 1.0, 1.0);
    let cov = covariance(&c, &corr(0.5, 0.0, 0.0), 100_000, 7, &[0, 1]);
    assert!((correlation(&cov) - 0.5).abs() < 0.01);
}

#[test]
fn eavesdropper_correlation() {
    let c = cfg(1, 1, 1, 3, 1.0, 2.0);
    let cr = corr(0.0, 0.0, 0.8);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 100_000;
    let (mut p0, mut p1, mut x) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        let r = draw_channels(&c, &cr, &mut rng);
        p0 += r.h_e[0].norm_sqr();
        p1 += r.h_e[1].norm_sqr();
        x += (r.h_e[0] * r.h_e[1].conj()).re;
    }
    assert!((p0 / n as f64 - 2.0).abs() < 0.05);
    assert!((x / (p0 * p1).sqrt() - 0.8).abs() < 0.01);
}

#[test]
fn toeplitz_square_root() {
    for (size, rho) in [(1, 0.3), (3, 0.0), (4, 0.9), (6, 0.5)] {
        let t = ToeplitzCorrelation::new(size, rho, 2.5);
        let m = t.matrix();
        assert!(m.clone().symmetric_eigen().eigenvalues.iter().all(|&e| e > 0.0));
        let r = t.sqrt();
        assert!((&r * &r - &m).abs().max() < 1e-12);
        assert!((m[(0, size - 1)] - 2.5 * rho.powi(size as i32 - 1)).abs() < 1e-15);
    }
}

#[test]
fn fast_snr_path_matches_realization() {
    for cr in [CorrelationConfig::IID, corr(0.5, 0.9, 0.3)] {
        let c = cfg(3, 2, 2, 3, 4.0, 0.5);
        let synth = ChannelSynth::new(&c, &cr);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut white = vec![0.0; 2 * synth.white_len()];
        let (mut d, mut e) = (vec![0.0; 6], vec![0.0; 3]);
        for _ in 0..100 {
            synth.draw_white(&mut rng, &mut white);
            synth.snrs_from_white(&white, &mut d, &mut e);
            let (rd, re) = synth.realize(&white).snrs();
            for (a, b) in d.iter().zip(&rd).chain(e.iter().zip(&re)) {
                assert!((a - b).abs() <= 1e-12 * b.max(1.0));
            }
        }
    }
}

#[test]
fn hand_realization_selection() {
    // γ_D[k][l] = [[3, 1], [0.5, 9]], γ_E = [1, 4], stored as [l K + k].
    let d = [3.0, 0.5, 1.0, 9.0];
    let e = [1.0, 4.0];
    let os = select_os_snr(2, 2, &d, &e);
    assert_eq!((os.k, os.l), (0, 0));
    assert_eq!(os.gamma_s, 2.0);
    let ss = select_ss_snr(2, 2, &d, &e);
    assert_eq!((ss.k, ss.l), (1, 1));
    assert_eq!(ss.gamma_s, 2.0);
}

#[test]
fn single_pair_selection() {
    let c = cfg(1, 1, 2, 2, 3.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let r = draw_channels(&c, &CorrelationConfig::IID, &mut rng);
        let want = (1.0 + r.gamma_d(0, 0)) / (1.0 + r.gamma_e(0));
        let os = select_os(&r);
        let ss = select_ss(&r);
        assert_eq!((os.k, os.l, ss.k, ss.l), (0, 0, 0, 0));
        assert_eq!(os.gamma_s, want);
        assert_eq!(ss.gamma_s, want);
    }
}

proptest! {
    #[test]
    fn os_dominates(k in 1usize..=4, l in 1usize..=4, seed in any::<u64>()) {
        let c = cfg(k as u32, l as u32, 2, 2, 5.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = draw_channels(&c, &corr(0.3, 0.2, 0.1), &mut rng);
        let (d, e) = r.snrs();
        let os = select_os_snr(k, l, &d, &e);
        let ss = select_ss_snr(k, l, &d, &e);
        prop_assert!(os.gamma_s >= ss.gamma_s);
        for kk in 0..k {
            for ll in 0..l {
                prop_assert!(os.gamma_s >= (1.0 + d[ll * k + kk]) / (1.0 + e[kk]));
                prop_assert!(d[ss.l * k + ss.k] >= d[ll * k + kk]);
            }
        }
    }
}

#[test]
fn monte_carlo_is_deterministic() {
    let c = cfg(2, 2, 2, 2, 10.0, 1.0);
    let cr = corr(0.5, 0.0, 0.2);
    let trials = 3 * CHUNK_SIZE + 17;
    let a = estimate_esr(&c, &cr, Scheme::Os, trials, 42).unwrap();
    let b = estimate_esr(&c, &cr, Scheme::Os, trials, 42).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    assert_eq!((a.trials, a.seed), (trials, 42));
    let other = estimate_esr(&c, &cr, Scheme::Os, trials, 43).unwrap();
    assert_ne!(a.mean, other.mean);
    // Chunk order, not completion order, fixes the result.
    let plan = McPlan::new(&c, &[cr], trials, 42).unwrap();
    let mut chunks: Vec<_> = (0..plan.chunks()).rev().map(|i| (i, plan.run_chunk(i))).collect();
    chunks.sort_by_key(|(i, _)| *i);
    let report = plan.finish(chunks.iter().map(|(_, s)| s));
    assert_eq!(report.estimate(0, Scheme::Os).mean.to_bits(), a.mean.to_bits());
}

#[test]
fn monte_carlo_rejects_short_runs() {
    let c = cfg(1, 1, 1, 1, 10.0, 1.0);
    assert!(estimate_esr(&c, &CorrelationConfig::IID, Scheme::Os, 999, 1).is_err());
}

#[test]
fn monte_carlo_agrees_with_closed_forms() {
    let c = cfg(1, 1, 1, 1, 10.0, 1.0);
    let mc = estimate_esr(&c, &CorrelationConfig::IID, Scheme::Os, 10_000_000, 1).unwrap();
    let exact = esr_os_exact(&c).unwrap().value;
    assert!((mc.mean - exact).abs() < 4.0 * mc.stderr, "{} ± {} vs {exact}", mc.mean, mc.stderr);

    let c = cfg(2, 2, 2, 2, 10.0, 1.0);
    let report = McPlan::new(&c, &[CorrelationConfig::IID], 10_000_000, 2).unwrap().run();
    for (scheme, exact) in [
        (Scheme::Os, esr_os_exact(&c).unwrap().value),
        (Scheme::Ss, esr_ss_exact(&c).unwrap().value),
    ] {
        let e = report.estimate(0, scheme);
        assert!((e.mean - exact).abs() < 4.0 * e.stderr, "{scheme:?}: {} ± {} vs {exact}", e.mean, e.stderr);
    }
}

#[test]
fn quadrature_examples() {
    let c = cfg(1, 1, 1, 1, 2.0, 2.0);
    let os = quadrature_esr(&c, Scheme::Os).unwrap().value;
    let ss = quadrature_esr(&c, Scheme::Ss).unwrap().value;
    assert!((os - ss).abs() < 1e-10);

    let c = cfg(2, 2, 2, 2, 10.0, 1.0);
    let v = quadrature_esr(&c, Scheme::Os).unwrap().value;
    assert!((v - 3.759_173_777_505_736).abs() < 1e-9);
    let tighter = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_panels: 8000,
    };
    let v2 = quadrature_esr_with(&c, Scheme::Os, false, &tighter).unwrap().value;
    assert!((v - v2).abs() < 1e-8);

    let c = cfg(1, 1, 1, 1, 0.01, 1.0);
    let v = quadrature_esr(&c, Scheme::Os).unwrap().value;
    assert!((0.0..=0.02).contains(&v));
}
