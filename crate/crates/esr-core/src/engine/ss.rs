//! SS scheme: the selected pair maximizes `γ_D` over all `KL` links, so
//! `C = (1/ln2) Σ_k (-1)^{k+1} C(KL,k) ∫_1^∞ Ψ_k(x) / x dx` with `Ψ_k` the
//! probability that `k` given links all beat the ratio `x`.

use super::common::{m_table, mn_table, ratio_family, rising, single_pole_family};
use super::{alternating_binomial, harmonic_r, Pass};
use crate::channel::SystemConfig;
use crate::error::{EsrError, Result};
use crate::partial_fractions::{GammaCache, Tally};
use crate::real::{Arith, Real};
use crate::special::factorial_in;

pub(crate) fn check_budget(cfg: &SystemConfig, budget: f64) -> Result<()> {
    let n = cfg.k * cfg.l;
    let mut work = 0.0;
    for k in 1..=n {
        work += libm::pow((k * (cfg.m_d - 1) + 1) as f64, 4.0);
        if work > budget {
            return Err(EsrError::ComplexityBudget {
                k,
                l: cfg.l,
                m_d: cfg.m_d,
                count: work,
                budget,
            });
        }
    }
    Ok(())
}

/// Exact SS ESR times `ln 2`.
pub fn ss_exact<A: Arith>(ar: &A, cfg: &SystemConfig) -> Result<Pass<A::R>> {
    let lambda_d = ar.num(cfg.lambda_d);
    let lambda_e = ar.num(cfg.lambda_e);
    let n = cfg.k * cfg.l;
    let mut cache = GammaCache::new(cfg.lambda_d, cfg.lambda_e);
    let mut tally = Tally::default();
    let mut total = ar.zero();
    for k in 1..=n {
        let outer = alternating_binomial(ar, n, k);
        let kk = ar.int(k as i64);
        let mut table = mn_table(ar, cfg.m_d, k, |_| ar.one());
        for (&[m_hat, n_hat], w) in table.iter_mut() {
            *w = w.clone() * &lambda_d.powi((cfg.m_e + n_hat) as i32 - m_hat as i32) * &rising(ar, cfg.m_e, n_hat)
                / (lambda_e.powi(cfg.m_e as i32) * kk.powi((cfg.m_e + n_hat) as i32));
        }
        let v = single_pole_family(
            ar,
            &table,
            cfg.m_e,
            k,
            k,
            (cfg.lambda_d, cfg.lambda_e),
            &mut cache,
            &mut tally,
            outer.log2_abs(),
        );
        total = total + outer * &v;
    }
    Ok(Pass { value: total, tally })
}

fn highsnr_weights<A: Arith>(ar: &A, cfg: &SystemConfig, k: u32) -> alloc::vec::Vec<A::R> {
    let kk = ar.int(k as i64);
    let mut w = m_table(ar, cfg.m_d, k, |_| ar.one());
    for (m_hat, v) in w.iter_mut().enumerate() {
        *v = v.clone() * &rising(ar, cfg.m_e, m_hat as u32) / kk.powi(m_hat as i32);
    }
    w
}

/// High-SNR (`shifted`) or asymptotic SS ESR times `ln 2`.
pub fn ss_highsnr<A: Arith>(ar: &A, cfg: &SystemConfig, shifted: bool) -> Result<Pass<A::R>> {
    let n = cfg.k * cfg.l;
    let mut tally = Tally::default();
    let mut total = ar.zero();
    for k in 1..=n {
        let outer = alternating_binomial(ar, n, k);
        let c = ar.num(cfg.lambda_d) / (ar.int(k as i64) * ar.num(cfg.lambda_e));
        let weights = highsnr_weights(ar, cfg, k);
        let v = ratio_family(ar, &weights, cfg.m_e, &c, shifted, &mut tally, outer.log2_abs());
        total = total + outer * &v;
    }
    Ok(Pass { value: total, tally })
}

/// `L∞` of the SS asymptote.
pub(crate) fn offset<A: Arith>(ar: &A, cfg: &SystemConfig, tally: &mut Tally) -> A::R {
    let ln2 = ar.ln(&ar.int(2));
    let n = cfg.k * cfg.l;
    let mut sum = ar.zero();
    for k in 1..=n {
        let kk = ar.int(k as i64);
        let v = m_table(ar, cfg.m_d, k, |_| ar.one());
        // Σ V(m̂) Γ(m̂) / k^{m̂}
        let mut i1 = ar.zero();
        for (m_hat, w) in v.iter().enumerate().skip(1) {
            i1 = i1 + w.clone() * &factorial_in(ar, m_hat as u32 - 1) / kk.powi(m_hat as i32);
        }
        let psi = harmonic_r(ar, cfg.m_e - 1) - i1;
        let log2_kle = ar.ln(&(kk * &ar.num(cfg.lambda_e))) / &ln2;
        let term = alternating_binomial(ar, n, k) * &(log2_kle + psi / &ln2);
        tally.note(&term);
        sum = sum + term;
    }
    sum
}
