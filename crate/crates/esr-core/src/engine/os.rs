//! OS scheme: `Ψ(x) = P(transmitter ratio > x)` and
//! `C = (1/ln2) Σ_k (-1)^{k+1} C(K,k) ∫_1^∞ Ψ(x)^k / x dx`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::common::{m_table, mn_table, multinomial, ratio_family, rising, single_pole_family, Multisets};
use super::{alternating_binomial, harmonic_r, Pass};
use crate::channel::SystemConfig;
use crate::error::{EsrError, Result};
use crate::index::{aggregate_power, enumerate_x, mnu_triples};
use crate::partial_fractions::{
    expand, group_poles, highsnr_common, j0_exact_scaled, j1_exact_scaled, GammaCache, Tally,
};
use crate::real::{Arith, Real};
use crate::special::factorial_in;

/// One term group of `Ψ`: destination count `l`, pole offset, and the
/// polynomial in `x` multiplying `e^{-l(x-1)/λ_D} / (x + c_l)^{M_E + offset}`.
struct State<R> {
    l: u32,
    offset: u32,
    poly: Vec<R>,
    /// Sum of absolute contributions per coefficient.
    magnitude: Vec<f64>,
}

/// `Ψ` grouped by `(l, n̂)`.
fn exact_states<A: Arith>(ar: &A, cfg: &SystemConfig) -> Vec<State<A::R>> {
    let lambda_d = ar.num(cfg.lambda_d);
    let lambda_e = ar.num(cfg.lambda_e);
    let base: Vec<([u32; 3], A::R)> = mnu_triples(cfg.m_d)
        .into_iter()
        .map(|(m, n, u)| {
            let w = ar.one() / (factorial_in(ar, n) * factorial_in(ar, u) * factorial_in(ar, m - n - u));
            ([n, m, u], w)
        })
        .collect();
    let mut states = Vec::new();
    for l in 1..=cfg.l {
        let table = aggregate_power(ar, &base, l);
        let mut by_n: BTreeMap<u32, (Vec<A::R>, Vec<f64>)> = BTreeMap::new();
        for ([n_hat, m_hat, u_hat], w) in table {
            let factor = alternating_binomial(ar, cfg.l, l)
                * &lambda_d.powi((cfg.m_e + n_hat) as i32 - m_hat as i32)
                * &rising(ar, cfg.m_e, n_hat)
                / (lambda_e.powi(cfg.m_e as i32) * ar.int(l as i64).powi((cfg.m_e + n_hat) as i32));
            let mut v = factor * &w;
            if u_hat % 2 == 1 {
                v = -v;
            }
            let e = (m_hat - u_hat) as usize;
            let entry = by_n.entry(n_hat).or_insert_with(|| (Vec::new(), Vec::new()));
            while entry.0.len() <= e {
                entry.0.push(ar.zero());
                entry.1.push(0.0);
            }
            entry.1[e] += libm::exp2(v.log2_abs());
            entry.0[e] = entry.0[e].clone() + v;
        }
        for (n_hat, (poly, magnitude)) in by_n {
            states.push(State {
                l,
                offset: n_hat,
                poly,
                magnitude,
            });
        }
    }
    states
}

fn poly_mul<A: Arith>(ar: &A, a: &[A::R], b: &[A::R]) -> Vec<A::R> {
    let mut out: Vec<A::R> = (0..a.len() + b.len() - 1).map(|_| ar.zero()).collect();
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y;
        }
    }
    out
}

fn mag_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Grouped work estimate for the exact OS sum.
pub(crate) fn check_budget_exact(cfg: &SystemConfig, budget: f64) -> Result<()> {
    if cfg.l == 1 {
        return Ok(());
    }
    let states: f64 = (1..=cfg.l).map(|l| (l * (cfg.m_d - 1) + 1) as f64).sum();
    let deg = (cfg.l * 2 * (cfg.m_d - 1) + 1) as f64;
    let den = (cfg.m_e + cfg.l * (cfg.m_d - 1)) as f64;
    check(cfg, budget, states, |k| deg * k as f64 * den * k as f64)
}

pub(crate) fn check_budget_highsnr(cfg: &SystemConfig, budget: f64) -> Result<()> {
    let states: f64 = (1..=cfg.l).map(|l| (l * (cfg.m_d - 1) + 1) as f64).sum();
    let den = (cfg.m_e + cfg.l * (cfg.m_d - 1)) as f64;
    check(cfg, budget, states, |k| den * k as f64)
}

fn check(cfg: &SystemConfig, budget: f64, states: f64, per: impl Fn(u32) -> f64) -> Result<()> {
    let mut work = 0.0;
    for k in 1..=cfg.k {
        work += Multisets::count(states as usize, k as usize) * per(k);
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

/// Exact OS ESR times `ln 2`, with `Ψ^k` expanded over multisets of grouped
/// states.
pub fn os_exact_grouped<A: Arith>(ar: &A, cfg: &SystemConfig) -> Result<Pass<A::R>> {
    let states = exact_states(ar, cfg);
    let mut cache = GammaCache::new(cfg.lambda_d, cfg.lambda_e);
    let mut tally = Tally::default();
    let mut total = ar.zero();
    for k in 1..=cfg.k {
        let sign_binom = alternating_binomial(ar, cfg.k, k);
        for ms in Multisets::new(states.len(), k as usize) {
            let outer = sign_binom.clone() * &multinomial(ar, &ms);
            let mut poly = states[ms[0]].poly.clone();
            let mut mag = states[ms[0]].magnitude.clone();
            for &i in &ms[1..] {
                poly = poly_mul(ar, &poly, &states[i].poly);
                mag = mag_mul(&mag, &states[i].magnitude);
            }
            let l_vec: Vec<u32> = ms.iter().map(|&i| states[i].l).collect();
            let offsets: Vec<u32> = ms.iter().map(|&i| states[i].offset).collect();
            let l_tilde: u32 = l_vec.iter().sum();
            let s1 = group_poles(&l_vec, &offsets, cfg.m_e, cfg.lambda_d, cfg.lambda_e, false);
            let pf1 = if s1.single_pole() { None } else { Some(expand(ar, &s1)) };
            for (e, coef) in poly.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let weight = outer.clone() * coef;
                tally.offset = outer.log2_abs() + libm::log2(mag[e]);
                let inner = if e == 0 {
                    let s0 = group_poles(&l_vec, &offsets, cfg.m_e, cfg.lambda_d, cfg.lambda_e, true);
                    let pf0 = expand(ar, &s0);
                    j0_exact_scaled(ar, &s0, &pf0, l_tilde, &mut cache, &mut tally)
                } else {
                    let s = s1.clone().with_numerator(e as u32 - 1);
                    j1_exact_scaled(ar, &s, pf1.as_ref(), l_tilde, &mut cache, &mut tally)
                };
                total = total + weight * &inner;
            }
        }
    }
    tally.offset = 0.0;
    Ok(Pass { value: total, tally })
}

/// Exact OS ESR times `ln 2`, summed literally over every index tuple.
/// Reference path for small configurations.
pub fn os_exact_termwise<A: Arith>(ar: &A, cfg: &SystemConfig, budget: f64) -> Result<Pass<A::R>> {
    let lambda_d = ar.num(cfg.lambda_d);
    let lambda_e = ar.num(cfg.lambda_e);
    let mut cache = GammaCache::new(cfg.lambda_d, cfg.lambda_e);
    let mut tally = Tally::default();
    let mut total = ar.zero();
    for k in 1..=cfg.k {
        let outer = alternating_binomial(ar, cfg.k, k);
        for tuple in enumerate_x(k, cfg.l, cfg.m_d, budget)? {
            let agg = tuple.aggregates();
            let mut w = outer.clone();
            for (q, &lq) in tuple.l_vec.iter().enumerate() {
                let n_hat = agg.n_hat[q];
                w = w * &alternating_binomial(ar, cfg.l, lq)
                    * &lambda_d.powi((cfg.m_e + n_hat) as i32 - agg.m_hat[q] as i32)
                    * &rising(ar, cfg.m_e, n_hat)
                    / (lambda_e.powi(cfg.m_e as i32) * ar.int(lq as i64).powi((cfg.m_e + n_hat) as i32));
                if agg.u_hat[q] % 2 == 1 {
                    w = -w;
                }
                for p in 0..lq as usize {
                    let (m, n, u) = (tuple.m[q][p], tuple.n[q][p], tuple.u[q][p]);
                    w = w / (factorial_in(ar, n) * factorial_in(ar, u) * factorial_in(ar, m - n - u));
                }
            }
            let e = agg.m_tilde - agg.u_tilde;
            tally.offset = w.log2_abs();
            let inner = if e == 0 {
                let s0 = group_poles(&tuple.l_vec, &agg.n_hat, cfg.m_e, cfg.lambda_d, cfg.lambda_e, true);
                let pf0 = expand(ar, &s0);
                j0_exact_scaled(ar, &s0, &pf0, agg.l_tilde, &mut cache, &mut tally)
            } else {
                let s = group_poles(&tuple.l_vec, &agg.n_hat, cfg.m_e, cfg.lambda_d, cfg.lambda_e, false)
                    .with_numerator(e - 1);
                j1_exact_scaled(ar, &s, None, agg.l_tilde, &mut cache, &mut tally)
            };
            total = total + w * &inner;
        }
    }
    tally.offset = 0.0;
    Ok(Pass { value: total, tally })
}

/// Exact OS ESR times `ln 2` for `L = 1` from the explicit `I0 + I1` forms.
pub fn os_exact_single_dest<A: Arith>(ar: &A, cfg: &SystemConfig) -> Result<Pass<A::R>> {
    if cfg.l != 1 {
        return Err(EsrError::Contract("the single-destination form needs L = 1"));
    }
    let lambda_d = ar.num(cfg.lambda_d);
    let lambda_e = ar.num(cfg.lambda_e);
    let mut cache = GammaCache::new(cfg.lambda_d, cfg.lambda_e);
    let mut tally = Tally::default();
    let mut total = ar.zero();
    for k in 1..=cfg.k {
        let p0 = k * cfg.m_e;
        let outer = alternating_binomial(ar, cfg.k, k);
        let mut table = mn_table(ar, cfg.m_d, k, |n| rising(ar, cfg.m_e, n));
        for (&[m_hat, n_hat], w) in table.iter_mut() {
            *w = w.clone() * &lambda_d.powi((p0 + n_hat) as i32 - m_hat as i32) / lambda_e.powi(p0 as i32);
        }
        let v = single_pole_family(
            ar,
            &table,
            p0,
            k,
            1,
            (cfg.lambda_d, cfg.lambda_e),
            &mut cache,
            &mut tally,
            outer.log2_abs(),
        );
        total = total + outer * &v;
    }
    Ok(Pass { value: total, tally })
}

/// High-SNR (`shifted`) or asymptotic OS ESR times `ln 2` for `L = 1`.
pub fn os_highsnr_single_dest<A: Arith>(ar: &A, cfg: &SystemConfig, shifted: bool) -> Result<Pass<A::R>> {
    if cfg.l != 1 {
        return Err(EsrError::Contract("the single-destination form needs L = 1"));
    }
    let rho = ar.num(cfg.lambda_d) / ar.num(cfg.lambda_e);
    let mut tally = Tally::default();
    let mut total = ar.zero();
    for k in 1..=cfg.k {
        let outer = alternating_binomial(ar, cfg.k, k);
        let weights = m_table(ar, cfg.m_d, k, |m| rising(ar, cfg.m_e, m));
        let v = ratio_family(ar, &weights, k * cfg.m_e, &rho, shifted, &mut tally, outer.log2_abs());
        total = total + outer * &v;
    }
    Ok(Pass { value: total, tally })
}

/// High-SNR (`shifted`) or asymptotic OS ESR times `ln 2` for any `L`.
pub fn os_highsnr_general<A: Arith>(ar: &A, cfg: &SystemConfig, shifted: bool) -> Result<Pass<A::R>> {
    let lambda_d = ar.num(cfg.lambda_d);
    let lambda_e = ar.num(cfg.lambda_e);
    // States (l, m̂) with weight multiplying x^{m̂} / (x + c_l)^{M_E + m̂}.
    let mut states: Vec<(u32, u32, A::R)> = Vec::new();
    for l in 1..=cfg.l {
        let sums = m_table(ar, cfg.m_d, l, |_| ar.one());
        for (m_hat, v) in sums.into_iter().enumerate() {
            let m_hat = m_hat as u32;
            let w = alternating_binomial(ar, cfg.l, l)
                * &lambda_d.powi(cfg.m_e as i32)
                * &rising(ar, cfg.m_e, m_hat)
                * &v
                / (lambda_e.powi(cfg.m_e as i32) * ar.int(l as i64).powi((cfg.m_e + m_hat) as i32));
            states.push((l, m_hat, w));
        }
    }
    let mut tally = Tally::default();
    let mut total = ar.zero();
    for k in 1..=cfg.k {
        let sign_binom = alternating_binomial(ar, cfg.k, k);
        for ms in Multisets::new(states.len(), k as usize) {
            let mut w = sign_binom.clone() * &multinomial(ar, &ms);
            for &i in &ms {
                w = w * &states[i].2;
            }
            let l_vec: Vec<u32> = ms.iter().map(|&i| states[i].0).collect();
            let offsets: Vec<u32> = ms.iter().map(|&i| states[i].1).collect();
            let m_tilde: u32 = offsets.iter().sum();
            let s = group_poles(&l_vec, &offsets, cfg.m_e, cfg.lambda_d, cfg.lambda_e, m_tilde == 0)
                .with_numerator(m_tilde.saturating_sub(1));
            tally.offset = w.log2_abs();
            let inner = highsnr_common(ar, &s, shifted, &mut tally);
            total = total + w * &inner;
        }
    }
    tally.offset = 0.0;
    Ok(Pass { value: total, tally })
}

/// `L∞` of the OS asymptote for `L = 1`.
pub(crate) fn offset<A: Arith>(ar: &A, cfg: &SystemConfig, tally: &mut Tally) -> A::R {
    let ln2 = ar.ln(&ar.int(2));
    let mut sum = ar.zero();
    for k in 1..=cfg.k {
        let p0 = k * cfg.m_e;
        let weights = m_table(ar, cfg.m_d, k, |m| rising(ar, cfg.m_e, m));
        // Σ W(m̂) (m̂-1)! (p0-1)! / (p0+m̂-1)!
        let mut i1 = ar.zero();
        for (m_hat, w) in weights.iter().enumerate().skip(1) {
            let m_hat = m_hat as u32;
            let beta = factorial_in(ar, m_hat - 1) * &factorial_in(ar, p0 - 1) / factorial_in(ar, p0 + m_hat - 1);
            i1 = i1 + w.clone() * &beta;
        }
        let v = alternating_binomial(ar, cfg.k, k) * &(harmonic_r(ar, p0 - 1) - i1);
        tally.note(&v);
        sum = sum + v;
    }
    let log2_le = ar.ln(&ar.num(cfg.lambda_e)) / &ln2;
    tally.note(&log2_le);
    log2_le + sum / ln2
}
