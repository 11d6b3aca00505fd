//! Ergodic secrecy rate from the closed forms.
//!
//! Every evaluator is written against [`Arith`] and runs in multi-precision
//! through [`evaluate_adaptive`]: a pass at `start_bits` records the largest
//! summand magnitude, and if the digits cancelled exceed what the pass could
//! afford, the sum is redone with enough bits to cover the loss.

mod common;
mod os;
mod ss;

use core::f64::consts::LN_2;

use crate::channel::SystemConfig;
use crate::error::{EsrError, Result};
use crate::index::DEFAULT_BUDGET;
use crate::partial_fractions::Tally;
use crate::real::{Arith, MpCtx, Real, MAX_BITS};
use crate::special::{binomial_in, harmonic_in};

pub use os::{os_exact_grouped, os_exact_single_dest, os_exact_termwise, os_highsnr_general, os_highsnr_single_dest};
pub use ss::{ss_exact, ss_highsnr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Pair maximizing the secrecy ratio.
    Os,
    /// Pair maximizing the destination SNR.
    Ss,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Os => "os",
            Scheme::Ss => "ss",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Exact,
    HighSnr,
    Asymptotic,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::HighSnr => "highsnr",
            Method::Asymptotic => "asymptotic",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "mc",
        }
    }
}

/// One ESR value with its provenance and diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct EsrResult {
    /// Bits per channel use.
    pub value: f64,
    pub scheme: Scheme,
    pub method: Method,
    /// Summands accumulated.
    pub term_count: u64,
    /// `log10` of the largest summand magnitude; minus `log10 |value|` it is
    /// the number of decimal digits lost to cancellation.
    pub max_log_term: f64,
    pub stderr: Option<f64>,
    /// The approximate forms can go negative at low SNR.
    pub below_zero: bool,
    /// Mantissa bits of the final pass; 0 for methods that do not use one.
    pub precision_bits: u32,
}

impl EsrResult {
    pub fn digits_lost(&self) -> f64 {
        self.max_log_term - libm::log10(libm::fabs(self.value))
    }
}

/// `C ≈ slope · (log2 λ_D - offset)` as `λ_D → ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticLine {
    pub slope: f64,
    pub offset: f64,
}

impl AsymptoticLine {
    pub fn at(&self, lambda_d: f64) -> f64 {
        self.slope * (libm::log2(lambda_d) - self.offset)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineOptions {
    /// Ceiling on grouped evaluation work.
    pub budget: f64,
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            budget: DEFAULT_BUDGET,
            start_bits: 128,
            max_bits: MAX_BITS,
        }
    }
}

/// Bits kept in reserve beyond the measured cancellation.
const GUARD_BITS: f64 = 64.0;

/// Raw output of one evaluation pass: `ln 2` times the rate, and the
/// magnitude record of its summands.
#[derive(Clone, Debug)]
pub struct Pass<R> {
    pub value: R,
    pub tally: Tally,
}

/// Runs `f` in multi-precision, raising the precision until the cancellation
/// it measures is covered.
pub fn evaluate_adaptive<F>(opts: &EngineOptions, f: F) -> Result<(f64, Tally, u32)>
where
    F: Fn(&MpCtx) -> Result<(crate::real::Mp, Tally)>,
{
    let mut bits = opts.start_bits.min(opts.max_bits);
    loop {
        let ctx = MpCtx::new(bits);
        let (v, tally) = f(&ctx)?;
        let lost = (tally.max_log2 - v.log2_abs()).max(0.0);
        if lost + GUARD_BITS <= bits as f64 {
            return Ok((v.to_f64(), tally, bits));
        }
        let needed = libm::ceil((lost + GUARD_BITS + 32.0) / 64.0) as u32 * 64;
        if needed > opts.max_bits || bits >= opts.max_bits {
            return Err(EsrError::NumericalCancellation {
                digits_lost: lost * core::f64::consts::LOG10_2,
                available: (opts.max_bits as f64 - GUARD_BITS) * core::f64::consts::LOG10_2,
            });
        }
        bits = needed.max(bits + 64);
    }
}

fn finish(value: f64, tally: Tally, bits: u32, scheme: Scheme, method: Method) -> EsrResult {
    let below_zero = value < 0.0;
    let value = match method {
        Method::Exact => value.max(0.0),
        _ => value,
    };
    EsrResult {
        value,
        scheme,
        method,
        term_count: tally.terms,
        max_log_term: (tally.max_log2 + libm::log2(1.0 / LN_2)) * core::f64::consts::LOG10_2,
        stderr: None,
        below_zero,
        precision_bits: bits,
    }
}

fn run<F>(opts: &EngineOptions, scheme: Scheme, method: Method, f: F) -> Result<EsrResult>
where
    F: Fn(&MpCtx) -> Result<Pass<crate::real::Mp>>,
{
    let (v, tally, bits) = evaluate_adaptive(opts, |ctx| f(ctx).map(|p| (p.value, p.tally)))?;
    Ok(finish(v / LN_2, tally, bits, scheme, method))
}

/// Exact ESR of the OS scheme.
pub fn esr_os_exact(cfg: &SystemConfig) -> Result<EsrResult> {
    esr_os_exact_with(cfg, &EngineOptions::default())
}

pub fn esr_os_exact_with(cfg: &SystemConfig, opts: &EngineOptions) -> Result<EsrResult> {
    cfg.validate()?;
    os::check_budget_exact(cfg, opts.budget)?;
    run(opts, Scheme::Os, Method::Exact, |ar| os_exact_grouped(ar, cfg))
}

/// Exact OS ESR through the explicit single-destination forms.
pub fn esr_os_exact_single_dest(cfg: &SystemConfig) -> Result<EsrResult> {
    esr_os_exact_single_dest_with(cfg, &EngineOptions::default())
}

pub fn esr_os_exact_single_dest_with(cfg: &SystemConfig, opts: &EngineOptions) -> Result<EsrResult> {
    cfg.validate()?;
    if cfg.l != 1 {
        return Err(EsrError::Contract("the single-destination form needs L = 1"));
    }
    run(opts, Scheme::Os, Method::Exact, |ar| os_exact_single_dest(ar, cfg))
}

/// Exact ESR of the SS scheme.
pub fn esr_ss_exact(cfg: &SystemConfig) -> Result<EsrResult> {
    esr_ss_exact_with(cfg, &EngineOptions::default())
}

pub fn esr_ss_exact_with(cfg: &SystemConfig, opts: &EngineOptions) -> Result<EsrResult> {
    cfg.validate()?;
    ss::check_budget(cfg, opts.budget)?;
    run(opts, Scheme::Ss, Method::Exact, |ar| ss_exact(ar, cfg))
}

/// High-SNR OS ESR (ratio `γ_D / γ_E`).
pub fn esr_os_highsnr(cfg: &SystemConfig) -> Result<EsrResult> {
    esr_os_highsnr_with(cfg, &EngineOptions::default())
}

pub fn esr_os_highsnr_with(cfg: &SystemConfig, opts: &EngineOptions) -> Result<EsrResult> {
    cfg.validate()?;
    if cfg.l == 1 {
        run(opts, Scheme::Os, Method::HighSnr, |ar| os_highsnr_single_dest(ar, cfg, true))
    } else {
        os::check_budget_highsnr(cfg, opts.budget)?;
        run(opts, Scheme::Os, Method::HighSnr, |ar| os_highsnr_general(ar, cfg, true))
    }
}

/// High-SNR SS ESR.
pub fn esr_ss_highsnr(cfg: &SystemConfig) -> Result<EsrResult> {
    esr_ss_highsnr_with(cfg, &EngineOptions::default())
}

pub fn esr_ss_highsnr_with(cfg: &SystemConfig, opts: &EngineOptions) -> Result<EsrResult> {
    cfg.validate()?;
    ss::check_budget(cfg, opts.budget)?;
    run(opts, Scheme::Ss, Method::HighSnr, |ar| ss_highsnr(ar, cfg, true))
}

/// Asymptotic ESR `C^∞(λ_D)`.
pub fn esr_asymptotic(cfg: &SystemConfig, scheme: Scheme) -> Result<EsrResult> {
    esr_asymptotic_with(cfg, scheme, &EngineOptions::default())
}

pub fn esr_asymptotic_with(cfg: &SystemConfig, scheme: Scheme, opts: &EngineOptions) -> Result<EsrResult> {
    cfg.validate()?;
    match scheme {
        Scheme::Os if cfg.l == 1 => run(opts, scheme, Method::Asymptotic, |ar| {
            os_highsnr_single_dest(ar, cfg, false)
        }),
        Scheme::Os => {
            os::check_budget_highsnr(cfg, opts.budget)?;
            run(opts, scheme, Method::Asymptotic, |ar| os_highsnr_general(ar, cfg, false))
        }
        Scheme::Ss => {
            ss::check_budget(cfg, opts.budget)?;
            run(opts, scheme, Method::Asymptotic, |ar| ss_highsnr(ar, cfg, false))
        }
    }
}

/// Dispatches on scheme and closed-form method.
pub fn esr_closed_form(cfg: &SystemConfig, scheme: Scheme, method: Method, opts: &EngineOptions) -> Result<EsrResult> {
    match (scheme, method) {
        (Scheme::Os, Method::Exact) => esr_os_exact_with(cfg, opts),
        (Scheme::Ss, Method::Exact) => esr_ss_exact_with(cfg, opts),
        (Scheme::Os, Method::HighSnr) => esr_os_highsnr_with(cfg, opts),
        (Scheme::Ss, Method::HighSnr) => esr_ss_highsnr_with(cfg, opts),
        (_, Method::Asymptotic) => esr_asymptotic_with(cfg, scheme, opts),
        _ => Err(EsrError::Unsupported("not a closed-form method")),
    }
}

/// Slope and offset of the high-SNR asymptote.
pub fn asymptote_line(cfg: &SystemConfig, scheme: Scheme) -> Result<AsymptoticLine> {
    cfg.validate()?;
    if scheme == Scheme::Os && cfg.l != 1 {
        return Err(EsrError::Unsupported(
            "OS asymptote line needs L = 1; use esr_asymptotic values for L > 1",
        ));
    }
    let opts = EngineOptions::default();
    let (offset, _, _) = evaluate_adaptive(&opts, |ar| {
        let mut tally = Tally::default();
        let v = match scheme {
            Scheme::Os => os::offset(ar, cfg, &mut tally),
            Scheme::Ss => ss::offset(ar, cfg, &mut tally),
        };
        Ok((v, tally))
    })?;
    Ok(AsymptoticLine { slope: 1.0, offset })
}

/// `Σ_v (-1)^{m̂-1-v} / (v! (m̂-1-v)!) · Π_{u≠v} (k M_E + m̂ - u - 1)`, which
/// equals 1.
pub fn xi_identity_check(m_hat: u32, k: u32, m_e: u32) -> f64 {
    assert!(m_hat >= 1, "m_hat starts at 1");
    let ar = MpCtx::new(192);
    let top = (k * m_e + m_hat) as i64 - 1;
    let mut sum = ar.zero();
    for v in 0..m_hat {
        let mut prod = ar.one();
        for u in 0..m_hat {
            if u != v {
                prod = prod * &ar.int(top - u as i64);
            }
        }
        let denom = crate::special::factorial_in(&ar, v) * crate::special::factorial_in(&ar, m_hat - 1 - v);
        let term = prod / denom;
        sum = if (m_hat - 1 - v).is_multiple_of(2) { sum + term } else { sum - term };
    }
    sum.to_f64()
}

/// `(-1)^{k+1} C(n, k)`.
pub(crate) fn alternating_binomial<A: Arith>(ar: &A, n: u32, k: u32) -> A::R {
    let c = binomial_in(ar, n, k);
    if k % 2 == 1 {
        c
    } else {
        -c
    }
}

/// `H_{n}` shared by the offset forms.
pub(crate) fn harmonic_r<A: Arith>(ar: &A, n: u32) -> A::R {
    harmonic_in(ar, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_is_one() {
        assert!((xi_identity_check(1, 2, 3) - 1.0).abs() < 1e-15);
        assert!((xi_identity_check(3, 2, 2) - 1.0).abs() < 1e-10);
        assert!((xi_identity_check(6, 3, 1) - 1.0).abs() < 1e-9);
    }
}
