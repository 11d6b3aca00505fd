//! ESR by nested adaptive quadrature of the selection CDFs.
//!
//! `Ψ_n(x) = ∫_0^∞ (1 - F_D(z(x, y))^n) f_E(y) dy` is the probability that
//! the best of `n` independent destination links beats the ratio `x` against
//! an eavesdropper SNR `y`, with `z = x(1 + y) - 1` (exact) or `z = x y`
//! (high-SNR). Then `1 - F(x)` is `1 - (1 - Ψ_L)^K` for OS and `Ψ_{KL}` for SS.

use core::f64::consts::LN_2;

use crate::channel::{snr_pdf, SystemConfig};
use crate::engine::{EsrResult, Method, Scheme};
use crate::error::Result;
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};

/// Eavesdropper SNR beyond which the Gamma tail is below `1e-18`.
fn tail_cutoff(cfg: &SystemConfig) -> f64 {
    let e = cfg.eavesdropper_link();
    let mut y = e.mean().max(e.scale);
    while e.survival(y) > 1e-18 {
        y *= 1.5;
    }
    y
}

fn psi(cfg: &SystemConfig, n: u32, x: f64, ratio: bool, y_max: f64, opts: &QuadOptions) -> Result<f64> {
    let d = cfg.destination_link();
    let e = cfg.eavesdropper_link();
    let f = |y: f64| {
        let z = if ratio { x * y } else { x * (1.0 + y) - 1.0 };
        let q = d.survival(z);
        // 1 - (1 - q)^n
        let beat = -libm::expm1(n as f64 * libm::log1p(-q));
        beat * snr_pdf(e, y)
    };
    // The destination factor varies on the scale λ_D / x.
    let knee = (cfg.lambda_d * (cfg.m_d as f64 + 50.0) / x).min(y_max);
    let mut v = integrate(f, 0.0, knee, opts)?.value;
    if knee < y_max {
        v += integrate(f, knee, y_max, opts)?.value;
    }
    Ok(v)
}

/// Quadrature ESR with explicit tolerances; `ratio` selects the high-SNR
/// form.
pub fn quadrature_esr_with(cfg: &SystemConfig, scheme: Scheme, ratio: bool, outer: &QuadOptions) -> Result<EsrResult> {
    cfg.validate()?;
    let inner = QuadOptions {
        abs_tol: 1e-16,
        rel_tol: 1e-12,
        max_panels: 2000,
    };
    let y_max = tail_cutoff(cfg);
    let mut failure = None;
    let mut evaluations = 0u64;
    let integrand = |x: f64| {
        evaluations += 1;
        let tail = match scheme {
            Scheme::Os => psi(cfg, cfg.l, x, ratio, y_max, &inner).map(|p| -libm::expm1(cfg.k as f64 * libm::log1p(-p))),
            Scheme::Ss => psi(cfg, cfg.k * cfg.l, x, ratio, y_max, &inner),
        };
        match tail {
            Ok(t) => t / x,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let scale = (cfg.lambda_d / cfg.lambda_e).max(1.0);
    let r = integrate_to_infinity(integrand, 1.0, scale, outer);
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    Ok(EsrResult {
        value: r.value / LN_2,
        scheme,
        method: Method::Quadrature,
        term_count: evaluations,
        max_log_term: f64::NAN,
        stderr: None,
        below_zero: false,
        precision_bits: 0,
    })
}

/// Exact ESR by quadrature; i.i.d. channels only.
pub fn quadrature_esr(cfg: &SystemConfig, scheme: Scheme) -> Result<EsrResult> {
    quadrature_esr_with(cfg, scheme, false, &outer_default())
}

/// High-SNR (ratio) ESR by quadrature.
pub fn quadrature_esr_highsnr(cfg: &SystemConfig, scheme: Scheme) -> Result<EsrResult> {
    let mut r = quadrature_esr_with(cfg, scheme, true, &outer_default())?;
    r.method = Method::Quadrature;
    Ok(r)
}

fn outer_default() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-10,
        max_panels: 4000,
    }
}
