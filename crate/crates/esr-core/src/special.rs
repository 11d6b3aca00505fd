//! Incomplete gamma at integer order, exponential integral, harmonic numbers
//! and log-binomials.
//!
//! Everything is built on the normalised function
//! `H(n, x) = e^x · x^(-n) · Γ(n, x)`, which stays O(1/x) for every integer
//! order and so never over- or underflows. Both three-term recurrences are
//! written in terms of `H`:
//!
//! * downward `H(n-1) = (x·H(n) - 1) / (n-1)`, stable while `|n| > x`;
//! * upward `H(n+1) = (n·H(n) + 1) / x`, stable while `n >= -x`.
//!
//! A ladder is seeded either from `E1` (power series, small `x`) or from the
//! Legendre continued fraction at the order where the two regions meet.

use alloc::vec::Vec;

use crate::error::{EsrError, Result};
use crate::real::{Arith, Real, F64};

/// Largest `|order|` accepted by the scalar entry points.
pub const MAX_ORDER: i32 = 512;

const CF_MAX_ITER: usize = 100_000;

/// `mantissa · exp(log_scale)`, for values beyond the double exponent range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledGamma {
    pub log_scale: f64,
    pub mantissa: f64,
}

impl ScaledGamma {
    pub fn from_value(v: f64) -> Self {
        ScaledGamma {
            log_scale: 0.0,
            mantissa: v,
        }
    }

    pub fn value(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * libm::exp(self.log_scale)
        }
    }

    /// `ln |value|`.
    pub fn ln_abs(&self) -> f64 {
        libm::log(libm::fabs(self.mantissa)) + self.log_scale
    }

    pub fn mul(&self, other: &ScaledGamma) -> ScaledGamma {
        let m = self.mantissa * other.mantissa;
        if m == 0.0 {
            return ScaledGamma::from_value(0.0);
        }
        ScaledGamma {
            log_scale: self.log_scale + other.log_scale,
            mantissa: m,
        }
    }
}

fn check_args(order: i32, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(EsrError::Domain("incomplete gamma needs a finite x > 0"));
    }
    if order.unsigned_abs() > MAX_ORDER as u32 {
        return Err(EsrError::UnsupportedOrder {
            order: order as i64,
            bound: MAX_ORDER as i64,
        });
    }
    Ok(())
}

/// `Γ(order, x)` for integer order.
///
/// Returns `+inf` when the value exceeds the double range; use
/// [`scaled_upper_incomplete_gamma`] in that regime.
pub fn upper_incomplete_gamma(order: i32, x: f64) -> Result<f64> {
    Ok(scaled_upper_incomplete_gamma(order, x, 0.0)?.value())
}

/// `e^log_prefactor · Γ(order, x)` without intermediate overflow.
pub fn scaled_upper_incomplete_gamma(order: i32, x: f64, log_prefactor: f64) -> Result<ScaledGamma> {
    check_args(order, x)?;
    let ladder = GammaLadder::new(&F64, &x, order, order);
    let mantissa = *ladder.h(order);
    if mantissa == 0.0 {
        return Ok(ScaledGamma::from_value(0.0));
    }
    let log_scale = log_prefactor - x + order as f64 * libm::log(x);
    Ok(ScaledGamma {
        log_scale,
        mantissa,
    })
}

/// Exponential integral `E1(x) = Γ(0, x)`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    upper_incomplete_gamma(0, x)
}

/// `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// Harmonic number in the working precision of `ar`.
pub fn harmonic_in<A: Arith>(ar: &A, n: u32) -> A::R {
    (1..=n).fold(ar.zero(), |acc, i| acc + ar.ratio(1, i as i64))
}

/// `ln n!`.
pub fn log_factorial(n: u32) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln C(n, k)`.
pub fn log_binomial(n: u32, k: u32) -> Result<f64> {
    if k > n {
        return Err(EsrError::Domain("log_binomial needs k <= n"));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    Ok(log_factorial(n) - log_factorial(k) - log_factorial(n - k))
}

/// Exact binomial coefficient as a float, `0` when `k > n`.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(c)
}

/// `n!` exactly in the working precision (small `n`).
pub fn factorial_in<A: Arith>(ar: &A, n: u32) -> A::R {
    (2..=n).fold(ar.one(), |acc, i| acc * &ar.int(i as i64))
}

/// `C(n, k)` exactly in the working precision.
pub fn binomial_in<A: Arith>(ar: &A, n: u32, k: u32) -> A::R {
    if k > n {
        return ar.zero();
    }
    let k = k.min(n - k);
    let mut num = ar.one();
    let mut den = ar.one();
    for i in 0..k {
        num = num * &ar.int((n - i) as i64);
        den = den * &ar.int((i + 1) as i64);
    }
    num / den
}

/// Below this argument `E1` comes from its power series.
fn series_threshold(bits: u32) -> f64 {
    if bits > 53 {
        2.0
    } else {
        1.0
    }
}

fn converged<R: Real>(delta: &R, bits: u32) -> bool {
    delta.is_zero() || delta.log2_abs() < -(bits as f64) - 2.0
}

/// `e^x E1(x)` from `E1(x) = -γ - ln x - Σ (-x)^k / (k·k!)`.
fn h0_series<A: Arith>(ar: &A, x: &A::R) -> A::R {
    let bits = ar.bits();
    let mut sum = ar.zero();
    let mut pow_over_fact = ar.one();
    let mut k: i64 = 1;
    loop {
        pow_over_fact = -(pow_over_fact * x) / ar.int(k);
        let term = pow_over_fact.clone() / ar.int(k);
        sum = sum + &term;
        if term.is_zero() || term.log2_abs() < sum.log2_abs() - bits as f64 - 4.0 {
            break;
        }
        k += 1;
    }
    let e1 = -ar.euler_gamma() - ar.ln(x) - sum;
    e1 * &ar.exp(x)
}

/// `H(a, x)` from the Legendre continued fraction (modified Lentz).
fn h_continued_fraction<A: Arith>(ar: &A, a: i32, x: &A::R) -> A::R {
    let bits = ar.bits();
    let tiny = ar.num(1e-300);
    let a_r = ar.int(a as i64);
    let two = ar.int(2);
    let mut b = x.clone() + ar.one() - &a_r;
    let mut c = ar.one() / &tiny;
    let mut d = ar.one() / &b;
    let mut h = d.clone();
    for i in 1..CF_MAX_ITER as i64 {
        let an = -(ar.int(i) * (ar.int(i) - &a_r));
        b = b + &two;
        d = an.clone() * &d + &b;
        if d.is_zero() {
            d = tiny.clone();
        }
        c = b.clone() + an / &c;
        if c.is_zero() {
            c = tiny.clone();
        }
        d = ar.one() / d;
        let del = d.clone() * &c;
        h = h * &del;
        if converged(&(del - ar.one()), bits) {
            break;
        }
    }
    h
}

/// Values of `H(n, x) = e^x x^(-n) Γ(n, x)` for `n` in `lo..=hi`.
#[derive(Clone, Debug)]
pub struct GammaLadder<R> {
    lo: i32,
    values: Vec<R>,
}

impl<R: Real> GammaLadder<R> {
    /// Builds the ladder at `x > 0`; each entry is reached through its
    /// stable recurrence direction.
    pub fn new<A: Arith<R = R>>(ar: &A, x: &R, lo: i32, hi: i32) -> Self {
        assert!(lo <= hi, "empty order range");
        let xf = x.to_f64();
        let seed_order = if xf < series_threshold(ar.bits()) {
            lo.clamp(0, 1)
        } else {
            lo.max(-(libm::floor(xf).min(i32::MAX as f64) as i32)).min(1)
        };
        let seed = if seed_order == 1 {
            ar.one() / x
        } else if xf < series_threshold(ar.bits()) {
            h0_series(ar, x)
        } else {
            h_continued_fraction(ar, seed_order, x)
        };
        let start = lo.min(seed_order);
        let end = hi.max(seed_order);
        let mut values: Vec<R> = (start..=end).map(|_| ar.zero()).collect();
        let idx = |n: i32| (n - start) as usize;
        values[idx(seed_order)] = seed;
        for n in (start + 1..=seed_order).rev() {
            let next = (x.clone() * &values[idx(n)] - ar.one()) / ar.int((n - 1) as i64);
            values[idx(n - 1)] = next;
        }
        for n in seed_order..end {
            let next = (ar.int(n as i64) * &values[idx(n)] + ar.one()) / x;
            values[idx(n + 1)] = next;
        }
        let skip = (lo - start) as usize;
        let keep = (hi - lo + 1) as usize;
        GammaLadder {
            lo,
            values: values.into_iter().skip(skip).take(keep).collect(),
        }
    }

    /// `H(n, x)`; panics outside the constructed range.
    pub fn h(&self, n: i32) -> &R {
        &self.values[(n - self.lo) as usize]
    }
}
