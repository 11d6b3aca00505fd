//! System configuration, per-link Gamma SNR law and the secrecy rate.

use alloc::format;

use crate::error::{EsrError, Result};

/// Transmitter/destination counts, multipath orders and per-path mean SNRs
/// (linear scale).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemConfig {
    pub k: u32,
    pub l: u32,
    pub m_d: u32,
    pub m_e: u32,
    pub lambda_d: f64,
    pub lambda_e: f64,
}

impl SystemConfig {
    pub fn new(k: u32, l: u32, m_d: u32, m_e: u32, lambda_d: f64, lambda_e: f64) -> Result<Self> {
        let cfg = SystemConfig {
            k,
            l,
            m_d,
            m_e,
            lambda_d,
            lambda_e,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.l == 0 || self.m_d == 0 || self.m_e == 0 {
            return Err(EsrError::InvalidConfig(format!(
                "K, L, M_D, M_E must be >= 1 (got {}, {}, {}, {})",
                self.k, self.l, self.m_d, self.m_e
            )));
        }
        for (name, v) in [("lambda_D", self.lambda_d), ("lambda_E", self.lambda_e)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(EsrError::InvalidConfig(format!("{name} must be finite and > 0 (got {v})")));
            }
        }
        Ok(())
    }

    pub fn destination_link(&self) -> GammaSnrDist {
        GammaSnrDist {
            shape: self.m_d,
            scale: self.lambda_d,
        }
    }

    pub fn eavesdropper_link(&self) -> GammaSnrDist {
        GammaSnrDist {
            shape: self.m_e,
            scale: self.lambda_e,
        }
    }

    /// Same configuration with the two link counts swapped.
    pub fn transposed(&self) -> Self {
        SystemConfig {
            k: self.l,
            l: self.k,
            ..*self
        }
    }
}

/// Gamma law of an SNR summed over `shape` Rayleigh paths of mean `scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaSnrDist {
    pub shape: u32,
    pub scale: f64,
}

impl GammaSnrDist {
    pub fn mean(&self) -> f64 {
        self.shape as f64 * self.scale
    }

    /// `P(γ > x) = e^(-x/λ) Σ_{m<M} (x/λ)^m / m!`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let z = x / self.scale;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..self.shape {
            term *= z / m as f64;
            sum += term;
        }
        sum * libm::exp(-z)
    }
}

/// Exponents of the Toeplitz correlation matrices `[R]_ij = ρ^|i-j|` across
/// transmitters (`rho_s`), destination paths (`rho_d`) and eavesdropper paths
/// (`rho_e`).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CorrelationConfig {
    pub rho_s: f64,
    pub rho_d: f64,
    pub rho_e: f64,
}

impl CorrelationConfig {
    pub const IID: CorrelationConfig = CorrelationConfig {
        rho_s: 0.0,
        rho_d: 0.0,
        rho_e: 0.0,
    };

    pub fn new(rho_s: f64, rho_d: f64, rho_e: f64) -> Result<Self> {
        let c = CorrelationConfig { rho_s, rho_d, rho_e };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rho_S", self.rho_s), ("rho_D", self.rho_d), ("rho_E", self.rho_e)] {
            if !(0.0..1.0).contains(&v) {
                return Err(EsrError::InvalidConfig(format!("{name} must lie in [0, 1) (got {v})")));
            }
        }
        Ok(())
    }

    pub fn is_iid(&self) -> bool {
        self.rho_s == 0.0 && self.rho_d == 0.0 && self.rho_e == 0.0
    }
}

/// Density `x^(M-1) e^(-x/λ) / (λ^M (M-1)!)`.
pub fn snr_pdf(dist: GammaSnrDist, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let m = dist.shape as f64;
    if x == 0.0 {
        return if dist.shape == 1 { 1.0 / dist.scale } else { 0.0 };
    }
    let log_pdf = (m - 1.0) * libm::log(x) - x / dist.scale - m * libm::log(dist.scale) - libm::lgamma(m);
    libm::exp(log_pdf)
}

/// `1 - e^(-x/λ) Σ_{m<M} (x/λ)^m / m!`.
pub fn snr_cdf(dist: GammaSnrDist, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = x / dist.scale;
    let m = dist.shape as f64;
    if z >= m {
        return (1.0 - dist.survival(x)).clamp(0.0, 1.0);
    }
    // Lower tail e^(-z) z^M / M! Σ_j z^j / ((M+1)...(M+j)); avoids 1 - (1 - ε).
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    while term > 1e-17 * sum {
        term *= z / (m + j);
        sum += term;
        j += 1.0;
    }
    let log_lead = m * libm::log(z) - z - libm::lgamma(m + 1.0);
    (libm::exp(log_lead) * sum).clamp(0.0, 1.0)
}

/// `[log2((1 + γ_D) / (1 + γ_E))]^+` in bits per channel use.
pub fn secrecy_rate(gamma_d: f64, gamma_e: f64) -> f64 {
    if gamma_d <= gamma_e {
        return 0.0;
    }
    libm::log2((1.0 + gamma_d) / (1.0 + gamma_e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(shape: u32, scale: f64) -> GammaSnrDist {
        GammaSnrDist { shape, scale }
    }

    #[test]
    fn pdf_values() {
        assert_eq!(snr_pdf(d(1, 1.0), 0.0), 1.0);
        assert!((snr_pdf(d(2, 1.0), 1.0) - libm::exp(-1.0)).abs() < 1e-15);
        assert!((snr_pdf(d(3, 2.0), 4.0) - libm::exp(-2.0)).abs() < 1e-15);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(snr_cdf(d(3, 2.0), 0.0), 0.0);
        assert!((snr_cdf(d(1, 1.0), 1.0) - (1.0 - libm::exp(-1.0))).abs() < 1e-15);
        assert!((snr_cdf(d(2, 1.0), 1.0) - (1.0 - 2.0 * libm::exp(-1.0))).abs() < 1e-15);
    }

    #[test]
    fn rate_values() {
        assert_eq!(secrecy_rate(3.0, 1.0), 1.0);
        assert_eq!(secrecy_rate(1.0, 3.0), 0.0);
        assert_eq!(secrecy_rate(2.5, 2.5), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(0, 1, 1, 1, 1.0, 1.0).is_err());
        assert!(SystemConfig::new(1, 1, 1, 1, -1.0, 1.0).is_err());
        assert!(SystemConfig::new(1, 1, 1, 1, 1.0, f64::NAN).is_err());
        assert!(CorrelationConfig::new(1.0, 0.0, 0.0).is_err());
        assert!(CorrelationConfig::new(0.0, -0.1, 0.0).is_err());
        assert!(CorrelationConfig::new(0.9, 0.5, 0.0).is_ok());
        let c = SystemConfig::new(3, 1, 2, 2, 10.0, 1.0).unwrap();
        assert_eq!((c.transposed().k, c.transposed().l), (1, 3));
        assert_eq!(c.destination_link().mean(), 20.0);
    }
}
