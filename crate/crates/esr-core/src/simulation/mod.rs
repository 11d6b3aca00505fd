//! Monte Carlo ground truth and the quadrature oracle.
//!
//! Per destination `l`, the path-by-transmitter channel block is
//! `H_l = √λ_D · R_D^{1/2} W_l R_S^{1/2}` with a unit-variance white block
//! `W_l`; the eavesdropper block uses `R_E` and the same `R_S`. The SNR of a
//! link is the squared norm of its path vector.

mod mc;
mod oracle;

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{CorrelationConfig, SystemConfig};

pub use mc::{
    estimate_esr, rate_pair, ChunkStats, McEstimate, McPlan, McReport, Moments, PairedReport, CHUNK_SIZE,
};
pub use oracle::{quadrature_esr, quadrature_esr_highsnr, quadrature_esr_with};

/// `[R]_ij = scale · ρ^|i-j|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToeplitzCorrelation {
    pub size: usize,
    pub rho: f64,
    pub scale: f64,
}

impl ToeplitzCorrelation {
    pub fn new(size: usize, rho: f64, scale: f64) -> Self {
        ToeplitzCorrelation { size, rho, scale }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| {
            self.scale * libm::pow(self.rho, (i as f64 - j as f64).abs())
        })
    }

    /// Principal symmetric square root.
    pub fn sqrt(&self) -> DMatrix<f64> {
        if self.rho == 0.0 {
            return DMatrix::identity(self.size, self.size) * libm::sqrt(self.scale);
        }
        let eig = SymmetricEigen::new(self.matrix());
        let root = eig.eigenvalues.map(|v| libm::sqrt(v.max(0.0)));
        &eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose()
    }
}

/// One draw of every destination and eavesdropper path gain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub k: usize,
    pub l: usize,
    pub m_d: usize,
    pub m_e: usize,
    /// `h_d[(l·K + k)·M_D + i]`.
    pub h_d: Vec<Complex64>,
    /// `h_e[k·M_E + i]`.
    pub h_e: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn gamma_d(&self, k: usize, l: usize) -> f64 {
        let at = (l * self.k + k) * self.m_d;
        self.h_d[at..at + self.m_d].iter().map(|h| h.norm_sqr()).sum()
    }

    pub fn gamma_e(&self, k: usize) -> f64 {
        let at = k * self.m_e;
        self.h_e[at..at + self.m_e].iter().map(|h| h.norm_sqr()).sum()
    }

    /// Link SNRs laid out as `snr_d[l·K + k]`, `snr_e[k]`.
    pub fn snrs(&self) -> (Vec<f64>, Vec<f64>) {
        let mut d = Vec::with_capacity(self.k * self.l);
        for l in 0..self.l {
            for k in 0..self.k {
                d.push(self.gamma_d(k, l));
            }
        }
        let e = (0..self.k).map(|k| self.gamma_e(k)).collect();
        (d, e)
    }
}

/// Precomputed square-root factors for one configuration.
#[derive(Clone, Debug)]
pub struct ChannelSynth {
    k: usize,
    l: usize,
    m_d: usize,
    m_e: usize,
    iid: bool,
    lambda_d: f64,
    lambda_e: f64,
    /// Row-major `M_D × M_D`, includes `√λ_D`.
    root_d: Vec<f64>,
    root_e: Vec<f64>,
    root_s: Vec<f64>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

impl ChannelSynth {
    pub fn new(cfg: &SystemConfig, corr: &CorrelationConfig) -> Self {
        let (k, m_d, m_e) = (cfg.k as usize, cfg.m_d as usize, cfg.m_e as usize);
        ChannelSynth {
            k,
            l: cfg.l as usize,
            m_d,
            m_e,
            iid: corr.is_iid(),
            lambda_d: cfg.lambda_d,
            lambda_e: cfg.lambda_e,
            root_d: row_major(&ToeplitzCorrelation::new(m_d, corr.rho_d, cfg.lambda_d).sqrt()),
            root_e: row_major(&ToeplitzCorrelation::new(m_e, corr.rho_e, cfg.lambda_e).sqrt()),
            root_s: row_major(&ToeplitzCorrelation::new(k, corr.rho_s, 1.0).sqrt()),
        }
    }

    /// Complex entries in one white draw.
    pub fn white_len(&self) -> usize {
        self.l * self.k * self.m_d + self.k * self.m_e
    }

    /// Fills `white` with unit-variance circular complex Gaussians, stored
    /// as `(re, im)` pairs.
    pub fn draw_white<R: RngCore + ?Sized>(&self, rng: &mut R, white: &mut [f64]) {
        for v in white.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *v = z * core::f64::consts::FRAC_1_SQRT_2;
        }
    }

    /// `R^{1/2}_paths · W · R_S^{1/2}` for a `paths × K` block at `w`
    /// (path-major, transmitter-minor, complex pairs).
    fn color(&self, w: &[f64], paths: usize, root_p: &[f64], out: &mut [f64]) {
        let k = self.k;
        let mut tmp = vec![0.0; 2 * paths * k];
        for i in 0..paths {
            for c in 0..k {
                let (mut re, mut im) = (0.0, 0.0);
                for j in 0..paths {
                    let a = root_p[i * paths + j];
                    re += a * w[2 * (j * k + c)];
                    im += a * w[2 * (j * k + c) + 1];
                }
                tmp[2 * (i * k + c)] = re;
                tmp[2 * (i * k + c) + 1] = im;
            }
        }
        for i in 0..paths {
            for c in 0..k {
                let (mut re, mut im) = (0.0, 0.0);
                for j in 0..k {
                    let b = self.root_s[j * k + c];
                    re += tmp[2 * (i * k + j)] * b;
                    im += tmp[2 * (i * k + j) + 1] * b;
                }
                out[2 * (i * k + c)] = re;
                out[2 * (i * k + c) + 1] = im;
            }
        }
    }

    /// Link SNRs from a white draw: `snr_d[l·K + k]`, `snr_e[k]`.
    pub fn snrs_from_white(&self, white: &[f64], snr_d: &mut [f64], snr_e: &mut [f64]) {
        let (k, m_d, m_e) = (self.k, self.m_d, self.m_e);
        let block_d = 2 * m_d * k;
        if self.iid {
            for l in 0..self.l {
                let w = &white[l * block_d..(l + 1) * block_d];
                for c in 0..k {
                    let s: f64 = (0..m_d).map(|i| w[2 * (i * k + c)].powi(2) + w[2 * (i * k + c) + 1].powi(2)).sum();
                    snr_d[l * k + c] = self.lambda_d * s;
                }
            }
            let w = &white[self.l * block_d..];
            for c in 0..k {
                let s: f64 = (0..m_e).map(|i| w[2 * (i * k + c)].powi(2) + w[2 * (i * k + c) + 1].powi(2)).sum();
                snr_e[c] = self.lambda_e * s;
            }
            return;
        }
        let mut h = vec![0.0; block_d.max(2 * m_e * k)];
        for l in 0..self.l {
            self.color(&white[l * block_d..(l + 1) * block_d], m_d, &self.root_d, &mut h);
            for c in 0..k {
                snr_d[l * k + c] = (0..m_d).map(|i| h[2 * (i * k + c)].powi(2) + h[2 * (i * k + c) + 1].powi(2)).sum();
            }
        }
        self.color(&white[self.l * block_d..], m_e, &self.root_e, &mut h);
        for c in 0..k {
            snr_e[c] = (0..m_e).map(|i| h[2 * (i * k + c)].powi(2) + h[2 * (i * k + c) + 1].powi(2)).sum();
        }
    }

    /// Full complex realization from a white draw.
    pub fn realize(&self, white: &[f64]) -> ChannelRealization {
        let (k, m_d, m_e) = (self.k, self.m_d, self.m_e);
        let block_d = 2 * m_d * k;
        let mut h_d = vec![Complex64::new(0.0, 0.0); self.l * k * m_d];
        let mut h_e = vec![Complex64::new(0.0, 0.0); k * m_e];
        let mut h = vec![0.0; block_d.max(2 * m_e * k)];
        for l in 0..self.l {
            self.color(&white[l * block_d..(l + 1) * block_d], m_d, &self.root_d, &mut h);
            for c in 0..k {
                for i in 0..m_d {
                    h_d[(l * k + c) * m_d + i] = Complex64::new(h[2 * (i * k + c)], h[2 * (i * k + c) + 1]);
                }
            }
        }
        self.color(&white[self.l * block_d..], m_e, &self.root_e, &mut h);
        for c in 0..k {
            for i in 0..m_e {
                h_e[c * m_e + i] = Complex64::new(h[2 * (i * k + c)], h[2 * (i * k + c) + 1]);
            }
        }
        ChannelRealization {
            k,
            l: self.l,
            m_d,
            m_e,
            h_d,
            h_e,
        }
    }
}

/// Draws one realization.
pub fn draw_channels<R: RngCore + ?Sized>(cfg: &SystemConfig, corr: &CorrelationConfig, rng: &mut R) -> ChannelRealization {
    let synth = ChannelSynth::new(cfg, corr);
    let mut white = vec![0.0; 2 * synth.white_len()];
    synth.draw_white(rng, &mut white);
    synth.realize(&white)
}

/// Selected pair (0-based) and its `Γ_S = (1 + γ_D) / (1 + γ_E)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selection {
    pub k: usize,
    pub l: usize,
    pub gamma_s: f64,
}

/// Pair maximizing `Γ_S`; ties go to the smallest `(k, l)`.
pub fn select_os_snr(k: usize, l: usize, snr_d: &[f64], snr_e: &[f64]) -> Selection {
    let mut best = Selection {
        k: 0,
        l: 0,
        gamma_s: f64::NEG_INFINITY,
    };
    for kk in 0..k {
        for ll in 0..l {
            let g = (1.0 + snr_d[ll * k + kk]) / (1.0 + snr_e[kk]);
            if g > best.gamma_s {
                best = Selection { k: kk, l: ll, gamma_s: g };
            }
        }
    }
    best
}

/// Pair maximizing `γ_D`; ties go to the smallest `(k, l)`.
pub fn select_ss_snr(k: usize, l: usize, snr_d: &[f64], snr_e: &[f64]) -> Selection {
    let (mut bk, mut bl, mut bd) = (0, 0, f64::NEG_INFINITY);
    for kk in 0..k {
        for ll in 0..l {
            if snr_d[ll * k + kk] > bd {
                (bk, bl, bd) = (kk, ll, snr_d[ll * k + kk]);
            }
        }
    }
    Selection {
        k: bk,
        l: bl,
        gamma_s: (1.0 + bd) / (1.0 + snr_e[bk]),
    }
}

pub fn select_os(r: &ChannelRealization) -> Selection {
    let (d, e) = r.snrs();
    select_os_snr(r.k, r.l, &d, &e)
}

pub fn select_ss(r: &ChannelRealization) -> Selection {
    let (d, e) = r.snrs();
    select_ss_snr(r.k, r.l, &d, &e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_realization() {
        // γ_D = [[3, 1], [0.5, 9]] indexed [k][l]; stored as snr_d[l·K + k].
        let snr_d = [3.0, 0.5, 1.0, 9.0];
        let snr_e = [1.0, 4.0];
        let os = select_os_snr(2, 2, &snr_d, &snr_e);
        assert_eq!((os.k, os.l, os.gamma_s), (0, 0, 2.0));
        let ss = select_ss_snr(2, 2, &snr_d, &snr_e);
        assert_eq!((ss.k, ss.l, ss.gamma_s), (1, 1, 2.0));
    }

    #[test]
    fn square_root_squares_back() {
        let t = ToeplitzCorrelation::new(4, 0.7, 3.0);
        let r = t.sqrt();
        let diff = &r * &r - t.matrix();
        assert!(diff.amax() < 1e-12);
        assert!((&r - r.transpose()).amax() < 1e-15);
    }
}
