//! Chunked Monte Carlo with common random numbers.
//!
//! Trials are split into fixed chunks of [`CHUNK_SIZE`]; chunk `c` draws
//! from ChaCha8 stream `c` of the seed, so a chunk's result does not depend
//! on which thread runs it. Chunk statistics are merged in chunk order.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use super::{select_os_snr, select_ss_snr, ChannelSynth};
use crate::channel::{CorrelationConfig, SystemConfig};
use crate::engine::Scheme;
use crate::error::{EsrError, Result};

pub const CHUNK_SIZE: u64 = 1 << 14;

/// Running count, sum and sum of squares.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        libm::sqrt(var / n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    /// Bits per channel use.
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// `[log2 Γ_S]^+` for the OS and SS choices on one set of link SNRs.
pub fn rate_pair(k: usize, l: usize, snr_d: &[f64], snr_e: &[f64]) -> [f64; 2] {
    let os = select_os_snr(k, l, snr_d, snr_e).gamma_s;
    let ss = select_ss_snr(k, l, snr_d, snr_e).gamma_s;
    [libm::log2(os).max(0.0), libm::log2(ss).max(0.0)]
}

/// Statistics of one chunk for every correlation variant of a plan.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChunkStats {
    /// `rates[v][scheme]`.
    pub rates: Vec<[Moments; 2]>,
    /// Per-trial `rate(v) - rate(0)`.
    pub diffs: Vec<[Moments; 2]>,
    /// Per-trial `(os(v) - os(0)) - (ss(v) - ss(0))`.
    pub contrast: Vec<Moments>,
}

impl ChunkStats {
    fn empty(variants: usize) -> Self {
        ChunkStats {
            rates: vec![[Moments::default(); 2]; variants],
            diffs: vec![[Moments::default(); 2]; variants],
            contrast: vec![Moments::default(); variants],
        }
    }

    pub fn merge(&mut self, o: &ChunkStats) {
        for v in 0..self.rates.len() {
            for s in 0..2 {
                self.rates[v][s].merge(&o.rates[v][s]);
                self.diffs[v][s].merge(&o.diffs[v][s]);
            }
            self.contrast[v].merge(&o.contrast[v]);
        }
    }
}

/// A Monte Carlo run over one configuration and several correlation
/// variants sharing every white draw.
#[derive(Clone, Debug)]
pub struct McPlan {
    pub cfg: SystemConfig,
    pub variants: Vec<CorrelationConfig>,
    pub trials: u64,
    pub seed: u64,
    synths: Vec<ChannelSynth>,
}

/// Paired comparison of variant `v` against variant 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedReport {
    /// `[os, ss]` mean of `rate(v) - rate(0)`.
    pub diff: [f64; 2],
    pub diff_stderr: [f64; 2],
    /// Mean of the OS change minus the SS change.
    pub contrast: f64,
    pub contrast_stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McReport {
    /// `estimates[v][scheme]`.
    pub estimates: Vec<[McEstimate; 2]>,
    /// Entry 0 compares the baseline with itself.
    pub paired: Vec<PairedReport>,
}

impl McReport {
    pub fn estimate(&self, variant: usize, scheme: Scheme) -> McEstimate {
        self.estimates[variant][scheme_index(scheme)]
    }
}

fn scheme_index(s: Scheme) -> usize {
    match s {
        Scheme::Os => 0,
        Scheme::Ss => 1,
    }
}

impl McPlan {
    pub fn new(cfg: &SystemConfig, variants: &[CorrelationConfig], trials: u64, seed: u64) -> Result<Self> {
        cfg.validate()?;
        if variants.is_empty() {
            return Err(EsrError::Contract("at least one correlation variant"));
        }
        for v in variants {
            v.validate()?;
        }
        if trials == 0 {
            return Err(EsrError::InvalidConfig("trials must be positive".into()));
        }
        Ok(McPlan {
            cfg: *cfg,
            variants: variants.to_vec(),
            trials,
            seed,
            synths: variants.iter().map(|v| ChannelSynth::new(cfg, v)).collect(),
        })
    }

    pub fn chunks(&self) -> u64 {
        self.trials.div_ceil(CHUNK_SIZE)
    }

    /// Runs chunk `c`.
    pub fn run_chunk(&self, c: u64) -> ChunkStats {
        let n = CHUNK_SIZE.min(self.trials - c * CHUNK_SIZE);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(c);
        let (k, l) = (self.cfg.k as usize, self.cfg.l as usize);
        let base = &self.synths[0];
        let mut white = vec![0.0; 2 * base.white_len()];
        let mut snr_d = vec![0.0; k * l];
        let mut snr_e = vec![0.0; k];
        let mut stats = ChunkStats::empty(self.synths.len());
        let mut first = [0.0; 2];
        for _ in 0..n {
            base.draw_white(&mut rng, &mut white);
            for (v, synth) in self.synths.iter().enumerate() {
                synth.snrs_from_white(&white, &mut snr_d, &mut snr_e);
                let r = rate_pair(k, l, &snr_d, &snr_e);
                if v == 0 {
                    first = r;
                }
                for s in 0..2 {
                    stats.rates[v][s].push(r[s]);
                    stats.diffs[v][s].push(r[s] - first[s]);
                }
                stats.contrast[v].push((r[0] - first[0]) - (r[1] - first[1]));
            }
        }
        stats
    }

    /// Merges chunk results given in chunk order.
    pub fn finish<'a, I: IntoIterator<Item = &'a ChunkStats>>(&self, chunks: I) -> McReport {
        let mut total = ChunkStats::empty(self.synths.len());
        for c in chunks {
            total.merge(c);
        }
        let est = |m: &Moments| McEstimate {
            mean: m.mean(),
            stderr: m.stderr(),
            trials: m.n,
            seed: self.seed,
        };
        McReport {
            estimates: total.rates.iter().map(|r| [est(&r[0]), est(&r[1])]).collect(),
            paired: (0..total.rates.len())
                .map(|v| PairedReport {
                    diff: [total.diffs[v][0].mean(), total.diffs[v][1].mean()],
                    diff_stderr: [total.diffs[v][0].stderr(), total.diffs[v][1].stderr()],
                    contrast: total.contrast[v].mean(),
                    contrast_stderr: total.contrast[v].stderr(),
                })
                .collect(),
        }
    }

    /// Runs every chunk on the calling thread.
    pub fn run(&self) -> McReport {
        let chunks: Vec<ChunkStats> = (0..self.chunks()).map(|c| self.run_chunk(c)).collect();
        self.finish(&chunks)
    }
}

/// Monte Carlo ESR of one scheme.
pub fn estimate_esr(
    cfg: &SystemConfig,
    corr: &CorrelationConfig,
    scheme: Scheme,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials < 1000 {
        return Err(EsrError::InvalidConfig("at least 1000 trials".into()));
    }
    let plan = McPlan::new(cfg, &[*corr], trials, seed)?;
    Ok(plan.run().estimate(0, scheme))
}
