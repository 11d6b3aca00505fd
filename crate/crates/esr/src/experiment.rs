//! Experiment specifications, sweeps and figure presets.

use std::fmt;

use esr_core::channel::{CorrelationConfig, SystemConfig};
use esr_core::engine::{Method, Scheme};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeSel {
    Os,
    Ss,
    Both,
}

impl SchemeSel {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "os" => Ok(SchemeSel::Os),
            "ss" => Ok(SchemeSel::Ss),
            "both" => Ok(SchemeSel::Both),
            _ => Err(CliError::usage(format!("unknown scheme '{s}' (os|ss|both)"))),
        }
    }

    pub fn schemes(&self) -> Vec<Scheme> {
        match self {
            SchemeSel::Os => vec![Scheme::Os],
            SchemeSel::Ss => vec![Scheme::Ss],
            SchemeSel::Both => vec![Scheme::Os, Scheme::Ss],
        }
    }
}

pub const ALL_METHODS: [Method; 5] = [
    Method::Exact,
    Method::HighSnr,
    Method::Asymptotic,
    Method::Quadrature,
    Method::MonteCarlo,
];

pub fn parse_methods(s: &str) -> Result<Vec<Method>, CliError> {
    match s {
        "all" => Ok(ALL_METHODS.to_vec()),
        _ => ALL_METHODS
            .iter()
            .find(|m| m.name() == s)
            .map(|m| vec![*m])
            .ok_or_else(|| CliError::usage(format!("unknown method '{s}' (exact|highsnr|asymptotic|quadrature|mc|all)"))),
    }
}

/// One evaluation point as the user states it (λ in dB).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub k: u32,
    pub l: u32,
    pub m_d: u32,
    pub m_e: u32,
    pub lambda_d_db: f64,
    pub lambda_e_db: f64,
    pub rho_s: f64,
    pub rho_d: f64,
    pub rho_e: f64,
}

impl Default for Point {
    fn default() -> Self {
        Point {
            k: 1,
            l: 1,
            m_d: 1,
            m_e: 1,
            lambda_d_db: 10.0,
            lambda_e_db: 0.0,
            rho_s: 0.0,
            rho_d: 0.0,
            rho_e: 0.0,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl Point {
    pub fn system(&self) -> Result<SystemConfig, CliError> {
        SystemConfig::new(
            self.k,
            self.l,
            self.m_d,
            self.m_e,
            db_to_linear(self.lambda_d_db),
            db_to_linear(self.lambda_e_db),
        )
        .map_err(|e| CliError::usage(e.to_string()))
    }

    pub fn correlation(&self) -> Result<CorrelationConfig, CliError> {
        CorrelationConfig::new(self.rho_s, self.rho_d, self.rho_e).map_err(|e| CliError::usage(e.to_string()))
    }

    pub fn is_iid(&self) -> bool {
        self.rho_s == 0.0 && self.rho_d == 0.0 && self.rho_e == 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVar {
    LambdaDDb,
    LambdaEDb,
    MD,
    ME,
    K,
    L,
    RhoS,
    RhoD,
    RhoE,
}

impl SweepVar {
    pub const ALL: [SweepVar; 9] = [
        SweepVar::LambdaDDb,
        SweepVar::LambdaEDb,
        SweepVar::MD,
        SweepVar::ME,
        SweepVar::K,
        SweepVar::L,
        SweepVar::RhoS,
        SweepVar::RhoD,
        SweepVar::RhoE,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::LambdaDDb => "lambda_d_db",
            SweepVar::LambdaEDb => "lambda_e_db",
            SweepVar::MD => "m_d",
            SweepVar::ME => "m_e",
            SweepVar::K => "k",
            SweepVar::L => "l",
            SweepVar::RhoS => "rho_s",
            SweepVar::RhoD => "rho_d",
            SweepVar::RhoE => "rho_e",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .iter()
            .find(|v| v.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|v| v.name()).collect();
                CliError::usage(format!("unknown sweep variable '{s}' ({})", names.join("|")))
            })
    }

    fn is_integer(&self) -> bool {
        matches!(self, SweepVar::MD | SweepVar::ME | SweepVar::K | SweepVar::L)
    }

    fn apply(&self, p: &mut Point, v: f64) {
        match self {
            SweepVar::LambdaDDb => p.lambda_d_db = v,
            SweepVar::LambdaEDb => p.lambda_e_db = v,
            SweepVar::MD => p.m_d = v as u32,
            SweepVar::ME => p.m_e = v as u32,
            SweepVar::K => p.k = v as u32,
            SweepVar::L => p.l = v as u32,
            SweepVar::RhoS => p.rho_s = v,
            SweepVar::RhoD => p.rho_d = v,
            SweepVar::RhoE => p.rho_e = v,
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Sweep {
    pub fn new(var: SweepVar, from: f64, to: f64, step: f64) -> Result<Self, CliError> {
        if !(step > 0.0) || !(from <= to) || !from.is_finite() || !to.is_finite() {
            return Err(CliError::usage(format!(
                "sweep needs from <= to and step > 0 (got {from}..{to} step {step})"
            )));
        }
        if var.is_integer() {
            for v in [from, step] {
                if v.fract() != 0.0 {
                    return Err(CliError::usage(format!("{var} sweeps over integers (got {v})")));
                }
            }
        }
        Ok(Sweep { var, from, to, step })
    }

    /// `from, from + step, ...` up to `to` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.from + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub scheme: SchemeSel,
    pub methods: Vec<Method>,
    pub base: Point,
    pub sweep: Option<Sweep>,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn points(&self) -> Vec<Point> {
        match &self.sweep {
            None => vec![self.base],
            Some(s) => s
                .values()
                .into_iter()
                .map(|v| {
                    let mut p = self.base;
                    s.var.apply(&mut p, v);
                    p
                })
                .collect(),
        }
    }

    pub fn row_count(&self) -> usize {
        self.points().len() * self.scheme.schemes().len() * self.methods.len()
    }

    /// Rejects combinations no evaluator supports.
    pub fn check(&self) -> Result<(), CliError> {
        if self.methods.contains(&Method::MonteCarlo) && self.trials < 1000 {
            return Err(CliError::usage("mc needs at least 1000 trials"));
        }
        for p in self.points() {
            p.system()?;
            p.correlation()?;
            if !p.is_iid() && self.methods.iter().any(|m| *m != Method::MonteCarlo) {
                return Err(CliError::usage(
                    "correlated channels are only supported by --method mc",
                ));
            }
        }
        Ok(())
    }
}

pub const FIGURES: [&str; 4] = ["fig2", "fig3", "fig4", "fig5"];

/// Parameter sets of the four result figures.
pub fn figure_preset(name: &str, trials: u64, seed: u64) -> Result<Vec<ExperimentSpec>, CliError> {
    let lambda_sweep = |to: f64| Sweep {
        var: SweepVar::LambdaDDb,
        from: 0.0,
        to,
        step: 2.0,
    };
    let spec = |base: Point, methods: Vec<Method>, sweep: Sweep| ExperimentSpec {
        scheme: SchemeSel::Both,
        methods,
        base,
        sweep: Some(sweep),
        trials,
        seed,
    };
    match name {
        "fig2" => Ok([(1, 1), (1, 3), (3, 1), (3, 3)]
            .into_iter()
            .map(|(k, l)| {
                let base = Point {
                    k,
                    l,
                    m_d: 3,
                    m_e: 3,
                    lambda_e_db: 9.0,
                    ..Point::default()
                };
                spec(base, vec![Method::Exact, Method::HighSnr], lambda_sweep(40.0))
            })
            .collect()),
        "fig3" => {
            let mut out = Vec::new();
            for kl in [1, 2] {
                for m in [1, 2] {
                    let base = Point {
                        k: kl,
                        l: kl,
                        m_d: m,
                        m_e: m,
                        lambda_e_db: 9.0,
                        ..Point::default()
                    };
                    out.push(spec(base, vec![Method::HighSnr, Method::Asymptotic], lambda_sweep(60.0)));
                }
            }
            Ok(out)
        }
        "fig4" => Ok([1, 2, 3]
            .into_iter()
            .map(|m_e| {
                let base = Point {
                    k: 2,
                    l: 2,
                    m_e,
                    lambda_d_db: 20.0,
                    lambda_e_db: 0.0,
                    ..Point::default()
                };
                let sweep = Sweep {
                    var: SweepVar::MD,
                    from: 1.0,
                    to: 6.0,
                    step: 1.0,
                };
                spec(base, vec![Method::Exact], sweep)
            })
            .collect()),
        "fig5" => {
            let mut out = Vec::new();
            let sweep = Sweep {
                var: SweepVar::LambdaDDb,
                from: 0.0,
                to: 30.0,
                step: 5.0,
            };
            // Panels vary (ρ_S, ρ_D) at ρ_E = 0, then (ρ_S, ρ_E) at ρ_D = 0.
            let mut combos = Vec::new();
            for rs in [0.0, 0.9] {
                for rd in [0.0, 0.9] {
                    combos.push((rs, rd, 0.0));
                }
            }
            for rs in [0.0, 0.9] {
                combos.push((rs, 0.0, 0.9));
            }
            for (rho_s, rho_d, rho_e) in combos {
                let base = Point {
                    k: 4,
                    l: 4,
                    m_d: 4,
                    m_e: 4,
                    lambda_e_db: 9.0,
                    rho_s,
                    rho_d,
                    rho_e,
                    ..Point::default()
                };
                out.push(spec(base, vec![Method::MonteCarlo], sweep));
            }
            Ok(out)
        }
        _ => Err(CliError::usage(format!(
            "unknown figure '{name}' ({})",
            FIGURES.join("|")
        ))),
    }
}
