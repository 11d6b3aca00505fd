//! Consistency checks of the closed forms against the quadrature oracle and
//! Monte Carlo.

use std::io::Write;

use rayon::prelude::*;

use esr_core::engine::{esr_closed_form, EngineOptions, Method, Scheme};
use esr_core::simulation::{quadrature_esr, McPlan};

use crate::error::CliError;
use crate::experiment::Point;
use crate::runner::parallel_mc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    /// Sizes in {1, 2}.
    Small,
    /// Sizes in {1, 2, 3}.
    Full,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "small" => Ok(Grid::Small),
            "full" => Ok(Grid::Full),
            _ => Err(CliError::usage(format!("unknown grid '{s}' (small|full)"))),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        let top = match self {
            Grid::Small => 2,
            Grid::Full => 3,
        };
        let mut out = Vec::new();
        for k in 1..=top {
            for l in 1..=top {
                for m_d in 1..=top {
                    for m_e in 1..=top {
                        for lambda_d_db in [0.0, 10.0, 20.0] {
                            for lambda_e_db in [0.0, 9.0] {
                                out.push(Point {
                                    k,
                                    l,
                                    m_d,
                                    m_e,
                                    lambda_d_db,
                                    lambda_e_db,
                                    ..Point::default()
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub scheme: Scheme,
    pub point: Point,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `|value - reference| <= tolerance`.
    fn close(name: &'static str, scheme: Scheme, point: Point, value: f64, reference: f64, tolerance: f64) -> Self {
        Check {
            name,
            scheme,
            point,
            value,
            reference,
            tolerance,
            pass: (value - reference).abs() <= tolerance,
        }
    }

    /// `value >= reference - tolerance`.
    fn above(name: &'static str, scheme: Scheme, point: Point, value: f64, reference: f64, tolerance: f64) -> Self {
        Check {
            name,
            scheme,
            point,
            value,
            reference,
            tolerance,
            pass: value >= reference - tolerance,
        }
    }
}

fn point_checks(p: &Point) -> Result<Vec<Check>, CliError> {
    let cfg = p.system()?;
    let opts = EngineOptions::default();
    let mut out = Vec::new();
    let mut exact = [0.0; 2];
    for (i, scheme) in [Scheme::Os, Scheme::Ss].into_iter().enumerate() {
        let e = esr_closed_form(&cfg, scheme, Method::Exact, &opts)?.value;
        let q = quadrature_esr(&cfg, scheme)?.value;
        let h = esr_closed_form(&cfg, scheme, Method::HighSnr, &opts)?.value;
        exact[i] = e;
        out.push(Check::close("exact_vs_quadrature", scheme, *p, e, q, (1e-6 * q.abs()).max(1e-8)));
        out.push(Check::above("highsnr_upper_bound", scheme, *p, h, e, 1e-9));
    }
    out.push(Check::above("os_not_below_ss", Scheme::Os, *p, exact[0], exact[1], 1e-9));
    Ok(out)
}

/// Grid checks plus one Monte Carlo spot check per scheme.
pub fn run_validation(grid: Grid, trials: u64, seed: u64) -> Result<Vec<Check>, CliError> {
    let per_point: Vec<Vec<Check>> = grid.points().par_iter().map(point_checks).collect::<Result<_, _>>()?;
    let mut checks: Vec<Check> = per_point.into_iter().flatten().collect();
    let p = Point {
        k: 2,
        l: 2,
        m_d: 2,
        m_e: 2,
        ..Point::default()
    };
    let cfg = p.system()?;
    let report = parallel_mc(&McPlan::new(&cfg, &[p.correlation()?], trials, seed)?);
    for scheme in [Scheme::Os, Scheme::Ss] {
        let est = report.estimate(0, scheme);
        let exact = esr_closed_form(&cfg, scheme, Method::Exact, &EngineOptions::default())?.value;
        checks.push(Check::close("mc_within_4_stderr", scheme, p, est.mean, exact, 4.0 * est.stderr));
    }
    Ok(checks)
}

pub fn write_checks<W: Write>(out: W, checks: &[Check]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "check",
        "scheme",
        "K",
        "L",
        "M_D",
        "M_E",
        "lambda_d_db",
        "lambda_e_db",
        "value",
        "reference",
        "deviation",
        "tolerance",
        "pass",
    ])?;
    for c in checks {
        let p = &c.point;
        w.write_record([
            c.name.to_string(),
            c.scheme.name().to_string(),
            p.k.to_string(),
            p.l.to_string(),
            p.m_d.to_string(),
            p.m_e.to_string(),
            p.lambda_d_db.to_string(),
            p.lambda_e_db.to_string(),
            c.value.to_string(),
            c.reference.to_string(),
            (c.value - c.reference).to_string(),
            c.tolerance.to_string(),
            c.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
