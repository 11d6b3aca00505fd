//! CSV rows.

use std::io::Write;

use esr_core::engine::{EsrResult, Method, Scheme};
use esr_core::simulation::McEstimate;

use crate::error::CliError;
use crate::experiment::Point;

pub const HEADER: [&str; 17] = [
    "scheme",
    "method",
    "K",
    "L",
    "M_D",
    "M_E",
    "lambda_d_db",
    "lambda_e_db",
    "rho_s",
    "rho_d",
    "rho_e",
    "esr_bpcu",
    "stderr",
    "term_count",
    "max_log_term",
    "trials",
    "seed",
];

/// One output line; `None` fields print empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub scheme: Scheme,
    pub method: Method,
    pub point: Point,
    pub esr: f64,
    pub stderr: Option<f64>,
    pub term_count: Option<u64>,
    pub max_log_term: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

impl Row {
    pub fn closed_form(point: Point, r: &EsrResult) -> Self {
        Row {
            scheme: r.scheme,
            method: r.method,
            point,
            esr: r.value,
            stderr: None,
            term_count: Some(r.term_count),
            max_log_term: r.max_log_term.is_finite().then_some(r.max_log_term),
            trials: None,
            seed: None,
        }
    }

    pub fn monte_carlo(point: Point, scheme: Scheme, e: &McEstimate) -> Self {
        Row {
            scheme,
            method: Method::MonteCarlo,
            point,
            esr: e.mean,
            stderr: Some(e.stderr),
            term_count: None,
            max_log_term: None,
            trials: Some(e.trials),
            seed: Some(e.seed),
        }
    }

    pub fn record(&self) -> Vec<String> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let p = &self.point;
        vec![
            self.scheme.name().to_string(),
            self.method.name().to_string(),
            p.k.to_string(),
            p.l.to_string(),
            p.m_d.to_string(),
            p.m_e.to_string(),
            p.lambda_d_db.to_string(),
            p.lambda_e_db.to_string(),
            p.rho_s.to_string(),
            p.rho_d.to_string(),
            p.rho_e.to_string(),
            self.esr.to_string(),
            opt(self.stderr),
            opt(self.term_count),
            opt(self.max_log_term),
            opt(self.trials),
            opt(self.seed),
        ]
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}
