//! Evaluates experiment specs across a worker pool.

use rayon::prelude::*;

use esr_core::engine::{esr_closed_form, EngineOptions, Method, Scheme};
use esr_core::simulation::{quadrature_esr, ChunkStats, McPlan};

use crate::error::CliError;
use crate::experiment::{ExperimentSpec, Point};
use crate::output::Row;

/// Rows in point, scheme, method order.
pub fn run_spec(spec: &ExperimentSpec) -> Result<Vec<Row>, CliError> {
    spec.check()?;
    let per_point: Vec<Vec<Row>> = spec
        .points()
        .par_iter()
        .map(|p| run_point(spec, p))
        .collect::<Result<_, _>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

pub fn run_specs(specs: &[ExperimentSpec]) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for s in specs {
        rows.extend(run_spec(s)?);
    }
    Ok(rows)
}

fn run_point(spec: &ExperimentSpec, p: &Point) -> Result<Vec<Row>, CliError> {
    let cfg = p.system()?;
    let mc = if spec.methods.contains(&Method::MonteCarlo) {
        let plan = McPlan::new(&cfg, &[p.correlation()?], spec.trials, spec.seed)?;
        Some(parallel_mc(&plan))
    } else {
        None
    };
    let opts = EngineOptions::default();
    let mut rows = Vec::new();
    for scheme in spec.scheme.schemes() {
        for &method in &spec.methods {
            let row = match method {
                Method::MonteCarlo => {
                    let report = mc.as_ref().expect("plan built when mc requested");
                    Row::monte_carlo(*p, scheme, &report.estimate(0, scheme))
                }
                Method::Quadrature => Row::closed_form(*p, &quadrature_esr(&cfg, scheme)?),
                _ => Row::closed_form(*p, &esr_closed_form(&cfg, scheme, method, &opts)?),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Chunks run on the pool and merge in chunk order, so the report depends
/// only on the seed.
pub fn parallel_mc(plan: &McPlan) -> esr_core::simulation::McReport {
    let chunks: Vec<ChunkStats> = (0..plan.chunks()).into_par_iter().map(|c| plan.run_chunk(c)).collect();
    plan.finish(&chunks)
}

/// Both schemes for a single point with closed forms, used by checks.
pub fn closed_pair(p: &Point, method: Method) -> Result<[f64; 2], CliError> {
    let cfg = p.system()?;
    let opts = EngineOptions::default();
    let os = esr_closed_form(&cfg, Scheme::Os, method, &opts)?;
    let ss = esr_closed_form(&cfg, Scheme::Ss, method, &opts)?;
    Ok([os.value, ss.value])
}
