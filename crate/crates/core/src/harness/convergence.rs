//! Spatial convergence studies against manufactured solutions.

use crate::error::{Error, Result};
use super::registry::ExperimentSpec;
use super::solver::{component_error, driver_dt, solve_to, Discretization};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub degree: usize,
    pub elements: usize,
    pub h: f64,
    /// Combined error over all components.
    pub l2_error: f64,
    /// Order against the previous row with the same degree.
    pub observed_order: Option<f64>,
    pub component_errors: Vec<f64>,
    pub component_orders: Vec<Option<f64>>,
}

/// `log(e_prev / e_cur) / log(h_prev / h_cur)`
pub fn observed_order(e_prev: f64, e_cur: f64, h_prev: f64, h_cur: f64) -> f64 {
    (e_prev / e_cur).ln() / (h_prev / h_cur).ln()
}

/// Parses `"2:35,45,90;3:20,40,60"` into `(N, K)` pairs in the given order.
pub fn parse_levels(text: &str) -> Result<Vec<(usize, usize)>> {
    let bad = |why: &str| Error::Config(format!("bad levels `{text}`: {why}"));
    let mut out = Vec::new();
    for group in text.split(';').map(str::trim).filter(|g| !g.is_empty()) {
        let (n, ks) = group.split_once(':').ok_or_else(|| bad("expected N:K1,K2,..."))?;
        let n: usize = n.trim().parse().map_err(|_| bad("degree is not an integer"))?;
        for k in ks.split(',').map(str::trim).filter(|k| !k.is_empty()) {
            out.push((n, k.parse().map_err(|_| bad("element count is not an integer"))?));
        }
    }
    if out.is_empty() {
        return Err(bad("no resolutions"));
    }
    Ok(out)
}

/// Runs every `(N, K)` cell to the final time and measures the error there.
/// `courant` overrides the stability-capped default.
pub fn run_convergence(
    spec: &ExperimentSpec,
    resolutions: &[(usize, usize)],
    courant: Option<f64>,
) -> Result<Vec<ConvergenceRow>> {
    let exact = spec
        .problem
        .exact()
        .ok_or_else(|| Error::Config(format!("experiment {} has no exact solution", spec.name)))?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(resolutions.len());
    for &(degree, elements) in resolutions {
        let cell = || -> Result<Vec<f64>> {
            let disc = Discretization::new(spec.domain, degree, elements, spec.problem.alpha())?;
            let dt = driver_dt(&spec.problem, &disc, courant)?;
            let y = solve_to(spec, &disc, dt)?;
            y.components()
                .into_iter()
                .zip(&exact)
                .map(|(u, e)| component_error(u, e, spec.final_time, &disc))
                .collect()
        };
        let errs = cell().map_err(|e| Error::AtResolution {
            degree,
            elements,
            source: Box::new(e),
        })?;
        let h = (spec.domain.1 - spec.domain.0) / elements as f64;
        let total = errs.iter().map(|e| e * e).sum::<f64>().sqrt();
        let prev = rows.last().filter(|r| r.degree == degree);
        let row = ConvergenceRow {
            degree,
            elements,
            h,
            l2_error: total,
            observed_order: prev.map(|p| observed_order(p.l2_error, total, p.h, h)),
            component_orders: errs
                .iter()
                .enumerate()
                .map(|(i, &e)| prev.map(|p| observed_order(p.component_errors[i], e, p.h, h)))
                .collect(),
            component_errors: errs,
        };
        rows.push(row);
    }
    Ok(rows)
}
