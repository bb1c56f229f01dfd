//! `friction scaling`: least-squares exponents of the asymptotic laws at
//! desk scale. Refuses grids with fewer than four points.
//!
//! Keys: `seed`, `eps` (>= 4 points), `n` (>= 4 points), `p_ch`, `k`,
//! `lambda`, `mu`, `rate`, `out`; optional `beta` and `bandwidth`
//! (default 1).

use friction_core::bounds::{
    decoding_bm_lb, default_beta, linear_fit, near_capacity_bm_lb, optimal_transmit_power,
    LinearFit,
};

use crate::config::Config;
use crate::report::{float, Csv};
use crate::CliError;

fn fit_or_refuse(name: &str, points: &[(f64, f64)]) -> Result<LinearFit, CliError> {
    if points.len() < 4 {
        return Err(CliError::Config(format!(
            "fit `{name}` needs at least 4 grid points, got {}",
            points.len()
        )));
    }
    linear_fit(points)
        .ok_or_else(|| CliError::Config(format!("fit `{name}` is degenerate (constant grid)")))
}

pub fn run(cfg: &Config) -> Result<(), CliError> {
    let epss = cfg.list_f64("eps")?;
    let ns = cfg.list_u64("n")?;
    let p_ch = cfg.f64("p_ch")?;
    let k = cfg.u64("k")?;
    let lambda = cfg.f64("lambda")?;
    let mu = cfg.f64("mu")?;
    let rate = cfg.f64("rate")?;
    let bandwidth = cfg.f64_or("bandwidth", 1.0)?;
    let beta = cfg.f64_or("beta", default_beta())?;
    let out = cfg.path("out")?;

    // Distinct eps values only: a constant sweep cannot be fit.
    let mut distinct = epss.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(CliError::Config(format!(
            "eps grid has {} distinct point(s); need at least 4 to fit",
            distinct.len()
        )));
    }

    let reliability = |eps: f64| -(10.0 * eps).log2();

    let mut decoding_pts = Vec::new();
    let mut energy_pts = Vec::new();
    for &eps in &epss {
        let report = decoding_bm_lb(k, eps, p_ch, lambda)?;
        if let Some(v) = report.value {
            decoding_pts.push((reliability(eps).ln(), v.ln()));
        }
        let (_, value) = optimal_transmit_power(eps, beta, mu, rate, bandwidth)?;
        energy_pts.push((reliability(eps).ln(), value.ln()));
    }
    let mut blocklength_pts = Vec::new();
    for &n in &ns {
        let report = near_capacity_bm_lb(k, n, p_ch, lambda)?;
        if let Some(v) = report.value {
            blocklength_pts.push(((n as f64).log2().ln(), v.ln()));
        }
    }

    let decoding = fit_or_refuse("decoding", &decoding_pts)?;
    let energy = fit_or_refuse("total_energy", &energy_pts)?;
    let blocklength = fit_or_refuse("near_capacity", &blocklength_pts)?;

    let mut csv = Csv::new(&[
        "fit",
        "points",
        "slope",
        "intercept",
        "max_abs_residual",
        "expected_slope",
    ]);
    for (name, fit, points, expected) in [
        ("decoding_sqrt_reliability", decoding, decoding_pts.len(), 0.5),
        (
            "total_energy_cube_root",
            energy,
            energy_pts.len(),
            1.0 / 3.0,
        ),
        ("near_capacity_sqrt_log_n", blocklength, blocklength_pts.len(), 0.5),
    ] {
        csv.row(&[
            name.to_string(),
            points.to_string(),
            float(fit.slope),
            float(fit.intercept),
            float(fit.max_abs_residual),
            float(expected),
        ]);
    }
    csv.write(&out)
}
