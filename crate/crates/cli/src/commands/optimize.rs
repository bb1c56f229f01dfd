//! `friction optimize`: closed-form optimal transmit power and minimal
//! total energy per bit over an error-probability grid, with the
//! golden-section cross-check columns included.
//!
//! Keys: `seed`, `eps`, `mu`, `rate`, `out`; optional `beta` (default:
//! calibration at received SNR 4) and `bandwidth` (channel uses per
//! second, default 1).

use friction_core::bounds::{default_beta, golden_section_power, optimal_transmit_power};

use crate::config::Config;
use crate::report::{float, Csv};
use crate::CliError;

pub fn run(cfg: &Config) -> Result<(), CliError> {
    let epss = cfg.list_f64("eps")?;
    let beta = cfg.f64_or("beta", default_beta())?;
    let mu = cfg.f64("mu")?;
    let rate = cfg.f64("rate")?;
    let bandwidth = cfg.f64_or("bandwidth", 1.0)?;
    let out = cfg.path("out")?;

    let mut csv = Csv::new(&[
        "eps",
        "beta",
        "mu",
        "rate",
        "bandwidth",
        "p_star",
        "min_energy_per_bit",
        "golden_p_star",
        "golden_min",
    ]);
    for &eps in &epss {
        let (p_star, value) = optimal_transmit_power(eps, beta, mu, rate, bandwidth)?;
        let (gp, gv) = golden_section_power(eps, beta, mu, rate, bandwidth)?;
        csv.row(&[
            float(eps),
            float(beta),
            float(mu),
            float(rate),
            float(bandwidth),
            float(p_star),
            float(value),
            float(gp),
            float(gv),
        ]);
    }
    csv.write(&out)
}
