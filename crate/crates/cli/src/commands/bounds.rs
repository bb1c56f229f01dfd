//! `friction bounds`: evaluate the closed-form lower bounds over a sweep
//! grid, one CSV row per grid point, condition failures flagged in place.
//!
//! Keys: `seed`, `theorems` (decoding,encoding,near_capacity), `k`,
//! `eps` (decoding/encoding), `n` (near_capacity), `p_ch`, `lambda`,
//! `mu`, `out`.

use friction_core::bounds::{decoding_bm_lb, encoding_bm_lb, near_capacity_bm_lb, BoundReport};

use crate::config::Config;
use crate::report::{float, opt_float, Csv};
use crate::CliError;

const COLUMNS: [&str; 10] = [
    "theorem",
    "k",
    "n",
    "eps",
    "p_ch",
    "lambda",
    "mu",
    "condition_ok",
    "bound_bitmeters",
    "bound_joules",
];

#[allow(clippy::too_many_arguments)]
fn push_row(
    csv: &mut Csv,
    report: &BoundReport,
    k: u64,
    n: Option<u64>,
    eps: Option<f64>,
    p_ch: f64,
    lambda: f64,
    mu: f64,
) {
    csv.row(&[
        report.theorem.to_string(),
        k.to_string(),
        n.map(|v| v.to_string()).unwrap_or_default(),
        eps.map(float).unwrap_or_default(),
        float(p_ch),
        float(lambda),
        float(mu),
        report.condition_ok.to_string(),
        opt_float(report.value),
        opt_float(report.value.map(|v| mu * v)),
    ]);
}

pub fn run(cfg: &Config) -> Result<(), CliError> {
    let theorems = cfg.list_str("theorems")?;
    let ks = cfg.list_u64("k")?;
    let p_chs = cfg.list_f64("p_ch")?;
    let lambda = cfg.f64("lambda")?;
    let mu = cfg.f64("mu")?;
    let out = cfg.path("out")?;

    let mut csv = Csv::new(&COLUMNS);
    for theorem in &theorems {
        match theorem.as_str() {
            "decoding" | "encoding" => {
                let epss = cfg.list_f64("eps")?;
                for &k in &ks {
                    for &eps in &epss {
                        for &p_ch in &p_chs {
                            let report = if theorem == "decoding" {
                                decoding_bm_lb(k, eps, p_ch, lambda)?
                            } else {
                                encoding_bm_lb(k, eps, p_ch, lambda)?
                            };
                            push_row(&mut csv, &report, k, None, Some(eps), p_ch, lambda, mu);
                        }
                    }
                }
            }
            "near_capacity" => {
                let ns = cfg.list_u64("n")?;
                for &k in &ks {
                    for &n in &ns {
                        for &p_ch in &p_chs {
                            let report = near_capacity_bm_lb(k, n, p_ch, lambda)?;
                            push_row(&mut csv, &report, k, Some(n), None, p_ch, lambda, mu);
                        }
                    }
                }
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown theorem `{other}` (expected decoding, encoding, or near_capacity)"
                )))
            }
        }
    }
    csv.write(&out)
}
