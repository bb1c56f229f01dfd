//! `friction simulate`: Monte-Carlo measurement of placed coders joined
//! with the matching decoder lower bound per row. Exits 3 if any
//! in-regime row measures below its bound.
//!
//! Keys: `seed`, `coders` (comma-separated coder file paths), `p_ch`,
//! `trials`, `out`; optional `ber_out` (channel-format CSV) and
//! `emit_dir` (circuit and trace artifacts per coder).

use std::path::Path;

use friction_core::bounds::{decoding_bm_lb, fixed_power_condition};
use friction_core::channel::derive_seed;
use friction_core::codes::{parse_coder_file, simulate, PlacedCoder};
use friction_core::computation::render_trace;
use friction_core::geometry::render_circuit;

use crate::config::Config;
use crate::report::{float, opt_float, write_text, Csv};
use crate::CliError;

const COLUMNS: [&str; 17] = [
    "coder",
    "placement",
    "family",
    "k",
    "n",
    "p_ch",
    "trials",
    "errors",
    "eps_hat",
    "wilson_lo",
    "wilson_hi",
    "mean_decoder_bitmeters",
    "mean_encoder_bitmeters",
    "mean_iterations",
    "condition_ok",
    "bound_bitmeters",
    "violation",
];

const BER_COLUMNS: [&str; 7] = [
    "trials",
    "errors",
    "eps_hat",
    "wilson_lo",
    "wilson_hi",
    "p_ch",
    "seed",
];

fn coder_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn emit_artifacts(dir: &Path, label: &str, coder: &PlacedCoder) -> Result<(), CliError> {
    write_text(
        &dir.join(format!("{label}_encoder_circuit.txt")),
        &render_circuit(coder.encoder().circuit()),
    )?;
    write_text(
        &dir.join(format!("{label}_decoder_circuit.txt")),
        &render_circuit(coder.decoder().circuit()),
    )?;
    let (_, enc_trace) = coder
        .encode(&vec![0u8; coder.params().k])
        .map_err(|e| CliError::Config(e.to_string()))?;
    write_text(
        &dir.join(format!("{label}_encoder_trace.txt")),
        &render_trace(&enc_trace),
    )?;
    write_text(
        &dir.join(format!("{label}_decoder_reference_trace.txt")),
        &render_trace(&coder.reference_decode_trace()),
    )?;
    Ok(())
}

pub fn run(cfg: &Config) -> Result<(), CliError> {
    let seed = cfg.u64("seed")?;
    let coder_paths = cfg.list_str("coders")?;
    let p_chs = cfg.list_f64("p_ch")?;
    let trials = cfg.u64("trials")?;
    let out = cfg.path("out")?;
    let ber_out = cfg.path_opt("ber_out");
    let emit_dir = cfg.path_opt("emit_dir");

    let mut csv = Csv::new(&COLUMNS);
    let mut ber_csv = Csv::new(&BER_COLUMNS);
    let mut violations = 0usize;
    let mut row_index = 0u64;

    for raw_path in &coder_paths {
        let path = cfg.resolve(raw_path);
        let text = std::fs::read_to_string(&path).map_err(|e| {
            CliError::Config(format!("cannot read coder `{}`: {e}", path.display()))
        })?;
        let spec = parse_coder_file(&text).map_err(|e| CliError::Config(e.to_string()))?;
        let coder = PlacedCoder::new(&spec).map_err(|e| CliError::Config(e.to_string()))?;
        let label = coder_label(&path);

        if let Some(dir) = &emit_dir {
            emit_artifacts(dir, &label, &coder)?;
        }

        for &p in &p_chs {
            let row_seed = derive_seed(seed, row_index);
            row_index += 1;
            let report = simulate(&coder, p, trials, row_seed)
                .map_err(|e| CliError::Config(e.to_string()))?;

            let eps_upper = report.ber.wilson_hi;
            let condition_ok =
                eps_upper > 0.0 && eps_upper < 0.1 && fixed_power_condition(eps_upper, p).unwrap_or(false);
            let bound = if condition_ok {
                decoding_bm_lb(coder.params().k as u64, eps_upper, p, spec.lambda)?.value
            } else {
                None
            };
            let violated = match bound {
                Some(b) => report.mean_decoder_bitmeters < b,
                None => false,
            };
            if violated {
                violations += 1;
            }

            csv.row(&[
                label.clone(),
                spec.placement.name().to_string(),
                spec.family.name().to_string(),
                coder.params().k.to_string(),
                coder.params().n.to_string(),
                float(p),
                report.ber.trials.to_string(),
                report.ber.errors.to_string(),
                float(report.ber.eps_hat),
                float(report.ber.wilson_lo),
                float(report.ber.wilson_hi),
                float(report.mean_decoder_bitmeters),
                float(report.mean_encoder_bitmeters),
                float(report.mean_iterations),
                condition_ok.to_string(),
                opt_float(bound),
                violated.to_string(),
            ]);
            ber_csv.row(&[
                report.ber.trials.to_string(),
                report.ber.errors.to_string(),
                float(report.ber.eps_hat),
                float(report.ber.wilson_lo),
                float(report.ber.wilson_hi),
                float(p),
                row_seed.to_string(),
            ]);
        }
    }

    csv.write(&out)?;
    if let Some(path) = ber_out {
        ber_csv.write(&path)?;
    }
    if violations > 0 {
        return Err(CliError::Check(format!(
            "{violations} row(s) measured below the decoder bit-meters bound"
        )));
    }
    Ok(())
}
