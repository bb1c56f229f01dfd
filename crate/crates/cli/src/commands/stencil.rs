//! `friction stencil`: best-origin coverage of a circuit file, with the
//! coverage floor asserted, optional per-subcircuit accounting of a trace,
//! and optional SVG rendering.
//!
//! Keys: `seed`, `circuit`, `a`, `eta`, `out`; optional `role`
//! (output|input, default output), `trace`, `accounting_out`, `svg`.

use friction_core::computation::{bitmeters_in_region, bitmeters_of_trace, parse_trace};
use friction_core::geometry::{parse_circuit, Role};
use friction_core::stencil::{best_origin, partition, Stencil};

use crate::config::Config;
use crate::report::{float, write_text, Csv};
use crate::svg;
use crate::CliError;

pub fn run(cfg: &Config) -> Result<(), CliError> {
    let circuit_path = cfg.path("circuit")?;
    let text = std::fs::read_to_string(&circuit_path)
        .map_err(|e| CliError::Config(format!("cannot read `{}`: {e}", circuit_path.display())))?;
    let circuit = parse_circuit(&text).map_err(|e| CliError::Config(e.to_string()))?;

    let a = cfg.f64("a")?;
    let eta = cfg.f64("eta")?;
    let role = match cfg.get("role").unwrap_or("output") {
        "output" => Role::Output,
        "input" => Role::Input,
        other => {
            return Err(CliError::Config(format!(
                "role must be `output` or `input`, got `{other}`"
            )))
        }
    };
    let out = cfg.path("out")?;

    let (origin, covered) =
        best_origin(&circuit, a, eta, role).map_err(|e| CliError::Config(e.to_string()))?;
    let k = circuit.nodes_with_role(role).count();
    let floor = k as f64 * (1.0 - 2.0 * eta) * (1.0 - 2.0 * eta);

    let mut csv = Csv::new(&[
        "origin_x",
        "origin_y",
        "covered",
        "k",
        "eta",
        "a",
        "bound_k_times_(1-2eta)^2",
    ]);
    csv.row(&[
        float(origin.x),
        float(origin.y),
        covered.to_string(),
        k.to_string(),
        float(eta),
        float(a),
        float(floor),
    ]);
    csv.write(&out)?;

    let stencil = Stencil::new(a, eta, origin).map_err(|e| CliError::Config(e.to_string()))?;

    if let Some(trace_path) = cfg.path_opt("trace") {
        let trace_text = std::fs::read_to_string(&trace_path).map_err(|e| {
            CliError::Config(format!("cannot read `{}`: {e}", trace_path.display()))
        })?;
        let label = trace_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trace".into());
        let trace =
            parse_trace(&trace_text, label.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        let total =
            bitmeters_of_trace(&circuit, &trace).map_err(|e| CliError::Config(e.to_string()))?;

        let part = partition(&circuit, &stencil, role);
        let mut acc = Csv::new(&[
            "trace_id",
            "total_bitmeters",
            "region_id",
            "region_bitmeters",
        ]);
        let mut region_sum = 0.0;
        for cell in &part.cells {
            let bm = bitmeters_in_region(&circuit, &trace, &cell.region)
                .map_err(|e| CliError::Config(e.to_string()))?;
            region_sum += bm;
            acc.row(&[
                label.clone(),
                float(total),
                format!("cell_{}_{}", cell.index.0, cell.index.1),
                float(bm),
            ]);
        }
        let acc_out = cfg
            .path_opt("accounting_out")
            .unwrap_or_else(|| out.with_file_name("accounting.csv"));
        acc.write(&acc_out)?;

        if region_sum > total * (1.0 + 1e-9) + 1e-18 {
            return Err(CliError::Check(format!(
                "disjoint regions account for {region_sum} bit-meters, exceeding the total {total}"
            )));
        }
    }

    if let Some(svg_path) = cfg.path_opt("svg") {
        write_text(&svg_path, &svg::render(&circuit, Some(&stencil)))?;
    }

    if (covered as f64) < floor {
        return Err(CliError::Check(format!(
            "coverage {covered} fell below the floor {floor}"
        )));
    }
    Ok(())
}
