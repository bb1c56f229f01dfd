//! CSV emission: stable column order, 12 significant digits for floats,
//! byte-identical across reruns of the same config.

use std::path::Path;

use crate::CliError;

/// 12 significant digits, scientific notation.
pub fn float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub struct Csv {
    columns: usize,
    body: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            columns: header.len(),
            body: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "ragged CSV row");
        self.body.push_str(&fields.join(","));
        self.body.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.body)
    }
}

pub fn write_text(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                CliError::Config(format!("cannot create `{}`: {e}", parent.display()))
            })?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write `{}`: {e}", path.display())))
}
