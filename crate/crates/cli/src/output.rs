use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use trapfpt::fmt_sig;

/// Stdout, or a file when a path is given.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Header row then one row per index; every column has the same length.
pub fn write_columns(out: &mut dyn Write, header: &[String], columns: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    let rows = columns.first().map_or(0, Vec::len);
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| fmt_sig(c[i])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

/// Column label such as `S_kappa0.012_z5`.
pub fn label(prefix: &str, kappa: f64, z: Option<f64>) -> String {
    match z {
        Some(z) => format!("{prefix}_kappa{}_z{}", fmt_sig(kappa), fmt_sig(z)),
        None => format!("{prefix}_kappa{}", fmt_sig(kappa)),
    }
}
