//! File writers: CSV text, and the binary sample-dump format.
//!
//! Every floating-point number in CSV output is printed with 17 significant
//! digits so it reparses to the identical 64-bit value.

use std::io::Write;
use std::path::Path;

use crate::Failure;

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<(), Failure> {
    let mut text = lines.join("\n");
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

/// Sample dump: 8-byte magic `DCIMSIM1`, then the sample count as a
/// little-endian u64, then the samples as little-endian f64 values.
pub fn write_binary_dump(path: &Path, samples: &[f64]) -> Result<(), Failure> {
    let io_err = |e: std::io::Error| {
        Failure::Config(format!("cannot write {}: {e}", path.display()))
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut writer = std::io::BufWriter::new(file);
    writer.write_all(b"DCIMSIM1").map_err(io_err)?;
    writer
        .write_all(&(samples.len() as u64).to_le_bytes())
        .map_err(io_err)?;
    for sample in samples {
        writer.write_all(&sample.to_le_bytes()).map_err(io_err)?;
    }
    writer.flush().map_err(io_err)
}
