//! Deterministic machine-readable output: JSON and CSV with floats printed
//! at 17 significant digits and fixed field order, so identical configs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// JSON formatter that renders every f64 as `{:.16e}` (17 significant
/// digits); everything else follows the compact default.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    String::from_utf8(buf).expect("serde_json emits utf-8")
}

/// Format one float CSV field at 17 significant digits.
pub fn csv_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn csv_line(fields: &[String]) -> String {
    let mut line = String::new();
    for (k, field) in fields.iter().enumerate() {
        if k > 0 {
            line.push(',');
        }
        let _ = write!(line, "{field}");
    }
    line.push('\n');
    line
}

/// Write `contents` to `dir/name`, refusing to overwrite unless `force`.
pub fn write_output(dir: &Path, name: &str, contents: &str, force: bool) -> Result<PathBuf, String> {
    if !dir.exists() {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    let path = dir.join(name);
    if path.exists() && !force {
        return Err(format!(
            "refusing to overwrite {} (pass --force to allow)",
            path.display()
        ));
    }
    fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}
