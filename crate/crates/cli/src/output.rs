use std::fmt;
use std::io::Write;
use std::path::Path;

use kissbound_core::KissError;
use serde::Serialize;
use tempfile::NamedTempFile;

#[derive(Debug)]
pub enum CliError {
    Core(KissError),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(KissError::CapExceeded { .. }) => 3,
            CliError::Core(KissError::Certification(_)) => 4,
            CliError::Core(_) | CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(s) => f.write_str(s),
        }
    }
}

impl From<KissError> for CliError {
    fn from(e: KissError) -> Self {
        CliError::Core(e)
    }
}

pub fn input<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Input(msg.into()))
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Fails early when `path` cannot be created, so nothing is computed for an
/// output that would be discarded.
pub fn check_writable(path: &Path) -> Result<(), CliError> {
    let dir = parent_dir(path);
    if !dir.is_dir() {
        return input(format!("output directory {} does not exist", dir.display()));
    }
    if path.is_dir() {
        return input(format!("output path {} is a directory", path.display()));
    }
    Ok(())
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(parent_dir(path)).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `x` with 12 significant digits in positional notation.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let places = (11 - exponent).max(0) as usize;
    format!("{x:.places$}")
}

/// Exponent display precision.
pub fn exp4(x: f64) -> String {
    format!("{x:.4}")
}

pub fn exp4_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| exp4(x)).collect::<Vec<_>>().join(" ")
}

/// A two-column `quantity,value` table for reports without a natural
/// row structure.
#[derive(Default)]
pub struct KeyValueCsv {
    body: String,
}

impl KeyValueCsv {
    pub fn new() -> Self {
        KeyValueCsv {
            body: String::from("quantity,value\n"),
        }
    }

    pub fn row(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.body.push_str(&format!("{key},{value}\n"));
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Self {
        self.row(key, sig12(value))
    }

    pub fn reals(&mut self, prefix: &str, values: &[f64]) -> &mut Self {
        for (i, &v) in values.iter().enumerate() {
            self.real(&format!("{prefix}_{}", i + 1), v);
        }
        self
    }

    pub fn finish(&mut self) -> String {
        std::mem::take(&mut self.body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.182545123456789), "0.182545123457");
        assert_eq!(sig12(1.5), "1.50000000000");
        assert_eq!(sig12(123.0), "123.000000000");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Core(KissError::Domain("x".into())).exit_code(), 2);
        let cap = KissError::CapExceeded {
            shell: 1,
            size: "10".into(),
            cap: 1,
        };
        assert_eq!(CliError::Core(cap).exit_code(), 3);
        assert_eq!(
            CliError::Core(KissError::Certification("x".into())).exit_code(),
            4
        );
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
    }
}
