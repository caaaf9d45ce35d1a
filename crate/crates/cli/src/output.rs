use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use obraid::spectra::oracle::oracle_hash;
use serde::Serialize;

use crate::args::Output;

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Default output directory when `--json`/`--csv` are not given.
pub const OUT_DIR_ENV: &str = "OBRAID_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(obraid::Error),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    /// 2 for bad input, 1 for failures while computing.
    pub fn exit_code(&self) -> u8 {
        use obraid::Error::*;
        match self {
            CliError::Usage(_) | CliError::Io(..) => 2,
            CliError::Core(
                Domain(_) | Pole(_) | CapExceeded { .. } | Parse { .. } | Excluded { .. },
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<obraid::Error> for CliError {
    fn from(e: obraid::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, B: Serialize> {
    schema_version: u32,
    command: &'a str,
    oracle_sha256: String,
    config: &'a C,
    #[serde(flatten)]
    body: &'a B,
}

fn default_path(command: &str, ext: &str) -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| Path::new(&d).join(format!("{command}.{ext}")))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Serialize the document to `--json`, `$OBRAID_OUT_DIR/<command>.json` or
/// stdout, in that order of preference.
pub fn emit_json<C: Serialize, B: Serialize>(
    command: &str,
    out: &Output,
    config: &C,
    body: &B,
) -> CliResult<()> {
    let doc = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        oracle_sha256: oracle_hash(),
        config,
        body,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    match out.json.clone().or_else(|| default_path(command, "json")) {
        Some(p) => write_file(&p, &text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io("<stdout>".into(), e))
        }
    }
}

/// CSV goes to `--csv` or `$OBRAID_OUT_DIR/<command>.csv`; nowhere otherwise.
pub fn emit_csv(command: &str, out: &Output, text: &str) -> CliResult<()> {
    match out.csv.clone().or_else(|| default_path(command, "csv")) {
        Some(p) => write_file(&p, text),
        None => Ok(()),
    }
}

pub fn write_artifact(path: &Path, text: &str) -> CliResult<()> {
    write_file(path, text)
}

pub fn c2(z: obraid::eigen::C64) -> [f64; 2] {
    [z.re, z.im]
}
