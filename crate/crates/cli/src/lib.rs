//! Batch front-end for `smero-core`.
//!
//! A job reads one JSON input document, runs one command and writes
//! `<prefix>.json` (always), CSV tables `<prefix>_<table>.csv` and, with
//! `--plot`, a gnuplot script `<prefix>.gp`.

mod commands;
mod output;
pub mod schema;

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use output::{PlotSpec, Table};
use schema::{InputDoc, INPUT_SCHEMA, RESULT_SCHEMA};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Basis,
    Ip,
    Count,
    Evolve,
    Spectrum,
    Bloch,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Basis => "basis",
            Command::Ip => "ip",
            Command::Count => "count",
            Command::Evolve => "evolve",
            Command::Spectrum => "spectrum",
            Command::Bloch => "bloch",
        }
    }

    fn accepts_tol(self) -> bool {
        matches!(self, Command::Basis | Command::Ip | Command::Count | Command::Bloch)
    }

    fn accepts_resolution(self) -> bool {
        matches!(self, Command::Check | Command::Ip | Command::Spectrum | Command::Bloch)
    }

    fn accepts_seed(self) -> bool {
        matches!(self, Command::Ip | Command::Count)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: Command,
    pub input: PathBuf,
    pub out: PathBuf,
    pub plot: bool,
    pub tol: Option<f64>,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    Validation,
    Numerical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub kind: FailureKind,
    pub name: String,
    pub message: String,
}

impl Failure {
    pub fn validation(name: &str, message: impl Into<String>) -> Self {
        Self {
            kind: FailureKind::Validation,
            name: name.to_owned(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Validation => EXIT_VALIDATION,
            FailureKind::Numerical => EXIT_NUMERICAL,
        }
    }
}

/// Library errors caused by the input rather than by the numerics.
const VALIDATION_ERRORS: &[&str] = &[
    "InvalidWindow",
    "CenterMismatch",
    "PoleTooStrong",
    "ClaimedRMismatch",
    "NonIntegerExponents",
    "FirstOrderPolePresent",
    "UnsupportedOrder",
    "InvalidPotential",
    "NotAPole",
    "NotSoliton",
    "InvalidSpace",
    "MissingLocalData",
    "MembershipViolation",
    "NonSMeromorphicPotential",
    "PotentialSpaceMismatch",
    "InvalidLattice",
    "ResolutionTooLow",
    "NotUnimodular",
];

impl<E: Into<smero_core::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e: smero_core::Error = e.into();
        let name = e.name();
        let kind = if VALIDATION_ERRORS.contains(&name) {
            FailureKind::Validation
        } else {
            FailureKind::Numerical
        };
        Self {
            kind,
            name: name.to_owned(),
            message: e.to_string(),
        }
    }
}

/// What a command produces before it is written out.
pub struct CommandOutput {
    pub payload: serde_json::Value,
    pub tables: Vec<Table>,
    pub plots: Vec<PlotSpec>,
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    name: &'a str,
    kind: &'static str,
    message: &'a str,
}

#[derive(Serialize)]
struct ResultDoc<'a> {
    schema: &'static str,
    command: Command,
    input_sha256: Option<String>,
    library_version: &'static str,
    wall_time_seconds: f64,
    status: &'static str,
    options: Options,
    artifacts: Vec<String>,
    payload: Option<&'a serde_json::Value>,
    error: Option<ErrorRecord<'a>>,
}

#[derive(Serialize)]
struct Options {
    plot: bool,
    tol: Option<f64>,
    resolution: Option<usize>,
    seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub exit_code: i32,
    pub result_path: PathBuf,
    pub failure: Option<Failure>,
}

/// `<prefix><suffix>` next to the prefix.
pub fn artifact_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Runs one job. IO errors on the outputs are the only `Err`.
pub fn run(cfg: &JobConfig) -> std::io::Result<RunReport> {
    let start = Instant::now();
    let raw = std::fs::read(&cfg.input);
    let digest = raw.as_ref().ok().map(|bytes| hex::encode(Sha256::digest(bytes)));
    let outcome = match raw {
        Ok(bytes) => parse(&bytes).and_then(|doc| execute(cfg, &doc)),
        Err(e) => Err(Failure::validation(
            "InputUnreadable",
            format!("cannot read {}: {e}", cfg.input.display()),
        )),
    };

    let mut artifacts = Vec::new();
    let (payload, failure) = match outcome {
        Ok(out) => {
            for table in &out.tables {
                let path = artifact_path(&cfg.out, &format!("_{}.csv", table.name));
                table.write_csv(&path)?;
                artifacts.push(file_name(&path));
            }
            if cfg.plot && !out.plots.is_empty() {
                let path = artifact_path(&cfg.out, ".gp");
                output::write_gnuplot(&path, &cfg.out, &out.tables, &out.plots)?;
                artifacts.push(file_name(&path));
            }
            (Some(out.payload), None)
        }
        Err(f) => (None, Some(f)),
    };

    let doc = ResultDoc {
        schema: RESULT_SCHEMA,
        command: cfg.command,
        input_sha256: digest,
        library_version: LIBRARY_VERSION,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        status: match &failure {
            None => "ok",
            Some(f) if f.kind == FailureKind::Validation => "validation_failure",
            Some(_) => "numerical_failure",
        },
        options: Options {
            plot: cfg.plot,
            tol: cfg.tol,
            resolution: cfg.resolution,
            seed: cfg.seed,
        },
        artifacts,
        payload: payload.as_ref(),
        error: failure.as_ref().map(|f| ErrorRecord {
            name: &f.name,
            kind: match f.kind {
                FailureKind::Validation => "validation",
                FailureKind::Numerical => "numerical",
            },
            message: &f.message,
        }),
    };
    let result_path = artifact_path(&cfg.out, ".json");
    let mut text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(&result_path, text)?;
    Ok(RunReport {
        exit_code: failure.as_ref().map_or(EXIT_OK, Failure::exit_code),
        result_path,
        failure,
    })
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn parse(bytes: &[u8]) -> Result<InputDoc, Failure> {
    let doc: InputDoc =
        serde_json::from_slice(bytes).map_err(|e| Failure::validation("MalformedInput", e.to_string()))?;
    if doc.schema != INPUT_SCHEMA {
        return Err(Failure::validation(
            "SchemaVersion",
            format!("expected schema \"{INPUT_SCHEMA}\", found \"{}\"", doc.schema),
        ));
    }
    Ok(doc)
}

fn execute(cfg: &JobConfig, doc: &InputDoc) -> Result<CommandOutput, Failure> {
    let cmd = cfg.command;
    let reject = |flag: &str| Failure::validation("OptionNotApplicable", format!("{flag} is not used by `{cmd}`"));
    if cfg.tol.is_some() && !cmd.accepts_tol() {
        return Err(reject("--tol"));
    }
    if cfg.resolution.is_some() && !cmd.accepts_resolution() {
        return Err(reject("--resolution"));
    }
    if cfg.seed.is_some() && !cmd.accepts_seed() {
        return Err(reject("--seed"));
    }
    if let Some(tol) = cfg.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::validation("InvalidOption", "--tol must be a positive number"));
        }
    }
    commands::dispatch(cfg, doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use smero_core::error::{Genus1Error, SpaceError};

    #[test]
    fn library_errors_are_classified() {
        let v = Failure::from(SpaceError::InvalidSpace("x"));
        assert_eq!((v.kind, v.name.as_str()), (FailureKind::Validation, "InvalidSpace"));
        let n = Failure::from(Genus1Error::DegenerateLevelSet);
        assert_eq!((n.kind, n.exit_code()), (FailureKind::Numerical, EXIT_NUMERICAL));
    }

    #[test]
    fn artifacts_sit_next_to_the_prefix() {
        let p = artifact_path(Path::new("out/run"), "_tracks.csv");
        assert_eq!(p, Path::new("out/run_tracks.csv"));
    }

    #[test]
    fn schema_version_is_checked() {
        let err = parse(br#"{"schema":"smero.input/0"}"#).unwrap_err();
        assert_eq!(err.name, "SchemaVersion");
        assert!(parse(br#"{"schema":"smero.input/1"}"#).is_ok());
    }
}
