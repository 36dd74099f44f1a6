use std::io::Write;
use std::path::Path;

use serde::Serialize;

use spmac_core::{Error, SCHEMA};

pub enum Artifact {
    Json(String),
    Csv(Vec<u8>),
}

impl Artifact {
    pub fn bytes(&self) -> &[u8] {
        match self {
            Artifact::Json(s) => s.as_bytes(),
            Artifact::Csv(b) => b,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Detail<'a> {
            kind: &'a str,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Body<'a> {
            schema: &'a str,
            error: Detail<'a>,
        }
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Numerical(m) => ("numerical", m),
            CliError::Io(m) => ("io", m),
        };
        serde_json::to_string(&Body { schema: SCHEMA, error: Detail { kind, message } }).expect("error serializes")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidPath { .. }
            | Error::InvalidDistribution(_)
            | Error::TooLarge(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Artifact, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(Artifact::Csv(bytes))
}

pub fn emit(artifact: &Artifact, out: Option<&Path>) -> Result<(), CliError> {
    let mut bytes = artifact.bytes().to_vec();
    if !bytes.ends_with(b"\n") {
        bytes.push(b'\n');
    }
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
