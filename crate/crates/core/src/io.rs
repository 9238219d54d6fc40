//! Serialization: the level-set file format, checkpoint persistence,
//! and the machine-readable report document emitted by the CLI.
//!
//! Level-set files are bit-exact by contract:
//!
//! ```text
//! collatz-levelset v1 nu=<ν> count=<c>
//! <element>
//! ...
//! ```
//!
//! one decimal element per line, ascending, `\n` line endings, no
//! trailing blank line. Checkpoints and reports are JSON with every big
//! integer and exact ratio rendered as decimal strings; floating values
//! appear only under keys labeled `approx`.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::levels::LevelSet;
use crate::scan::ScanCheckpoint;
use crate::{Error, Result};

pub const LEVELSET_FORMAT: &str = "collatz-levelset v1";
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Writes a level set in the `collatz-levelset v1` format.
pub fn write_levelset(level: &LevelSet, path: &Path) -> Result<()> {
    level.validate()?;
    let mut out = Vec::new();
    writeln!(
        out,
        "{LEVELSET_FORMAT} nu={} count={}",
        level.nu,
        level.len()
    )?;
    for (i, e) in level.elements.iter().enumerate() {
        if i + 1 == level.len() {
            write!(out, "{e}")?;
        } else {
            writeln!(out, "{e}")?;
        }
    }
    out.push(b'\n');
    fs::write(path, out)?;
    Ok(())
}

/// Reads and fully validates a level-set file: header shape, count,
/// strict ascent, and max = 2^ν.
pub fn read_levelset(path: &Path) -> Result<LevelSet> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let rest = header.strip_prefix(LEVELSET_FORMAT).ok_or_else(|| Error::Parse {
        line: 1,
        message: format!("bad header, expected {LEVELSET_FORMAT:?} prefix"),
    })?;
    let mut nu = None;
    let mut count = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("nu=") {
            nu = v.parse::<u32>().ok();
        } else if let Some(v) = field.strip_prefix("count=") {
            count = v.parse::<usize>().ok();
        } else {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected header field {field:?}"),
            });
        }
    }
    let (nu, count) = match (nu, count) {
        (Some(n), Some(c)) => (n, c),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "header must carry nu=<int> count=<int>".into(),
            })
        }
    };
    let mut elements = Vec::with_capacity(count);
    for (idx, line) in lines {
        let value = BigUint::from_str(line.trim_end()).map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("not a decimal integer: {line:?}"),
        })?;
        elements.push(value);
    }
    if elements.len() != count {
        return Err(Error::Integrity(format!(
            "header claims {count} elements, file has {}",
            elements.len()
        )));
    }
    for w in elements.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Integrity(format!(
                "elements are not strictly ascending near {}",
                w[0]
            )));
        }
    }
    let level = LevelSet { nu, elements };
    if level.elements.last() != Some(&(BigUint::one() << nu as usize)) {
        return Err(Error::Integrity(format!("max element is not 2^{nu}")));
    }
    Ok(level)
}

/// Writes a checkpoint as pretty JSON.
pub fn write_checkpoint(cp: &ScanCheckpoint, path: &Path) -> Result<()> {
    cp.validate()?;
    let json = serde_json::to_string_pretty(cp)
        .map_err(|e| Error::Checkpoint(format!("serialize: {e}")))?;
    fs::write(path, json + "\n")?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<ScanCheckpoint> {
    let text = fs::read_to_string(path)?;
    let cp: ScanCheckpoint =
        serde_json::from_str(&text).map_err(|e| Error::Checkpoint(format!("parse: {e}")))?;
    cp.validate()?;
    Ok(cp)
}

/// The single structured document every subcommand emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    /// Echo of the subcommand and its effective options.
    pub command: String,
    pub options: Value,
    /// Subcommand-specific payload. Exact values as decimal strings or
    /// {num, den} pairs; floating values only under `*_approx` keys.
    pub results: Value,
    pub warnings: Vec<String>,
    pub timing_ms: u64,
}

impl ReportDocument {
    pub fn new(command: &str, options: Value) -> Self {
        ReportDocument {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            options,
            results: Value::Null,
            warnings: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// The artifact's own reader; every emitted report must round-trip
    /// through this.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ReportDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: 0,
            message: format!("report: {e}"),
        })?;
        if doc.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::Parse {
                line: 0,
                message: format!("unsupported report schema {}", doc.schema_version),
            });
        }
        Ok(doc)
    }
}
