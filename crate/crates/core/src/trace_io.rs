//! Plain-text trace files.
//!
//! One step per line, written as a comma-separated list of the propositions
//! that hold. `{}` is the step where nothing holds. `#` starts a comment that
//! runs to the end of the line, and lines that are blank after removing
//! comments are skipped, so an empty file is the empty trace.
//!
//! ```text
//! # two steps
//! a,b
//! {}
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::semantics::{Step, Trace};

pub const TRACE_EXTENSION: &str = "trace";

#[derive(Debug, Error)]
pub enum TraceFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<TraceFileError>,
    },
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_trace(name: &str, text: &str) -> Result<Trace, TraceFileError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "{}" {
            steps.push(Step::new());
            continue;
        }
        let mut step = Step::new();
        for item in line.split(',') {
            let item = item.trim();
            if !is_identifier(item) {
                return Err(TraceFileError::Syntax {
                    line: i + 1,
                    message: if item.is_empty() {
                        "empty proposition name".into()
                    } else {
                        format!("`{item}` is not a proposition name")
                    },
                });
            }
            step.insert(item.to_string());
        }
        steps.push(step);
    }
    Ok(Trace::new(name, steps))
}

/// Canonical text: sorted propositions, no spaces, a newline after each step.
pub fn print_trace(trace: &Trace) -> String {
    let mut out = String::new();
    for step in trace.steps() {
        if step.is_empty() {
            out.push_str("{}");
        } else {
            out.push_str(&step.iter().cloned().collect::<Vec<_>>().join(","));
        }
        out.push('\n');
    }
    out
}

/// Reads a trace file; the trace is named after the file stem.
pub fn read_trace_file(path: &Path) -> Result<Trace, TraceFileError> {
    let text = fs::read_to_string(path).map_err(|source| TraceFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_trace(&name, &text).map_err(|e| TraceFileError::InFile {
        path: path.to_path_buf(),
        source: Box::new(e),
    })
}

pub fn write_trace_file(path: &Path, trace: &Trace) -> Result<(), TraceFileError> {
    fs::write(path, print_trace(trace)).map_err(|source| TraceFileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Expands directories to their `*.trace` entries in name order; files are
/// kept as given.
pub fn expand_trace_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>, TraceFileError> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let entries = fs::read_dir(path).map_err(|source| TraceFileError::Io {
                path: path.clone(),
                source,
            })?;
            let mut found = Vec::new();
            for entry in entries {
                let entry = entry.map_err(|source| TraceFileError::Io {
                    path: path.clone(),
                    source,
                })?;
                let p = entry.path();
                if p.is_file() && p.extension().is_some_and(|e| e == TRACE_EXTENSION) {
                    found.push(p);
                }
            }
            found.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
            out.extend(found);
        } else {
            out.push(path.clone());
        }
    }
    Ok(out)
}
