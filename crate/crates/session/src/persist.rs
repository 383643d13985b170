//! Versioned JSON session files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::session::{Session, SessionError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct FileOut<'a> {
    schema_version: u32,
    session: &'a Session,
}

#[derive(Deserialize)]
struct FileIn {
    #[allow(dead_code)]
    schema_version: u64,
    session: Session,
}

#[derive(Deserialize)]
struct VersionOnly {
    schema_version: Option<serde_json::Value>,
}

/// Byte offset of a 1-based line and column in `text`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn corrupt(text: &str, e: serde_json::Error) -> SessionError {
    let offset = if e.is_eof() {
        text.len()
    } else {
        byte_offset(text, e.line(), e.column())
    };
    SessionError::CorruptFile {
        offset,
        message: e.to_string(),
    }
}

impl Session {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FileOut {
            schema_version: SCHEMA_VERSION,
            session: self,
        })
        .expect("session serializes")
    }

    pub fn from_json(text: &str) -> Result<Session, SessionError> {
        let head: VersionOnly = serde_json::from_str(text).map_err(|e| corrupt(text, e))?;
        match head.schema_version {
            Some(serde_json::Value::Number(n)) if n.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {
            }
            Some(serde_json::Value::Number(n)) => {
                return Err(SessionError::SchemaVersionMismatch {
                    found: n.as_u64().unwrap_or(u64::MAX),
                    expected: SCHEMA_VERSION,
                })
            }
            _ => {
                return Err(SessionError::CorruptFile {
                    offset: 0,
                    message: "missing schema_version".into(),
                })
            }
        }
        let file: FileIn = serde_json::from_str(text).map_err(|e| corrupt(text, e))?;
        Ok(file.session)
    }

    pub fn save(&self, path: &Path) -> Result<(), SessionError> {
        std::fs::write(path, self.to_json()).map_err(|e| SessionError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Session, SessionError> {
        let text = std::fs::read_to_string(path).map_err(|e| SessionError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Session::from_json(&text)
    }
}
