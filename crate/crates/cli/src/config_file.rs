//! `key = value` study files, turned into command-line arguments.

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("{path}:{line}: flag `{key}` takes true or false, got `{value}`")]
    Bool {
        path: PathBuf,
        line: usize,
        key: String,
        value: String,
    },
}

const SWITCHES: [&str; 2] = ["allow-indefinite", "no-timing"];

/// Arguments equivalent to the file, e.g. `n = 4,8` becomes `--n 4,8`.
///
/// Blank lines and `#` comments are skipped; underscores in keys are read as dashes.
pub fn to_args(text: &str, path: &Path) -> Result<Vec<String>, ConfigFileError> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigFileError::Syntax {
                path: path.into(),
                line: i + 1,
            });
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigFileError::Syntax {
                path: path.into(),
                line: i + 1,
            });
        }
        if SWITCHES.contains(&key.as_str()) {
            match value {
                "true" => args.push(format!("--{key}")),
                "false" => {}
                _ => {
                    return Err(ConfigFileError::Bool {
                        path: path.into(),
                        line: i + 1,
                        key,
                        value: value.into(),
                    })
                }
            }
        } else {
            args.push(format!("--{key}"));
            args.push(value.replace(' ', ""));
        }
    }
    Ok(args)
}

pub fn read(path: &Path) -> Result<Vec<String>, ConfigFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
        path: path.into(),
        source,
    })?;
    to_args(&text, path)
}
