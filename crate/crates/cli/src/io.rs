use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Failure {
    /// Bad input data or parameters. Exit code 1.
    #[error("{0}")]
    Validation(String),
    /// Reading or writing a file failed. Exit code 2.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Io { .. } => 2,
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

/// One input file, already read into memory.
#[derive(Debug, Clone)]
pub struct Input {
    /// The path as given, or `<bundled>`.
    pub origin: String,
    pub bytes: Vec<u8>,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let bytes = fs::read(path).map_err(|source| Failure::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Input {
            origin: path.display().to_string(),
            bytes,
        })
    }

    pub fn bundled(content: &str) -> Self {
        Input {
            origin: "<bundled>".into(),
            bytes: content.as_bytes().to_vec(),
        }
    }

    pub fn sha256(&self) -> String {
        sha256_hex(&self.bytes)
    }

    /// Wraps a parse error with the input's origin.
    pub fn fail(&self, err: impl std::fmt::Display) -> Failure {
        invalid(format!("{}: {err}", self.origin))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes every file into `dir` through a temporary file in the same
/// directory, renamed into place once complete.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<(), Failure> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Failure::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, content) in files {
        let mut tmp = tempfile::Builder::new()
            .prefix(&format!(".{name}."))
            .tempfile_in(dir)
            .map_err(io(dir))?;
        tmp.write_all(content.as_bytes()).map_err(io(tmp.path()))?;
        tmp.as_file().sync_all().map_err(io(tmp.path()))?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| Failure::Io {
            path: target,
            source: e.error,
        })?;
    }
    Ok(())
}
