use std::env;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::args::Common;
use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "HASWME_OUT_DIR";

/// Output directory plus the header line stamped on every file.
pub struct Output {
    dir: PathBuf,
    header: String,
}

impl Output {
    /// `fingerprint` is a canonical rendering of the resolved configuration.
    pub fn new(common: &Common, fingerprint: &str) -> Result<Self, CliError> {
        let dir = common
            .out
            .clone()
            .or_else(|| env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let hash = hex::encode(Sha256::digest(fingerprint.as_bytes()));
        Ok(Output {
            dir,
            header: format!("haswme {} config={hash}", env!("CARGO_PKG_VERSION")),
        })
    }

    /// Header text without the comment marker.
    pub fn header(&self) -> &str {
        &self.header
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write<F>(&self, name: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut dyn Write) -> io::Result<()>,
    {
        let path = self.dir.join(name);
        let io_err = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
        body(&mut w).and_then(|()| w.flush()).map_err(io_err)?;
        Ok(path)
    }
}

/// Configuration rendering with the output location blanked, so the hash
/// depends only on what is computed.
pub fn fingerprint<T: std::fmt::Debug + Clone>(
    command: &str,
    args: &T,
    strip: impl FnOnce(&mut T),
) -> String {
    let mut a = args.clone();
    strip(&mut a);
    format!("{command} {a:?}")
}
