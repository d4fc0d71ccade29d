//! Output directory that can roll back everything it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::table::Table;

#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
    created: bool,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        let created = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            created,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }

    /// Path for `name`, recorded for rollback; the caller writes it.
    pub fn claim(&mut self, name: &str) -> PathBuf {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        path
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<PathBuf, CliError> {
        let path = self.claim(name);
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        table.write(std::io::BufWriter::new(file))?;
        Ok(path)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.claim(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Removes every file written so far, and the directory if this run created it.
    pub fn discard(self) {
        for f in &self.written {
            let _ = fs::remove_file(f);
        }
        if self.created {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

/// Runs `body` against a fresh output set; on error nothing it wrote is left behind.
pub fn with_outputs<T>(
    dir: &Path,
    body: impl FnOnce(&mut OutputDir) -> Result<T, CliError>,
) -> Result<(T, Vec<PathBuf>), CliError> {
    let mut out = OutputDir::create(dir)?;
    match body(&mut out) {
        Ok(v) => Ok((v, out.written)),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}
