//! Output directory handling: refuse to clobber without `--force`, write
//! each file atomically, and remove this run's files if it fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use readcompat_core::{Error, Result};

pub struct Outputs {
    dir: PathBuf,
    force: bool,
    written: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    /// Check up front that none of `names` exists (unless forced), so a run
    /// never fails halfway because of a stale file.
    pub fn prepare(dir: &Path, force: bool, names: &[String]) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        if !force {
            if let Some(existing) = names.iter().map(|n| dir.join(n)).find(|p| p.exists()) {
                return Err(Error::validation(format!(
                    "{} already exists (use --force to overwrite)",
                    existing.display()
                )));
            }
        }
        Ok(Outputs {
            dir: dir.to_path_buf(),
            force,
            written: Vec::new(),
            committed: false,
        })
    }

    /// Write via a temporary file in the same directory, then rename.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if !self.force && path.exists() {
            return Err(Error::validation(format!(
                "{} already exists (use --force to overwrite)",
                path.display()
            )));
        }
        let parent = path.parent().unwrap_or(&self.dir).to_path_buf();
        fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| Error::io(&parent, e))?;
        tmp.write_all(contents.as_bytes())
            .and_then(|_| tmp.as_file().sync_all())
            .map_err(|e| Error::io(tmp.path(), e))?;
        tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}
