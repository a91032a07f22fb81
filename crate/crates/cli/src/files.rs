//! Reading inputs and guarded writing of outputs.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use fracmax::grid::io::{read_csv, read_gfn, write_csv, write_gfn};
use fracmax::GridFunction;

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a grid function from GFN1, or CSV when the extension says so.
pub fn read_grid(path: &PathBuf) -> anyhow::Result<GridFunction<f64>> {
    let f = if is_csv(path) {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        read_csv(file)?
    } else {
        read_gfn(path)
            .with_context(|| format!("reading {}", path.display()))?
            .0
    };
    Ok(f)
}

/// An existing output path without `--force`.
#[derive(Debug)]
pub struct Refused(PathBuf);

impl fmt::Display for Refused {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} exists; pass --force to overwrite", self.0.display())
    }
}

impl std::error::Error for Refused {}

/// An output path cleared for writing. Checked before any work is done.
pub struct Output {
    path: PathBuf,
}

impl Output {
    pub fn new(path: &Path, force: bool) -> anyhow::Result<Self> {
        if path.exists() && !force {
            return Err(Refused(path.to_path_buf()).into());
        }
        Ok(Output {
            path: path.to_path_buf(),
        })
    }

    pub fn write_grid(&self, f: &GridFunction<f64>, exponent: bool) -> anyhow::Result<()> {
        if is_csv(&self.path) {
            self.write_with(|w| Ok(write_csv(f, w)?))
        } else {
            write_gfn(&self.path, f, exponent)
                .with_context(|| format!("writing {}", self.path.display()))
        }
    }

    pub fn write_with(
        &self,
        body: impl FnOnce(&mut BufWriter<File>) -> anyhow::Result<()>,
    ) -> anyhow::Result<()> {
        let file = File::create(&self.path)
            .with_context(|| format!("creating {}", self.path.display()))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }
}
