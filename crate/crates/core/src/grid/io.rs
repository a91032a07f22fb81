//! `GFN1` binary and CSV encodings of grid functions.
//!
//! `GFN1` layout, all little-endian: the magic `GFN1`, an optional flag
//! byte `E` marking an exponent field, `u8` dimension, then per axis
//! `u64` cells, `f64` lo, `f64` hi, then the `f64` samples row-major.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{Domain, GridFunction};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAGIC: &[u8; 4] = b"GFN1";
pub const EXPONENT_FLAG: u8 = b'E';

pub fn encode_gfn<T: Real>(f: &GridFunction<T>, exponent: bool) -> Vec<u8> {
    let d = f.domain();
    let mut out = Vec::with_capacity(6 + 24 * d.dim() + 8 * f.len());
    out.extend_from_slice(MAGIC);
    if exponent {
        out.push(EXPONENT_FLAG);
    }
    out.push(d.dim() as u8);
    for axis in 0..d.dim() {
        out.extend_from_slice(&(d.cells()[axis] as u64).to_le_bytes());
        out.extend_from_slice(&d.lo()[axis].to_f64_lossy().to_le_bytes());
        out.extend_from_slice(&d.hi()[axis].to_f64_lossy().to_le_bytes());
    }
    for v in f.samples() {
        out.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Format(format!(
                "truncated GFN1 data while reading {what} at byte {}",
                self.pos
            )));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8, what)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8, what)?.try_into().expect("8 bytes"),
        ))
    }
}

/// Decodes `GFN1` bytes. The flag tells whether the `E` marker was present.
pub fn decode_gfn<T: Real>(bytes: &[u8]) -> Result<(GridFunction<T>, bool)> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "magic")? != MAGIC {
        return Err(Error::Format("missing GFN1 magic".into()));
    }
    let mut dim = cur.take(1, "dimension")?[0];
    let exponent = dim == EXPONENT_FLAG;
    if exponent {
        dim = cur.take(1, "dimension")?[0];
    }
    if !(1..=2).contains(&dim) {
        return Err(Error::Format(format!("unsupported dimension {dim}")));
    }
    let mut cells = Vec::new();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for _ in 0..dim {
        let n = cur.u64("cell count")?;
        cells.push(usize::try_from(n).map_err(|_| Error::Format("cell count overflow".into()))?);
        lo.push(T::lit(cur.f64("lo")?));
        hi.push(T::lit(cur.f64("hi")?));
    }
    let domain = Domain::new(&lo, &hi, &cells)?;
    let n = domain.len();
    let samples = (0..n)
        .map(|_| cur.f64("samples").map(T::lit))
        .collect::<Result<Vec<_>>>()?;
    if cur.pos != bytes.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes after samples",
            bytes.len() - cur.pos
        )));
    }
    Ok((GridFunction::new(domain, samples)?, exponent))
}

pub fn write_gfn<T: Real>(path: &Path, f: &GridFunction<T>, exponent: bool) -> Result<()> {
    fs::write(path, encode_gfn(f, exponent))?;
    Ok(())
}

pub fn read_gfn<T: Real>(path: &Path) -> Result<(GridFunction<T>, bool)> {
    decode_gfn(&fs::read(path)?)
}

/// Writes `index,x0[,x1],value` rows.
pub fn write_csv<T: Real, W: Write>(f: &GridFunction<T>, out: W) -> Result<()> {
    let d = f.domain();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string()];
    header.extend((0..d.dim()).map(|a| format!("x{a}")));
    header.push("value".into());
    w.write_record(&header).map_err(csv_err)?;
    for (i, v) in f.samples().iter().enumerate() {
        let c = d.center(i);
        let mut rec = vec![i.to_string()];
        rec.extend((0..d.dim()).map(|a| c[a].to_f64_lossy().to_string()));
        rec.push(v.to_f64_lossy().to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the CSV layout written by [`write_csv`]. The box is reconstructed
/// from the cell centers.
pub fn read_csv<T: Real, R: Read>(input: R) -> Result<GridFunction<T>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    let dim = headers
        .len()
        .checked_sub(2)
        .filter(|d| (1..=2).contains(d))
        .ok_or_else(|| Error::Format(format!("expected `index,x0[,x1],value`, got {headers:?}")))?;
    let mut rows: Vec<(usize, [f64; 2], f64)> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |k: usize| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| Error::Format(format!("line {}: missing column {k}", line + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("line {}: {e}", line + 2)))
        };
        let idx = field(0)? as usize;
        let mut c = [0.0; 2];
        for (a, slot) in c.iter_mut().enumerate().take(dim) {
            *slot = field(1 + a)?;
        }
        rows.push((idx, c, field(1 + dim)?));
    }
    rows.sort_by_key(|r| r.0);
    if rows.iter().enumerate().any(|(k, r)| r.0 != k) {
        return Err(Error::Format("indices must be 0..n without gaps".into()));
    }
    let n = rows.len();
    let n1 = if dim == 2 {
        rows.iter().take_while(|r| r.1[0] == rows[0].1[0]).count()
    } else {
        1
    };
    if n1 == 0 || !n.is_multiple_of(n1) {
        return Err(Error::Format("rows do not form a rectangular grid".into()));
    }
    let n0 = n / n1;
    let counts = [n0, n1];
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for (a, &count) in counts.iter().enumerate().take(dim) {
        if count < 2 {
            return Err(Error::Format(format!("axis {a} has fewer than 2 cells")));
        }
        let stride = if a == 0 { n1 } else { 1 };
        let first = rows[0].1[a];
        let last = rows[(count - 1) * stride].1[a];
        let h = (last - first) / (count - 1) as f64;
        lo.push(T::lit(first - 0.5 * h));
        hi.push(T::lit(last + 0.5 * h));
    }
    let domain = Domain::new(&lo, &hi, &counts[..dim])?;
    GridFunction::new(domain, rows.iter().map(|r| T::lit(r.2)).collect())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}
