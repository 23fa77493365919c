//! Binary index files.
//!
//! Layout, little-endian throughout:
//!
//! | bytes    | field                                   |
//! |----------|-----------------------------------------|
//! | 4        | magic `FD1O`                            |
//! | 4        | format version, `u32` = 1               |
//! | 8        | `n`, `u64`                              |
//! | 8n       | canonical vertex values, `f64`          |
//! | 8n       | removal thresholds, `f64` (`+inf` kept) |
//! | 8        | length of the original input, `u64`     |
//!
//! Only the curve and its thresholds are stored; the range index and the
//! envelopes are rebuilt on load.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::decision::Oracle;
use crate::series::TimeSeries;

pub const MAGIC: &[u8; 4] = b"FD1O";
pub const VERSION: u32 = 1;

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn write_index<W: Write>(oracle: &Oracle, mut w: W) -> io::Result<()> {
    let values = oracle.series().values();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    for t in oracle.hierarchy().removal_thresholds() {
        w.write_all(&t.to_le_bytes())?;
    }
    w.write_all(&(oracle.original_len() as u64).to_le_bytes())?;
    w.flush()
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64s<R: Read>(r: &mut R, n: usize) -> io::Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        out.push(f64::from_bits(read_u64(r)?));
    }
    Ok(out)
}

pub fn read_index<R: Read>(mut r: R) -> io::Result<Oracle> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(invalid("not an index file (bad magic)"));
    }
    let mut version = [0u8; 4];
    r.read_exact(&mut version)?;
    let version = u32::from_le_bytes(version);
    if version != VERSION {
        return Err(invalid(format!("unsupported index version {version}")));
    }
    let n = usize::try_from(read_u64(&mut r)?).map_err(|_| invalid("length overflow"))?;
    let values = read_f64s(&mut r, n)?;
    let thresholds = read_f64s(&mut r, n)?;
    let original_len =
        usize::try_from(read_u64(&mut r)?).map_err(|_| invalid("length overflow"))?;

    let raw = TimeSeries::new(values).map_err(|e| invalid(e.to_string()))?;
    let series = raw.canonicalize();
    if series.values() != raw.values() {
        return Err(invalid("stored series is not canonical"));
    }
    Oracle::from_parts(series, thresholds, original_len).map_err(|e| invalid(e.to_string()))
}

pub fn save(oracle: &Oracle, path: &Path) -> io::Result<()> {
    write_index(oracle, BufWriter::new(File::create(path)?))
}

pub fn load(path: &Path) -> io::Result<Oracle> {
    read_index(BufReader::new(File::open(path)?))
}
