//! Binary and CSV layouts for value profiles and interaction tables.
//!
//! Binary layout: the 5-byte magic `HARS1`, the variable count as one byte,
//! the entry count `2^n` as a little-endian `u64`, then `2^n` little-endian
//! `f64` values in ascending mask order. Profiles and tables share the layout.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::set::{check_n, VariableSet};
use super::table::{InteractionTable, ValueProfile};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"HARS1";

fn write_dense<W: Write>(mut w: W, n: usize, values: &[f64]) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[n as u8])?;
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &'static str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Truncated(what),
        _ => Error::io("<stream>", e),
    })
}

fn read_dense<R: Read>(mut r: R) -> Result<Vec<f64>> {
    let mut magic = [0u8; 5];
    read_exact(&mut r, &mut magic, "header")?;
    if &magic != MAGIC {
        return Err(Error::InvalidParameter(format!(
            "bad magic {:?}, expected HARS1",
            String::from_utf8_lossy(&magic)
        )));
    }
    let mut n = [0u8; 1];
    read_exact(&mut r, &mut n, "header")?;
    let n = usize::from(n[0]);
    check_n(n)?;
    let mut count = [0u8; 8];
    read_exact(&mut r, &mut count, "header")?;
    let count = u64::from_le_bytes(count);
    if count != 1u64 << n {
        return Err(Error::InvalidParameter(format!(
            "entry count {count} does not equal 2^{n}"
        )));
    }
    let mut values = Vec::with_capacity(count as usize);
    let mut buf = [0u8; 8];
    for _ in 0..count {
        read_exact(&mut r, &mut buf, "values")?;
        values.push(f64::from_le_bytes(buf));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing).map_err(|e| Error::io("<stream>", e))? != 0 {
        return Err(Error::InvalidParameter("trailing bytes after table".into()));
    }
    Ok(values)
}

fn write_csv<W: Write>(w: W, n: usize, values: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["mask", "value"])?;
    for (m, v) in values.iter().enumerate() {
        out.write_record([VariableSet::from_raw(m, n).to_binary_string(), v.to_string()])?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

macro_rules! dense_io {
    ($ty:ty, $ctor:path, $getter:ident) => {
        impl $ty {
            pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
                write_dense(w, self.n(), self.$getter()).map_err(|e| Error::io("<stream>", e))
            }

            pub fn read_binary<R: Read>(r: R) -> Result<Self> {
                $ctor(read_dense(r)?)
            }

            pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
                let path = path.as_ref();
                let file = File::create(path).map_err(|e| Error::io(path, e))?;
                self.write_binary(BufWriter::new(file))
            }

            pub fn load(path: impl AsRef<Path>) -> Result<Self> {
                let path = path.as_ref();
                let file = File::open(path).map_err(|e| Error::io(path, e))?;
                Self::read_binary(BufReader::new(file))
            }

            /// CSV with a `mask,value` header, mask as an `n`-digit binary string.
            pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
                write_csv(w, self.n(), self.$getter())
            }
        }
    };
}

dense_io!(ValueProfile, ValueProfile::from_values, values);
dense_io!(InteractionTable, InteractionTable::from_effects, effects);
