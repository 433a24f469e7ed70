//! Self-describing records for sampled tables.
//!
//! JSON form: `{"kind", "dim", "sizes", "values": [[re, im], ...]}`.
//!
//! Binary form (little endian):
//!
//! ```text
//! magic   b"TFR1"
//! kind    u8      (0 grid, 1 spectral, 2 kernel, 3 symbol)
//! dim     u32
//! nsizes  u32, then nsizes × u64
//! count   u64, then count × (f64 re, f64 im)
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{GridFunction, TorusGrid};
use super::lattice::{LatticeBox, SpectralFunction};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"TFR1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Grid,
    Spectral,
    Kernel,
    Symbol,
}

impl RecordKind {
    fn tag(self) -> u8 {
        match self {
            RecordKind::Grid => 0,
            RecordKind::Spectral => 1,
            RecordKind::Kernel => 2,
            RecordKind::Symbol => 3,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            0 => RecordKind::Grid,
            1 => RecordKind::Spectral,
            2 => RecordKind::Kernel,
            3 => RecordKind::Symbol,
            t => return Err(Error::Record(format!("unknown kind tag {t}"))),
        })
    }
}

/// `sizes` holds `[M]` for grids, `[N]` for spectra, `[M]` for kernels
/// (grid × grid) and `[M, N]` for symbols (grid × box).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub kind: RecordKind,
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub values: Vec<[f64; 2]>,
}

impl Record {
    pub fn new(kind: RecordKind, dim: usize, sizes: Vec<usize>, values: &[Complex64]) -> Self {
        Self {
            kind,
            dim,
            sizes,
            values: values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn complex_values(&self) -> Vec<Complex64> {
        self.values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Record(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Record(e.to_string()))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + 8 * self.sizes.len() + 16 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.push(self.kind.tag());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.sizes.len() as u32).to_le_bytes());
        for s in &self.sizes {
            out.extend_from_slice(&(*s as u64).to_le_bytes());
        }
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        for [re, im] in &self.values {
            out.extend_from_slice(&re.to_le_bytes());
            out.extend_from_slice(&im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::Record("bad magic".into()));
        }
        let kind = RecordKind::from_tag(cur.take(1)?[0])?;
        let dim = cur.u32()? as usize;
        let nsizes = cur.u32()? as usize;
        let sizes = (0..nsizes).map(|_| cur.u64().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
        let count = cur.u64()? as usize;
        if bytes.len() - cur.pos != count * 16 {
            return Err(Error::Record(format!(
                "expected {} payload bytes, found {}",
                count * 16,
                bytes.len() - cur.pos
            )));
        }
        let values = (0..count)
            .map(|_| Ok([cur.f64()?, cur.f64()?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind,
            dim,
            sizes,
            values,
        })
    }

    fn expect(&self, kind: RecordKind, nsizes: usize) -> Result<()> {
        if self.kind != kind || self.sizes.len() != nsizes {
            return Err(Error::Record(format!(
                "expected {kind:?} record with {nsizes} sizes, found {:?} with {}",
                self.kind,
                self.sizes.len()
            )));
        }
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Record("truncated record".into()));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl GridFunction {
    pub fn to_record(&self) -> Record {
        Record::new(
            RecordKind::Grid,
            self.grid().dim(),
            vec![self.grid().samples_per_axis()],
            self.values(),
        )
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        r.expect(RecordKind::Grid, 1)?;
        GridFunction::new(TorusGrid::new(r.dim, r.sizes[0])?, r.complex_values())
    }
}

impl SpectralFunction {
    pub fn to_record(&self) -> Record {
        Record::new(
            RecordKind::Spectral,
            self.lattice().dim(),
            vec![self.lattice().radius()],
            self.coeffs(),
        )
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        r.expect(RecordKind::Spectral, 1)?;
        SpectralFunction::new(LatticeBox::new(r.dim, r.sizes[0])?, r.complex_values())
    }
}
