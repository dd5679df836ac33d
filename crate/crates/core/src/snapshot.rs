//! Versioned binary container for corpus and model snapshots.
//!
//! A snapshot is a magic header followed by named sections. Writing is
//! fully deterministic: the same inputs produce byte-identical files.

use crate::error::{Error, Result};
use crate::linalg::{CscMatrix, SvdFactors};
use nalgebra::DMatrix;
use std::fs;
use std::io::Write;
use std::path::Path;

const MAGIC: &[u8; 8] = b"MRFIRC1\n";

/// Named binary sections in insertion order.
#[derive(Debug, Clone, Default)]
pub struct Container {
    sections: Vec<(String, Vec<u8>)>,
}

impl Container {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, payload: Vec<u8>) {
        self.sections.push((name.to_string(), payload));
    }

    pub fn get(&self, name: &str) -> Result<&[u8]> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p.as_slice())
            .ok_or_else(|| Error::Snapshot(format!("missing section {name:?}")))
    }

    pub fn has(&self, name: &str) -> bool {
        self.sections.iter().any(|(n, _)| n == name)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.sections.len() as u32).to_le_bytes());
        for (name, payload) in &self.sections {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
            out.extend_from_slice(payload);
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut dec = Decoder::new(data);
        let magic = dec.bytes(8)?;
        if magic != MAGIC {
            return Err(Error::Snapshot(
                "bad magic: not a snapshot produced by this tool".into(),
            ));
        }
        let count = dec.u32()? as usize;
        let mut sections = Vec::with_capacity(count);
        for _ in 0..count {
            let name_len = dec.u16()? as usize;
            let name = String::from_utf8(dec.bytes(name_len)?.to_vec())
                .map_err(|_| Error::Snapshot("section name is not utf-8".into()))?;
            let payload_len = dec.u64()? as usize;
            let payload = dec.bytes(payload_len)?.to_vec();
            sections.push((name, payload));
        }
        Ok(Self { sections })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = fs::File::create(path)?;
        file.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let data = fs::read(path)?;
        Self::from_bytes(&data)
    }
}

/// Little-endian payload writer.
#[derive(Debug, Default)]
pub struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }

    pub fn u32_slice(&mut self, values: &[u32]) {
        self.u64(values.len() as u64);
        for &v in values {
            self.u32(v);
        }
    }

    pub fn f64_slice(&mut self, values: &[f64]) {
        self.u64(values.len() as u64);
        for &v in values {
            self.f64(v);
        }
    }
}

/// Little-endian payload reader with bounds checking.
pub struct Decoder<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn is_done(&self) -> bool {
        self.pos == self.data.len()
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::Snapshot("truncated payload".into()));
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    pub fn str(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        String::from_utf8(self.bytes(len)?.to_vec())
            .map_err(|_| Error::Snapshot("string is not utf-8".into()))
    }

    pub fn u32_slice(&mut self) -> Result<Vec<u32>> {
        let len = self.u64()? as usize;
        (0..len).map(|_| self.u32()).collect()
    }

    pub fn f64_slice(&mut self) -> Result<Vec<f64>> {
        let len = self.u64()? as usize;
        (0..len).map(|_| self.f64()).collect()
    }
}

/// Sparse matrix payload: dimensions, then CSC arrays.
pub fn encode_csc(enc: &mut Encoder, m: &CscMatrix) {
    enc.u32(m.nrows() as u32);
    enc.u32(m.ncols() as u32);
    let mut col_ptr = Vec::with_capacity(m.ncols() + 1);
    let mut row_idx = Vec::with_capacity(m.nnz());
    let mut values = Vec::with_capacity(m.nnz());
    col_ptr.push(0u32);
    for c in 0..m.ncols() {
        let (rows, vals) = m.col(c);
        for (&r, &v) in rows.iter().zip(vals) {
            row_idx.push(r as u32);
            values.push(v);
        }
        col_ptr.push(row_idx.len() as u32);
    }
    enc.u32_slice(&col_ptr);
    enc.u32_slice(&row_idx);
    enc.f64_slice(&values);
}

pub fn decode_csc(dec: &mut Decoder<'_>) -> Result<CscMatrix> {
    let nrows = dec.u32()? as usize;
    let ncols = dec.u32()? as usize;
    let col_ptr = dec.u32_slice()?;
    let row_idx = dec.u32_slice()?;
    let values = dec.f64_slice()?;
    if col_ptr.len() != ncols + 1 || row_idx.len() != values.len() {
        return Err(Error::Snapshot("inconsistent sparse matrix arrays".into()));
    }
    let mut triplets = Vec::with_capacity(values.len());
    for c in 0..ncols {
        let lo = col_ptr[c] as usize;
        let hi = col_ptr[c + 1] as usize;
        if lo > hi || hi > values.len() {
            return Err(Error::Snapshot("bad column pointers".into()));
        }
        for i in lo..hi {
            triplets.push((row_idx[i] as usize, c, values[i]));
        }
    }
    CscMatrix::from_triplets(nrows, ncols, &triplets)
}

/// Dense column-major payload.
pub fn encode_dense(enc: &mut Encoder, m: &DMatrix<f64>) {
    enc.u32(m.nrows() as u32);
    enc.u32(m.ncols() as u32);
    enc.f64_slice(m.as_slice());
}

pub fn decode_dense(dec: &mut Decoder<'_>) -> Result<DMatrix<f64>> {
    let nrows = dec.u32()? as usize;
    let ncols = dec.u32()? as usize;
    let values = dec.f64_slice()?;
    if values.len() != nrows * ncols {
        return Err(Error::Snapshot("dense matrix size mismatch".into()));
    }
    Ok(DMatrix::from_column_slice(nrows, ncols, &values))
}

pub fn encode_factors(enc: &mut Encoder, f: &SvdFactors) {
    encode_dense(enc, f.u());
    enc.f64_slice(f.sigma());
    encode_dense(enc, f.v());
}

pub fn decode_factors(dec: &mut Decoder<'_>) -> Result<SvdFactors> {
    let u = decode_dense(dec)?;
    let sigma = dec.f64_slice()?;
    let v = decode_dense(dec)?;
    SvdFactors::new(u, sigma, v)
}
