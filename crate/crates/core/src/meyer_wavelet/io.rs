//! Versioned binary container and JSON mirror for coefficient sets.
//!
//! Binary layout (little endian): magic `BQCS`, version `u16`, `n: u8`, `j_min: i32`,
//! `j_max: i32`, component count `u32`, `box_exp: i32`, `grid_size: u32`,
//! time `f64` (NaN when absent); then per component a `u64` record count followed by
//! records `(eps: u8, j: i32, k: n × i64, re: f64, im: f64)`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::C64;

use super::basis::{BasisSpec, WaveletIndex};
use super::coeffs::CoefficientSet;

pub const MAGIC: &[u8; 4] = b"BQCS";
pub const VERSION: u16 = 1;

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stream>", e)
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(io_err)?;
    Ok(buf)
}

pub fn write_binary(set: &CoefficientSet, w: &mut impl Write) -> Result<()> {
    let spec = set.spec();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(spec.dim as u8);
    out.extend_from_slice(&spec.j_min.to_le_bytes());
    out.extend_from_slice(&spec.j_max.to_le_bytes());
    out.extend_from_slice(&(set.ncomp() as u32).to_le_bytes());
    out.extend_from_slice(&spec.box_exp.to_le_bytes());
    out.extend_from_slice(&(spec.grid_size as u32).to_le_bytes());
    out.extend_from_slice(&set.time().unwrap_or(f64::NAN).to_le_bytes());
    for c in 0..set.ncomp() {
        let records: Vec<_> = set.iter(c).collect();
        out.extend_from_slice(&(records.len() as u64).to_le_bytes());
        for (idx, z) in records {
            out.push(idx.eps);
            out.extend_from_slice(&idx.j.to_le_bytes());
            for k in &idx.k[..spec.dim] {
                out.extend_from_slice(&k.to_le_bytes());
            }
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&out).map_err(io_err)
}

pub fn read_binary(r: &mut impl Read) -> Result<CoefficientSet> {
    let magic: [u8; 4] = read_array(r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes(read_array(r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = read_array::<1>(r)?[0] as usize;
    let j_min = i32::from_le_bytes(read_array(r)?);
    let j_max = i32::from_le_bytes(read_array(r)?);
    let ncomp = u32::from_le_bytes(read_array(r)?) as usize;
    let box_exp = i32::from_le_bytes(read_array(r)?);
    let grid_size = u32::from_le_bytes(read_array(r)?) as usize;
    let time = f64::from_le_bytes(read_array(r)?);
    let spec = BasisSpec::new(dim, j_min, j_max, grid_size, box_exp)?;
    let mut set = CoefficientSet::new(spec, ncomp);
    if !time.is_nan() {
        set.set_time(Some(time));
    }
    for c in 0..ncomp {
        let count = u64::from_le_bytes(read_array(r)?);
        for _ in 0..count {
            let eps = read_array::<1>(r)?[0];
            let j = i32::from_le_bytes(read_array(r)?);
            let mut k = [0i64; 3];
            for slot in k.iter_mut().take(dim) {
                *slot = i64::from_le_bytes(read_array(r)?);
            }
            let re = f64::from_le_bytes(read_array(r)?);
            let im = f64::from_le_bytes(read_array(r)?);
            set.insert(c, WaveletIndex { eps, j, k }, C64::new(re, im))?;
        }
    }
    Ok(set)
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonRecord {
    eps: u8,
    j: i32,
    k: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonSet {
    version: u16,
    spec: BasisSpec,
    time: Option<f64>,
    components: Vec<Vec<JsonRecord>>,
}

pub fn to_json(set: &CoefficientSet) -> Result<String> {
    let dim = set.spec().dim;
    let doc = JsonSet {
        version: VERSION,
        spec: *set.spec(),
        time: set.time(),
        components: (0..set.ncomp())
            .map(|c| {
                set.iter(c)
                    .map(|(idx, z)| JsonRecord {
                        eps: idx.eps,
                        j: idx.j,
                        k: idx.k[..dim].to_vec(),
                        re: z.re,
                        im: z.im,
                    })
                    .collect()
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn from_json(text: &str) -> Result<CoefficientSet> {
    let doc: JsonSet = serde_json::from_str(text)?;
    if doc.version != VERSION {
        return Err(Error::Format(format!("unsupported version {}", doc.version)));
    }
    let spec = BasisSpec::new(
        doc.spec.dim,
        doc.spec.j_min,
        doc.spec.j_max,
        doc.spec.grid_size,
        doc.spec.box_exp,
    )?;
    let mut set = CoefficientSet::new(spec, doc.components.len());
    set.set_time(doc.time);
    for (c, records) in doc.components.into_iter().enumerate() {
        for r in records {
            if r.k.len() != spec.dim {
                return Err(Error::Format(format!("position {:?} has wrong length", r.k)));
            }
            set.insert(c, WaveletIndex::new(r.eps, r.j, &r.k), C64::new(r.re, r.im))?;
        }
    }
    Ok(set)
}
