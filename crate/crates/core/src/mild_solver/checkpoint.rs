//! Checkpoints: a fixed header followed by the raw Fourier coefficients.
//!
//! Layout (little endian): magic `BQCK`, version `u32`, `n: u32`, `grid_size: u64`,
//! `box_exp: i32`, `beta: f64`, `t: f64`, component count `u32`, then for every
//! component `grid_size^n` pairs `(re, im)` of `f64`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Grid, SpectralField, C64};

const MAGIC: &[u8; 4] = b"BQCK";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub field: SpectralField,
    pub beta: f64,
    pub t: f64,
}

pub fn write_checkpoint(path: impl AsRef<Path>, field: &SpectralField, beta: f64, t: f64) -> Result<()> {
    let path = path.as_ref();
    let grid = field.grid();
    let mut buf = Vec::with_capacity(48 + 16 * grid.len() * field.ncomp());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.size as u64).to_le_bytes());
    buf.extend_from_slice(&grid.box_exp.to_le_bytes());
    buf.extend_from_slice(&beta.to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    buf.extend_from_slice(&(field.ncomp() as u32).to_le_bytes());
    for comp in field.components() {
        for z in comp {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self
            .data
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("checkpoint truncated".into()))?;
        self.pos = end;
        Ok(bytes.try_into().unwrap())
    }
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let mut data = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data))
        .map_err(|e| Error::io(path, e))?;
    let mut c = Cursor { data: &data, pos: 0 };
    if &c.take::<4>()? != MAGIC {
        return Err(Error::Format("not a checkpoint file".into()));
    }
    let version = u32::from_le_bytes(c.take()?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let dim = u32::from_le_bytes(c.take()?) as usize;
    let size = u64::from_le_bytes(c.take()?) as usize;
    let box_exp = i32::from_le_bytes(c.take()?);
    let beta = f64::from_le_bytes(c.take()?);
    let t = f64::from_le_bytes(c.take()?);
    let ncomp = u32::from_le_bytes(c.take()?) as usize;
    let grid = Grid::new(dim, size, box_exp)?;
    let mut components = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let mut comp = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = f64::from_le_bytes(c.take()?);
            let im = f64::from_le_bytes(c.take()?);
            comp.push(C64::new(re, im));
        }
        components.push(comp);
    }
    if c.pos != data.len() {
        return Err(Error::Format("trailing bytes after checkpoint data".into()));
    }
    Ok(Checkpoint {
        field: SpectralField::from_components(grid, components)?,
        beta,
        t,
    })
}
