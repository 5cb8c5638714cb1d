//! Sparse-or-dense-per-shell coefficient storage.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{C64, ZERO};

use super::basis::{BasisSpec, WaveletIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShellKey {
    pub j: i32,
    pub eps: u8,
}

#[derive(Debug, Clone, PartialEq)]
enum ShellData {
    Sparse(BTreeMap<usize, C64>),
    Dense(Vec<C64>),
}

/// All positions of one `(ε, j)` pair. Switches to dense storage once more than
/// half of the positions are occupied.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    side: usize,
    dim: usize,
    data: ShellData,
}

impl Shell {
    pub fn empty(side: usize, dim: usize) -> Self {
        Shell {
            side,
            dim,
            data: ShellData::Sparse(BTreeMap::new()),
        }
    }

    pub fn from_dense(side: usize, dim: usize, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), side.pow(dim as u32));
        let nnz = values.iter().filter(|z| **z != ZERO).count();
        let data = if 2 * nnz > values.len() {
            ShellData::Dense(values)
        } else {
            ShellData::Sparse(
                values
                    .into_iter()
                    .enumerate()
                    .filter(|(_, z)| *z != ZERO)
                    .collect(),
            )
        };
        Shell { side, dim, data }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn capacity(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.data, ShellData::Dense(_))
    }

    pub fn get(&self, lin: usize) -> C64 {
        match &self.data {
            ShellData::Sparse(map) => map.get(&lin).copied().unwrap_or(ZERO),
            ShellData::Dense(v) => v[lin],
        }
    }

    pub fn set(&mut self, lin: usize, value: C64) {
        let capacity = self.capacity();
        match &mut self.data {
            ShellData::Sparse(map) => {
                if value == ZERO {
                    map.remove(&lin);
                } else {
                    map.insert(lin, value);
                }
                if 2 * map.len() > capacity {
                    let mut dense = vec![ZERO; capacity];
                    for (&i, &z) in map.iter() {
                        dense[i] = z;
                    }
                    self.data = ShellData::Dense(dense);
                }
            }
            ShellData::Dense(v) => v[lin] = value,
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.data {
            ShellData::Sparse(map) => map.len(),
            ShellData::Dense(v) => v.iter().filter(|z| **z != ZERO).count(),
        }
    }

    /// Nonzero entries in increasing linear order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (usize, C64)> + '_> {
        match &self.data {
            ShellData::Sparse(map) => Box::new(map.iter().map(|(&i, &z)| (i, z))),
            ShellData::Dense(v) => Box::new(
                v.iter()
                    .copied()
                    .enumerate()
                    .filter(|(_, z)| *z != ZERO),
            ),
        }
    }

    pub fn to_dense(&self) -> Vec<C64> {
        match &self.data {
            ShellData::Dense(v) => v.clone(),
            ShellData::Sparse(map) => {
                let mut dense = vec![ZERO; self.capacity()];
                for (&i, &z) in map.iter() {
                    dense[i] = z;
                }
                dense
            }
        }
    }

    pub fn position(&self, lin: usize) -> [i64; 3] {
        let mut k = [0i64; 3];
        let mut rest = lin;
        for axis in (0..self.dim).rev() {
            k[axis] = (rest % self.side) as i64;
            rest /= self.side;
        }
        k
    }

    pub fn linear(&self, k: &[i64]) -> usize {
        k.iter()
            .take(self.dim)
            .fold(0usize, |acc, &v| acc * self.side + v as usize)
    }

    fn map_values(&mut self, f: impl Fn(C64) -> C64) {
        match &mut self.data {
            ShellData::Sparse(map) => map.values_mut().for_each(|z| *z = f(*z)),
            ShellData::Dense(v) => v.iter_mut().for_each(|z| *z = f(*z)),
        }
    }
}

/// Wavelet coefficients of an n-component field, optionally stamped with a time.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    spec: BasisSpec,
    time: Option<f64>,
    components: Vec<BTreeMap<ShellKey, Shell>>,
}

impl CoefficientSet {
    pub fn new(spec: BasisSpec, ncomp: usize) -> Self {
        CoefficientSet {
            spec,
            time: None,
            components: vec![BTreeMap::new(); ncomp.max(1)],
        }
    }

    pub fn single(spec: BasisSpec, idx: WaveletIndex, value: f64) -> Result<Self> {
        let mut set = Self::new(spec, 1);
        set.insert(0, idx, C64::new(value, 0.0))?;
        Ok(set)
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn ncomp(&self) -> usize {
        self.components.len()
    }

    pub fn time(&self) -> Option<f64> {
        self.time
    }

    pub fn set_time(&mut self, t: Option<f64>) {
        self.time = t;
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub fn insert(&mut self, comp: usize, idx: WaveletIndex, value: C64) -> Result<()> {
        self.spec.check(&idx)?;
        if comp >= self.components.len() {
            return Err(Error::OutsideWindow(format!("component {comp} of {}", self.ncomp())));
        }
        let side = self.spec.positions(idx.j);
        let dim = self.spec.dim;
        let shell = self.components[comp]
            .entry(ShellKey { j: idx.j, eps: idx.eps })
            .or_insert_with(|| Shell::empty(side, dim));
        let lin = shell.linear(&idx.k);
        shell.set(lin, value);
        Ok(())
    }

    pub fn get(&self, comp: usize, idx: &WaveletIndex) -> C64 {
        let Some(shell) = self.components.get(comp).and_then(|c| {
            c.get(&ShellKey {
                j: idx.j,
                eps: idx.eps,
            })
        }) else {
            return ZERO;
        };
        if idx.k[..self.spec.dim]
            .iter()
            .any(|&k| k < 0 || k as usize >= shell.side())
        {
            return ZERO;
        }
        shell.get(shell.linear(&idx.k))
    }

    pub(crate) fn put_shell(&mut self, comp: usize, key: ShellKey, shell: Shell) {
        if shell.nnz() == 0 {
            self.components[comp].remove(&key);
        } else {
            self.components[comp].insert(key, shell);
        }
    }

    pub fn shell(&self, comp: usize, key: ShellKey) -> Option<&Shell> {
        self.components.get(comp).and_then(|c| c.get(&key))
    }

    pub fn shells(&self, comp: usize) -> impl Iterator<Item = (&ShellKey, &Shell)> {
        self.components[comp].iter()
    }

    pub fn iter(&self, comp: usize) -> impl Iterator<Item = (WaveletIndex, C64)> + '_ {
        self.components[comp].iter().flat_map(|(key, shell)| {
            shell.iter().map(move |(lin, z)| {
                (
                    WaveletIndex {
                        eps: key.eps,
                        j: key.j,
                        k: shell.position(lin),
                    },
                    z,
                )
            })
        })
    }

    pub fn iter_all(&self) -> impl Iterator<Item = (usize, WaveletIndex, C64)> + '_ {
        (0..self.ncomp()).flat_map(move |c| self.iter(c).map(move |(i, z)| (c, i, z)))
    }

    pub fn nnz(&self) -> usize {
        self.components
            .iter()
            .flat_map(|c| c.values())
            .map(Shell::nnz)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nnz() == 0
    }

    pub fn scale(&mut self, a: f64) {
        for shell in self.components.iter_mut().flat_map(|c| c.values_mut()) {
            shell.map_values(|z| z * a);
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn add(&self, other: &CoefficientSet) -> Result<Self> {
        if self.spec != other.spec || self.ncomp() != other.ncomp() {
            return Err(Error::GridMismatch("coefficient sets use different windows".into()));
        }
        let mut out = self.clone();
        for (c, idx, z) in other.iter_all() {
            let cur = out.get(c, &idx);
            out.insert(c, idx, cur + z)?;
        }
        Ok(out)
    }

    /// Largest entrywise difference over the union of supports.
    pub fn max_abs_diff(&self, other: &CoefficientSet) -> f64 {
        let mut worst: f64 = 0.0;
        for (c, idx, z) in self.iter_all() {
            worst = worst.max((z - other.get(c, &idx)).norm());
        }
        for (c, idx, z) in other.iter_all() {
            worst = worst.max((z - self.get(c, &idx)).norm());
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.iter_all().map(|(_, _, z)| z.norm()).fold(0.0, f64::max)
    }

    /// Scales present in the set (detail or scaling).
    pub fn scales(&self) -> Vec<i32> {
        let mut js: Vec<i32> = self
            .components
            .iter()
            .flat_map(|c| c.keys().map(|k| k.j))
            .collect();
        js.sort_unstable();
        js.dedup();
        js
    }

    /// Copies the set into a different window, failing if an index falls outside it.
    pub fn rewindow(&self, spec: BasisSpec) -> Result<Self> {
        let mut out = CoefficientSet::new(spec, self.ncomp());
        out.time = self.time;
        for (c, idx, z) in self.iter_all() {
            out.insert(c, idx, z)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> BasisSpec {
        BasisSpec::new(1, 0, 3, 64, 0).unwrap()
    }

    #[test]
    fn shell_switches_to_dense_past_half_fill() {
        let mut set = CoefficientSet::new(spec(), 1);
        for k in 0..4 {
            set.insert(0, WaveletIndex::new(1, 3, &[k]), C64::new(1.0, 0.0)).unwrap();
        }
        let key = ShellKey { j: 3, eps: 1 };
        assert!(!set.shell(0, key).unwrap().is_dense());
        set.insert(0, WaveletIndex::new(1, 3, &[7]), C64::new(2.0, 0.0)).unwrap();
        assert!(set.shell(0, key).unwrap().is_dense());
        assert_eq!(set.nnz(), 5);
        assert_eq!(set.get(0, &WaveletIndex::new(1, 3, &[7])), C64::new(2.0, 0.0));
    }

    #[test]
    fn rejects_index_outside_window() {
        let mut set = CoefficientSet::new(spec(), 1);
        let err = set
            .insert(0, WaveletIndex::new(1, 4, &[0]), C64::new(1.0, 0.0))
            .unwrap_err();
        assert!(err.to_string().contains("j=4"));
    }

    #[test]
    fn iteration_reports_positions() {
        let mut set = CoefficientSet::new(BasisSpec::new(2, 0, 2, 64, 0).unwrap(), 2);
        set.insert(1, WaveletIndex::new(3, 2, &[1, 3]), C64::new(0.5, 0.0)).unwrap();
        let all: Vec<_> = set.iter_all().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].0, 1);
        assert_eq!(all[0].1, WaveletIndex::new(3, 2, &[1, 3]));
    }
}
