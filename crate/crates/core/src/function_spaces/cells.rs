//! Per-cube sums of `|a|^p` over detail coefficients, aggregated to every
//! coarser dyadic level of the box.

use crate::meyer_wavelet::{BasisSpec, CoefficientSet};

use super::params::DyadicCube;

pub(crate) struct CellSums {
    spec: BasisSpec,
    /// `levels[j - j_min][j0 + J]`: sums of shell `j` over the cubes of level `j0 ≤ j`.
    levels: Vec<Option<Vec<Vec<f64>>>>,
}

impl CellSums {
    pub(crate) fn new(set: &CoefficientSet, p: f64) -> Self {
        let spec = *set.spec();
        let dim = spec.dim;
        let nshell = (spec.j_max - spec.j_min + 1) as usize;
        let mut fine: Vec<Option<Vec<f64>>> = vec![None; nshell];
        for comp in 0..set.ncomp() {
            for (key, shell) in set.shells(comp) {
                if key.eps == 0 {
                    continue;
                }
                let slot = fine[(key.j - spec.j_min) as usize]
                    .get_or_insert_with(|| vec![0.0; shell.capacity()]);
                for (lin, z) in shell.iter() {
                    slot[lin] += z.norm().powf(p);
                }
            }
        }
        let levels = fine
            .into_iter()
            .enumerate()
            .map(|(s, cells)| {
                let cells = cells?;
                let j = spec.j_min + s as i32;
                let side = spec.positions(j);
                let mut out = Vec::with_capacity((j + spec.box_exp + 1) as usize);
                for j0 in -spec.box_exp..j {
                    let shift = (j - j0) as u32;
                    let coarse_side = spec.positions(j0);
                    let mut coarse = vec![0.0; coarse_side.pow(dim as u32)];
                    for (lin, &v) in cells.iter().enumerate() {
                        if v == 0.0 {
                            continue;
                        }
                        let mut rest = lin;
                        let mut stride = 1;
                        let mut target = 0;
                        for _ in 0..dim {
                            let k = rest % side;
                            rest /= side;
                            target += (k >> shift) * stride;
                            stride *= coarse_side;
                        }
                        coarse[target] += v;
                    }
                    out.push(coarse);
                }
                out.push(cells);
                Some(out)
            })
            .collect();
        CellSums { spec, levels }
    }

    pub(crate) fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    /// Sum over the cells of shell `j` inside the cube `(j0, lin)`; zero for an
    /// empty shell or `j < j0`.
    pub(crate) fn get(&self, j: i32, j0: i32, lin: usize) -> f64 {
        if j < j0 || j < self.spec.j_min || j > self.spec.j_max {
            return 0.0;
        }
        match &self.levels[(j - self.spec.j_min) as usize] {
            Some(levels) => levels[(j0 + self.spec.box_exp) as usize][lin],
            None => 0.0,
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.levels.iter().all(|l| l.is_none())
    }
}

/// Number of cubes at level `j0`.
pub(crate) fn cube_count(spec: &BasisSpec, j0: i32) -> usize {
    spec.positions(j0).pow(spec.dim as u32)
}

pub(crate) fn cube_at(spec: &BasisSpec, j0: i32, lin: usize) -> DyadicCube {
    let side = spec.positions(j0);
    let mut k = vec![0i64; spec.dim];
    let mut rest = lin;
    for axis in (0..spec.dim).rev() {
        k[axis] = (rest % side) as i64;
        rest /= side;
    }
    DyadicCube { j0, k0: k }
}

pub(crate) fn cube_linear(spec: &BasisSpec, cube: &DyadicCube) -> Option<usize> {
    if cube.j0 < -spec.box_exp || cube.k0.len() != spec.dim {
        return None;
    }
    let side = spec.positions(cube.j0) as i64;
    let mut lin = 0usize;
    for &k in &cube.k0 {
        if k < 0 || k >= side {
            return None;
        }
        lin = lin * side as usize + k as usize;
    }
    Some(lin)
}
