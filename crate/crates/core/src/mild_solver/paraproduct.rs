use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::meyer_wavelet::{finest_detail_scale, project_qj};

/// The scale-interaction pieces of a product `uv` (taken componentwise).
///
/// `mean` is `ū·v̄`, the product of the zero modes, which none of the five sums
/// contains; `total()` adds all six.
#[derive(Debug, Clone)]
pub struct ParaproductSplit {
    /// `Σ_j P_{j−3}u · Q_j v`
    pub low_high: SpectralField,
    /// `Σ_j Q_j u · Q_j v`
    pub diagonal: SpectralField,
    /// `Σ_{0<j−j'≤3} Q_j u · Q_{j'} v`
    pub near_above: SpectralField,
    /// `Σ_{0<j'−j≤3} Q_j u · Q_{j'} v`
    pub near_below: SpectralField,
    /// `Σ_j Q_j u · P_{j−3} v`
    pub high_low: SpectralField,
    pub mean: SpectralField,
    pub warnings: Vec<String>,
}

impl ParaproductSplit {
    pub fn parts(&self) -> [&SpectralField; 5] {
        [&self.low_high, &self.diagonal, &self.near_above, &self.near_below, &self.high_low]
    }

    pub fn total(&self) -> Result<SpectralField> {
        let mut out = self.mean.clone();
        for p in self.parts() {
            out.axpy(1.0, p)?;
        }
        Ok(out)
    }
}

fn mean_of(f: &SpectralField) -> SpectralField {
    let mut out = SpectralField::zeros(*f.grid(), f.ncomp());
    for c in 0..f.ncomp() {
        out.component_mut(c)[0] = f.component(c)[0];
    }
    out
}

fn product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let pa = a.to_physical_real();
    let pb = b.to_physical_real();
    let prod: Vec<Vec<f64>> = pa
        .iter()
        .zip(&pb)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).collect())
        .collect();
    SpectralField::from_physical(*a.grid(), &prod)
}

fn band_warning(name: &str, f: &SpectralField) -> Option<String> {
    let grid = f.grid();
    let half = grid.size as i64 / 4;
    let total: f64 = f.components().iter().flatten().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return None;
    }
    let outside: f64 = f
        .components()
        .iter()
        .flat_map(|c| c.iter().enumerate())
        .filter(|(flat, _)| grid.modes(*flat)[..grid.dim].iter().any(|m| m.abs() >= half))
        .map(|(_, z)| z.norm_sqr())
        .sum();
    (outside > 0.0).then(|| {
        format!(
            "{name} has {:.3e} of its energy at |m| >= N/4 = {half}; products may alias",
            outside / total
        )
    })
}

/// Splits `uv` by the relative scale of the interacting wavelet shells.
pub fn paraproduct_split(u: &SpectralField, v: &SpectralField) -> Result<ParaproductSplit> {
    let grid = *u.grid();
    grid.check_same(v.grid())?;
    if u.ncomp() != v.ncomp() {
        return Err(invalid("paraproduct needs fields with equal component counts"));
    }
    let warnings: Vec<String> = [band_warning("u", u), band_warning("v", v)].into_iter().flatten().collect();
    let j_lo = -grid.box_exp;
    let j_hi = finest_detail_scale(&grid);
    let qu = (j_lo..=j_hi).map(|j| project_qj(u, j)).collect::<Result<Vec<_>>>()?;
    let qv = (j_lo..=j_hi).map(|j| project_qj(v, j)).collect::<Result<Vec<_>>>()?;
    let (mu, mv) = (mean_of(u), mean_of(v));
    // P_{j-3} = mean + Σ_{j' < j-3} Q_{j'}
    let low = |q: &[SpectralField], mean: &SpectralField, j: i32| -> Result<SpectralField> {
        let mut out = mean.clone();
        for jp in j_lo..j - 3 {
            out.axpy(1.0, &q[(jp - j_lo) as usize])?;
        }
        Ok(out)
    };
    let zeros = || SpectralField::zeros(grid, u.ncomp());
    let (mut low_high, mut diagonal, mut near_above, mut near_below, mut high_low) =
        (zeros(), zeros(), zeros(), zeros(), zeros());
    for j in j_lo..=j_hi {
        let i = (j - j_lo) as usize;
        low_high.axpy(1.0, &product(&low(&qu, &mu, j)?, &qv[i])?)?;
        high_low.axpy(1.0, &product(&qu[i], &low(&qv, &mv, j)?)?)?;
        diagonal.axpy(1.0, &product(&qu[i], &qv[i])?)?;
        for d in 1..=3 {
            let jp = j - d;
            if jp >= j_lo {
                let ip = (jp - j_lo) as usize;
                near_above.axpy(1.0, &product(&qu[i], &qv[ip])?)?;
                near_below.axpy(1.0, &product(&qu[ip], &qv[i])?)?;
            }
        }
    }
    Ok(ParaproductSplit {
        low_high,
        diagonal,
        near_above,
        near_below,
        high_low,
        mean: product(&mu, &mv)?,
        warnings,
    })
}
