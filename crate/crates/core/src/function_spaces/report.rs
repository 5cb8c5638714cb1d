use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::params::DyadicCube;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(flatten)]
    pub cube: DyadicCube,
    pub t: Option<f64>,
}

/// Value of a norm or functional together with where the supremum was attained.
///
/// `shells[j]` holds the contribution of shell `j` at the witness. For the
/// functionals reported without a root the contributions sum to `value`; for
/// norms with an outer `1/q` root they sum to `value^q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub functional: String,
    pub value: f64,
    pub witness: Witness,
    pub shells: BTreeMap<i32, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl NormReport {
    pub(crate) fn zero(functional: &str, cube: DyadicCube, t: Option<f64>) -> Self {
        NormReport {
            functional: functional.to_string(),
            value: 0.0,
            witness: Witness { cube, t },
            shells: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    label: &'a str,
    functional: &'a str,
    value: f64,
    j0: i32,
    k0: String,
    t: Option<f64>,
}

/// One row per report: `label, functional, value, j0, k0, t`.
pub fn write_reports_csv(path: impl AsRef<Path>, rows: &[(String, NormReport)]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for (label, r) in rows {
        let k0 = r
            .witness
            .cube
            .k0
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        w.serialize(CsvRow {
            label,
            functional: &r.functional,
            value: r.value,
            j0: r.witness.cube.j0,
            k0,
            t: r.witness.t,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
