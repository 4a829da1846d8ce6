//! JSON file formats for matrices, stators, groups and many-body sites.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{irreps, make_group, FiniteGroup, Irrep, IrrepSet};
use crate::manybody::{factor_projective, ProjectiveStator};
use crate::numerics::{ComplexMatrix, ComplexVector, C64};
use crate::stator::Stator;

/// `{"rows": n, "cols": m, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let part = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect())
                .collect()
        };
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        if j.rows == 0 || j.cols == 0 {
            return Err(Error::DimensionMismatch(format!("matrix shape {}x{} is empty", j.rows, j.cols)));
        }
        for (name, part) in [("re", &j.re), ("im", &j.im)] {
            if part.len() != j.rows || part.iter().any(|row| row.len() != j.cols) {
                return Err(Error::DimensionMismatch(format!(
                    "\"{name}\" does not have shape {}x{}",
                    j.rows, j.cols
                )));
            }
        }
        let m = ComplexMatrix::from_fn(j.rows, j.cols, |r, c| C64::new(j.re[r][c], j.im[r][c]));
        crate::numerics::ensure_finite(&m)?;
        Ok(m)
    }
}

/// `{"dim_a": n, "b_labels": [...], "kraus": [matrix, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatorJson {
    pub dim_a: usize,
    pub b_labels: Vec<String>,
    pub kraus: Vec<MatrixJson>,
}

impl From<&Stator> for StatorJson {
    fn from(s: &Stator) -> Self {
        StatorJson {
            dim_a: s.dim_a(),
            b_labels: s.labels().to_vec(),
            kraus: s.kraus().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl StatorJson {
    /// Converts with shape checks only; completeness is left to the caller.
    pub fn to_stator_unchecked(&self) -> Result<Stator> {
        let kraus = self
            .kraus
            .iter()
            .map(ComplexMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        let stator = Stator::from_parts_unchecked(kraus, self.b_labels.clone())?;
        if stator.dim_a() != self.dim_a {
            return Err(Error::DimensionMismatch(format!(
                "dim_a is {} but the Kraus operators are {}x{}",
                self.dim_a,
                stator.dim_a(),
                stator.dim_a()
            )));
        }
        Ok(stator)
    }

    pub fn to_stator(&self) -> Result<Stator> {
        let (kraus, labels) = self.to_stator_unchecked()?.into_parts();
        Stator::from_kraus(kraus, labels)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrrepJson {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<MatrixJson>,
}

/// A group file. `irreps` may be omitted when the table is that of the
/// built-in named by `name`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupJson {
    pub name: String,
    pub order: usize,
    pub mult_table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irreps: Option<Vec<IrrepJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
}

impl GroupJson {
    pub fn from_set(set: &IrrepSet) -> Self {
        let group = set.group();
        GroupJson {
            name: group.name().to_string(),
            order: group.order(),
            mult_table: group.mult_table().to_vec(),
            inverse: group.inverses().to_vec(),
            irreps: Some(
                set.irreps()
                    .iter()
                    .map(|irrep| IrrepJson {
                        label: irrep.label.clone(),
                        dim: irrep.dim,
                        matrices: irrep.matrices.iter().map(MatrixJson::from).collect(),
                    })
                    .collect(),
            ),
            elements: Some(group.elements().to_vec()),
        }
    }

    pub fn to_group(&self) -> Result<FiniteGroup> {
        if self.mult_table.len() != self.order {
            return Err(Error::InvalidTable(format!(
                "order is {} but the table has {} rows",
                self.order,
                self.mult_table.len()
            )));
        }
        FiniteGroup::from_table(
            self.name.clone(),
            self.mult_table.clone(),
            Some(self.inverse.clone()),
            self.elements.clone(),
        )
    }

    /// The group and its irreps. Without an `irreps` field, falls back to the
    /// built-in named `name` if its table matches; otherwise reports
    /// `IncompleteIrreps`.
    pub fn to_irrep_set(&self) -> Result<IrrepSet> {
        let group = self.to_group()?;
        match &self.irreps {
            Some(list) => {
                let irreps = list
                    .iter()
                    .map(|j| {
                        Ok(Irrep {
                            label: j.label.clone(),
                            dim: j.dim,
                            matrices: j
                                .matrices
                                .iter()
                                .map(ComplexMatrix::try_from)
                                .collect::<Result<Vec<_>>>()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                IrrepSet::new(group, irreps)
            }
            None => match make_group(&self.name) {
                Ok(builtin) if builtin.mult_table() == group.mult_table() => irreps(&builtin),
                _ => Err(Error::IncompleteIrreps(format!(
                    "group '{}' has no irreps in the file and is not a built-in",
                    self.name
                ))),
            },
        }
    }
}

/// A many-body site: either the projective form directly or a stator that
/// is factored into it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteJson {
    Projective {
        unitaries: Vec<MatrixJson>,
        /// An `N_B × 1` matrix.
        b_state: MatrixJson,
    },
    Stator(StatorJson),
}

impl SiteJson {
    pub fn to_projective(&self) -> Result<ProjectiveStator> {
        match self {
            SiteJson::Projective { unitaries, b_state } => {
                let unitaries = unitaries
                    .iter()
                    .map(ComplexMatrix::try_from)
                    .collect::<Result<Vec<_>>>()?;
                ProjectiveStator::new(unitaries, column(b_state)?)
            }
            SiteJson::Stator(s) => factor_projective(&s.to_stator()?),
        }
    }
}

/// Reads a column vector stored as an `n × 1` matrix.
pub fn column(j: &MatrixJson) -> Result<ComplexVector> {
    let m = ComplexMatrix::try_from(j)?;
    if m.ncols() != 1 {
        return Err(Error::DimensionMismatch(format!("expected a column, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(m.column(0).into_owned())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    ComplexMatrix::try_from(&read_json::<MatrixJson>(path)?)
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json_string(value)?)
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    write_json(path, &MatrixJson::from(m))
}
