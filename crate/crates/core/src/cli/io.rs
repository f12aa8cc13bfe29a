//! Matrix and report files.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cone::TolerancePolicy;
use crate::symcore::{IndexSet, Mode, PrincipalMinors, Rational, ScaledRational, SymMatrix};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Float entries must be symmetric to this relative tolerance.
const FLOAT_SYMMETRY_TOL: f64 = 1e-12;

/// On-disk matrix. Float-mode entries are JSON numbers, rational-mode
/// entries are `"p/q"` strings (JSON integers are also accepted).
///
/// Matrices with irrational entries but rational minors additionally carry
/// `core` and `scale_squared`, the exact factors of `D C D`; readers that
/// understand them evaluate exactly, others fall back to `entries`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub n: usize,
    pub mode: Mode,
    pub entries: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_squared: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<Vec<Vec<Rational>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_squared: Option<Vec<Rational>>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// A matrix in whichever representation its file supports best.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedMatrix {
    Float(SymMatrix<f64>),
    Exact(SymMatrix<Rational>),
    Scaled(ScaledRational),
}

impl LoadedMatrix {
    pub fn order(&self) -> usize {
        match self {
            LoadedMatrix::Float(a) => a.order(),
            LoadedMatrix::Exact(a) => a.order(),
            LoadedMatrix::Scaled(a) => a.order(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            LoadedMatrix::Float(_) => Mode::Float,
            _ => Mode::Rational,
        }
    }

    /// Exact dense form: rational entries as they are, float entries by
    /// their exact binary values. Scaled matrices have no dense exact form
    /// unless every scale is a rational square.
    pub fn to_exact_dense(&self) -> Option<SymMatrix<Rational>> {
        match self {
            LoadedMatrix::Exact(a) => Some(a.clone()),
            LoadedMatrix::Float(a) => {
                let n = a.order();
                let mut ok = true;
                let m = SymMatrix::from_fn(n, |i, j| {
                    Rational::from_f64_exact(a[(i, j)]).unwrap_or_else(|| {
                        ok = false;
                        Rational::from_integer(0)
                    })
                });
                ok.then_some(m)
            }
            LoadedMatrix::Scaled(a) => a.to_rational(),
        }
    }
}

impl MatrixFile {
    pub fn from_float(a: &SymMatrix<f64>) -> Self {
        MatrixFile {
            schema_version: SCHEMA_VERSION,
            n: a.order(),
            mode: Mode::Float,
            entries: a.rows().map(|r| r.iter().map(|&x| Value::from(x)).collect()).collect(),
            family: None,
            s_squared: None,
            core: None,
            scale_squared: None,
        }
    }

    pub fn from_exact(a: &SymMatrix<Rational>) -> Self {
        MatrixFile {
            mode: Mode::Rational,
            entries: a.rows().map(|r| r.iter().map(|x| Value::from(x.to_string())).collect()).collect(),
            ..MatrixFile::from_float(&a.to_f64())
        }
    }

    /// Float entries plus the exact `D C D` factors.
    pub fn from_scaled(a: &ScaledRational) -> Self {
        MatrixFile {
            core: Some(a.core().rows().map(|r| r.to_vec()).collect()),
            scale_squared: Some(a.scale_sq().to_vec()),
            ..MatrixFile::from_float(&a.to_float())
        }
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    pub fn load(&self) -> Result<LoadedMatrix> {
        if self.entries.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: self.entries.len() });
        }
        let loaded = match self.mode {
            Mode::Float => LoadedMatrix::Float(SymMatrix::from_rows_symmetrized(
                self.map_entries(float_entry)?,
                FLOAT_SYMMETRY_TOL,
            )?),
            Mode::Rational => LoadedMatrix::Exact(SymMatrix::from_rows(self.map_entries(rational_entry)?)?),
        };
        match (&self.core, &self.scale_squared) {
            (None, None) => Ok(loaded),
            (Some(core), Some(scale)) => {
                let scaled = ScaledRational::new(SymMatrix::from_rows(core.clone())?, scale.clone())?;
                if scaled.order() != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, got: scaled.order() });
                }
                check_consistent(&scaled.to_float(), &loaded)?;
                Ok(LoadedMatrix::Scaled(scaled))
            }
            _ => Err(Error::Parse("'core' and 'scale_squared' must appear together".into())),
        }
    }

    fn map_entries<T>(&self, f: impl Fn(&Value) -> Result<T>) -> Result<Vec<Vec<T>>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() != self.n {
                    return Err(Error::NotSquare { n: self.n, row: i + 1, len: row.len() });
                }
                row.iter().map(&f).collect()
            })
            .collect()
    }
}

fn float_entry(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Parse(format!("float-mode entry must be a number, got {v}")))
}

fn rational_entry(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(x) if x.is_i64() => Ok(Rational::from_integer(x.as_i64().expect("checked"))),
        _ => Err(Error::Parse(format!("rational-mode entry must be a \"p/q\" string, got {v}"))),
    }
}

fn check_consistent(exact: &SymMatrix<f64>, loaded: &LoadedMatrix) -> Result<()> {
    let listed = match loaded {
        LoadedMatrix::Float(a) => a.clone(),
        LoadedMatrix::Exact(a) => a.to_f64(),
        LoadedMatrix::Scaled(a) => a.to_float(),
    };
    let scale = exact.inf_norm().max(1.0);
    for i in 0..exact.order() {
        for j in 0..exact.order() {
            if (exact[(i, j)] - listed[(i, j)]).abs() > 1e-12 * scale {
                return Err(Error::Parse(format!("entry ({}, {}) disagrees with core/scale_squared", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

pub fn parse_matrix_file(text: &str) -> Result<MatrixFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix file: {e}")))
}

/// Parses `1,2,3`, `{1,2,3}` or `[1, 2, 3]` (1-based); empty braces give
/// the empty set.
pub fn parse_index_list(s: &str) -> Result<IndexSet> {
    let inner = s.trim().trim_start_matches(['{', '[']).trim_end_matches(['}', ']']);
    let items: Vec<usize> = inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad index {t:?} in list {s:?}"))))
        .collect::<Result<_>>()?;
    IndexSet::from_one_based(&items)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: &'static str,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportFile<P> {
    pub schema_version: u32,
    pub command: CommandEcho,
    pub tolerance: TolerancePolicy,
    pub payload: P,
}
