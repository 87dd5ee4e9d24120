//! Wire formats: complex scalars as `[re, im]` pairs, matrices as row-major
//! arrays of rows, parameter lists with an explicit terminal field, and
//! eigenvalue multisets as (value, multiplicity) records. Typed parsing with
//! `deny_unknown_fields` is the schema gate; the shipped documents under
//! `schemas/` describe the same shapes.

use cmvkit::error::{Error, Result};
use cmvkit::numkernel::ComplexMatrix;
use cmvkit::schurfun::{BlaschkeProduct, SchurParams};
use cmvkit::Tolerances;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Cx = [f64; 2];

pub fn to_c(v: Cx) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub fn from_c(c: Complex64) -> Cx {
    [c.re, c.im]
}

pub fn vec_to_c(v: &[Cx]) -> Vec<Complex64> {
    v.iter().map(|x| to_c(*x)).collect()
}

pub fn vec_from_c(v: &[Complex64]) -> Vec<Cx> {
    v.iter().map(|c| from_c(*c)).collect()
}

pub fn matrix_from_rows(rows: &[Vec<Cx>]) -> Result<ComplexMatrix> {
    ComplexMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|x| to_c(*x)).collect())
            .collect(),
    )
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<Cx>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| from_c(m[(i, j)])).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Input payloads
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsIn {
    pub interior: Vec<Cx>,
    pub terminal: Cx,
}

impl ParamsIn {
    pub fn build(&self, tol: &Tolerances) -> Result<SchurParams> {
        SchurParams::finite(vec_to_c(&self.interior), to_c(self.terminal), tol)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlaschkeIn {
    pub phase: f64,
    pub zeros: Vec<Cx>,
}

impl BlaschkeIn {
    pub fn build(&self, tol: &Tolerances) -> Result<BlaschkeProduct> {
        BlaschkeProduct::new(self.phase, vec_to_c(&self.zeros), tol)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixIn {
    pub matrix: Vec<Vec<Cx>>,
}

impl MatrixIn {
    pub fn build(&self) -> Result<ComplexMatrix> {
        matrix_from_rows(&self.matrix)
    }
}

/// Either a dense matrix or a parameter list.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixOrParamsIn {
    Matrix(MatrixIn),
    Params(ParamsIn),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenEntry {
    pub value: Cx,
    pub multiplicity: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenListIn {
    pub eigenvalues: Vec<EigenEntry>,
}

impl EigenListIn {
    /// Flat eigenvalue list with repetitions.
    pub fn flat(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat_n(to_c(e.value), e.multiplicity))
            .collect()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedFirstIn {
    pub eigenvalues: Vec<EigenEntry>,
    pub first_params: Vec<Cx>,
    pub n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedLastIn {
    pub eigenvalues: Vec<Cx>,
    pub last_interior: Vec<Cx>,
    pub terminal: Cx,
    pub n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceIn {
    pub sequence: Vec<Cx>,
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct CheckOut {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct VerificationOut {
    pub checks: Vec<CheckOut>,
    pub passed: bool,
}

impl VerificationOut {
    pub fn new(checks: Vec<(String, f64, f64)>) -> Self {
        let checks: Vec<CheckOut> = checks
            .into_iter()
            .map(|(name, residual, tolerance)| CheckOut {
                name,
                pass: residual <= tolerance,
                residual,
                tolerance,
            })
            .collect();
        let passed = checks.iter().all(|c| c.pass);
        VerificationOut { checks, passed }
    }
}

pub fn params_out(p: &SchurParams) -> serde_json::Value {
    serde_json::json!({
        "interior": vec_from_c(p.interior()),
        "terminal": p.terminal().map(from_c),
    })
}

pub fn eigen_multiset_out(clustered: &[(Complex64, usize)]) -> Vec<EigenEntry> {
    clustered
        .iter()
        .map(|(v, m)| EigenEntry {
            value: from_c(*v),
            multiplicity: *m,
        })
        .collect()
}

/// Exit code taxonomy: schema 2, numeric 3, no-solution 4, capability 5.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Argument(_) => 2,
        Error::Capability(_) => 5,
        _ => 3,
    }
}

pub fn error_value(kind: &str, message: &str) -> serde_json::Value {
    serde_json::json!({ "error": { "kind": kind, "message": message } })
}
