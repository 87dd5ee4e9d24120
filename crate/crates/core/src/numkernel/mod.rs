//! Dense complex polynomial arithmetic and linear algebra: the kernel under
//! every other module. Polynomials carry deflation-aware degree bookkeeping;
//! eigenvalues come from a deterministic implicitly shifted complex QR
//! iteration on the Hessenberg form; roots go through the companion matrix.

mod eig;
mod matrix;
mod poly;

pub use eig::{char_poly, cluster, companion, eig, eig_hermitian, singular_values, EigenResult};
pub use matrix::ComplexMatrix;
pub use poly::{star, Poly, DEFAULT_DEFLATE};

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Relative thresholds shared by the whole crate.
///
/// `eps_structural` guards identities that hold exactly in the algebra
/// (unitarity, factorizations, parameter round trips); `eps_deflate` is the
/// trailing-coefficient cutoff of the polynomial degree bookkeeping;
/// `eps_roots` is the coarser tolerance for root/eigenvalue locations and
/// multiplicity clustering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_structural: f64,
    pub eps_roots: f64,
    pub eps_deflate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_structural: 1e-12,
            eps_roots: 1e-8,
            eps_deflate: 1e-11,
        }
    }
}

impl Tolerances {
    pub fn new(eps_structural: f64, eps_roots: f64, eps_deflate: f64) -> Result<Self> {
        let t = Tolerances {
            eps_structural,
            eps_roots,
            eps_deflate,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_structural > 0.0 && self.eps_roots > 0.0 && self.eps_deflate > 0.0) {
            return Err(Error::Argument(
                "tolerances must be strictly positive".into(),
            ));
        }
        if !(self.eps_structural <= self.eps_deflate && self.eps_deflate <= self.eps_roots) {
            return Err(Error::Argument(
                "tolerances must satisfy eps_structural <= eps_deflate <= eps_roots".into(),
            ));
        }
        Ok(())
    }
}

/// Solve `m x = rhs` by LU with partial pivoting.
///
/// Pivots below `eps_structural` relative to the matrix scale raise a
/// singularity error.
pub fn solve(m: &ComplexMatrix, rhs: &[Complex64], tol: &Tolerances) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if rhs.len() != n {
        return Err(Error::Argument(format!(
            "solve: rhs length {} does not match dimension {}",
            rhs.len(),
            n
        )));
    }
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let (lu, perm, _sign) = lu_decompose(m, Some(tol.eps_structural * scale))?;
    Ok(lu_solve(&lu, &perm, rhs))
}

/// Multiset of polynomial roots, counting multiplicity, via the companion
/// matrix and the QR eigensolver.
pub fn roots(p: &Poly, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Argument("roots: zero polynomial".into()))?;
    if deg < 1 {
        return Err(Error::Argument(
            "roots: polynomial must have degree >= 1".into(),
        ));
    }
    let c = companion(p)?;
    let res = eig(&c, tol)?;
    Ok(res.values)
}

pub(crate) type LuFactors = (ComplexMatrix, Vec<usize>, Complex64);

/// LU with partial pivoting. `pivot_floor = Some(t)` errors when a pivot
/// modulus drops to `t` or below; `None` accepts any nonzero arithmetic and is
/// used by determinant evaluation and inverse iteration.
pub(crate) fn lu_decompose(m: &ComplexMatrix, pivot_floor: Option<f64>) -> Result<LuFactors> {
    let n = m.dim();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pmax = a[(k, k)].norm();
        let mut prow = k;
        for i in k + 1..n {
            let v = a[(i, k)].norm();
            if v > pmax {
                pmax = v;
                prow = i;
            }
        }
        if let Some(floor) = pivot_floor {
            if pmax <= floor {
                return Err(Error::Singular(format!(
                    "pivot {pmax:.3e} at column {k} is at or below the threshold {floor:.3e}"
                )));
            }
        }
        if prow != k {
            a.swap_rows(prow, k);
            perm.swap(prow, k);
            sign = -sign;
        }
        let piv = a[(k, k)];
        if piv.norm() == 0.0 {
            continue; // exactly singular; determinant will be zero
        }
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            a[(i, k)] = f;
            for j in k + 1..n {
                let akj = a[(k, j)];
                a[(i, j)] -= f * akj;
            }
        }
    }
    Ok((a, perm, sign))
}

pub(crate) fn lu_solve(lu: &ComplexMatrix, perm: &[usize], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = lu.dim();
    let mut x: Vec<Complex64> = perm.iter().map(|&p| rhs[p]).collect();
    for i in 1..n {
        for j in 0..i {
            let f = lu[(i, j)];
            let xj = x[j];
            x[i] -= f * xj;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let f = lu[(i, j)];
            let xj = x[j];
            x[i] -= f * xj;
        }
        let piv = lu[(i, i)];
        x[i] = if piv.norm() == 0.0 {
            // exactly singular pivot: clamp so inverse iteration can proceed
            x[i] / Complex64::new(f64::EPSILON, 0.0)
        } else {
            x[i] / piv
        };
    }
    x
}

/// Determinant via LU without a pivot threshold.
pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    let n = m.dim();
    match lu_decompose(m, None) {
        Ok((lu, _, sign)) => {
            let mut d = sign;
            for k in 0..n {
                d *= lu[(k, k)];
            }
            d
        }
        Err(_) => Complex64::new(0.0, 0.0),
    }
}
