//! CMV matrices and their truncations: entry assembly from Schur parameters,
//! the LM factorization, block-tridiagonal structure, parameter recovery by
//! entry chasing, rotation conjugation, rank-one defect data, and the
//! quasi-unitary shift sections.
//!
//! The truncated matrix is always generated from its `(N+1)×(N+1)` parent by
//! deleting the first row and column, never by direct truncated-entry
//! formulas, so the even/odd layout differences have a single source of
//! truth.

use crate::error::{Error, Result};
use crate::numkernel::{eig_hermitian, ComplexMatrix, Tolerances};
use crate::schurfun::SchurParams;
use num_complex::Complex64;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `α_{m-1}` with the standard boundary convention `α_{−1} = −1`.
fn alpha_prev(p: &SchurParams, m: usize) -> Complex64 {
    if m == 0 {
        cplx(-1.0, 0.0)
    } else {
        p.alpha(m - 1)
    }
}

/// Unitary five-diagonal CMV matrix of a finite parameter sequence
/// (`N` interior parameters plus a unimodular terminal), dimension `N+1`.
#[derive(Debug, Clone)]
pub struct CmvMatrix {
    params: SchurParams,
    dense: ComplexMatrix,
}

/// Assemble the CMV matrix entries from the parity formulas. Entries outside
/// the five central diagonals are exact zeros, as are the in-band entries
/// whose parity factor vanishes.
pub fn assemble_cmv(p: &SchurParams, tol: &Tolerances) -> Result<CmvMatrix> {
    let _ = tol;
    if p.terminal().is_none() {
        return Err(Error::Argument(
            "assemble_cmv requires a terminal parameter".into(),
        ));
    }
    let n = p.order();
    let dim = n + 1;
    let mut m = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        m[(j, j)] = -p.alpha(j).conj() * alpha_prev(p, j);
    }
    for j in 0..n {
        let rho = p.rho(j);
        if j % 2 == 1 {
            m[(j + 1, j)] = p.alpha(j + 1).conj() * rho;
            m[(j, j + 1)] = -alpha_prev(p, j) * rho;
        } else {
            m[(j + 1, j)] = -alpha_prev(p, j) * rho;
            m[(j, j + 1)] = p.alpha(j + 1).conj() * rho;
        }
    }
    for j in 0..n.saturating_sub(1) {
        let rr = cplx(p.rho(j) * p.rho(j + 1), 0.0);
        if j % 2 == 1 {
            m[(j + 2, j)] = rr;
        } else {
            m[(j, j + 2)] = rr;
        }
    }
    Ok(CmvMatrix {
        params: p.clone(),
        dense: m,
    })
}

impl CmvMatrix {
    pub fn params(&self) -> &SchurParams {
        &self.params
    }

    pub fn dense(&self) -> &ComplexMatrix {
        &self.dense
    }

    pub fn dim(&self) -> usize {
        self.dense.dim()
    }

    /// Delete the first row and column.
    pub fn truncate(&self) -> Result<TruncatedCmv> {
        if self.dim() < 2 {
            return Err(Error::Argument("truncation needs dimension >= 2".into()));
        }
        Ok(TruncatedCmv {
            params: self.params.clone(),
            dense: self.dense.delete_leading(1),
        })
    }
}

/// Factor the CMV matrix as `C = L·M` with
/// `L = Ψ(α_0) ⊕ Ψ(α_2) ⊕ …` and `M = 1 ⊕ Ψ(α_1) ⊕ Ψ(α_3) ⊕ …`, where
/// `Ψ(α) = [[conj(α), ρ], [ρ, −α]]` and the factor hitting the terminal
/// parameter collapses to the scalar `(conj(α_N))`.
pub fn lm_factors(p: &SchurParams, tol: &Tolerances) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let _ = tol;
    if p.terminal().is_none() {
        return Err(Error::Argument(
            "lm_factors requires a terminal parameter".into(),
        ));
    }
    let n = p.order();
    let dim = n + 1;
    let mut l = ComplexMatrix::zeros(dim);
    let mut m = ComplexMatrix::zeros(dim);
    let place = |target: &mut ComplexMatrix, row: usize| {
        let a = p.alpha(row);
        if row + 1 < dim {
            let rho = cplx(p.rho(row), 0.0);
            target[(row, row)] = a.conj();
            target[(row, row + 1)] = rho;
            target[(row + 1, row)] = rho;
            target[(row + 1, row + 1)] = -a;
        } else {
            target[(row, row)] = a.conj();
        }
    };
    let mut row = 0;
    while row < dim {
        place(&mut l, row);
        row += 2;
    }
    m[(0, 0)] = cplx(1.0, 0.0);
    let mut row = 1;
    while row < dim {
        place(&mut m, row);
        row += 2;
    }
    Ok((l, m))
}

/// Truncated CMV matrix: the parent with its first row and column deleted.
/// A completely nonunitary contraction with rank-one defect operators.
#[derive(Debug, Clone)]
pub struct TruncatedCmv {
    params: SchurParams,
    dense: ComplexMatrix,
}

impl TruncatedCmv {
    /// Assemble the parent and truncate. `params` must carry at least one
    /// interior parameter.
    pub fn from_params(params: &SchurParams, tol: &Tolerances) -> Result<Self> {
        assemble_cmv(params, tol)?.truncate()
    }

    pub fn params(&self) -> &SchurParams {
        &self.params
    }

    pub fn dense(&self) -> &ComplexMatrix {
        &self.dense
    }

    pub fn dim(&self) -> usize {
        self.dense.dim()
    }

    /// Colligation scalar `S = conj(α_0)`.
    pub fn colligation_scalar(&self) -> Complex64 {
        self.params.alpha(0).conj()
    }

    /// Colligation column `F = (ρ_0, 0, …, 0)`.
    pub fn colligation_column(&self) -> Vec<Complex64> {
        let mut f = vec![cplx(0.0, 0.0); self.dim()];
        f[0] = cplx(self.params.rho(0), 0.0);
        f
    }

    /// Colligation row `G = (conj(α_1) ρ_0, ρ_1 ρ_0, 0, …, 0)`.
    pub fn colligation_row(&self) -> Vec<Complex64> {
        let mut g = vec![cplx(0.0, 0.0); self.dim()];
        let rho0 = self.params.rho(0);
        g[0] = self.params.alpha(1).conj() * rho0;
        if self.dim() >= 2 {
            g[1] = cplx(self.params.rho(1) * rho0, 0.0);
        }
        g
    }
}

// ---------------------------------------------------------------------------
// Block-tridiagonal structure
// ---------------------------------------------------------------------------

/// Dense rectangular block of a partitioned matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Block {
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }
}

/// Block tridiagonal view of a truncated CMV matrix under the 2×2 partition
/// (last block 1×1 for odd dimension).
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub diag: Vec<Block>,
    pub sub: Vec<Block>,
    pub sup: Vec<Block>,
    sizes: Vec<usize>,
}

impl BlockTridiagonal {
    /// Place the blocks back into a dense matrix; entries outside the block
    /// tridiagonal are zero.
    pub fn reassemble(&self) -> ComplexMatrix {
        let n: usize = self.sizes.iter().sum();
        let mut m = ComplexMatrix::zeros(n);
        let offsets: Vec<usize> = self
            .sizes
            .iter()
            .scan(0usize, |acc, s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        for (k, b) in self.diag.iter().enumerate() {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(offsets[k] + i, offsets[k] + j)] = b.at(i, j);
                }
            }
        }
        for (k, b) in self.sub.iter().enumerate() {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(offsets[k + 1] + i, offsets[k] + j)] = b.at(i, j);
                }
            }
        }
        for (k, b) in self.sup.iter().enumerate() {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(offsets[k] + i, offsets[k + 1] + j)] = b.at(i, j);
                }
            }
        }
        m
    }
}

/// Cut a truncated CMV matrix into its tridiagonal 2×2 blocks.
pub fn blocks(t: &TruncatedCmv) -> BlockTridiagonal {
    let n = t.dim();
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = left.min(2);
        sizes.push(s);
        left -= s;
    }
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0usize, |acc, s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let cut = |r0: usize, rn: usize, c0: usize, cn: usize| -> Block {
        let mut data = Vec::with_capacity(rn * cn);
        for i in 0..rn {
            for j in 0..cn {
                data.push(t.dense[(r0 + i, c0 + j)]);
            }
        }
        Block {
            rows: rn,
            cols: cn,
            data,
        }
    };
    let k = sizes.len();
    let diag: Vec<Block> = (0..k)
        .map(|i| cut(offsets[i], sizes[i], offsets[i], sizes[i]))
        .collect();
    let sub: Vec<Block> = (0..k.saturating_sub(1))
        .map(|i| cut(offsets[i + 1], sizes[i + 1], offsets[i], sizes[i]))
        .collect();
    let sup: Vec<Block> = (0..k.saturating_sub(1))
        .map(|i| cut(offsets[i], sizes[i], offsets[i + 1], sizes[i + 1]))
        .collect();
    BlockTridiagonal {
        diag,
        sub,
        sup,
        sizes,
    }
}

// ---------------------------------------------------------------------------
// Parameter recovery
// ---------------------------------------------------------------------------

/// Recover the parameters of a truncated CMV matrix by entry chasing:
/// `|α_1|²` from the squared moduli of the (1,1) and (2,1) entries, `ρ_1`
/// as the positive square root, `α_0` from the (0,1) entry, then each `α_j`
/// from its `conj(α_j) ρ_{j−1}` entry, with positive `ρ` throughout. The
/// result is validated by reassembly; a residual above `eps_roots` means the
/// input is not a truncated CMV matrix.
///
/// A 1×1 input only exposes the product `−conj(α_1) α_0`; the documented
/// normal form puts the modulus in `α_0 = |entry|` and the phase in the
/// terminal (`α_1 = −conj(entry)/|entry|`, and `α_1 = 1` for the zero
/// matrix). That representative is not unique.
pub fn params_from_truncated(m: &ComplexMatrix, tol: &Tolerances) -> Result<SchurParams> {
    let n = m.dim();
    if n == 1 {
        let t00 = m[(0, 0)];
        if t00.norm() >= 1.0 {
            return Err(Error::Structure(format!(
                "1x1 entry modulus {} is not a contraction",
                t00.norm()
            )));
        }
        let (a0, a1) = if t00.norm() == 0.0 {
            (cplx(0.0, 0.0), cplx(1.0, 0.0))
        } else {
            (cplx(t00.norm(), 0.0), -(t00 / t00.norm()).conj())
        };
        return SchurParams::finite(vec![a0], a1, tol);
    }

    let at = |i: usize, j: usize| -> Complex64 {
        if i < n && j < n {
            m[(i, j)]
        } else {
            cplx(0.0, 0.0)
        }
    };
    let mut alphas = vec![cplx(0.0, 0.0); n + 1];
    let mut rhos = vec![0.0_f64; n + 1];

    let a1_sq = at(1, 1).norm_sqr() + at(2, 1).norm_sqr();
    if a1_sq >= 1.0 - tol.eps_roots {
        return Err(Error::Structure(format!(
            "recovered |α_1|² = {a1_sq} leaves no positive ρ_1"
        )));
    }
    rhos[1] = (1.0 - a1_sq).sqrt();
    alphas[0] = -at(0, 1) / rhos[1];

    for j in 2..=n {
        let entry = if j % 2 == 0 {
            at(j - 1, j - 2)
        } else {
            at(j - 2, j - 1)
        };
        alphas[j] = entry.conj() / rhos[j - 1];
        if j < n {
            let asq = alphas[j].norm_sqr();
            if asq >= 1.0 - tol.eps_roots {
                return Err(Error::Structure(format!(
                    "recovered |α_{j}| = {} mid-sequence leaves no positive ρ",
                    asq.sqrt()
                )));
            }
            rhos[j] = (1.0 - asq).sqrt();
        } else {
            let am = alphas[n].norm();
            if (am - 1.0).abs() > tol.eps_roots {
                return Err(Error::Structure(format!(
                    "recovered terminal modulus {am} is not unimodular"
                )));
            }
            alphas[n] /= am;
        }
        if j == 2 {
            // phase of α_1 becomes available once ρ_2 (or the terminal) is known
            alphas[1] = if n >= 3 {
                -at(2, 1) / rhos[2]
            } else {
                -at(1, 1) / alphas[2].conj()
            };
        }
    }

    let params = SchurParams::finite(alphas[..n].to_vec(), alphas[n], tol)?;
    let rebuilt = TruncatedCmv::from_params(&params, tol)?;
    let residual = rebuilt.dense().max_abs_diff(m);
    if residual > tol.eps_roots {
        return Err(Error::Structure(format!(
            "reassembly residual {residual:.3e}: input is not a truncated CMV matrix"
        )));
    }
    Ok(params)
}

// ---------------------------------------------------------------------------
// Rotation conjugation
// ---------------------------------------------------------------------------

/// The truncated CMV matrix of the rotated parameters `e^{it} α_n`, verified
/// to equal `V T V^{−1}` with `V = diag(e^{it}, 1, e^{it}, 1, …)`.
pub fn rotate_conjugate(t: &TruncatedCmv, angle: f64, tol: &Tolerances) -> Result<TruncatedCmv> {
    let factor = Complex64::from_polar(1.0, angle);
    let rotated = TruncatedCmv::from_params(&t.params().scaled(factor), tol)?;
    let n = t.dim();
    let mut conj_side = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let vi = if i % 2 == 0 { factor } else { cplx(1.0, 0.0) };
            let vj = if j % 2 == 0 {
                factor.conj()
            } else {
                cplx(1.0, 0.0)
            };
            conj_side[(i, j)] = vi * t.dense[(i, j)] * vj;
        }
    }
    let residual = conj_side.max_abs_diff(rotated.dense());
    if residual > tol.eps_structural * n as f64 {
        return Err(Error::InternalConsistency(format!(
            "rotation conjugation identity residual {residual:.3e}"
        )));
    }
    Ok(rotated)
}

// ---------------------------------------------------------------------------
// Defect data
// ---------------------------------------------------------------------------

/// Rank-one defect data of a truncated CMV matrix.
#[derive(Debug, Clone)]
pub struct DefectData {
    pub rho0: f64,
    /// Defect direction of `T*`: the first basis vector.
    pub left: Vec<Complex64>,
    /// Defect direction of `T`: `α_1 δ_1 + ρ_1 δ_2`.
    pub right: Vec<Complex64>,
    /// Largest deviation over all verified identities.
    pub max_residual: f64,
}

/// Verify the rank-one structure of `I − T*T` and `I − TT*` and the closed
/// forms of the defect operators' actions:
/// `D_{T*} h = ρ_0 (h, δ_1) δ_1` and `D_T h = ρ_0 (h, w) w` with
/// `w = α_1 δ_1 + ρ_1 δ_2`, plus `T w = −α_0 δ_1`.
pub fn defect_data(t: &TruncatedCmv, tol: &Tolerances) -> Result<DefectData> {
    let n = t.dim();
    let p = t.params();
    let rho0 = p.rho(0);
    let mut right = vec![cplx(0.0, 0.0); n];
    right[0] = p.alpha(1);
    if n >= 2 {
        right[1] = cplx(p.rho(1), 0.0);
    }
    let mut left = vec![cplx(0.0, 0.0); n];
    left[0] = cplx(1.0, 0.0);

    let id = ComplexMatrix::identity(n);
    let dt_sq = id.sub(&t.dense.adjoint().mul(&t.dense));
    let dts_sq = id.sub(&t.dense.mul(&t.dense.adjoint()));

    let mut max_residual = 0.0_f64;
    for (gram, dir) in [(&dt_sq, &right), (&dts_sq, &left)] {
        let (vals, vecs) = eig_hermitian(gram);
        let above: Vec<f64> = vals
            .iter()
            .copied()
            .filter(|v| v.abs() > tol.eps_roots)
            .collect();
        if above.len() != 1 {
            return Err(Error::Structure(format!(
                "defect operator rank is {} rather than one",
                above.len()
            )));
        }
        let top = vals[n - 1];
        max_residual = max_residual.max((top - rho0 * rho0).abs());
        // eigenvector of the top eigenvalue, phase-aligned with the predicted direction
        let mut v: Vec<Complex64> = (0..n).map(|i| vecs[(i, n - 1)]).collect();
        let overlap: Complex64 = v.iter().zip(dir.iter()).map(|(a, b)| a.conj() * b).sum();
        if overlap.norm() > 0.0 {
            let ph = overlap / overlap.norm();
            for c in v.iter_mut() {
                *c *= ph;
            }
        }
        // D h = sqrt(top) (h, v) v must match ρ_0 (h, dir) dir on the basis
        for j in 0..n {
            for i in 0..n {
                let predicted = rho0 * dir[j].conj() * dir[i];
                let computed = top.max(0.0).sqrt() * v[j].conj() * v[i];
                max_residual = max_residual.max((predicted - computed).norm());
            }
        }
    }
    // T w = −α_0 δ_1
    let tw = t.dense.matvec(&right);
    for (i, v) in tw.iter().enumerate() {
        let expect = if i == 0 { -p.alpha(0) } else { cplx(0.0, 0.0) };
        max_residual = max_residual.max((v - expect).norm());
    }
    if max_residual > tol.eps_roots {
        return Err(Error::Structure(format!(
            "defect identities residual {max_residual:.3e}"
        )));
    }
    Ok(DefectData {
        rho0,
        left,
        right,
        max_residual,
    })
}

// ---------------------------------------------------------------------------
// Quasi-unitary shift sections and submatrices
// ---------------------------------------------------------------------------

/// Leading `n×n` section of the quasi-unitary contractive extension of the
/// shift pattern: `t(0,1) = −r e^{iφ}`, with `t(2k−1, 2k+1) = t(2k, 2k−2) = 1`
/// and zeros elsewhere (a section of the semi-infinite matrix whose
/// characteristic function is the constant `r e^{iφ}`, parameters
/// `(r e^{iφ}, 0, 0, …)`).
///
/// Finite sections of this semi-infinite pattern are not themselves finite
/// truncated CMV matrices (the terminal entry differs), so the raw matrix is
/// returned; it serves as a constructor for tests and demonstrations.
pub fn livsic_matrix(r: f64, phi: f64, n: usize, tol: &Tolerances) -> Result<ComplexMatrix> {
    let _ = tol;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Argument(format!("r = {r} must lie in (0, 1)")));
    }
    if n == 0 {
        return Err(Error::Argument("dimension must be >= 1".into()));
    }
    let mut m = ComplexMatrix::zeros(n);
    if n >= 2 {
        m[(0, 1)] = -Complex64::from_polar(r, phi);
    }
    let mut k = 1;
    while 2 * k + 1 < n {
        m[(2 * k - 1, 2 * k + 1)] = cplx(1.0, 0.0);
        k += 1;
    }
    let mut k = 1;
    while 2 * k < n {
        m[(2 * k, 2 * k - 2)] = cplx(1.0, 0.0);
        k += 1;
    }
    Ok(m)
}

/// Submatrix of a truncated CMV matrix with the first `k` rows and columns
/// deleted, together with the parameter-tail identification: for even `k`
/// the section equals the truncated CMV matrix of `α_k, α_{k+1}, …`; for odd
/// `k` it equals its transpose (`transposed` is set).
#[derive(Debug, Clone)]
pub struct SubmatrixK {
    pub section: ComplexMatrix,
    pub tail: TruncatedCmv,
    pub transposed: bool,
}

pub fn submatrix_k(t: &TruncatedCmv, k: usize, tol: &Tolerances) -> Result<SubmatrixK> {
    let n = t.dim();
    if k >= n {
        return Err(Error::Argument(format!(
            "cannot delete {k} rows from a {n}-dimensional matrix"
        )));
    }
    if k == 0 {
        return Ok(SubmatrixK {
            section: t.dense.clone(),
            tail: t.clone(),
            transposed: false,
        });
    }
    let section = t.dense.delete_leading(k);
    let tail_params = SchurParams::finite(
        t.params().interior()[k..].to_vec(),
        t.params().terminal().expect("truncated CMV has a terminal"),
        tol,
    )?;
    let tail = TruncatedCmv::from_params(&tail_params, tol)?;
    let expected = if k.is_multiple_of(2) {
        tail.dense().clone()
    } else {
        tail.dense().transpose()
    };
    let residual = section.max_abs_diff(&expected);
    if residual > 0.0 {
        return Err(Error::InternalConsistency(format!(
            "parameter-tail identification residual {residual:.3e} at k = {k}"
        )));
    }
    Ok(SubmatrixK {
        section,
        tail,
        transposed: k % 2 == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::singular_values;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn random_params(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> SchurParams {
        let interior: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::from_polar(
                    rng.random_range(0.0..rmax),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let terminal = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        SchurParams::finite(interior, terminal, &tol()).unwrap()
    }

    fn free_params(n: usize, phi: f64) -> SchurParams {
        SchurParams::finite(
            vec![cplx(0.0, 0.0); n],
            Complex64::from_polar(1.0, phi),
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn assemble_matches_displayed_leading_block() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let p = random_params(&mut rng, 6, 0.9);
        let c = assemble_cmv(&p, &t).unwrap();
        let a = |j: usize| p.alpha(j);
        let r = |j: usize| p.rho(j);
        let d = c.dense();
        // first five rows of the classical display
        assert!((d[(0, 0)] - a(0).conj()).norm() < 1e-15);
        assert!((d[(0, 1)] - a(1).conj() * r(0)).norm() < 1e-15);
        assert!((d[(0, 2)] - cplx(r(1) * r(0), 0.0)).norm() < 1e-15);
        assert!((d[(1, 0)] - cplx(r(0), 0.0)).norm() < 1e-15);
        assert!((d[(1, 1)] + a(1).conj() * a(0)).norm() < 1e-15);
        assert!((d[(1, 2)] + a(0) * r(1)).norm() < 1e-15);
        assert!((d[(2, 1)] - a(2).conj() * r(1)).norm() < 1e-15);
        assert!((d[(2, 2)] + a(2).conj() * a(1)).norm() < 1e-15);
        assert!((d[(2, 3)] - a(3).conj() * r(2)).norm() < 1e-15);
        assert!((d[(2, 4)] - cplx(r(3) * r(2), 0.0)).norm() < 1e-15);
        assert!((d[(3, 1)] - cplx(r(2) * r(1), 0.0)).norm() < 1e-15);
        assert!((d[(3, 2)] + r(2) * a(1)).norm() < 1e-15);
        assert!((d[(3, 3)] + a(3).conj() * a(2)).norm() < 1e-15);
        assert!((d[(3, 4)] + r(3) * a(2)).norm() < 1e-15);
        assert!((d[(4, 3)] - a(4).conj() * r(3)).norm() < 1e-15);
        assert!((d[(4, 4)] + a(4).conj() * a(3)).norm() < 1e-15);
        // zero pattern in the corner
        assert!(d[(0, 3)].norm() == 0.0 && d[(0, 4)].norm() == 0.0);
        assert!(d[(1, 3)].norm() == 0.0 && d[(1, 4)].norm() == 0.0);
        assert!(d[(2, 0)].norm() == 0.0 && d[(3, 0)].norm() == 0.0);
        assert!(d[(4, 0)].norm() == 0.0 && d[(4, 1)].norm() == 0.0 && d[(4, 2)].norm() == 0.0);
    }

    #[test]
    fn assemble_scalar_case() {
        let t = tol();
        let phi = 0.7;
        let p = free_params(0, phi);
        let c = assemble_cmv(&p, &t).unwrap();
        assert_eq!(c.dim(), 1);
        assert!((c.dense()[(0, 0)] - Complex64::from_polar(1.0, -phi)).norm() < 1e-15);
    }

    #[test]
    fn assemble_is_unitary_and_five_diagonal() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let p = random_params(&mut rng, 6, 0.95);
        let c = assemble_cmv(&p, &t).unwrap();
        assert!(c.dense().unitarity_residual() <= 7.0 * t.eps_structural);
        for i in 0..c.dim() {
            for j in 0..c.dim() {
                if i.abs_diff(j) > 2 {
                    assert_eq!(c.dense()[(i, j)], cplx(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn lm_factor_free_case_and_scalar() {
        let t = tol();
        let p = free_params(4, 0.0);
        let (l, m) = lm_factors(&p, &t).unwrap();
        // Ψ(0) is the antidiagonal [[0,1],[1,0]]
        assert!((l[(0, 1)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!((l[(1, 0)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!(l[(0, 0)].norm() == 0.0 && l[(1, 1)].norm() == 0.0);
        assert!((m[(0, 0)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(1, 2)] - cplx(1.0, 0.0)).norm() < 1e-15);
        let p0 = free_params(0, 0.3);
        let (l0, m0) = lm_factors(&p0, &t).unwrap();
        assert!((l0[(0, 0)] - Complex64::from_polar(1.0, -0.3)).norm() < 1e-15);
        assert!((m0[(0, 0)] - cplx(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lm_product_reassembles_cmv() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for n in [1usize, 2, 5, 6, 9] {
            let p = random_params(&mut rng, n, 0.9);
            let c = assemble_cmv(&p, &t).unwrap();
            let (l, m) = lm_factors(&p, &t).unwrap();
            assert!(l.unitarity_residual() <= t.eps_structural * (n + 1) as f64);
            assert!(m.unitarity_residual() <= t.eps_structural * (n + 1) as f64);
            let gap = l.mul(&m).max_abs_diff(c.dense());
            assert!(
                gap <= t.eps_structural * n.max(1) as f64,
                "LM gap {gap} at n = {n}"
            );
        }
    }

    #[test]
    fn alternate_form_is_the_transpose() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let p = random_params(&mut rng, 5, 0.9);
        let c = assemble_cmv(&p, &t).unwrap();
        let (l, m) = lm_factors(&p, &t).unwrap();
        // M L equals the transpose of C = L M (both factors are symmetric)
        let alt = m.mul(&l);
        assert!(alt.max_abs_diff(&c.dense().transpose()) <= t.eps_structural * 5.0);
    }

    #[test]
    fn truncation_of_free_parent_is_shift_pattern() {
        let t = tol();
        let p = free_params(5, 0.0);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        // printed 5×5 pattern with unit terminal
        let mut expect = ComplexMatrix::zeros(5);
        expect[(1, 3)] = cplx(1.0, 0.0);
        expect[(2, 0)] = cplx(1.0, 0.0);
        expect[(3, 4)] = cplx(1.0, 0.0);
        expect[(4, 2)] = cplx(1.0, 0.0);
        assert_eq!(tr.dense().max_abs_diff(&expect), 0.0);

        let p6 = free_params(6, 0.0);
        let tr6 = TruncatedCmv::from_params(&p6, &t).unwrap();
        let mut expect6 = ComplexMatrix::zeros(6);
        expect6[(1, 3)] = cplx(1.0, 0.0);
        expect6[(2, 0)] = cplx(1.0, 0.0);
        expect6[(3, 5)] = cplx(1.0, 0.0);
        expect6[(4, 2)] = cplx(1.0, 0.0);
        expect6[(5, 4)] = cplx(1.0, 0.0);
        assert_eq!(tr6.dense().max_abs_diff(&expect6), 0.0);
    }

    #[test]
    fn truncation_scalar_corner_case() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let p = random_params(&mut rng, 1, 0.9);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        assert_eq!(tr.dim(), 1);
        let expect = -p.alpha(1).conj() * p.alpha(0);
        assert!((tr.dense()[(0, 0)] - expect).norm() < 1e-15);
    }

    #[test]
    fn blocks_reassemble_exactly_and_match_formulas() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        for n in [2usize, 5, 6, 9] {
            let p = random_params(&mut rng, n, 0.9);
            let tr = TruncatedCmv::from_params(&p, &t).unwrap();
            let bl = blocks(&tr);
            assert_eq!(bl.reassemble().max_abs_diff(tr.dense()), 0.0, "n = {n}");
        }
        // interior blocks match the displayed 2×2 forms
        let p = random_params(&mut rng, 7, 0.9);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        let bl = blocks(&tr);
        let a = |j: usize| p.alpha(j);
        let r = |j: usize| p.rho(j);
        let b1 = &bl.diag[1];
        assert!((b1.at(0, 0) + a(3).conj() * a(2)).norm() < 1e-15);
        assert!((b1.at(0, 1) + r(3) * a(2)).norm() < 1e-15);
        assert!((b1.at(1, 0) - a(4).conj() * r(3)).norm() < 1e-15);
        assert!((b1.at(1, 1) + a(4).conj() * a(3)).norm() < 1e-15);
        let s1 = &bl.sub[1];
        assert!((s1.at(0, 0) - cplx(r(4) * r(3), 0.0)).norm() < 1e-15);
        assert!((s1.at(0, 1) + r(4) * a(3)).norm() < 1e-15);
        assert!(s1.at(1, 0).norm() == 0.0 && s1.at(1, 1).norm() == 0.0);
        let u1 = &bl.sup[1];
        assert!(u1.at(0, 0).norm() == 0.0 && u1.at(0, 1).norm() == 0.0);
        assert!((u1.at(1, 0) - a(5).conj() * r(4)).norm() < 1e-15);
        assert!((u1.at(1, 1) - cplx(r(5) * r(4), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn recover_params_from_shift_pattern() {
        let t = tol();
        let p = free_params(5, 0.0);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        let rec = params_from_truncated(tr.dense(), &t).unwrap();
        assert_eq!(rec.order(), 5);
        for g in rec.interior() {
            assert!(g.norm() < 1e-14);
        }
        assert!((rec.terminal().unwrap() - cplx(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn recover_params_round_trip() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        for n in [2usize, 3, 4, 7, 16, 33, 64] {
            let p = random_params(&mut rng, n, 0.9);
            let tr = TruncatedCmv::from_params(&p, &t).unwrap();
            let rec = params_from_truncated(tr.dense(), &t).unwrap();
            let gap = rec.max_param_diff(&p);
            assert!(gap <= t.eps_structural * 100.0, "gap {gap} at n = {n}");
        }
    }

    #[test]
    fn recover_params_normal_form_for_scalar() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(137);
        let p = random_params(&mut rng, 1, 0.8);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        let rec = params_from_truncated(tr.dense(), &t).unwrap();
        // the normal form reproduces the same 1×1 matrix even though those
        // parameters are not unique
        let again = TruncatedCmv::from_params(&rec, &t).unwrap();
        assert!(again.dense().max_abs_diff(tr.dense()) < 1e-14);
        assert!(rec.interior()[0].im.abs() < 1e-15 && rec.interior()[0].re >= 0.0);
    }

    #[test]
    fn recover_params_rejects_non_cmv() {
        let t = tol();
        let mut m = ComplexMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = cplx(0.21 * (i as f64 + 1.0), -0.13 * (j as f64)) * 0.2;
            }
        }
        assert!(params_from_truncated(&m, &t).is_err());
    }

    #[test]
    fn rotation_examples() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(139);
        let p = random_params(&mut rng, 5, 0.9);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        // zero angle is the identity
        let same = rotate_conjugate(&tr, 0.0, &t).unwrap();
        assert_eq!(same.dense().max_abs_diff(tr.dense()), 0.0);
        // free pattern: the single unimodular entry rotates
        let free = TruncatedCmv::from_params(&free_params(5, 0.0), &t).unwrap();
        let rot = rotate_conjugate(&free, 1.1, &t).unwrap();
        assert!(
            (rot.params().terminal().unwrap() - Complex64::from_polar(1.0, 1.1)).norm() < 1e-14
        );
        assert!((rot.dense()[(3, 4)] - Complex64::from_polar(1.0, -1.1)).norm() < 1e-14);
        // random conjugation residual is checked inside rotate_conjugate
        for _ in 0..16 {
            let p = random_params(&mut rng, 6, 0.9);
            let tr = TruncatedCmv::from_params(&p, &t).unwrap();
            let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            rotate_conjugate(&tr, angle, &t).unwrap();
        }
    }

    #[test]
    fn contraction_and_rank_one_defects() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(149);
        let p = random_params(&mut rng, 6, 0.9);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        let svals = singular_values(tr.dense());
        assert!(svals.last().unwrap() <= &(1.0 + t.eps_structural));
        // exactly one singular value of I − T*T above eps_roots, equal to ρ_0²
        let id = ComplexMatrix::identity(tr.dim());
        for gram in [
            id.sub(&tr.dense().adjoint().mul(tr.dense())),
            id.sub(&tr.dense().mul(&tr.dense().adjoint())),
        ] {
            let (vals, _) = eig_hermitian(&gram);
            let above: Vec<f64> = vals.iter().copied().filter(|v| *v > t.eps_roots).collect();
            assert_eq!(above.len(), 1);
            assert!((above[0] - p.rho(0) * p.rho(0)).abs() <= t.eps_roots);
        }
    }

    #[test]
    fn defect_data_free_params() {
        let t = tol();
        let d = defect_data(
            &TruncatedCmv::from_params(&free_params(4, 0.0), &t).unwrap(),
            &t,
        )
        .unwrap();
        assert!((d.rho0 - 1.0).abs() < 1e-15);
        assert!((d.left[0] - cplx(1.0, 0.0)).norm() < 1e-15);
        // right direction is δ_2 when α_1 = 0
        assert!(d.right[0].norm() < 1e-15);
        assert!((d.right[1] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!(d.max_residual <= t.eps_roots);
    }

    #[test]
    fn defect_data_scalar_and_random() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(151);
        let p1 = random_params(&mut rng, 1, 0.7);
        let d1 = defect_data(&TruncatedCmv::from_params(&p1, &t).unwrap(), &t).unwrap();
        assert!(d1.max_residual <= t.eps_roots);
        for _ in 0..8 {
            let p = random_params(&mut rng, 5, 0.85);
            let d = defect_data(&TruncatedCmv::from_params(&p, &t).unwrap(), &t).unwrap();
            assert!(d.max_residual <= t.eps_roots);
        }
    }

    #[test]
    fn livsic_pattern_and_contraction() {
        let t = tol();
        let m = livsic_matrix(0.6, 1.2, 7, &t).unwrap();
        assert!((m[(0, 1)] + Complex64::from_polar(0.6, 1.2)).norm() < 1e-15);
        assert!((m[(1, 3)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(2, 0)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(3, 5)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(4, 2)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(6, 4)] - cplx(1.0, 0.0)).norm() < 1e-15);
        let svals = singular_values(&m);
        assert!(svals.last().unwrap() <= &(1.0 + t.eps_structural));
        assert!(livsic_matrix(1.2, 0.0, 4, &t).is_err());
    }

    #[test]
    fn submatrix_identities() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(157);
        // no deletion returns the matrix itself
        let p = random_params(&mut rng, 6, 0.85);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        let s0 = submatrix_k(&tr, 0, &t).unwrap();
        assert_eq!(s0.section.max_abs_diff(tr.dense()), 0.0);
        assert!(!s0.transposed);
        // free pattern: deleting two rows/cols of the 6-dim shift gives the 4-dim shift
        let free6 = TruncatedCmv::from_params(&free_params(6, 0.0), &t).unwrap();
        let free4 = TruncatedCmv::from_params(&free_params(4, 0.0), &t).unwrap();
        let s2 = submatrix_k(&free6, 2, &t).unwrap();
        assert_eq!(s2.section.max_abs_diff(free4.dense()), 0.0);
        assert!(!s2.transposed);
        // odd deletions are transposes of the tail matrix
        let s1 = submatrix_k(&tr, 1, &t).unwrap();
        assert!(s1.transposed);
        assert_eq!(s1.section.max_abs_diff(&s1.tail.dense().transpose()), 0.0);
        // sanity on the tail parameters
        assert_eq!(s1.tail.params().order(), 5);
        assert!((s1.tail.params().alpha(0) - p.alpha(1)).norm() < 1e-15);
    }
}
