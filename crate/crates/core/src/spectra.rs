//! Direct spectral analysis of truncated CMV matrices: eigenvalues with
//! multiplicity clustering, evaluation of the characteristic (Schur)
//! function through the resolvent of the bordered unitary parent, the
//! characteristic-polynomial identity for principal blocks, and the
//! submatrix ↔ Schur-iterate cross-check.

use crate::cmv::{assemble_cmv, submatrix_k, CmvMatrix, TruncatedCmv};
use crate::error::{Error, Result};
use crate::numkernel::{char_poly, cluster, eig, solve, Poly, Tolerances};
use crate::opuc::szego_step_poly;
use crate::schurfun::{
    blaschke_from_schur_params, interior_sample_points, schur_step, RationalSchur,
};
use num_complex::Complex64;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Spectrum of a contraction, with residual estimates and multiplicity
/// clustering at the `eps_roots` radius.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Eigenvalues counting multiplicity, each with its inverse-iteration
    /// residual `‖(T − λI)v‖`.
    pub eigenvalues: Vec<(Complex64, f64)>,
    /// Whether every eigenvalue modulus is at most `1 + eps_roots`.
    pub all_in_disk: bool,
    /// Clustered (value, multiplicity) pairs, sorted by real then imaginary
    /// part.
    pub clustered: Vec<(Complex64, usize)>,
}

/// Eigenvalues of a truncated CMV matrix. For the finite case all of them
/// lie in the open disk (they are the zeros of the order-N characteristic
/// Blaschke product).
pub fn spectrum(t: &TruncatedCmv, tol: &Tolerances) -> Result<SpectrumResult> {
    spectrum_of_dense(t.dense(), tol)
}

/// Spectrum of an arbitrary square matrix with the same clustering
/// conventions.
pub fn spectrum_of_dense(
    m: &crate::numkernel::ComplexMatrix,
    tol: &Tolerances,
) -> Result<SpectrumResult> {
    let res = eig(m, tol)?;
    let all_in_disk = res.values.iter().all(|v| v.norm() <= 1.0 + tol.eps_roots);
    let clustered = cluster(&res.values, tol.eps_roots);
    Ok(SpectrumResult {
        eigenvalues: res.values.into_iter().zip(res.residuals).collect(),
        all_in_disk,
        clustered,
    })
}

/// Characteristic (Schur) function of the truncated matrix, evaluated via
/// the parent CMV resolvent:
/// `F(z) = ⟨(C + zI)(C − zI)^{−1} δ_0, δ_0⟩`, `f(z) = (F − 1)/(z (F + 1))`.
///
/// One linear solve per point. `z = 0` is the removable singularity and
/// returns the first Schur parameter directly.
pub fn charfun_schur(c: &CmvMatrix, z: Complex64, tol: &Tolerances) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::Argument("charfun_schur requires |z| < 1".into()));
    }
    if z.norm() == 0.0 {
        return Ok(c.params().alpha(0));
    }
    let n = c.dim();
    let mut shifted = c.dense().clone();
    for i in 0..n {
        shifted[(i, i)] -= z;
    }
    let mut delta0 = vec![cplx(0.0, 0.0); n];
    delta0[0] = cplx(1.0, 0.0);
    let x = solve(&shifted, &delta0, tol)
        .map_err(|e| Error::Numeric(format!("resolvent solve failed: {e}")))?;
    // F = ⟨(C + zI) x, δ_0⟩ = (C x)_0 + z x_0
    let cx0: Complex64 = c.dense().row(0).iter().zip(&x).map(|(a, b)| a * b).sum();
    let f_big = cx0 + z * x[0];
    Ok((f_big - cplx(1.0, 0.0)) / (z * (f_big + cplx(1.0, 0.0))))
}

/// Report of the characteristic-polynomial identity on a principal block.
#[derive(Debug, Clone)]
pub struct CharPolyReport {
    /// `det(zI_n − C^{(n)})` interpolated from determinant evaluations.
    pub determinant_route: Poly,
    /// The monic polynomial replayed by the Szegő recurrence from the stored
    /// parameters.
    pub recurrence_route: Poly,
    pub max_coeff_gap: f64,
}

/// Compare `det(zI_n − C^{(n)})` of the principal `n×n` block against the
/// degree-`n` monic polynomial of the Szegő recurrence.
///
/// The determinant route interpolates at roots of unity (one LU pass per
/// point); `n` may run up to the full dimension, in which case the terminal
/// parameter enters the final recurrence step.
pub fn charpoly_check(c: &CmvMatrix, n: usize, tol: &Tolerances) -> Result<CharPolyReport> {
    if n < 1 || n > c.dim() {
        return Err(Error::Argument(format!(
            "principal block size {n} must lie in 1..={}",
            c.dim()
        )));
    }
    let block = c.dense().principal(n);
    let determinant_route = char_poly(&block);
    let mut phi = Poly::one();
    for j in 0..n {
        phi = szego_step_poly(&phi, c.params().alpha(j));
    }
    let max_coeff_gap = determinant_route.max_coeff_diff(&phi);
    let _ = tol;
    Ok(CharPolyReport {
        determinant_route,
        recurrence_route: phi,
        max_coeff_gap,
    })
}

/// Report of the submatrix ↔ Schur-iterate comparison.
#[derive(Debug, Clone)]
pub struct IterateCheckReport {
    pub max_gap: f64,
    pub samples: usize,
}

/// Compare the characteristic function of the `k`-fold submatrix (rebuilt
/// through its own bordered parent from the parameter tail) against the
/// `k`-th Schur iterate of the characteristic function of `t`, at
/// `sample_count` interior points.
pub fn schur_iterate_check(
    t: &TruncatedCmv,
    k: usize,
    sample_count: usize,
    tol: &Tolerances,
) -> Result<IterateCheckReport> {
    if k >= t.dim() {
        return Err(Error::Argument(format!(
            "iterate index {k} must be below the dimension {}",
            t.dim()
        )));
    }
    let sub = submatrix_k(t, k, tol)?;
    let parent_tail = assemble_cmv(sub.tail.params(), tol)?;

    // route A: resolvent of the rebuilt tail parent
    // route B: k Schur-algorithm steps on the synthesized characteristic function
    let b = blaschke_from_schur_params(t.params(), tol)?;
    let mut iter: RationalSchur = b.to_rational();
    for _ in 0..k {
        let (_, next) = schur_step(&iter, tol)?;
        iter = next;
    }
    let mut max_gap = 0.0_f64;
    for z in interior_sample_points(sample_count) {
        let via_matrix = charfun_schur(&parent_tail, z, tol)?;
        let via_iterate = iter.eval(z);
        max_gap = max_gap.max((via_matrix - via_iterate).norm());
    }
    Ok(IterateCheckReport {
        max_gap,
        samples: sample_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmv::TruncatedCmv;
    use crate::schurfun::SchurParams;
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
    fn spectrum_of_shift_pattern_is_zero() {
        let t = tol();
        let tr = TruncatedCmv::from_params(&free_params(5, 0.9), &t).unwrap();
        let s = spectrum(&tr, &t).unwrap();
        assert_eq!(s.eigenvalues.len(), 5);
        assert!(s.all_in_disk);
        assert_eq!(s.clustered.len(), 1);
        assert_eq!(s.clustered[0].1, 5);
        assert!(s.clustered[0].0.norm() <= t.eps_roots);
    }

    #[test]
    fn spectrum_of_scalar_case() {
        let t = tol();
        let a = cplx(0.3, -0.2);
        // parameters (−a; 1) give the 1×1 matrix (a)
        let p = SchurParams::finite(vec![-a], cplx(1.0, 0.0), &t).unwrap();
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        assert!((tr.dense()[(0, 0)] - a).norm() < 1e-15);
        let s = spectrum(&tr, &t).unwrap();
        assert!((s.eigenvalues[0].0 - a).norm() < 1e-12);
    }

    #[test]
    fn spectrum_matches_blaschke_zeros() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(211);
        let p = random_params(&mut rng, 8, 0.85);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        let s = spectrum(&tr, &t).unwrap();
        let b = blaschke_from_schur_params(&p, &t).unwrap();
        let mut used = [false; 8];
        for (lam, _) in &s.eigenvalues {
            let (best, dist) = b
                .zeros()
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, z)| (i, (z - lam).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            used[best] = true;
            assert!(dist <= t.eps_roots * 100.0, "eigenvalue/zero gap {dist}");
        }
        // multiplicity conservation and modulus product
        let total: usize = s.clustered.iter().map(|(_, m)| m).sum();
        assert_eq!(total, 8);
        let prod: f64 = s.eigenvalues.iter().map(|(v, _)| v.norm()).product();
        assert!((prod - p.alpha(0).norm()).abs() <= t.eps_roots * 10.0);
    }

    #[test]
    fn charfun_of_free_params_is_scaled_monomial() {
        let t = tol();
        let phi = 1.4;
        let c = assemble_cmv(&free_params(4, phi), &t).unwrap();
        for z in interior_sample_points(8) {
            let f = charfun_schur(&c, z, &t).unwrap();
            let expect = Complex64::from_polar(1.0, phi) * z * z * z * z;
            assert!((f - expect).norm() < 1e-11, "gap {}", (f - expect).norm());
        }
    }

    #[test]
    fn charfun_limit_at_origin_is_first_parameter() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(223);
        let p = random_params(&mut rng, 5, 0.9);
        let c = assemble_cmv(&p, &t).unwrap();
        let v = charfun_schur(&c, cplx(0.0, 0.0), &t).unwrap();
        assert_eq!(v, p.alpha(0));
        // continuity: small z agrees with the limit
        let near = charfun_schur(&c, cplx(1e-6, -1e-6), &t).unwrap();
        assert!((near - v).norm() < 1e-5);
    }

    #[test]
    fn charfun_agrees_with_synthesis() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(227);
        for n in [1usize, 3, 6, 10] {
            let p = random_params(&mut rng, n, 0.85);
            let c = assemble_cmv(&p, &t).unwrap();
            let b = blaschke_from_schur_params(&p, &t).unwrap();
            for z in interior_sample_points(16) {
                let via_resolvent = charfun_schur(&c, z, &t).unwrap();
                let via_product = b.eval(z);
                let gap = (via_resolvent - via_product).norm();
                assert!(gap <= t.eps_roots, "gap {gap} at n = {n}");
                assert!(via_resolvent.norm() <= 1.0 + t.eps_roots);
            }
        }
    }

    #[test]
    fn charpoly_identity_examples() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(229);
        let p = random_params(&mut rng, 6, 0.9);
        let c = assemble_cmv(&p, &t).unwrap();
        // n = 1: z − conj(α_0)
        let rep = charpoly_check(&c, 1, &t).unwrap();
        let expect = Poly::new(vec![-p.alpha(0).conj(), cplx(1.0, 0.0)]);
        assert!(rep.determinant_route.max_coeff_diff(&expect) < 1e-12);
        assert!(rep.max_coeff_gap < 1e-12);
        // free case: z^n
        let cf = assemble_cmv(&free_params(5, 0.7), &t).unwrap();
        for n in 1..=5 {
            let rep = charpoly_check(&cf, n, &t).unwrap();
            assert!(rep.determinant_route.max_coeff_diff(&Poly::monomial(n)) < 1e-12);
        }
        // random blocks up to the full dimension
        for n in 1..=7 {
            let rep = charpoly_check(&c, n, &t).unwrap();
            assert!(
                rep.max_coeff_gap <= t.eps_roots,
                "gap {}",
                rep.max_coeff_gap
            );
        }
    }

    #[test]
    fn schur_iterate_zeroth_is_identity() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(233);
        let p = random_params(&mut rng, 5, 0.85);
        let tr = TruncatedCmv::from_params(&p, &t).unwrap();
        let rep = schur_iterate_check(&tr, 0, 8, &t).unwrap();
        assert!(rep.max_gap <= t.eps_roots);
    }

    #[test]
    fn schur_iterates_of_free_params_drop_monomials() {
        let t = tol();
        let tr = TruncatedCmv::from_params(&free_params(6, 0.0), &t).unwrap();
        for k in 1..=3 {
            let rep = schur_iterate_check(&tr, k, 8, &t).unwrap();
            assert!(rep.max_gap <= t.eps_roots, "k = {k}: gap {}", rep.max_gap);
        }
    }

    #[test]
    fn schur_iterate_matches_submatrix_round() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(239);
        for _ in 0..6 {
            let n = rng.random_range(4..=9);
            let p = random_params(&mut rng, n, 0.85);
            let tr = TruncatedCmv::from_params(&p, &t).unwrap();
            for k in 1..=3.min(n - 1) {
                let rep = schur_iterate_check(&tr, k, 16, &t).unwrap();
                assert!(rep.max_gap <= t.eps_roots, "k = {k}: gap {}", rep.max_gap);
            }
        }
    }
}
