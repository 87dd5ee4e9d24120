//! Monic orthogonal polynomials on the unit circle: Szegő recursions in both
//! directions, Verblunsky coefficients, Khrushchev's parameter formula,
//! extensions with prescribed zeros, and trivial (finitely supported)
//! probability measures with their moment and Carathéodory data.

use crate::error::{Error, Result};
use crate::numkernel::{cluster, roots, star, Poly, Tolerances};
use crate::schurfun::{BlaschkeProduct, SchurParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One Szegő step `Φ_{n+1} = z Φ_n − conj(α) Φ_n*` without any domain check
/// on `α`. Monicity is preserved exactly.
pub(crate) fn szego_step_poly(phi: &Poly, alpha: Complex64) -> Poly {
    let n = phi.degree().expect("chain polynomials are nonzero");
    let ac = alpha.conj();
    let mut coeffs = Vec::with_capacity(n + 2);
    for k in 0..=n + 1 {
        let up = if k == 0 {
            cplx(0.0, 0.0)
        } else {
            phi.coeff(k - 1)
        };
        let st = if k <= n {
            phi.coeff(n - k).conj()
        } else {
            cplx(0.0, 0.0)
        };
        coeffs.push(up - ac * st);
    }
    // degree n+1 with leading coefficient exactly 1
    coeffs[n + 1] = cplx(1.0, 0.0);
    Poly::from_coeffs(coeffs, 0.0)
}

/// Chain Φ_0, Φ_1, … of monic orthogonal polynomials generated by the Szegő
/// recurrence from Verblunsky coefficients.
#[derive(Debug, Clone)]
pub struct MonicOpucChain {
    polys: Vec<Poly>,
    alphas: Vec<Complex64>,
}

impl Default for MonicOpucChain {
    fn default() -> Self {
        Self::new()
    }
}

impl MonicOpucChain {
    pub fn new() -> Self {
        MonicOpucChain {
            polys: vec![Poly::one()],
            alphas: Vec::new(),
        }
    }

    pub fn from_alphas(alphas: &[Complex64], tol: &Tolerances) -> Result<Self> {
        let mut chain = Self::new();
        for a in alphas {
            chain.extend(*a, tol)?;
        }
        Ok(chain)
    }

    /// Append `Φ_{n+1} = z Φ_n − conj(α_n) Φ_n*`.
    pub fn extend(&mut self, alpha: Complex64, tol: &Tolerances) -> Result<()> {
        if alpha.norm() >= 1.0 {
            return Err(Error::Argument(format!(
                "Verblunsky coefficient modulus {} must be < 1",
                alpha.norm()
            )));
        }
        let _ = tol;
        let next = szego_step_poly(self.top(), alpha);
        self.polys.push(next);
        self.alphas.push(alpha);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn phi(&self, k: usize) -> &Poly {
        &self.polys[k]
    }

    pub fn top(&self) -> &Poly {
        self.polys.last().expect("chain always holds Φ_0")
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn rho(&self, j: usize) -> f64 {
        (1.0 - self.alphas[j].norm_sqr()).max(0.0).sqrt()
    }
}

/// Inverse Szegő step: recover `α = −conj(Φ(0))` and
/// `Φ_prev = (Φ + conj(α) Φ*) / (ρ² z)`.
///
/// The constant term of the numerator vanishes identically (it is
/// `Φ(0) − Φ(0)`) and is removed by an index shift; the result is returned
/// exactly monic.
pub fn szego_down(phi: &Poly, tol: &Tolerances) -> Result<(Complex64, Poly)> {
    let deg = phi
        .degree()
        .ok_or_else(|| Error::Argument("szego_down: zero polynomial".into()))?;
    if deg < 1 {
        return Err(Error::Argument("szego_down: degree must be >= 1".into()));
    }
    if !phi.is_monic(tol.eps_structural * 10.0) {
        return Err(Error::Argument(format!(
            "szego_down: polynomial is not monic (leading {})",
            phi.leading()
        )));
    }
    let phi0 = phi.coeff(0);
    let alpha = -phi0.conj();
    if alpha.norm() >= 1.0 {
        return Err(Error::ZerosNotInDisk(format!(
            "szego_down: |Φ(0)| = {} >= 1, zeros cannot all lie inside the disk",
            phi0.norm()
        )));
    }
    let rho_sq = 1.0 - alpha.norm_sqr();
    let ac = alpha.conj();
    let mut coeffs = Vec::with_capacity(deg);
    for k in 0..deg {
        // numerator coefficient at z^{k+1}
        let v = phi.coeff(k + 1) + ac * phi.coeff(deg - 1 - k).conj();
        coeffs.push(v / rho_sq);
    }
    coeffs[deg - 1] = cplx(1.0, 0.0); // monic by the algebra
    Ok((alpha, Poly::from_coeffs(coeffs, 0.0)))
}

/// Verblunsky coefficients β_0..β_{n−1} of a monic polynomial with all zeros
/// inside the disk, by repeated inverse Szegő steps.
pub fn verblunsky_from_monic(p: &Poly, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Argument("verblunsky_from_monic: zero polynomial".into()))?;
    let mut betas = Vec::with_capacity(deg);
    let mut cur = p.clone();
    for _ in 0..deg {
        let (alpha, prev) = szego_down(&cur, tol)?;
        betas.push(alpha);
        cur = prev;
    }
    betas.reverse();
    Ok(betas)
}

/// Khrushchev's formula: the Schur parameters of `P/P*` are
/// `{−conj(β_{n−1}), …, −conj(β_0), 1}` where β are the Verblunsky
/// coefficients of `P`. Dual route to the Schur algorithm.
pub fn khrushchev_params(p: &Poly, tol: &Tolerances) -> Result<SchurParams> {
    let betas = verblunsky_from_monic(p, tol)?;
    let interior: Vec<Complex64> = betas.iter().rev().map(|b| -b.conj()).collect();
    SchurParams::finite(interior, cplx(1.0, 0.0), tol)
}

/// Unique one-point extension: the coefficient `α` with
/// `conj(α) = z₁ P(z₁) / P*(z₁)` making the Szegő successor vanish at `z₁`.
pub fn extend_one_zero(p: &Poly, z1: Complex64, tol: &Tolerances) -> Result<(Complex64, Poly)> {
    if z1.norm() >= 1.0 {
        return Err(Error::Argument(format!(
            "prescribed zero modulus {} must be < 1",
            z1.norm()
        )));
    }
    let deg = p
        .degree()
        .ok_or_else(|| Error::Argument("extend_one_zero: zero polynomial".into()))?;
    if p.coeff(0).norm() >= 1.0 && deg > 0 {
        return Err(Error::ZerosNotInDisk("extend_one_zero: |P(0)| >= 1".into()));
    }
    let pstar = star(p, deg)?;
    let denom = pstar.eval(z1);
    if denom.norm() == 0.0 {
        return Err(Error::Numeric(
            "extend_one_zero: P*(z1) = 0, zeros of P are not all inside the disk".into(),
        ));
    }
    let alpha = (z1 * p.eval(z1) / denom).conj();
    if alpha.norm() >= 1.0 - tol.eps_roots {
        return Err(Error::Numeric(format!(
            "extend_one_zero: computed coefficient modulus {} too close to the circle \
             (zeros of P too close to the boundary)",
            alpha.norm()
        )));
    }
    let q = szego_step_poly(p, alpha);
    let residual = q.eval(z1).norm();
    if residual > tol.eps_roots * q.max_coeff_norm().max(1.0) {
        return Err(Error::Numeric(format!(
            "extend_one_zero: extension residual {residual:.3e}"
        )));
    }
    Ok((alpha, q))
}

/// Multi-point extension: Verblunsky coefficients α_n..α_{n+m−1} making the
/// extended polynomial vanish at every prescribed point counting
/// multiplicity (derivative conditions at repeated points).
///
/// Damped Newton iteration on the residual vector, multi-started from the
/// zero vector and up to 32 seeded interior starts. Existence is guaranteed
/// by theory; a convergence failure is reported as a numeric
/// `ExistenceNotFound`, never as a disproof. Uniqueness is not claimed.
pub fn extend_zeros_numeric(
    p: &Poly,
    zs: &[Complex64],
    tol: &Tolerances,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if zs.is_empty() {
        return Ok(Vec::new());
    }
    for z in zs {
        if z.norm() >= 1.0 {
            return Err(Error::Argument(format!(
                "prescribed zero modulus {} must be < 1",
                z.norm()
            )));
        }
    }
    if zs.len() == 1 {
        let (alpha, _) = extend_one_zero(p, zs[0], tol)?;
        return Ok(vec![alpha]);
    }
    let m = zs.len();
    let targets = cluster(zs, tol.eps_roots);

    let residual = |u: &[f64]| -> Option<Vec<f64>> {
        let mut cur = p.clone();
        for j in 0..m {
            let a = cplx(u[2 * j], u[2 * j + 1]);
            if a.norm() >= 1.0 {
                return None;
            }
            cur = szego_step_poly(&cur, a);
        }
        let mut r = Vec::with_capacity(2 * m);
        for (z, mult) in &targets {
            let mut fact = 1.0;
            for j in 0..*mult {
                if j > 1 {
                    fact *= j as f64;
                }
                let v = cur.eval_derivative(*z, j) / fact;
                r.push(v.re);
                r.push(v.im);
            }
        }
        Some(r)
    };

    let norm_inf = |r: &[f64]| r.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; 2 * m]];
    for _ in 0..32 {
        let mut s = Vec::with_capacity(2 * m);
        for _ in 0..m {
            let c = Complex64::from_polar(
                rng.random_range(0.0..0.6),
                rng.random_range(0.0..std::f64::consts::TAU),
            );
            s.push(c.re);
            s.push(c.im);
        }
        starts.push(s);
    }

    let tolerance = tol.eps_roots;
    for start in starts {
        let mut u = start;
        let mut r = match residual(&u) {
            Some(r) => r,
            None => continue,
        };
        let mut converged = false;
        for _iter in 0..80 {
            if norm_inf(&r) <= tolerance {
                converged = true;
                break;
            }
            // forward-difference Jacobian
            let dim = 2 * m;
            let h = 1e-7;
            let mut jac = vec![vec![0.0_f64; dim]; dim];
            let mut ok = true;
            for col in 0..dim {
                let mut up = u.clone();
                up[col] += h;
                match residual(&up) {
                    Some(rp) => {
                        for row in 0..dim {
                            jac[row][col] = (rp[row] - r[row]) / h;
                        }
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let step = match real_solve(&jac, &rhs) {
                Some(s) => s,
                None => break,
            };
            // damped update with projection into the open disk
            let mut accepted = false;
            let mut lambda = 1.0_f64;
            for _ in 0..12 {
                let mut cand: Vec<f64> =
                    u.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
                for j in 0..m {
                    let a = cplx(cand[2 * j], cand[2 * j + 1]);
                    if a.norm() > 0.995 {
                        let pr = a / a.norm() * 0.995;
                        cand[2 * j] = pr.re;
                        cand[2 * j + 1] = pr.im;
                    }
                }
                if let Some(rc) = residual(&cand) {
                    if norm_inf(&rc) < norm_inf(&r) {
                        u = cand;
                        r = rc;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if converged || norm_inf(&r) <= tolerance {
            let alphas: Vec<Complex64> = (0..m).map(|j| cplx(u[2 * j], u[2 * j + 1])).collect();
            if alphas.iter().all(|a| a.norm() <= 1.0 - tol.eps_roots) {
                return Ok(alphas);
            }
        }
    }
    Err(Error::ExistenceNotFound(format!(
        "extension through {m} prescribed zeros did not converge from any start \
         (existence is guaranteed; this is a numeric failure)"
    )))
}

fn real_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let (piv_row, piv) = (k..n)
            .map(|i| (i, m[i][k].abs()))
            .max_by(|p, q| p.1.partial_cmp(&q.1).unwrap())?;
        if piv < 1e-300 {
            return None;
        }
        m.swap(k, piv_row);
        x.swap(k, piv_row);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            let (head, tail) = m.split_at_mut(i);
            for (rij, rkj) in tail[0][k..].iter_mut().zip(&head[k][k..]) {
                *rij -= f * rkj;
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            x[i] -= m[i][j] * x[j];
        }
        x[i] /= m[i][i];
        if !x[i].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Build a Blaschke product of order `n + m` whose Schur parameters end with
/// the prescribed `alphas` followed by the unimodular `gamma`, and which
/// vanishes at every point of `zs` counting multiplicity.
///
/// Constructive route: seed the Szegő chain with `β_k = −γ conj(α_{n−k−1})`,
/// extend through the prescribed zeros, and return `γ · Φ/Φ*` in
/// (phase, zeros) form.
pub fn blaschke_with_prescribed_tail(
    alphas: &[Complex64],
    zs: &[Complex64],
    gamma: Complex64,
    tol: &Tolerances,
    seed: u64,
) -> Result<BlaschkeProduct> {
    if (gamma.norm() - 1.0).abs() > tol.eps_roots {
        return Err(Error::Argument(format!(
            "gamma must be unimodular, got modulus {}",
            gamma.norm()
        )));
    }
    let gamma = gamma / gamma.norm();
    let n = alphas.len();
    let betas: Vec<Complex64> = (0..n).map(|k| -gamma * alphas[n - k - 1].conj()).collect();
    let mut chain = MonicOpucChain::from_alphas(&betas, tol)?;
    let ext = extend_zeros_numeric(chain.top(), zs, tol, seed)?;
    for a in &ext {
        chain.extend(*a, tol)?;
    }
    let zeros = if chain.top().degree() == Some(0) {
        Vec::new()
    } else {
        roots(chain.top(), tol)?
    };
    let b = BlaschkeProduct::new(gamma.arg(), zeros, tol)?;
    for z in zs {
        let v = b.eval(*z).norm();
        if v > tol.eps_roots * 100.0 {
            return Err(Error::Numeric(format!(
                "constructed product fails to vanish at a prescribed zero: |b(z)| = {v:.3e}"
            )));
        }
    }
    Ok(b)
}

// ---------------------------------------------------------------------------
// Trivial measures
// ---------------------------------------------------------------------------

/// Probability measure supported on finitely many points of the unit circle.
/// Support points are stored radially projected onto the circle and weights
/// renormalized to sum to one, so `F(0) = 1` holds by construction.
#[derive(Debug, Clone)]
pub struct TrivialMeasure {
    support: Vec<Complex64>,
    weights: Vec<f64>,
}

impl TrivialMeasure {
    pub fn new(support: Vec<Complex64>, weights: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::Argument(
                "measure needs equally many support points and weights".into(),
            ));
        }
        let mut proj = Vec::with_capacity(support.len());
        for z in &support {
            let r = z.norm();
            if (r - 1.0).abs() > tol.eps_roots {
                return Err(Error::Argument(format!(
                    "support point modulus {r} is not within eps_roots of the circle"
                )));
            }
            proj.push(z / r);
        }
        for i in 0..proj.len() {
            for j in i + 1..proj.len() {
                if (proj[i] - proj[j]).norm() <= tol.eps_roots {
                    return Err(Error::Argument(
                        "support points must be pairwise distinct beyond eps_roots".into(),
                    ));
                }
            }
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w <= 0.0) {
            return Err(Error::Argument("weights must be positive".into()));
        }
        if (sum - 1.0).abs() > tol.eps_roots {
            return Err(Error::Argument(format!(
                "weights sum to {sum}, not within eps_roots of 1"
            )));
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Ok(TrivialMeasure {
            support: proj,
            weights,
        })
    }

    pub fn support(&self) -> &[Complex64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Moment `β_n = Σ μ_k ζ_k^{−n}`.
    pub fn moment(&self, n: i32) -> Complex64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| z.powi(-n) * *w)
            .sum()
    }

    /// `F(z) = Σ μ_k (ζ_k + z)/(ζ_k − z)` for `|z| < 1`.
    pub fn caratheodory_eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::Argument("caratheodory_eval requires |z| < 1".into()));
        }
        Ok(self
            .support
            .iter()
            .zip(&self.weights)
            .map(|(zk, w)| (zk + z) / (zk - z) * *w)
            .sum())
    }

    /// Discrete inner product `Σ μ_k f(ζ_k) conj(g(ζ_k))`.
    pub fn inner(&self, f: &Poly, g: &Poly) -> Complex64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| f.eval(*z) * g.eval(*z).conj() * *w)
            .sum()
    }
}

/// Spectral measure of a finite Blaschke product: the trivial measure whose
/// Schur function the product is.
///
/// Support points are the roots of `e^{iφ} z P(z) − P*(z)` (all on the
/// circle), weights come from the residues `μ_k = −1/(ζ_k g'(ζ_k))` of the
/// Carathéodory function, with `g(z) = 1 − z b(z)`. Positivity and unit sum
/// are verified, then the weights are renormalized exactly.
pub fn measure_from_blaschke(b: &BlaschkeProduct, tol: &Tolerances) -> Result<TrivialMeasure> {
    let n = b.order();
    let p = b.numerator();
    let pstar = star(&p, n)?;
    let q = p.shift_up(1).scale(b.phase_factor()).sub(&pstar);
    let support_raw = roots(&q, tol)?;
    let mut support = Vec::with_capacity(n + 1);
    for z in &support_raw {
        let r = z.norm();
        if (r - 1.0).abs() > tol.eps_roots {
            return Err(Error::InternalConsistency(format!(
                "support root modulus {r} is off the circle"
            )));
        }
        support.push(z / r);
    }
    let mut weights = Vec::with_capacity(n + 1);
    for zk in &support {
        // g'(ζ) = −(b(ζ) + ζ b'(ζ));  μ = −1/(ζ g'(ζ))
        let gp = -(b.eval(*zk) + zk * b.eval_derivative(*zk));
        let mu = -(cplx(1.0, 0.0) / (zk * gp));
        if mu.im.abs() > tol.eps_roots * 10.0 {
            return Err(Error::InternalConsistency(format!(
                "weight has imaginary residue {:.3e}",
                mu.im
            )));
        }
        if mu.re <= 0.0 {
            return Err(Error::InternalConsistency(format!(
                "nonpositive weight {:.3e}",
                mu.re
            )));
        }
        weights.push(mu.re);
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > tol.eps_roots {
        return Err(Error::InternalConsistency(format!(
            "weights sum to {sum}, not within eps_roots of 1"
        )));
    }
    TrivialMeasure::new(support, weights, tol)
}

/// Verblunsky coefficients α_0..α_{N−2} of a trivial measure with N support
/// points, by Gram–Schmidt of the monomials under the discrete inner
/// product. Also verifies the norm identity `‖Φ_n‖ = ∏_{j<n} ρ_j`.
pub fn verblunsky_from_measure(mu: &TrivialMeasure, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let n = mu.len();
    if n < 2 {
        return Err(Error::Argument(
            "verblunsky_from_measure needs at least two support points".into(),
        ));
    }
    let mut phis: Vec<Poly> = vec![Poly::one()];
    let mut norms_sq: Vec<f64> = vec![mu.inner(&Poly::one(), &Poly::one()).re];
    for k in 0..n - 1 {
        let mut next = phis[k].shift_up(1);
        // orthogonalize twice against all previous polynomials
        for _pass in 0..2 {
            for (j, phi_j) in phis.iter().enumerate() {
                let c = mu.inner(&next, phi_j) / norms_sq[j];
                next = next.sub(&phi_j.scale(c));
            }
        }
        let nsq = mu.inner(&next, &next).re;
        if nsq <= 1e-28 {
            return Err(Error::MeasureDegenerate(format!(
                "Gram matrix numerically singular at step {k}"
            )));
        }
        phis.push(next);
        norms_sq.push(nsq);
    }
    let alphas: Vec<Complex64> = (0..n - 1).map(|k| -phis[k + 1].coeff(0).conj()).collect();
    // norm identity check
    let mut prod = 1.0_f64;
    for (k, alpha) in alphas.iter().enumerate() {
        prod *= (1.0 - alpha.norm_sqr()).max(0.0).sqrt();
        let norm = norms_sq[k + 1].sqrt();
        if (norm - prod).abs() > tol.eps_roots * (1.0 + prod) {
            return Err(Error::InternalConsistency(format!(
                "norm identity fails at degree {}: ‖Φ‖ = {norm}, ∏ρ = {prod}",
                k + 1
            )));
        }
    }
    Ok(alphas)
}
