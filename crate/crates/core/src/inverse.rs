//! Inverse spectral solvers for finite truncated CMV matrices:
//! reconstruction from the full spectrum, from a partial spectrum plus the
//! first parameters (unique when it exists), from a partial spectrum plus
//! the last parameters (existence by construction), the zero-eigenvalue
//! case analysis, and the boundary summability report for semi-infinite
//! candidate spectra.
//!
//! Every solver re-verifies its output against the stated spectral and
//! parameter data before returning; numerical validation failures surface as
//! `NoSolution` reports, never as silently wrong matrices.

use crate::cmv::{params_from_truncated, TruncatedCmv};
use crate::error::{Error, Result};
use crate::numkernel::{eig_hermitian, roots, ComplexMatrix, Poly, Tolerances};
use crate::opuc::{blaschke_with_prescribed_tail, verblunsky_from_monic};
use crate::schurfun::{
    schur_params_of_blaschke, schur_prefix, unit_circle_points, wall_pair, RationalSchur,
    SchurParams,
};
use crate::spectra::spectrum;
use num_complex::Complex64;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Validation threshold for solver postconditions: two orders looser than
/// `eps_roots` to absorb eigenvalue conditioning, still far below any
/// acceptance tolerance a caller would use.
fn validation_tol(tol: &Tolerances) -> f64 {
    tol.eps_roots * 100.0
}

/// Greedy multiset match: for each target point (with multiplicity) take the
/// nearest unused computed value; returns the largest matched distance.
fn match_multiset(targets: &[(Complex64, usize)], computed: &[Complex64]) -> f64 {
    let mut used = vec![false; computed.len()];
    let mut worst = 0.0_f64;
    for (z, mult) in targets {
        for _ in 0..*mult {
            let best = computed
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, v)| (i, (v - z).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            match best {
                Some((i, d)) => {
                    used[i] = true;
                    worst = worst.max(d);
                }
                None => return f64::INFINITY,
            }
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Full-spectrum reconstruction
// ---------------------------------------------------------------------------

/// Result of a full-spectrum reconstruction, with the verification residual
/// and any conditioning warnings.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub matrix: TruncatedCmv,
    /// Largest distance between a prescribed eigenvalue and its matched
    /// computed eigenvalue.
    pub spectrum_residual: f64,
    pub warnings: Vec<String>,
}

/// Build the `N×N` truncated CMV matrix with the prescribed eigenvalue
/// multiset (counting algebraic multiplicity) and phase convention.
///
/// The characteristic function is forced to be
/// `e^{iφ} ∏ (z − z_k)/(1 − conj(z_k) z)`; its parameters come from the
/// inverse Szegő recursion on `∏(z − z_k)` through the Khrushchev pattern,
/// scaled by `e^{iφ}`. Different phases give the unitarily equivalent
/// one-parameter family related by the diagonal rotation conjugation.
pub fn reconstruct_from_spectrum(
    zs: &[Complex64],
    phase: f64,
    tol: &Tolerances,
) -> Result<Reconstruction> {
    let n = zs.len();
    if n == 0 {
        return Err(Error::Argument(
            "reconstruction needs at least one eigenvalue".into(),
        ));
    }
    for z in zs {
        if z.norm() >= 1.0 {
            return Err(Error::Argument(format!(
                "eigenvalue modulus {} must be < 1",
                z.norm()
            )));
        }
    }
    let mut warnings = Vec::new();
    let closest = zs.iter().map(|z| 1.0 - z.norm()).fold(f64::INFINITY, f64::min);
    if closest < 1e-3 {
        warnings.push(format!(
            "eigenvalues within {closest:.2e} of the circle: reconstruction is ill-conditioned"
        ));
    }
    let p = Poly::from_roots(zs);
    let betas = verblunsky_from_monic(&p, tol)?;
    let factor = Complex64::from_polar(1.0, phase);
    let interior: Vec<Complex64> = betas.iter().rev().map(|b| -b.conj() * factor).collect();
    let params = SchurParams::finite(interior, factor, tol)?;
    let matrix = TruncatedCmv::from_params(&params, tol)?;
    let spec = spectrum(&matrix, tol)?;
    let computed: Vec<Complex64> = spec.eigenvalues.iter().map(|(v, _)| *v).collect();
    let targets: Vec<(Complex64, usize)> = zs.iter().map(|z| (*z, 1usize)).collect();
    let spectrum_residual = match_multiset(&targets, &computed);
    if spectrum_residual > tol.eps_roots {
        warnings.push(format!(
            "spectrum round-trip residual {spectrum_residual:.2e} exceeds eps_roots \
             (clustered or near-boundary eigenvalues)"
        ));
    }
    Ok(Reconstruction {
        matrix,
        spectrum_residual,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Mixed data: spectrum + first parameters
// ---------------------------------------------------------------------------

/// Partial spectrum (values with algebraic multiplicities) together with the
/// leading parameters `α_0, α_1, …` of the matrix to be reconstructed.
///
/// For a zero-free spectrum of total multiplicity `r`, the uniqueness format
/// prescribes exactly `N − r + 1` parameters. When the spectrum contains 0
/// with multiplicity `k`, the zero factor is stripped first, so well-posed
/// data carries `k` more parameters (`α_0..α_{N−r+k}`); shorter lists are
/// accepted and produce a solution family.
#[derive(Debug, Clone)]
pub struct MixedFirstData {
    pub eigen: Vec<(Complex64, usize)>,
    pub first_params: Vec<Complex64>,
    pub n: usize,
}

impl MixedFirstData {
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Argument("target dimension must be >= 1".into()));
        }
        let total: usize = self.eigen.iter().map(|(_, m)| m).sum();
        if total == 0 || total > self.n {
            return Err(Error::Argument(format!(
                "total eigenvalue multiplicity {total} must lie in 1..={}",
                self.n
            )));
        }
        for (z, m) in &self.eigen {
            if z.norm() >= 1.0 {
                return Err(Error::Argument(format!(
                    "eigenvalue modulus {} must be < 1",
                    z.norm()
                )));
            }
            if *m == 0 {
                return Err(Error::Argument("multiplicities must be positive".into()));
            }
        }
        if self.first_params.is_empty() || self.first_params.len() > self.n {
            return Err(Error::Argument(format!(
                "prescribed parameter count {} must lie in 1..={}",
                self.first_params.len(),
                self.n
            )));
        }
        for a in &self.first_params {
            if a.norm() >= 1.0 {
                return Err(Error::Argument(format!(
                    "prescribed parameter modulus {} must be < 1",
                    a.norm()
                )));
            }
        }
        let _ = tol;
        Ok(())
    }

    fn zero_multiplicity(&self, tol: &Tolerances) -> usize {
        self.eigen
            .iter()
            .filter(|(z, _)| z.norm() <= tol.eps_roots)
            .map(|(_, m)| m)
            .sum()
    }
}

/// Solution of the mixed-first problem with its verification residuals.
#[derive(Debug, Clone)]
pub struct MixedFirstSolution {
    pub matrix: TruncatedCmv,
    /// Largest distance between a prescribed eigenvalue and a matched
    /// eigenvalue of the returned matrix.
    pub spectrum_residual: f64,
}

/// Reported obstruction when no matrix matches the data.
#[derive(Debug, Clone)]
pub struct NoSolutionReport {
    pub reason: String,
}

/// Description of an infinite solution family (zero-eigenvalue
/// under-determined cases).
#[derive(Debug, Clone)]
pub struct FamilyDescriptor {
    /// Forced leading zero parameters.
    pub zero_prefix: usize,
    /// Prescribed parameters after the zero prefix.
    pub known_interior: Vec<Complex64>,
    /// Number of free interior parameters (each ranging over the open disk).
    pub free_interior: usize,
    /// Whether the unimodular terminal parameter is free.
    pub free_terminal: bool,
    /// Open condition on the family, when one applies.
    pub open_condition: Option<String>,
    pub note: String,
}

#[derive(Debug, Clone)]
pub enum MixedFirstOutcome {
    Unique(Box<MixedFirstSolution>),
    NoSolution(NoSolutionReport),
    Family(Box<FamilyDescriptor>),
}

/// Reconstruct a truncated CMV matrix from a partial spectrum and its first
/// parameters. Unique when it exists; validation failures return
/// `NoSolution` (a numerical finding, not a nonexistence proof).
///
/// Nonzero eigenvalues only on this path; data containing 0 routes to
/// [`mixed_first_zero_reduction`].
pub fn mixed_first(d: &MixedFirstData, tol: &Tolerances) -> Result<MixedFirstOutcome> {
    d.validate(tol)?;
    if d.zero_multiplicity(tol) > 0 {
        return mixed_first_zero_reduction(d, tol);
    }
    let r: usize = d.eigen.iter().map(|(_, m)| m).sum();
    let need = d.n - r + 1;
    if d.first_params.len() < need {
        // each completion of the missing leading parameters poses its own
        // interpolation problem; the terminal is pinned by that solve
        return Ok(MixedFirstOutcome::Family(Box::new(FamilyDescriptor {
            zero_prefix: 0,
            known_interior: d.first_params.clone(),
            free_interior: need - d.first_params.len(),
            free_terminal: false,
            open_condition: Some(
                "the eigenvalue conditions must remain solvable for each choice of \
                 the free parameters; the family is not parametrized and may be empty"
                    .into(),
            ),
            note: format!(
                "under-determined: {} parameters prescribed where the uniqueness \
                 format needs {need}",
                d.first_params.len()
            ),
        })));
    }
    let outcome = solve_mixed_first_core(&d.eigen, &d.first_params[..need], d.n, tol)?;
    if d.first_params.len() > need {
        // over-determined: the surplus parameters must match the solution
        if let MixedFirstOutcome::Unique(sol) = &outcome {
            let params = sol.matrix.params();
            for (j, a) in d.first_params.iter().enumerate().skip(need) {
                if (params.alpha(j) - a).norm() > validation_tol(tol) {
                    return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                        reason: format!(
                            "surplus prescribed parameter α_{j} disagrees with the \
                             unique solution determined by the first {need}"
                        ),
                    }));
                }
            }
        }
    }
    Ok(outcome)
}

/// Core solver for distinct-or-multiple *nonzero* eigenvalues and exactly
/// `N − r + 1` prescribed parameters.
///
/// The parameter function `s` of the unknown tail must satisfy the
/// interpolation conditions `s(z_k) = −A(z_k)/(z_k B*(z_k))` (derivative
/// conditions at multiple nodes) where (A, B) is the Wall pair of the given
/// parameters; the unique candidate of order `r − 1` comes from the null
/// vector of the derivative-augmented Pick matrix, and is only accepted
/// after the synthesized matrix reproduces the prescribed data.
fn solve_mixed_first_core(
    eigen: &[(Complex64, usize)],
    first_params: &[Complex64],
    n: usize,
    tol: &Tolerances,
) -> Result<MixedFirstOutcome> {
    let r: usize = eigen.iter().map(|(_, m)| m).sum();
    for (_, m) in eigen {
        if *m > 3 {
            return Err(Error::Capability(format!(
                "eigenvalue multiplicity {m} exceeds the supported derivative \
                 augmentation (max 3)"
            )));
        }
    }
    let wall = wall_pair(first_params, tol)?;
    let v_poly = wall.b_star().shift_up(1); // z B*(z)

    // Taylor jets of s at each node: jets[k][i] = s^{(i)}(z_k) / i!
    let mut jets: Vec<Vec<Complex64>> = Vec::with_capacity(eigen.len());
    for (z, mult) in eigen {
        let v0 = v_poly.eval(*z);
        if v0.norm() <= 1e-12 * v_poly.max_coeff_norm().max(1.0) {
            return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                reason: format!(
                    "degenerate interpolation node: z B*(z) vanishes at z = {z} \
                     within working precision"
                ),
            }));
        }
        let mut derivs: Vec<Complex64> = Vec::with_capacity(*mult); // s^{(j)}(z_k)
        for j in 0..*mult {
            // (A + V s)^{(j)}(z_k) = 0
            let mut acc = wall.a().eval_derivative(*z, j);
            for (i, sder) in derivs.iter().enumerate() {
                acc += binomial(j, i) * v_poly.eval_derivative(*z, j - i) * sder;
            }
            derivs.push(-acc / v0);
        }
        let mut fact = 1.0_f64;
        let jet: Vec<Complex64> = derivs
            .iter()
            .enumerate()
            .map(|(i, d)| {
                if i > 1 {
                    fact *= i as f64;
                }
                d / fact
            })
            .collect();
        jets.push(jet);
    }

    // derivative-augmented Pick matrix. Kernel entries are O(1) and larger;
    // flooring the threshold scale at 1 keeps the eigenvalue classification
    // meaningful when the whole matrix is near zero (fully degenerate data).
    let pick = build_pick_matrix(eigen, &jets);
    let scale = pick.max_abs().max(1.0);
    let (vals, vecs) = eig_hermitian(&pick);
    if vals[0] < -tol.eps_roots * scale {
        return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
            reason: format!(
                "Pick matrix has negative eigenvalue {:.3e}: no Schur interpolant exists",
                vals[0]
            ),
        }));
    }
    let near_zero: Vec<usize> = (0..r)
        .filter(|&i| vals[i].abs() <= tol.eps_roots * scale)
        .collect();
    if near_zero.len() != 1 {
        return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
            reason: format!(
                "Pick matrix rank deficiency is {} rather than one: no Blaschke \
                 interpolant of order {} exists",
                near_zero.len(),
                r - 1
            ),
        }));
    }
    let null_idx = near_zero[0];
    let c: Vec<Complex64> = (0..r).map(|i| vecs[(i, null_idx)]).collect();

    // candidate parameter function from the null relation
    let (num_p, den_p) = null_vector_rational(eigen, &jets, &c);
    if den_p.eval(cplx(0.0, 0.0)).norm() == 0.0 {
        return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
            reason: "candidate parameter function has a pole at the origin".into(),
        }));
    }
    let s = match RationalSchur::new(num_p.clone(), den_p.clone()) {
        Ok(s) => s,
        Err(e) => {
            return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                reason: format!("candidate parameter function rejected: {e}"),
            }))
        }
    };
    // inner-function validation by modulus sampling and pole check
    for z in unit_circle_points(64) {
        let v = s.eval(z).norm();
        if !(0.999999..=1.000001).contains(&v) {
            return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                reason: format!(
                    "candidate parameter function has modulus {v} on the circle: \
                     not a Blaschke product"
                ),
            }));
        }
    }
    if let Some(dd) = den_p.degree() {
        if dd >= 1 {
            match roots(&den_p, tol) {
                Ok(rs) => {
                    if rs.iter().any(|z| z.norm() <= 1.0) {
                        return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                            reason: "candidate parameter function has a pole in the \
                                     closed disk"
                                .into(),
                        }));
                    }
                }
                Err(e) => {
                    return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                        reason: format!("pole check failed: {e}"),
                    }))
                }
            }
        }
    }
    // parameters of s; must terminate after exactly r − 1 interior entries
    let s_params = match schur_prefix(&s, r + 1, tol) {
        Ok(p) => p,
        Err(e) => {
            return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                reason: format!("parameter extraction of the candidate failed: {e}"),
            }))
        }
    };
    let terminal = match s_params.terminal() {
        Some(t) if s_params.order() == r - 1 => t,
        _ => {
            return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                reason: format!(
                    "candidate parameter function is not a Blaschke product of \
                     order {} (got {} interior parameters, terminal: {})",
                    r - 1,
                    s_params.order(),
                    s_params.terminal().is_some()
                ),
            }));
        }
    };
    let mut interior = first_params.to_vec();
    interior.extend_from_slice(s_params.interior());
    debug_assert_eq!(interior.len(), n);
    let full = match SchurParams::finite(interior, terminal, tol) {
        Ok(p) => p,
        Err(e) => {
            return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                reason: format!("assembled parameter list rejected: {e}"),
            }))
        }
    };
    let matrix = TruncatedCmv::from_params(&full, tol)?;
    let spec = spectrum(&matrix, tol)?;
    let computed: Vec<Complex64> = spec.eigenvalues.iter().map(|(v, _)| *v).collect();
    let spectrum_residual = match_multiset(eigen, &computed);
    if spectrum_residual > validation_tol(tol) {
        return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
            reason: format!(
                "candidate matrix fails the prescribed spectrum by {spectrum_residual:.3e}"
            ),
        }));
    }
    Ok(MixedFirstOutcome::Unique(Box::new(MixedFirstSolution {
        matrix,
        spectrum_residual,
    })))
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Bivariate Taylor jet truncated at order 2 in each variable.
#[derive(Clone, Copy)]
struct Jet2 {
    c: [[Complex64; 3]; 3],
}

impl Jet2 {
    fn zero() -> Self {
        Jet2 {
            c: [[Complex64::new(0.0, 0.0); 3]; 3],
        }
    }

    fn constant(v: Complex64) -> Self {
        let mut j = Self::zero();
        j.c[0][0] = v;
        j
    }

    fn mul(&self, other: &Jet2) -> Jet2 {
        let mut out = Jet2::zero();
        for i1 in 0..3 {
            for j1 in 0..3 {
                if self.c[i1][j1].norm() == 0.0 {
                    continue;
                }
                for i2 in 0..3 - i1 {
                    for j2 in 0..3 - j1 {
                        out.c[i1 + i2][j1 + j2] += self.c[i1][j1] * other.c[i2][j2];
                    }
                }
            }
        }
        out
    }

    fn add(&self, other: &Jet2) -> Jet2 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.c[i][j] += other.c[i][j];
            }
        }
        out
    }

    fn sub(&self, other: &Jet2) -> Jet2 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.c[i][j] -= other.c[i][j];
            }
        }
        out
    }

    fn scale(&self, f: Complex64) -> Jet2 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.c[i][j] *= f;
            }
        }
        out
    }
}

/// Derivative-augmented Pick matrix: the Gram matrix of the reproducing
/// kernels `(1/i!) ∂^i_w̄ [(1 − s(z) conj(s(w)))/(1 − z conj(w))]` at the
/// nodes, evaluated from the interpolation jets.
fn build_pick_matrix(eigen: &[(Complex64, usize)], jets: &[Vec<Complex64>]) -> ComplexMatrix {
    let index: Vec<(usize, usize)> = eigen
        .iter()
        .enumerate()
        .flat_map(|(k, (_, m))| (0..*m).map(move |i| (k, i)))
        .collect();
    let r = index.len();
    let mut pick = ComplexMatrix::zeros(r);
    for (row, &(k, i)) in index.iter().enumerate() {
        for (col, &(l, j)) in index.iter().enumerate() {
            let zk = eigen[k].0;
            let ul = eigen[l].0.conj();
            // s(z) jet in ξ around z_k
            let mut s1 = Jet2::zero();
            for (a, v) in jets[k].iter().enumerate().take(3) {
                s1.c[a][0] = *v;
            }
            // conj(s(w)) as a function of u = conj(w), jet in η around conj(z_l)
            let mut s2 = Jet2::zero();
            for (b, v) in jets[l].iter().enumerate().take(3) {
                s2.c[0][b] = v.conj();
            }
            // g = 1/(1 − z u) around (z_k, u_l)
            let d = cplx(1.0, 0.0) - zk * ul;
            let mut tjet = Jet2::zero();
            tjet.c[1][0] = ul / d;
            tjet.c[0][1] = zk / d;
            tjet.c[1][1] = cplx(1.0, 0.0) / d;
            let mut g = Jet2::constant(cplx(1.0, 0.0));
            let mut tpow = Jet2::constant(cplx(1.0, 0.0));
            for _ in 0..4 {
                tpow = tpow.mul(&tjet);
                g = g.add(&tpow);
            }
            let g = g.scale(cplx(1.0, 0.0) / d);
            let f = Jet2::constant(cplx(1.0, 0.0))
                .sub(&s1.mul(&s2))
                .mul(&g);
            pick[(row, col)] = f.c[i][j];
        }
    }
    pick
}

/// Candidate parameter function from the Pick null vector:
/// `s = num/den` with
/// `num = Σ c_{l,j} z^j / (1 − conj(z_l) z)^{j+1}` and
/// `den = Σ c_{l,j} Σ_{a+b=j} conj(jet_l[a]) z^b / (1 − conj(z_l) z)^{b+1}`,
/// cleared to polynomials of degree ≤ r − 1.
fn null_vector_rational(
    eigen: &[(Complex64, usize)],
    jets: &[Vec<Complex64>],
    c: &[Complex64],
) -> (Poly, Poly) {
    let index: Vec<(usize, usize)> = eigen
        .iter()
        .enumerate()
        .flat_map(|(k, (_, m))| (0..*m).map(move |i| (k, i)))
        .collect();
    let full: Vec<Poly> = eigen
        .iter()
        .map(|(z, _)| Poly::new(vec![cplx(1.0, 0.0), -z.conj()]))
        .collect();
    let mut num = Poly::zero();
    let mut den = Poly::zero();
    for (pos, &(l, j)) in index.iter().enumerate() {
        let coeff = c[pos];
        // common factor ∏_{l'≠l} (1 − conj(z_{l'}) z)^{mult_{l'}}
        let mut common = Poly::one();
        for (l2, (_, m2)) in eigen.iter().enumerate() {
            let reps = if l2 == l { 0 } else { *m2 };
            for _ in 0..reps {
                common = common.mul(&full[l2]);
            }
        }
        let lmult = eigen[l].1;
        // numerator term: z^j (1 − conj(z_l) z)^{lmult − j − 1}
        let mut term = Poly::monomial(j);
        for _ in 0..lmult - j - 1 {
            term = term.mul(&full[l]);
        }
        num = num.add(&common.mul(&term).scale(coeff));
        // denominator terms over a + b = j
        for b in 0..=j {
            let a = j - b;
            let mut dterm = Poly::monomial(b).scale(jets[l][a].conj());
            for _ in 0..lmult - b - 1 {
                dterm = dterm.mul(&full[l]);
            }
            den = den.add(&common.mul(&dterm).scale(coeff));
        }
    }
    (num, den)
}

/// Zero-eigenvalue reduction: with 0 of multiplicity `k` in the data, any
/// prescribed nonzero parameter among `α_0..α_{k−1}` is an obstruction;
/// otherwise the zero factor is stripped (`k`-th Schur iterate) and the
/// reduced problem solved, prefixing `k` zero parameters. Under-determined
/// reductions return a solution-family description.
pub fn mixed_first_zero_reduction(
    d: &MixedFirstData,
    tol: &Tolerances,
) -> Result<MixedFirstOutcome> {
    d.validate(tol)?;
    let k = d.zero_multiplicity(tol);
    if k == 0 {
        return Err(Error::Argument(
            "zero reduction called without a zero eigenvalue".into(),
        ));
    }
    // obstruction: the first k parameters are forced to vanish
    for (j, a) in d.first_params.iter().enumerate().take(k) {
        if a.norm() > tol.eps_structural {
            return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                reason: format!(
                    "zero eigenvalue of multiplicity {k} forces α_{j} = 0, but \
                     |α_{j}| = {} was prescribed",
                    a.norm()
                ),
            }));
        }
    }
    let reduced_eigen: Vec<(Complex64, usize)> = d
        .eigen
        .iter()
        .filter(|(z, _)| z.norm() > tol.eps_roots)
        .cloned()
        .collect();
    let r_nz: usize = reduced_eigen.iter().map(|(_, m)| m).sum();
    let n_red = d.n - k;
    let reduced_params: Vec<Complex64> = if d.first_params.len() > k {
        d.first_params[k..].to_vec()
    } else {
        Vec::new()
    };

    if n_red == 0 {
        // the whole spectrum is the zero of multiplicity N: every terminal works
        return Ok(MixedFirstOutcome::Family(Box::new(FamilyDescriptor {
            zero_prefix: k,
            known_interior: Vec::new(),
            free_interior: 0,
            free_terminal: true,
            open_condition: None,
            note: "all parameters are forced to zero; the unimodular terminal is free".into(),
        })));
    }

    let need = n_red.saturating_sub(r_nz) + 1;
    if r_nz == 0 || reduced_params.len() < need {
        let prescribed = k.max(d.first_params.len());
        let open_condition = if d.first_params.len() == k {
            Some(format!(
                "α_{k} must be nonzero for the zero eigenvalue to have exact \
                 multiplicity {k}"
            ))
        } else if r_nz >= 1 {
            Some(
                "remaining eigenvalue conditions still apply; the family is not \
                 parametrized and may be empty"
                    .into(),
            )
        } else {
            None
        };
        return Ok(MixedFirstOutcome::Family(Box::new(FamilyDescriptor {
            zero_prefix: k,
            known_interior: reduced_params,
            free_interior: d.n - prescribed,
            free_terminal: true,
            open_condition,
            note: format!(
                "under-determined after stripping the zero factor: the reduced \
                 problem needs {need} parameters, {} are prescribed",
                d.first_params.len().saturating_sub(k)
            ),
        })));
    }

    // exact zero multiplicity needs a nonzero parameter right after the prefix
    if reduced_params[0].norm() <= tol.eps_structural {
        return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
            reason: format!(
                "α_{k} = 0 would raise the zero-eigenvalue multiplicity above {k}"
            ),
        }));
    }

    let reduced = MixedFirstData {
        eigen: reduced_eigen,
        first_params: reduced_params,
        n: n_red,
    };
    match mixed_first(&reduced, tol)? {
        MixedFirstOutcome::Unique(sol) => {
            let mut interior = vec![cplx(0.0, 0.0); k];
            interior.extend_from_slice(sol.matrix.params().interior());
            let terminal = sol
                .matrix
                .params()
                .terminal()
                .expect("solved matrix has a terminal");
            let full = SchurParams::finite(interior, terminal, tol)?;
            let matrix = TruncatedCmv::from_params(&full, tol)?;
            let spec = spectrum(&matrix, tol)?;
            let computed: Vec<Complex64> = spec.eigenvalues.iter().map(|(v, _)| *v).collect();
            let spectrum_residual = match_multiset(&d.eigen, &computed);
            if spectrum_residual > validation_tol(tol) {
                return Ok(MixedFirstOutcome::NoSolution(NoSolutionReport {
                    reason: format!(
                        "prefixed candidate fails the prescribed spectrum by \
                         {spectrum_residual:.3e}"
                    ),
                }));
            }
            Ok(MixedFirstOutcome::Unique(Box::new(MixedFirstSolution {
                matrix,
                spectrum_residual,
            })))
        }
        MixedFirstOutcome::NoSolution(rep) => Ok(MixedFirstOutcome::NoSolution(rep)),
        MixedFirstOutcome::Family(fam) => {
            let mut fam = *fam;
            fam.zero_prefix += k;
            Ok(MixedFirstOutcome::Family(Box::new(fam)))
        }
    }
}

// ---------------------------------------------------------------------------
// Mixed data: spectrum + last parameters
// ---------------------------------------------------------------------------

/// Partial spectrum together with the trailing parameters
/// `α_m, …, α_{N−1}` and the unimodular terminal `α_N`.
#[derive(Debug, Clone)]
pub struct MixedLastData {
    /// Prescribed eigenvalues, repetitions counting multiplicity.
    pub eigen: Vec<Complex64>,
    /// Interior parameters `α_m..α_{N−1}`.
    pub last_interior: Vec<Complex64>,
    pub terminal: Complex64,
    pub n: usize,
}

impl MixedLastData {
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Argument("target dimension must be >= 1".into()));
        }
        let m = self.eigen.len();
        if m > self.n {
            return Err(Error::Argument(format!(
                "{m} prescribed eigenvalues exceed the dimension {}",
                self.n
            )));
        }
        if self.last_interior.len() != self.n - m {
            return Err(Error::Argument(format!(
                "expected {} trailing interior parameters, got {}",
                self.n - m,
                self.last_interior.len()
            )));
        }
        for z in &self.eigen {
            if z.norm() >= 1.0 {
                return Err(Error::Argument(format!(
                    "eigenvalue modulus {} must be < 1",
                    z.norm()
                )));
            }
        }
        for a in &self.last_interior {
            if a.norm() >= 1.0 {
                return Err(Error::Argument(format!(
                    "parameter modulus {} must be < 1",
                    a.norm()
                )));
            }
        }
        if (self.terminal.norm() - 1.0).abs() > tol.eps_roots {
            return Err(Error::Argument(format!(
                "terminal modulus {} is not within eps_roots of 1",
                self.terminal.norm()
            )));
        }
        Ok(())
    }
}

/// Solution of the mixed-last problem with its verification residuals.
#[derive(Debug, Clone)]
pub struct MixedLastSolution {
    pub matrix: TruncatedCmv,
    /// Largest distance from a prescribed eigenvalue to a matched eigenvalue
    /// of the returned matrix.
    pub eigen_residual: f64,
    /// Largest deviation of the recovered trailing parameters from the
    /// prescribed ones.
    pub param_residual: f64,
}

/// Reconstruct a truncated CMV matrix containing the prescribed eigenvalues
/// (counting multiplicity) whose trailing parameters are the prescribed
/// ones. Existence by construction; uniqueness is not claimed (and is open
/// for two or more prescribed eigenvalues).
pub fn mixed_last(d: &MixedLastData, tol: &Tolerances, seed: u64) -> Result<MixedLastSolution> {
    d.validate(tol)?;
    let m = d.eigen.len();
    if m == 0 {
        let params = SchurParams::finite(d.last_interior.clone(), d.terminal, tol)?;
        let matrix = TruncatedCmv::from_params(&params, tol)?;
        return Ok(MixedLastSolution {
            matrix,
            eigen_residual: 0.0,
            param_residual: 0.0,
        });
    }
    let b = blaschke_with_prescribed_tail(&d.last_interior, &d.eigen, d.terminal, tol, seed)?;
    let full = schur_params_of_blaschke(&b, tol)?;
    let matrix = TruncatedCmv::from_params(&full, tol)?;

    // postcondition (i): prescribed eigenvalues are contained in the spectrum
    let spec = spectrum(&matrix, tol)?;
    let computed: Vec<Complex64> = spec.eigenvalues.iter().map(|(v, _)| *v).collect();
    let targets: Vec<(Complex64, usize)> = d.eigen.iter().map(|z| (*z, 1usize)).collect();
    let eigen_residual = match_multiset(&targets, &computed);
    // postcondition (ii): trailing parameters recovered from the matrix match.
    // Entry-chasing recovery is unique only for dimension >= 2; the 1×1 case
    // is checked against the Schur-algorithm parameters of the construction.
    let recovered = if d.n >= 2 {
        params_from_truncated(matrix.dense(), tol)?
    } else {
        full.clone()
    };
    let mut param_residual = (recovered.alpha(d.n) - d.terminal).norm();
    for (idx, a) in d.last_interior.iter().enumerate() {
        param_residual = param_residual.max((recovered.alpha(m + idx) - a).norm());
    }
    let gate = validation_tol(tol);
    if eigen_residual > gate || param_residual > gate {
        return Err(Error::Numeric(format!(
            "construction verified badly: eigenvalue residual {eigen_residual:.3e}, \
             parameter residual {param_residual:.3e}"
        )));
    }
    Ok(MixedLastSolution {
        matrix,
        eigen_residual,
        param_residual,
    })
}

// ---------------------------------------------------------------------------
// Boundary summability report
// ---------------------------------------------------------------------------

/// Partial sums of `Σ (1 − |z_n|)` over a finite prefix of a candidate
/// semi-infinite eigenvalue sequence.
#[derive(Debug, Clone)]
pub struct BlaschkeConditionReport {
    pub partial_sum: f64,
    /// Cumulative partial sums, one per prefix length.
    pub cumulative: Vec<f64>,
    /// Fixed reminder that finite data cannot decide convergence.
    pub note: &'static str,
}

/// Evaluate the summability expression `Σ (1 − |z_n|)` on a finite prefix.
/// No convergence verdict is asserted from finite data.
pub fn blaschke_condition(zs: &[Complex64]) -> Result<BlaschkeConditionReport> {
    let mut cumulative = Vec::with_capacity(zs.len());
    let mut acc = 0.0_f64;
    for z in zs {
        if z.norm() >= 1.0 {
            return Err(Error::Argument(format!(
                "sequence entry modulus {} must be < 1",
                z.norm()
            )));
        }
        acc += 1.0 - z.norm();
        cumulative.push(acc);
    }
    Ok(BlaschkeConditionReport {
        partial_sum: acc,
        cumulative,
        note: "partial sums over a finite prefix; convergence of the full series \
               is not decided by finite data",
    })
}
