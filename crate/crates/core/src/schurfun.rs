//! Schur functions as rational data, the Schur algorithm, Wall pairs,
//! finite Blaschke products, and the Carathéodory ↔ Schur transforms.
//!
//! A finite Blaschke product of order N has exactly N Schur parameters of
//! modulus < 1 followed by a unimodular terminal parameter; the Schur
//! algorithm computed here keeps the two structural cancellations of each
//! step (constant term of the new numerator, leading term of the new
//! denominator) out of floating point. Parameter extraction from a Blaschke
//! product is always cross-checked against the Khrushchev route through the
//! inverse Szegő recursion.

use crate::error::{Error, Result};
use crate::numkernel::{roots, star, Poly, Tolerances};
use crate::opuc;
use num_complex::Complex64;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Uniform samples of the unit circle.
pub fn unit_circle_points(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / count as f64))
        .collect()
}

/// Deterministic interior sample points: golden-angle spiral with radii in
/// [0.15, 0.85]. Used by every pointwise function comparison in the crate.
pub fn interior_sample_points(count: usize) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|j| {
            let r = 0.15 + 0.7 * (j as f64 + 0.5) / count as f64;
            Complex64::from_polar(r, golden * j as f64)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Blaschke products
// ---------------------------------------------------------------------------

/// Finite Blaschke product `e^{iφ} ∏ (z − z_k)/(1 − conj(z_k) z)`, stored by
/// phase and zero multiset. Zeros are the numerically stable representation;
/// coefficient expansion happens only on demand.
#[derive(Debug, Clone)]
pub struct BlaschkeProduct {
    phase: f64,
    zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn new(phase: f64, zeros: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        for z in &zeros {
            if z.norm() > 1.0 - tol.eps_roots {
                return Err(Error::ZerosNotInDisk(format!(
                    "Blaschke zero with modulus {} is not strictly inside the disk",
                    z.norm()
                )));
            }
        }
        Ok(BlaschkeProduct {
            phase: phase.rem_euclid(std::f64::consts::TAU),
            zeros,
        })
    }

    pub fn order(&self) -> usize {
        self.zeros.len()
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn phase_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phase)
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    /// Same zero multiset with the phase advanced by `arg(factor)`.
    pub fn rotated(&self, factor: Complex64) -> BlaschkeProduct {
        BlaschkeProduct {
            phase: (self.phase + factor.arg()).rem_euclid(std::f64::consts::TAU),
            zeros: self.zeros.clone(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.phase_factor();
        for zk in &self.zeros {
            acc *= (z - zk) / (cplx(1.0, 0.0) - zk.conj() * z);
        }
        acc
    }

    /// Derivative by the product rule; valid at zeros as well.
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let n = self.zeros.len();
        let factors: Vec<Complex64> = self
            .zeros
            .iter()
            .map(|zk| (z - zk) / (cplx(1.0, 0.0) - zk.conj() * z))
            .collect();
        let mut sum = cplx(0.0, 0.0);
        for k in 0..n {
            let zk = self.zeros[k];
            let d = cplx(1.0, 0.0) - zk.conj() * z;
            let dk = (cplx(1.0, 0.0) - zk.norm_sqr()) / (d * d);
            let mut prod = self.phase_factor() * dk;
            for (j, f) in factors.iter().enumerate() {
                if j != k {
                    prod *= f;
                }
            }
            sum += prod;
        }
        sum
    }

    /// Monic numerator polynomial `∏ (z − z_k)`.
    pub fn numerator(&self) -> Poly {
        Poly::from_roots(&self.zeros)
    }

    /// Rational form with `num = ∏(z − z_k)` and `den = e^{−iφ}·num*`.
    pub fn to_rational(&self) -> RationalSchur {
        let num = self.numerator();
        let n = self.order();
        let den = star(&num, n)
            .expect("star bound equals the degree")
            .scale(Complex64::from_polar(1.0, -self.phase));
        RationalSchur { num, den }
    }
}

// ---------------------------------------------------------------------------
// Schur parameters
// ---------------------------------------------------------------------------

/// Schur parameter sequence: interior parameters of modulus < 1, plus — in
/// the finite (Blaschke/trivial-measure) case — one unimodular terminal
/// parameter. A parameter prefix of a non-inner function has no terminal.
#[derive(Debug, Clone)]
pub struct SchurParams {
    interior: Vec<Complex64>,
    terminal: Option<Complex64>,
}

impl SchurParams {
    /// Finite sequence. The terminal is accepted when its modulus is within
    /// `eps_roots` of 1 and stored radially projected onto the circle, so the
    /// stored invariant `||γ_N| − 1| ≤ eps_structural` holds exactly.
    pub fn finite(
        interior: Vec<Complex64>,
        terminal: Complex64,
        tol: &Tolerances,
    ) -> Result<Self> {
        Self::check_interior(&interior, tol)?;
        let tn = terminal.norm();
        if (tn - 1.0).abs() > tol.eps_roots {
            return Err(Error::Argument(format!(
                "terminal parameter modulus {tn} is not within eps_roots of 1"
            )));
        }
        Ok(SchurParams {
            interior,
            terminal: Some(terminal / tn),
        })
    }

    /// Parameter prefix without a terminal.
    pub fn prefix(interior: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        Self::check_interior(&interior, tol)?;
        Ok(SchurParams {
            interior,
            terminal: None,
        })
    }

    fn check_interior(interior: &[Complex64], tol: &Tolerances) -> Result<()> {
        for (j, g) in interior.iter().enumerate() {
            if g.norm() > 1.0 - tol.eps_roots {
                return Err(Error::Argument(format!(
                    "interior parameter {j} has modulus {} too close to the circle",
                    g.norm()
                )));
            }
        }
        Ok(())
    }

    pub fn interior(&self) -> &[Complex64] {
        &self.interior
    }

    /// Number of interior parameters.
    pub fn order(&self) -> usize {
        self.interior.len()
    }

    pub fn terminal(&self) -> Option<Complex64> {
        self.terminal
    }

    /// Parameter `α_j`, the terminal being index `order()`.
    pub fn alpha(&self, j: usize) -> Complex64 {
        if j < self.interior.len() {
            self.interior[j]
        } else if j == self.interior.len() {
            self.terminal
                .expect("terminal parameter requested but absent")
        } else {
            panic!("parameter index {j} out of range");
        }
    }

    /// `ρ_j = sqrt(1 − |α_j|²)`; exactly zero at the terminal index.
    pub fn rho(&self, j: usize) -> f64 {
        if j < self.interior.len() {
            (1.0 - self.interior[j].norm_sqr()).max(0.0).sqrt()
        } else if j == self.interior.len() && self.terminal.is_some() {
            0.0
        } else {
            panic!("rho index {j} out of range");
        }
    }

    /// All parameters multiplied by the unimodular `factor`.
    pub fn scaled(&self, factor: Complex64) -> SchurParams {
        let f = factor / factor.norm();
        SchurParams {
            interior: self.interior.iter().map(|g| g * f).collect(),
            terminal: self.terminal.map(|t| {
                let r = t * f;
                r / r.norm()
            }),
        }
    }

    pub fn max_param_diff(&self, other: &SchurParams) -> f64 {
        let mut d = if self.interior.len() != other.interior.len() {
            f64::INFINITY
        } else {
            0.0
        };
        for (a, b) in self.interior.iter().zip(&other.interior) {
            d = d.max((a - b).norm());
        }
        match (self.terminal, other.terminal) {
            (Some(a), Some(b)) => d.max((a - b).norm()),
            (None, None) => d,
            _ => f64::INFINITY,
        }
    }
}

// ---------------------------------------------------------------------------
// Rational Schur functions and the Schur algorithm
// ---------------------------------------------------------------------------

/// Schur function stored as a ratio of polynomials with `den(0) ≠ 0`.
#[derive(Debug, Clone)]
pub struct RationalSchur {
    num: Poly,
    den: Poly,
}

impl RationalSchur {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.eval(cplx(0.0, 0.0)).norm() == 0.0 {
            return Err(Error::Argument(
                "rational Schur function must have den(0) != 0".into(),
            ));
        }
        Ok(RationalSchur { num, den })
    }

    pub fn zero() -> Self {
        RationalSchur {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        RationalSchur {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Scale numerator and denominator so that `den(0) = 1`.
    pub fn normalized(&self) -> RationalSchur {
        let d0 = self.den.eval(cplx(0.0, 0.0));
        RationalSchur {
            num: self.num.scale(cplx(1.0, 0.0) / d0),
            den: self.den.scale(cplx(1.0, 0.0) / d0),
        }
    }

    pub fn sup_on_circle(&self, samples: usize) -> f64 {
        unit_circle_points(samples)
            .into_iter()
            .map(|z| self.eval(z).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_schur_on_circle(&self, samples: usize, slack: f64) -> bool {
        self.sup_on_circle(samples) <= 1.0 + slack
    }
}

/// One step of the Schur algorithm:
/// `γ = f(0)`, `f₁ = (f − γ) / (z (1 − conj(γ) f))` in rational form.
///
/// The constant term of `num − γ·den` vanishes identically and is removed by
/// an index shift, never by division; the leading-term cancellation of
/// `den − conj(γ)·num` (exact when `f` is inner) is handled by the deflation
/// rule of the polynomial degree bookkeeping. Errors with the terminal value
/// when `|f(0)|` reaches `1 − eps_roots`.
pub fn schur_step(f: &RationalSchur, tol: &Tolerances) -> Result<(Complex64, RationalSchur)> {
    let gamma = f.eval(cplx(0.0, 0.0));
    if gamma.norm() >= 1.0 - tol.eps_roots {
        return Err(Error::NotStrictSchur {
            gamma,
            modulus: gamma.norm(),
        });
    }
    let len = f.num.coeffs().len().max(f.den.coeffs().len());
    let mut top: Vec<Complex64> = (1..len)
        .map(|k| f.num.coeff(k) - gamma * f.den.coeff(k))
        .collect();
    if top.is_empty() {
        top.push(cplx(0.0, 0.0));
    }
    let num1 = Poly::from_coeffs(top, tol.eps_deflate);
    let bot: Vec<Complex64> = (0..len)
        .map(|k| f.den.coeff(k) - gamma.conj() * f.num.coeff(k))
        .collect();
    let den1 = Poly::from_coeffs(bot, tol.eps_deflate);
    let next = RationalSchur::new(num1, den1)?.normalized();
    Ok((gamma, next))
}

/// Schur parameters of a finite Blaschke product by running the Schur
/// algorithm for `order` steps and reading the terminal value.
///
/// The result is cross-checked against the Khrushchev route (inverse Szegő
/// recursion on the monic numerator, parameters reversed, conjugated and
/// negated, then scaled by the phase); disagreement beyond `eps_roots` is an
/// internal-consistency error.
pub fn schur_params_of_blaschke(b: &BlaschkeProduct, tol: &Tolerances) -> Result<SchurParams> {
    let n = b.order();
    let mut f = b.to_rational().normalized();
    let mut interior = Vec::with_capacity(n);
    for _ in 0..n {
        let (gamma, next) = schur_step(&f, tol)?;
        interior.push(gamma);
        f = next;
    }
    let terminal = f.eval(cplx(0.0, 0.0));
    if (terminal.norm() - 1.0).abs() > tol.eps_roots {
        return Err(Error::Numeric(format!(
            "terminal Schur value has modulus {} after {} steps",
            terminal.norm(),
            n
        )));
    }
    let params = SchurParams::finite(interior, terminal, tol)?;

    let khrushchev = opuc::khrushchev_params(&b.numerator(), tol)?;
    let rotated = khrushchev.scaled(b.phase_factor());
    let gap = params.max_param_diff(&rotated);
    if gap > tol.eps_roots {
        return Err(Error::InternalConsistency(format!(
            "Schur algorithm and Khrushchev parameter routes disagree by {gap:.3e}"
        )));
    }
    Ok(params)
}

/// Synthesize the finite Blaschke product with the given parameters:
/// substitute the constant terminal into the Wall-pair linear fractional
/// transformation and reduce to (phase, zero multiset) through the roots of
/// the numerator.
pub fn blaschke_from_schur_params(p: &SchurParams, tol: &Tolerances) -> Result<BlaschkeProduct> {
    let terminal = p
        .terminal()
        .ok_or_else(|| Error::Argument("synthesis requires a terminal parameter".into()))?;
    let n = p.order();
    if n == 0 {
        return BlaschkeProduct::new(terminal.arg(), Vec::new(), tol);
    }
    let wall = wall_pair(p.interior(), tol)?;
    // num = A + γ_N z B*; its leading coefficient is exactly γ_N
    let num = wall.a().add(&wall.b_star().shift_up(1).scale(terminal));
    if num.degree() != Some(n) {
        return Err(Error::Numeric(format!(
            "synthesized numerator degree {:?} does not match the order {}",
            num.degree(),
            n
        )));
    }
    let zs = roots(&num, tol)?;
    for z in &zs {
        if z.norm() > 1.0 + tol.eps_roots {
            return Err(Error::Numeric(format!(
                "numerator root with modulus {} escaped the closed disk",
                z.norm()
            )));
        }
    }
    BlaschkeProduct::new(terminal.arg(), zs, tol)
}

// ---------------------------------------------------------------------------
// Wall pairs
// ---------------------------------------------------------------------------

/// Wall pair (A, B) of a parameter list γ_0..γ_n: the polynomial data of the
/// linear fractional transformation `f = (A + zB*s)/(B + zA*s)` describing
/// all Schur functions with those initial parameters.
///
/// Stored in the `B(0) = 1` normalization, which drops the `1/ρ` factors of
/// the elementary 2×2 transfer matrices. In this normalization
/// `B*B − A*A = c·z^n` with `c = ∏(1 − |γ_j|²) > 0` (`constant()`), and the
/// signature-matrix identities hold for `W/√c` (`w_at`).
#[derive(Debug, Clone)]
pub struct WallPair {
    a: Poly,
    b: Poly,
    n: usize,
    rho_sq_product: f64,
}

/// Accumulate the Wall pair of the interior parameters (at least one).
pub fn wall_pair(interior: &[Complex64], tol: &Tolerances) -> Result<WallPair> {
    if interior.is_empty() {
        return Err(Error::Argument(
            "wall_pair needs at least one parameter".into(),
        ));
    }
    for (j, g) in interior.iter().enumerate() {
        if g.norm() >= 1.0 {
            return Err(Error::Argument(format!(
                "parameter {j} has modulus {} >= 1",
                g.norm()
            )));
        }
    }
    let n = interior.len() - 1;
    // 2x2 polynomial product of [[z, ω], [z conj(ω), 1]]
    let mut w00 = Poly::monomial(1);
    let mut w01 = Poly::constant(interior[0]);
    let mut w10 = Poly::monomial(1).scale(interior[0].conj());
    let mut w11 = Poly::one();
    for om in &interior[1..] {
        let q00 = Poly::monomial(1);
        let q01 = Poly::constant(*om);
        let q10 = Poly::monomial(1).scale(om.conj());
        let q11 = Poly::one();
        let n00 = w00.mul(&q00).add(&w01.mul(&q10));
        let n01 = w00.mul(&q01).add(&w01.mul(&q11));
        let n10 = w10.mul(&q00).add(&w11.mul(&q10));
        let n11 = w10.mul(&q01).add(&w11.mul(&q11));
        w00 = n00;
        w01 = n01;
        w10 = n10;
        w11 = n11;
    }
    let a = w01;
    let b = w11;
    let rho_sq_product = interior.iter().map(|g| 1.0 - g.norm_sqr()).product::<f64>();
    let pair = WallPair {
        a,
        b,
        n,
        rho_sq_product,
    };
    // A B^{-1} must be a Schur function: sampled modulus check on the circle
    let sup = unit_circle_points(32)
        .into_iter()
        .map(|z| (pair.a.eval(z) / pair.b.eval(z)).norm())
        .fold(0.0, f64::max);
    if sup > 1.0 + tol.eps_roots {
        return Err(Error::Numeric(format!(
            "Wall quotient A/B has modulus {sup} on the circle"
        )));
    }
    Ok(pair)
}

impl WallPair {
    pub fn a(&self) -> &Poly {
        &self.a
    }

    pub fn b(&self) -> &Poly {
        &self.b
    }

    /// Degree bound: parameter count − 1.
    pub fn bound(&self) -> usize {
        self.n
    }

    /// `c` in `B*B − A*A = c z^n`, equal to `∏ (1 − |γ_j|²)`.
    pub fn constant(&self) -> f64 {
        self.rho_sq_product
    }

    pub fn a_star(&self) -> Poly {
        star(&self.a, self.n).expect("A degree bounded by n")
    }

    pub fn b_star(&self) -> Poly {
        star(&self.b, self.n).expect("B degree bounded by n")
    }

    /// Transfer matrix `[[zB*, A], [zA*, B]] / √c` at a point: the
    /// normalization for which the signature-matrix identities hold
    /// (`W* j W = j` on the circle, `W* j W ⪰ j` inside).
    pub fn w_at(&self, z: Complex64) -> [[Complex64; 2]; 2] {
        let scale = 1.0 / self.rho_sq_product.sqrt();
        [
            [z * self.b_star().eval(z) * scale, self.a.eval(z) * scale],
            [z * self.a_star().eval(z) * scale, self.b.eval(z) * scale],
        ]
    }
}

// ---------------------------------------------------------------------------
// Carathéodory ↔ Schur pointwise transforms
// ---------------------------------------------------------------------------

/// `F = (1 + z f)/(1 − z f)` from a Schur value at `z`.
pub fn caratheodory_from_schur(f_value: Complex64, z: Complex64) -> Result<Complex64> {
    let den = cplx(1.0, 0.0) - z * f_value;
    if den.norm() == 0.0 {
        return Err(Error::Argument(
            "caratheodory_from_schur: 1 − z f = 0".into(),
        ));
    }
    Ok((cplx(1.0, 0.0) + z * f_value) / den)
}

/// `f = (F − 1)/(z (F + 1))` from a Carathéodory value at `z ≠ 0`.
///
/// The removable singularity at the origin is the caller's responsibility
/// (`f(0)` is the first Schur parameter); this function rejects `z = 0`.
pub fn schur_from_caratheodory(f_value: Complex64, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::Argument(
            "schur_from_caratheodory: z = 0 requires the dedicated limit path".into(),
        ));
    }
    Ok((f_value - cplx(1.0, 0.0)) / (z * (f_value + cplx(1.0, 0.0))))
}

// ---------------------------------------------------------------------------
// Parameter product vs. boundary integral
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ProductCheckReport {
    /// `∏ (1 − |γ_n|²)` over the supplied parameters (terminal included when
    /// present, which forces 0 for inner functions).
    pub product_side: f64,
    /// `exp( mean over samples of ln(1 − |f|²) )`; `0` when the integrand is
    /// −∞ everywhere sampled.
    pub integral_side: f64,
    pub relative_gap: f64,
    /// Set when `|f| = 1` across the whole sampled circle.
    pub inner_detected: bool,
}

/// Compare the Schur-parameter product `∏(1 − |γ_n|²)` with the boundary
/// integral `exp(∫ ln(1 − |f|²) dm)` by uniform (trapezoidal) quadrature.
pub fn param_product_check(
    p: &SchurParams,
    f: &RationalSchur,
    samples: usize,
    tol: &Tolerances,
) -> ProductCheckReport {
    let mut product: f64 = p.interior().iter().map(|g| 1.0 - g.norm_sqr()).product();
    if let Some(t) = p.terminal() {
        product *= (1.0 - t.norm_sqr()).max(0.0);
    }
    let pts = unit_circle_points(samples);
    let mut inner_detected = true;
    let mut log_sum = 0.0_f64;
    for z in &pts {
        let v = 1.0 - f.eval(*z).norm_sqr();
        if v > tol.eps_structural {
            inner_detected = false;
        }
        log_sum += v.max(1e-300).ln();
    }
    let integral_side = if inner_detected {
        0.0
    } else {
        (log_sum / samples as f64).exp()
    };
    let denom = product.abs().max(integral_side.abs()).max(1e-300);
    ProductCheckReport {
        product_side: product,
        integral_side,
        relative_gap: (product - integral_side).abs() / denom,
        inner_detected,
    }
}

/// Schur parameters of a general rational Schur function, up to `max_len`
/// entries. Stops early once the parameters sit at noise level (their tail
/// no longer moves the product `∏(1 − |γ|²)`), or with a full finite
/// sequence when the algorithm terminates at a unimodular value.
pub fn schur_prefix(f: &RationalSchur, max_len: usize, tol: &Tolerances) -> Result<SchurParams> {
    let mut g = f.normalized();
    let mut interior = Vec::new();
    while interior.len() < max_len {
        match schur_step(&g, tol) {
            Ok((gamma, next)) => {
                interior.push(gamma);
                g = next;
                if interior.len() >= 8 && interior.iter().rev().take(4).all(|c| c.norm() < 1e-13)
                {
                    break;
                }
            }
            Err(Error::NotStrictSchur { gamma, .. }) => {
                return SchurParams::finite(interior, gamma / gamma.norm(), tol);
            }
            Err(e) => return Err(e),
        }
    }
    SchurParams::prefix(interior, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn random_disk_points(rng: &mut ChaCha8Rng, count: usize, rmax: f64) -> Vec<Complex64> {
        (0..count)
            .map(|_| {
                Complex64::from_polar(
                    rng.random_range(0.05..rmax),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect()
    }

    #[test]
    fn schur_step_on_single_blaschke_factor() {
        let t = tol();
        let a = cplx(0.4, -0.3);
        let b = BlaschkeProduct::new(0.0, vec![a], &t).unwrap();
        let (gamma, next) = schur_step(&b.to_rational(), &t).unwrap();
        assert!((gamma + a).norm() < 1e-14, "gamma = {gamma}");
        // next is identically 1
        for z in interior_sample_points(8) {
            assert!((next.eval(z) - cplx(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn schur_step_fixes_zero() {
        let t = tol();
        let (gamma, next) = schur_step(&RationalSchur::zero(), &t).unwrap();
        assert_eq!(gamma, cplx(0.0, 0.0));
        for z in interior_sample_points(4) {
            assert!(next.eval(z).norm() < 1e-15);
        }
    }

    #[test]
    fn schur_step_decrements_blaschke_order() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let zs = random_disk_points(&mut rng, 4, 0.8);
        let b = BlaschkeProduct::new(1.3, zs, &t).unwrap();
        let (_, next) = schur_step(&b.to_rational(), &t).unwrap();
        // an order-3 Blaschke product: degree-3 numerator and |f| = 1 on the circle
        assert_eq!(next.num().degree(), Some(3));
        for z in unit_circle_points(64) {
            assert!((next.eval(z).norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn schur_step_rejects_unimodular_start() {
        let t = tol();
        let f = RationalSchur::constant(Complex64::from_polar(1.0, 0.7));
        assert!(matches!(
            schur_step(&f, &t),
            Err(Error::NotStrictSchur { .. })
        ));
    }

    #[test]
    fn params_of_pure_monomial_blaschke() {
        let t = tol();
        let phi = 2.1_f64;
        let b = BlaschkeProduct::new(phi, vec![cplx(0.0, 0.0); 4], &t).unwrap();
        let p = schur_params_of_blaschke(&b, &t).unwrap();
        assert_eq!(p.order(), 4);
        for g in p.interior() {
            assert!(g.norm() < 1e-13);
        }
        let term = p.terminal().unwrap();
        assert!((term - Complex64::from_polar(1.0, phi)).norm() < 1e-12);
    }

    #[test]
    fn params_of_single_zero_blaschke() {
        let t = tol();
        let a = cplx(0.25, 0.55);
        let b = BlaschkeProduct::new(0.0, vec![a], &t).unwrap();
        let p = schur_params_of_blaschke(&b, &t).unwrap();
        assert!((p.interior()[0] + a).norm() < 1e-13);
        assert!((p.terminal().unwrap() - cplx(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn blaschke_synthesis_inverts_analysis() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for order in [2usize, 5, 8, 12] {
            let zs = random_disk_points(&mut rng, order, 0.85);
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let b = BlaschkeProduct::new(phase, zs, &t).unwrap();
            let p = schur_params_of_blaschke(&b, &t).unwrap();
            let b2 = blaschke_from_schur_params(&p, &t).unwrap();
            assert_eq!(b2.order(), order);
            assert!(
                (b2.phase_factor() - b.phase_factor()).norm() < 1e-9,
                "phase mismatch at order {order}"
            );
            // zero multisets agree
            let mut used = vec![false; order];
            for z in b.zeros() {
                let (best, dist) = b2
                    .zeros()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !used[*i])
                    .map(|(i, w)| (i, (w - z).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                used[best] = true;
                assert!(
                    dist < t.eps_roots * 10.0,
                    "zero mismatch {dist} at order {order}"
                );
            }
        }
    }

    #[test]
    fn synthesis_of_empty_params_is_constant() {
        let t = tol();
        let p = SchurParams::finite(vec![], Complex64::from_polar(1.0, 0.9), &t).unwrap();
        let b = blaschke_from_schur_params(&p, &t).unwrap();
        assert_eq!(b.order(), 0);
        assert!((b.eval(cplx(0.3, 0.2)) - Complex64::from_polar(1.0, 0.9)).norm() < 1e-15);
    }

    #[test]
    fn synthesis_of_free_params_is_monomial() {
        let t = tol();
        let p = SchurParams::finite(vec![cplx(0.0, 0.0); 3], cplx(1.0, 0.0), &t).unwrap();
        let b = blaschke_from_schur_params(&p, &t).unwrap();
        assert_eq!(b.order(), 3);
        for z in b.zeros() {
            assert!(z.norm() < 1e-12);
        }
        let z = cplx(0.4, -0.2);
        assert!((b.eval(z) - z * z * z).norm() < 1e-12);
    }

    #[test]
    fn synthesis_of_single_parameter() {
        let t = tol();
        let a = cplx(0.3, 0.4);
        let p = SchurParams::finite(vec![-a], cplx(1.0, 0.0), &t).unwrap();
        let b = blaschke_from_schur_params(&p, &t).unwrap();
        assert_eq!(b.order(), 1);
        assert!((b.zeros()[0] - a).norm() < 1e-12);
        assert!(b.phase() < 1e-12 || (b.phase() - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn wall_pair_of_single_parameter() {
        let t = tol();
        let g = cplx(0.2, -0.6);
        let w = wall_pair(&[g], &t).unwrap();
        assert!((w.a().eval(cplx(0.5, 0.1)) - g).norm() < 1e-15);
        assert!(w.b().max_coeff_diff(&Poly::one()) < 1e-15);
        assert_eq!(w.bound(), 0);
    }

    #[test]
    fn wall_pair_of_zero_parameters() {
        let t = tol();
        let w = wall_pair(&[cplx(0.0, 0.0); 4], &t).unwrap();
        assert!(w.a().is_zero());
        assert!(w.b().max_coeff_diff(&Poly::one()) < 1e-15);
    }

    #[test]
    fn wall_pair_determinant_identity() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let gs = random_disk_points(&mut rng, 4, 0.8);
        let w = wall_pair(&gs, &t).unwrap();
        let n = w.bound();
        // B*B − A*A = c z^n with c = prod rho^2 > 0
        let lhs = w.b_star().mul(w.b()).sub(&w.a_star().mul(w.a()));
        let rhs = Poly::monomial(n).scale(cplx(w.constant(), 0.0));
        assert!(w.constant() > 0.0);
        assert!(
            lhs.max_coeff_diff(&rhs) < 1e-12,
            "gap {}",
            lhs.max_coeff_diff(&rhs)
        );
    }

    #[test]
    fn wall_pair_signature_identities() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let gs = random_disk_points(&mut rng, 5, 0.75);
        let w = wall_pair(&gs, &t).unwrap();
        // on the circle: W* j W = j
        for z in unit_circle_points(32) {
            let m = w.w_at(z);
            let j = [
                [cplx(-1.0, 0.0), cplx(0.0, 0.0)],
                [cplx(0.0, 0.0), cplx(1.0, 0.0)],
            ];
            let mut out = [[cplx(0.0, 0.0); 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    let mut acc = cplx(0.0, 0.0);
                    for k in 0..2 {
                        acc += m[k][r].conj() * j[k][k] * m[k][c];
                    }
                    out[r][c] = acc;
                }
            }
            assert!((out[0][0] - j[0][0]).norm() < t.eps_roots);
            assert!((out[1][1] - j[1][1]).norm() < t.eps_roots);
            assert!(out[0][1].norm() < t.eps_roots);
            assert!(out[1][0].norm() < t.eps_roots);
        }
        // inside: W* j W − j is positive semidefinite up to the eigenvalue floor
        for z in interior_sample_points(32) {
            let m = w.w_at(z);
            let jd = [-1.0, 1.0];
            let mut h = [[cplx(0.0, 0.0); 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    let mut acc = cplx(0.0, 0.0);
                    for k in 0..2 {
                        acc += m[k][r].conj() * m[k][c] * jd[k];
                    }
                    h[r][c] = acc;
                }
            }
            h[0][0] -= cplx(-1.0, 0.0);
            h[1][1] -= cplx(1.0, 0.0);
            // 2x2 Hermitian eigenvalue floor
            let tr = h[0][0].re + h[1][1].re;
            let det = h[0][0].re * h[1][1].re - h[0][1].norm_sqr();
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            let lmin = tr / 2.0 - disc;
            assert!(lmin >= -t.eps_roots, "eigenvalue floor {lmin} at z = {z}");
        }
    }

    #[test]
    fn parameter_scaling_under_rotation() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let zs = random_disk_points(&mut rng, 4, 0.8);
        let b = BlaschkeProduct::new(0.8, zs, &t).unwrap();
        let lambda = Complex64::from_polar(1.0, 1.9);
        let p = schur_params_of_blaschke(&b, &t).unwrap();
        let p_rot = schur_params_of_blaschke(&b.rotated(lambda), &t).unwrap();
        let gap = p_rot.max_param_diff(&p.scaled(lambda));
        assert!(gap < t.eps_roots, "scaling gap {gap}");
    }

    #[test]
    fn caratheodory_schur_pointwise_inverse() {
        let t = tol();
        // f = 0 -> F = 1 everywhere
        for z in interior_sample_points(4) {
            let f_val = caratheodory_from_schur(cplx(0.0, 0.0), z).unwrap();
            assert!((f_val - cplx(1.0, 0.0)).norm() < 1e-15);
            let back = schur_from_caratheodory(cplx(1.0, 0.0), z).unwrap();
            assert!(back.norm() < 1e-15);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..16 {
            let f_val = Complex64::from_polar(
                rng.random_range(0.0..0.95),
                rng.random_range(0.0..std::f64::consts::TAU),
            );
            let z = Complex64::from_polar(
                rng.random_range(0.05..0.9),
                rng.random_range(0.0..std::f64::consts::TAU),
            );
            let cf = caratheodory_from_schur(f_val, z).unwrap();
            let back = schur_from_caratheodory(cf, z).unwrap();
            assert!((back - f_val).norm() < t.eps_structural);
        }
        assert!(schur_from_caratheodory(cplx(1.0, 0.0), cplx(0.0, 0.0)).is_err());
    }

    #[test]
    fn product_check_trivial_cases() {
        let t = tol();
        // f = 0: both sides 1
        let p = SchurParams::prefix(vec![cplx(0.0, 0.0); 3], &t).unwrap();
        let rep = param_product_check(&p, &RationalSchur::zero(), 256, &t);
        assert!((rep.product_side - 1.0).abs() < 1e-15);
        assert!((rep.integral_side - 1.0).abs() < 1e-12);
        // f = c: both sides 1 − |c|^2
        let c0 = cplx(0.3, 0.4);
        let f = RationalSchur::constant(c0);
        let p = schur_prefix(&f, 64, &t).unwrap();
        let rep = param_product_check(&p, &f, 512, &t);
        let expect = 1.0 - c0.norm_sqr();
        assert!((rep.product_side - expect).abs() < 1e-13);
        assert!((rep.integral_side - expect).abs() < 1e-12);
    }

    #[test]
    fn product_check_scaled_blaschke() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let zs = random_disk_points(&mut rng, 3, 0.6);
        let b = BlaschkeProduct::new(0.4, zs, &t).unwrap();
        let c0 = 0.7;
        let rational = b.to_rational();
        let f = RationalSchur::new(
            rational.num().scale(cplx(c0, 0.0)),
            rational.den().clone(),
        )
        .unwrap();
        let p = schur_prefix(&f, 4096, &t).unwrap();
        assert!(p.terminal().is_none(), "scaled Blaschke is not inner");
        let rep = param_product_check(&p, &f, 2048, &t);
        assert!(
            rep.relative_gap < 1e-6,
            "gap {} (product {}, integral {})",
            rep.relative_gap,
            rep.product_side,
            rep.integral_side
        );
    }

    #[test]
    fn product_check_flags_inner_function() {
        let t = tol();
        let b = BlaschkeProduct::new(0.0, vec![cplx(0.3, 0.1)], &t).unwrap();
        let p = schur_params_of_blaschke(&b, &t).unwrap();
        let rep = param_product_check(&p, &b.to_rational(), 256, &t);
        assert!(rep.inner_detected);
        assert!(rep.product_side.abs() < 1e-15);
    }
}
