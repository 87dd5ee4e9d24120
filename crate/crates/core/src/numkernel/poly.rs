use crate::error::{Error, Result};
use num_complex::Complex64;

/// Default trailing-coefficient cutoff, relative to the largest coefficient
/// modulus. Matches `Tolerances::default().eps_deflate`.
pub const DEFAULT_DEFLATE: f64 = 1e-11;

/// Dense complex polynomial in ascending powers.
///
/// The stored degree is maintained by deflation: trailing coefficients at or
/// below `eps_deflate` times the largest coefficient modulus are trimmed on
/// construction. The zero polynomial has an empty coefficient vector and
/// `degree() == None`. Szegő steps and Schur steps produce exact leading or
/// constant-term cancellations; the deflation rule removes their floating
/// residue so degrees do not inflate over long recursions.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Canonicalize raw coefficients under an explicit deflation threshold.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>, eps_deflate: f64) -> Self {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
        let cut = eps_deflate * scale;
        while let Some(last) = coeffs.last() {
            if last.norm() <= cut {
                coeffs.pop();
            } else {
                break;
            }
        }
        Poly { coeffs }
    }

    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self::from_coeffs(coeffs, DEFAULT_DEFLATE)
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Poly { coeffs }
    }

    /// Monic polynomial with the prescribed root multiset.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Poly::one();
        for r in roots {
            p = p.mul(&Poly {
                coeffs: vec![-r, Complex64::new(1.0, 0.0)],
            });
        }
        p
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs
            .last()
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_monic(&self, eps: f64) -> bool {
        (self.leading() - Complex64::new(1.0, 0.0)).norm() <= eps
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * (k as f64))
            .collect();
        Poly::new(coeffs)
    }

    /// `k`-th derivative evaluated at `z`.
    pub fn eval_derivative(&self, z: Complex64, k: usize) -> Complex64 {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.derivative();
        }
        p.eval(z)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Poly::new(coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }

    /// Multiply by `z^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Divide by `z^k`, dropping the lowest `k` coefficients.
    ///
    /// The dropped entries are discarded regardless of value; callers use this
    /// where the algebra forces them to vanish exactly.
    pub fn shift_down(&self, k: usize) -> Poly {
        if self.coeffs.len() <= k {
            return Poly::zero();
        }
        Poly::new(self.coeffs[k..].to_vec())
    }

    /// Maximum coefficient-wise distance, comparing up to the longer length.
    pub fn max_coeff_diff(&self, other: &Poly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

/// The degree-`n` star conjugate `P*(z) = sum conj(p_{n-j}) z^j`, treating `p`
/// as a degree-`n` polynomial with zero padding.
///
/// Applying it twice with the same bound is the identity. Errors when `n` is
/// below the actual degree.
pub fn star(p: &Poly, n: usize) -> Result<Poly> {
    if let Some(d) = p.degree() {
        if n < d {
            return Err(Error::Argument(format!(
                "star: bound {n} is below the polynomial degree {d}"
            )));
        }
    }
    let coeffs = (0..=n).map(|j| p.coeff(n - j).conj()).collect();
    Ok(Poly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn star_of_linear_factor() {
        // z - a  ->  1 - conj(a) z
        let a = c(0.3, -0.4);
        let p = Poly::new(vec![-a, c(1.0, 0.0)]);
        let s = star(&p, 1).unwrap();
        assert!((s.coeff(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.coeff(1) + a.conj()).norm() < 1e-15);
    }

    #[test]
    fn star_of_constant_is_self_conjugate() {
        let s = star(&Poly::one(), 0).unwrap();
        assert_eq!(s, Poly::one());
    }

    #[test]
    fn star_is_involution_on_random_input() {
        let p = Poly::new(vec![
            c(0.3, 0.7),
            c(-1.2, 0.1),
            c(0.0, -0.9),
            c(2.0, 0.4),
            c(-0.6, -0.2),
            c(1.1, 0.8),
        ]);
        let q = star(&star(&p, 5).unwrap(), 5).unwrap();
        assert!(p.max_coeff_diff(&q) < 1e-12);
    }

    #[test]
    fn star_rejects_small_bound() {
        let p = Poly::monomial(3);
        assert!(star(&p, 2).is_err());
    }

    #[test]
    fn degree_bookkeeping_deflates_trailing_residue() {
        let p = Poly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-14, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        assert!(Poly::new(vec![c(0.0, 0.0)]).is_zero());
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn eval_and_derivative() {
        // p = 1 + 2z + 3z^2
        let p = Poly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let z = c(0.5, 0.5);
        assert!((p.eval(z) - (c(1.0, 0.0) + z * 2.0 + z * z * 3.0)).norm() < 1e-14);
        let d = p.derivative();
        assert!((d.eval(z) - (c(2.0, 0.0) + z * 6.0)).norm() < 1e-14);
    }

    #[test]
    fn from_roots_expands_and_evaluates_to_zero() {
        let zs = [c(0.2, 0.3), c(-0.5, 0.1), c(0.0, -0.7)];
        let p = Poly::from_roots(&zs);
        assert_eq!(p.degree(), Some(3));
        assert!(p.is_monic(1e-15));
        for z in zs {
            assert!(p.eval(z).norm() < 1e-14);
        }
    }
}
