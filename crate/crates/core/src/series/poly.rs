use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use super::conv::convolve;

/// Dense polynomial with complex coefficients, lowest degree first.
///
/// Trailing exact zeros are removed so `degree` is well defined; the zero
/// polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = C64::new(1.0, 0.0);
        Self { coeffs }
    }

    /// `a + b z`
    pub fn linear(a: C64, b: C64) -> Self {
        Self::new(vec![a, b])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        roots.iter().fold(Self::constant(C64::new(1.0, 0.0)), |p, &r| {
            &p * &Self::linear(-r, C64::new(1.0, 0.0))
        })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_k| |z|^k`, the natural scale for rounding error in `eval`.
    pub fn eval_scale(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coefficients of `t -> p(c + t)`.
    pub fn taylor_at(&self, c: C64) -> Vec<C64> {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = a[j + 1];
                a[j] += c * next;
            }
        }
        a
    }

    /// Coefficients reversed and conjugated: `z^d conj(p(1 / conj z))`.
    pub fn reflect(&self, degree: usize) -> Self {
        let mut out = vec![C64::new(0.0, 0.0); degree + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if k <= degree {
                out[degree - k] = c.conj();
            }
        }
        Self::new(out)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let len = self.coeffs.len() + rhs.coeffs.len() - 1;
        Polynomial::new(convolve(&self.coeffs, &rhs.coeffs, len))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn from_roots_vanishes_at_roots() {
        let r = [c(0.5, 0.1), c(-0.2, 0.7), c(0.0, -1.5)];
        let p = Polynomial::from_roots(&r);
        assert_eq!(p.degree(), 3);
        for z in r {
            assert!(p.eval(z).norm() < 1e-14);
        }
    }

    #[test]
    fn taylor_shift_reproduces_values() {
        let p = Polynomial::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.25, 0.0), c(0.0, 1.0)]);
        let at = c(0.3, -0.4);
        let q = Polynomial::new(p.taylor_at(at));
        for t in [c(0.1, 0.0), c(-0.7, 0.2), c(1.3, 1.1)] {
            assert!((q.eval(t) - p.eval(at + t)).norm() < 1e-12);
        }
        assert!((q.coeff(1) - p.derivative().eval(at)).norm() < 1e-12);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 0);
        assert!(Polynomial::new(vec![c(0.0, 0.0)]).is_zero());
    }
}
