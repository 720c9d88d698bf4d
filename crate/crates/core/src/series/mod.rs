//! Polynomials, truncated power series and polynomial roots.

mod conv;
mod poly;
mod roots;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) use conv::{convolve, correlate_conj};
pub use poly::Polynomial;
pub use roots::{cluster_values, poly_roots, poly_roots_flat, Root, TOL_CLUSTER, TOL_ROOT};

/// Target for the l1 mass of discarded coefficients.
pub const TAIL_TARGET: f64 = 1e-12;
/// Largest truncation any routine will allocate.
pub const MAX_TRUNCATION: usize = 16384;

/// A power series known through degree `N` together with a bound on what
/// was discarded.
///
/// `tail_bound` bounds `sum_{k > N} |c_k|`. The pair `(bound, decay_rate)`
/// is a geometric model `|c_k| <= bound * decay_rate^k` of the discarded
/// coefficients. For Taylor series of Blaschke products it comes from the
/// Cauchy estimate and holds for every `k`; for series obtained by
/// arithmetic it is fitted to the propagated tail bound.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<C64>,
    decay_rate: f64,
    bound: f64,
    tail_bound: f64,
}

fn geometric_tail(bound: f64, rate: f64, n: usize) -> f64 {
    if bound == 0.0 || rate == 0.0 {
        return 0.0;
    }
    bound * rate.powf(n as f64 + 1.0) / (1.0 - rate)
}

/// Smallest `N` with `bound * rate^(N+1) / (1 - rate) < TAIL_TARGET`.
pub fn default_truncation(rate: f64, bound: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::domain(format!("decay rate {rate} outside [0, 1)")));
    }
    if rate == 0.0 || bound == 0.0 {
        return Ok(0);
    }
    let need = ((TAIL_TARGET * (1.0 - rate) / bound).ln() / rate.ln()).ceil() - 1.0;
    let n = need.max(0.0) as usize;
    if n > MAX_TRUNCATION {
        return Err(Error::numerical(format!(
            "truncation {n} needed for decay rate {rate:.6} exceeds {MAX_TRUNCATION}"
        )));
    }
    Ok(n)
}

impl PowerSeries {
    /// A polynomial known exactly: no tail.
    pub fn exact(coeffs: Vec<C64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![C64::new(0.0, 0.0)] } else { coeffs };
        Self { coeffs, decay_rate: 0.0, bound: 0.0, tail_bound: 0.0 }
    }

    /// A polynomial cut or padded to degree `n`.
    pub fn from_polynomial(p: &Polynomial, n: usize) -> Self {
        let mut c = p.coeffs().to_vec();
        c.resize(c.len().max(n + 1), C64::new(0.0, 0.0));
        Self::exact(c).truncate(n)
    }

    /// Series with a geometric envelope; the tail bound follows from it.
    pub fn with_envelope(coeffs: Vec<C64>, decay_rate: f64, bound: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&decay_rate) || !(bound >= 0.0) || coeffs.is_empty() {
            return Err(Error::domain("invalid power series envelope"));
        }
        let n = coeffs.len() - 1;
        let tail_bound = geometric_tail(bound, decay_rate, n);
        Ok(Self { coeffs, decay_rate, bound, tail_bound })
    }

    /// Series whose tail is known only through `tail`; the envelope is
    /// fitted so that it sums to exactly that tail.
    pub(crate) fn with_tail(coeffs: Vec<C64>, decay_rate: f64, tail: f64) -> Self {
        let n = coeffs.len() - 1;
        if tail == 0.0 {
            return Self::exact(coeffs);
        }
        let rate = if decay_rate > 0.0 { decay_rate } else { 0.5 };
        let bound = tail * (1.0 - rate) / rate.powf(n as f64 + 1.0);
        let bound = if bound.is_finite() { bound } else { f64::MAX };
        Self { coeffs, decay_rate: rate, bound, tail_bound: tail }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Highest retained degree `N`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn is_exact(&self) -> bool {
        self.tail_bound == 0.0
    }

    /// `sum_{k <= N} |c_k|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Value at `|z| <= 1`; the error is at most `tail_bound`.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Cut to degree `n`; dropped coefficients join the tail.
    pub fn truncate(&self, n: usize) -> Self {
        if n >= self.truncation() {
            let mut c = self.coeffs.clone();
            if self.is_exact() {
                c.resize(n + 1, C64::new(0.0, 0.0));
                return Self::exact(c);
            }
            return self.clone();
        }
        let dropped: f64 = self.coeffs[n + 1..].iter().map(|c| c.norm()).sum();
        Self::with_tail(self.coeffs[..=n].to_vec(), self.decay_rate, dropped + self.tail_bound)
    }

    fn common_truncation(&self, other: &Self) -> usize {
        match (self.is_exact(), other.is_exact()) {
            (true, true) => self.truncation().max(other.truncation()),
            (true, false) => other.truncation(),
            (false, true) => self.truncation(),
            (false, false) => self.truncation().min(other.truncation()),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            decay_rate: self.decay_rate,
            bound: self.bound * s.norm(),
            tail_bound: self.tail_bound * s.norm(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, C64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &Self, s: C64) -> Self {
        let n = self.common_truncation(other);
        let (a, b) = (self.truncate(n), other.truncate(n));
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + s * y).collect();
        Self::with_tail(coeffs, a.decay_rate.max(b.decay_rate), a.tail_bound + b.tail_bound)
    }

    /// Cauchy product at the common truncation.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact() && other.is_exact() {
            // polynomial product, kept in full
            let len = self.coeffs.len() + other.coeffs.len() - 1;
            return Self::exact(convolve(&self.coeffs, &other.coeffs, len));
        }
        let n = self.common_truncation(other);
        let (f, g) = (self.truncate(n), other.truncate(n));
        let coeffs = convolve(&f.coeffs, &g.coeffs, n + 1);
        let (nf, ng) = (f.l1_norm(), g.l1_norm());
        let abs = |s: &Self| -> Vec<C64> { s.coeffs.iter().map(|c| C64::new(c.norm(), 0.0)).collect() };
        let low: f64 = convolve(&abs(&f), &abs(&g), n + 1).iter().map(|c| c.re).sum();
        let cross = (nf * ng - low).max(0.0);
        let tail = cross + nf * g.tail_bound + ng * f.tail_bound + f.tail_bound * g.tail_bound;
        Self::with_tail(coeffs, f.decay_rate.max(g.decay_rate), tail)
    }

    /// `f / (1 - conj(lambda) z)` for `|lambda| < 1`.
    pub fn div_linear(&self, lambda: C64) -> Result<Self> {
        let r = lambda.norm();
        if r >= 1.0 {
            return Err(Error::domain(format!("|lambda| = {r} is not below 1")));
        }
        let lc = lambda.conj();
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut prev = C64::new(0.0, 0.0);
        for c in &self.coeffs {
            prev = c + lc * prev;
            out.push(prev);
        }
        let n = self.truncation();
        let mut tail = self.tail_bound / (1.0 - r);
        if r > 0.0 {
            tail += self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.norm() * r.powi((n + 1 - i) as i32))
                .sum::<f64>()
                / (1.0 - r);
        }
        Ok(Self::with_tail(out, self.decay_rate.max(r), tail))
    }

    /// Term-wise derivative, known through degree `N - 1`.
    pub fn derivative(&self) -> Self {
        let n = self.truncation();
        if n == 0 {
            return Self::with_tail(vec![C64::new(0.0, 0.0)], self.decay_rate, self.derivative_tail(0));
        }
        let coeffs = (1..=n).map(|k| self.coeffs[k] * k as f64).collect();
        Self::with_tail(coeffs, self.decay_rate, self.derivative_tail(n))
    }

    /// Bound on `sum_{k > n} k |c_k|` from the envelope.
    fn derivative_tail(&self, n: usize) -> f64 {
        let (c, r) = (self.bound, self.decay_rate);
        if c == 0.0 || r == 0.0 {
            return 0.0;
        }
        let m = n as f64 + 1.0;
        c * r.powf(m) * (m - (m - 1.0) * r) / ((1.0 - r) * (1.0 - r))
    }

    /// `z f`, known through degree `N + 1`.
    pub fn mul_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        if self.is_exact() {
            return Self::exact(coeffs);
        }
        Self {
            coeffs,
            decay_rate: self.decay_rate,
            bound: (self.bound / self.decay_rate).min(f64::MAX),
            tail_bound: self.tail_bound,
        }
    }

    /// `f / z`, requiring `|f(0)| <= tol`.
    pub fn div_z(&self, tol: f64) -> Result<Self> {
        if self.coeffs[0].norm() > tol {
            return Err(Error::domain(format!(
                "series does not vanish at 0 (|f(0)| = {:.3e})",
                self.coeffs[0].norm()
            )));
        }
        let coeffs = if self.coeffs.len() > 1 { self.coeffs[1..].to_vec() } else { vec![C64::new(0.0, 0.0)] };
        Ok(Self::with_tail(coeffs, self.decay_rate, self.tail_bound))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn multiply_by_one_is_identity() {
        let f = PowerSeries::exact(vec![c(1.0, 0.0), c(2.0, -1.0), c(0.5, 0.5)]);
        let one = PowerSeries::exact(vec![c(1.0, 0.0)]);
        assert_eq!(f.mul(&one).coeffs(), f.coeffs());
        assert_eq!(f.mul(&one).tail_bound(), 0.0);
    }

    #[test]
    fn geometric_series_by_division() {
        // 1 / (1 - z/2) = sum 2^-k z^k
        let one = PowerSeries::exact(vec![c(1.0, 0.0); 1]).truncate(40);
        let g = one.div_linear(c(0.5, 0.0)).unwrap();
        for k in 0..=40 {
            assert!((g.coeff(k).re - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
        let true_tail = 0.5f64.powi(41) / 0.5;
        assert!(g.tail_bound() >= true_tail * (1.0 - 1e-12));
    }

    #[test]
    fn product_tail_covers_dropped_terms() {
        let f = PowerSeries::exact(vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let g = f.mul(&f).truncate(2);
        // (1 + z + z^2)^2 = 1 + 2z + 3z^2 + 2z^3 + z^4
        assert!((g.coeff(2).re - 3.0).abs() < 1e-15);
        assert!((g.tail_bound() - 3.0).abs() < 1e-12);
        let h = g.mul(&PowerSeries::exact(vec![c(1.0, 0.0)]));
        assert!(h.tail_bound() >= 3.0);
    }

    #[test]
    fn derivative_of_polynomial() {
        let f = PowerSeries::exact(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let d = f.derivative();
        assert_eq!(d.coeffs(), &[c(2.0, 0.0), c(6.0, 0.0)]);
        assert!(d.is_exact());
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(default_truncation(0.0, 1.0).unwrap(), 0);
        let n = default_truncation(0.5, 1.0).unwrap();
        assert!(0.5f64.powi(n as i32 + 1) / 0.5 < TAIL_TARGET);
        assert!(0.5f64.powi(n as i32) / 0.5 >= TAIL_TARGET);
        assert!(default_truncation(0.99999, 1.0).is_err());
    }

    #[test]
    fn div_z_requires_vanishing() {
        let f = PowerSeries::exact(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(f.div_z(1e-12).is_err());
        let g = PowerSeries::exact(vec![c(0.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(g.div_z(1e-12).unwrap().coeffs(), &[c(2.0, 0.0)]);
    }
}
