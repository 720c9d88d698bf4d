//! Weighted coefficient spaces on the disc.
//!
//! A function `f = sum c_k z^k` has norm `sum w_k |c_k|^2` with weights
//! `1` (Hardy), `1 / (k + 1)` (Bergman) and `k + 1` (Dirichlet). Linear
//! algebra is done in the orthonormal coordinates `x_k = sqrt(w_k) c_k`.

use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{default_truncation, PowerSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Hardy,
    Bergman,
    Dirichlet,
}

impl SpaceKind {
    pub fn weight(self, k: usize) -> f64 {
        match self {
            SpaceKind::Hardy => 1.0,
            SpaceKind::Bergman => 1.0 / (k as f64 + 1.0),
            SpaceKind::Dirichlet => k as f64 + 1.0,
        }
    }

    /// `sqrt(weight(k))`, the scaling to orthonormal coordinates.
    pub fn nu(self, k: usize) -> f64 {
        self.weight(k).sqrt()
    }

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Hardy => "hardy",
            SpaceKind::Bergman => "bergman",
            SpaceKind::Dirichlet => "dirichlet",
        }
    }
}

impl std::str::FromStr for SpaceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hardy" | "h2" => Ok(SpaceKind::Hardy),
            "bergman" | "l2a" => Ok(SpaceKind::Bergman),
            "dirichlet" | "d" => Ok(SpaceKind::Dirichlet),
            other => Err(Error::input(format!("unknown space `{other}`"))),
        }
    }
}

/// A truncated element of one of the three spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffVector {
    series: PowerSeries,
    space: SpaceKind,
}

impl CoeffVector {
    pub fn new(series: PowerSeries, space: SpaceKind) -> Self {
        Self { series, space }
    }

    /// Exact coefficients, no tail.
    pub fn from_coeffs(coeffs: Vec<C64>, space: SpaceKind) -> Self {
        Self::new(PowerSeries::exact(coeffs), space)
    }

    pub fn monomial(k: usize, n: usize, space: SpaceKind) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); n.max(k) + 1];
        c[k] = C64::new(1.0, 0.0);
        Self::from_coeffs(c, space)
    }

    /// Element with orthonormal coordinates `x`.
    pub fn from_orthonormal(x: &[C64], space: SpaceKind) -> Self {
        let c = x.iter().enumerate().map(|(k, v)| v / space.nu(k)).collect();
        Self::from_coeffs(c, space)
    }

    pub fn series(&self) -> &PowerSeries {
        &self.series
    }

    pub fn coeffs(&self) -> &[C64] {
        self.series.coeffs()
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn truncation(&self) -> usize {
        self.series.truncation()
    }

    /// Same coefficients regarded as an element of another space.
    pub fn in_space(&self, space: SpaceKind) -> Self {
        Self { series: self.series.clone(), space }
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.series.truncate(n), self.space)
    }

    pub fn to_orthonormal(&self) -> DVector<C64> {
        DVector::from_iterator(
            self.coeffs().len(),
            self.coeffs().iter().enumerate().map(|(k, c)| c * self.space.nu(k)),
        )
    }

    /// Orthonormal coordinates padded or cut to length `n + 1`.
    pub fn to_orthonormal_len(&self, n: usize) -> DVector<C64> {
        DVector::from_fn(n + 1, |k, _| self.series.coeff(k) * self.space.nu(k))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| self.space.weight(k) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.series.eval(z)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.series.scale(s), self.space)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.series.add(&other.series), self.space)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.series.sub(&other.series), self.space)
    }

    /// Product with a power series, kept at this vector's truncation.
    pub fn mul_series(&self, s: &PowerSeries) -> Self {
        let s = if s.is_exact() || s.truncation() >= self.truncation() { s.truncate(self.truncation()) } else { s.clone() };
        let f = if self.series.is_exact() && s.truncation() == self.truncation() {
            self.series.clone()
        } else {
            self.series.truncate(s.truncation().min(self.truncation()))
        };
        Self::new(f.mul(&s).truncate(self.truncation()), self.space)
    }

    pub fn div_z(&self, tol: f64) -> Result<Self> {
        Ok(Self::new(self.series.div_z(tol)?, self.space))
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.series.derivative(), self.space)
    }

    /// Largest orthonormal-coordinate mass in the last `frac` of the indices,
    /// relative to the norm. Small values mean the truncation resolves `f`.
    pub fn tail_fraction(&self, frac: f64) -> f64 {
        let x = self.to_orthonormal();
        let n = x.len();
        let start = ((1.0 - frac) * n as f64).floor() as usize;
        let tail: f64 = x.iter().skip(start).map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let total = x.norm();
        if total == 0.0 { 0.0 } else { tail / total }
    }
}

/// An inner product with a bound on the truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerProduct {
    pub value: C64,
    pub error_bound: f64,
}

fn geometric_weighted_sum(space: SpaceKind, rho: f64, from: usize) -> f64 {
    // sum_{k >= from} w_k rho^k, with w_k <= 1 for Hardy and Bergman
    if rho == 0.0 {
        return 0.0;
    }
    let m = from as f64;
    let head = rho.powf(m);
    match space {
        SpaceKind::Hardy | SpaceKind::Bergman => head / (1.0 - rho),
        SpaceKind::Dirichlet => head * ((m + 1.0) - m * rho) / ((1.0 - rho) * (1.0 - rho)),
    }
}

/// `<f, g>` in the common space of `f` and `g`.
pub fn inner(f: &CoeffVector, g: &CoeffVector) -> Result<InnerProduct> {
    if f.space != g.space {
        return Err(Error::domain(format!(
            "inner product of {} and {} elements",
            f.space.name(),
            g.space.name()
        )));
    }
    let space = f.space;
    let n = f.truncation().min(g.truncation());
    let value = (0..=n)
        .map(|k| f.series.coeff(k) * g.series.coeff(k).conj() * space.weight(k))
        .sum();

    let (fs, gs) = (&f.series, &g.series);
    let error_bound = match space {
        SpaceKind::Hardy | SpaceKind::Bergman => {
            let beyond = |s: &PowerSeries| s.coeffs().iter().skip(n + 1).map(|c| c.norm()).sum::<f64>() + s.tail_bound();
            beyond(fs) * beyond(gs)
        }
        SpaceKind::Dirichlet => {
            let m = f.truncation().max(g.truncation());
            let env = |s: &PowerSeries, k: usize| -> f64 {
                if k <= s.truncation() {
                    s.coeff(k).norm()
                } else {
                    s.bound() * s.decay_rate().powi(k as i32)
                }
            };
            let mid: f64 = (n + 1..=m).map(|k| space.weight(k) * env(fs, k) * env(gs, k)).sum();
            let far = if fs.is_exact() || gs.is_exact() {
                0.0
            } else {
                fs.bound() * gs.bound() * geometric_weighted_sum(space, fs.decay_rate() * gs.decay_rate(), m + 1)
            };
            mid + far
        }
    };
    Ok(InnerProduct { value, error_bound })
}

/// `D(f) = sum_k k |c_k|^2`, the area of the image counted with multiplicity
/// divided by pi.
pub fn dirichlet_energy(f: &CoeffVector) -> f64 {
    f.coeffs().iter().enumerate().map(|(k, c)| k as f64 * c.norm_sqr()).sum()
}

/// Scan `bound(k) / r^k` for `r = (1 + rho) / 2` to turn a polynomially
/// modulated geometric bound into a pure geometric envelope.
fn fit_envelope(rho: f64, bound: impl Fn(usize) -> f64) -> (f64, f64) {
    let r = 0.5 * (1.0 + rho);
    let mut best: f64 = 0.0;
    let mut k = 0usize;
    loop {
        let v = bound(k) / r.powi(k as i32);
        best = best.max(v);
        if (k > 64 && v < 1e-3 * best) || k > 200_000 {
            break;
        }
        k += 1;
    }
    (best, r)
}

/// Reproducing kernel `K_lambda` with `<f, K_lambda> = f(lambda)`.
pub fn kernel_vector(lambda: C64, space: SpaceKind, n: Option<usize>) -> Result<CoeffVector> {
    kernel_derivative_vector(lambda, 0, space, n)
}

/// Kernel for the `d`-th derivative: `<f, K> = f^{(d)}(lambda)`.
pub fn kernel_derivative_vector(lambda: C64, d: usize, space: SpaceKind, n: Option<usize>) -> Result<CoeffVector> {
    let rho = lambda.norm();
    if !(rho < 1.0) {
        return Err(Error::domain(format!("kernel point |lambda| = {rho} is not below 1")));
    }
    // |c_k| = k!/(k-d)! rho^(k-d) / w_k
    let falling = |k: usize| -> f64 { (0..d).map(|i| (k - i) as f64).product() };
    let modulus = |k: usize| -> f64 {
        if k < d {
            0.0
        } else {
            falling(k) * rho.powi((k - d) as i32) / space.weight(k)
        }
    };
    if rho == 0.0 {
        let mut c = vec![C64::new(0.0, 0.0); n.unwrap_or(d).max(d) + 1];
        c[d] = C64::new(falling(d) / space.weight(d), 0.0);
        return Ok(CoeffVector::from_coeffs(c, space));
    }
    let (bound, r) = fit_envelope(rho, modulus);
    let n = match n {
        Some(n) => n,
        None => default_truncation(r, bound)?.max(d),
    };
    let lc = lambda.conj();
    let coeffs: Vec<C64> = (0..=n)
        .map(|k| {
            if k < d {
                C64::new(0.0, 0.0)
            } else {
                lc.powi((k - d) as i32) * (falling(k) / space.weight(k))
            }
        })
        .collect();
    Ok(CoeffVector::new(PowerSeries::with_envelope(coeffs, r, bound)?, space))
}

/// Closed-form `K_lambda(lambda) = ||K_lambda||^2`.
pub fn kernel_norm_sqr(lambda: C64, space: SpaceKind) -> f64 {
    let t = lambda.norm_sqr();
    match space {
        SpaceKind::Hardy => 1.0 / (1.0 - t),
        SpaceKind::Bergman => 1.0 / ((1.0 - t) * (1.0 - t)),
        SpaceKind::Dirichlet => {
            if t == 0.0 { 1.0 } else { (1.0 / t) * (1.0 / (1.0 - t)).ln() }
        }
    }
}

/// Poisson kernel `(1 - |lambda|^2) / |zeta - lambda|^2` for `|zeta| = 1`.
pub fn poisson_eval(lambda: C64, zeta: C64) -> Result<f64> {
    if lambda.norm() >= 1.0 {
        return Err(Error::domain("Poisson kernel needs |lambda| < 1"));
    }
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::domain("Poisson kernel is evaluated on the unit circle"));
    }
    Ok((1.0 - lambda.norm_sqr()) / (zeta - lambda).norm_sqr())
}

/// Result of a trapezoid rule with an accuracy estimate from the half rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: C64,
    pub accuracy: f64,
}

/// Node count used when the caller does not choose one.
pub fn default_quadrature_nodes(n_eff: usize) -> usize {
    256.max(8 * n_eff)
}

/// `(1 / 2 pi) int f conj(g) d theta` by the `m`-point trapezoid rule.
pub fn circle_pair_integral(f: impl Fn(C64) -> C64, g: impl Fn(C64) -> C64, m: usize) -> Result<Quadrature> {
    if m < 2 {
        return Err(Error::domain("quadrature needs at least two nodes"));
    }
    let mut full = C64::new(0.0, 0.0);
    let mut even = C64::new(0.0, 0.0);
    for k in 0..m {
        let z = C64::from_polar(1.0, TAU * k as f64 / m as f64);
        let v = f(z) * g(z).conj();
        full += v;
        if k % 2 == 0 {
            even += v;
        }
    }
    let value = full / m as f64;
    let half = even / m.div_ceil(2) as f64;
    Ok(Quadrature { value, accuracy: (value - half).norm() })
}

/// `U f = (z f)'`, an isometry of the Dirichlet space onto the Bergman space.
pub fn u_map(f: &CoeffVector) -> Result<CoeffVector> {
    if f.space() != SpaceKind::Dirichlet {
        return Err(Error::domain("U is defined on the Dirichlet space"));
    }
    Ok(CoeffVector::new(f.series.mul_z().derivative(), SpaceKind::Bergman))
}

/// `(U_alpha f)(z) = f(phi_alpha(z)) (1 - |alpha|^2) / (1 - conj(alpha) z)^2`,
/// a self-inverse unitary of the Bergman space, computed by sampling on the
/// circle.
pub fn bergman_moebius_unitary(alpha: C64, f: &CoeffVector, n_out: usize) -> Result<CoeffVector> {
    if f.space() != SpaceKind::Bergman {
        return Err(Error::domain("U_alpha acts on the Bergman space"));
    }
    if !(alpha.norm() < 1.0) {
        return Err(Error::domain("U_alpha needs |alpha| < 1"));
    }
    let m = (8 * (n_out.max(f.truncation()) + 1)).max(256).next_power_of_two();
    let one = C64::new(1.0, 0.0);
    let s = 1.0 - alpha.norm_sqr();
    let mut buf: Vec<C64> = (0..m)
        .map(|k| {
            let z = C64::from_polar(1.0, TAU * k as f64 / m as f64);
            let d = one - alpha.conj() * z;
            f.eval((alpha - z) / d) * s / (d * d)
        })
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    let coeffs: Vec<C64> = buf.iter().take(n_out + 1).map(|c| c * scale).collect();
    let tail: f64 = buf.iter().skip(n_out + 1).take(m / 2).map(|c| c.norm() * scale).sum();
    Ok(CoeffVector::new(PowerSeries::with_tail(coeffs, 0.0, tail), SpaceKind::Bergman))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::BlaschkeProduct;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn norms_of_monomials() {
        for (space, expect) in [(SpaceKind::Hardy, 1.0), (SpaceKind::Bergman, 0.25), (SpaceKind::Dirichlet, 4.0)] {
            let z3 = CoeffVector::monomial(3, 5, space);
            assert!((inner(&z3, &z3).unwrap().value.re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn dirichlet_norm_splits_into_hardy_plus_energy() {
        let f = CoeffVector::from_coeffs(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)], SpaceKind::Dirichlet);
        let h = f.in_space(SpaceKind::Hardy);
        let d = inner(&f, &f).unwrap().value.re;
        assert!((d - (h.norm().powi(2) + dirichlet_energy(&f))).abs() < 1e-12);
    }

    #[test]
    fn kernel_reproduces_values() {
        let lambda = c(0.3, -0.4);
        let phi = BlaschkeProduct::new(0.5, vec![c(0.2, 0.1), c(-0.5, 0.3)]).unwrap();
        let n = 200;
        for space in [SpaceKind::Hardy, SpaceKind::Bergman, SpaceKind::Dirichlet] {
            let f = CoeffVector::new(phi.taylor(Some(n)).unwrap(), space);
            let k = kernel_vector(lambda, space, Some(n)).unwrap();
            let ip = inner(&f, &k).unwrap();
            assert!((ip.value - phi.eval(lambda).unwrap()).norm() < 1e-12, "{space:?}");
            let kk = inner(&k, &k).unwrap().value.re;
            assert!((kk - kernel_norm_sqr(lambda, space)).abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_kernel_reproduces_derivatives() {
        let lambda = c(0.25, 0.5);
        let phi = BlaschkeProduct::new(0.0, vec![c(0.6, 0.0), c(0.0, -0.3)]).unwrap();
        let f = CoeffVector::new(phi.taylor(Some(300)).unwrap(), SpaceKind::Dirichlet);
        let k = kernel_derivative_vector(lambda, 1, SpaceKind::Dirichlet, Some(300)).unwrap();
        let ip = inner(&f, &k).unwrap().value;
        assert!((ip - phi.derivative_at(lambda)).norm() < 1e-10);
    }

    #[test]
    fn kernel_at_zero_is_constant_one() {
        let k = kernel_vector(c(0.0, 0.0), SpaceKind::Dirichlet, Some(4)).unwrap();
        assert_eq!(k.coeffs()[0], c(1.0, 0.0));
        assert!(k.coeffs()[1..].iter().all(|x| x.norm() == 0.0));
        assert!(kernel_vector(c(1.0, 0.0), SpaceKind::Hardy, None).is_err());
    }

    #[test]
    fn poisson_integrates_to_one() {
        let lambda = c(0.5, 0.2);
        let q = circle_pair_integral(|z| C64::new(poisson_eval(lambda, z / z.norm()).unwrap(), 0.0), |_| c(1.0, 0.0), 512)
            .unwrap();
        assert!((q.value - c(1.0, 0.0)).norm() < 1e-12);
        assert!(poisson_eval(lambda, c(0.5, 0.0)).is_err());
    }

    #[test]
    fn u_map_is_isometric() {
        let f = CoeffVector::from_coeffs(vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0), c(0.5, 0.0)], SpaceKind::Dirichlet);
        let u = u_map(&f).unwrap();
        assert_eq!(u.space(), SpaceKind::Bergman);
        assert!((u.norm() - f.norm()).abs() < 1e-13);
        assert!(u_map(&f.in_space(SpaceKind::Hardy)).is_err());
    }

    #[test]
    fn moebius_unitary_is_involutive_isometry() {
        let alpha = c(0.3, 0.2);
        let f = CoeffVector::from_coeffs(vec![c(1.0, 0.0), c(0.5, -0.5), c(0.0, 0.3), c(0.2, 0.0)], SpaceKind::Bergman);
        let g = bergman_moebius_unitary(alpha, &f, 200).unwrap();
        assert!((g.norm() - f.norm()).abs() < 1e-12);
        let h = bergman_moebius_unitary(alpha, &g, 200).unwrap();
        let diff = h.truncate(3).sub(&f).norm();
        assert!(diff < 1e-12, "{diff}");
    }
}
