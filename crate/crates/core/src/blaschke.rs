//! Finite Blaschke products `e^{i theta} prod (lambda_i - z) / (1 - conj(lambda_i) z)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{convolve, default_truncation, poly_roots, Polynomial, PowerSeries, Root, MAX_TRUNCATION};

/// Points with `|z|` up to `1 + BOUNDARY_SLACK` count as closed-disc points.
const BOUNDARY_SLACK: f64 = 1e-12;
/// Tolerance for `|phi(z) - w|` at computed preimages.
const PREIMAGE_TOL: f64 = 1e-10;

/// Taylor coefficients of `phi_lambda` through degree `n`:
/// `lambda, -(1 - |lambda|^2) conj(lambda)^(k-1)`.
fn moebius_coeffs(lambda: C64, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(lambda);
    let mut p = C64::new(-(1.0 - lambda.norm_sqr()), 0.0);
    for _ in 1..=n {
        out.push(p);
        p *= lambda.conj();
    }
    out
}

/// Finite Blaschke product. Zeros are stored with repetition; the phase is
/// normalised to `[0, 2 pi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlaschkeProduct {
    phase: f64,
    zeros: Vec<C64>,
}

fn unit(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

fn normalise_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU { 0.0 } else { t }
}

/// The disc automorphism `(lambda - z) / (1 - conj(lambda) z)`.
pub fn moebius(lambda: C64, z: C64) -> C64 {
    (lambda - z) / (C64::new(1.0, 0.0) - lambda.conj() * z)
}

impl BlaschkeProduct {
    pub fn new(phase: f64, zeros: Vec<C64>) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::domain("phase must be finite"));
        }
        for z in &zeros {
            if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 {
                return Err(Error::domain(format!("zero {z} is not inside the open unit disc")));
            }
        }
        Ok(Self { phase: normalise_phase(phase), zeros })
    }

    /// The single factor `phi_lambda`.
    pub fn moebius(lambda: C64) -> Result<Self> {
        Self::new(0.0, vec![lambda])
    }

    /// The function `z^n`, written as `(-1)^n prod phi_0`.
    pub fn z_power(n: usize) -> Self {
        Self { phase: normalise_phase(PI * n as f64), zeros: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn unimodular(&self) -> C64 {
        unit(self.phase)
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn order(&self) -> usize {
        self.zeros.len()
    }

    pub fn max_zero_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Reject products with a zero closer than `delta` to the circle.
    pub fn check_margin(&self, delta: f64) -> Result<()> {
        let m = self.max_zero_modulus();
        if m > 1.0 - delta {
            return Err(Error::input(format!(
                "zero of modulus {m} lies within {delta} of the unit circle"
            )));
        }
        Ok(())
    }

    pub(crate) fn value(&self, z: C64) -> C64 {
        self.zeros.iter().fold(self.unimodular(), |acc, &l| acc * moebius(l, z))
    }

    /// Value on the closed disc.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if !(z.norm() <= 1.0 + BOUNDARY_SLACK) {
            return Err(Error::domain(format!("|z| = {} exceeds 1", z.norm())));
        }
        Ok(self.value(z))
    }

    /// `phi'(z) = phi(z) * sum (|lambda|^2 - 1) / ((lambda - z)(1 - conj(lambda) z))`,
    /// evaluated through the quotient rule so zeros of `phi` are harmless.
    pub fn derivative_at(&self, z: C64) -> C64 {
        let num = self.numerator();
        let den = self.denominator();
        let d = den.eval(z);
        (num.derivative().eval(z) * d - num.eval(z) * den.derivative().eval(z)) / (d * d)
    }

    /// `e^{i theta} prod (lambda_i - z)`.
    pub fn numerator(&self) -> Polynomial {
        let p = self
            .zeros
            .iter()
            .fold(Polynomial::constant(C64::new(1.0, 0.0)), |p, &l| &p * &Polynomial::linear(l, C64::new(-1.0, 0.0)));
        p.scale(self.unimodular())
    }

    /// `prod (1 - conj(lambda_i) z)`.
    pub fn denominator(&self) -> Polynomial {
        self.zeros
            .iter()
            .fold(Polynomial::constant(C64::new(1.0, 0.0)), |p, &l| {
                &p * &Polynomial::linear(C64::new(1.0, 0.0), -l.conj())
            })
    }

    /// Cauchy envelope `|c_k| <= C r^k`, chosen among admissible radii to
    /// minimise the truncation it implies. Returns `(C, r)`; `r = 0` for a
    /// monomial.
    pub fn cauchy_envelope(&self) -> (f64, f64) {
        let rho = self.max_zero_modulus();
        if rho == 0.0 {
            return (0.0, 0.0);
        }
        let mut best = (f64::INFINITY, 0.0, usize::MAX);
        for t in 1..40 {
            let radius = 1.0 + (t as f64 / 40.0) * (1.0 / rho - 1.0);
            let c: f64 = self
                .zeros
                .iter()
                .map(|l| (l.norm() + radius) / (1.0 - l.norm() * radius))
                .product();
            let r = 1.0 / radius;
            let n = default_truncation(r, c).unwrap_or(usize::MAX);
            if n < best.2 {
                best = (c, r, n);
            }
        }
        (best.0, best.1)
    }

    /// Truncation at which the Cauchy tail drops below the series target.
    pub fn auto_truncation(&self) -> Result<usize> {
        let (c, r) = self.cauchy_envelope();
        let n = default_truncation(r, c)?;
        Ok(n.max(self.order()).min(MAX_TRUNCATION))
    }

    /// Taylor coefficients through degree `n`, or an automatic degree.
    pub fn taylor(&self, n: Option<usize>) -> Result<PowerSeries> {
        let n = match n {
            Some(n) => n,
            None => self.auto_truncation()?,
        };
        if n > MAX_TRUNCATION {
            return Err(Error::domain(format!("truncation {n} exceeds {MAX_TRUNCATION}")));
        }
        // Multiply the factor series one at a time: expanding the numerator
        // first loses accuracy to cancellation once there are many zeros.
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[0] = self.unimodular();
        let mut shift = 0;
        for &l in &self.zeros {
            if l.norm() == 0.0 {
                shift += 1;
                continue;
            }
            coeffs = convolve(&coeffs, &moebius_coeffs(l, n), n + 1);
        }
        if shift > 0 {
            let sign = if shift % 2 == 0 { 1.0 } else { -1.0 };
            coeffs.rotate_right(shift.min(n + 1));
            for (k, c) in coeffs.iter_mut().enumerate() {
                *c = if k < shift { C64::new(0.0, 0.0) } else { *c * sign };
            }
        }
        let (c, r) = self.cauchy_envelope();
        if r == 0.0 {
            return Ok(PowerSeries::exact(coeffs));
        }
        PowerSeries::with_envelope(coeffs, r, c)
    }

    /// Numerator `N' D - N D'` of `phi'` where `phi = N / D`.
    pub fn derivative_numerator(&self) -> Polynomial {
        let num = self.numerator();
        let den = self.denominator();
        let p = &(&num.derivative() * &den) - &(&num * &den.derivative());
        let n = self.order();
        let mut c = p.into_coeffs();
        c.truncate((2 * n).saturating_sub(1));
        let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
        while c.last().is_some_and(|x| x.norm() <= 1e-14 * scale) {
            c.pop();
        }
        Polynomial::new(c)
    }

    /// Zeros of `phi'` inside the disc, with multiplicity; they always total
    /// `order - 1`.
    pub fn critical_points(&self) -> Result<Vec<Root>> {
        let n = self.order();
        if n < 2 {
            return Ok(Vec::new());
        }
        let roots = poly_roots(&self.derivative_numerator())?;
        let inside: Vec<Root> = roots.into_iter().filter(|r| r.value.norm() < 1.0).collect();
        let total: usize = inside.iter().map(|r| r.multiplicity).sum();
        if total != n - 1 {
            return Err(Error::numerical(format!(
                "found {total} critical points in the disc, expected {}",
                n - 1
            )));
        }
        Ok(inside)
    }

    /// All solutions of `phi(z) = w` for `|w| < 1`.
    pub fn preimages(&self, w: C64) -> Result<Vec<Root>> {
        if self.order() == 0 {
            return Err(Error::domain("a constant has no preimages"));
        }
        if !(w.norm() < 1.0) {
            return Err(Error::domain(format!("|w| = {} is not below 1", w.norm())));
        }
        let p = &self.numerator() - &self.denominator().scale(w);
        let roots = poly_roots(&p)?;
        for r in &roots {
            let err = (self.value(r.value) - w).norm();
            if err > PREIMAGE_TOL * r.multiplicity as f64 * 10f64.powi(r.multiplicity as i32 - 1) {
                return Err(Error::numerical(format!("preimage residual {err:.3e} at {}", r.value)));
            }
        }
        Ok(roots)
    }

    /// `outer o inner`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        let mut zeros = Vec::with_capacity(outer.order() * inner.order());
        for &a in &outer.zeros {
            for r in inner.preimages(a)? {
                zeros.extend(std::iter::repeat_n(r.value, r.multiplicity));
            }
        }
        let raw = Self { phase: 0.0, zeros };
        let zeta = unit(0.7);
        let target = outer.value(inner.value(zeta));
        let phase = (target / raw.value(zeta)).arg();
        Self::new(phase, raw.zeros)
    }

    /// `a * phi_lambda o self` for unimodular `a`.
    pub fn moebius_post_compose(&self, a: C64, lambda: C64) -> Result<Self> {
        if (a.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::domain("post-composition constant must be unimodular"));
        }
        let outer = Self::new(a.arg(), vec![lambda])?;
        Self::compose(&outer, self)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        Self { phase: normalise_phase(self.phase + other.phase), zeros }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut zeros = Vec::with_capacity(self.order() * k);
        for _ in 0..k {
            zeros.extend_from_slice(&self.zeros);
        }
        Self { phase: normalise_phase(self.phase * k as f64), zeros }
    }
}

/// `max |f - g|` over `m` equally spaced points of the unit circle.
pub fn circle_distance(f: impl Fn(C64) -> C64, g: impl Fn(C64) -> C64, m: usize) -> f64 {
    (0..m)
        .map(|k| {
            let z = unit(TAU * (k as f64 + 0.5) / m as f64);
            (f(z) - g(z)).norm()
        })
        .fold(0.0, f64::max)
}
