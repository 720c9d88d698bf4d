//! Reducing lattice of `M_{z^n}` and the series test for `phi_alpha^n`.

use serde::Serialize;

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::operators::{monomial_class_subspace, reducing_residual};
use crate::spaces::SpaceKind;

/// Largest `n` for which the lattice is enumerated explicitly.
pub const MAX_LATTICE_ORDER: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeReport {
    pub n: usize,
    pub count: usize,
    pub expected: u64,
    pub max_residual: f64,
    /// Residue classes of each proper nontrivial reducing subspace.
    pub members: Vec<Vec<usize>>,
}

/// Every nonempty proper union of residue classes mod `n`, each checked as a
/// reducing subspace of `M_{z^n}`.
pub fn enumerate_zn_lattice(n: usize, space: SpaceKind) -> Result<LatticeReport> {
    if !(2..=MAX_LATTICE_ORDER).contains(&n) {
        return Err(Error::domain(format!("lattice order must lie in 2..={MAX_LATTICE_ORDER}")));
    }
    let phi = BlaschkeProduct::z_power(n);
    let mut members = Vec::new();
    let mut max_residual: f64 = 0.0;
    for mask in 1u32..(1 << n) - 1 {
        let classes: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let s = monomial_class_subspace(&classes, n, &phi, space, "lattice")?;
        max_residual = max_residual.max(reducing_residual(&s, &phi)?.max());
        members.push(classes);
    }
    Ok(LatticeReport { n, count: members.len(), expected: (1u64 << n) - 2, max_residual, members })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerSeriesReport {
    pub n: usize,
    pub min_joint_residual: f64,
    pub argmin_x: f64,
    pub threshold: f64,
    pub infeasible: bool,
}

/// `A(x) = sum_{k >= 0} x^k / (n k + 2)` and `B(x) = A(x) - 1/2`, for
/// `0 <= x < 1`.
pub fn power_series_pair(n: usize, x: f64) -> (f64, f64) {
    let mut a = 0.0;
    let mut term = 1.0;
    let mut k = 0usize;
    loop {
        a += term / (n as f64 * k as f64 + 2.0);
        term *= x;
        k += 1;
        if term < 1e-18 * (1.0 - x) || k > 1_000_000 {
            break;
        }
    }
    (a, a - 0.5)
}

/// Minimise `max(|A(x) - 1|, |B(x) - x / 2|)` on a grid of `[0, x_max]`.
/// With `x = |alpha|^{2n}` both equalities would have to hold for a unitary
/// intertwining `M_{phi_alpha^n}` with `M_{z^n}`.
pub fn check_power_series_infeasible(n: usize, step: f64, x_max: f64) -> Result<PowerSeriesReport> {
    if n < 2 || !(step > 0.0) || !(0.0..1.0).contains(&x_max) {
        return Err(Error::domain("need n >= 2, a positive step and x_max in [0, 1)"));
    }
    let threshold = 1e-3;
    let mut best = (f64::INFINITY, 0.0);
    let steps = (x_max / step).round() as usize;
    for i in 0..=steps {
        let x = (i as f64 * step).min(x_max);
        let (a, b) = power_series_pair(n, x);
        let r = (a - 1.0).abs().max((b - x / 2.0).abs());
        if r < best.0 {
            best = (r, x);
        }
    }
    Ok(PowerSeriesReport { n, min_joint_residual: best.0, argmin_x: best.1, threshold, infeasible: best.0 >= threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_closed_form_for_n2() {
        for x in [0.1, 0.5, 0.9, 0.99] {
            let (a, _) = power_series_pair(2, x);
            let exact = -(1.0f64 - x).ln() / (2.0 * x);
            assert!((a - exact).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn small_lattices() {
        let r = enumerate_zn_lattice(2, SpaceKind::Dirichlet).unwrap();
        assert_eq!(r.count, 2);
        let r = enumerate_zn_lattice(3, SpaceKind::Dirichlet).unwrap();
        assert_eq!(r.count, 6);
        assert!(r.max_residual <= 1e-12);
        assert!(enumerate_zn_lattice(1, SpaceKind::Dirichlet).is_err());
    }

    #[test]
    fn joint_system_has_no_solution_below_one() {
        for n in 2..=4 {
            let r = check_power_series_infeasible(n, 1e-3, 0.99).unwrap();
            assert!(r.infeasible, "{r:?}");
        }
    }
}
