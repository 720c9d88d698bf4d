//! Structural tests on a single Blaschke product.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::blaschke::{circle_distance, moebius, BlaschkeProduct};
use crate::error::{Error, Result};
use crate::series::{cluster_values, TOL_CLUSTER};

/// Pointwise agreement on the circle required of every functional identity.
pub const TOL_IDENTITY: f64 = 1e-9;
/// Circle samples used for functional identities.
pub const IDENTITY_SAMPLES: usize = 64;
/// Threshold for `|phi'(0)| = 0`.
const TOL_CRITICAL_ZERO: f64 = 1e-8;
/// Merging radius for values of a map at numerically computed points.
const TOL_VALUES: f64 = 1e-6;

fn unit(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// `phi = a * phi_lambda(z^n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquivalenceWitness {
    pub lambda: C64,
    pub a: C64,
    pub n: usize,
}

impl EquivalenceWitness {
    pub fn eval(&self, z: C64) -> C64 {
        self.a * moebius(self.lambda, z.powu(self.n as u32))
    }
}

/// Greedy matching of two point multisets within the clustering radius.
fn multiset_matches(a: &[C64], b: &[C64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    'outer: for x in a {
        let mut best: Option<(usize, f64)> = None;
        for (j, y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if d <= tol * (1.0 + x.norm()) && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, _)) => {
                used[j] = true;
                continue 'outer;
            }
            None => return false,
        }
    }
    true
}

/// Whether the zero multiset is invariant under `z -> e^{2 pi i / q} z`.
pub fn zeros_rotation_invariant(phi: &BlaschkeProduct, q: usize) -> bool {
    let w = unit(TAU / q as f64);
    let rotated: Vec<C64> = phi.zeros().iter().map(|z| z * w).collect();
    multiset_matches(&rotated, phi.zeros(), TOL_CLUSTER)
}

/// Whether `phi(e^{2 pi i / q} z) = phi(z)`, that is `phi = psi(z^q)`.
pub fn has_rotation_symmetry(phi: &BlaschkeProduct, q: usize) -> bool {
    if q <= 1 {
        return true;
    }
    if !phi.order().is_multiple_of(q) || !zeros_rotation_invariant(phi, q) {
        return false;
    }
    let w = unit(TAU / q as f64);
    circle_distance(|z| phi.value(w * z), |z| phi.value(z), IDENTITY_SAMPLES) <= TOL_IDENTITY
}

/// Largest proper divisor `q > 1` of the order with `phi = psi(z^q)`.
pub fn rotation_period(phi: &BlaschkeProduct) -> Option<usize> {
    let n = phi.order();
    (2..n).rev().find(|&q| n.is_multiple_of(q) && has_rotation_symmetry(phi, q))
}

/// Witness `(lambda, a)` with `phi = a phi_lambda(z^n)`, if one exists.
pub fn is_equivalent_to_zn(phi: &BlaschkeProduct) -> Result<Option<EquivalenceWitness>> {
    let n = phi.order();
    if n == 0 {
        return Err(Error::domain("order must be at least 1"));
    }
    if !zeros_rotation_invariant(phi, n) {
        return Ok(None);
    }
    let lambda = if phi.max_zero_modulus() <= TOL_CLUSTER {
        C64::new(0.0, 0.0)
    } else {
        phi.zeros().iter().map(|z| z.powu(n as u32)).sum::<C64>() / n as f64
    };
    if lambda.norm() >= 1.0 {
        return Ok(None);
    }
    let zeta = unit(0.37);
    let ratio = phi.value(zeta) / moebius(lambda, zeta.powu(n as u32));
    let a = ratio / ratio.norm();
    let w = EquivalenceWitness { lambda, a, n };
    let err = circle_distance(|z| phi.value(z), |z| w.eval(z), IDENTITY_SAMPLES);
    Ok((err <= TOL_IDENTITY).then_some(w))
}

/// `phi = a z^n`: the only products unitarily equivalent to the shift power.
pub fn is_rotated_monomial(phi: &BlaschkeProduct) -> bool {
    phi.order() > 0 && phi.max_zero_modulus() <= TOL_CLUSTER
}

/// `phi = outer o inner` with `inner = phi_c^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub outer: BlaschkeProduct,
    pub inner: BlaschkeProduct,
    pub critical_point: C64,
    /// Largest defect among `rho o rho = id`, `inner o rho = inner` and the
    /// composition identity, on the circle.
    pub involution_residual: f64,
}

/// All decompositions of an order-4 product through `phi_c^2`, one per
/// critical point `c` whose involution `rho_c = phi_c(-phi_c)` preserves
/// `phi`.
pub fn decompose_order4(phi: &BlaschkeProduct) -> Result<Vec<Decomposition>> {
    if phi.order() != 4 {
        return Err(Error::domain("decomposition test is for order 4"));
    }
    let mut out = Vec::new();
    for cp in phi.critical_points()? {
        let c = cp.value;
        let rho = |z: C64| moebius(c, -moebius(c, z));
        let sym = circle_distance(|z| phi.value(rho(z)), |z| phi.value(z), IDENTITY_SAMPLES);
        if sym > TOL_IDENTITY {
            continue;
        }
        let inner = BlaschkeProduct::new(0.0, vec![c, c])?;
        let values: Vec<C64> = phi.zeros().iter().map(|l| inner.value(*l)).collect();
        let clusters = cluster_values(&values, TOL_VALUES);
        if clusters.iter().any(|(_, k)| k % 2 != 0) {
            continue;
        }
        let mut outer_zeros = Vec::new();
        for (v, k) in clusters {
            outer_zeros.extend(std::iter::repeat_n(v, k / 2));
        }
        let raw = BlaschkeProduct::new(0.0, outer_zeros)?;
        let zeta = unit(1.1);
        let phase = (phi.value(zeta) / raw.value(inner.value(zeta))).arg();
        let outer = BlaschkeProduct::new(phase, raw.zeros().to_vec())?;
        let comp = circle_distance(|z| phi.value(z), |z| outer.value(inner.value(z)), IDENTITY_SAMPLES);
        if comp > TOL_IDENTITY {
            continue;
        }
        let invol = circle_distance(|z| rho(rho(z)), |z| z, IDENTITY_SAMPLES);
        let inv2 = circle_distance(|z| inner.value(rho(z)), |z| inner.value(z), IDENTITY_SAMPLES);
        out.push(Decomposition {
            outer,
            inner,
            critical_point: c,
            involution_residual: sym.max(comp).max(invol).max(inv2),
        });
    }
    Ok(out)
}

/// `phi = phi_mu o (b (z phi_gamma)^2)` with `gamma != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsiSquaredWitness {
    pub gamma: C64,
    pub mu: C64,
    pub b: C64,
}

impl PsiSquaredWitness {
    /// `psi = z phi_gamma`.
    pub fn psi(&self) -> BlaschkeProduct {
        BlaschkeProduct::new(std::f64::consts::PI, vec![C64::new(0.0, 0.0), self.gamma])
            .expect("gamma lies in the disc")
    }
}

/// Test whether `phi` is equivalent to `(z phi_gamma)^2` for some `gamma != 0`.
pub fn is_equiv_z_phi_gamma_sq(phi: &BlaschkeProduct) -> Result<Option<PsiSquaredWitness>> {
    if phi.order() != 4 {
        return Err(Error::domain("the psi-squared test is for order 4"));
    }
    if phi.derivative_at(C64::new(0.0, 0.0)).norm() > TOL_CRITICAL_ZERO {
        return Ok(None);
    }
    let mu = phi.value(C64::new(0.0, 0.0));
    let fiber = phi.preimages(mu)?;
    if fiber.len() != 2 || fiber.iter().any(|r| r.multiplicity != 2) {
        return Ok(None);
    }
    let (origin, other): (Vec<&crate::series::Root>, Vec<&crate::series::Root>) = fiber.iter().partition(|r| r.value.norm() <= 1e-6);
    if origin.len() != 1 || other.len() != 1 {
        return Ok(None);
    }
    let gamma = other[0].value;
    let w = PsiSquaredWitness { gamma, mu, b: C64::new(1.0, 0.0) };
    let psi = w.psi();
    let zeta = unit(0.9);
    let ratio = moebius(mu, phi.value(zeta)) / psi.value(zeta).powu(2);
    let b = ratio / ratio.norm();
    let w = PsiSquaredWitness { b, ..w };
    let err = circle_distance(|z| moebius(mu, phi.value(z)), |z| b * psi.value(z).powu(2), IDENTITY_SAMPLES);
    Ok((err <= TOL_IDENTITY).then_some(w))
}

/// The point `alpha` when all critical points coincide there and the fiber
/// of `phi(alpha)` is `alpha` repeated, which forces `phi = a phi_mu o phi_alpha^n`.
pub fn single_critical_point(phi: &BlaschkeProduct) -> Result<Option<C64>> {
    let n = phi.order();
    if n < 2 {
        return Ok(None);
    }
    let cps = phi.critical_points()?;
    if cps.len() != 1 {
        return Ok(None);
    }
    let alpha = cps[0].value;
    let fiber = phi.preimages(phi.value(alpha))?;
    Ok((fiber.len() == 1 && fiber[0].multiplicity == n).then_some(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomials_are_equivalent() {
        for n in 2..=5 {
            let w = is_equivalent_to_zn(&BlaschkeProduct::z_power(n)).unwrap().unwrap();
            assert!(w.lambda.norm() < 1e-15);
        }
        // z^4 = -phi_0(z^4)
        let w = is_equivalent_to_zn(&BlaschkeProduct::z_power(4)).unwrap().unwrap();
        assert!((w.a - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn symmetric_pair_is_equivalent_to_square() {
        let phi = BlaschkeProduct::new(0.0, vec![c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let w = is_equivalent_to_zn(&phi).unwrap().unwrap();
        assert!((w.lambda - c(0.25, 0.0)).norm() < 1e-12);
        assert!((w.a - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn asymmetric_pair_is_not() {
        let phi = BlaschkeProduct::new(0.0, vec![c(0.5, 0.0), c(-0.3, 0.0)]).unwrap();
        assert!(is_equivalent_to_zn(&phi).unwrap().is_none());
    }

    #[test]
    fn even_product_decomposes_at_origin() {
        let outer = BlaschkeProduct::new(0.3, vec![c(0.2, 0.1), c(-0.4, 0.3)]).unwrap();
        let phi = BlaschkeProduct::compose(&outer, &BlaschkeProduct::z_power(2)).unwrap();
        let d = decompose_order4(&phi).unwrap();
        assert!(d.iter().any(|d| d.critical_point.norm() < 1e-9));
        assert!(d.iter().all(|d| d.involution_residual < 1e-9));
    }

    #[test]
    fn doubled_zeros_composite_decomposes() {
        // phi_{0.3}^2 o (z phi_{0.4})
        let outer = BlaschkeProduct::moebius(c(0.3, 0.0)).unwrap().pow(2);
        let inner = BlaschkeProduct::new(0.0, vec![c(0.0, 0.0), c(0.4, 0.0)]).unwrap();
        let phi = BlaschkeProduct::compose(&outer, &inner).unwrap();
        let d = decompose_order4(&phi).unwrap();
        assert!(!d.is_empty());
        assert!(d.iter().all(|d| d.critical_point.norm() > 1e-3));
    }

    #[test]
    fn generic_order4_does_not_decompose() {
        let phi = BlaschkeProduct::new(0.0, vec![c(0.1, 0.2), c(-0.5, 0.1), c(0.3, -0.6), c(0.0, 0.4)]).unwrap();
        assert!(decompose_order4(&phi).unwrap().is_empty());
        assert!(is_equiv_z_phi_gamma_sq(&phi).unwrap().is_none());
    }

    #[test]
    fn psi_squared_detected() {
        let gamma = c(0.3, 0.4);
        let psi = BlaschkeProduct::new(0.0, vec![c(0.0, 0.0), gamma]).unwrap();
        let phi = psi.pow(2).moebius_post_compose(unit(0.5), c(0.2, -0.1)).unwrap();
        let w = is_equiv_z_phi_gamma_sq(&phi).unwrap().unwrap();
        assert!((w.gamma - gamma).norm() < 1e-7);
        assert!(is_equiv_z_phi_gamma_sq(&BlaschkeProduct::z_power(4)).unwrap().is_none());
    }

    #[test]
    fn moebius_power_has_single_critical_point() {
        let phi = BlaschkeProduct::moebius(c(0.3, 0.2)).unwrap().pow(5);
        let a = single_critical_point(&phi).unwrap().unwrap();
        assert!((a - c(0.3, 0.2)).norm() < 1e-8);
    }

    #[test]
    fn rotation_period_of_cube_composite() {
        let outer = BlaschkeProduct::new(0.2, vec![c(0.3, 0.1), c(-0.2, 0.2)]).unwrap();
        let phi = BlaschkeProduct::compose(&outer, &BlaschkeProduct::z_power(3)).unwrap();
        assert_eq!(rotation_period(&phi), Some(3));
        assert!(is_equivalent_to_zn(&phi).unwrap().is_none());
    }
}
