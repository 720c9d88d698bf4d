//! Numerical dimension of the commutant `{M_phi, M_phi^*}'`.
//!
//! An operator `A` commuting with `M_phi` and `M_phi^*` leaves
//! `W = ker M_phi^*` invariant, and is determined by its restriction `X` to
//! `W` because the spaces `phi^i W` span. Writing
//! `G_ij[a, b] = <phi^i w_b, phi^j w_a>` for an orthonormal basis `w` of `W`,
//! `A` commutes with both operators exactly when `X` commutes with every
//! `G_ij`. The probe counts the near-null directions of that linear map.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::subspace::{kernel_space, Ortho};
use super::MultOperator;
use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::series::MAX_TRUNCATION;
use crate::spaces::SpaceKind;

/// Largest probe size accepted.
pub const MAX_PROBE_SIZE: usize = 32;
/// Gap below which a probe is reported inconclusive.
pub const MIN_GAP: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutantProbeResult {
    pub estimated_dimension: usize,
    /// Singular values of the probe map, increasing.
    pub singular_values: Vec<f64>,
    /// First rejected over last accepted singular value; infinite when
    /// nothing is rejected.
    #[serde(serialize_with = "finite_or_null")]
    pub gap_ratio: f64,
    pub inconclusive: bool,
    pub probe_size: usize,
}

fn finite_or_null<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() { s.serialize_f64(*v) } else { s.serialize_none() }
}

fn summarise(mut sv: Vec<f64>, eps: f64, probe_size: usize) -> CommutantProbeResult {
    sv.sort_by(f64::total_cmp);
    let top = sv.last().copied().unwrap_or(0.0).max(1.0);
    let d = sv.iter().filter(|&&v| v < eps * top).count();
    let gap_ratio = if d == sv.len() {
        f64::INFINITY
    } else if d == 0 {
        0.0
    } else {
        sv[d] / sv[d - 1].max(f64::MIN_POSITIVE)
    };
    CommutantProbeResult {
        estimated_dimension: d,
        singular_values: sv,
        gap_ratio,
        inconclusive: gap_ratio < MIN_GAP,
        probe_size,
    }
}

fn check_probe_args(phi: &BlaschkeProduct, n: usize, eps: f64) -> Result<()> {
    if phi.order() == 0 {
        return Err(Error::domain("the probe needs a nonconstant symbol"));
    }
    if n == 0 || n > MAX_PROBE_SIZE {
        return Err(Error::domain(format!("probe size must lie in 1..={MAX_PROBE_SIZE}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain("probe threshold must lie in (0, 1)"));
    }
    Ok(())
}

/// Probe through the wandering subspace, using `ceil((n + 1) / order)` levels.
pub fn commutant_probe(phi: &BlaschkeProduct, space: SpaceKind, n: usize, eps: f64) -> Result<CommutantProbeResult> {
    check_probe_args(phi, n, eps)?;
    let order = phi.order();
    let levels = (n + 1).div_ceil(order).max(2);

    let kernels = kernel_space(phi, space)?;
    let mut trunc = kernels
        .iter()
        .map(|k| k.truncation())
        .chain([phi.auto_truncation()?, 64])
        .max()
        .unwrap_or(64);
    let vectors = loop {
        let mut w = Ortho::default();
        for k in &kernels {
            w.push(k.to_orthonormal_len(trunc));
        }
        if w.len() != order {
            return Err(Error::numerical("kernel vectors at the zeros are numerically dependent"));
        }
        let op = MultOperator::new(phi, space, trunc)?;
        let mut all = Vec::with_capacity(levels * order);
        let mut cur = w.q.clone();
        for _ in 0..levels {
            all.extend(cur.iter().cloned());
            cur = cur.iter().map(|v| op.apply_orth(v)).collect::<Result<_>>()?;
        }
        if all.iter().all(super::subspace::representable) {
            break all;
        }
        if trunc >= MAX_TRUNCATION {
            return Err(Error::numerical("probe vectors are not resolved"));
        }
        trunc = (2 * trunc).min(MAX_TRUNCATION);
    };

    let v = DMatrix::from_columns(&vectors);
    let gram = v.adjoint() * &v;
    let block = |i: usize, j: usize| -> DMatrix<C64> {
        // G_ij[a, b] = <phi^i w_b, phi^j w_a> = gram[(j, a), (i, b)]
        DMatrix::from_fn(order, order, |a, b| gram[(j * order + a, i * order + b)])
    };
    let diag_norm: Vec<f64> = (0..levels).map(|i| block(i, i).norm()).collect();

    let m = order;
    let mut rows: Vec<DVector<C64>> = Vec::new();
    for i in 0..levels {
        for j in 0..levels {
            let scale = (diag_norm[i] * diag_norm[j]).sqrt();
            if scale == 0.0 {
                continue;
            }
            let g = block(i, j) / C64::new(scale, 0.0);
            // (G X - X G)[c, b] with X[r, s] at index r + s m
            for c in 0..m {
                for b in 0..m {
                    let mut row = DVector::zeros(m * m);
                    for r in 0..m {
                        row[r + b * m] += g[(c, r)];
                    }
                    for s in 0..m {
                        row[c + s * m] -= g[(s, b)];
                    }
                    rows.push(row);
                }
            }
        }
    }
    let k = DMatrix::from_fn(rows.len(), m * m, |r, c| rows[r][c]);
    let sv = k.singular_values().iter().copied().collect();
    Ok(summarise(sv, eps, n))
}

/// The direct probe on the `(n+1) x (n+1)` section `T` of `M_phi`:
/// null space of `A -> ([A, T], [A, T^*])`. Truncation breaks the relations
/// between `T` and `T^*`, so this undercounts for some symbols; it is kept
/// for comparison.
pub fn finite_section_probe(
    phi: &BlaschkeProduct,
    space: SpaceKind,
    n: usize,
    eps: f64,
) -> Result<CommutantProbeResult> {
    check_probe_args(phi, n, eps)?;
    let t = super::mult_matrix(phi, space, n)?.matrix;
    let ts = t.adjoint();
    let d = n + 1;
    let mut k = DMatrix::<C64>::zeros(2 * d * d, d * d);
    // vec(A T - T A) with A[r, s] at index r + s d
    for (half, op) in [&t, &ts].into_iter().enumerate() {
        let off = half * d * d;
        for r in 0..d {
            for s in 0..d {
                let row = off + r + s * d;
                for q in 0..d {
                    k[(row, r + q * d)] += op[(q, s)];
                    k[(row, q + s * d)] -= op[(r, q)];
                }
            }
        }
    }
    let sv = k.singular_values().iter().copied().collect();
    Ok(summarise(sv, eps, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dim(phi: &BlaschkeProduct, space: SpaceKind) -> usize {
        let r = commutant_probe(phi, space, 24, 1e-8).unwrap();
        assert!(!r.inconclusive, "{r:?}");
        r.estimated_dimension
    }

    #[test]
    fn monomials() {
        for n in 2..=4 {
            assert_eq!(dim(&BlaschkeProduct::z_power(n), SpaceKind::Dirichlet), n);
        }
    }

    #[test]
    fn hardy_commutant_is_full_matrix_algebra() {
        let phi = BlaschkeProduct::new(0.3, vec![c(0.2, 0.1), c(-0.4, 0.3)]).unwrap();
        assert_eq!(dim(&phi, SpaceKind::Hardy), 4);
    }

    #[test]
    fn moebius_powers_are_trivial() {
        let a = BlaschkeProduct::moebius(c(0.5, 0.0)).unwrap();
        assert_eq!(dim(&a.pow(3), SpaceKind::Dirichlet), 1);
        assert_eq!(dim(&a.pow(4), SpaceKind::Dirichlet), 1);
    }

    #[test]
    fn square_of_z_times_moebius() {
        let psi = BlaschkeProduct::new(0.0, vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert_eq!(dim(&psi.pow(2), SpaceKind::Dirichlet), 2);
    }

    #[test]
    fn rejects_bad_sizes() {
        let phi = BlaschkeProduct::z_power(2);
        assert!(commutant_probe(&phi, SpaceKind::Dirichlet, 33, 1e-8).is_err());
        assert!(commutant_probe(&phi, SpaceKind::Dirichlet, 0, 1e-8).is_err());
    }

    #[test]
    fn finite_section_probe_misses_square_case() {
        let psi = BlaschkeProduct::new(0.0, vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let direct = finite_section_probe(&psi.pow(2), SpaceKind::Dirichlet, 10, 1e-8).unwrap();
        assert_eq!(direct.estimated_dimension, 1);
        let z2 = finite_section_probe(&BlaschkeProduct::z_power(2), SpaceKind::Dirichlet, 10, 1e-8).unwrap();
        assert_eq!(z2.estimated_dimension, 2);
    }
}
