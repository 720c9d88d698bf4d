//! Multiplication operators on truncated coefficient spaces.

mod probe;
pub use probe::{commutant_probe, finite_section_probe, CommutantProbeResult, MAX_PROBE_SIZE, MIN_GAP};
mod subspace;

pub use subspace::{
    cross_gram_norm, kernel_space, monomial_class_subspace, orbit_complement, orbit_subspace, reducing_residual,
    u_pushforward, wandering_dim, OrbitBuilder, ResidualReport, SubspaceBasis, WanderingReport,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::series::{convolve, correlate_conj, PowerSeries};
use crate::spaces::{CoeffVector, SpaceKind};

/// The `(N+1) x (N+1)` section `P_N M_phi P_N` in orthonormal coordinates.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub matrix: DMatrix<C64>,
    pub space: SpaceKind,
    pub truncation: usize,
}

/// `M_phi` on one of the three spaces, with the Taylor data of `phi` cached
/// through degree `N`.
#[derive(Clone, Debug)]
pub struct MultOperator {
    symbol: PowerSeries,
    space: SpaceKind,
    nu: Vec<f64>,
}

impl MultOperator {
    pub fn new(phi: &BlaschkeProduct, space: SpaceKind, n: usize) -> Result<Self> {
        if phi.order() == 0 {
            return Err(Error::domain("multiplication by a constant is not considered"));
        }
        let symbol = phi.taylor(Some(n))?;
        Ok(Self { symbol, space, nu: (0..=n).map(|k| space.nu(k)).collect() })
    }

    pub fn truncation(&self) -> usize {
        self.symbol.truncation()
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn symbol(&self) -> &PowerSeries {
        &self.symbol
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len > self.nu.len() {
            return Err(Error::domain(format!(
                "vector of length {len} exceeds operator truncation {}",
                self.truncation()
            )));
        }
        Ok(())
    }

    /// `P_N phi x` for orthonormal coordinates `x` of length at most `N + 1`.
    pub fn apply_orth(&self, x: &DVector<C64>) -> Result<DVector<C64>> {
        let len = x.len();
        self.check_len(len)?;
        let c: Vec<C64> = x.iter().zip(&self.nu).map(|(v, s)| v / s).collect();
        let p = convolve(&c, self.symbol.coeffs(), len);
        Ok(DVector::from_iterator(len, p.iter().zip(&self.nu).map(|(v, s)| v * s)))
    }

    /// `P_N M_phi^* x`; exact when `x` is supported in `[0, N]`.
    pub fn adjoint_orth(&self, x: &DVector<C64>) -> Result<DVector<C64>> {
        let len = x.len();
        self.check_len(len)?;
        let a: Vec<C64> = x.iter().zip(&self.nu).map(|(v, s)| v * s).collect();
        let p = correlate_conj(&a, self.symbol.coeffs());
        Ok(DVector::from_iterator(len, p.iter().zip(&self.nu).map(|(v, s)| v / s)))
    }

    pub fn apply(&self, f: &CoeffVector) -> Result<CoeffVector> {
        self.same_space(f)?;
        Ok(f.mul_series(&self.symbol))
    }

    pub fn adjoint(&self, f: &CoeffVector) -> Result<CoeffVector> {
        self.same_space(f)?;
        let x = self.adjoint_orth(&f.to_orthonormal())?;
        let out = CoeffVector::from_orthonormal(x.as_slice(), self.space);
        if f.series().is_exact() {
            return Ok(out);
        }
        let tail = f.series().tail_bound();
        Ok(CoeffVector::new(PowerSeries::with_tail(out.coeffs().to_vec(), f.series().decay_rate(), tail), self.space))
    }

    fn same_space(&self, f: &CoeffVector) -> Result<()> {
        if f.space() != self.space {
            return Err(Error::domain("vector and operator live in different spaces"));
        }
        self.check_len(f.coeffs().len())
    }

    pub fn matrix(&self) -> TruncatedOperator {
        let n = self.truncation();
        let c = self.symbol.coeffs();
        let matrix = DMatrix::from_fn(n + 1, n + 1, |j, k| {
            if j >= k { c[j - k] * (self.nu[j] / self.nu[k]) } else { C64::new(0.0, 0.0) }
        });
        TruncatedOperator { matrix, space: self.space, truncation: n }
    }
}

/// Lower-triangular matrix with entries `phi_hat(j - k) nu_j / nu_k`.
pub fn mult_matrix(phi: &BlaschkeProduct, space: SpaceKind, n: usize) -> Result<TruncatedOperator> {
    Ok(MultOperator::new(phi, space, n)?.matrix())
}

/// `M_phi^* f` in the space of `f`, at the truncation of `f`.
pub fn adjoint_apply(phi: &BlaschkeProduct, f: &CoeffVector) -> Result<CoeffVector> {
    MultOperator::new(phi, f.space(), f.truncation())?.adjoint(f)
}

/// `phi f` at the truncation of `f`.
pub fn mult_apply(phi: &BlaschkeProduct, f: &CoeffVector) -> Result<CoeffVector> {
    MultOperator::new(phi, f.space(), f.truncation())?.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{inner, kernel_vector};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn matrix_entries() {
        let phi = BlaschkeProduct::moebius(c(0.5, 0.0)).unwrap();
        let t = mult_matrix(&phi, SpaceKind::Dirichlet, 6).unwrap();
        let coeffs = phi.taylor(Some(6)).unwrap();
        assert_eq!(t.matrix[(0, 1)], c(0.0, 0.0));
        let expect = coeffs.coeff(2) * (4.0f64 / 2.0).sqrt();
        assert!((t.matrix[(3, 1)] - expect).norm() < 1e-15);
    }

    #[test]
    fn adjoint_is_conjugate_transpose_on_sections() {
        let phi = BlaschkeProduct::new(0.7, vec![c(0.3, 0.1), c(-0.2, 0.5)]).unwrap();
        for space in [SpaceKind::Hardy, SpaceKind::Bergman, SpaceKind::Dirichlet] {
            let op = MultOperator::new(&phi, space, 30).unwrap();
            let m = op.matrix().matrix;
            let x = DVector::from_fn(31, |k, _| c((k as f64 * 0.7).sin(), (k as f64 * 0.3).cos()));
            let fast = op.adjoint_orth(&x).unwrap();
            let slow = m.adjoint() * &x;
            assert!((fast - slow).norm() < 1e-12);
            let fast = op.apply_orth(&x).unwrap();
            let slow = &m * &x;
            assert!((fast - slow).norm() < 1e-12);
        }
    }

    #[test]
    fn adjoint_maps_kernel_to_scaled_kernel() {
        // M_phi^* K_lambda = conj(phi(lambda)) K_lambda
        let phi = BlaschkeProduct::new(0.2, vec![c(0.4, 0.0), c(0.0, 0.3)]).unwrap();
        let lambda = c(-0.3, 0.2);
        for space in [SpaceKind::Hardy, SpaceKind::Bergman, SpaceKind::Dirichlet] {
            let k = kernel_vector(lambda, space, Some(200)).unwrap();
            let t = adjoint_apply(&phi, &k).unwrap();
            let expect = k.scale(phi.eval(lambda).unwrap().conj());
            assert!(t.sub(&expect).truncate(120).norm() < 1e-10, "{space:?}");
        }
    }

    #[test]
    fn adjoint_inner_product_identity() {
        let phi = BlaschkeProduct::new(1.0, vec![c(0.1, 0.6)]).unwrap();
        let f = CoeffVector::from_coeffs((0..20).map(|k| c(1.0 / (k as f64 + 1.0), 0.3)).collect(), SpaceKind::Dirichlet);
        let g = CoeffVector::from_coeffs((0..20).map(|k| c(0.2, (k as f64).cos())).collect(), SpaceKind::Dirichlet);
        let lhs = inner(&mult_apply(&phi, &f).unwrap(), &g).unwrap().value;
        let rhs = inner(&f, &adjoint_apply(&phi, &g).unwrap()).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
