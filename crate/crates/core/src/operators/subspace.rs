//! Finite sections of candidate reducing subspaces.
//!
//! A [`SubspaceBasis`] holds orthonormal columns (in orthonormal
//! coordinates) of a finite-dimensional subspace `E` of the truncated space,
//! together with a leading block `C` of `core` columns, `C` inside `E`. The
//! core is the part under test; the remaining columns are the room that
//! `phi C` and `phi^* C` are allowed to move into. Both are finite pieces of
//! the same infinite-dimensional subspace.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::MultOperator;
use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::series::{cluster_values, MAX_TRUNCATION, TOL_CLUSTER};
use crate::spaces::{kernel_derivative_vector, u_map, CoeffVector, SpaceKind};

/// Relative norm below which a spanning vector counts as dependent.
const DROP_TOL: f64 = 1e-10;
/// Largest relative mass allowed in the last tenth of the coordinates.
const REPRESENT_TOL: f64 = 1e-12;
/// Envelope levels are added until they capture less than this fraction
/// of the images of the core.
const ENVELOPE_TOL: f64 = 1e-10;
/// Above this truncation an orbit stops growing its envelope instead of
/// asking for a larger truncation.
const SOFT_CAP: usize = 4096;
/// Singular values of the wandering test must sit outside this band.
const AMBIGUOUS_BAND: (f64, f64) = (0.1, 0.9);

#[derive(Default)]
pub(crate) struct Ortho {
    pub(crate) q: Vec<DVector<C64>>,
    dropped: usize,
}

impl Ortho {
    /// Two passes of classical Gram-Schmidt.
    pub(crate) fn push(&mut self, mut v: DVector<C64>) -> bool {
        let n0 = v.norm();
        if n0 == 0.0 {
            self.dropped += 1;
            return false;
        }
        for _ in 0..2 {
            for q in &self.q {
                let c = q.dotc(&v);
                v.axpy(-c, q, C64::new(1.0, 0.0));
            }
        }
        let n1 = v.norm();
        if n1 <= DROP_TOL * n0 {
            self.dropped += 1;
            return false;
        }
        self.q.push(v / C64::new(n1, 0.0));
        true
    }

    pub(crate) fn len(&self) -> usize {
        self.q.len()
    }

    fn matrix(&self, rows: usize) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(rows, self.q.len());
        for (j, q) in self.q.iter().enumerate() {
            m.view_mut((0, j), (q.len(), 1)).copy_from(q);
        }
        m
    }
}

pub(crate) fn representable(v: &DVector<C64>) -> bool {
    let n = v.len();
    let start = n - (n / 10).max(1);
    let tail: f64 = v.iter().skip(start).map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let total = v.norm();
    total == 0.0 || tail <= REPRESENT_TOL * total
}

/// Largest singular value, from the eigenvalues of `m^* m`.
pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Singular values in decreasing order.
pub(crate) fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Vec::new();
    }
    let g = if m.ncols() <= m.nrows() { m.adjoint() * m } else { m * m.adjoint() };
    let eig = SymmetricEigen::new(g);
    let mut s: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal core and envelope of a candidate subspace.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    label: String,
    space: SpaceKind,
    basis: DMatrix<C64>,
    core: usize,
    generators: Vec<CoeffVector>,
    dropped: usize,
}

impl SubspaceBasis {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn truncation(&self) -> usize {
        self.basis.nrows() - 1
    }

    /// Number of envelope columns.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn core_dim(&self) -> usize {
        self.core
    }

    pub fn basis(&self) -> &DMatrix<C64> {
        &self.basis
    }

    pub fn core_basis(&self) -> DMatrix<C64> {
        self.basis.columns(0, self.core).into_owned()
    }

    pub fn generators(&self) -> &[CoeffVector] {
        &self.generators
    }

    /// Spanning vectors discarded as numerically dependent.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// `max |Q^* Q - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.basis.adjoint() * &self.basis;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    fn padded(&self, rows: usize) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(rows, self.basis.ncols());
        let r = self.basis.nrows().min(rows);
        m.view_mut((0, 0), (r, self.basis.ncols())).copy_from(&self.basis.rows(0, r));
        m
    }
}

/// Builder for `span { psi^j g : g in generators, j >= 0 }` sections.
pub struct OrbitBuilder<'a> {
    generators: Vec<CoeffVector>,
    symbol: &'a BlaschkeProduct,
    probe: &'a BlaschkeProduct,
    core_levels: usize,
    max_extra_levels: usize,
    min_truncation: usize,
    label: String,
}

impl<'a> OrbitBuilder<'a> {
    /// Orbit of `generators` under multiplication by `symbol`, with levels
    /// `0..=core_levels` forming the core.
    pub fn new(generators: Vec<CoeffVector>, symbol: &'a BlaschkeProduct, core_levels: usize) -> Self {
        Self {
            generators,
            symbol,
            probe: symbol,
            core_levels,
            max_extra_levels: 24,
            min_truncation: 64,
            label: String::from("orbit"),
        }
    }

    /// Size the envelope for the operator `M_probe` instead of the orbit
    /// symbol (they differ when the subspace is tested for a function of
    /// the symbol).
    pub fn probe(mut self, probe: &'a BlaschkeProduct) -> Self {
        self.probe = probe;
        self
    }

    pub fn max_extra_levels(mut self, k: usize) -> Self {
        self.max_extra_levels = k;
        self
    }

    pub fn min_truncation(mut self, n: usize) -> Self {
        self.min_truncation = n;
        self
    }

    pub fn label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn build(&self) -> Result<SubspaceBasis> {
        let Some(first) = self.generators.first() else {
            return Err(Error::domain("an orbit needs at least one generator"));
        };
        let space = first.space();
        if self.generators.iter().any(|g| g.space() != space) {
            return Err(Error::domain("generators live in different spaces"));
        }
        let mut n = self
            .generators
            .iter()
            .map(|g| g.truncation())
            .chain([self.min_truncation, self.symbol.auto_truncation()?, self.probe.auto_truncation()?])
            .max()
            .unwrap_or(64);
        loop {
            if let Some(b) = self.try_build(space, n)? {
                return Ok(b);
            }
            if n >= MAX_TRUNCATION {
                return Err(Error::numerical(format!(
                    "orbit `{}` is not resolved at truncation {MAX_TRUNCATION}",
                    self.label
                )));
            }
            n = (2 * n).min(MAX_TRUNCATION);
        }
    }

    fn try_build(&self, space: SpaceKind, n: usize) -> Result<Option<SubspaceBasis>> {
        let t_orbit = MultOperator::new(self.symbol, space, n)?;
        let t_probe = if self.probe == self.symbol { t_orbit.clone() } else { MultOperator::new(self.probe, space, n)? };
        let step = |vs: &[DVector<C64>]| -> Result<Vec<DVector<C64>>> { vs.iter().map(|v| t_orbit.apply_orth(v)).collect() };

        let mut cur: Vec<DVector<C64>> = self.generators.iter().map(|g| g.to_orthonormal_len(n)).collect();
        let mut ortho = Ortho::default();
        for _ in 0..=self.core_levels {
            if !cur.iter().all(representable) {
                return Ok(None);
            }
            for v in &cur {
                ortho.push(v.clone());
            }
            cur = step(&cur)?;
        }
        let core = ortho.len();

        let mut images = Vec::with_capacity(2 * core);
        for q in &ortho.q {
            let fwd = t_probe.apply_orth(q)?;
            if !representable(&fwd) && n < SOFT_CAP {
                return Ok(None);
            }
            images.push(fwd);
            images.push(t_probe.adjoint_orth(q)?);
        }
        // A Dirichlet section is also read as a Bergman section through the
        // pushforward, whose images reach further into the orbit.
        if space == SpaceKind::Dirichlet {
            let t_push = MultOperator::new(self.probe, SpaceKind::Bergman, n)?;
            for j in 0..core {
                let q = &ortho.q[j];
                images.push(t_push.apply_orth(q)?);
                images.push(t_push.adjoint_orth(q)?);
            }
        }
        let total: f64 = images.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

        for extra in 1..=self.max_extra_levels {
            if !cur.iter().all(representable) {
                if n < SOFT_CAP {
                    return Ok(None);
                }
                break;
            }
            let start = ortho.len();
            for v in &cur {
                ortho.push(v.clone());
            }
            let captured: f64 = ortho.q[start..]
                .iter()
                .map(|q| images.iter().map(|x| q.dotc(x).norm_sqr()).sum::<f64>())
                .sum::<f64>()
                .sqrt();
            cur = step(&cur)?;
            if extra >= 2 && captured < ENVELOPE_TOL * total {
                break;
            }
        }
        if !cur.iter().all(representable) && n < SOFT_CAP {
            return Ok(None);
        }
        Ok(Some(SubspaceBasis {
            label: self.label.clone(),
            space,
            basis: ortho.matrix(n + 1),
            core,
            generators: self.generators.clone(),
            dropped: ortho.dropped,
        }))
    }
}

/// `span { phi^j g }` with levels `0..=core_levels` as the core.
pub fn orbit_subspace(generators: &[CoeffVector], phi: &BlaschkeProduct, core_levels: usize) -> Result<SubspaceBasis> {
    OrbitBuilder::new(generators.to_vec(), phi, core_levels).build()
}

/// Reproducing kernels at the zeros of `psi`, with derivative kernels for
/// repeated zeros. They span `ker M_psi^*`.
pub fn kernel_space(psi: &BlaschkeProduct, space: SpaceKind) -> Result<Vec<CoeffVector>> {
    let mut out = Vec::new();
    for (point, mult) in cluster_values(psi.zeros(), TOL_CLUSTER) {
        for d in 0..mult {
            out.push(kernel_derivative_vector(point, d, space, None)?);
        }
    }
    Ok(out)
}

/// Section of the orthogonal complement of the orbit generated by
/// `generators` under `psi`, where the generators lie in `ker M_psi^*`:
/// the orbit of `ker M_psi^* minus span(generators)`.
pub fn orbit_complement(
    generators: &[CoeffVector],
    psi: &BlaschkeProduct,
    probe: &BlaschkeProduct,
    core_levels: usize,
    label: &str,
) -> Result<SubspaceBasis> {
    let Some(first) = generators.first() else {
        return Err(Error::domain("complement needs the generators of the subspace"));
    };
    let space = first.space();
    let kernels = kernel_space(psi, space)?;
    let len = kernels.iter().chain(generators).map(|v| v.truncation()).max().unwrap_or(0);

    let mut w = Ortho::default();
    for k in &kernels {
        w.push(k.to_orthonormal_len(len));
    }
    for g in generators {
        let x = g.to_orthonormal_len(len);
        let mut r = x.clone();
        for q in &w.q {
            let c = q.dotc(&r);
            r.axpy(-c, q, C64::new(1.0, 0.0));
        }
        if r.norm() > 1e-8 * x.norm() {
            return Err(Error::Consistency(format!(
                "generator is not in the kernel of the adjoint (off by {:.3e})",
                r.norm() / x.norm()
            )));
        }
    }
    let mut all = Ortho::default();
    for g in generators {
        all.push(g.to_orthonormal_len(len));
    }
    let m = all.len();
    for q in &w.q {
        all.push(q.clone());
    }
    let perp: Vec<CoeffVector> = all.q[m..].iter().map(|q| CoeffVector::from_orthonormal(q.as_slice(), space)).collect();
    if perp.is_empty() {
        return Err(Error::domain("generators already span the whole kernel"));
    }
    OrbitBuilder::new(perp, psi, core_levels).probe(probe).label(label).build()
}

/// Index past which the Taylor coefficients of `phi` sum to below 1e-15.
fn symbol_margin(phi: &BlaschkeProduct) -> Result<usize> {
    let (c, r) = phi.cauchy_envelope();
    if r == 0.0 {
        return Ok(phi.order());
    }
    let n = (((1e-16 * (1.0 - r) / c).ln() / r.ln()).ceil().max(1.0) as usize).min(MAX_TRUNCATION);
    let t = phi.taylor(Some(n))?;
    let mut acc = 0.0;
    for (k, a) in t.coeffs().iter().enumerate().rev() {
        acc += a.norm();
        if acc > 1e-15 {
            return Ok(k.max(phi.order()));
        }
    }
    Ok(phi.order())
}

/// `span { z^(j + k q) : j in classes, k >= 0 }`, sized so that `phi` maps
/// the core into the envelope exactly up to the symbol's negligible tail.
pub fn monomial_class_subspace(
    classes: &[usize],
    q: usize,
    phi: &BlaschkeProduct,
    space: SpaceKind,
    label: &str,
) -> Result<SubspaceBasis> {
    if q == 0 || classes.is_empty() || classes.iter().any(|&j| j >= q) {
        return Err(Error::domain("classes must be a nonempty set of residues mod q"));
    }
    let m = symbol_margin(phi)?;
    let n = (3 * m + 8 * q).max(48);
    if n > MAX_TRUNCATION {
        return Err(Error::numerical("monomial section exceeds the maximum truncation"));
    }
    let in_class = |k: usize| classes.contains(&(k % q));
    let core: Vec<usize> = (0..=n - 2 * m).filter(|&k| in_class(k)).collect();
    let extra: Vec<usize> = (n - 2 * m + 1..=n - m).filter(|&k| in_class(k)).collect();
    let mut basis = DMatrix::zeros(n + 1, core.len() + extra.len());
    for (col, &k) in core.iter().chain(&extra).enumerate() {
        basis[(k, col)] = C64::new(1.0, 0.0);
    }
    Ok(SubspaceBasis {
        label: label.to_string(),
        space,
        basis,
        core: core.len(),
        generators: classes.iter().map(|&j| CoeffVector::monomial(j, j, space)).collect(),
        dropped: 0,
    })
}

/// Departure of a section from invariance under `M_phi` and `M_phi^*`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport {
    /// `|| (I - P_E) M_phi P_C ||`
    pub invariance: f64,
    /// `|| (I - P_E) M_phi^* P_C ||`
    pub adjoint: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.invariance.max(self.adjoint)
    }
}

fn outside(q: &DMatrix<C64>, x: &DMatrix<C64>) -> DMatrix<C64> {
    x - q * (q.adjoint() * x)
}

pub fn reducing_residual(s: &SubspaceBasis, phi: &BlaschkeProduct) -> Result<ResidualReport> {
    let n = s.truncation();
    let op = MultOperator::new(phi, s.space, n)?;
    let core = s.core_basis();
    let mut fwd = DMatrix::zeros(n + 1, s.core);
    let mut adj = DMatrix::zeros(n + 1, s.core);
    for j in 0..s.core {
        let col = core.column(j).into_owned();
        fwd.set_column(j, &op.apply_orth(&col)?);
        adj.set_column(j, &op.adjoint_orth(&col)?);
    }
    Ok(ResidualReport {
        invariance: spectral_norm(&outside(&s.basis, &fwd)),
        adjoint: spectral_norm(&outside(&s.basis, &adj)),
    })
}

/// Dimension of `M minus phi M`, read off from the core.
#[derive(Clone, Debug, PartialEq)]
pub struct WanderingReport {
    pub dim: usize,
    /// Singular values of `(I - P_{phi E}) P_C`, decreasing.
    pub singular_values: Vec<f64>,
}

pub fn wandering_dim(s: &SubspaceBasis, phi: &BlaschkeProduct) -> Result<WanderingReport> {
    let n = s.truncation();
    let op = MultOperator::new(phi, s.space, n)?;
    let mut img = Ortho::default();
    for j in 0..s.dim() {
        img.push(op.apply_orth(&s.basis.column(j).into_owned())?);
    }
    let qy = img.matrix(n + 1);
    let sv = singular_values(&outside(&qy, &s.core_basis()));
    let (lo, hi) = AMBIGUOUS_BAND;
    if let Some(v) = sv.iter().find(|&&v| v > lo && v < hi) {
        return Err(Error::numerical(format!(
            "wandering test of `{}` is ambiguous (singular value {v:.3})",
            s.label
        )));
    }
    Ok(WanderingReport { dim: sv.iter().filter(|&&v| v > 0.5).count(), singular_values: sv })
}

/// Image of a Dirichlet-space section under `f -> (z f)'`. In orthonormal
/// coordinates this map is the identity, so only the space changes.
pub fn u_pushforward(s: &SubspaceBasis) -> Result<SubspaceBasis> {
    if s.space != SpaceKind::Dirichlet {
        return Err(Error::domain("pushforward starts from a Dirichlet-space subspace"));
    }
    Ok(SubspaceBasis {
        label: format!("U({})", s.label),
        space: SpaceKind::Bergman,
        basis: s.basis.clone(),
        core: s.core,
        generators: s.generators.iter().map(u_map).collect::<Result<_>>()?,
        dropped: s.dropped,
    })
}

/// `|| Q_1^* Q_2 ||` over the full envelopes.
pub fn cross_gram_norm(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<f64> {
    if a.space != b.space {
        return Err(Error::domain("subspaces live in different spaces"));
    }
    let rows = a.basis.nrows().max(b.basis.nrows());
    Ok(spectral_norm(&(a.padded(rows).adjoint() * b.padded(rows))))
}
