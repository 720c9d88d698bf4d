//! Reducing-subspace classification of `M_phi` on the Dirichlet space.

mod lattice;
mod structure;

pub use lattice::{check_power_series_infeasible, enumerate_zn_lattice, power_series_pair, PowerSeriesReport, LatticeReport, MAX_LATTICE_ORDER};
pub use structure::{
    decompose_order4, has_rotation_symmetry, is_equiv_z_phi_gamma_sq, is_equivalent_to_zn, is_rotated_monomial,
    rotation_period, single_critical_point, zeros_rotation_invariant, Decomposition, EquivalenceWitness, IDENTITY_SAMPLES,
    PsiSquaredWitness,
};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::operators::{
    monomial_class_subspace, orbit_complement, reducing_residual, wandering_dim, OrbitBuilder, ResidualReport,
    SubspaceBasis, WanderingReport,
};
use crate::spaces::{CoeffVector, SpaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Order 4, equivalent to `z^4`.
    CaseI,
    /// Order 4, `phi = psi_1(z^2)` but not case i.
    CaseIi,
    /// Order 4, equivalent to `(z phi_gamma)^2` with `gamma != 0`.
    CaseIii,
    /// Order 4, decomposable otherwise: irreducible.
    CaseIv,
    /// Order 4, not decomposable: irreducible.
    CaseV,
    /// Order other than 4, equivalent to `z^n`.
    ReducibleZn,
    Irreducible,
    /// `phi = psi(z^q)` for a proper divisor `q`.
    ReduciblePartial,
    Undetermined,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::CaseI => "case_i",
            Verdict::CaseIi => "case_ii",
            Verdict::CaseIii => "case_iii",
            Verdict::CaseIv => "case_iv",
            Verdict::CaseV => "case_v",
            Verdict::ReducibleZn => "reducible_zn",
            Verdict::Irreducible => "irreducible",
            Verdict::ReduciblePartial => "reducible_partial",
            Verdict::Undetermined => "undetermined",
        }
    }

    pub fn is_reducible(self) -> bool {
        matches!(
            self,
            Verdict::CaseI | Verdict::CaseIi | Verdict::CaseIii | Verdict::ReducibleZn | Verdict::ReduciblePartial
        )
    }
}

/// Everything the structural tests found.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Witnesses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceWitness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub decompositions: Vec<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_squared: Option<PsiSquaredWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation_period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_critical_point: Option<C64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_count: Option<u64>,
    pub rotated_monomial: bool,
}

/// Verdict and witnesses, without any subspace computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Structure {
    pub verdict: Verdict,
    pub witnesses: Witnesses,
}

/// Run the structural decision procedure for the order of `phi`.
pub fn detect_structure(phi: &BlaschkeProduct) -> Result<Structure> {
    let n = phi.order();
    let mut w = Witnesses { rotated_monomial: is_rotated_monomial(phi), ..Default::default() };
    if n == 0 {
        return Err(Error::domain("a constant symbol has no structure to classify"));
    }
    if n == 1 {
        return Ok(Structure { verdict: Verdict::Irreducible, witnesses: w });
    }
    w.equivalence = is_equivalent_to_zn(phi)?;
    let verdict = match n {
        2 | 3 => {
            if w.equivalence.is_some() {
                w.lattice_count = Some((1u64 << n) - 2);
                Verdict::ReducibleZn
            } else {
                Verdict::Irreducible
            }
        }
        4 => {
            w.decompositions = decompose_order4(phi)?;
            w.psi_squared = is_equiv_z_phi_gamma_sq(phi)?;
            let even = w.decompositions.iter().any(|d| d.critical_point.norm() <= 1e-7);
            let case_iii = w.psi_squared.is_some();
            if case_iii && (even || w.equivalence.is_some()) {
                return Err(Error::Consistency(
                    "square-type witness coexists with an even or monomial witness".into(),
                ));
            }
            if w.equivalence.is_some() {
                w.lattice_count = Some(14);
                Verdict::CaseI
            } else if even {
                Verdict::CaseIi
            } else if case_iii {
                Verdict::CaseIii
            } else if !w.decompositions.is_empty() {
                Verdict::CaseIv
            } else {
                Verdict::CaseV
            }
        }
        _ => {
            if w.equivalence.is_some() {
                w.lattice_count = (n < 64).then(|| (1u64 << n) - 2);
                Verdict::ReducibleZn
            } else if let Some(q) = rotation_period(phi) {
                w.rotation_period = Some(q);
                Verdict::ReduciblePartial
            } else if let Some(a) = single_critical_point(phi)? {
                w.single_critical_point = Some(a);
                Verdict::Irreducible
            } else {
                Verdict::Undetermined
            }
        }
    };
    Ok(Structure { verdict, witnesses: w })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyConfig {
    pub space: SpaceKind,
    /// Orbit levels in the tested core of orbit sections.
    pub core_levels: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { space: SpaceKind::Dirichlet, core_levels: 6 }
    }
}

/// A subspace emitted by the classification, with its own checks.
#[derive(Clone, Debug)]
pub struct ClassifiedSubspace {
    pub basis: SubspaceBasis,
    pub residual: ResidualReport,
    pub wandering: WanderingReport,
    pub expected_wandering: usize,
    pub minimal: bool,
}

#[derive(Clone, Debug)]
pub struct ClassificationResult {
    pub structure: Structure,
    pub subspaces: Vec<ClassifiedSubspace>,
}

impl ClassificationResult {
    pub fn verdict(&self) -> Verdict {
        self.structure.verdict
    }
}

fn describe(
    basis: SubspaceBasis,
    phi: &BlaschkeProduct,
    expected_wandering: usize,
    minimal: bool,
) -> Result<ClassifiedSubspace> {
    Ok(ClassifiedSubspace {
        residual: reducing_residual(&basis, phi)?,
        wandering: wandering_dim(&basis, phi)?,
        basis,
        expected_wandering,
        minimal,
    })
}

fn class_subspaces(phi: &BlaschkeProduct, q: usize, space: SpaceKind, minimal: bool) -> Result<Vec<ClassifiedSubspace>> {
    let per_class = phi.order() / q;
    (0..q)
        .map(|j| {
            let s = monomial_class_subspace(&[j], q, phi, space, &format!("z^{j} mod {q}"))?;
            describe(s, phi, per_class, minimal)
        })
        .collect()
}

/// The pair `M`, `M^perp` for `phi = phi_mu o (b psi^2)`, `psi = z phi_gamma`:
/// `M` is the orbit of `phi_gamma = psi / z` under `psi^2`.
pub fn psi_squared_pair(
    phi: &BlaschkeProduct,
    w: &PsiSquaredWitness,
    cfg: &ClassifyConfig,
) -> Result<(SubspaceBasis, SubspaceBasis)> {
    let psi2 = w.psi().pow(2);
    let gen = CoeffVector::new(BlaschkeProduct::moebius(w.gamma)?.taylor(None)?, cfg.space);
    let m = OrbitBuilder::new(vec![gen.clone()], &psi2, cfg.core_levels).probe(phi).label("M").build()?;
    let mp = orbit_complement(&[gen], &psi2, phi, cfg.core_levels, "M perp")?;
    Ok((m, mp))
}

/// Classify `phi` and build a finite section of every emitted subspace.
pub fn classify(phi: &BlaschkeProduct, cfg: &ClassifyConfig) -> Result<ClassificationResult> {
    let structure = detect_structure(phi)?;
    let n = phi.order();
    let subspaces = match structure.verdict {
        Verdict::CaseI | Verdict::ReducibleZn => class_subspaces(phi, n, cfg.space, true)?,
        Verdict::CaseIi => class_subspaces(phi, 2, cfg.space, true)?,
        Verdict::ReduciblePartial => {
            let q = structure.witnesses.rotation_period.expect("partial verdict carries its period");
            class_subspaces(phi, q, cfg.space, false)?
        }
        Verdict::CaseIii => {
            let w = structure.witnesses.psi_squared.expect("case iii carries its witness");
            let (m, mp) = psi_squared_pair(phi, &w, cfg)?;
            vec![describe(m, phi, 1, true)?, describe(mp, phi, 3, true)?]
        }
        _ => Vec::new(),
    };
    Ok(ClassificationResult { structure, subspaces })
}
