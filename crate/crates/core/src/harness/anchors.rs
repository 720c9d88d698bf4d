//! Fixed anchor strings attached to check records. A report consumer can use
//! them to locate the statement a check exercises.

pub const DIRICHLET_NORM: &str = "‖f‖²_D = ‖f‖²_{H²}";
pub const KERNEL: &str = "reproducing kernel of D has";
pub const EQUIVALENCE: &str = "φ₂ = a φ_λ ∘ φ₁";
pub const DECOMPOSITION: &str = "φ(z) = ψ₁(ψ₂(z))";
pub const LOW_ORDER: &str = "φ is equivalent to zⁿ";
pub const PUSHFORWARD: &str = "(zM)' is a reducing subspace";
pub const FOUR_MINIMAL: &str = "exact four nontrivial minimal reducing subspaces";
pub const ROTATED_MONOMIAL: &str = "φ = azⁿ, |a| = 1";
pub const ISOMETRY: &str = "⟨p, q⟩_D = ⟨(zp)′, q⟩_{H²}";
pub const ORTHOGONAL_POWERS: &str = "if and only if φ(0) = 0";
pub const BOUNDARY: &str = "the fact that zφ′φ̄";
pub const DISTINGUISHED_SPAN: &str = "M₀(φ) = span{φ′φʲ";
pub const DISTINGUISHED: &str = "the distinguished reducing subspace";
pub const ADJOINT_FORMULA: &str = "λ₁ = ⋯ = λ_{n−1} = 0";
pub const DISTORTION: &str = "D(φᵏf, φᵏg)";
pub const MINIMAL_ORTHOGONAL: &str = "M₁ and M₂ are orthogonal";
pub const CRITICAL_COUNT: &str = "has exactly n − 1 zeros in";
pub const WANDERING: &str = "ker M_φ* ∩ M";
pub const CLASSES: &str = "M_j = span{z^j, z^{q+j}";
pub const SQUARE_RECURRENCE: &str = "(2j+1)/(2j−1)";
pub const MOEBIUS_FOURTH: &str = "let φ = φ_α⁴";
pub const MOEBIUS_POWER: &str = "if φ = φ_αⁿ for some";
pub const NOT_EQUIVALENT: &str = "not unitarily equivalent to M_{zⁿ}";
pub const EQ_SERIES: &str = "Σ |α|^{2nk}/(nk+2) = 1";
pub const LATTICE: &str = "exactly 2ⁿ − 2 proper reducing subspaces";

pub const ALL: [&str; 25] = [
    DIRICHLET_NORM,
    KERNEL,
    EQUIVALENCE,
    DECOMPOSITION,
    LOW_ORDER,
    PUSHFORWARD,
    FOUR_MINIMAL,
    ROTATED_MONOMIAL,
    ISOMETRY,
    ORTHOGONAL_POWERS,
    BOUNDARY,
    DISTINGUISHED_SPAN,
    DISTINGUISHED,
    ADJOINT_FORMULA,
    DISTORTION,
    MINIMAL_ORTHOGONAL,
    CRITICAL_COUNT,
    WANDERING,
    CLASSES,
    SQUARE_RECURRENCE,
    MOEBIUS_FOURTH,
    MOEBIUS_POWER,
    NOT_EQUIVALENT,
    EQ_SERIES,
    LATTICE,
];
