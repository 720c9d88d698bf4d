//! Seeded random instances with a known classification.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::InstanceSpec;
use crate::blaschke::BlaschkeProduct;
use crate::classify::{detect_structure, Verdict};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Random zeros, kept only when no structural test fires.
    Generic,
    /// `a phi_lambda(z^n)`.
    EquivZn,
    /// `psi_1(z^2)` with `psi_1` of order 2 and not itself equivalent to `z^2`.
    EvenComposite,
    /// `b (z phi_gamma)^2`.
    PsiSquared,
    /// `a phi_alpha^n`.
    MoebiusPower,
    /// `a phi_lambda^2 o (z phi_gamma)` with `lambda, gamma != 0`.
    SquareComposite,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Generic,
        Family::EquivZn,
        Family::EvenComposite,
        Family::PsiSquared,
        Family::MoebiusPower,
        Family::SquareComposite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Generic => "generic",
            Family::EquivZn => "equiv_zn",
            Family::EvenComposite => "even_composite",
            Family::PsiSquared => "psi_squared",
            Family::MoebiusPower => "moebius_power",
            Family::SquareComposite => "square_composite",
        }
    }

    /// Order used when none is requested; `None` for the equivalence family,
    /// which cycles through orders 2, 3, 4.
    fn default_order(self) -> Option<usize> {
        match self {
            Family::EquivZn => None,
            _ => Some(4),
        }
    }

    fn fixed_order(self) -> bool {
        matches!(self, Family::EvenComposite | Family::PsiSquared | Family::SquareComposite)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::input(format!("unknown family `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Verdict the classifier must return for a member of `family` of order `n`.
pub fn expected_verdict(family: Family, n: usize) -> Verdict {
    match (family, n) {
        (Family::EquivZn, 4) => Verdict::CaseI,
        (Family::EquivZn, _) => Verdict::ReducibleZn,
        (Family::EvenComposite, _) => Verdict::CaseIi,
        (Family::PsiSquared, _) => Verdict::CaseIii,
        (Family::SquareComposite, _) | (Family::MoebiusPower, 4) => Verdict::CaseIv,
        (Family::MoebiusPower, _) => Verdict::Irreducible,
        (Family::Generic, 4) => Verdict::CaseV,
        (Family::Generic, 2 | 3) => Verdict::Irreducible,
        (Family::Generic, _) => Verdict::Undetermined,
    }
}

fn disc_point(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU))
}

fn annulus_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.random_range(lo..hi), rng.random_range(0.0..TAU))
}

fn phase(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..TAU)
}

fn one_instance(family: Family, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<BlaschkeProduct>> {
    let origin = C64::new(0.0, 0.0);
    let phi = match family {
        Family::EquivZn => {
            let outer = BlaschkeProduct::new(phase(rng), vec![disc_point(rng, 0.5)])?;
            BlaschkeProduct::compose(&outer, &BlaschkeProduct::z_power(n))?
        }
        Family::EvenComposite => {
            let (a, b) = (disc_point(rng, 0.6), disc_point(rng, 0.6));
            if (a + b).norm() < 0.1 {
                return Ok(None);
            }
            let outer = BlaschkeProduct::new(phase(rng), vec![a, b])?;
            BlaschkeProduct::compose(&outer, &BlaschkeProduct::z_power(2))?
        }
        Family::PsiSquared => {
            let gamma = annulus_point(rng, 0.1, 0.8);
            BlaschkeProduct::new(phase(rng), vec![origin, origin, gamma, gamma])?
        }
        Family::MoebiusPower => {
            let alpha = annulus_point(rng, 0.1, 0.7);
            BlaschkeProduct::new(phase(rng), vec![alpha; n])?
        }
        Family::SquareComposite => {
            let lambda = annulus_point(rng, 0.1, 0.6);
            let gamma = annulus_point(rng, 0.1, 0.6);
            let outer = BlaschkeProduct::new(phase(rng), vec![lambda, lambda])?;
            BlaschkeProduct::compose(&outer, &BlaschkeProduct::new(0.0, vec![origin, gamma])?)?
        }
        Family::Generic => {
            let zeros = (0..n).map(|_| disc_point(rng, 0.8)).collect();
            let phi = BlaschkeProduct::new(phase(rng), zeros)?;
            let v = detect_structure(&phi)?.verdict;
            if v != expected_verdict(Family::Generic, n) {
                return Ok(None);
            }
            phi
        }
    };
    Ok(Some(phi))
}

/// `count` instances of `family`, reproducible from `seed`.
pub fn gen_instances(family: Family, count: usize, seed: u64, order: Option<usize>) -> Result<Vec<InstanceSpec>> {
    if let Some(n) = order {
        if family.fixed_order() && n != 4 {
            return Err(Error::input(format!("family {family} only has order 4")));
        }
        if n < 2 {
            return Err(Error::input("order must be at least 2"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::numerical(format!("rejection sampling for {family} did not converge")));
        }
        let n = order.or(family.default_order()).unwrap_or(2 + out.len() % 3);
        if let Some(phi) = one_instance(family, n, &mut rng)? {
            let label = format!("{family}-{:04}", out.len());
            out.push(InstanceSpec::from_product(&phi, Some(label)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_labelled() {
        let a = gen_instances(Family::PsiSquared, 3, 7, None).unwrap();
        let b = gen_instances(Family::PsiSquared, 3, 7, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[2].label.as_deref(), Some("psi_squared-0002"));
        assert_ne!(a, gen_instances(Family::PsiSquared, 3, 8, None).unwrap());
    }

    #[test]
    fn families_recover_their_verdicts() {
        for family in Family::ALL {
            for spec in gen_instances(family, 4, 11, None).unwrap() {
                let phi = spec.product().unwrap();
                let v = detect_structure(&phi).unwrap().verdict;
                assert_eq!(v, expected_verdict(family, phi.order()), "{spec:?}");
            }
        }
    }

    #[test]
    fn equivalence_family_cycles_orders() {
        let orders: Vec<usize> =
            gen_instances(Family::EquivZn, 6, 1, None).unwrap().iter().map(|s| s.zeros.len()).collect();
        assert_eq!(orders, vec![2, 3, 4, 2, 3, 4]);
        assert_eq!(gen_instances(Family::EquivZn, 2, 1, Some(5)).unwrap()[0].zeros.len(), 5);
    }

    #[test]
    fn rejects_bad_requests() {
        assert!("nope".parse::<Family>().is_err());
        assert!(gen_instances(Family::PsiSquared, 1, 0, Some(3)).is_err());
    }
}
