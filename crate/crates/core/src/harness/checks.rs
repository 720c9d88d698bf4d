//! The individual checks recorded in reports.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{anchors, timed, CheckRecord, HarnessConfig};
use crate::blaschke::{circle_distance, moebius, BlaschkeProduct};
use crate::classify::{
    check_power_series_infeasible, enumerate_zn_lattice, power_series_pair, ClassificationResult, Verdict, IDENTITY_SAMPLES,
    MAX_LATTICE_ORDER,
};
use crate::error::Result;
use crate::operators::{adjoint_apply, cross_gram_norm, reducing_residual, u_pushforward, OrbitBuilder};
use crate::series::{cluster_values, poly_roots, PowerSeries, TOL_CLUSTER};
use crate::spaces::{
    circle_pair_integral, default_quadrature_nodes, inner, kernel_vector, poisson_eval, u_map, CoeffVector,
    SpaceKind,
};

const TOL_WITNESS: f64 = 1e-9;
const TOL_PAIRING: f64 = 1e-10;
const TOL_ORTHOGONAL: f64 = 1e-8;
const TOL_IDENTITY: f64 = 1e-8;
const TOL_KILL: f64 = 1e-9;
const TOL_ISOMETRY: f64 = 1e-12;
const TOL_BOUNDARY: f64 = 1e-10;
const TOL_CROSS_GRAM: f64 = 1e-8;
const TOL_LATTICE: f64 = 1e-12;
/// A joint residual of the series equations below this would make the
/// instance a candidate for unitary equivalence with `M_{z^n}`.
const EQ_FLOOR: f64 = 1e-3;
const KERNEL_POINTS: usize = 20;
const POWERS: usize = 8;

fn rng(cfg: &HarnessConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> Vec<C64> {
    (0..=degree).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn random_disc(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn poly_eval(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Dirichlet integral `sum_k k f_k conj(g_k)`.
fn dirichlet_form(f: &[C64], g: &[C64]) -> C64 {
    f.iter().zip(g).enumerate().map(|(k, (a, b))| a * b.conj() * k as f64).sum()
}

fn quadrature_nodes(phi: &BlaschkeProduct, cfg: &HarnessConfig) -> usize {
    let rho = phi.max_zero_modulus();
    let n_eff = if rho == 0.0 { phi.order() } else { (1e-14f64.ln() / rho.ln()).ceil() as usize + phi.order() };
    cfg.quadrature.unwrap_or_else(|| default_quadrature_nodes(n_eff))
}

fn taylor(phi: &BlaschkeProduct, cfg: &HarnessConfig) -> Result<PowerSeries> {
    phi.taylor(cfg.truncation)
}

fn power_series(phi: &BlaschkeProduct, k: usize, cfg: &HarnessConfig) -> Result<PowerSeries> {
    if k == 0 {
        return Ok(PowerSeries::exact(vec![one()]));
    }
    phi.pow(k).taylor(cfg.truncation)
}

fn sum_poisson(phi: &BlaschkeProduct, zeta: C64) -> Result<f64> {
    phi.zeros().iter().map(|&l| poisson_eval(l, zeta)).sum()
}

/// Operator identities that hold for every finite Blaschke product, plus
/// the guarded ones whose hypotheses the instance meets.
pub(crate) fn identity_checks(phi: &BlaschkeProduct, cfg: &HarnessConfig) -> Result<Vec<CheckRecord>> {
    let n = phi.order();
    let mut out = Vec::new();

    out.push(timed("critical_point_count", anchors::CRITICAL_COUNT, 0.0, || {
        if n < 2 {
            return Ok(0.0);
        }
        let inside: usize = poly_roots(&phi.derivative_numerator())?
            .iter()
            .filter(|r| r.value.norm() < 1.0)
            .map(|r| r.multiplicity)
            .sum();
        Ok(inside.abs_diff(n - 1) as f64)
    })?);

    out.push(timed("dirichlet_norm", anchors::DIRICHLET_NORM, 1e-9, || {
        let t = taylor(phi, cfg)?;
        let hardy = CoeffVector::new(t.clone(), SpaceKind::Hardy).norm().powi(2);
        let energy = dirichlet_form(t.coeffs(), t.coeffs()).re;
        let total = CoeffVector::new(t, SpaceKind::Dirichlet).norm().powi(2);
        let nf = n as f64;
        Ok((hardy - 1.0).abs().max((energy - nf).abs() / nf).max((total - nf - 1.0).abs() / (nf + 1.0)))
    })?);

    out.push(timed("kernel_reproduction", anchors::KERNEL, 1e-10, || {
        let t = taylor(phi, cfg)?;
        let mut rng = rng(cfg, 1);
        let mut worst: f64 = 0.0;
        for _ in 0..KERNEL_POINTS {
            let lambda = random_disc(&mut rng, 0.9);
            let target = phi.value(lambda);
            for space in [SpaceKind::Hardy, SpaceKind::Bergman, SpaceKind::Dirichlet] {
                let f = CoeffVector::new(t.clone(), space);
                let k = kernel_vector(lambda, space, None)?;
                worst = worst.max((inner(&f, &k)?.value - target).norm());
            }
        }
        Ok(worst)
    })?);

    out.push(timed("dirichlet_bergman_isometry", anchors::ISOMETRY, TOL_ISOMETRY, || {
        let mut rng = rng(cfg, 2);
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let dp = rng.random_range(0..12);
            let dq = rng.random_range(0..12);
            let p = CoeffVector::from_coeffs(random_poly(&mut rng, dp), SpaceKind::Dirichlet);
            let q = CoeffVector::from_coeffs(random_poly(&mut rng, dq), SpaceKind::Dirichlet);
            let d = inner(&p, &q)?.value;
            let b = inner(&u_map(&p)?, &u_map(&q)?)?.value;
            let h = inner(&u_map(&p)?.in_space(SpaceKind::Hardy), &q.in_space(SpaceKind::Hardy))?.value;
            let scale = p.norm() * q.norm();
            worst = worst.max((d - b).norm() / scale).max((d - h).norm() / scale);
        }
        Ok(worst)
    })?);

    out.push(timed("boundary_poisson_identity", anchors::BOUNDARY, TOL_BOUNDARY, || {
        let m = 256;
        let mut worst: f64 = 0.0;
        let mut top: f64 = 1.0;
        for j in 0..m {
            let zeta = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
            let lhs = zeta * phi.derivative_at(zeta) * phi.value(zeta).conj();
            let rhs = sum_poisson(phi, zeta)?;
            top = top.max(rhs);
            worst = worst.max((lhs - rhs).norm());
        }
        // Integrating the Poisson sum against conj(phi) evaluates phi at its
        // own zeros.
        let q = circle_pair_integral(
            |z| C64::new(sum_poisson(phi, z).unwrap_or(f64::NAN), 0.0),
            |z| phi.value(z),
            quadrature_nodes(phi, cfg),
        )?;
        let expected: C64 = phi.zeros().iter().map(|&l| phi.value(l).conj()).sum();
        Ok((worst / top).max((q.value - expected).norm() / top))
    })?);

    let phi0 = phi.value(C64::new(0.0, 0.0));
    out.push(timed("dirichlet_pairing_with_one", anchors::ORTHOGONAL_POWERS, TOL_PAIRING, || {
        let f = CoeffVector::new(taylor(phi, cfg)?, SpaceKind::Dirichlet);
        let unit = CoeffVector::from_coeffs(vec![one()], SpaceKind::Dirichlet);
        Ok((inner(&f, &unit)?.value - phi0).norm())
    })?);

    let powers: Vec<CoeffVector> = (0..=POWERS)
        .map(|k| Ok(CoeffVector::new(power_series(phi, k, cfg)?, SpaceKind::Dirichlet)))
        .collect::<Result<_>>()?;
    let mut off: f64 = 0.0;
    for j in 0..=POWERS {
        for k in 0..j {
            off = off.max(inner(&powers[j], &powers[k])?.value.norm());
        }
    }
    if phi0.norm() <= 1e-10 {
        out.push(CheckRecord::new("orthogonal_powers", anchors::ORTHOGONAL_POWERS, off, TOL_ORTHOGONAL));
    } else {
        // The converse direction: the Gram matrix must visibly fail to be
        // diagonal, by more than the orthogonality tolerance.
        out.push(CheckRecord::new(
            "powers_not_orthogonal",
            anchors::ORTHOGONAL_POWERS,
            (TOL_ORTHOGONAL - off).max(0.0),
            0.0,
        ));
    }

    if n <= 4 {
        out.push(timed("distortion_formula", anchors::DISTORTION, TOL_IDENTITY, || distortion(phi, cfg))?);
    }

    out.extend(distinguished_checks(phi, cfg)?);

    if let Some(i) = phi.zeros().iter().position(|z| z.norm() == 0.0) {
        let mut rest = phi.zeros().to_vec();
        rest.remove(i);
        out.push(timed("adjoint_of_quotient", anchors::ADJOINT_FORMULA, TOL_IDENTITY, || {
            let t = taylor(phi, cfg)?;
            let quotient = CoeffVector::new(t.div_z(1e-12)?, SpaceKind::Dirichlet);
            let lhs = adjoint_apply(phi, &quotient)?;
            let len = lhs.truncation();
            let mut rhs = CoeffVector::from_coeffs(vec![C64::new(0.0, 0.0); len + 1], SpaceKind::Dirichlet);
            for &l in &rest {
                rhs = rhs.add(&kernel_vector(l, SpaceKind::Dirichlet, Some(len))?.scale(l.conj()));
            }
            Ok(lhs.sub(&rhs).norm())
        })?);
        let distinct = cluster_values(&rest, TOL_CLUSTER);
        if !rest.is_empty()
            && distinct.len() == rest.len()
            && distinct.iter().all(|(l, _)| l.norm() > 1e-6)
        {
            out.push(timed("distinguished_complement", anchors::DISTINGUISHED, TOL_IDENTITY, || {
                distinguished_complement(phi, &rest, cfg)
            })?);
        }
    }
    Ok(out)
}

/// `D(phi^k f, phi^k g) - D(f, g) = k int sum_i P_{lambda_i} f conj(g)`.
fn distortion(phi: &BlaschkeProduct, cfg: &HarnessConfig) -> Result<f64> {
    let mut rng = rng(cfg, 3);
    let nodes = quadrature_nodes(phi, cfg);
    let mut worst: f64 = 0.0;
    for k in 1..=5 {
        let pk = power_series(phi, k, cfg)?;
        for _ in 0..2 {
            let df = rng.random_range(0..6);
            let dg = rng.random_range(0..6);
            let f = random_poly(&mut rng, df);
            let g = random_poly(&mut rng, dg);
            let fk = pk.mul(&PowerSeries::exact(f.clone()));
            let gk = pk.mul(&PowerSeries::exact(g.clone()));
            let lhs = dirichlet_form(fk.coeffs(), gk.coeffs()) - dirichlet_form(&f, &g);
            let q = circle_pair_integral(
                |z| poly_eval(&f, z) * sum_poisson(phi, z).unwrap_or(f64::NAN),
                |z| poly_eval(&g, z),
                nodes,
            )?;
            let rhs = q.value * k as f64;
            worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1.0));
        }
    }
    Ok(worst)
}

fn distinguished_checks(phi: &BlaschkeProduct, cfg: &HarnessConfig) -> Result<Vec<CheckRecord>> {
    let n = phi.order() as f64;
    let bergman = |s: PowerSeries| CoeffVector::new(s, SpaceKind::Bergman);
    let mut out = Vec::new();

    out.push(timed("distinguished_norms", anchors::DISTINGUISHED_SPAN, TOL_IDENTITY, || {
        let mut worst: f64 = 0.0;
        for j in 0..=10 {
            // phi' phi^j = (phi^(j+1))' / (j + 1)
            let s = power_series(phi, j + 1, cfg)?.derivative().scale(C64::new(1.0 / (j + 1) as f64, 0.0));
            let expected = n / (j + 1) as f64;
            worst = worst.max((bergman(s).norm().powi(2) - expected).abs() / expected);
        }
        Ok(worst)
    })?);

    out.push(timed("adjoint_kills_derivative", anchors::DISTINGUISHED_SPAN, TOL_KILL, || {
        let d = bergman(taylor(phi, cfg)?.derivative());
        Ok(adjoint_apply(phi, &d)?.norm())
    })?);

    out.push(timed("adjoint_derivative_recurrence", anchors::DISTINGUISHED_SPAN, TOL_IDENTITY, || {
        // A common truncation for all powers involved.
        let len = match cfg.truncation {
            Some(t) => t,
            None => phi.pow(7).auto_truncation()?,
        };
        let d = |k: usize| -> Result<CoeffVector> {
            Ok(bergman(phi.pow(k).taylor(Some(len))?.derivative()))
        };
        let mut worst: f64 = 0.0;
        for j in 1..=6 {
            let lhs = adjoint_apply(phi, &d(j + 1)?)?;
            worst = worst.max(lhs.sub(&d(j)?).norm());
        }
        Ok(worst)
    })?);

    out.push(timed("distinguished_reducing", anchors::DISTINGUISHED_SPAN, cfg.tol_red, || {
        let g = bergman(taylor(phi, cfg)?.derivative());
        let m0 = OrbitBuilder::new(vec![g], phi, cfg.core_levels).label("M0").build()?;
        Ok(reducing_residual(&m0, phi)?.max())
    })?);
    Ok(out)
}

/// `phi^j / (1 - conj(lambda_i) z)` against `phi' phi^m` in the Bergman space.
fn distinguished_complement(phi: &BlaschkeProduct, rest: &[C64], cfg: &HarnessConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let levels = 4;
    let m0: Vec<CoeffVector> = (0..=levels)
        .map(|m| {
            let s = power_series(phi, m + 1, cfg)?.derivative();
            Ok(CoeffVector::new(s, SpaceKind::Bergman))
        })
        .collect::<Result<_>>()?;
    for &l in rest {
        for j in 0..=levels {
            let v = CoeffVector::new(power_series(phi, j, cfg)?.div_linear(l)?, SpaceKind::Bergman);
            for u in &m0 {
                worst = worst.max(inner(&v, u)?.value.norm() / (v.norm() * u.norm()));
            }
        }
    }
    Ok(worst)
}

fn witness_checks(phi: &BlaschkeProduct, result: &ClassificationResult) -> Vec<CheckRecord> {
    let w = &result.structure.witnesses;
    let m = IDENTITY_SAMPLES;
    let mut out = Vec::new();
    if let Some(e) = &w.equivalence {
        let r = circle_distance(|z| phi.value(z), |z| e.eval(z), m);
        out.push(CheckRecord::new("equivalence_witness", anchors::EQUIVALENCE, r, TOL_WITNESS));
    }
    for (i, d) in w.decompositions.iter().enumerate() {
        let r = circle_distance(|z| phi.value(z), |z| d.outer.value(d.inner.value(z)), m);
        out.push(CheckRecord::new(format!("decomposition_witness[{i}]"), anchors::DECOMPOSITION, r, TOL_WITNESS));
    }
    if let Some(s) = &w.psi_squared {
        let psi = s.psi();
        let r = circle_distance(|z| moebius(s.mu, phi.value(z)), |z| s.b * psi.value(z).powu(2), m);
        out.push(CheckRecord::new("square_witness", anchors::EQUIVALENCE, r, TOL_WITNESS));
    }
    out
}

fn residual_anchor(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::CaseI => anchors::FOUR_MINIMAL,
        Verdict::CaseIi | Verdict::ReduciblePartial => anchors::CLASSES,
        Verdict::CaseIii => anchors::SQUARE_RECURRENCE,
        _ => anchors::LOW_ORDER,
    }
}

/// Checks on a classification: witnesses reproduce `phi`, emitted subspaces
/// reduce (also after the pushforward to the Bergman space), have the
/// expected wandering dimensions and are mutually orthogonal when minimal.
pub(crate) fn classification_checks(
    phi: &BlaschkeProduct,
    result: &ClassificationResult,
    cfg: &HarnessConfig,
) -> Result<Vec<CheckRecord>> {
    let n = phi.order();
    let verdict = result.verdict();
    let w = &result.structure.witnesses;
    let mut out = witness_checks(phi, result);

    for s in &result.subspaces {
        let label = s.basis.label();
        out.push(CheckRecord::new(
            format!("subspace_reducing[{label}]"),
            residual_anchor(verdict),
            s.residual.max(),
            cfg.tol_red,
        ));
        out.push(CheckRecord::new(
            format!("wandering_dimension[{label}]"),
            anchors::WANDERING,
            s.wandering.dim.abs_diff(s.expected_wandering) as f64,
            0.0,
        ));
        out.push(timed(format!("pushforward_reducing[{label}]"), anchors::PUSHFORWARD, cfg.tol_red, || {
            Ok(reducing_residual(&u_pushforward(&s.basis)?, phi)?.max())
        })?);
    }
    let minimal: Vec<_> = result.subspaces.iter().filter(|s| s.minimal).collect();
    for (i, a) in minimal.iter().enumerate() {
        for b in &minimal[i + 1..] {
            out.push(timed(
                format!("minimal_cross_gram[{}|{}]", a.basis.label(), b.basis.label()),
                anchors::MINIMAL_ORTHOGONAL,
                TOL_CROSS_GRAM,
                || cross_gram_norm(&a.basis, &b.basis),
            )?);
        }
    }

    if verdict == Verdict::CaseI {
        out.push(CheckRecord::new(
            "minimal_subspace_count",
            anchors::FOUR_MINIMAL,
            minimal.len().abs_diff(4) as f64,
            0.0,
        ));
    }
    if matches!(verdict, Verdict::CaseI | Verdict::ReducibleZn) && n <= MAX_LATTICE_ORDER {
        out.push(timed("lattice_count", anchors::LATTICE, TOL_LATTICE, || {
            let l = enumerate_zn_lattice(n, crate::spaces::SpaceKind::Dirichlet)?;
            Ok(l.count.abs_diff(l.expected as usize) as f64 + l.max_residual)
        })?);
    }

    if let Some(e) = &w.equivalence {
        if w.rotated_monomial {
            out.push(timed("monomial_power_norms", anchors::ROTATED_MONOMIAL, TOL_IDENTITY, || {
                let mut worst: f64 = 0.0;
                for k in 0..=6 {
                    let v = CoeffVector::new(power_series(phi, k, cfg)?, SpaceKind::Dirichlet);
                    let expected = (k * n + 1) as f64;
                    worst = worst.max((v.norm().powi(2) - expected).abs() / expected);
                }
                Ok(worst)
            })?);
        } else {
            // x = |alpha|^(2n) = |lambda|^2 for lambda = alpha^n.
            out.push(timed("series_equation_at_instance", anchors::NOT_EQUIVALENT, 0.0, || {
                let x = e.lambda.norm_sqr();
                let (a, b) = power_series_pair(e.n, x);
                let joint = (a - 1.0).abs().max((b - x / 2.0).abs());
                Ok((EQ_FLOOR - joint).max(0.0))
            })?);
            out.push(timed("series_equation_grid", anchors::EQ_SERIES, 0.0, || {
                let r = check_power_series_infeasible(e.n, 1e-3, 0.99)?;
                Ok((r.threshold - r.min_joint_residual).max(0.0))
            })?);
        }
    }

    if let Some(s) = &w.psi_squared {
        out.push(timed("square_adjoint_recurrence", anchors::SQUARE_RECURRENCE, TOL_IDENTITY, || {
            square_recurrence(&s.psi(), cfg)
        })?);
    }

    let zeros = phi.zeros();
    if n >= 2 && zeros[0].norm() > 1e-6 && cluster_values(zeros, TOL_CLUSTER).len() == 1 {
        let anchor = if n == 4 { anchors::MOEBIUS_FOURTH } else { anchors::MOEBIUS_POWER };
        out.push(CheckRecord::new("moebius_power_irreducible", anchor, f64::from(u8::from(verdict.is_reducible())), 0.0));
    }
    Ok(out)
}

/// `M_{psi^2}^* (psi^(2j+1) / z) = (2j+1)/(2j-1) psi^(2j-1) / z` for `j = 1..5`.
fn square_recurrence(psi: &BlaschkeProduct, cfg: &HarnessConfig) -> Result<f64> {
    let psi2 = psi.pow(2);
    let len = match cfg.truncation {
        Some(t) => t,
        None => psi.pow(11).auto_truncation()?,
    };
    let gen = |k: usize| -> Result<CoeffVector> {
        Ok(CoeffVector::new(psi.pow(k).taylor(Some(len))?.div_z(1e-12)?, SpaceKind::Dirichlet))
    };
    let mut worst: f64 = 0.0;
    for j in 1..=5 {
        let lhs = adjoint_apply(&psi2, &gen(2 * j + 1)?)?;
        let ratio = (2 * j + 1) as f64 / (2 * j - 1) as f64;
        let rhs = gen(2 * j - 1)?.scale(C64::new(ratio, 0.0));
        worst = worst.max(lhs.sub(&rhs).norm());
    }
    Ok(worst)
}
