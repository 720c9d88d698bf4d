use nalgebra::{DMatrix, Schur};
use num_complex::Complex64 as C64;

use super::Polynomial;
use crate::error::{Error, Result};

/// Relative residual accepted for a polished root.
pub const TOL_ROOT: f64 = 1e-10;
/// Default radius for merging nearby points that are not roots of one
/// polynomial (for example values of a map at several zeros).
pub const TOL_CLUSTER: f64 = 1e-7;

/// Eigenvalue approximations of an m-fold root scatter by about eps^(1/m),
/// so grouping starts from this much wider radius and verifies each group
/// against the derivatives of the polynomial, regrouping more tightly when
/// the check fails.
const GROUP_RADIUS: f64 = 5e-2;
const MIN_GROUP_RADIUS: f64 = 1e-8;
/// Relative size below which a Taylor coefficient counts as vanishing.
const TOL_MULTIPLICITY: f64 = 1e-11;

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

/// All roots of `p`, grouped by multiplicity and sorted by real then
/// imaginary part.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Root>> {
    if p.is_zero() {
        return Err(Error::domain("the zero polynomial has no isolated roots"));
    }
    if p.degree() == 0 {
        return Err(Error::domain("a constant polynomial has no roots"));
    }
    if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::domain("polynomial has non-finite coefficients"));
    }

    let zero_mult = p.coeffs().iter().take_while(|c| **c == C64::new(0.0, 0.0)).count();
    let q = Polynomial::new(p.coeffs()[zero_mult..].to_vec());
    let mut roots = Vec::new();
    if zero_mult > 0 {
        roots.push(Root { value: C64::new(0.0, 0.0), multiplicity: zero_mult });
    }
    if q.degree() > 0 {
        let approx = companion_eigenvalues(&q)?;
        let dq = q.derivative();
        let polished: Vec<C64> = approx.into_iter().map(|z| newton(&q, &dq, z, 12)).collect();
        roots.extend(group_roots(&q, polished));
    }

    let big = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    for r in &roots {
        let res = p.eval(r.value).norm();
        let t = r.value.norm();
        let scale = big * (0..p.coeffs().len()).map(|i| t.powi(i as i32)).sum::<f64>();
        if res > TOL_ROOT * scale {
            return Err(Error::numerical(format!(
                "root {} has relative residual {:.3e}",
                r.value,
                res / scale
            )));
        }
    }
    roots.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(roots)
}

/// Roots listed with repetition.
pub fn poly_roots_flat(p: &Polynomial) -> Result<Vec<C64>> {
    Ok(poly_roots(p)?
        .into_iter()
        .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
        .collect())
}

/// Merge points closer than `tol * (1 + |z|)` into (centroid, count) pairs.
pub fn cluster_values(points: &[C64], tol: f64) -> Vec<(C64, usize)> {
    components(points, tol)
        .into_iter()
        .map(|idx| {
            let sum: C64 = idx.iter().map(|&i| points[i]).sum();
            (sum / idx.len() as f64, idx.len())
        })
        .collect()
}

fn components(points: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = 1.0 + points[i].norm().max(points[j].norm());
            if (points[i] - points[j]).norm() <= tol * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut label, i);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(i);
    }
    groups
}

fn companion_eigenvalues(q: &Polynomial) -> Result<Vec<C64>> {
    let d = q.degree();
    let lead = q.leading();
    if d == 1 {
        return Ok(vec![-q.coeff(0) / lead]);
    }
    let mut m = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -q.coeff(i) / lead;
    }
    let schur = Schur::try_new(m, 1e-15, 10_000)
        .ok_or_else(|| Error::numerical("companion Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(d);
    let mut i = 0;
    while i < d {
        if i + 1 < d && t[(i + 1, i)].norm() > 1e-14 * (t[(i, i)].norm() + t[(i + 1, i + 1)].norm() + 1.0) {
            let (a, b, c, e) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let tr = a + e;
            let det = a * e - b * c;
            let disc = (tr * tr - det * 4.0).sqrt();
            out.push((tr + disc) / 2.0);
            out.push((tr - disc) / 2.0);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    Ok(out)
}

fn newton(p: &Polynomial, dp: &Polynomial, mut z: C64, iters: usize) -> C64 {
    let mut best = p.eval(z).norm();
    for _ in 0..iters {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / d;
        let r = p.eval(cand).norm();
        if !(r < best) {
            break;
        }
        best = r;
        z = cand;
    }
    z
}

fn group_roots(q: &Polynomial, approx: Vec<C64>) -> Vec<Root> {
    let mut out = Vec::new();
    group_within(q, &approx, GROUP_RADIUS, &mut out);
    out
}

fn group_within(q: &Polynomial, points: &[C64], radius: f64, out: &mut Vec<Root>) {
    for idx in components(points, radius) {
        let m = idx.len();
        if m == 1 {
            out.push(Root { value: points[idx[0]], multiplicity: 1 });
            continue;
        }
        let members: Vec<C64> = idx.iter().map(|&i| points[i]).collect();
        let centroid: C64 = members.iter().sum::<C64>() / m as f64;
        if let Some(c) = verified_multiple_root(q, centroid, m) {
            out.push(Root { value: c, multiplicity: m });
        } else if radius > MIN_GROUP_RADIUS {
            group_within(q, &members, radius / 10.0, out);
        } else {
            out.extend(members.iter().map(|&z| Root { value: z, multiplicity: 1 }));
        }
    }
}

/// Refine a candidate m-fold root as the simple root of the (m-1)-th
/// derivative and accept it only if the lower Taylor coefficients vanish.
fn verified_multiple_root(q: &Polynomial, guess: C64, m: usize) -> Option<C64> {
    let mut d = q.clone();
    for _ in 0..m - 1 {
        d = d.derivative();
    }
    let dd = d.derivative();
    let c = newton(&d, &dd, guess, 20);
    let taylor = q.taylor_at(c);
    let r = c.norm();
    let big = q.coeffs().iter().map(|x| x.norm()).fold(0.0, f64::max);
    for (k, a) in taylor.iter().enumerate().take(m) {
        // sum_i |q_i| binom(i, k) |c|^(i - k)
        let mut scale = 0.0;
        let mut binom = 1.0;
        for i in k..q.coeffs().len() {
            if i > k {
                binom *= i as f64 / (i - k) as f64;
            }
            scale += big * binom * r.powi((i - k) as i32);
        }
        if a.norm() > TOL_MULTIPLICITY * scale {
            return None;
        }
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn same_multiset(found: &[Root], expected: &[(C64, usize)], tol: f64) -> bool {
        found.len() == expected.len()
            && expected.iter().all(|(z, m)| {
                found.iter().any(|r| r.multiplicity == *m && (r.value - z).norm() < tol)
            })
    }

    #[test]
    fn simple_roots() {
        let p = Polynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = poly_roots(&p).unwrap();
        assert!(same_multiset(&r, &[(c(-1.0, 0.0), 1), (c(1.0, 0.0), 1)], 1e-14));
    }

    #[test]
    fn exact_zero_root_multiplicity() {
        let r = poly_roots(&Polynomial::monomial(4)).unwrap();
        assert_eq!(r, vec![Root { value: c(0.0, 0.0), multiplicity: 4 }]);
    }

    #[test]
    fn repeated_roots_are_grouped() {
        let a = c(0.3, -0.2);
        let b = c(-0.5, 0.4);
        let p = Polynomial::from_roots(&[a, a, a, a, b, b, c(0.1, 0.0)]);
        let r = poly_roots(&p).unwrap();
        assert!(same_multiset(&r, &[(a, 4), (b, 2), (c(0.1, 0.0), 1)], 1e-9), "{r:?}");
    }

    #[test]
    fn close_distinct_roots_stay_separate() {
        let p = Polynomial::from_roots(&[c(0.2, 0.0), c(0.2 + 3e-5, 0.0), c(-0.6, 0.1)]);
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 3, "{r:?}");
        assert!(r.iter().all(|x| x.multiplicity == 1));
    }

    #[test]
    fn constant_rejected() {
        assert!(matches!(
            poly_roots(&Polynomial::constant(c(2.0, 0.0))),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn clustering_merges_nearby_values() {
        let pts = [c(0.1, 0.0), c(0.1 + 1e-9, 0.0), c(0.5, 0.5)];
        let mut g = cluster_values(&pts, TOL_CLUSTER);
        g.sort_by_key(|a| a.1);
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].1, 2);
    }
}
