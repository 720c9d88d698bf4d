use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

/// Below this many multiply-adds the direct loop beats the FFT.
const DIRECT_LIMIT: usize = 1 << 16;

/// First `len` coefficients of the product of two coefficient sequences.
pub(crate) fn convolve(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    let mut out = vec![C64::new(0.0, 0.0); len];
    if a.is_empty() || b.is_empty() || len == 0 {
        return out;
    }
    if a.len().saturating_mul(b.len()) <= DIRECT_LIMIT {
        for (i, &ai) in a.iter().enumerate() {
            if ai == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, &bj) in b.iter().enumerate().take(len - i) {
                out[i + j] += ai * bj;
            }
        }
        return out;
    }
    let full = a.len() + b.len() - 1;
    let size = full.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa = vec![C64::new(0.0, 0.0); size];
    let mut fb = vec![C64::new(0.0, 0.0); size];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    for (o, v) in out.iter_mut().zip(fa.iter()).take(full.min(len)) {
        *o = v * scale;
    }
    out
}

/// `out[k] = sum_{j >= 0} a[k + j] * conj(b[j])` for `k < a.len()`.
pub(crate) fn correlate_conj(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let rev: Vec<C64> = a.iter().rev().copied().collect();
    let bc: Vec<C64> = b.iter().take(n).map(|z| z.conj()).collect();
    let c = convolve(&rev, &bc, n);
    (0..n).map(|k| c[n - 1 - k]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < len {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }

    fn seq(n: usize, s: f64) -> Vec<C64> {
        (0..n)
            .map(|k| C64::new((k as f64 * s).sin(), (k as f64 * 0.37 + s).cos()))
            .collect()
    }

    #[test]
    fn fft_path_matches_direct() {
        let a = seq(700, 0.3);
        let b = seq(500, 1.1);
        let fast = convolve(&a, &b, 900);
        let slow = naive(&a, &b, 900);
        let err = fast.iter().zip(&slow).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "err {err}");
    }

    #[test]
    fn correlation_small() {
        let a = seq(6, 0.2);
        let b = seq(4, 0.9);
        let c = correlate_conj(&a, &b);
        for k in 0..6 {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..4 {
                if k + j < 6 {
                    s += a[k + j] * b[j].conj();
                }
            }
            assert!((s - c[k]).norm() < 1e-12);
        }
    }
}
