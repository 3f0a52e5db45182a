//! Truncated power-series arithmetic.

use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Cauchy product of two coefficient slices, truncated to `n` terms.
pub fn mul<T>(a: &[T], b: &[T], n: usize) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Mul<Output = T>,
{
    let mut out = vec![T::default(); n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] = out[i + j] + ai * bj;
        }
    }
    out
}

/// Evaluate `Σ c_j z^j` and `Σ j c_j z^j` by Horner's rule.
pub fn eval_with_euler(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut s = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for (j, &cj) in c.iter().enumerate().rev() {
        s = s * z + cj;
        d = d * z + cj * j as f64;
    }
    (s, d)
}

/// Evaluate a real series at a complex point.
pub fn eval_real(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |s, &cj| s * z + cj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_square() {
        let g = vec![1.0; 6];
        let sq = mul(&g, &g, 6);
        assert_eq!(sq, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn euler_operator() {
        let c: Vec<Complex64> = (0..4).map(|j| Complex64::new(j as f64 + 1.0, 0.0)).collect();
        let z = Complex64::new(0.5, 0.25);
        let (s, d) = eval_with_euler(&c, z);
        let s_ref: Complex64 = c.iter().enumerate().map(|(j, cj)| cj * z.powi(j as i32)).sum();
        let d_ref: Complex64 = c.iter().enumerate().map(|(j, cj)| cj * z.powi(j as i32) * j as f64).sum();
        assert!((s - s_ref).norm() < 1e-15 && (d - d_ref).norm() < 1e-15);
    }
}
