//! Polynomial root finding through companion matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// All complex roots of `c[0] + c[1] x + ... + c[n] x^n` (with `c[n] != 0`).
pub fn roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    assert!(n >= 1 && c[n] != 0.0, "leading coefficient must be nonzero");
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / c[n];
    }
    m.complex_eigenvalues().iter().map(|&z| polish(c, z)).collect()
}

/// Roots of a polynomial with complex coefficients.
pub fn roots_complex(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    assert!(n >= 1 && c[n] != Complex64::new(0.0, 0.0), "leading coefficient must be nonzero");
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / c[n];
    }
    let schur = m.schur();
    let (_, t) = schur.unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

fn eval(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ci in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

fn polish(c: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (p, dp) = eval(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_with_known_roots() {
        // (x-1)(x+2)(x-0.5)(x-3)
        let c = [-3.0, 8.5, -4.0, -2.5, 1.0];
        let mut re: Vec<f64> = roots(&c).iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([-2.0, 0.5, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn complex_coefficients() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        // (x - i)(x - 2) = x^2 - (2 + i) x + 2i
        let r = roots_complex(&[2.0 * i, -(2.0 * one + i), one]);
        assert!(r.iter().any(|z| (z - i).norm() < 1e-13));
        assert!(r.iter().any(|z| (z - 2.0).norm() < 1e-13));
    }
}
