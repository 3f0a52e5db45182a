//! Complex Gamma function via the Lanczos approximation (g = 7, nine terms).

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for `Re z >= 0.5` (principal branch up to multiples of 2πi,
/// which cancel on exponentiation).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &p) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Complex Gamma function.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Γ(z) Γ(1-z) = π / sin(πz)
        PI / ((PI * z).sin() * ln_gamma_right(1.0 - z).exp())
    } else {
        ln_gamma_right(z).exp()
    }
}

/// Reciprocal Gamma function `1/Γ(z)`, entire in `z` and exactly zero at the
/// non-positive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return Complex64::new(0.0, 0.0);
        }
        (PI * z).sin() / PI * ln_gamma_right(1.0 - z).exp()
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_values() {
        assert!((gamma(c(1.0, 0.0)) - 1.0).norm() < 1e-14);
        assert!((gamma(c(0.5, 0.0)) - PI.sqrt()).norm() < 1e-14);
        assert!((gamma(c(5.0, 0.0)) - 24.0).norm() < 1e-12);
        assert!((gamma(c(-0.5, 0.0)) + 2.0 * PI.sqrt()).norm() < 1e-13);
    }

    #[test]
    fn complex_value() {
        // Γ(1+i)
        let g = gamma(c(1.0, 1.0));
        assert!((g - c(0.498_015_668_118_356, -0.154_949_828_301_810_7)).norm() < 1e-14);
    }

    #[test]
    fn reciprocal_vanishes_at_poles() {
        for n in 0..5 {
            assert_eq!(rgamma(c(-(n as f64), 0.0)).norm(), 0.0);
            assert!(rgamma(c(-(n as f64) + 1e-9, 0.0)).norm() < 1e-8 * 30.0);
        }
    }

    #[test]
    fn recurrence_holds_off_axis() {
        for &(re, im) in &[(0.3, 2.0), (-1.7, 0.4), (2.5, -3.0), (-4.2, -6.0)] {
            let z = c(re, im);
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() < 1e-13 * rhs.norm().max(1.0), "{z}");
            assert!((rgamma(z) * gamma(z) - 1.0).norm() < 1e-13);
        }
    }
}
