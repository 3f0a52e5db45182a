//! Randomized invariants of the geometry, angular, radial and tensor-inverse
//! layers.

use kdsqnm::angular::angular_eigs;
use kdsqnm::coords::{TortoiseMap, DEFAULT_SERIES_TERMS};
use kdsqnm::greens::{direct_tensor_inverse, finite_tensor_inverse_oracle, CircleContour};
use kdsqnm::radial::{wronskian, Spectral};
use kdsqnm::tdwave::{evolve, plateau_prediction, Profile, WaveConfig};
use kdsqnm::BlackHoleParams;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn map(a: f64) -> TortoiseMap {
    TortoiseMap::build(&BlackHoleParams::new(0.1, 3.0, a, 0.0).unwrap(), None, DEFAULT_SERIES_TERMS).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tortoise_map_round_trips(s in 0.01f64..0.99, a in 0.0f64..0.02) {
        let m = map(a);
        let p = &m.params;
        let r = p.r_minus + s * (p.r_plus - p.r_minus);
        let back = m.r_of_x(m.x_of_r(r));
        prop_assert!((back - r).abs() < 1e-10 * r, "r={r} back={back}");
    }

    #[test]
    fn tortoise_map_is_increasing(s in 0.01f64..0.98, ds in 1e-4f64..0.01) {
        let m = map(0.01);
        let p = &m.params;
        let r1 = p.r_minus + s * (p.r_plus - p.r_minus);
        let r2 = r1 + ds * (p.r_plus - p.r_minus);
        prop_assert!(m.x_of_r(r2) > m.x_of_r(r1));
    }

    #[test]
    fn angular_spectrum_conjugation(re in -4.0f64..4.0, im in -1.0f64..0.5, k in -3i32..=3) {
        let p = BlackHoleParams::new(0.1, 3.0, 0.01, 0.0).unwrap();
        let w = c(re, im);
        let a = angular_eigs(&p, w, k, 30).unwrap();
        let b = angular_eigs(&p, -w.conj(), -k, 30).unwrap();
        for (x, y) in a.iter().zip(&b).take(8) {
            prop_assert!((x.lambda - y.lambda.conj()).norm() < 1e-9 * (1.0 + x.lambda.norm()));
        }
    }

    #[test]
    fn wronskian_conjugation(re in -3.0f64..3.0, im in -0.8f64..0.4, lam in 0.0f64..12.0, k in -2i32..=2) {
        let m = map(0.01);
        let sp = Spectral::new(c(re, im), c(lam, 0.3), k);
        let w1 = wronskian(&m, sp).unwrap();
        let w2 = wronskian(&m, Spectral::new(-sp.omega.conj(), sp.lambda.conj(), -k)).unwrap();
        prop_assert!((w1.w - w2.w.conj()).norm() < 1e-8 * w1.scale(&m));
    }

    #[test]
    fn wronskian_is_constant(re in -3.0f64..3.0, im in -0.8f64..0.5, lam in 0.0f64..20.0, k in -2i32..=2) {
        let m = map(0.01);
        let w = wronskian(&m, Spectral::new(c(re, im), c(lam, 0.0), k)).unwrap();
        prop_assert!(w.constancy_defect < 1e-6, "defect {}", w.constancy_defect);
    }

    #[test]
    fn tensor_inverse_matches_direct(
        na in 2usize..=5,
        nb in 2usize..=5,
        entries in proptest::collection::vec(-0.4f64..0.4, 100),
    ) {
        let mut it = entries.iter().cycle();
        let mut draw = |n: usize, shift: Complex64| {
            DMatrix::from_fn(n, n, |i, j| {
                let z = c(*it.next().unwrap(), *it.next().unwrap());
                if i == j { z + shift } else { z }
            })
        };
        let a = draw(na, c(1.5, 0.2));
        let b = draw(nb, c(1.5, -0.4));
        let direct = direct_tensor_inverse(&a, &b).unwrap();
        let contour = CircleContour::separating(&a, &b, 256).unwrap();
        let oracle = finite_tensor_inverse_oracle(&a, &b, &contour).unwrap();
        prop_assert!((oracle - &direct).norm() < 1e-8 * direct.norm());
    }

    #[test]
    fn plateau_is_linear_in_velocity(amp in -3.0f64..3.0, center in -3.0f64..3.0, width in 0.2f64..1.0) {
        let m = map(0.0);
        let v = Profile::Gaussian { center, width, amplitude: 1.0 };
        let u = Profile::Gaussian { center: 0.0, width: 0.5, amplitude: 2.0 };
        let one = plateau_prediction(&m, 0, &u, &v).unwrap();
        let scaled = plateau_prediction(&m, 0, &Profile::Zero, &v.scaled(amp)).unwrap();
        prop_assert!((scaled - amp * one).abs() < 1e-12 * (1.0 + one.abs() * amp.abs()));
        prop_assert!(plateau_prediction(&m, 1, &u, &v).unwrap() == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn evolution_energy_does_not_grow(l in 0usize..3, center in -2.0f64..2.0, width in 0.3f64..1.0) {
        let m = map(0.0);
        let cfg = WaveConfig { l, dx: 0.1, t_final: 8.0, dt_out: 0.5, ..Default::default() };
        let s = evolve(&m, &cfg, &Profile::Gaussian { center, width, amplitude: 1.0 }, &Profile::Zero).unwrap();
        let e0 = s.energy[0];
        for pair in s.energy.windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-6 * e0);
        }
    }
}
