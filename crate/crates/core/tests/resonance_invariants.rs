//! Invariants of the located resonances.

use kdsqnm::coords::{TortoiseMap, DEFAULT_SERIES_TERMS};
use kdsqnm::resonances::{count_zeros_box, find_mode, refine, scan, Rect, ScanOptions};
use kdsqnm::BlackHoleParams;

fn sds() -> BlackHoleParams {
    BlackHoleParams::new(0.1, 3.0, 0.0, 0.0).unwrap()
}

#[test]
fn spectrum_is_symmetric_under_reflection() {
    let p = sds();
    let m = TortoiseMap::build(&p, None, DEFAULT_SERIES_TERMS).unwrap();
    let mode = find_mode(&p, 0, 1, 0, 1e-11).unwrap();
    let mirror = refine(&m, -mode.omega.conj(), 0, 1, 1e-11, Some(0.1)).unwrap();
    assert!((mirror.omega + mode.omega.conj()).norm() < 1e-6, "{} vs {}", mirror.omega, mode.omega);
}

#[test]
fn count_matches_refined_roots() {
    let p = sds();
    let m = TortoiseMap::build(&p, None, DEFAULT_SERIES_TERMS).unwrap();
    let mode = find_mode(&p, 0, 2, 0, 1e-11).unwrap();
    let rect = Rect::new(mode.omega.re - 0.4, mode.omega.re + 0.3, mode.omega.im - 0.25, mode.omega.im + 0.3).unwrap();
    let count = count_zeros_box(&m, &rect, 0, 2, 64).unwrap();
    let out = scan(&m, &rect, &[0], &[2], &ScanOptions { grid: (1, 1), ..Default::default() });
    assert!(out.failures.is_empty());
    assert_eq!(count, 1);
    assert_eq!(out.resonances.len() as i64, count);
    assert!((out.resonances[0].omega - mode.omega).norm() < 1e-6);
}

#[test]
fn modes_move_linearly_with_rotation() {
    let m0 = 0.1;
    let omega = |a: f64| find_mode(&BlackHoleParams::new(m0, 3.0, a, 0.0).unwrap(), 1, 1, 0, 1e-11).unwrap().omega;
    let (w0, w1, w2) = (omega(0.0), omega(1e-3 * m0), omega(1e-2 * m0));
    let s1 = (w1 - w0).norm() / (1e-3 * m0);
    let s2 = (w2 - w1).norm() / (9e-3 * m0);
    assert!(s1 / s2 < 3.0 && s2 / s1 < 3.0, "slopes {s1} {s2}");
}

#[test]
fn fundamental_modes_decay() {
    let p = sds();
    for l in 1..=3 {
        let mode = find_mode(&p, 0, l, 0, 1e-11).unwrap();
        assert!(mode.omega.im < 0.0 && !mode.in_upper_half_plane());
        assert!(mode.residual < 1e-6);
    }
}
