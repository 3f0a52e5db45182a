//! The acceptance checks, shared by the test suite and the command line.
//! Each check returns a pass/fail verdict with a one-line summary.

use crate::angular::{angular_eigs, branch};
use crate::coords::{TortoiseMap, DEFAULT_SERIES_TERMS};
use crate::error::Result;
use crate::greens::{
    direct_tensor_inverse, finite_tensor_inverse_oracle, zero_residue, CircleContour, ZeroResidueOptions,
};
use crate::metric::{BlackHoleParams, End};
use crate::radial::{
    integrate_radial, outgoing_series, radial_green, real_axis_nonresonance_check, wronskian, Spectral,
};
use crate::resonances::{classify_trapping, find_mode, scan, Rect, ScanOptions, TrappingCase};
use crate::tdwave::{evolve, plateau_prediction, ringdown_fit, Profile, WaveConfig};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

/// Default seed for randomized checks.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Verdict of one acceptance check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CheckOutcome {
    /// `PASS 3 zero-residue: ... [1.2 s]`
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let limit = self.limit.map(|l| format!(" / {} s", l.as_secs())).unwrap_or_default();
        format!("{verdict} {} {}: {} [{:.1} s{limit}]", self.id, self.name, self.summary, self.elapsed.as_secs_f64())
    }
}

fn timed<F>(id: u8, name: &'static str, limit: Option<u64>, body: F) -> CheckOutcome
where
    F: FnOnce() -> Result<(bool, String)>,
{
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let limit = limit.map(Duration::from_secs);
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let (passed, summary) = match outcome {
        Ok((ok, s)) => (ok && in_time, if in_time { s } else { format!("{s}; over the time limit") }),
        Err(e) => (false, format!("{}: {e}", e.name())),
    };
    CheckOutcome { id, name, passed, summary, elapsed, limit }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sds_map(a: f64) -> Result<TortoiseMap> {
    TortoiseMap::build(&BlackHoleParams::new(0.1, 3.0, a, 0.0)?, None, DEFAULT_SERIES_TERMS)
}

/// Central difference with one Richardson step.
fn richardson<F: FnMut(f64) -> Result<Complex64>>(mut f: F, h: f64) -> Result<Complex64> {
    let d = |f: &mut F, h: f64| -> Result<Complex64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    let coarse = d(&mut f, h)?;
    let fine = d(&mut f, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Criterion 1: `W(0,0,0) = 0`, `∂_λW = r_+ − r_-`, `∂_ωW = −i(1+α)(r_+² + r_-² + 2a²)`.
pub fn check_wronskian_identities() -> CheckOutcome {
    timed(1, "wronskian-identities", Some(10), || {
        let mut ok = true;
        let mut worst = (0.0f64, 0.0f64, 0.0f64);
        for a in [0.0, 0.01] {
            let m = sds_map(a)?;
            let p = &m.params;
            let w0 = wronskian(&m, Spectral::new(c(0.0, 0.0), c(0.0, 0.0), 0))?;
            let r0 = w0.w.norm() / w0.scale(&m);
            let dl = richardson(|h| Ok(wronskian(&m, Spectral::new(c(0.0, 0.0), c(h, 0.0), 0))?.w), 1e-3)?;
            let dw = richardson(|h| Ok(wronskian(&m, Spectral::new(c(h, 0.0), c(0.0, 0.0), 0))?.w), 1e-4)?;
            let el = (dl - (p.r_plus - p.r_minus)).norm() / (p.r_plus - p.r_minus);
            let target = c(0.0, -p.zero_mode_constant());
            let ew = (dw - target).norm() / target.norm();
            ok &= r0 < 1e-8 && el < 1e-6 && ew < 1e-6;
            worst = (worst.0.max(r0), worst.1.max(el), worst.2.max(ew));
        }
        Ok((
            ok,
            format!(
                "|W(0)|/scale {:.1e} (< 1e-8), d_lambda rel {:.1e}, d_omega rel {:.1e} (< 1e-6)",
                worst.0, worst.1, worst.2
            ),
        ))
    })
}

/// Criterion 2: `λ = l(l+1)` without rotation; real `λ` for real `ω` with rotation.
pub fn check_angular_exactness(seed: u64) -> CheckOutcome {
    timed(2, "angular-exactness", Some(30), || {
        let sds = BlackHoleParams::new(0.1, 3.0, 0.0, 0.0)?;
        let mut worst_exact: f64 = 0.0;
        for k in -5..=5i32 {
            for b in angular_eigs(&sds, c(1.3, -0.4), k, 40)? {
                if b.l <= 10 {
                    worst_exact = worst_exact.max((b.lambda - (b.l * (b.l + 1)) as f64).norm());
                }
            }
        }
        let kds = BlackHoleParams::new(0.1, 3.0, 0.01, 0.0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_im: f64 = 0.0;
        let mut count = 0usize;
        for _ in 0..50 {
            let w = rng.gen_range(-5.0..5.0);
            for k in -5..=5i32 {
                for b in angular_eigs(&kds, c(w, 0.0), k, 40)? {
                    if b.converged {
                        worst_im = worst_im.max(b.lambda.im.abs());
                        count += 1;
                    }
                }
            }
        }
        Ok((
            worst_exact < 1e-9 && worst_im < 1e-9,
            format!("max |lambda - l(l+1)| {worst_exact:.1e}, max |Im lambda| {worst_im:.1e} over {count} branches (< 1e-9)"),
        ))
    })
}

/// Criterion 3: Residue at `ω = 0` and the slope of `λ_r`.
pub fn check_zero_residue() -> CheckOutcome {
    timed(3, "zero-residue", Some(60), || {
        let m = sds_map(0.01)?;
        let z = zero_residue(&m, &ZeroResidueOptions::default())?;
        let e_res = (z.direct - z.target).norm() / z.target.norm();
        let e_slope = (z.lambda_r_slope - z.slope_target).norm() / z.slope_target.norm();
        let e_theta = (z.s_theta0 + 1.0 / (4.0 * std::f64::consts::PI)).abs();
        Ok((
            e_res < 1e-3 && e_slope < 1e-4 && e_theta < 1e-6,
            format!("residue rel {e_res:.1e} (< 1e-3), lambda_r slope rel {e_slope:.1e} (< 1e-4), S_theta0 err {e_theta:.1e}"),
        ))
    })
}

/// Criterion 4: No zeros in the upper half plane; real-axis margin.
pub fn check_no_upper_half_plane() -> CheckOutcome {
    timed(4, "no-upper-half-plane", Some(300), || {
        let m = sds_map(0.01)?;
        let rect = Rect::new(-5.0, 5.0, 0.05, 1.0)?;
        let ks: Vec<i32> = (-2..=2).collect();
        let ls: Vec<usize> = (0..=4).collect();
        let opts = ScanOptions { grid: (1, 1), n_contour: 96, ..Default::default() };
        let outcome = scan(&m, &rect, &ks, &ls, &opts);
        // scan visits l in 0..=4 with l >= |k|; keep l <= |k| + 2
        let total: i64 =
            outcome.counts.iter().filter(|(k, l, _)| *l <= k.unsigned_abs() as usize + 2).map(|e| e.2).sum();
        let modes = outcome.counts.iter().filter(|(k, l, _)| *l <= k.unsigned_abs() as usize + 2).count();
        let mut min_margin = f64::INFINITY;
        let mut sampled = 0;
        for i in 0..=20 {
            let w = -5.0 + 0.5 * i as f64 + 0.013;
            for &k in &ks {
                let b = branch(&m.params, c(w, 0.0), k, k.unsigned_abs() as usize, None)?;
                let rep = real_axis_nonresonance_check(&m, w, k, b.lambda.re)?;
                if let Some(margin) = rep.margin {
                    min_margin = min_margin.min(margin);
                    sampled += 1;
                }
            }
        }
        Ok((
            total == 0 && outcome.resonances.is_empty() && outcome.failures.is_empty() && min_margin > 1e-8,
            format!(
                "{total} zeros over {modes} modes, {} unresolved cells; real-axis min |W|/scale {min_margin:.1e} on {sampled} points",
                outcome.failures.len()
            ),
        ))
    })
}

fn series_distance(a: &[f64], b: &[f64], t: &[f64], window: (f64, f64)) -> f64 {
    t.iter()
        .zip(a.iter().zip(b))
        .filter(|(ti, _)| **ti >= window.0 && **ti <= window.1)
        .map(|(_, (x, y))| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Criterion 5: Ringdown of the time-domain evolution vs the located resonances.
pub fn check_time_domain_agreement() -> CheckOutcome {
    timed(5, "frequency-vs-time-domain", Some(300), || {
        let p = BlackHoleParams::new(0.1, 3.0, 0.0, 0.0)?;
        let m = TortoiseMap::build(&p, None, DEFAULT_SERIES_TERMS)?;
        let window = (4.0, 10.0);
        let mut ok = true;
        let mut parts = Vec::new();
        for l in [1usize, 2] {
            let qnm = find_mode(&p, 0, l, 0, 1e-11)?;
            let mut runs = Vec::new();
            for dx in [0.05, 0.025, 0.0125] {
                let cfg = WaveConfig { l, dx, t_final: 12.0, probes: vec![0.0], ..Default::default() };
                let s =
                    evolve(&m, &cfg, &Profile::Gaussian { center: 0.0, width: 0.5, amplitude: 1.0 }, &Profile::Zero)?;
                runs.push(s);
            }
            let fit = ringdown_fit(&runs[2].t, &runs[2].values[0], window)?;
            let e_re = (fit.omega.re - qnm.omega.re).abs() / qnm.omega.re.abs();
            let e_im = (fit.omega.im - qnm.omega.im).abs() / qnm.omega.im.abs();
            let t = &runs[0].t;
            let d1 = series_distance(&runs[0].values[0], &runs[1].values[0], t, window);
            let d2 = series_distance(&runs[1].values[0], &runs[2].values[0], t, window);
            let ord = (d1 / d2).log2();
            ok &= e_re < 0.02 && e_im < 0.02 && (ord - 2.0).abs() <= 0.3;
            parts.push(format!(
                "l={l}: qnm {:.5}{:+.5}i, fit {:.5}{:+.5}i, rel err {e_re:.1e}/{e_im:.1e}, order {ord:.2}",
                qnm.omega.re, qnm.omega.im, fit.omega.re, fit.omega.im
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Criterion 6: Late-time constant of `l = 0` evolutions vs the slice formula, on two
/// families of initial data.
pub fn check_plateau() -> CheckOutcome {
    timed(6, "plateau", Some(300), || {
        let m = sds_map(0.0)?;
        let families: [(&str, Vec<(Profile, Profile)>); 2] = [
            (
                "gaussian",
                vec![
                    (
                        Profile::Gaussian { center: 0.0, width: 0.5, amplitude: 1.0 },
                        Profile::Gaussian { center: 0.3, width: 0.7, amplitude: 1.0 },
                    ),
                    (Profile::Zero, Profile::Gaussian { center: -1.5, width: 0.4, amplitude: -0.7 }),
                ],
            ),
            (
                "compact-bump",
                vec![
                    (
                        Profile::Bump { center: 1.0, half_width: 1.5, amplitude: 0.4 },
                        Profile::Bump { center: 0.5, half_width: 1.0, amplitude: 2.0 },
                    ),
                    (Profile::Zero, Profile::Bump { center: -2.0, half_width: 2.0, amplitude: 1.0 }),
                ],
            ),
        ];
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for (_, cases) in &families {
            for (u0, v0) in cases {
                let pred = plateau_prediction(&m, 0, u0, v0)?;
                let cfg = WaveConfig { l: 0, t_final: 40.0, dt_out: 0.5, probes: vec![0.0], ..Default::default() };
                let s = evolve(&m, &cfg, u0, v0)?;
                let last = *s.values[0].last().expect("non-empty series");
                let rel = (last - pred).abs() / pred.abs();
                worst = worst.max(rel);
                ok &= rel < 1e-2;
            }
        }
        // the initial displacement alone leaves no constant
        let s = evolve(
            &m,
            &WaveConfig { l: 0, t_final: 40.0, dt_out: 0.5, ..Default::default() },
            &Profile::Gaussian { center: 0.0, width: 0.5, amplitude: 1.0 },
            &Profile::Zero,
        )?;
        let residue = s.values[0].last().expect("non-empty series").abs();
        ok &= residue < 1e-3;
        Ok((
            ok,
            format!(
                "max rel deviation {worst:.1e} (< 1e-2) over 2 families x 2 cases, displacement-only plateau {residue:.1e}"
            ),
        ))
    })
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, shift: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| {
        let z = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if i == j {
            z + shift
        } else {
            z
        }
    })
}

/// Criterion 7: Contour tensor-inverse against the direct inverse.
pub fn check_tensor_oracle(seed: u64) -> CheckOutcome {
    timed(7, "tensor-inverse-oracle", Some(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut min_ratio = f64::INFINITY;
        for _ in 0..20 {
            let na = rng.gen_range(2..=5);
            let nb = rng.gen_range(2..=5);
            let a = random_matrix(&mut rng, na, c(2.0, 0.5));
            let b = random_matrix(&mut rng, nb, c(2.0, -0.3));
            let direct = direct_tensor_inverse(&a, &b).expect("separated spectra");
            let err = |nodes: usize| -> Result<f64> {
                let ct = CircleContour::separating(&a, &b, nodes)?;
                Ok((finite_tensor_inverse_oracle(&a, &b, &ct)? - &direct).norm() / direct.norm())
            };
            worst = worst.max(err(512)?);
            let (e1, e2) = (err(16)?, err(32)?);
            if e1 > 1e-11 {
                min_ratio = min_ratio.min(e1 / e2.max(1e-16));
            }
        }
        Ok((
            worst < 1e-8 && min_ratio > 1e2,
            format!(
                "max rel error {worst:.1e} at 512 nodes (< 1e-8), min error ratio 16->32 nodes {min_ratio:.1e} (> 1e2)"
            ),
        ))
    })
}

/// A random geometry near the reference one. Draws whose boundary series
/// cannot be built are redrawn; the number of redraws is counted.
fn random_map(rng: &mut ChaCha8Rng, redraws: &mut usize) -> Result<TortoiseMap> {
    loop {
        let m0 = rng.gen_range(0.08..0.12);
        let lambda = rng.gen_range(1.5..4.0);
        let a = rng.gen_range(0.0..0.02);
        let p = BlackHoleParams::new(m0, lambda, a, 0.0)?;
        match TortoiseMap::build(&p, None, DEFAULT_SERIES_TERMS) {
            Ok(m) => return Ok(m),
            Err(crate::Error::SeriesDivergence { .. }) => *redraws += 1,
            Err(e) => return Err(e),
        }
    }
}

/// Criterion 8: Randomized invariants of the radial solver and the trapping
/// classification.
pub fn check_property_suites(seed: u64) -> CheckOutcome {
    timed(8, "property-suites", Some(300), || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut redraws = 0usize;
        // Wronskian constancy
        let mut worst_defect: f64 = 0.0;
        for _ in 0..100 {
            let m = random_map(&mut rng, &mut redraws)?;
            let k: i32 = rng.gen_range(-2..=2);
            let l = rng.gen_range(k.unsigned_abs() as usize..=4);
            let w = c(rng.gen_range(-3.0..3.0), rng.gen_range(-0.8..0.5));
            let lam = c((l * (l + 1)) as f64, rng.gen_range(-0.1..0.1));
            worst_defect = worst_defect.max(wronskian(&m, Spectral::new(w, lam, k))?.constancy_defect);
        }
        // boundary series against integration from deeper inside the disc
        let mut worst_series: f64 = 0.0;
        for _ in 0..20 {
            let m = random_map(&mut rng, &mut redraws)?;
            let p = m.params.clone();
            let sp = Spectral::new(
                c(rng.gen_range(-3.0..3.0), rng.gen_range(-0.8..0.3)),
                c(rng.gen_range(0.0..12.0), 0.0),
                rng.gen_range(-2..=2),
            );
            for end in [End::Plus, End::Minus] {
                let s = outgoing_series(&m, end, sp, 48)?;
                let x_deep = s.x_match + end.sign() * 2.0 / p.surface_gravity(end);
                let (u0, du0) = s.eval_series(&m, c(x_deep, 0.0));
                let (u, du) = integrate_radial(&m, sp, x_deep, s.x_match, u0, du0)?;
                let e = ((u - s.value).norm() / s.value.norm())
                    .max((du - s.slope).norm() / s.slope.norm().max(s.value.norm()));
                worst_series = worst_series.max(e);
            }
        }
        // Green kernel residual
        let mut worst_green: f64 = 0.0;
        for (a, w, lam, k) in [(0.0, c(1.1, -0.4), 2.0, 0), (0.01, c(-2.0, 0.3), 6.0, 1)] {
            let m = sds_map(a)?;
            let sp = Spectral::new(w, c(lam, 0.0), k);
            let n = 2001;
            let x: Vec<f64> = (0..n).map(|i| -6.0 + 12.0 * i as f64 / (n - 1) as f64).collect();
            let f: Vec<Complex64> = x.iter().map(|&x| c((-(x - 0.3) * (x - 0.3) * 2.0).exp(), 0.0)).collect();
            let u = radial_green(&m, sp, &f, &x)?;
            let h = x[1] - x[0];
            for i in 3..n - 3 {
                let d2 = (270.0 * (u[i + 1] + u[i - 1]) - 27.0 * (u[i + 2] + u[i - 2]) + 2.0 * (u[i + 3] + u[i - 3])
                    - 490.0 * u[i])
                    / (180.0 * h * h);
                let v = m.potential_at_r(m.r_of_x(x[i]), sp.omega, sp.lambda, sp.k);
                worst_green = worst_green.max((-d2 + v * u[i] - f[i]).norm());
            }
        }
        // trapping classification on a 20 x 10 grid
        let m = sds_map(0.01)?;
        let mut ambiguous = 0;
        let mut seen = [0usize; 3];
        let mut ordered = true;
        for i in 0..10 {
            let kt = -1.0 + 2.0 * i as f64 / 9.0;
            let mut last = 0u8;
            for j in 0..20 {
                let lt = 0.02 + 2.0 * j as f64 / 19.0;
                match classify_trapping(&m, lt, kt) {
                    Ok(rep) => {
                        let rank = match rep.case {
                            TrappingCase::BelowBarrier => 0u8,
                            TrappingCase::HyperbolicMaximum => 1,
                            TrappingCase::NontrappingMonotone => 2,
                        };
                        seen[rank as usize] += 1;
                        ordered &= rank >= last;
                        last = rank;
                    }
                    Err(_) => ambiguous += 1,
                }
            }
        }
        let sds = sds_map(0.0)?;
        let r = 0.3f64;
        let crit = r.powi(4) / sds.params.delta_r(r).0;
        let top = classify_trapping(&sds, crit, 0.0)?;
        let r_top = top.barrier_top.map(|(x, _)| sds.r_of_x(x)).unwrap_or(f64::NAN);
        let photon = (r_top - 3.0 * sds.params.m0).abs() / (3.0 * sds.params.m0);
        let ok = worst_defect < 1e-6
            && worst_series < 1e-7
            && worst_green < 1e-6
            && ambiguous < 10
            && ordered
            && top.case == TrappingCase::HyperbolicMaximum
            && photon < 0.02;
        Ok((
            ok,
            format!(
                "defect {worst_defect:.1e} (< 1e-6), series/ODE {worst_series:.1e} (< 1e-7) \
                 with {redraws} geometry redraws, green {worst_green:.1e} (< 1e-6), \
                 trapping cases {seen:?} with {ambiguous} ambiguous, barrier top r/3M0-1 = {photon:.1e}"
            ),
        ))
    })
}

/// All checks in order.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_wronskian_identities(),
        check_angular_exactness(seed),
        check_zero_residue(),
        check_no_upper_half_plane(),
        check_time_domain_agreement(),
        check_plateau(),
        check_tensor_oracle(seed),
        check_property_suites(seed),
    ]
}
