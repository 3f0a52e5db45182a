//! Outgoing radial solutions, their Wronskian and the radial Green operator.
//!
//! In the tortoise coordinate the radial equation is `P_x u = −u'' + V_x u = 0`.
//! The solution outgoing at `±∞` has the form `u_± = e^{±iω_± x} v_±(w)`,
//! `w = e^{∓A_± x}`, with `v_±` given by a convergent Taylor series whose
//! coefficients obey `jA(2iω_± − jA)v_j + Σ_{0<l≤j} V_l v_{j−l} = 0`,
//! `v_0 = 1/Γ(1 − 2iω_±/A_±)`. The series is evaluated at a matching point
//! inside its disc and continued across the domain by ODE integration.

use crate::coords::TortoiseMap;
use crate::error::{Error, Result};
use crate::metric::End;
use crate::numerics::gamma::rgamma;
use crate::numerics::ode::{DormandPrince, OdeStats};
use crate::series;
use num_complex::Complex64;

/// Largest number of series terms tried before giving up.
pub const MAX_SERIES_TERMS: usize = 1024;
/// Relative tolerance of the series tail at the matching point.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Window around a positive integer index `ν` treated as exceptional.
pub const EXCEPTIONAL_WINDOW: f64 = 1e-6;
/// Index offset used to average across an exceptional point.
pub const EXCEPTIONAL_OFFSET: f64 = 1e-4;
/// Relative tolerance of the ODE integrator.
pub const ODE_RTOL: f64 = 1e-12;

/// Spectral parameters of the radial problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral {
    pub omega: Complex64,
    pub lambda: Complex64,
    pub k: i32,
}

impl Spectral {
    pub fn new(omega: Complex64, lambda: Complex64, k: i32) -> Self {
        Spectral { omega, lambda, k }
    }
}

/// The solution outgoing at one end, represented by its boundary series.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub end: End,
    pub spectral: Spectral,
    pub omega_end: Complex64,
    pub nu: Complex64,
    /// Rescaled coefficients `v_j s^j` (see [`crate::coords::BoundarySeries`]).
    pub v_coeffs: Vec<Complex64>,
    pub scale: f64,
    pub x_match: f64,
    pub value: Complex64,
    pub slope: Complex64,
    /// Set when `ν` sits within the window of a positive integer and the
    /// values are averaged over `ν ± δ`.
    pub exceptional: bool,
    /// `|v_{N−1} ζ^{N−1}| / |Σ v_j ζ^j|` at the matching point.
    pub tail: f64,
}

impl RadialSolution {
    /// Evaluate `(u, ∂_x u)` from the series at `x` (complex allowed) inside
    /// the disc of convergence. Not valid for exceptional solutions, whose
    /// stored coefficients belong to one of the two averaged neighbours.
    pub fn eval_series(&self, map: &TortoiseMap, x: Complex64) -> (Complex64, Complex64) {
        eval_outgoing(map, self.end, self.omega_end, &self.v_coeffs, self.scale, x)
    }
}

fn eval_outgoing(
    map: &TortoiseMap,
    end: End,
    omega_end: Complex64,
    v: &[Complex64],
    scale: f64,
    x: Complex64,
) -> (Complex64, Complex64) {
    let sigma = end.sign();
    let big_a = map.params.surface_gravity(end);
    let w = (-sigma * big_a * x).exp();
    let (s, e) = series::eval_with_euler(v, w / scale);
    let phase = (Complex64::i() * sigma * omega_end * x).exp();
    let u = phase * s;
    let du = phase * (Complex64::i() * sigma * omega_end * s - sigma * big_a * e);
    (u, du)
}

fn series_coefficients(
    map: &TortoiseMap,
    end: End,
    sp: Spectral,
    n: usize,
) -> Result<(Vec<Complex64>, Complex64, Complex64, f64)> {
    let ps = map.potential_series(end, sp.omega, sp.lambda, sp.k, n)?;
    let big_a = map.params.surface_gravity(end);
    let we = ps.omega_end;
    let nu = 2.0 * Complex64::i() * we / big_a;
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[0] = rgamma(1.0 - nu);
    for j in 1..n {
        let jf = j as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 1..=j {
            acc += ps.coeffs[l] * v[j - l];
        }
        let denom = jf * big_a * (2.0 * Complex64::i() * we - jf * big_a);
        v[j] = -acc / denom;
    }
    Ok((v, we, nu, ps.scale))
}

fn tail_ratio(v: &[Complex64], zeta: f64) -> f64 {
    let n = v.len();
    let total = series::eval_with_euler(v, Complex64::new(zeta, 0.0)).0.norm();
    let last = (n.saturating_sub(3)..n).map(|j| v[j].norm() * zeta.powi(j as i32)).fold(0.0, f64::max);
    let norm1: f64 = v.iter().enumerate().map(|(j, c)| c.norm() * zeta.powi(j as i32)).sum();
    if norm1 == 0.0 {
        return 0.0;
    }
    last / total.max(1e-300 * norm1).max(f64::MIN_POSITIVE)
}

/// Build the solution outgoing at `end` from its Taylor series with at least
/// `n` terms (more are added until the tail criterion holds).
pub fn outgoing_series(map: &TortoiseMap, end: End, sp: Spectral, n: usize) -> Result<RadialSolution> {
    let p = &map.params;
    let big_a = p.surface_gravity(end);
    let rs = p.horizon(end);
    let we = p.omega_end(end, sp.omega, sp.k);
    let nu = 2.0 * Complex64::i() * we / big_a;
    let nearest = nu.re.round();
    let exceptional = nearest >= 1.0 && (nu - nearest).norm() < EXCEPTIONAL_WINDOW;
    let x_match = map.series(end).x_match;
    let xm = Complex64::new(x_match, 0.0);

    let build = |omega: Complex64| -> Result<(Vec<Complex64>, f64, f64, Complex64, Complex64)> {
        let mut terms = n.max(8);
        loop {
            let (v, _, _, scale) = series_coefficients(map, end, Spectral { omega, ..sp }, terms)?;
            let zeta = map.series(end).w_of_x(p, xm).re / scale;
            let tail = tail_ratio(&v, zeta);
            if tail < TAIL_TOLERANCE {
                let oe = p.omega_end(end, omega, sp.k);
                let (u, du) = eval_outgoing(map, end, oe, &v, scale, xm);
                return Ok((v, scale, tail, u, du));
            }
            if terms >= MAX_SERIES_TERMS {
                return Err(Error::TailNotConverged { end: end.symbol(), n: terms, tail });
            }
            terms = (2 * terms).min(MAX_SERIES_TERMS);
        }
    };

    if exceptional {
        // ν = 2i(1+α)(r_s²+a²)ω/A − (const): shift ω so that ν moves by ±δ
        let dnu_domega = 2.0 * Complex64::i() * p.one_plus_alpha() * (rs * rs + p.a * p.a) / big_a;
        let h = EXCEPTIONAL_OFFSET / dnu_domega;
        let (v, scale, t1, u1, d1) = build(sp.omega + h)?;
        let (_, _, t2, u2, d2) = build(sp.omega - h)?;
        return Ok(RadialSolution {
            end,
            spectral: sp,
            omega_end: we,
            nu,
            v_coeffs: v,
            scale,
            x_match,
            value: 0.5 * (u1 + u2),
            slope: 0.5 * (d1 + d2),
            exceptional: true,
            tail: t1.max(t2),
        });
    }
    let (v, scale, tail, u, du) = build(sp.omega)?;
    Ok(RadialSolution {
        end,
        spectral: sp,
        omega_end: we,
        nu,
        v_coeffs: v,
        scale,
        x_match,
        value: u,
        slope: du,
        exceptional: false,
        tail,
    })
}

fn error_norm(y: &[f64; 4], yn: &[f64; 4], e: &[f64; 4]) -> f64 {
    let u = y[0].hypot(y[1]).max(yn[0].hypot(yn[1]));
    let du = y[2].hypot(y[3]).max(yn[2].hypot(yn[3]));
    let floor = 1e-3 * ODE_RTOL * (u + du) + f64::MIN_POSITIVE;
    let eu = e[0].hypot(e[1]) / (ODE_RTOL * u + floor);
    let ed = e[2].hypot(e[3]) / (ODE_RTOL * du + floor);
    eu.max(ed)
}

/// Integrate `u'' = V_x u` from `x_a` through the monotone list `targets`,
/// returning `(u, u')` at each target.
pub fn integrate_radial_to(
    map: &TortoiseMap,
    sp: Spectral,
    x_a: f64,
    u0: Complex64,
    du0: Complex64,
    targets: &[f64],
    stats: &mut OdeStats,
) -> Result<Vec<(Complex64, Complex64)>> {
    let rhs = |x: f64, y: &[f64; 4]| {
        let r = map.r_of_x(x);
        let v = map.potential_at_r(r, sp.omega, sp.lambda, sp.k);
        let u = Complex64::new(y[0], y[1]);
        let f = v * u;
        [y[2], y[3], f.re, f.im]
    };
    let mut dp = DormandPrince::new(rhs, error_norm);
    dp.h_init = 1e-3;
    dp.h_min = 1e-13;
    let mut out = vec![[0.0; 4]; targets.len()];
    dp.integrate_to(x_a, [u0.re, u0.im, du0.re, du0.im], targets, &mut out, stats)
        .map_err(|e| Error::ToleranceNotMet { x: e.x })?;
    Ok(out.iter().map(|y| (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))).collect())
}

/// Integrate `u'' = V_x u` from `x_a` to `x_b`.
pub fn integrate_radial(
    map: &TortoiseMap,
    sp: Spectral,
    x_a: f64,
    x_b: f64,
    u0: Complex64,
    du0: Complex64,
) -> Result<(Complex64, Complex64)> {
    let mut stats = OdeStats::default();
    Ok(integrate_radial_to(map, sp, x_a, u0, du0, &[x_b], &mut stats)?[0])
}

/// The Wronskian `W = u_+ ∂_x u_− − u_− ∂_x u_+` evaluated at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WronskianValue {
    pub spectral: Spectral,
    pub w: Complex64,
    /// Values `(u_+, u_+', u_-, u_-')` at `x = 0`.
    pub at_mid: [Complex64; 4],
    /// Largest variation of `W` over five interior abscissae, relative to
    /// the cancellation scale of the products forming it.
    pub constancy_defect: f64,
    pub stats: OdeStats,
    pub exceptional: bool,
}

impl WronskianValue {
    /// `|u_+| |u_-|` at the midpoint, the natural size of `W`.
    pub fn normalization(&self) -> f64 {
        self.at_mid[0].norm() * self.at_mid[2].norm()
    }

    /// Scale against which the cancellation in `W` is judged.
    pub fn scale(&self, map: &TortoiseMap) -> f64 {
        let [up, dup, um, dum] = self.at_mid;
        cancellation_scale(map, &self.spectral, up, dup, um, dum)
    }
}

fn cancellation_scale(
    map: &TortoiseMap,
    sp: &Spectral,
    up: Complex64,
    dup: Complex64,
    um: Complex64,
    dum: Complex64,
) -> f64 {
    let p = &map.params;
    let kappa = 0.5
        * (p.omega_end(End::Plus, sp.omega, sp.k).norm()
            + p.omega_end(End::Minus, sp.omega, sp.k).norm()
            + p.a_plus
            + p.a_minus);
    (up * dum).norm() + (um * dup).norm() + kappa * up.norm() * um.norm()
}

/// Number of initial series terms requested by the Wronskian evaluation.
pub const WRONSKIAN_SERIES_TERMS: usize = 48;

/// Evaluate the Wronskian of the two outgoing solutions.
pub fn wronskian(map: &TortoiseMap, sp: Spectral) -> Result<WronskianValue> {
    let plus = outgoing_series(map, End::Plus, sp, WRONSKIAN_SERIES_TERMS)?;
    let minus = outgoing_series(map, End::Minus, sp, WRONSKIAN_SERIES_TERMS)?;
    let (xl, xr) = (minus.x_match, plus.x_match);
    let interior: Vec<f64> = (0..5).map(|i| 0.5 * xl + (0.5 * xr - 0.5 * xl) * i as f64 / 4.0).collect();
    // u_+ runs right to left, u_- left to right; x = 0 is included as a target
    let mut right_targets: Vec<f64> = interior.iter().copied().chain([0.0]).collect();
    right_targets.sort_by(|a, b| b.total_cmp(a));
    right_targets.dedup();
    let mut left_targets = right_targets.clone();
    left_targets.reverse();
    let mut stats = OdeStats::default();
    let up = integrate_radial_to(map, sp, xr, plus.value, plus.slope, &right_targets, &mut stats)?;
    let um = integrate_radial_to(map, sp, xl, minus.value, minus.slope, &left_targets, &mut stats)?;
    let at = |x: f64| {
        let i = right_targets.iter().position(|&t| t == x).expect("target present");
        let j = left_targets.iter().position(|&t| t == x).expect("target present");
        (up[i], um[j])
    };
    let ((u_p, du_p), (u_m, du_m)) = at(0.0);
    let w = u_p * du_m - u_m * du_p;
    let scale = cancellation_scale(map, &sp, u_p, du_p, u_m, du_m);
    let mut defect: f64 = 0.0;
    for &x in &interior {
        let ((a, da), (b, db)) = at(x);
        let wx = a * db - b * da;
        let sx = cancellation_scale(map, &sp, a, da, b, db);
        defect = defect.max((wx - w).norm() / scale.max(sx).max(f64::MIN_POSITIVE));
    }
    Ok(WronskianValue {
        spectral: sp,
        w,
        at_mid: [u_p, du_p, u_m, du_m],
        constancy_defect: defect,
        stats,
        exceptional: plus.exceptional || minus.exceptional,
    })
}

/// Relative size of `|W|` below which the radial Green operator is refused.
pub const NEAR_RESONANCE_RATIO: f64 = 1e-10;

/// Both outgoing solutions sampled on an increasing grid, with their
/// Wronskian.
#[derive(Debug, Clone, PartialEq)]
pub struct OutgoingPair {
    pub x: Vec<f64>,
    pub plus: Vec<(Complex64, Complex64)>,
    pub minus: Vec<(Complex64, Complex64)>,
    pub w: Complex64,
    pub scale: f64,
}

/// Sample `u_±` and their derivatives on the increasing grid `x_grid`.
pub fn outgoing_pair(map: &TortoiseMap, sp: Spectral, x_grid: &[f64]) -> Result<OutgoingPair> {
    if x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("x grid must be strictly increasing".into()));
    }
    let plus = outgoing_series(map, End::Plus, sp, WRONSKIAN_SERIES_TERMS)?;
    let minus = outgoing_series(map, End::Minus, sp, WRONSKIAN_SERIES_TERMS)?;
    let (xl, xr) = (minus.x_match, plus.x_match);
    let mut stats = OdeStats::default();

    let sample = |sol: &RadialSolution, from: f64, inside: &[f64], stats: &mut OdeStats| {
        integrate_radial_to(map, sp, from, sol.value, sol.slope, inside, stats)
    };
    let eval_outside = |sol: &RadialSolution, x: f64| -> Result<(Complex64, Complex64)> {
        if sol.exceptional {
            // averaged solution: integrate outward from the matching point
            integrate_radial(map, sp, sol.x_match, x, sol.value, sol.slope)
        } else {
            Ok(sol.eval_series(map, Complex64::new(x, 0.0)))
        }
    };

    let n = x_grid.len();
    let mut up = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); n];
    let mut um = up.clone();
    // u_+: series for x ≥ x_+match, integration leftwards otherwise
    let inside_r: Vec<usize> = (0..n).rev().filter(|&i| x_grid[i] < xr).collect();
    let targets: Vec<f64> = inside_r.iter().map(|&i| x_grid[i]).collect();
    for (&i, val) in inside_r.iter().zip(sample(&plus, xr, &targets, &mut stats)?) {
        up[i] = val;
    }
    for i in (0..n).filter(|&i| x_grid[i] >= xr) {
        up[i] = eval_outside(&plus, x_grid[i])?;
    }
    let inside_l: Vec<usize> = (0..n).filter(|&i| x_grid[i] > xl).collect();
    let targets: Vec<f64> = inside_l.iter().map(|&i| x_grid[i]).collect();
    for (&i, val) in inside_l.iter().zip(sample(&minus, xl, &targets, &mut stats)?) {
        um[i] = val;
    }
    for i in (0..n).filter(|&i| x_grid[i] <= xl) {
        um[i] = eval_outside(&minus, x_grid[i])?;
    }
    // Wronskian from the sample nearest x = 0
    let i0 = (0..n).min_by(|&a, &b| x_grid[a].abs().total_cmp(&x_grid[b].abs())).unwrap_or(0);
    let (a, da) = up[i0];
    let (b, db) = um[i0];
    let w = a * db - b * da;
    let scale = cancellation_scale(map, &sp, a, da, b, db);
    Ok(OutgoingPair { x: x_grid.to_vec(), plus: up, minus: um, w, scale })
}

/// Cumulative integrals `∫_{x_0}^{x_i} g` on a (possibly non-uniform) grid,
/// using cubic Lagrange interpolation over four neighbouring samples.
pub fn cumulative_integral(x: &[f64], g: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (g[i] + g[i - 1]);
        }
        return out;
    }
    for i in 1..n {
        // stencil of four points containing [x_{i-1}, x_i]
        let s = (i as isize - 2).clamp(0, n as isize - 4) as usize;
        let xs = &x[s..s + 4];
        let gs = &g[s..s + 4];
        let (a, b) = (x[i - 1], x[i]);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            // integral of the j-th Lagrange basis polynomial over [a, b]
            let others: Vec<f64> = (0..4).filter(|&m| m != j).map(|m| xs[m]).collect();
            let denom: f64 = others.iter().map(|&xm| xs[j] - xm).product();
            let prim = |t: f64| {
                let (p, q, r) = (others[0], others[1], others[2]);
                // ∫ (t-p)(t-q)(t-r) dt
                t.powi(4) / 4.0 - (p + q + r) * t.powi(3) / 3.0 + (p * q + p * r + q * r) * t * t / 2.0 - p * q * r * t
            };
            acc += gs[j] * ((prim(b) - prim(a)) / denom);
        }
        out[i] = out[i - 1] + acc;
    }
    out
}

/// Apply the radial Green operator: the solution of `−u'' + V_x u = f` that
/// is outgoing at both ends, for `f` sampled on `x_grid` and vanishing near
/// the grid ends.
pub fn radial_green(map: &TortoiseMap, sp: Spectral, f: &[Complex64], x_grid: &[f64]) -> Result<Vec<Complex64>> {
    if f.len() != x_grid.len() {
        return Err(Error::InvalidParameter("source and grid lengths differ".into()));
    }
    if f.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(vec![Complex64::new(0.0, 0.0); f.len()]);
    }
    let pair = outgoing_pair(map, sp, x_grid)?;
    apply_green_kernel(&pair, f)
}

/// The kernel application given precomputed outgoing solutions.
pub fn apply_green_kernel(pair: &OutgoingPair, f: &[Complex64]) -> Result<Vec<Complex64>> {
    let ratio = pair.w.norm() / pair.scale;
    if !(ratio > NEAR_RESONANCE_RATIO) {
        return Err(Error::NearResonance { ratio });
    }
    let n = f.len();
    let gm: Vec<Complex64> = (0..n).map(|i| pair.minus[i].0 * f[i]).collect();
    let gp: Vec<Complex64> = (0..n).map(|i| pair.plus[i].0 * f[i]).collect();
    let left = cumulative_integral(&pair.x, &gm);
    let right_cum = cumulative_integral(&pair.x, &gp);
    let total_right = right_cum[n - 1];
    Ok((0..n).map(|i| (pair.plus[i].0 * left[i] + pair.minus[i].0 * (total_right - right_cum[i])) / pair.w).collect())
}

/// Outcome of the real-frequency check that `ω_+ω_- > 0` excludes a zero of
/// the Wronskian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealAxisReport {
    pub product: f64,
    /// `|W| / scale`, `None` when the check was skipped (`ω_+ω_- = 0`).
    pub margin: Option<f64>,
}

/// For real `ω` and `λ`, report `ω_+ω_-` and, when positive, the size of the
/// Wronskian relative to its natural scale.
pub fn real_axis_nonresonance_check(map: &TortoiseMap, omega: f64, k: i32, lambda: f64) -> Result<RealAxisReport> {
    let p = &map.params;
    let w = Complex64::new(omega, 0.0);
    let product = (p.omega_end(End::Plus, w, k) * p.omega_end(End::Minus, w, k)).re;
    if product == 0.0 {
        return Ok(RealAxisReport { product, margin: None });
    }
    if product < 0.0 {
        return Ok(RealAxisReport { product, margin: None });
    }
    let wv = wronskian(map, Spectral::new(w, Complex64::new(lambda, 0.0), k))?;
    Ok(RealAxisReport { product, margin: Some(wv.w.norm() / wv.scale(map)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::DEFAULT_SERIES_TERMS;
    use crate::metric::BlackHoleParams;

    fn map(a: f64) -> TortoiseMap {
        let p = BlackHoleParams::new(0.1, 3.0, a, 0.0).unwrap();
        TortoiseMap::build(&p, None, DEFAULT_SERIES_TERMS).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_parameters_give_constant_solutions() {
        let m = map(0.01);
        let sp = Spectral::new(c(0.0, 0.0), c(0.0, 0.0), 0);
        for end in [End::Plus, End::Minus] {
            let s = outgoing_series(&m, end, sp, 16).unwrap();
            assert!((s.value - 1.0).norm() < 1e-15 && s.slope.norm() < 1e-15);
        }
        let w = wronskian(&m, sp).unwrap();
        assert!(w.w.norm() < 1e-14);
        let (u, du) = integrate_radial(&m, sp, -1.0, 2.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((u - 1.0).norm() < 1e-14 && du.norm() < 1e-14);
    }

    #[test]
    fn normalization_and_recursion() {
        let m = map(0.01);
        let sp = Spectral::new(c(1.7, -0.3), c(2.1, 0.05), 1);
        for end in [End::Plus, End::Minus] {
            let s = outgoing_series(&m, end, sp, 32).unwrap();
            assert!(!s.exceptional);
            assert!((s.v_coeffs[0] - rgamma(1.0 - s.nu)).norm() < 1e-15);
            let ps = m.potential_series(end, sp.omega, sp.lambda, sp.k, s.v_coeffs.len()).unwrap();
            let a = m.params.surface_gravity(end);
            for j in 1..s.v_coeffs.len() {
                let jf = j as f64;
                let lhs = jf * a * (2.0 * Complex64::i() * s.omega_end - jf * a) * s.v_coeffs[j];
                let sum: Complex64 = (1..=j).map(|l| ps.coeffs[l] * s.v_coeffs[j - l]).sum();
                assert!((lhs + sum).norm() <= 1e-13 * (lhs.norm() + sum.norm()).max(1e-300));
            }
            assert!(s.tail < TAIL_TOLERANCE);
        }
    }

    #[test]
    fn abel_identity_for_fundamental_pair() {
        let m = map(0.01);
        let sp = Spectral::new(c(2.3, -0.6), c(6.0, 0.0), 2);
        let (u1, d1) = integrate_radial(&m, sp, -1.0, 1.5, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let (u2, d2) = integrate_radial(&m, sp, -1.0, 1.5, c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((u1 * d2 - u2 * d1 - 1.0).norm() < 1e-10);
    }

    #[test]
    fn integration_agrees_with_series() {
        let m = map(0.0);
        let sp = Spectral::new(c(2.4, -0.7), c(2.0, 0.0), 0);
        let s = outgoing_series(&m, End::Plus, sp, 48).unwrap();
        // start deeper in the disc and integrate back to the matching point
        let x_deep = s.x_match + 2.0;
        let (u0, du0) = s.eval_series(&m, c(x_deep, 0.0));
        let (u, du) = integrate_radial(&m, sp, x_deep, s.x_match, u0, du0).unwrap();
        assert!((u - s.value).norm() < 1e-8 * s.value.norm());
        assert!((du - s.slope).norm() < 1e-8 * s.slope.norm());
    }

    #[test]
    fn wronskian_is_constant() {
        let m = map(0.01);
        for (w, l, k) in [(c(2.4, -0.7), 2.0, 0), (c(-1.0, -0.2), 6.0, 1), (c(0.5, 0.3), 12.0, -2)] {
            let wv = wronskian(&m, Spectral::new(w, c(l, 0.0), k)).unwrap();
            assert!(wv.constancy_defect < 1e-6, "{w}: {}", wv.constancy_defect);
        }
    }

    #[test]
    fn green_kernel_solves_equation() {
        let m = map(0.0);
        let sp = Spectral::new(c(1.1, -0.4), c(2.0, 0.0), 0);
        let n = 2001;
        let x: Vec<f64> = (0..n).map(|i| -6.0 + 12.0 * i as f64 / (n - 1) as f64).collect();
        let f: Vec<Complex64> = x.iter().map(|&x| c((-(x - 0.3) * (x - 0.3) * 2.0).exp(), 0.0)).collect();
        let u = radial_green(&m, sp, &f, &x).unwrap();
        let h = x[1] - x[0];
        let mut worst: f64 = 0.0;
        for i in 3..n - 3 {
            let d2 = (2.0 * (u[i + 1] + u[i - 1]) * 135.0 - 27.0 * (u[i + 2] + u[i - 2]) + 2.0 * (u[i + 3] + u[i - 3])
                - 490.0 * u[i])
                / (180.0 * h * h);
            let v = m.potential_at_r(m.r_of_x(x[i]), sp.omega, sp.lambda, sp.k);
            worst = worst.max((-d2 + v * u[i] - f[i]).norm());
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn real_axis_report_for_nonrotating_hole() {
        let m = map(0.0);
        let r = real_axis_nonresonance_check(&m, 1.3, 2, 6.0).unwrap();
        assert!(r.product > 0.0);
        assert!(r.margin.unwrap() > 1e-3);
        let r = real_axis_nonresonance_check(&m, 0.0, 0, 0.0).unwrap();
        assert_eq!(r.margin, None);
    }
}
