//! Time-domain evolution of a single separated mode on a non-rotating hole:
//! `r⁴ ∂_t²u = ∂_x²u − (λ + m²r²)Δ_r u` on a uniform tortoise grid, with
//! outgoing boundary conditions, plus ringdown fitting and the prediction of
//! the late-time constant.

use crate::coords::TortoiseMap;
use crate::error::{Error, Result};
use crate::numerics::poly::roots;
use crate::numerics::quad::integrate;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Initial profile in the tortoise coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Zero,
    /// `amplitude · exp(−(x − center)² / (2 width²))`.
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude · exp(1 − 1/(1 − s²))`, `s = (x − center)/half_width`,
    /// zero for `|s| ≥ 1`.
    Bump {
        center: f64,
        half_width: f64,
        amplitude: f64,
    },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian { center, width, amplitude } => {
                amplitude * (-(x - center).powi(2) / (2.0 * width * width)).exp()
            }
            Profile::Bump { center, half_width, amplitude } => {
                let s = (x - center) / half_width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
        }
    }

    /// Interval outside which the profile is below `10⁻¹⁶` of its peak.
    pub fn extent(&self) -> Option<(f64, f64)> {
        match *self {
            Profile::Zero => None,
            Profile::Gaussian { center, width, .. } => Some((center - 8.6 * width, center + 8.6 * width)),
            Profile::Bump { center, half_width, .. } => Some((center - half_width, center + half_width)),
        }
    }

    pub fn scaled(&self, c: f64) -> Profile {
        match *self {
            Profile::Zero => Profile::Zero,
            Profile::Gaussian { center, width, amplitude } => {
                Profile::Gaussian { center, width, amplitude: c * amplitude }
            }
            Profile::Bump { center, half_width, amplitude } => {
                Profile::Bump { center, half_width, amplitude: c * amplitude }
            }
        }
    }
}

/// Settings of one evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveConfig {
    pub l: usize,
    pub dx: f64,
    pub t_final: f64,
    /// Sampling interval of the output series.
    pub dt_out: f64,
    /// Time step; `None` picks the largest step allowed by the CFL factor.
    pub dt: Option<f64>,
    pub cfl: f64,
    pub probes: Vec<f64>,
    /// Grid ends; `None` places them ten e-folds beyond the series matching
    /// points.
    pub x_range: Option<(f64, f64)>,
}

impl Default for WaveConfig {
    fn default() -> Self {
        WaveConfig { l: 1, dx: 0.05, t_final: 30.0, dt_out: 0.05, dt: None, cfl: 0.8, probes: vec![0.0], x_range: None }
    }
}

/// Evolved state on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// `u` one step earlier.
    pub u_prev: Vec<f64>,
    pub t: f64,
    pub dt: f64,
    pub lambda: f64,
    weight: Vec<f64>,
    potential: Vec<f64>,
    speed: (f64, f64),
}

impl WaveState {
    /// Discrete energy `½Σ[r⁴ (δ_t u)² + (δ_x u)² + (λ+m²r²)Δ_r u²] dx`
    /// between the last two time levels.
    pub fn energy(&self) -> f64 {
        let dx = self.x[1] - self.x[0];
        let n = self.x.len();
        let mut e = 0.0;
        for i in 0..n {
            let ut = (self.u[i] - self.u_prev[i]) / self.dt;
            e += self.weight[i] * ut * ut + self.potential[i] * self.u[i] * self.u_prev[i];
            if i + 1 < n {
                let a = (self.u[i + 1] - self.u[i]) / dx;
                let b = (self.u_prev[i + 1] - self.u_prev[i]) / dx;
                e += a * b;
            }
        }
        0.5 * e * dx
    }

    fn sample(&self, x: f64) -> f64 {
        interpolate(&self.x, &self.u, x)
    }

    #[allow(clippy::needless_range_loop)]
    fn step(&mut self) {
        let n = self.x.len();
        let dx = self.x[1] - self.x[0];
        let (dt2, dx2) = (self.dt * self.dt, dx * dx);
        let mut next = vec![0.0; n];
        for i in 1..n - 1 {
            let lap = (self.u[i + 1] - 2.0 * self.u[i] + self.u[i - 1]) / dx2;
            let acc = (lap - self.potential[i] * self.u[i]) / self.weight[i];
            next[i] = 2.0 * self.u[i] - self.u_prev[i] + dt2 * acc;
        }
        // box scheme for u_t ± c u_x = 0 at the ends
        let q = self.dt / dx;
        let edge = |c: f64, u_end: f64, u_in: f64, next_in: f64| {
            let cq = c * q;
            (u_end * (1.0 - cq) + u_in * (1.0 + cq) - next_in * (1.0 - cq)) / (1.0 + cq)
        };
        next[0] = edge(self.speed.0, self.u[0], self.u[1], next[1]);
        next[n - 1] = edge(self.speed.1, self.u[n - 1], self.u[n - 2], next[n - 2]);
        self.u_prev = std::mem::replace(&mut self.u, next);
        self.t += self.dt;
    }
}

/// Sampled output of an evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub probes: Vec<f64>,
    /// `values[p][n] = u(t_n, probes[p])`.
    pub values: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    pub dt: f64,
    pub dx: f64,
    pub x_range: (f64, f64),
}

/// Grid ends ten e-folds beyond the series matching points.
pub fn default_x_range(map: &TortoiseMap) -> (f64, f64) {
    let (xl, xr) = map.match_points();
    let p = &map.params;
    (xl - 10.0 / p.a_minus, xr + 10.0 / p.a_plus)
}

/// Evolve `u(0) = initial_u`, `∂_t u(0) = initial_v` for mode `l` and return
/// the series at the probes.
pub fn evolve(map: &TortoiseMap, cfg: &WaveConfig, initial_u: &Profile, initial_v: &Profile) -> Result<TimeSeries> {
    let p = &map.params;
    if p.a != 0.0 {
        return Err(Error::NonzeroSpinUnsupported(p.a));
    }
    if !(cfg.dx > 0.0 && cfg.t_final > 0.0 && cfg.dt_out > 0.0) {
        return Err(Error::InvalidParameter("dx, T and dt_out must be positive".into()));
    }
    let (x_lo, x_hi) = cfg.x_range.unwrap_or_else(|| default_x_range(map));
    let n_cells = ((x_hi - x_lo) / cfg.dx).round().max(4.0) as usize;
    let dx = (x_hi - x_lo) / n_cells as f64;
    let x: Vec<f64> = (0..=n_cells).map(|i| x_lo + dx * i as f64).collect();
    for &xp in &cfg.probes {
        if xp < x_lo || xp > x_hi {
            return Err(Error::InvalidParameter(format!("probe x={xp} outside the grid")));
        }
    }
    let r: Vec<f64> = x.iter().map(|&xi| map.r_of_x(xi)).collect();
    let weight: Vec<f64> = r.iter().map(|&ri| ri.powi(4)).collect();
    let lam = (cfg.l * (cfg.l + 1)) as f64;
    let potential: Vec<f64> = r.iter().map(|&ri| (lam + (p.m_field * ri).powi(2)) * p.delta_r(ri).0).collect();
    let r2_min = r.iter().map(|ri| ri * ri).fold(f64::INFINITY, f64::min);
    let bound = cfg.cfl.min(1.0) * dx * r2_min;
    let stride;
    let dt = match cfg.dt {
        Some(dt) => {
            if dt > dx * r2_min * 0.8 {
                return Err(Error::CflViolation { dt, bound: 0.8 * dx * r2_min });
            }
            stride = (cfg.dt_out / dt).round().max(1.0) as usize;
            dt
        }
        None => {
            stride = (cfg.dt_out / bound).ceil().max(1.0) as usize;
            cfg.dt_out / stride as f64
        }
    };
    let u0: Vec<f64> = x.iter().map(|&xi| initial_u.eval(xi)).collect();
    let v0: Vec<f64> = x.iter().map(|&xi| initial_v.eval(xi)).collect();
    // second-order Taylor start for the level t = dt, stored as the current
    // level with u0 as the previous one
    let n = x.len();
    let mut u1 = u0.clone();
    for i in 1..n - 1 {
        let lap = (u0[i + 1] - 2.0 * u0[i] + u0[i - 1]) / (dx * dx);
        u1[i] = u0[i] + dt * v0[i] + 0.5 * dt * dt * (lap - potential[i] * u0[i]) / weight[i];
    }
    u1[0] = u0[0] + dt * v0[0];
    u1[n - 1] = u0[n - 1] + dt * v0[n - 1];
    let mut state = WaveState {
        x,
        u: u1,
        u_prev: u0,
        t: dt,
        dt,
        lambda: lam,
        weight,
        potential,
        speed: (1.0 / (p.r_minus * p.r_minus), 1.0 / (p.r_plus * p.r_plus)),
    };
    let mut out = TimeSeries {
        t: vec![0.0],
        probes: cfg.probes.clone(),
        values: cfg.probes.iter().map(|&xp| vec![sample_profile(initial_u, &state.x, xp)]).collect(),
        energy: vec![state.energy()],
        dt,
        dx,
        x_range: (x_lo, x_hi),
    };
    let n_out = (cfg.t_final / cfg.dt_out).round() as usize;
    let mut step = 1usize;
    for k in 1..=n_out {
        while step < k * stride {
            state.step();
            step += 1;
        }
        out.t.push(k as f64 * cfg.dt_out);
        for (pi, &xp) in cfg.probes.iter().enumerate() {
            out.values[pi].push(state.sample(xp));
        }
        out.energy.push(state.energy());
    }
    Ok(out)
}

fn sample_profile(profile: &Profile, x: &[f64], xp: f64) -> f64 {
    let vals: Vec<f64> = x.iter().map(|&xi| profile.eval(xi)).collect();
    interpolate(x, &vals, xp)
}

/// Cubic Lagrange interpolation on a uniform grid.
fn interpolate(x: &[f64], y: &[f64], xp: f64) -> f64 {
    let n = x.len();
    let dx = x[1] - x[0];
    let s = (xp - x[0]) / dx;
    let i0 = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - i0 as f64;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != j {
                w *= (t - m as f64) / (j as f64 - m as f64);
            }
        }
        acc += w * y[i0 + j];
    }
    acc
}

/// Result of a ringdown fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingdownFit {
    /// Dominant frequency, `u ∼ Re(A e^{−iωt})`, with `Re ω ≥ 0`.
    pub omega: Complex64,
    pub plateau: f64,
    /// `‖u − model‖² / ‖u − plateau‖²` over the window.
    pub residual: f64,
}

/// Prony fit of order 4 to the samples in `t_window`, followed by a
/// variable-projection least-squares polish of the decay rates and
/// frequencies. Linear prediction uses a truncated SVD; the poles seed a
/// model of damped sinusoids, real exponentials and a constant. The
/// dominant mode is the damped sinusoid carrying the most energy in the
/// window.
pub fn ringdown_fit(t: &[f64], y: &[f64], t_window: (f64, f64)) -> Result<RingdownFit> {
    const ORDER: usize = 4;
    let idx: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= t_window.0 && t[i] <= t_window.1).collect();
    if idx.len() < 4 * ORDER {
        return Err(Error::InvalidParameter(format!(
            "window holds {} samples, need at least {}",
            idx.len(),
            4 * ORDER
        )));
    }
    let h = t[idx[1]] - t[idx[0]];
    let ts: Vec<f64> = idx.iter().map(|&i| t[i] - t[idx[0]]).collect();
    let s: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let scale = s.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(RingdownFit { omega: Complex64::new(0.0, 0.0), plateau: 0.0, residual: 0.0 });
    }
    let omegas = prony_poles(&s, ORDER, h)?;
    let mut terms = Vec::new();
    let mut has_constant = false;
    for w in omegas {
        if w.re > 1e-8 && w.re < 0.9 * std::f64::consts::PI / h {
            terms.push(Term::Oscillating { rate: w.im, freq: w.re });
        } else if w.re.abs() <= 1e-8 {
            if w.im.abs() < 0.05 {
                has_constant = true;
            } else {
                terms.push(Term::Exponential { rate: w.im });
            }
        }
    }
    terms.dedup();
    if !terms.iter().any(|t| matches!(t, Term::Oscillating { .. })) && terms.is_empty() {
        has_constant = true;
    }
    // drop growing or negligible terms until the model is clean
    let term_energy = |term: &Term, coef: (f64, f64)| -> f64 {
        ts.iter()
            .map(|&ti| match *term {
                Term::Oscillating { rate, freq } => {
                    (rate * ti).exp() * (coef.0 * (freq * ti).cos() + coef.1 * (freq * ti).sin())
                }
                Term::Exponential { rate } => coef.0 * (rate * ti).exp(),
            })
            .map(|v| v * v * h)
            .sum()
    };
    let total: f64 = s.iter().map(|v| v * v).sum::<f64>() * h;
    let mut fit = polish(&ts, &s, terms, has_constant)?;
    loop {
        let bad = fit
            .terms
            .iter()
            .zip(&fit.coefficients)
            .enumerate()
            .map(|(i, (t, &a))| {
                let growing = matches!(*t, Term::Oscillating { rate, .. } | Term::Exponential { rate } if rate >= 0.0);
                (i, growing, term_energy(t, a))
            })
            .filter(|&(_, growing, e)| growing || e < 1e-6 * total)
            .min_by(|x, y| (!x.1).cmp(&!y.1).then(x.2.total_cmp(&y.2)));
        let Some((i, _, _)) = bad else { break };
        let mut terms = fit.terms.clone();
        terms.remove(i);
        fit = polish(&ts, &s, terms, has_constant)?;
    }
    let energy: f64 = s.iter().map(|a| (a - fit.constant).powi(2)).sum();
    let residual = if energy > 0.0 { fit.sse / energy } else { 0.0 };
    if residual > 0.1 {
        return Err(Error::PoorFit { residual });
    }
    // largest share of the window energy among terms completing at least
    // half an oscillation in the window
    let span = ts[ts.len() - 1];
    let omega = fit
        .terms
        .iter()
        .zip(&fit.coefficients)
        .filter_map(|(t, &c)| match *t {
            Term::Oscillating { rate, freq } if freq * span > std::f64::consts::PI => {
                Some((Complex64::new(freq, rate), term_energy(t, c)))
            }
            _ => None,
        })
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map(|x| x.0)
        .unwrap_or_default();
    Ok(RingdownFit { omega, plateau: fit.constant, residual })
}

/// Poles `ω_j` (with `u ∼ e^{−iω_j t}`) of an order-`p` linear predictor.
fn prony_poles(s: &[f64], p: usize, h: f64) -> Result<Vec<Complex64>> {
    let scale = s.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let rows = s.len() - p;
    // s_n = Σ_k a_k s_{n−k}
    let a = DMatrix::from_fn(rows, p, |i, k| s[i + p - 1 - k] / scale);
    let b = DVector::from_fn(rows, |i, _| s[i + p] / scale);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let coef =
        svd.solve(&b, 1e-10 * smax).map_err(|e| Error::InvalidParameter(format!("linear prediction failed: {e}")))?;
    // z^p − a_1 z^{p−1} − … − a_p, ascending order
    let mut poly = vec![0.0; p + 1];
    poly[p] = 1.0;
    for k in 0..p {
        poly[p - 1 - k] = -coef[k];
    }
    Ok(roots(&poly).into_iter().filter(|z| z.norm() > 0.0).map(|z| Complex64::new(0.0, 1.0) * z.ln() / h).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Term {
    /// `e^{rate·t}(a cos(freq·t) + b sin(freq·t))`
    Oscillating { rate: f64, freq: f64 },
    /// `c e^{rate·t}`
    Exponential { rate: f64 },
}

struct PolishedFit {
    terms: Vec<Term>,
    /// `(a, b)` for oscillating terms, `(c, 0)` for exponentials.
    coefficients: Vec<(f64, f64)>,
    constant: f64,
    sse: f64,
}

fn params_of(terms: &[Term]) -> Vec<f64> {
    terms
        .iter()
        .flat_map(|t| match *t {
            Term::Oscillating { rate, freq } => vec![rate, freq],
            Term::Exponential { rate } => vec![rate],
        })
        .collect()
}

fn terms_of(shape: &[Term], theta: &[f64]) -> Vec<Term> {
    let mut k = 0;
    shape
        .iter()
        .map(|t| match t {
            Term::Oscillating { .. } => {
                k += 2;
                Term::Oscillating { rate: theta[k - 2], freq: theta[k - 1] }
            }
            Term::Exponential { .. } => {
                k += 1;
                Term::Exponential { rate: theta[k - 1] }
            }
        })
        .collect()
}

fn design(t: &[f64], terms: &[Term], constant: bool) -> DMatrix<f64> {
    let cols: usize = terms.iter().map(|t| if matches!(t, Term::Oscillating { .. }) { 2 } else { 1 }).sum::<usize>()
        + constant as usize;
    let mut m = DMatrix::zeros(t.len(), cols);
    for (i, &ti) in t.iter().enumerate() {
        let mut c = 0;
        for term in terms {
            match *term {
                Term::Oscillating { rate, freq } => {
                    let e = (rate * ti).exp();
                    m[(i, c)] = e * (freq * ti).cos();
                    m[(i, c + 1)] = e * (freq * ti).sin();
                    c += 2;
                }
                Term::Exponential { rate } => {
                    m[(i, c)] = (rate * ti).exp();
                    c += 1;
                }
            }
        }
        if constant {
            m[(i, c)] = 1.0;
        }
    }
    m
}

/// Linear least squares for the amplitudes; returns coefficients and the
/// residual vector.
fn project(t: &[f64], y: &DVector<f64>, terms: &[Term], constant: bool) -> Option<(DVector<f64>, DVector<f64>)> {
    let m = design(t, terms, constant);
    let svd = m.clone().svd(true, true);
    let tol = 1e-13 * svd.singular_values.max();
    let c = svd.solve(y, tol).ok()?;
    let r = y - &m * &c;
    Some((c, r))
}

/// Levenberg–Marquardt on the nonlinear parameters with the amplitudes
/// eliminated (variable projection).
fn polish(t: &[f64], s: &[f64], shape: Vec<Term>, constant: bool) -> Result<PolishedFit> {
    let y = DVector::from_column_slice(s);
    let fail = || Error::InvalidParameter("degenerate ringdown model".into());
    let mut theta = params_of(&shape);
    let (_, mut r) = project(t, &y, &shape, constant).ok_or_else(fail)?;
    let mut mu = 1e-3;
    for _ in 0..100 {
        if theta.is_empty() {
            break;
        }
        let n = theta.len();
        let mut jac = DMatrix::zeros(t.len(), n);
        for k in 0..n {
            let step = 1e-7 * (1.0 + theta[k].abs());
            let mut tp = theta.clone();
            tp[k] += step;
            let mut tm = theta.clone();
            tm[k] -= step;
            let (_, rp) = project(t, &y, &terms_of(&shape, &tp), constant).ok_or_else(fail)?;
            let (_, rm) = project(t, &y, &terms_of(&shape, &tm), constant).ok_or_else(fail)?;
            jac.set_column(k, &((rp - rm) / (2.0 * step)));
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let base = r.norm_squared();
        let mut improved = false;
        for _ in 0..20 {
            let mut lhs = jtj.clone();
            for k in 0..n {
                lhs[(k, k)] += mu * jtj[(k, k)].max(1e-300);
            }
            let Some(delta) = lhs.lu().solve(&(-&jtr)) else { break };
            let trial: Vec<f64> = theta.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            if let Some((_, rt)) = project(t, &y, &terms_of(&shape, &trial), constant) {
                if rt.norm_squared() < base {
                    let gain = base - rt.norm_squared();
                    theta = trial;
                    r = rt;
                    mu = (mu * 0.3).max(1e-12);
                    improved = gain > 1e-15 * base;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let terms = terms_of(&shape, &theta);
    let (c, r) = project(t, &y, &terms, constant).ok_or_else(fail)?;
    let mut coefficients = Vec::with_capacity(terms.len());
    let mut k = 0;
    for term in &terms {
        match term {
            Term::Oscillating { .. } => {
                coefficients.push((c[k], c[k + 1]));
                k += 2;
            }
            Term::Exponential { .. } => {
                coefficients.push((c[k], 0.0));
                k += 1;
            }
        }
    }
    let constant_value = if constant { c[k] } else { 0.0 };
    Ok(PolishedFit { terms, coefficients, constant: constant_value, sse: r.norm_squared() })
}

/// Late-time constant of mode `l` for data on a non-rotating hole:
/// `u₀ = (1+α)/(4π(r_+² + r_-² + 2a²)) ∫ *(du)` over the initial slice.
/// With spherical symmetry the slice integral is `4π ∫ r⁴ ∂_t u dx`, so only
/// the initial velocity enters; modes with `l ≥ 1` have no constant part.
pub fn plateau_prediction(map: &TortoiseMap, l: usize, initial_u: &Profile, initial_v: &Profile) -> Result<f64> {
    let p = &map.params;
    if p.a != 0.0 {
        return Err(Error::NonzeroSpinUnsupported(p.a));
    }
    let _ = initial_u;
    if l > 0 {
        return Ok(0.0);
    }
    let Some((lo, hi)) = initial_v.extent() else { return Ok(0.0) };
    let (val, _) = integrate(|x| map.r_of_x(x).powi(4) * initial_v.eval(x), lo, hi, 1e-14, 1e-12);
    let four_pi = 4.0 * std::f64::consts::PI;
    let radii = p.r_plus.powi(2) + p.r_minus.powi(2) + 2.0 * p.a * p.a;
    Ok(p.one_plus_alpha() / (four_pi * radii) * four_pi * val)
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

    fn gauss(center: f64, width: f64, amplitude: f64) -> Profile {
        Profile::Gaussian { center, width, amplitude }
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = WaveConfig { t_final: 2.0, ..Default::default() };
        let s = evolve(&map(0.0), &cfg, &Profile::Zero, &Profile::Zero).unwrap();
        assert!(s.values[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn guards() {
        let cfg = WaveConfig { dt: Some(1.0), ..Default::default() };
        assert!(matches!(evolve(&map(0.0), &cfg, &Profile::Zero, &Profile::Zero), Err(Error::CflViolation { .. })));
        assert_eq!(
            evolve(&map(0.01), &WaveConfig::default(), &Profile::Zero, &Profile::Zero),
            Err(Error::NonzeroSpinUnsupported(0.01))
        );
    }

    #[test]
    fn manufactured_ringdown() {
        let t: Vec<f64> = (0..400).map(|i| 0.05 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|&t| (-0.1 * t).exp() * (3.0 * t).cos() + 0.5).collect();
        let fit = ringdown_fit(&t, &y, (0.0, 20.0)).unwrap();
        assert!((fit.omega - Complex64::new(3.0, -0.1)).norm() < 1e-6, "{}", fit.omega);
        assert!((fit.plateau - 0.5).abs() < 1e-6);
    }

    #[test]
    fn noise_is_a_poor_fit() {
        let t: Vec<f64> = (0..200).map(|i| 0.05 * i as f64).collect();
        let y: Vec<f64> = (0..200u64).map(|i| ((i * 2654435761) % 1000) as f64 / 1000.0 - 0.5).collect();
        assert!(matches!(ringdown_fit(&t, &y, (0.0, 10.0)), Err(Error::PoorFit { .. })));
    }

    #[test]
    fn plateau_matches_prediction() {
        let m = map(0.0);
        let cfg = WaveConfig { l: 0, t_final: 30.0, ..Default::default() };
        let (u0, v0) = (gauss(0.0, 0.5, 1.0), gauss(0.3, 0.7, 1.0));
        let s = evolve(&m, &cfg, &u0, &v0).unwrap();
        let pred = plateau_prediction(&m, 0, &u0, &v0).unwrap();
        let last = *s.values[0].last().unwrap();
        assert!((last - pred).abs() < 1e-2 * pred.abs(), "{last} vs {pred}");
        let doubled = plateau_prediction(&m, 0, &u0.scaled(2.0), &v0.scaled(2.0)).unwrap();
        assert!((doubled - 2.0 * pred).abs() < 1e-12 * pred.abs());
        assert_eq!(plateau_prediction(&m, 1, &u0, &v0).unwrap(), 0.0);
    }

    #[test]
    fn energy_does_not_grow() {
        let m = map(0.0);
        let cfg = WaveConfig { l: 2, t_final: 15.0, ..Default::default() };
        let s = evolve(&m, &cfg, &gauss(0.0, 0.5, 1.0), &Profile::Zero).unwrap();
        for w in s.energy[1..].windows(2) {
            assert!(w[1] <= w[0] + 1e-6 * s.energy[1], "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn outer_boundary_is_transparent() {
        let m = map(0.0);
        let (lo, hi) = default_x_range(&m);
        let base = WaveConfig { l: 1, t_final: 10.0, x_range: Some((lo, hi)), ..Default::default() };
        let wide = WaveConfig { x_range: Some((lo, hi + 0.2 * (hi - 0.0))), ..base.clone() };
        let a = evolve(&m, &base, &gauss(0.0, 0.5, 1.0), &Profile::Zero).unwrap();
        let b = evolve(&m, &wide, &gauss(0.0, 0.5, 1.0), &Profile::Zero).unwrap();
        let diff: f64 = a.values[0].iter().zip(&b.values[0]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = a.values[0].iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(diff < 1e-4 * norm, "{}", diff / norm);
    }
}
