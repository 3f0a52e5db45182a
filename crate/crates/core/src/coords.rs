//! Tortoise coordinate `x(r) = ∫_{r0}^r ds/Δ_r(s)`, its inverse, and the
//! holomorphic boundary expansions in `w = e^{∓A_± x}`.
//!
//! The integral is evaluated in closed form from the partial-fraction
//! decomposition `1/Δ_r = Σ_j c_j/(r − r_j)`, `c_j = 1/Δ_r'(r_j)`. Near each
//! horizon `w = y·e^{G(r)}` with `y` the distance to the horizon; the inverse
//! series `y(w)` follows from the ODE `w dy/dw = y q(y)` with
//! `q(y) = Δ_r/(A y)` a cubic polynomial.
//!
//! Boundary coefficients are stored rescaled: `ĉ_n = c_n s^n` where `s` is
//! the modulus of the image of `r = ∞`, the nearest singularity, so that the
//! series is evaluated in `ζ = w/s` and stays O(1) for large `n`.

use crate::error::{Error, Result};
use crate::metric::{BlackHoleParams, End};
use crate::series;
use num_complex::Complex64;

/// Number of coefficients used internally for the radius estimate.
const RADIUS_TERMS: usize = 96;
/// Default number of boundary-series terms.
pub const DEFAULT_SERIES_TERMS: usize = 64;
const TABLE_POINTS: usize = 1024;

/// Boundary expansion of the geometry at one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySeries {
    pub end: End,
    /// Coefficient scale `s`: stored coefficients are `c_n s^n`.
    pub scale: f64,
    /// Estimated convergence radius in `w`.
    pub rho: f64,
    /// Matching abscissa: `|w(x_match)| = ρ/2`, signed (`> 0` at the `+` end).
    pub x_match: f64,
    /// Distance to the horizon, `y(w) = ±(r_± − r)`, with `y_1 = e^{−G(r_±)}`.
    pub y: Vec<f64>,
    pub r: Vec<f64>,
    pub delta: Vec<f64>,
    pub r2a2: Vec<f64>,
    pub r2a2_sq: Vec<f64>,
    pub r2_delta: Vec<f64>,
}

impl BoundarySeries {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// `w = e^{∓A_± x}` for this end.
    pub fn w_of_x(&self, params: &BlackHoleParams, x: Complex64) -> Complex64 {
        (-self.end.sign() * params.surface_gravity(self.end) * x).exp()
    }
}

/// The tortoise change of variables with its boundary expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct TortoiseMap {
    pub params: BlackHoleParams,
    pub r0: f64,
    x_off: f64,
    residues: [Complex64; 4],
    /// Samples `(r_i, x_i)`, increasing in both coordinates.
    pub table: Vec<(f64, f64)>,
    pub plus: BoundarySeries,
    pub minus: BoundarySeries,
}

/// Geometry-dependent parts of the potential that multiply each spectral
/// parameter: `Δ_r`, `r²Δ_r`, `(r²+a²)²`, `r²+a²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryPoint {
    pub r: f64,
    pub delta: f64,
}

impl TortoiseMap {
    /// Build the map anchored at `r0` (midpoint of the horizons when `None`).
    pub fn build(params: &BlackHoleParams, r0: Option<f64>, n_series: usize) -> Result<Self> {
        let (rm, rp) = (params.r_minus, params.r_plus);
        let r0 = r0.unwrap_or(0.5 * (rm + rp));
        if !(r0 > rm && r0 < rp) {
            return Err(Error::InvalidParameter(format!("anchor r0={r0} must lie in ({rm}, {rp})")));
        }
        if n_series < 8 {
            return Err(Error::InvalidParameter(format!("N_series must be at least 8, got {n_series}")));
        }
        let mut residues = [Complex64::new(0.0, 0.0); 4];
        for (c, &rj) in residues.iter_mut().zip(params.roots.iter()) {
            *c = 1.0 / delta_prime_complex(params, rj);
        }
        let mut map = TortoiseMap {
            params: params.clone(),
            r0,
            x_off: 0.0,
            residues,
            table: Vec::new(),
            plus: empty_series(End::Plus),
            minus: empty_series(End::Minus),
        };
        map.x_off = map.raw_x(r0);
        map.table = (1..TABLE_POINTS)
            .map(|i| {
                let t = i as f64 / TABLE_POINTS as f64;
                let r = rm + (rp - rm) * 0.5 * (1.0 - (std::f64::consts::PI * t).cos());
                (r, map.x_of_r(r))
            })
            .collect();
        map.plus = map.boundary_series(End::Plus, n_series)?;
        map.minus = map.boundary_series(End::Minus, n_series)?;
        Ok(map)
    }

    fn raw_x(&self, r: f64) -> f64 {
        self.params
            .roots
            .iter()
            .zip(self.residues.iter())
            .map(|(&rj, &c)| (c * (Complex64::new(r, 0.0) - rj).ln()).re)
            .sum()
    }

    /// Sum of the partial-fraction logarithms excluding the horizon at `end`.
    fn regular_part(&self, end: End, r: f64) -> f64 {
        let rs = self.params.horizon(end);
        self.params
            .roots
            .iter()
            .zip(self.residues.iter())
            .filter(|(rj, _)| **rj != Complex64::new(rs, 0.0))
            .map(|(&rj, &c)| (c * (Complex64::new(r, 0.0) - rj).ln()).re)
            .sum::<f64>()
            - self.x_off
    }

    /// `x(r)` for `r` in `(r_-, r_+)`.
    pub fn x_of_r(&self, r: f64) -> f64 {
        self.raw_x(r) - self.x_off
    }

    pub fn series(&self, end: End) -> &BoundarySeries {
        match end {
            End::Plus => &self.plus,
            End::Minus => &self.minus,
        }
    }

    /// Matching abscissae `(x_-match, x_+match)`.
    pub fn match_points(&self) -> (f64, f64) {
        (self.minus.x_match, self.plus.x_match)
    }

    /// Boundary coefficients for `end`, recomputed when more than the stored
    /// number of terms is requested.
    pub fn series_with_len(&self, end: End, n: usize) -> Result<std::borrow::Cow<'_, BoundarySeries>> {
        let stored = self.series(end);
        if n <= stored.len() {
            Ok(std::borrow::Cow::Borrowed(stored))
        } else {
            Ok(std::borrow::Cow::Owned(self.boundary_series(end, n)?))
        }
    }

    fn boundary_series(&self, end: End, n: usize) -> Result<BoundarySeries> {
        let p = &self.params;
        let sigma = end.sign();
        let rs = p.horizon(end);
        let big_a = p.surface_gravity(end);
        let h = self.regular_part(end, rs);
        let g0 = -sigma * big_a * h;
        // image of r = ∞: |w| = e^{σ A x_off}
        let scale = (sigma * big_a * self.x_off).exp();

        let y_long = distance_coefficients(p, end, (-g0).exp() * scale, n.max(RADIUS_TERMS));
        let rho_hat = radius_estimate(&y_long)
            .ok_or_else(|| Error::SeriesDivergence { end: end.symbol(), estimates: tail_estimates(&y_long) })?;
        let rho = rho_hat * scale;
        let x_match = sigma * (2.0 / rho).ln().max(1.0) / big_a;

        let mut y = y_long;
        y.truncate(n);
        let mut r = y.iter().map(|&c| -sigma * c).collect::<Vec<_>>();
        r[0] = rs;
        // Δ_r = A (y + q1 y² + q2 y³ + q3 y⁴)
        let (q1, q2, q3) = q_coefficients(p, end);
        let y2 = series::mul(&y, &y, n);
        let y3 = series::mul(&y2, &y, n);
        let y4 = series::mul(&y3, &y, n);
        let delta: Vec<f64> = (0..n).map(|j| big_a * (y[j] + q1 * y2[j] + q2 * y3[j] + q3 * y4[j])).collect();
        let r2 = series::mul(&r, &r, n);
        let mut r2a2 = r2.clone();
        r2a2[0] += p.a * p.a;
        let r2a2_sq = series::mul(&r2a2, &r2a2, n);
        let r2_delta = series::mul(&r2, &delta, n);
        Ok(BoundarySeries { end, scale, rho, x_match, y, r, delta, r2a2, r2a2_sq, r2_delta })
    }

    /// Inverse map `r(x)` for real `x`.
    pub fn r_of_x(&self, x: f64) -> f64 {
        if x > self.plus.x_match {
            return self.series_r(&self.plus, Complex64::new(x, 0.0)).re;
        }
        if x < self.minus.x_match {
            return self.series_r(&self.minus, Complex64::new(x, 0.0)).re;
        }
        self.newton_r(x)
    }

    /// Inverse map at complex `x`, available only in the half-planes covered
    /// by the boundary series (or on the real axis).
    pub fn r_of_x_complex(&self, x: Complex64) -> Result<Complex64> {
        if x.re > self.plus.x_match {
            Ok(self.series_r(&self.plus, x))
        } else if x.re < self.minus.x_match {
            Ok(self.series_r(&self.minus, x))
        } else if x.im == 0.0 {
            Ok(Complex64::new(self.newton_r(x.re), 0.0))
        } else {
            let bound = if x.re >= 0.0 { self.plus.x_match } else { self.minus.x_match };
            Err(Error::OutsideDomain { x: x.re, x0: bound.abs() })
        }
    }

    fn series_r(&self, s: &BoundarySeries, x: Complex64) -> Complex64 {
        let zeta = s.w_of_x(&self.params, x) / s.scale;
        series::eval_real(&s.r, zeta)
    }

    /// Distance to the horizon at `end` evaluated from the boundary series,
    /// accurate in relative terms where `r` itself would lose digits.
    pub fn series_distance(&self, end: End, x: f64) -> f64 {
        let s = self.series(end);
        let zeta = s.w_of_x(&self.params, Complex64::new(x, 0.0)) / s.scale;
        series::eval_real(&s.y, zeta).re
    }

    fn newton_r(&self, x: f64) -> f64 {
        let p = &self.params;
        let t = &self.table;
        let idx = t.partition_point(|&(_, xi)| xi < x);
        let (mut lo, mut hi) = match idx {
            0 => (p.r_minus, t[0].0),
            i if i == t.len() => (t[t.len() - 1].0, p.r_plus),
            i => (t[i - 1].0, t[i].0),
        };
        let mut r = match idx {
            i if i == 0 || i == t.len() => 0.5 * (lo + hi),
            i => {
                let (r1, x1) = t[i - 1];
                let (r2, x2) = t[i];
                r1 + (r2 - r1) * (x - x1) / (x2 - x1)
            }
        };
        for _ in 0..60 {
            let f = self.x_of_r(r) - x;
            if f > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let step = f * p.delta_r(r).0;
            let mut next = r - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - r).abs() <= 2.0 * f64::EPSILON * r {
                return next;
            }
            r = next;
        }
        r
    }

    /// The potential `V_x = (λ + m²r²)Δ_r − (1+α)²((r²+a²)ω − ak)²` at a
    /// real radius.
    pub fn potential_at_r(&self, r: f64, omega: Complex64, lambda: Complex64, k: i32) -> Complex64 {
        let p = &self.params;
        let d = p.delta_r(r).0;
        let m2 = p.m_field * p.m_field;
        let q = p.one_plus_alpha() * ((r * r + p.a * p.a) * omega - p.a * k as f64);
        (lambda + m2 * r * r) * d - q * q
    }

    /// Taylor coefficients (rescaled by the end's `s^j`) of `V_x` in `w`.
    pub fn potential_series(
        &self,
        end: End,
        omega: Complex64,
        lambda: Complex64,
        k: i32,
        n: usize,
    ) -> Result<PotentialSeries> {
        let s = self.series_with_len(end, n)?;
        let p = &self.params;
        let opa2 = p.one_plus_alpha().powi(2);
        let m2 = p.m_field * p.m_field;
        let ak = p.a * k as f64;
        let coeffs = (0..n)
            .map(|j| {
                let mut v = lambda * s.delta[j] + m2 * s.r2_delta[j]
                    - opa2 * (s.r2a2_sq[j] * omega * omega - 2.0 * ak * s.r2a2[j] * omega);
                if j == 0 {
                    v -= opa2 * ak * ak;
                }
                v
            })
            .collect();
        Ok(PotentialSeries {
            end,
            omega,
            lambda,
            k,
            m_field: p.m_field,
            scale: s.scale,
            coeffs,
            omega_end: p.omega_end(end, omega, k),
        })
    }
}

/// Rescaled Taylor coefficients of the potential at one end.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSeries {
    pub end: End,
    pub omega: Complex64,
    pub lambda: Complex64,
    pub k: i32,
    pub m_field: f64,
    pub scale: f64,
    /// `V_j s^j`.
    pub coeffs: Vec<Complex64>,
    pub omega_end: Complex64,
}

fn empty_series(end: End) -> BoundarySeries {
    BoundarySeries {
        end,
        scale: 1.0,
        rho: 0.0,
        x_match: 0.0,
        y: Vec::new(),
        r: Vec::new(),
        delta: Vec::new(),
        r2a2: Vec::new(),
        r2a2_sq: Vec::new(),
        r2_delta: Vec::new(),
    }
}

fn delta_prime_complex(p: &BlackHoleParams, r: Complex64) -> Complex64 {
    let a2 = p.a * p.a;
    let r2 = r * r;
    2.0 * r * (1.0 - p.lambda * r2 / 3.0) - (r2 + a2) * (2.0 * p.lambda / 3.0) * r - 2.0 * p.m0
}

/// Coefficients of `q(y) = Δ_r(r_± ∓ y)/(A_± y) = 1 + q1 y + q2 y² + q3 y³`.
fn q_coefficients(p: &BlackHoleParams, end: End) -> (f64, f64, f64) {
    let sigma = end.sign();
    let rs = p.horizon(end);
    let big_a = p.surface_gravity(end);
    let d2 = p.delta_r_dd(rs);
    let d3 = -8.0 * p.lambda * rs;
    let d4 = -8.0 * p.lambda;
    (d2 / (2.0 * big_a), -sigma * d3 / (6.0 * big_a), d4 / (24.0 * big_a))
}

/// Rescaled coefficients of `y(w)` from `(n−1) y_n = [q1 y² + q2 y³ + q3 y⁴]_n`.
fn distance_coefficients(p: &BlackHoleParams, end: End, y1: f64, n: usize) -> Vec<f64> {
    let (q1, q2, q3) = q_coefficients(p, end);
    let mut y = vec![0.0; n];
    if n > 1 {
        y[1] = y1;
    }
    // running powers y², y³, y⁴ updated as new coefficients appear
    let mut y2 = vec![0.0; n];
    let mut y3 = vec![0.0; n];
    let mut y4 = vec![0.0; n];
    for m in 2..n {
        // y^k_m only involves y_1..y_{m-1} for k ≥ 2
        y2[m] = (1..m).map(|i| y[i] * y[m - i]).sum();
        y3[m] = (1..m).map(|i| y[i] * y2[m - i]).sum();
        y4[m] = (1..m).map(|i| y[i] * y3[m - i]).sum();
        y[m] = (q1 * y2[m] + q2 * y3[m] + q3 * y4[m]) / (m as f64 - 1.0);
        // the new y_m enters y^k_{m'} only for m' > m, handled on later passes
    }
    y
}

fn tail_estimates(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    [n / 4, n / 2, n - 1].iter().filter(|&&j| j > 0 && c[j] != 0.0).map(|&j| c[j].abs().powf(-1.0 / j as f64)).collect()
}

/// Radius of convergence (in rescaled units) from a least-squares fit of
/// `ln|c_n| ≈ a + b n + β ln n` to the running envelope of the tail.
/// Returns `None` when fits over two disjoint windows disagree by more
/// than 10%.
fn radius_estimate(c: &[f64]) -> Option<f64> {
    let n = c.len();
    let env: Vec<f64> =
        (0..n).map(|j| c[j.saturating_sub(3)..=j].iter().fold(0.0_f64, |m, v| m.max(v.abs()))).collect();
    let fit = |lo: usize, hi: usize| -> Option<f64> {
        let pts: Vec<(f64, f64)> = (lo..hi).filter(|&j| env[j] > 0.0).map(|j| (j as f64, env[j].ln())).collect();
        if pts.len() < 6 {
            return None;
        }
        let slope = least_squares_slope(&pts)?;
        let rho = (-slope).exp();
        rho.is_finite().then_some(rho)
    };
    let early = fit(n / 4, n / 2)?;
    let late = fit(n / 2, n)?;
    ((early / late - 1.0).abs() < 0.1).then_some(late)
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    use nalgebra::{DMatrix, DVector};
    let m = pts.len();
    let a = DMatrix::from_fn(m, 3, |i, j| match j {
        0 => 1.0,
        1 => pts[i].0,
        _ => pts[i].0.ln(),
    });
    let b = DVector::from_fn(m, |i, _| pts[i].1);
    let svd = a.svd(true, true);
    let sol = svd.solve(&b, 1e-12).ok()?;
    Some(sol[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad;

    fn map(a: f64) -> TortoiseMap {
        let p = BlackHoleParams::new(0.1, 3.0, a, 0.0).unwrap();
        TortoiseMap::build(&p, None, DEFAULT_SERIES_TERMS).unwrap()
    }

    #[test]
    fn anchor_and_monotonicity() {
        let m = map(0.0);
        assert_eq!(m.x_of_r(m.r0), 0.0);
        let rp = m.params.r_plus;
        assert!(m.x_of_r(rp - 1e-6) > m.x_of_r(rp - 1e-3));
        assert!(m.table.windows(2).all(|w| w[0].1 < w[1].1));
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for a in [0.0, 0.01] {
            let m = map(a);
            let p = &m.params;
            for r in [p.r_minus + 0.05, 0.4, 0.7, p.r_plus - 0.02] {
                let (v, _) = quad::integrate(|s| 1.0 / p.delta_r(s).0, m.r0, r, 1e-14, 1e-13);
                assert!((v - m.x_of_r(r)).abs() < 1e-10, "r={r}: {v} vs {}", m.x_of_r(r));
            }
        }
    }

    #[test]
    fn radius_matches_image_of_infinity() {
        for a in [0.0, 0.01] {
            let m = map(a);
            for s in [&m.plus, &m.minus] {
                assert!((s.rho / s.scale - 1.0).abs() < 0.05, "{:?}: rho={} scale={}", s.end, s.rho, s.scale);
            }
        }
    }

    #[test]
    fn zeroth_coefficients() {
        let m = map(0.01);
        for s in [&m.plus, &m.minus] {
            assert_eq!(s.r[0], m.params.horizon(s.end));
            assert_eq!(s.delta[0], 0.0);
            assert!(s.r[1] != 0.0);
        }
    }

    #[test]
    fn series_agrees_with_newton_inverse() {
        for a in [0.0, 0.01] {
            let m = map(a);
            for s in [&m.plus, &m.minus] {
                for d in [0.0, 1.0, 2.0, 3.0] {
                    let x = s.x_match + s.end.sign() * d;
                    let zeta = s.w_of_x(&m.params, Complex64::new(x, 0.0)) / s.scale;
                    let r_series = series::eval_real(&s.r, zeta).re;
                    let r_newton = m.newton_r(x);
                    assert!((r_series - r_newton).abs() < 1e-12, "{:?} x={x}: {r_series} vs {r_newton}", s.end);
                }
            }
        }
    }

    #[test]
    fn round_trip() {
        let m = map(0.01);
        let (xl, xr) = m.match_points();
        for i in 0..=200 {
            let x = xl - 3.0 + (xr - xl + 6.0) * i as f64 / 200.0;
            let r = m.r_of_x(x);
            assert!((m.x_of_r(r) - x).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn horizon_slope() {
        let m = map(0.0);
        let p = &m.params;
        let h = 1e-3;
        let ln_y = |x: f64| m.series_distance(End::Plus, x).ln();
        let slope = |x: f64| (ln_y(x + h) - ln_y(x - h)) / (2.0 * h);
        // exact slope −Δ_r/y, which tends to −A_+ like O(y)
        let x = m.plus.x_match + 5.0;
        let y = m.series_distance(End::Plus, x);
        let exact = -p.delta_r(p.r_plus - y).0 / y;
        assert!((slope(x) - exact).abs() < 1e-6, "{} vs {exact}", slope(x));
        let far = m.plus.x_match + 14.0;
        assert!((slope(far) + p.a_plus).abs() < 1e-6, "{}", slope(far));
    }

    #[test]
    fn potential_series_structure() {
        let m = map(0.01);
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let v = m.potential_series(End::Plus, z, z, 0, 32).unwrap();
        assert!(v.coeffs.iter().all(|c| c.norm() == 0.0));
        let v = m.potential_series(End::Minus, z, one, 0, 32).unwrap();
        for (c, d) in v.coeffs.iter().zip(&m.minus.delta) {
            assert_eq!(*c, Complex64::new(*d, 0.0));
        }
        let w = Complex64::new(1.3, -0.4);
        for end in [End::Plus, End::Minus] {
            let v = m.potential_series(end, w, Complex64::new(2.0, 0.1), 3, 32).unwrap();
            let oe = m.params.omega_end(end, w, 3);
            assert!((v.coeffs[0] + oe * oe).norm() < 1e-13 * oe.norm_sqr());
        }
    }
}
