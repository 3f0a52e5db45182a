//! Kerr–de Sitter background: horizons, surface gravities, ergoregions and
//! the Kerr-star coordinate profile.

use crate::error::{Error, Result};
use crate::numerics::poly;
use num_complex::Complex64;

/// One of the two horizons bounding the stationary region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    /// Event horizon `r_-` (x → −∞).
    Minus,
    /// Cosmological horizon `r_+` (x → +∞).
    Plus,
}

impl End {
    /// +1 for the cosmological end, −1 for the event horizon.
    pub fn sign(self) -> f64 {
        match self {
            End::Plus => 1.0,
            End::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            End::Plus => '+',
            End::Minus => '-',
        }
    }
}

/// Physical constants of the background together with derived horizon data.
#[derive(Debug, Clone, PartialEq)]
pub struct BlackHoleParams {
    pub m0: f64,
    pub lambda: f64,
    pub a: f64,
    pub m_field: f64,
    pub alpha: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    /// All four roots of the quartic `Δ_r` (complex in general).
    pub roots: [Complex64; 4],
}

/// Roots closer than this fraction of `r_+` count as a double horizon.
const DEGENERATE_FRACTION: f64 = 1e-6;

impl BlackHoleParams {
    /// Validate the constants and locate the horizons `r_- < r_+`.
    pub fn new(m0: f64, lambda: f64, a: f64, m_field: f64) -> Result<Self> {
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::InvalidParameter(format!("M0 must be positive, got {m0}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("Lambda must be positive, got {lambda}")));
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be finite, got {a}")));
        }
        if !(m_field >= 0.0 && m_field.is_finite()) {
            return Err(Error::InvalidParameter(format!("m_field must be non-negative, got {m_field}")));
        }
        let alpha = lambda * a * a / 3.0;
        // Δ_r = -(Λ/3) r^4 + (1 - α) r^2 - 2 M0 r + a^2
        let coeffs = [a * a, -2.0 * m0, 1.0 - alpha, 0.0, -lambda / 3.0];
        let all = poly::roots(&coeffs);
        let mut roots = [Complex64::new(0.0, 0.0); 4];
        roots.copy_from_slice(&all);
        roots.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));

        let scale = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut real: Vec<f64> = roots.iter().filter(|z| z.im.abs() <= 1e-9 * scale.max(1.0)).map(|z| z.re).collect();
        real.sort_by(f64::total_cmp);

        let poly_at = |r: f64| delta_r_raw(m0, lambda, a, r).0;
        let mut pair = None;
        for w in real.windows(2) {
            let (r1, r2) = (w[0], w[1]);
            if r1 > 0.0 && r2 > r1 && poly_at(0.5 * (r1 + r2)) > 0.0 {
                pair = Some((r1, r2));
            }
        }
        let Some((r1, r2)) = pair else {
            return Err(Error::NoHorizonRegion { m0, lambda, a });
        };
        for w in real.windows(2) {
            if (w[1] - w[0]).abs() < DEGENERATE_FRACTION * r2 && (w[0] == r1 || w[0] == r2 || w[1] == r1 || w[1] == r2)
            {
                return Err(Error::DegenerateHorizon { r1: w[0], r2: w[1] });
            }
        }
        let r_minus = newton_root(m0, lambda, a, r1);
        let r_plus = newton_root(m0, lambda, a, r2);
        // keep the stored roots consistent with the polished horizons
        for z in roots.iter_mut() {
            if (z.re - r1).abs() < 1e-9 * scale && z.im.abs() <= 1e-9 * scale.max(1.0) {
                *z = Complex64::new(r_minus, 0.0);
            } else if (z.re - r2).abs() < 1e-9 * scale && z.im.abs() <= 1e-9 * scale.max(1.0) {
                *z = Complex64::new(r_plus, 0.0);
            }
        }
        let a_minus = delta_r_raw(m0, lambda, a, r_minus).1;
        let a_plus = -delta_r_raw(m0, lambda, a, r_plus).1;
        if !(a_minus > 0.0 && a_plus > 0.0) {
            return Err(Error::DegenerateHorizon { r1: r_minus, r2: r_plus });
        }
        Ok(BlackHoleParams { m0, lambda, a, m_field, alpha, r_minus, r_plus, a_minus, a_plus, roots })
    }

    /// `(Δ_r(r), ∂_rΔ_r(r))`.
    pub fn delta_r(&self, r: f64) -> (f64, f64) {
        delta_r_raw(self.m0, self.lambda, self.a, r)
    }

    /// Second derivative `∂_r²Δ_r`.
    pub fn delta_r_dd(&self, r: f64) -> f64 {
        -4.0 * self.lambda * r * r + 2.0 * (1.0 - self.alpha)
    }

    /// `Δ_r` at complex argument.
    pub fn delta_r_complex(&self, r: Complex64) -> Complex64 {
        let r2 = r * r;
        (r2 + self.a * self.a) * (1.0 - self.lambda * r2 / 3.0) - 2.0 * self.m0 * r
    }

    /// `Δ_θ = 1 + α cos²θ`.
    pub fn delta_theta(&self, cos_theta: f64) -> f64 {
        1.0 + self.alpha * cos_theta * cos_theta
    }

    pub fn one_plus_alpha(&self) -> f64 {
        1.0 + self.alpha
    }

    pub fn horizon(&self, end: End) -> f64 {
        match end {
            End::Plus => self.r_plus,
            End::Minus => self.r_minus,
        }
    }

    pub fn surface_gravity(&self, end: End) -> f64 {
        match end {
            End::Plus => self.a_plus,
            End::Minus => self.a_minus,
        }
    }

    /// The constant `ω_± = (1+α)((r_±²+a²)ω − ak)` governing the outgoing
    /// behaviour at each end.
    pub fn omega_end(&self, end: End, omega: Complex64, k: i32) -> Complex64 {
        let r = self.horizon(end);
        self.one_plus_alpha() * ((r * r + self.a * self.a) * omega - self.a * k as f64)
    }

    /// `(1+α)(r_+² + r_-² + 2a²)`, the constant in the zero-resonance residue.
    pub fn zero_mode_constant(&self) -> f64 {
        self.one_plus_alpha() * (self.r_plus * self.r_plus + self.r_minus * self.r_minus + 2.0 * self.a * self.a)
    }

    /// Radii where the stationary operator is not elliptic, for each `θ`
    /// sample in `thetas`. Ellipticity fails where `Δ_r ≤ a²Δ_θ sin²θ`.
    pub fn ergo_extent(&self, thetas: &[f64]) -> Vec<(f64, Vec<(f64, f64)>)> {
        const SAMPLES: usize = 2048;
        let (rm, rp) = (self.r_minus, self.r_plus);
        thetas
            .iter()
            .map(|&theta| {
                let s = theta.sin();
                let rot = self.a * self.a * self.delta_theta(theta.cos()) * s * s;
                let g = |r: f64| self.delta_r(r).0 - rot;
                if rot == 0.0 {
                    return (theta, Vec::new());
                }
                // g < 0 near both horizons, where Δ_r → 0
                let h = (rp - rm) / SAMPLES as f64;
                let mut intervals = Vec::new();
                let mut start = Some(rm);
                let mut prev = (rm, g(rm));
                for i in 1..=SAMPLES {
                    let r = if i == SAMPLES { rp } else { rm + h * i as f64 };
                    let cur = (r, g(r));
                    let inside_prev = prev.1 <= 0.0;
                    let inside_cur = cur.1 <= 0.0;
                    if inside_prev != inside_cur {
                        let edge = bisect(&g, prev.0, cur.0);
                        if inside_prev {
                            intervals.push((start.take().unwrap_or(rm), edge));
                        } else {
                            start = Some(edge);
                        }
                    }
                    prev = cur;
                }
                if let Some(s0) = start {
                    intervals.push((s0, rp));
                }
                (theta, intervals)
            })
            .collect()
    }

    /// Build the Kerr-star transition profile with margin `delta_r`.
    pub fn kerr_star_profile(&self, delta_r: f64, n_samples: usize) -> Result<KerrStarProfile> {
        let width = self.r_plus - self.r_minus;
        if !(delta_r > 0.0 && delta_r < 0.5 * width) {
            return Err(Error::InvalidParameter(format!("delta_r must lie in (0, {}), got {delta_r}", 0.5 * width)));
        }
        let n = n_samples.max(16);
        let opa = self.one_plus_alpha();
        let a2 = self.a * self.a;
        let max_delta = (0..=n).map(|i| self.delta_r(self.r_minus + width * i as f64 / n as f64).0).fold(0.0, f64::max);
        let beta = 0.5 * opa * (self.r_minus * self.r_minus + a2) / max_delta;
        let profile = KerrStarProfile { params: self.clone(), delta_r_margin: delta_r, beta, c_slack: f64::INFINITY };
        // open grid: the slack tends to a positive limit at the horizons
        let mut min_slack = f64::INFINITY;
        let mut at = self.r_minus;
        for i in 1..n {
            let r = self.r_minus + width * i as f64 / n as f64;
            let s = profile.slack(r);
            if s < min_slack {
                min_slack = s;
                at = r;
            }
        }
        if !(min_slack > 0.0) {
            return Err(Error::SlackViolated { min_slack, r: at });
        }
        Ok(KerrStarProfile { c_slack: min_slack, ..profile })
    }
}

fn delta_r_raw(m0: f64, lambda: f64, a: f64, r: f64) -> (f64, f64) {
    let r2 = r * r;
    let a2 = a * a;
    let value = (r2 + a2) * (1.0 - lambda * r2 / 3.0) - 2.0 * m0 * r;
    let deriv = 2.0 * r * (1.0 - lambda * r2 / 3.0) - (r2 + a2) * 2.0 * lambda * r / 3.0 - 2.0 * m0;
    (value, deriv)
}

fn newton_root(m0: f64, lambda: f64, a: f64, mut r: f64) -> f64 {
    for _ in 0..20 {
        let (f, df) = delta_r_raw(m0, lambda, a, r);
        if df == 0.0 {
            break;
        }
        let step = f / df;
        r -= step;
        if step.abs() <= 4.0 * f64::EPSILON * r.abs() {
            break;
        }
    }
    r
}

fn bisect<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64) -> f64 {
    let neg_lo = g(lo) <= 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) <= 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Quintic smoothstep: 0 for `t ≤ 0`, 1 for `t ≥ 1`, C² in between.
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// Derivatives of the Kerr-star coordinate shifts `F_t`, `F_φ`.
///
/// Near `r_±` the profile equals `±(E(r) − β)` with `E = (1+α)(r²+a²)/Δ_r`,
/// switched off by a quintic smoothstep over `[r_- + δ/2, r_- + δ]` (and its
/// mirror image at `r_+`).
#[derive(Debug, Clone, PartialEq)]
pub struct KerrStarProfile {
    pub params: BlackHoleParams,
    pub delta_r_margin: f64,
    pub beta: f64,
    pub c_slack: f64,
}

impl KerrStarProfile {
    /// `χ_+(r) − χ_-(r)`: +1 near `r_+`, −1 near `r_-`, 0 on `K_r`.
    fn switch(&self, r: f64) -> f64 {
        let d = self.delta_r_margin;
        let p = &self.params;
        let chi_minus = smoothstep((p.r_minus + d - r) / (0.5 * d));
        let chi_plus = smoothstep((r - (p.r_plus - d)) / (0.5 * d));
        chi_plus - chi_minus
    }

    pub fn f_t_prime(&self, r: f64) -> f64 {
        let sw = self.switch(r);
        if sw == 0.0 {
            return 0.0;
        }
        let p = &self.params;
        let e = p.one_plus_alpha() * (r * r + p.a * p.a) / p.delta_r(r).0;
        sw * (e - self.beta)
    }

    pub fn f_phi_prime(&self, r: f64) -> f64 {
        let sw = self.switch(r);
        if sw == 0.0 {
            return 0.0;
        }
        let p = &self.params;
        sw * p.one_plus_alpha() * p.a / p.delta_r(r).0
    }

    /// `(1+α)²(r²+a²)²/Δ_r − Δ_r F'_t² − (1+α)²a²`, evaluated in a form that
    /// stays finite at the horizons.
    pub fn slack(&self, r: f64) -> f64 {
        let p = &self.params;
        let opa = p.one_plus_alpha();
        let dr = p.delta_r(r).0;
        let e_num = opa * (r * r + p.a * p.a);
        let sw = self.switch(r);
        // (e_num²/Δ)(1 − sw²) + 2 sw² β e_num − sw² β² Δ − (1+α)² a²
        e_num * e_num / dr * (1.0 - sw * sw) + 2.0 * sw * sw * self.beta * e_num
            - sw * sw * self.beta * self.beta * dr
            - opa * opa * p.a * p.a
    }

    /// Sample `(r, F'_t, F'_φ)` on a uniform open grid of `n` points.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let p = &self.params;
        let w = p.r_plus - p.r_minus;
        (1..=n)
            .map(|i| {
                let r = p.r_minus + w * i as f64 / (n + 1) as f64;
                (r, self.f_t_prime(r), self.f_phi_prime(r))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sds() -> BlackHoleParams {
        BlackHoleParams::new(0.1, 3.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn sds_horizons_match_bisection() {
        let p = sds();
        let f = |r: f64| r - r * r * r - 0.2;
        let bis = |mut lo: f64, mut hi: f64| {
            while hi - lo > 1e-13 {
                let m = 0.5 * (lo + hi);
                if f(m).signum() == f(lo).signum() {
                    lo = m
                } else {
                    hi = m
                }
            }
            0.5 * (lo + hi)
        };
        assert!((p.r_minus - bis(0.1, 0.5)).abs() < 1e-12);
        assert!((p.r_plus - bis(0.5, 1.0)).abs() < 1e-12);
        assert_eq!(p.alpha, 0.0);
    }

    #[test]
    fn overmassive_rejected() {
        let e = BlackHoleParams::new(0.2, 3.0, 0.0, 0.0).unwrap_err();
        assert_eq!(e.name(), "NoHorizonRegion");
    }

    #[test]
    fn delta_r_values() {
        let p = sds();
        assert!((p.delta_r(0.5).0 - 0.0875).abs() < 1e-15);
        assert!(p.delta_r(p.r_plus).0.abs() < 1e-14);
        assert_eq!(p.delta_r(p.r_plus).1, -p.a_plus);
    }

    #[test]
    fn no_ergoregion_without_rotation() {
        let p = sds();
        for (_, iv) in p.ergo_extent(&[0.0, 0.7, std::f64::consts::FRAC_PI_2]) {
            assert!(iv.is_empty());
        }
    }

    #[test]
    fn slowly_rotating_ergoregions_hug_horizons() {
        let p = BlackHoleParams::new(0.1, 3.0, 0.01, 0.0).unwrap();
        let res = p.ergo_extent(&[0.0, std::f64::consts::FRAC_PI_2]);
        assert!(res[0].1.is_empty());
        let iv = &res[1].1;
        assert_eq!(iv.len(), 2);
        assert!((iv[0].0 - p.r_minus).abs() < 1e-12 && iv[0].1 - p.r_minus < 1e-2);
        assert!((iv[1].1 - p.r_plus).abs() < 1e-12 && p.r_plus - iv[1].0 < 1e-2);
    }

    #[test]
    fn kerr_star_profile_conditions() {
        for a in [0.0, 0.01] {
            let p = BlackHoleParams::new(0.1, 3.0, a, 0.0).unwrap();
            let d = 0.1 * (p.r_plus - p.r_minus);
            let prof = p.kerr_star_profile(d, 4000).unwrap();
            assert!(prof.c_slack > 0.0);
            for (r, ft, fp) in prof.samples(500) {
                if r >= p.r_minus + d && r <= p.r_plus - d {
                    assert_eq!((ft, fp), (0.0, 0.0));
                }
            }
            // regular part near r_+ stays bounded
            let opa = p.one_plus_alpha();
            for eps in [1e-3, 1e-6, 1e-9] {
                let r = p.r_plus - eps;
                let reg = prof.f_t_prime(r) - opa * (r * r + a * a) / p.delta_r(r).0;
                assert!((reg + prof.beta).abs() < 1e-6, "{reg}");
                let r = p.r_minus + eps;
                let reg = prof.f_t_prime(r) + opa * (r * r + a * a) / p.delta_r(r).0;
                assert!((reg - prof.beta).abs() < 1e-6, "{reg}");
            }
        }
    }
}
