//! The separated resolvent `R_g(ω, k)` as a sum over angular branches, its
//! residue at `ω = 0`, and a contour formula for inverting `A⊗1 + 1⊗B`.

use crate::angular::{default_basis_size, legendre_basis, AngularBasis, AngularBranch};
use crate::coords::TortoiseMap;
use crate::error::{Error, Result};
use crate::numerics::quad::gauss_legendre;
use crate::radial::{apply_green_kernel, cumulative_integral, outgoing_pair, wronskian, OutgoingPair, Spectral};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A source `f(r, μ)` for the mode `k`, sampled on a uniform `r` grid times
/// the Gauss-Legendre nodes in `μ = cosθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventRequest {
    pub omega: Complex64,
    pub k: i32,
    /// Number of angular branches `l = |k|, …, |k| + l_max − 1` kept.
    pub l_max: usize,
    /// Uniform, increasing radii strictly inside `(r_-, r_+)`.
    pub r: Vec<f64>,
    /// Number of Gauss-Legendre nodes in `μ`.
    pub n_mu: usize,
    /// `f[(i, j)] = f(r_i, μ_j)`.
    pub f: DMatrix<Complex64>,
    /// Radial support `K_r = [r_1, r_2]`; `f` must vanish outside it.
    pub support: (f64, f64),
}

impl ResolventRequest {
    /// Uniform grid of `n_r` radii covering `support`, with `f` sampled from
    /// `source(r, μ)`.
    pub fn sample<F: Fn(f64, f64) -> Complex64>(
        omega: Complex64,
        k: i32,
        l_max: usize,
        support: (f64, f64),
        n_r: usize,
        n_mu: usize,
        source: F,
    ) -> Self {
        let r: Vec<f64> = (0..n_r).map(|i| support.0 + (support.1 - support.0) * i as f64 / (n_r - 1) as f64).collect();
        let (mu, _) = gauss_legendre(n_mu);
        let f = DMatrix::from_fn(n_r, n_mu, |i, j| source(r[i], mu[j]));
        ResolventRequest { omega, k, l_max, r, n_mu, f, support }
    }
}

/// Output of [`resolvent_apply`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventResult {
    pub r: Vec<f64>,
    pub mu: Vec<f64>,
    pub u: DMatrix<Complex64>,
    /// `(l, λ_{k,l}(ω))` for the branches used.
    pub branches: Vec<(usize, Complex64)>,
    /// Relative residual `‖P_g u − f‖ / ‖f‖` on interior grid points.
    pub residual: f64,
    /// Relative size of the last branch term in `u`.
    pub truncation: f64,
    pub warnings: Vec<String>,
}

/// Angular eigenfunctions on the `μ` nodes and their strong-form image
/// `P_θ(ω) e_l`, for `l_max` branches.
struct AngularData {
    branches: Vec<AngularBranch>,
    values: Vec<Vec<Complex64>>,
    images: Vec<Vec<Complex64>>,
}

fn angular_data(map: &TortoiseMap, omega: Complex64, k: i32, l_max: usize, mu: &[f64]) -> Result<AngularData> {
    let p = &map.params;
    let m = k.unsigned_abs() as usize;
    let mut n = default_basis_size(p, omega, k);
    while l_max > n / 4 {
        n *= 2;
    }
    let basis = AngularBasis::new(p, k, n)?;
    let fine = AngularBasis::new(p, k, 2 * n)?.eigs(omega);
    let all = basis.eigs(omega);
    let branches: Vec<AngularBranch> = all.into_iter().filter(|b| b.l < m + l_max).collect();
    for b in &branches {
        let f = fine.iter().find(|x| x.l == b.l).expect("branch in doubled basis");
        let shift = (f.lambda - b.lambda).norm();
        if shift > 1e-8 * b.lambda.norm().max(1.0) {
            return Err(Error::BasisTooSmall { n, l: b.l, shift });
        }
    }
    for (i, b) in branches.iter().enumerate() {
        for c in &branches[i + 1..] {
            if (b.lambda - c.lambda).norm() < 1e-8 * b.lambda.norm().max(1.0) {
                return Err(Error::DegenerateBranch);
            }
        }
    }
    let opa2 = p.one_plus_alpha().powi(2);
    let kf = k as f64;
    let mut values = vec![vec![ZERO; mu.len()]; branches.len()];
    let mut images = values.clone();
    for (j, &x) in mu.iter().enumerate() {
        let (pv, d1, d2) = legendre_basis(m, n, x);
        let s2 = 1.0 - x * x;
        let dt = p.delta_theta(x);
        // −∂_μ(Δ_θ s² ∂_μ e) + (1+α)²(aω s² − k)²/(Δ_θ s²) e + m²a²μ² e
        let flux_d = 2.0 * p.alpha * x * s2 - 2.0 * x * dt;
        let q = opa2 * (p.a * omega * s2 - kf).powi(2) / (dt * s2) + (p.m_field * p.a * x).powi(2);
        for (bi, b) in branches.iter().enumerate() {
            let (mut e, mut de, mut dde) = (ZERO, ZERO, ZERO);
            for i in 0..n {
                e += b.coeffs[i] * pv[i];
                de += b.coeffs[i] * d1[i];
                dde += b.coeffs[i] * d2[i];
            }
            values[bi][j] = e;
            images[bi][j] = -(dt * s2 * dde + flux_d * de) + q * e;
        }
    }
    Ok(AngularData { branches, values, images })
}

/// Apply the separated resolvent to `f`:
/// `u = Σ_l G(ω, λ_{k,l}(ω)) f_l ⊗ e_l`, where `f_l = ∫ e_l f dμ` (bilinear,
/// which is the dual pairing for the complex-symmetric angular operator) and
/// `G` is the outgoing radial Green operator of `P_r + λ`.
pub fn resolvent_apply(map: &TortoiseMap, req: &ResolventRequest) -> Result<ResolventResult> {
    let p = &map.params;
    let (mu, wmu) = gauss_legendre(req.n_mu);
    let n_r = req.r.len();
    if req.f.nrows() != n_r || req.f.ncols() != req.n_mu {
        return Err(Error::InvalidParameter("source shape does not match the grid".into()));
    }
    if n_r < 8 || req.r.windows(2).any(|w| w[1] <= w[0]) || req.r[0] <= p.r_minus || req.r[n_r - 1] >= p.r_plus {
        return Err(Error::InvalidParameter(
            "r grid must be increasing inside (r_-, r_+) with at least 8 points".into(),
        ));
    }
    if req.l_max == 0 {
        return Err(Error::InvalidParameter("l_max must be positive".into()));
    }
    for (i, &r) in req.r.iter().enumerate() {
        let outside = r < req.support.0 || r > req.support.1;
        if outside && req.f.row(i).iter().any(|z| z.norm() > 0.0) {
            return Err(Error::InvalidParameter(format!("source does not vanish at r={r}, outside K_r")));
        }
    }
    let f_norm = weighted_norm(&req.f, &req.r, &wmu, 0);
    if f_norm == 0.0 {
        return Ok(ResolventResult {
            r: req.r.clone(),
            mu,
            u: DMatrix::zeros(n_r, req.n_mu),
            branches: Vec::new(),
            residual: 0.0,
            truncation: 0.0,
            warnings: Vec::new(),
        });
    }
    let ang = angular_data(map, req.omega, req.k, req.l_max, &mu)?;
    let x: Vec<f64> = req.r.iter().map(|&r| map.x_of_r(r)).collect();
    let delta: Vec<f64> = req.r.iter().map(|&r| p.delta_r(r).0).collect();

    let mut u = DMatrix::zeros(n_r, req.n_mu);
    let mut last = DMatrix::zeros(n_r, req.n_mu);
    let mut radial_parts = Vec::with_capacity(ang.branches.len());
    for (bi, b) in ang.branches.iter().enumerate() {
        // f_l(r), then the x-form source Δ_r f_l
        let fx: Vec<Complex64> = (0..n_r)
            .map(|i| (0..req.n_mu).map(|j| wmu[j] * ang.values[bi][j] * req.f[(i, j)]).sum::<Complex64>() * delta[i])
            .collect();
        let ul = if fx.iter().all(|z| *z == ZERO) {
            vec![ZERO; n_r]
        } else {
            let pair = outgoing_pair(map, Spectral::new(req.omega, b.lambda, req.k), &x)?;
            apply_green_kernel(&pair, &fx)?
        };
        for i in 0..n_r {
            for j in 0..req.n_mu {
                let term = ul[i] * ang.values[bi][j];
                u[(i, j)] += term;
                if bi + 1 == ang.branches.len() {
                    last[(i, j)] = term;
                }
            }
        }
        radial_parts.push(ul);
    }
    let u_norm = weighted_norm(&u, &req.r, &wmu, 0);
    let truncation = if u_norm > 0.0 { weighted_norm(&last, &req.r, &wmu, 0) / u_norm } else { 0.0 };
    let mut warnings = Vec::new();
    if truncation > 1e-8 {
        warnings.push(format!("TruncationWarning: last branch carries {truncation:.2e} of the solution"));
    }

    // strong-form residual: P_r by fourth-order differences in r, P_θ exactly
    let pu = apply_operator(map, req, &ang, &radial_parts);
    let defect = DMatrix::from_fn(n_r, req.n_mu, |i, j| pu[(i, j)] - req.f[(i, j)]);
    let residual =
        weighted_norm(&defect, &req.r, &wmu, 3) / weighted_norm(&req.f, &req.r, &wmu, 3).max(f64::MIN_POSITIVE);
    Ok(ResolventResult {
        r: req.r.clone(),
        mu,
        u,
        branches: ang.branches.iter().map(|b| (b.l, b.lambda)).collect(),
        residual,
        truncation,
        warnings,
    })
}

fn apply_operator(
    map: &TortoiseMap,
    req: &ResolventRequest,
    ang: &AngularData,
    radial_parts: &[Vec<Complex64>],
) -> DMatrix<Complex64> {
    let p = &map.params;
    let n_r = req.r.len();
    let h = req.r[1] - req.r[0];
    let opa2 = p.one_plus_alpha().powi(2);
    let kf = req.k as f64;
    let mut out = DMatrix::zeros(n_r, req.n_mu);
    for (bi, ul) in radial_parts.iter().enumerate() {
        for i in 3..n_r - 3 {
            let r = req.r[i];
            let (d, dd) = p.delta_r(r);
            let d1 = (-ul[i + 2] + 8.0 * ul[i + 1] - 8.0 * ul[i - 1] + ul[i - 2]) / (12.0 * h);
            let d2 = (-ul[i + 2] + 16.0 * ul[i + 1] - 30.0 * ul[i] + 16.0 * ul[i - 1] - ul[i - 2]) / (12.0 * h * h);
            let q = opa2 * ((r * r + p.a * p.a) * req.omega - p.a * kf).powi(2) / d;
            let pr = -(d * d2 + dd * d1) - q * ul[i] + (p.m_field * r).powi(2) * ul[i];
            for j in 0..req.n_mu {
                out[(i, j)] += pr * ang.values[bi][j] + ul[i] * ang.images[bi][j];
            }
        }
    }
    out
}

/// Discrete `L²(dr dμ)` norm, skipping `skip` points at both ends in `r`.
fn weighted_norm(m: &DMatrix<Complex64>, r: &[f64], wmu: &[f64], skip: usize) -> f64 {
    let n = r.len();
    let mut acc = 0.0;
    for i in skip..n - skip {
        let dr = if i + 1 < n { r[i + 1] - r[i] } else { r[i] - r[i - 1] };
        for (j, w) in wmu.iter().enumerate() {
            acc += dr * w * m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Both evaluations of the residue of `R_g(ω, 0)` at `ω = 0`, paired
/// against the constant function and normalized by `⟨f, 1⟩⟨1, g⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroResidue {
    /// Limit of `ω (R_g f, g)` from resolvent evaluations.
    pub direct: Complex64,
    /// Limit of `ω S_r0⊗S_θ0 / (λ_r(ω) − λ_θ(ω))` along the same samples.
    pub via_branches: Complex64,
    /// `i / (4π (1+α)(r_+² + r_-² + 2a²))`.
    pub target: Complex64,
    /// Extrapolated `λ_r'(0)`.
    pub lambda_r_slope: Complex64,
    /// `i (1+α)(r_+² + r_-² + 2a²) / (r_+ − r_-)`.
    pub slope_target: Complex64,
    /// Kernel of `S_θ0` at `θ = θ' = 0`, including the `1/2π` of the
    /// azimuthal projection.
    pub s_theta0: f64,
    /// Sample frequencies with `(ω F_direct, ω F_branch, λ_r(ω))`.
    pub samples: Vec<(Complex64, Complex64, Complex64, Complex64)>,
}

/// Settings of the zero-frequency extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroResidueOptions {
    pub epsilon: f64,
    /// Direction of the sample ray, in radians.
    pub angle: f64,
    pub n_samples: usize,
    pub n_r: usize,
}

impl Default for ZeroResidueOptions {
    fn default() -> Self {
        ZeroResidueOptions { epsilon: 1e-2, angle: PI / 4.0, n_samples: 5, n_r: 401 }
    }
}

/// Smooth bump on `[lo, hi]`, zero outside.
fn bump(r: f64, lo: f64, hi: f64) -> f64 {
    let s = (2.0 * r - lo - hi) / (hi - lo);
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Residue of the resolvent at the zero frequency, computed from the
/// resolvent itself and from the branch formula, with a check that the two
/// agree.
pub fn zero_residue(map: &TortoiseMap, opts: &ZeroResidueOptions) -> Result<ZeroResidue> {
    let p = &map.params;
    let c = p.zero_mode_constant();
    let width = p.r_plus - p.r_minus;
    let support = (p.r_minus + 0.2 * width, p.r_plus - 0.2 * width);
    let target = Complex64::new(0.0, 1.0 / (4.0 * PI * c));
    let slope_target = Complex64::new(0.0, c / width);
    let (mu, wmu) = gauss_legendre(24);

    let r: Vec<f64> =
        (0..opts.n_r).map(|i| support.0 + (support.1 - support.0) * i as f64 / (opts.n_r - 1) as f64).collect();
    let b: Vec<f64> = r.iter().map(|&x| bump(x, support.0, support.1)).collect();
    let bc: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let int_b = cumulative_integral(&r, &bc)[opts.n_r - 1];
    // ⟨f, 1⟩ = 2π ∫∫ b dr dμ with f = b(r)
    let pair_f1 = 2.0 * PI * 2.0 * int_b;

    let mut samples = Vec::with_capacity(opts.n_samples);
    let dir = Complex64::from_polar(1.0, opts.angle);
    let mut lam_r = Complex64::new(0.0, 0.0);
    for j in 0..opts.n_samples {
        let omega = opts.epsilon * dir * 0.5f64.powi(j as i32);
        // direct route
        let req = ResolventRequest::sample(omega, 0, 3, support, opts.n_r, 24, |rr, _| {
            Complex64::new(bump(rr, support.0, support.1), 0.0)
        });
        let res = resolvent_apply(map, &req)?;
        let ug: Vec<Complex64> =
            (0..opts.n_r).map(|i| (0..mu.len()).map(|m| wmu[m] * res.u[(i, m)]).sum::<Complex64>() * b[i]).collect();
        let pairing = 2.0 * PI * cumulative_integral(&r, &ug)[opts.n_r - 1];
        let direct = omega * pairing / (pair_f1 * pair_f1);

        // branch route: λ_r(ω) is the zero of λ ↦ W(ω, λ)
        let guess = if j == 0 { slope_target * omega } else { lam_r * 0.5 };
        lam_r = lambda_r(map, omega, guess)?;
        let ang = angular_data(map, omega, 0, 1, &mu)?;
        let lam_t = ang.branches[0].lambda;
        let e_int: Complex64 = (0..mu.len()).map(|m| wmu[m] * ang.values[0][m]).sum();
        let x: Vec<f64> = r.iter().map(|&rr| map.x_of_r(rr)).collect();
        let sp = Spectral::new(omega, lam_r, 0);
        let pair = outgoing_pair(map, sp, &x)?;
        let k_pair = kernel_pairing(&pair, &b, &r);
        let dlam = lambda_derivative(map, omega, lam_r)?;
        // (R f, g)_{dr dμ} ≈ (S_r b, b)(∫e)² / (λ_θ − λ_r) with S_r = u_+u_-/∂_λW
        let term = (k_pair / dlam) * e_int * e_int / (lam_t - lam_r);
        let via = omega * 2.0 * PI * term / (pair_f1 * pair_f1);
        samples.push((omega, direct, via, lam_r));
    }
    let direct = extrapolate(samples.iter().map(|s| (s.0, s.1)))?;
    let via_branches = extrapolate(samples.iter().map(|s| (s.0, s.2)))?;
    let lambda_r_slope = extrapolate(samples.iter().map(|s| (s.0, s.3 / s.0)))?;
    if (direct - via_branches).norm() > 1e-3 * target.norm() {
        return Err(Error::ExtrapolationUnstable(format!(
            "direct limit {direct} and branch limit {via_branches} disagree"
        )));
    }
    // the l = 0 eigenfunction at ω = 0, evaluated at θ = 0
    let ang0 = angular_data(map, ZERO, 0, 1, &[0.0])?;
    let m0 = &ang0.branches[0];
    let (p1, _, _) = legendre_basis(0, m0.coeffs.len(), 1.0);
    let e_pole: Complex64 = (0..p1.len()).map(|i| m0.coeffs[i] * p1[i]).sum();
    let s_theta0 = -(e_pole * e_pole).re / (2.0 * PI);
    Ok(ZeroResidue { direct, via_branches, target, lambda_r_slope, slope_target, s_theta0, samples })
}

/// `∫∫ b(r) b(r') u_+(r_>) u_-(r_<) dr dr'`.
fn kernel_pairing(pair: &OutgoingPair, b: &[f64], r: &[f64]) -> Complex64 {
    let n = b.len();
    let gm: Vec<Complex64> = (0..n).map(|i| pair.minus[i].0 * b[i]).collect();
    let inner = cumulative_integral(r, &gm);
    let outer: Vec<Complex64> = (0..n).map(|i| 2.0 * pair.plus[i].0 * b[i] * inner[i]).collect();
    cumulative_integral(r, &outer)[n - 1]
}

/// `∂_λ W(ω, λ)` by a central difference.
fn lambda_derivative(map: &TortoiseMap, omega: Complex64, lambda: Complex64) -> Result<Complex64> {
    let h = 1e-4 * lambda.norm().max(1.0);
    let wp = wronskian(map, Spectral::new(omega, lambda + h, 0))?.w;
    let wm = wronskian(map, Spectral::new(omega, lambda - h, 0))?.w;
    Ok((wp - wm) / (2.0 * h))
}

/// Zero of `λ ↦ W(ω, λ)` near `guess` (mode `k = 0`).
fn lambda_r(map: &TortoiseMap, omega: Complex64, guess: Complex64) -> Result<Complex64> {
    let f = |l: Complex64| -> Result<Complex64> { Ok(wronskian(map, Spectral::new(omega, l, 0))?.w) };
    let mut x0 = guess;
    let mut x1 = guess * (1.0 + 1e-3) + 1e-9;
    let mut f0 = f(x0)?;
    let mut f1 = f(x1)?;
    for it in 0..40 {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            return Err(Error::NoConvergence { iterations: it });
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        let step = (x2 - x1).norm();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        if step < 1e-14 * x1.norm().max(1e-300) {
            return Ok(x1);
        }
        f1 = f(x1)?;
    }
    Err(Error::NoConvergence { iterations: 40 })
}

/// Least-squares line `y ≈ c₀ + c₁ω` through the samples, returning `c₀`.
/// Refuses when dropping the largest sample moves `c₀` by more than `10⁻³`
/// relative.
fn extrapolate<I: Iterator<Item = (Complex64, Complex64)>>(samples: I) -> Result<Complex64> {
    let pts: Vec<(Complex64, Complex64)> = samples.collect();
    if pts.len() < 3 {
        return Err(Error::ExtrapolationUnstable("need at least three samples".into()));
    }
    let fit = |pts: &[(Complex64, Complex64)]| -> Complex64 {
        let a = DMatrix::from_fn(pts.len(), 2, |i, j| if j == 0 { Complex64::new(1.0, 0.0) } else { pts[i].0 });
        let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
        let ah = a.adjoint();
        let sol = (&ah * &a).lu().solve(&(&ah * y)).expect("distinct sample points");
        sol[0]
    };
    let all = fit(&pts);
    let tail = fit(&pts[1..]);
    if (all - tail).norm() > 1e-3 * all.norm() {
        return Err(Error::ExtrapolationUnstable(format!("limit moved from {all} to {tail} when dropping a sample")));
    }
    Ok(all)
}

/// Closed circular contour for [`finite_tensor_inverse_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleContour {
    pub center: Complex64,
    pub radius: f64,
    pub nodes: usize,
}

impl CircleContour {
    /// Circle around the mean of `σ(B)`, of radius halfway between the
    /// farthest eigenvalue of `B` and the nearest of `−A`.
    pub fn separating(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, nodes: usize) -> Result<Self> {
        let sb = eigenvalues(b);
        let sa: Vec<Complex64> = eigenvalues(a).into_iter().map(|z| -z).collect();
        let center = sb.iter().sum::<Complex64>() / sb.len() as f64;
        let inner = sb.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
        let outer = sa.iter().map(|z| (z - center).norm()).fold(f64::INFINITY, f64::min);
        if !(outer > inner) {
            return Err(Error::ContourSeparation);
        }
        Ok(CircleContour { center, radius: 0.5 * (inner + outer), nodes })
    }
}

fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let (_, t) = m.clone().schur().unpack();
    (0..m.nrows()).map(|i| t[(i, i)]).collect()
}

/// `(1/2πi) ∮ (A + λ)⁻¹ ⊗ (B − λ)⁻¹ dλ` over the clockwise circle, by the
/// trapezoid rule. When the circle encloses `σ(B)` and excludes
/// `σ(−A)` this equals `(A⊗1 + 1⊗B)⁻¹`.
pub fn finite_tensor_inverse_oracle(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    contour: &CircleContour,
) -> Result<DMatrix<Complex64>> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::InvalidParameter("A and B must be square".into()));
    }
    let (na, nb) = (a.nrows(), b.nrows());
    let sb = eigenvalues(b);
    let sa: Vec<Complex64> = eigenvalues(a).into_iter().map(|z| -z).collect();
    let tol = 1e-3 * contour.radius;
    for z in sb.iter().chain(&sa) {
        let dist = ((z - contour.center).norm() - contour.radius).abs();
        if dist < tol {
            return Err(Error::ContourThroughSpectrum { distance: dist });
        }
    }
    let b_inside = sb.iter().all(|z| (z - contour.center).norm() < contour.radius);
    let a_outside = sa.iter().all(|z| (z - contour.center).norm() > contour.radius);
    if !(b_inside && a_outside) {
        return Err(Error::ContourSeparation);
    }
    let ia = DMatrix::<Complex64>::identity(na, na);
    let ib = DMatrix::<Complex64>::identity(nb, nb);
    let mut acc = DMatrix::<Complex64>::zeros(na * nb, na * nb);
    let n = contour.nodes.max(4);
    for j in 0..n {
        // clockwise: λ = c + ρ e^{−iθ}, dλ = −iρ e^{−iθ} dθ
        let e = Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64);
        let lam = contour.center + contour.radius * e;
        let ra = (a + &ia * lam).try_inverse().ok_or(Error::ContourThroughSpectrum { distance: 0.0 })?;
        let rb = (b - &ib * lam).try_inverse().ok_or(Error::ContourThroughSpectrum { distance: 0.0 })?;
        let dl = Complex64::new(0.0, -contour.radius) * e * (2.0 * PI / n as f64);
        acc += ra.kronecker(&rb) * dl;
    }
    Ok(acc / Complex64::new(0.0, 2.0 * PI))
}

/// `(A⊗1 + 1⊗B)⁻¹` by a dense solve, for comparison.
pub fn direct_tensor_inverse(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let ia = DMatrix::<Complex64>::identity(a.nrows(), a.nrows());
    let ib = DMatrix::<Complex64>::identity(b.nrows(), b.nrows());
    (a.kronecker(&ib) + ia.kronecker(b)).try_inverse()
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

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scalar_and_identity_oracles() {
        let a = DMatrix::from_element(1, 1, c(1.0));
        let b = DMatrix::from_element(1, 1, c(2.0));
        let ct = CircleContour { center: c(2.0), radius: 1.0, nodes: 64 };
        let inv = finite_tensor_inverse_oracle(&a, &b, &ct).unwrap();
        assert!((inv[(0, 0)] - 1.0 / 3.0).norm() < 1e-14);
        let i2 = DMatrix::<Complex64>::identity(2, 2);
        let ct = CircleContour::separating(&i2, &i2, 64).unwrap();
        let inv = finite_tensor_inverse_oracle(&i2, &i2, &ct).unwrap();
        let want = DMatrix::<Complex64>::identity(4, 4) * c(0.5);
        assert!((inv - want).norm() < 1e-13);
    }

    #[test]
    fn contour_must_separate() {
        let a = DMatrix::from_element(1, 1, c(-2.0));
        let b = DMatrix::from_element(1, 1, c(2.0));
        let ct = CircleContour { center: c(2.0), radius: 0.5, nodes: 64 };
        assert_eq!(finite_tensor_inverse_oracle(&a, &b, &ct), Err(Error::ContourSeparation));
        let ct = CircleContour { center: c(2.0), radius: 1e-5, nodes: 64 };
        assert!(matches!(
            finite_tensor_inverse_oracle(&DMatrix::from_element(1, 1, c(-2.0 - 1e-5)), &b, &ct),
            Err(Error::ContourThroughSpectrum { .. })
        ));
    }

    #[test]
    fn zero_source_gives_zero() {
        let m = map(0.0);
        let req = ResolventRequest::sample(Complex64::new(1.0, 0.3), 0, 4, (0.3, 0.6), 50, 16, |_, _| ZERO);
        let res = resolvent_apply(&m, &req).unwrap();
        assert!(res.u.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn source_outside_support_is_rejected() {
        let m = map(0.0);
        let mut req = ResolventRequest::sample(Complex64::new(1.0, 0.3), 0, 4, (0.3, 0.6), 50, 16, |_, _| c(1.0));
        req.support = (0.35, 0.6);
        assert!(matches!(resolvent_apply(&m, &req), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn non_rotating_mode_sum_is_a_legendre_decomposition() {
        let m = map(0.0);
        let omega = Complex64::new(1.3, 0.4);
        let (lo, hi) = (0.3, 0.65);
        let src = |r: f64, mu: f64| c(bump(r, lo, hi) * (1.0 + mu - 2.0 * mu * mu * mu));
        let req = ResolventRequest::sample(omega, 0, 6, (lo, hi), 200, 16, src);
        let res = resolvent_apply(&m, &req).unwrap();
        for (l, lam) in &res.branches {
            assert!((lam - c((l * (l + 1)) as f64)).norm() < 1e-9);
        }
        // direct route: project on P̄_l, solve each radial problem
        let (mu, w) = gauss_legendre(16);
        let x: Vec<f64> = req.r.iter().map(|&r| m.x_of_r(r)).collect();
        let mut u = DMatrix::<Complex64>::zeros(req.r.len(), 16);
        for l in 0..4usize {
            let pl: Vec<f64> = mu.iter().map(|&t| legendre_basis(0, 4, t).0[l]).collect();
            let fl: Vec<Complex64> = (0..req.r.len())
                .map(|i| {
                    (0..16).map(|j| w[j] * pl[j] * req.f[(i, j)]).sum::<Complex64>() * m.params.delta_r(req.r[i]).0
                })
                .collect();
            let ul =
                crate::radial::radial_green(&m, Spectral::new(omega, c((l * (l + 1)) as f64), 0), &fl, &x).unwrap();
            for i in 0..req.r.len() {
                for j in 0..16 {
                    u[(i, j)] += ul[i] * pl[j];
                }
            }
        }
        assert!((u - &res.u).norm() < 1e-8 * res.u.norm());
        assert!(res.residual < 1e-5, "{}", res.residual);
    }

    #[test]
    fn rotating_resolvent_residual() {
        let m = map(0.01);
        let (lo, hi) = (0.3, 0.65);
        let src = |r: f64, mu: f64| c(bump(r, lo, hi) * (1.0 - mu * mu).sqrt() * (0.5 + mu - mu * mu));
        let req = ResolventRequest::sample(Complex64::new(2.1, 0.2), 1, 10, (lo, hi), 300, 24, src);
        let res = resolvent_apply(&m, &req).unwrap();
        assert!(res.residual < 1e-5, "{}", res.residual);
    }

    #[test]
    fn zero_residue_two_routes_and_two_rays() {
        let m = map(0.01);
        let z = zero_residue(&m, &ZeroResidueOptions::default()).unwrap();
        assert!((z.direct - z.target).norm() < 1e-3 * z.target.norm());
        assert!((z.lambda_r_slope - z.slope_target).norm() < 1e-4 * z.slope_target.norm());
        assert!((z.s_theta0 + 1.0 / (4.0 * PI)).abs() < 1e-6);
        let other = zero_residue(&m, &ZeroResidueOptions { angle: 0.75 * PI, ..Default::default() }).unwrap();
        assert!((other.direct - z.direct).norm() < 1e-3 * z.direct.norm());
    }
}
