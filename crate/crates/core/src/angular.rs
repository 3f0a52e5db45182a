//! Eigenvalues `λ_{k,l}(ω)` of the angular operator
//! `P_θ(ω) = (1/sinθ) D_θ(Δ_θ sinθ D_θ) + (1+α)²(aω sin²θ − k)²/(Δ_θ sin²θ)`
//! restricted to azimuthal number `k` (plus `m²a²cos²θ` for a massive field).
//!
//! The operator is discretized by Galerkin projection onto orthonormal
//! associated Legendre functions `P̄_l^{|k|}(cosθ)`, `l = |k|, |k|+1, ...`,
//! which diagonalize the non-rotating case. All coefficients are even in
//! `μ = cosθ`, so the matrix splits into blocks of even and odd `l − |k|`.

use crate::error::{Error, Result};
use crate::metric::BlackHoleParams;
use crate::numerics::quad::gauss_legendre;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// One eigenvalue branch of `P_θ(ω)` at fixed `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularBranch {
    pub k: i32,
    pub l: usize,
    pub omega: Complex64,
    pub lambda: Complex64,
    /// Coefficients in the basis `P̄_{|k|+i}^{|k|}`, `i = 0..N`, normalized so
    /// that `Σ c_i² = 1` (bilinear, no conjugation).
    pub coeffs: DVector<Complex64>,
    /// `‖(M − λ)c‖ / ‖c‖` for the Galerkin matrix `M`.
    pub residual: f64,
    pub basis_size: usize,
    /// Whether the branch lies in the lower half of the computed spectrum,
    /// where the Galerkin truncation is resolved.
    pub converged: bool,
}

/// Default basis size `2(|k| + 20 + ⌈4|aω|⌉)`.
pub fn default_basis_size(params: &BlackHoleParams, omega: Complex64, k: i32) -> usize {
    2 * (k.unsigned_abs() as usize + 20 + (4.0 * (params.a * omega).norm()).ceil() as usize)
}

/// Values, first and second `μ`-derivatives of `P̄_l^m(μ)` for
/// `l = m..m+n`. Requires `|μ| < 1` for the derivatives.
pub fn legendre_basis(m: usize, n: usize, mu: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let s2 = 1.0 - mu * mu;
    let mut p = vec![0.0; n];
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for i in 1..=m {
        let fi = i as f64;
        pmm *= ((2.0 * fi + 1.0) / (2.0 * fi)).sqrt();
    }
    pmm *= s2.powf(0.5 * m as f64);
    if n > 0 {
        p[0] = pmm;
    }
    if n > 1 {
        p[1] = (2.0 * m as f64 + 3.0).sqrt() * mu * pmm;
    }
    let mf = m as f64;
    let coef = |l: f64| ((4.0 * l * l - 1.0) / (l * l - mf * mf)).sqrt();
    for i in 2..n {
        let l = (m + i) as f64;
        p[i] = coef(l) * (mu * p[i - 1] - p[i - 2] / coef(l - 1.0));
    }
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let l = (m + i) as f64;
        let prev = if i > 0 { ((2.0 * l + 1.0) * (l * l - mf * mf) / (2.0 * l - 1.0)).sqrt() * p[i - 1] } else { 0.0 };
        d1[i] = (-l * mu * p[i] + prev) / s2;
        d2[i] = (2.0 * mu * d1[i] - (l * (l + 1.0) - mf * mf / s2) * p[i]) / s2;
    }
    (p, d1, d2)
}

/// Precomputed Galerkin pieces for fixed `(params, k, N)`; the matrix at any
/// `ω` is a linear combination of them.
#[derive(Debug, Clone)]
pub struct AngularBasis {
    pub k: i32,
    pub n: usize,
    alpha: f64,
    a: f64,
    m_field: f64,
    stiffness: DMatrix<f64>,
    s_spin2: DMatrix<f64>,
    s_cross: DMatrix<f64>,
    s_axial: DMatrix<f64>,
    s_mass: DMatrix<f64>,
}

impl AngularBasis {
    pub fn new(params: &BlackHoleParams, k: i32, n: usize) -> Result<Self> {
        let m = k.unsigned_abs() as usize;
        if n < m + 4 {
            return Err(Error::InvalidParameter(format!("basis size {n} must be at least |k|+4 = {}", m + 4)));
        }
        let (nodes, weights) = gauss_legendre(m + n + 30);
        let alpha = params.alpha;
        let mut stiffness = DMatrix::zeros(n, n);
        let mut s_spin2 = DMatrix::zeros(n, n);
        let mut s_cross = DMatrix::zeros(n, n);
        let mut s_axial = DMatrix::zeros(n, n);
        let mut s_mass = DMatrix::zeros(n, n);
        for (&mu, &w) in nodes.iter().zip(&weights) {
            let (p, d, _) = legendre_basis(m, n, mu);
            let s2 = 1.0 - mu * mu;
            let dt = 1.0 + alpha * mu * mu;
            for i in 0..n {
                for j in (i % 2..=i).step_by(2) {
                    if (i + j) % 2 == 1 {
                        continue;
                    }
                    let pp = w * p[i] * p[j];
                    stiffness[(i, j)] += w * dt * s2 * d[i] * d[j];
                    s_spin2[(i, j)] += pp * s2 / dt;
                    s_cross[(i, j)] += pp / dt;
                    s_axial[(i, j)] += pp / (dt * s2);
                    s_mass[(i, j)] += pp * mu * mu;
                }
            }
        }
        for mat in [&mut stiffness, &mut s_spin2, &mut s_cross, &mut s_axial, &mut s_mass] {
            mat.fill_upper_triangle_with_lower_triangle();
        }
        Ok(AngularBasis {
            k,
            n,
            alpha,
            a: params.a,
            m_field: params.m_field,
            stiffness,
            s_spin2,
            s_cross,
            s_axial,
            s_mass,
        })
    }

    /// Galerkin matrix of `P_θ(ω)` on the full basis.
    pub fn matrix(&self, omega: Complex64) -> DMatrix<Complex64> {
        let opa2 = (1.0 + self.alpha).powi(2);
        let aw = self.a * omega;
        let kf = self.k as f64;
        let c_spin2 = opa2 * aw * aw;
        let c_cross = -2.0 * opa2 * kf * aw;
        let c_axial = opa2 * kf * kf;
        let c_mass = (self.m_field * self.a).powi(2);
        DMatrix::from_fn(self.n, self.n, |i, j| {
            Complex64::new(self.stiffness[(i, j)] + c_axial * self.s_axial[(i, j)] + c_mass * self.s_mass[(i, j)], 0.0)
                + c_spin2 * self.s_spin2[(i, j)]
                + c_cross * self.s_cross[(i, j)]
        })
    }

    /// All eigen-branches at `ω`, sorted by label `l`.
    pub fn eigs(&self, omega: Complex64) -> Vec<AngularBranch> {
        let full = self.matrix(omega);
        let m = self.k.unsigned_abs() as usize;
        let mut out = Vec::with_capacity(self.n);
        for parity in 0..2 {
            let idx: Vec<usize> = (parity..self.n).step_by(2).collect();
            let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| full[(idx[i], idx[j])]);
            let mut vals = block_eigenvalues(&block);
            vals.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            for (pos, &lam) in vals.iter().enumerate() {
                let v = inverse_iteration(&block, lam);
                let mut coeffs = DVector::zeros(self.n);
                for (bi, &fi) in idx.iter().enumerate() {
                    coeffs[fi] = v[bi];
                }
                let residual = (&full * &coeffs - &coeffs * lam).norm() / coeffs.norm();
                let l = m + parity + 2 * pos;
                out.push(AngularBranch {
                    k: self.k,
                    l,
                    omega,
                    lambda: lam,
                    coeffs,
                    residual,
                    basis_size: self.n,
                    converged: l - m < self.n / 2,
                });
            }
        }
        out.sort_by_key(|b| b.l);
        out
    }
}

fn block_eigenvalues(block: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = block.nrows();
    if n == 0 {
        return Vec::new();
    }
    let (_, t) = block.clone().schur().unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Eigenvector of `m` for the eigenvalue `lam`, normalized to `vᵀv = 1`
/// (falling back to `‖v‖ = 1` when the bilinear norm vanishes).
fn inverse_iteration(m: &DMatrix<Complex64>, lam: Complex64) -> DVector<Complex64> {
    let n = m.nrows();
    let shift = lam + Complex64::new(1.0, 0.7) * 1e-11 * lam.norm().max(1.0);
    let lu = (m - DMatrix::<Complex64>::identity(n, n) * shift).lu();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0, 0.1 * i as f64));
    for _ in 0..3 {
        if let Some(next) = lu.solve(&v) {
            let nrm = next.norm();
            if nrm.is_finite() && nrm > 0.0 {
                v = next / Complex64::new(nrm, 0.0);
            }
        }
    }
    let bil: Complex64 = v.iter().map(|z| z * z).sum();
    if bil.norm() > 1e-12 {
        v /= bil.sqrt();
    }
    v
}

/// Galerkin matrix of `P_θ(ω)` restricted to `k`, of size `N × N`.
pub fn angular_matrix(params: &BlackHoleParams, omega: Complex64, k: i32, n: usize) -> Result<DMatrix<Complex64>> {
    Ok(AngularBasis::new(params, k, n)?.matrix(omega))
}

/// All eigenvalues of the `N × N` Galerkin matrix, sorted by label.
pub fn angular_eigs(params: &BlackHoleParams, omega: Complex64, k: i32, n: usize) -> Result<Vec<AngularBranch>> {
    Ok(AngularBasis::new(params, k, n)?.eigs(omega))
}

/// The branch `λ_{k,l}(ω)` with a doubling check on the basis size.
pub fn branch(params: &BlackHoleParams, omega: Complex64, k: i32, l: usize, n: Option<usize>) -> Result<AngularBranch> {
    let m = k.unsigned_abs() as usize;
    if l < m {
        return Err(Error::InvalidParameter(format!("branch l={l} requires l >= |k| = {m}")));
    }
    let mut n = n.unwrap_or_else(|| default_basis_size(params, omega, k));
    // the requested branch must sit in the converged half
    while l - m >= n / 2 {
        n *= 2;
    }
    let coarse = AngularBasis::new(params, k, n)?.eigs(omega);
    let fine = AngularBasis::new(params, k, 2 * n)?.eigs(omega);
    let b = coarse.into_iter().find(|b| b.l == l).expect("branch present in converged half");
    let f = fine.iter().find(|b| b.l == l).expect("branch present in doubled basis");
    let shift = (b.lambda - f.lambda).norm();
    if shift > 1e-8 * b.lambda.norm().max(1.0) {
        return Err(Error::BasisTooSmall { n, l, shift });
    }
    Ok(b)
}

/// Result of following one branch along a path in `ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedBranch {
    pub points: Vec<(Complex64, Complex64)>,
    /// Closest approach to another eigenvalue of the same parity when it fell
    /// below `10⁻⁶`, with the frequency where it happened.
    pub collision: Option<(Complex64, f64)>,
}

impl TrackedBranch {
    /// The collision flag as an error value, for callers that refuse
    /// degenerate branches.
    pub fn collision_error(&self) -> Option<Error> {
        self.collision.map(|(w, sep)| Error::BranchCollision { lambda: format!("{w}"), separation: sep })
    }
}

/// Continue `λ_{k,l}` along the polyline `path` by nearest-eigenvalue
/// matching, bisecting a step whenever the match is ambiguous.
pub fn track_branch(
    params: &BlackHoleParams,
    k: i32,
    l: usize,
    path: &[Complex64],
    n: Option<usize>,
) -> Result<TrackedBranch> {
    if path.is_empty() {
        return Ok(TrackedBranch { points: Vec::new(), collision: None });
    }
    let m = k.unsigned_abs() as usize;
    if l < m {
        return Err(Error::InvalidParameter(format!("branch l={l} requires l >= |k| = {m}")));
    }
    let n_basis = n.unwrap_or_else(|| path.iter().map(|&w| default_basis_size(params, w, k)).max().unwrap_or(40));
    let n_basis = n_basis.max(2 * (l - m + 1) + 2);
    let basis = AngularBasis::new(params, k, n_basis)?;
    let parity = (l - m) % 2;
    let same_parity = |w: Complex64| -> Vec<Complex64> {
        basis.eigs(w).into_iter().filter(|b| (b.l - m) % 2 == parity).map(|b| b.lambda).collect()
    };
    let start = basis.eigs(path[0]).into_iter().find(|b| b.l == l).expect("branch inside basis").lambda;
    let mut out = TrackedBranch { points: vec![(path[0], start)], collision: None };
    let mut current = start;
    let note_collision = |vals: &[Complex64], lam: Complex64, w: Complex64, out: &mut TrackedBranch| {
        let sep = vals.iter().filter(|&&v| v != lam).map(|v| (v - lam).norm()).fold(f64::INFINITY, f64::min);
        if sep < 1e-6 && out.collision.is_none_or(|(_, s)| sep < s) {
            out.collision = Some((w, sep));
        }
    };
    note_collision(&same_parity(path[0]), start, path[0], &mut out);
    for seg in path.windows(2) {
        let (w0, w1) = (seg[0], seg[1]);
        let mut t = 0.0_f64;
        let mut dt = 1.0_f64;
        while t < 1.0 {
            let step = dt.min(1.0 - t);
            let w = w0 + (w1 - w0) * (t + step);
            let vals = same_parity(w);
            let mut dists: Vec<(f64, Complex64)> = vals.iter().map(|&v| ((v - current).norm(), v)).collect();
            dists.sort_by(|x, y| x.0.total_cmp(&y.0));
            let ambiguous = dists.len() > 1 && dists[0].0 > 0.3 * dists[1].0;
            if ambiguous && step > 1e-6 {
                dt = step / 2.0;
                continue;
            }
            current = dists[0].1;
            note_collision(&vals, current, w, &mut out);
            t += step;
            dt = (2.0 * step).min(1.0);
        }
        out.points.push((w1, current));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64) -> BlackHoleParams {
        BlackHoleParams::new(0.1, 3.0, a, 0.0).unwrap()
    }

    #[test]
    fn basis_is_orthonormal() {
        let (x, w) = gauss_legendre(80);
        for m in [0usize, 1, 3] {
            let vals: Vec<Vec<f64>> = x.iter().map(|&mu| legendre_basis(m, 12, mu).0).collect();
            for i in 0..12 {
                for j in 0..12 {
                    let g: f64 = vals.iter().zip(&w).map(|(v, w)| w * v[i] * v[j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-13, "m={m} i={i} j={j} {g}");
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (mu, h) = (0.3, 1e-5);
        let (_, d1, d2) = legendre_basis(2, 8, mu);
        let (pp, dp, _) = legendre_basis(2, 8, mu + h);
        let (pm, dm, _) = legendre_basis(2, 8, mu - h);
        for i in 0..8 {
            assert!((d1[i] - (pp[i] - pm[i]) / (2.0 * h)).abs() < 1e-7);
            assert!((d2[i] - (dp[i] - dm[i]) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn nonrotating_matrix_is_diagonal() {
        let p = params(0.0);
        let m = angular_matrix(&p, Complex64::new(1.3, -0.4), 2, 30).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                let l = (2 + i) as f64;
                let want = if i == j { l * (l + 1.0) } else { 0.0 };
                assert!((m[(i, j)] - want).norm() < 1e-12 * (1.0 + want), "{i},{j}: {}", m[(i, j)]);
            }
        }
    }

    #[test]
    fn hermitian_for_real_frequency() {
        let p = params(0.01);
        let m = angular_matrix(&p, Complex64::new(2.7, 0.0), 3, 40).unwrap();
        assert!((&m - m.adjoint()).norm() < 1e-12 * m.norm());
    }

    #[test]
    fn anti_hermitian_bound() {
        let p = params(0.01);
        let w = Complex64::new(0.0, 1.0);
        for k in [-2, 0, 3] {
            let m = angular_matrix(&p, w, k, 40).unwrap();
            let im = (&m - m.adjoint()) * Complex64::new(0.0, -0.5);
            let op_norm = im.singular_values().max();
            let bound = 2.0 * (1.0 + p.alpha).powi(2) * (p.a * w.im).abs() * ((p.a * w).norm() + k.abs() as f64);
            assert!(op_norm <= bound + 1e-14, "k={k}: {op_norm} > {bound}");
        }
    }

    #[test]
    fn nonrotating_spectrum() {
        let p = params(0.0);
        let eigs = angular_eigs(&p, Complex64::new(0.5, -0.2), 2, 40).unwrap();
        for b in eigs.iter().filter(|b| b.converged) {
            let l = b.l as f64;
            assert!((b.lambda - l * (l + 1.0)).norm() < 1e-9);
            assert!(b.residual < 1e-9);
        }
        assert_eq!(eigs[0].l, 2);
        assert!((eigs[0].lambda.re - 6.0).abs() < 1e-9);
    }

    #[test]
    fn lowest_axisymmetric_branch_vanishes_at_zero_frequency() {
        let p = params(0.01);
        let b = branch(&p, Complex64::new(0.0, 0.0), 0, 0, None).unwrap();
        assert!(b.lambda.norm() < 1e-12);
        let b = branch(&p, Complex64::new(0.1, 0.0), 0, 0, None).unwrap();
        assert!(b.lambda.norm() < 1e-3 * 0.01 && b.lambda.im.abs() < 1e-12);
    }

    #[test]
    fn tracking_constant_and_nonrotating_paths() {
        let p = params(0.0);
        let path = [Complex64::new(0.1, 0.0), Complex64::new(2.0, -1.0), Complex64::new(-1.0, 0.5)];
        let t = track_branch(&p, 1, 3, &path, None).unwrap();
        assert!(t.points.iter().all(|(_, l)| (l - 12.0).norm() < 1e-9));
        let p = params(0.01);
        let w0 = Complex64::new(1.0, -0.3);
        let t = track_branch(&p, 1, 2, &[w0, w0, w0], None).unwrap();
        assert!(t.points.windows(2).all(|q| q[0].1 == q[1].1));
    }
}
