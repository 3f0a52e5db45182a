//! Location of quasi-normal modes as zeros of the mode determinant
//! `D(ω) = W(ω, λ_{k,l}(ω), k)`, plus seed generation and the trapping
//! classification of the rescaled radial potential.

use crate::angular::{default_basis_size, AngularBasis};
use crate::coords::TortoiseMap;
use crate::error::{Error, Result};
use crate::metric::BlackHoleParams;
use crate::radial::{wronskian, Spectral, WronskianValue};
use num_complex::Complex64;

/// Axis-aligned rectangle in the complex `ω` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Result<Self> {
        let ok = [re_lo, re_hi, im_lo, im_hi].iter().all(|v| v.is_finite()) && re_lo < re_hi && im_lo < im_hi;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "box needs re_lo < re_hi and im_lo < im_hi, got [{re_lo}, {re_hi}] x [{im_lo}, {im_hi}]"
            )));
        }
        Ok(Rect { re: (re_lo, re_hi), im: (im_lo, im_hi) })
    }

    /// Square of half-width `h` centred at `c`.
    pub fn around(c: Complex64, h: f64) -> Self {
        Rect { re: (c.re - h, c.re + h), im: (c.im - h, c.im + h) }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re.0 + self.re.1), 0.5 * (self.im.0 + self.im.1))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }

    /// The rectangle scaled by `factor` about its centre.
    pub fn inflate(&self, factor: f64) -> Self {
        let c = self.center();
        let hw = 0.5 * factor * (self.re.1 - self.re.0);
        let hh = 0.5 * factor * (self.im.1 - self.im.0);
        Rect { re: (c.re - hw, c.re + hw), im: (c.im - hh, c.im + hh) }
    }

    fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.re.0 + fx * (self.re.1 - self.re.0);
        let ym = self.im.0 + fy * (self.im.1 - self.im.0);
        [
            Rect { re: (self.re.0, xm), im: (self.im.0, ym) },
            Rect { re: (xm, self.re.1), im: (self.im.0, ym) },
            Rect { re: (self.re.0, xm), im: (ym, self.im.1) },
            Rect { re: (xm, self.re.1), im: (ym, self.im.1) },
        ]
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re.0, self.im.0),
            Complex64::new(self.re.1, self.im.0),
            Complex64::new(self.re.1, self.im.1),
            Complex64::new(self.re.0, self.im.1),
        ]
    }

    fn perimeter(&self) -> f64 {
        2.0 * ((self.re.1 - self.re.0) + (self.im.1 - self.im.0))
    }
}

/// One evaluation of the mode determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantValue {
    pub omega: Complex64,
    pub lambda: Complex64,
    pub wronskian: WronskianValue,
    /// `W / (|u_+||u_-|)` at `x = 0`: same argument as `W`, tamed modulus.
    pub d: Complex64,
}

/// The determinant `D(ω)` for a fixed mode `(k, l)`, caching the angular
/// Galerkin data.
#[derive(Debug, Clone)]
pub struct ModeDeterminant<'a> {
    pub map: &'a TortoiseMap,
    pub k: i32,
    pub l: usize,
    coarse: AngularBasis,
    fine: AngularBasis,
}

impl<'a> ModeDeterminant<'a> {
    /// Prepare the determinant for frequencies with `|ω| ≤ omega_bound`.
    pub fn new(map: &'a TortoiseMap, k: i32, l: usize, omega_bound: f64) -> Result<Self> {
        let m = k.unsigned_abs() as usize;
        if l < m {
            return Err(Error::InvalidParameter(format!("mode l={l} requires l >= |k| = {m}")));
        }
        let mut n = default_basis_size(&map.params, Complex64::new(omega_bound, 0.0), k);
        while l - m >= n / 2 {
            n *= 2;
        }
        Ok(ModeDeterminant {
            map,
            k,
            l,
            coarse: AngularBasis::new(&map.params, k, n)?,
            fine: AngularBasis::new(&map.params, k, 2 * n)?,
        })
    }

    /// `λ_{k,l}(ω)` with the basis-doubling check.
    pub fn lambda(&self, omega: Complex64) -> Result<Complex64> {
        let pick = |basis: &AngularBasis| {
            basis.eigs(omega).into_iter().find(|b| b.l == self.l).map(|b| b.lambda).expect("branch in basis")
        };
        let lc = pick(&self.coarse);
        let lf = pick(&self.fine);
        let shift = (lc - lf).norm();
        if shift > 1e-8 * lc.norm().max(1.0) {
            return Err(Error::BasisTooSmall { n: self.coarse.n, l: self.l, shift });
        }
        Ok(lc)
    }

    pub fn eval(&self, omega: Complex64) -> Result<DeterminantValue> {
        let lambda = self.lambda(omega)?;
        let wv = wronskian(self.map, Spectral::new(omega, lambda, self.k))?;
        let norm = wv.normalization();
        let d = if norm > 0.0 { wv.w / norm } else { wv.w };
        Ok(DeterminantValue { omega, lambda, wronskian: wv, d })
    }

    /// `W(ω)` divided by a fixed positive constant, holomorphic in `ω`.
    fn frozen(&self, omega: Complex64, norm: f64) -> Result<Complex64> {
        let lambda = self.lambda(omega)?;
        Ok(wronskian(self.map, Spectral::new(omega, lambda, self.k))?.w / norm)
    }
}

/// Evaluate `D(ω)` for mode `(k, l)`.
pub fn mode_determinant(map: &TortoiseMap, omega: Complex64, k: i32, l: usize) -> Result<DeterminantValue> {
    ModeDeterminant::new(map, k, l, omega.norm())?.eval(omega)
}

/// A located quasi-normal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub k: i32,
    pub l: usize,
    pub omega: Complex64,
    pub lambda: Complex64,
    /// `|D(ω)| / max |D|` on a circle of radius `10⁻³` around `ω`.
    pub residual: f64,
    pub newton_iters: usize,
    pub multiplicity_estimate: Option<i64>,
    pub provenance: String,
    /// Other modes `(k, l)` with a zero at the same frequency.
    pub shared_with: Vec<(i32, usize)>,
}

impl Resonance {
    pub fn in_upper_half_plane(&self) -> bool {
        self.omega.im > 0.0
    }
}

/// Secant iteration on a holomorphic function, confined to `bounds`.
/// Returns the root and the number of iterations used.
pub fn secant_root<F>(mut f: F, seed: Complex64, tol: f64, bounds: Rect) -> Result<(Complex64, usize)>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    const MAX_ITERS: usize = 30;
    let step0 = 1e-3 * seed.norm().max(1.0);
    let mut x0 = seed;
    let mut x1 = seed + Complex64::new(step0, 0.5 * step0);
    let mut f0 = f(x0)?;
    let mut f1 = f(x1)?;
    for it in 1..=MAX_ITERS {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            if f1.norm() == 0.0 {
                return Ok((x1, it));
            }
            return Err(Error::NoConvergence { iterations: it });
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        if !x2.re.is_finite() || !x2.im.is_finite() || !bounds.contains(x2) {
            return Err(Error::EscapedBox { omega: format!("{x2}") });
        }
        let step = (x2 - x1).norm();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        if step < tol {
            return Ok((x1, it));
        }
        f1 = f(x1)?;
    }
    Err(Error::NoConvergence { iterations: MAX_ITERS })
}

/// Ratio `|f(z)| / max_{|ζ−z|=r} |f(ζ)|` over eight points on the circle.
pub fn circle_residual<F>(mut f: F, z: Complex64, radius: f64) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let centre = f(z)?.norm();
    let mut ring: f64 = 0.0;
    for j in 0..8 {
        let t = std::f64::consts::PI * j as f64 / 4.0;
        ring = ring.max(f(z + radius * Complex64::from_polar(1.0, t))?.norm());
    }
    Ok(if ring > 0.0 { centre / ring } else { f64::INFINITY })
}

/// Radius of the residual circle.
pub const RESIDUAL_RADIUS: f64 = 1e-3;
/// Largest accepted residual.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

/// Polish a resonance of mode `(k, l)` starting from `seed`; the iterate must
/// stay within twice the seed box (half-width `box_half_width`).
pub fn refine(
    map: &TortoiseMap,
    seed: Complex64,
    k: i32,
    l: usize,
    tol: f64,
    box_half_width: Option<f64>,
) -> Result<Resonance> {
    let hw = box_half_width.unwrap_or(0.25 * (1.0 + seed.norm()));
    let bounds = Rect::around(seed, hw).inflate(2.0);
    let bound = seed.norm() + 2.0 * hw;
    let det = ModeDeterminant::new(map, k, l, bound)?;
    let n_seed = det.eval(seed)?.wronskian.normalization().max(f64::MIN_POSITIVE);
    let (root, iters) = secant_root(|w| det.frozen(w, n_seed), seed, tol, bounds)?;
    finish(&det, root, iters, format!("seed {seed}"))
}

fn finish(det: &ModeDeterminant<'_>, root: Complex64, iters: usize, provenance: String) -> Result<Resonance> {
    let at = det.eval(root)?;
    let n_root = at.wronskian.normalization().max(f64::MIN_POSITIVE);
    let residual = circle_residual(|w| det.frozen(w, n_root), root, RESIDUAL_RADIUS)?;
    if !(residual < RESIDUAL_LIMIT) {
        return Err(Error::NoConvergence { iterations: iters });
    }
    Ok(Resonance {
        k: det.k,
        l: det.l,
        omega: root,
        lambda: at.lambda,
        residual,
        newton_iters: iters,
        multiplicity_estimate: None,
        provenance,
        shared_with: Vec::new(),
    })
}

/// Maximum bisection depth of a contour segment.
const MAX_SEGMENT_DEPTH: usize = 12;
/// Largest phase change accepted between neighbouring contour samples.
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_4;

/// Winding number of `f` around the counter-clockwise boundary of `rect`,
/// by phase accumulation on `n_contour` initial samples with adaptive
/// bisection of segments whose phase jump is large.
pub fn winding_number<F>(mut f: F, rect: &Rect, n_contour: usize) -> Result<i64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let corners = rect.corners();
    let perim = rect.perimeter();
    let n_total = n_contour.max(8);
    let mut nodes = Vec::with_capacity(n_total + 4);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let len = (b - a).norm();
        let m = ((n_total as f64 * len / perim).ceil() as usize).max(2);
        for j in 0..m {
            nodes.push(a + (b - a) * (j as f64 / m as f64));
        }
    }
    nodes.push(corners[0]);
    let values: Vec<Complex64> = nodes.iter().map(|&z| f(z)).collect::<Result<_>>()?;
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut total = 0.0;
    for i in 0..nodes.len() - 1 {
        total += segment_phase(&mut f, nodes[i], nodes[i + 1], values[i], values[i + 1], scale, 0)?;
    }
    let winding = total / (2.0 * std::f64::consts::PI);
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.1 {
        return Err(Error::BoundaryTooClose { omega: format!("{}", rect.center()), value: (winding - rounded).abs() });
    }
    Ok(rounded as i64)
}

fn segment_phase<F>(
    f: &mut F,
    za: Complex64,
    zb: Complex64,
    fa: Complex64,
    fb: Complex64,
    scale: f64,
    depth: usize,
) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let small = 1e-12 * scale;
    if fa.norm() <= small || fb.norm() <= small {
        let (z, v) = if fa.norm() <= fb.norm() { (za, fa) } else { (zb, fb) };
        return Err(Error::BoundaryTooClose { omega: format!("{z}"), value: v.norm() / scale.max(f64::MIN_POSITIVE) });
    }
    let dphi = (fb / fa).arg();
    if dphi.abs() <= MAX_PHASE_STEP {
        return Ok(dphi);
    }
    if depth >= MAX_SEGMENT_DEPTH {
        let v = fa.norm().min(fb.norm());
        return Err(Error::BoundaryTooClose {
            omega: format!("{}", 0.5 * (za + zb)),
            value: v / scale.max(f64::MIN_POSITIVE),
        });
    }
    let zm = 0.5 * (za + zb);
    let fm = f(zm)?;
    Ok(segment_phase(f, za, zm, fa, fm, scale, depth + 1)? + segment_phase(f, zm, zb, fm, fb, scale, depth + 1)?)
}

/// Number of resonances of mode `(k, l)` inside `rect` (argument principle).
pub fn count_zeros_box(map: &TortoiseMap, rect: &Rect, k: i32, l: usize, n_contour: usize) -> Result<i64> {
    let bound = rect.corners().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let det = ModeDeterminant::new(map, k, l, bound)?;
    winding_number(|w| Ok(det.eval(w)?.d), rect, n_contour)
}

/// Settings of a box scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Initial cells along the real and imaginary axes.
    pub grid: (usize, usize),
    pub n_contour: usize,
    pub max_depth: usize,
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { grid: (4, 2), n_contour: 64, max_depth: 12, tol: 1e-10 }
    }
}

/// Outcome of a scan: located resonances and the cells that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub resonances: Vec<Resonance>,
    /// `(k, l, cell, error)` for every cell that could not be resolved.
    pub failures: Vec<(i32, usize, Rect, Error)>,
    /// Total winding number per mode, summed over the initial cells.
    pub counts: Vec<(i32, usize, i64)>,
}

struct CellResult {
    resonances: Vec<Resonance>,
    failures: Vec<(Rect, Error)>,
    count: i64,
}

fn process_cell(det: &ModeDeterminant<'_>, cell: Rect, opts: &ScanOptions, depth: usize) -> CellResult {
    let winding = |r: &Rect| winding_number(|w| Ok(det.eval(w)?.d), r, opts.n_contour);
    let count = match winding(&cell) {
        Ok(c) => c,
        Err(e) => return CellResult { resonances: Vec::new(), failures: vec![(cell, e)], count: 0 },
    };
    process_counted(det, cell, count, opts, depth)
}

fn process_counted(det: &ModeDeterminant<'_>, cell: Rect, count: i64, opts: &ScanOptions, depth: usize) -> CellResult {
    let mut out = CellResult { resonances: Vec::new(), failures: Vec::new(), count };
    if count == 0 {
        return out;
    }
    if count < 0 {
        out.failures.push((cell, Error::BoundaryTooClose { omega: format!("{}", cell.center()), value: count as f64 }));
        return out;
    }
    if count == 1 {
        let seed = cell.center();
        let hw = 0.5 * (cell.re.1 - cell.re.0).max(cell.im.1 - cell.im.0);
        let n_seed = det.eval(seed).map(|v| v.wronskian.normalization().max(f64::MIN_POSITIVE));
        let attempt = n_seed.and_then(|n| {
            let (root, iters) = secant_root(|w| det.frozen(w, n), seed, opts.tol, Rect::around(seed, hw).inflate(2.0))?;
            finish(det, root, iters, "box scan".to_string())
        });
        match attempt {
            Ok(mut res) if cell.inflate(1.0 + 1e-9).contains(res.omega) => {
                res.multiplicity_estimate = Some(1);
                out.resonances.push(res);
                return out;
            }
            Ok(_) | Err(_) if depth < opts.max_depth => {}
            Ok(res) => {
                out.failures.push((cell, Error::EscapedBox { omega: format!("{}", res.omega) }));
                return out;
            }
            Err(e) => {
                out.failures.push((cell, e));
                return out;
            }
        }
    } else if depth >= opts.max_depth {
        // unresolved cluster: report the multiplicity through the failure list
        out.failures.push((cell, Error::NoConvergence { iterations: depth }));
        return out;
    }
    // off-centre splits avoid placing edges on symmetry lines of the problem
    for (fx, fy) in [(0.4871, 0.5137), (0.4419, 0.5563)] {
        let children = cell.split(fx, fy);
        let counts: Result<Vec<i64>> =
            children.iter().map(|c| winding_number(|w| Ok(det.eval(w)?.d), c, opts.n_contour)).collect();
        let Ok(counts) = counts else { continue };
        if counts.iter().sum::<i64>() != count {
            continue;
        }
        for (child, c) in children.iter().zip(counts) {
            let sub = process_counted(det, *child, c, opts, depth + 1);
            out.resonances.extend(sub.resonances);
            out.failures.extend(sub.failures);
        }
        return out;
    }
    out.failures.push((cell, Error::BoundaryTooClose { omega: format!("{}", cell.center()), value: 0.0 }));
    out
}

/// Scan `rect` for resonances of every mode `(k, l)` with `k` in `ks` and
/// `l ∈ ls`, `l ≥ |k|`. Work items are independent; results are merged in
/// sorted order so the output does not depend on scheduling.
pub fn scan(map: &TortoiseMap, rect: &Rect, ks: &[i32], ls: &[usize], opts: &ScanOptions) -> ScanOutcome {
    let bound = rect.corners().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (nx, ny) = (opts.grid.0.max(1), opts.grid.1.max(1));
    let mut items = Vec::new();
    for &k in ks {
        for &l in ls {
            if l < k.unsigned_abs() as usize {
                continue;
            }
            for i in 0..nx {
                for j in 0..ny {
                    let dx = (rect.re.1 - rect.re.0) / nx as f64;
                    let dy = (rect.im.1 - rect.im.0) / ny as f64;
                    let cell = Rect {
                        re: (rect.re.0 + dx * i as f64, rect.re.0 + dx * (i + 1) as f64),
                        im: (rect.im.0 + dy * j as f64, rect.im.0 + dy * (j + 1) as f64),
                    };
                    items.push((k, l, cell));
                }
            }
        }
    }
    let work = |&(k, l, cell): &(i32, usize, Rect)| -> (i32, usize, CellResult) {
        match ModeDeterminant::new(map, k, l, bound) {
            Ok(det) => (k, l, process_cell(&det, cell, opts, 0)),
            Err(e) => (k, l, CellResult { resonances: Vec::new(), failures: vec![(cell, e)], count: 0 }),
        }
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(i32, usize, CellResult)> = {
        use rayon::prelude::*;
        items.par_iter().map(work).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(i32, usize, CellResult)> = items.iter().map(work).collect();

    let mut resonances = Vec::new();
    let mut failures = Vec::new();
    let mut counts: Vec<(i32, usize, i64)> = Vec::new();
    for (k, l, r) in results {
        resonances.extend(r.resonances);
        failures.extend(r.failures.into_iter().map(|(c, e)| (k, l, c, e)));
        match counts.iter_mut().find(|(kk, ll, _)| *kk == k && *ll == l) {
            Some(entry) => entry.2 += r.count,
            None => counts.push((k, l, r.count)),
        }
    }
    ScanOutcome { resonances: merge_resonances(resonances), failures, counts }
}

/// Sort by `(k, l, Re ω, Im ω)`, drop repeats of the same mode within
/// `10⁻⁶`, and record which other modes share each frequency.
pub fn merge_resonances(mut list: Vec<Resonance>) -> Vec<Resonance> {
    list.sort_by(|a, b| {
        (a.k, a.l).cmp(&(b.k, b.l)).then(a.omega.re.total_cmp(&b.omega.re)).then(a.omega.im.total_cmp(&b.omega.im))
    });
    let mut out: Vec<Resonance> = Vec::new();
    for r in list {
        let dup = out.iter().any(|o| o.k == r.k && o.l == r.l && (o.omega - r.omega).norm() < 1e-6);
        if !dup {
            out.push(r);
        }
    }
    let snapshot: Vec<(i32, usize, Complex64)> = out.iter().map(|r| (r.k, r.l, r.omega)).collect();
    for r in out.iter_mut() {
        r.shared_with = snapshot
            .iter()
            .filter(|(k, l, w)| (*k, *l) != (r.k, r.l) && (w - r.omega).norm() < 1e-6)
            .map(|(k, l, _)| (*k, *l))
            .collect();
    }
    out
}

/// Heuristic starting point for the overtone `n` of multipole `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub l: usize,
    pub n: usize,
    pub omega: Complex64,
}

/// Barrier-top (eikonal) seeds for a non-rotating hole:
/// `ω² = (λ + ¼)Ω² − i(n + ½)·2f_c√(λ + ¼)/(9M²)`, with the photon sphere at
/// `r = 3M`, `f_c = 1/3 − 3ΛM²`, `Ω² = f_c/(9M²)`. Both `ω` and `−ω̄` are
/// returned; `l = 0` is skipped.
pub fn sds_wkb_seeds(params: &BlackHoleParams, l_max: usize, n_max: usize) -> Result<Vec<Seed>> {
    if params.a != 0.0 {
        return Err(Error::InvalidParameter(format!("barrier-top seeds need a = 0, got a={}", params.a)));
    }
    let m = params.m0;
    let fc = 1.0 / 3.0 - 3.0 * params.lambda * m * m;
    let omega2 = fc / (9.0 * m * m);
    let mut out = Vec::new();
    for l in 1..=l_max {
        let lam = (l * (l + 1)) as f64 + 0.25;
        for n in 0..=n_max {
            let w2 = Complex64::new(lam * omega2, -(n as f64 + 0.5) * 2.0 * fc * lam.sqrt() / (9.0 * m * m));
            let w = w2.sqrt();
            out.push(Seed { l, n, omega: w });
            out.push(Seed { l, n, omega: Complex64::new(-w.re, w.im) });
        }
    }
    Ok(out)
}

/// Locate overtone `n` of mode `(k, l)`: refine the barrier-top seed of the
/// non-rotating hole with the same `M0`, `Λ`, then continue in `a` up to the
/// requested spin, halving the step on failure.
pub fn find_mode(params: &BlackHoleParams, k: i32, l: usize, n: usize, tol: f64) -> Result<Resonance> {
    if l == 0 {
        return Err(Error::InvalidParameter("l = 0 is dominated by the zero resonance; use a box scan".into()));
    }
    if l < k.unsigned_abs() as usize {
        return Err(Error::InvalidParameter(format!("mode l={l} requires l >= |k|")));
    }
    let sds = BlackHoleParams::new(params.m0, params.lambda, 0.0, params.m_field)?;
    let seed = sds_wkb_seeds(&sds, l, n)?
        .into_iter()
        .find(|s| s.l == l && s.n == n && s.omega.re > 0.0)
        .expect("seed generated");
    let map0 = TortoiseMap::build(&sds, None, crate::coords::DEFAULT_SERIES_TERMS)?;
    let mut res = refine(&map0, seed.omega, k, l, tol, Some(0.25 * seed.omega.norm()))?;
    let mut steps = 0usize;
    if params.a != 0.0 {
        let mut a_done = 0.0;
        let mut da = params.a;
        while a_done != params.a {
            let a_next = if (params.a - a_done).abs() <= da.abs() { params.a } else { a_done + da };
            let p = BlackHoleParams::new(params.m0, params.lambda, a_next, params.m_field)?;
            let map = TortoiseMap::build(&p, None, crate::coords::DEFAULT_SERIES_TERMS)?;
            match refine(&map, res.omega, k, l, tol, Some(0.05 * (1.0 + res.omega.norm()))) {
                Ok(r) => {
                    res = r;
                    a_done = a_next;
                    steps += 1;
                }
                Err(e) => {
                    da *= 0.5;
                    if da.abs() < 1e-6 * params.a.abs() {
                        return Err(e);
                    }
                }
            }
        }
    }
    res.provenance = if steps > 0 {
        format!("barrier-top seed n={n}, continued in a over {steps} steps")
    } else {
        format!("barrier-top seed n={n}")
    };
    Ok(res)
}

/// Dynamical case of the rescaled potential at zero energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrappingCase {
    /// `Ṽ₀ ≤ −δ_V` everywhere.
    BelowBarrier,
    /// `{|Ṽ₀| ≤ δ_V}` is two intervals on which `Ṽ₀` is strictly monotone.
    NontrappingMonotone,
    /// `{Ṽ₀ ≥ −δ_V}` is one interval on which `Ṽ₀'' < 0`.
    HyperbolicMaximum,
}

impl TrappingCase {
    pub fn label(self) -> &'static str {
        match self {
            TrappingCase::BelowBarrier => "below-barrier",
            TrappingCase::NontrappingMonotone => "nontrapping-monotone",
            TrappingCase::HyperbolicMaximum => "hyperbolic-maximum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrappingReport {
    pub lambda_tilde: f64,
    pub k_tilde: f64,
    pub case: TrappingCase,
    pub delta_v: f64,
    /// Interval endpoints `x_1 < x_2 (< x_3 < x_4)` of the defining sets.
    pub x_markers: Vec<f64>,
    /// `(x₀, Ṽ₀(x₀))` at the maximum, for the hyperbolic case.
    pub barrier_top: Option<(f64, f64)>,
}

const TRAPPING_SAMPLES: usize = 4001;

/// Classify `Ṽ₀(x) = λ̃Δ_r − (1+α)²(r² + a² − ak̃)²` into one of the three
/// dynamical cases, with `δ_V = 10⁻³ max|Ṽ₀|`.
pub fn classify_trapping(map: &TortoiseMap, lambda_tilde: f64, k_tilde: f64) -> Result<TrappingReport> {
    let p = &map.params;
    let opa2 = p.one_plus_alpha().powi(2);
    let a = p.a;
    let v_r = |r: f64| {
        let q = r * r + a * a - a * k_tilde;
        let (d, dd) = p.delta_r(r);
        let v = lambda_tilde * d - opa2 * q * q;
        let vr = lambda_tilde * dd - opa2 * 2.0 * q * 2.0 * r;
        let vrr = lambda_tilde * p.delta_r_dd(r) - opa2 * (8.0 * r * r + 4.0 * q);
        (v, vr, vrr, d, dd)
    };
    // dṼ/dx = Δ Ṽ_r, d²Ṽ/dx² = Δ(Δ' Ṽ_r + Δ Ṽ_rr)
    let derivs = |r: f64| {
        let (v, vr, vrr, d, dd) = v_r(r);
        (v, d * vr, d * (dd * vr + d * vrr))
    };
    // sample in r (uniform) so the region near the barrier is well resolved
    let (rm, rp) = (p.r_minus, p.r_plus);
    let rs: Vec<f64> =
        (1..TRAPPING_SAMPLES - 1).map(|i| rm + (rp - rm) * i as f64 / (TRAPPING_SAMPLES - 1) as f64).collect();
    let vals: Vec<(f64, f64, f64)> = rs.iter().map(|&r| derivs(r)).collect();
    let vmax_abs = vals.iter().map(|v| v.0.abs()).fold(0.0, f64::max);
    let (imax, &(vmax, _, _)) =
        vals.iter().enumerate().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).expect("non-empty sample");
    // refine the maximum by golden-section search in r
    let r_top = golden_max(|r| v_r(r).0, rs[imax.saturating_sub(1)], rs[(imax + 1).min(rs.len() - 1)]);
    let v_top = v_r(r_top).0.max(vmax);
    let x_top = map.x_of_r(r_top);

    let intervals = |pred: &dyn Fn(f64) -> bool| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, v) in vals.iter().enumerate() {
            match (pred(v.0), start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    out.push((s, i - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, vals.len() - 1));
        }
        out
    };
    let to_x = |i: usize| map.x_of_r(rs[i]);

    // δ_V starts at 10⁻³ max|Ṽ₀| and shrinks while the cases are undecided
    let mut delta_v = 1e-3 * vmax_abs;
    for _ in 0..6 {
        let report = |case, markers: Vec<f64>, top| TrappingReport {
            lambda_tilde,
            k_tilde,
            case,
            delta_v,
            x_markers: markers,
            barrier_top: top,
        };
        if v_top <= -delta_v {
            return Ok(report(TrappingCase::BelowBarrier, Vec::new(), None));
        }
        if v_top >= delta_v {
            let iv = intervals(&|v: f64| v.abs() <= delta_v);
            if iv.len() == 2 {
                let rising = (iv[0].0..=iv[0].1).all(|i| vals[i].1 > 0.0);
                let falling = (iv[1].0..=iv[1].1).all(|i| vals[i].1 < 0.0);
                if rising && falling {
                    let m = vec![to_x(iv[0].0), to_x(iv[0].1), to_x(iv[1].0), to_x(iv[1].1)];
                    return Ok(report(TrappingCase::NontrappingMonotone, m, None));
                }
            }
        }
        let iv = intervals(&|v: f64| v >= -delta_v);
        // the interval must hold a few samples for the sampled curvature test
        if iv.len() == 1 && iv[0].1 >= iv[0].0 + 4 && (iv[0].0..=iv[0].1).all(|i| vals[i].2 < 0.0) {
            let m = vec![to_x(iv[0].0), to_x(iv[0].1)];
            return Ok(report(TrappingCase::HyperbolicMaximum, m, Some((x_top, v_top))));
        }
        delta_v *= 0.1;
    }
    Err(Error::AmbiguousCase { max_v: v_top, delta_v: 1e-3 * vmax_abs })
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    for _ in 0..80 {
        if f(c) > f(d) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - g * (hi - lo);
        d = lo + g * (hi - lo);
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::DEFAULT_SERIES_TERMS;

    fn map(a: f64) -> TortoiseMap {
        let p = BlackHoleParams::new(0.1, 3.0, a, 0.0).unwrap();
        TortoiseMap::build(&p, None, DEFAULT_SERIES_TERMS).unwrap()
    }

    #[test]
    fn manufactured_root() {
        let w0 = Complex64::new(1.25, -0.375);
        let f = |w: Complex64| Ok((w - w0) * (w * 0.3).exp() * (w + 2.0));
        let (root, _) =
            secant_root(f, Complex64::new(1.1, -0.3), 1e-13, Rect::around(Complex64::new(1.1, -0.3), 1.0)).unwrap();
        assert!((root - w0).norm() < 1e-12);
        let n = winding_number(f, &Rect::new(0.0, 2.0, -1.0, 0.0).unwrap(), 32).unwrap();
        assert_eq!(n, 1);
        let n = winding_number(f, &Rect::new(0.0, 2.0, 0.1, 1.0).unwrap(), 32).unwrap();
        assert_eq!(n, 0);
    }

    #[test]
    fn zero_resonance() {
        let m = map(0.01);
        let d = mode_determinant(&m, Complex64::new(0.0, 0.0), 0, 0).unwrap();
        assert!(d.d.norm() < 1e-12);
        let r = refine(&m, Complex64::new(1e-3, 1e-3), 0, 0, 1e-12, Some(0.01)).unwrap();
        assert!(r.omega.norm() < 1e-10, "{}", r.omega);
        let n = count_zeros_box(&m, &Rect::new(-0.01, 0.013, -0.012, 0.011).unwrap(), 0, 0, 32).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn conjugation_symmetry_without_rotation() {
        let m = map(0.0);
        let w = Complex64::new(1.7, -0.45);
        let d1 = mode_determinant(&m, w, 1, 2).unwrap().d;
        let d2 = mode_determinant(&m, Complex64::new(-w.re, w.im), 1, 2).unwrap().d;
        assert!((d1.conj() - d2).norm() < 1e-9 * d1.norm());
    }

    #[test]
    fn real_frequencies_are_not_resonant() {
        let m = map(0.0);
        for w in [0.3, 1.0, 2.5, 4.0] {
            assert!(mode_determinant(&m, Complex64::new(w, 0.0), 0, 1).unwrap().d.norm() > 1e-3);
        }
    }

    #[test]
    fn fundamental_sds_mode_from_seed() {
        let p = BlackHoleParams::new(0.1, 3.0, 0.0, 0.0).unwrap();
        let r = find_mode(&p, 0, 1, 0, 1e-11).unwrap();
        assert!(r.omega.im < 0.0 && r.omega.re > 1.5, "{}", r.omega);
        assert!(r.residual < RESIDUAL_LIMIT);
    }

    #[test]
    fn seeds_form_a_lattice() {
        let p = BlackHoleParams::new(0.1, 3.0, 0.0, 0.0).unwrap();
        let s = sds_wkb_seeds(&p, 4, 3).unwrap();
        assert!(s.iter().all(|s| s.omega.im < 0.0 && s.l >= 1));
        for l in 1..=4 {
            let im: Vec<f64> = s.iter().filter(|s| s.l == l && s.omega.re > 0.0).map(|s| s.omega.im).collect();
            assert!(im.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn trapping_cases() {
        let m = map(0.0);
        let small = classify_trapping(&m, 0.01, 0.0).unwrap();
        assert_eq!(small.case, TrappingCase::BelowBarrier);
        let big = classify_trapping(&m, 2.0, 0.0).unwrap();
        assert_eq!(big.case, TrappingCase::NontrappingMonotone);
        assert!(big.x_markers.windows(2).all(|w| w[0] < w[1]));
        // critical value 1/F_V(3M) with F_V = Δ_r/r⁴
        let r: f64 = 0.3;
        let crit = r.powi(4) / m.params.delta_r(r).0;
        let top = classify_trapping(&m, crit, 0.0).unwrap();
        assert_eq!(top.case, TrappingCase::HyperbolicMaximum);
        let (x0, _) = top.barrier_top.unwrap();
        assert!((m.r_of_x(x0) - 0.3).abs() < 1e-6);
    }
}
