//! Dormand–Prince 5(4) integrator with caller-supplied error norm.

/// Step statistics of one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl OdeStats {
    pub fn merge(&mut self, other: OdeStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
    }
}

/// Failure of an integration: the step size collapsed at abscissa `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepUnderflow {
    pub x: f64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// difference between the 5th and embedded 4th order weights
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Adaptive Dormand–Prince integrator for `y' = f(x, y)` on `[f64; N]`.
///
/// `err_norm(y_old, y_new, err)` must return the scaled error of a step; the
/// step is accepted when it is at most one.
pub struct DormandPrince<F, G, const N: usize>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    G: Fn(&[f64; N], &[f64; N], &[f64; N]) -> f64,
{
    pub rhs: F,
    pub err_norm: G,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl<F, G, const N: usize> DormandPrince<F, G, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    G: Fn(&[f64; N], &[f64; N], &[f64; N]) -> f64,
{
    pub fn new(rhs: F, err_norm: G) -> Self {
        DormandPrince { rhs, err_norm, h_init: 1e-2, h_min: 1e-12, max_steps: 200_000 }
    }

    /// Integrate from `x0` to `x1` (either direction), returning the final state.
    pub fn integrate(
        &mut self,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        stats: &mut OdeStats,
    ) -> Result<[f64; N], StepUnderflow> {
        let mut out = [y0];
        self.integrate_to(x0, y0, &[x1], &mut out[..], stats)?;
        Ok(out[0])
    }

    /// Integrate from `x0` through the monotone list `targets`, storing the
    /// state at each target in `out`.
    pub fn integrate_to(
        &mut self,
        x0: f64,
        y0: [f64; N],
        targets: &[f64],
        out: &mut [[f64; N]],
        stats: &mut OdeStats,
    ) -> Result<(), StepUnderflow> {
        let mut x = x0;
        let mut y = y0;
        let mut k0 = (self.rhs)(x, &y);
        stats.evaluations += 1;
        let mut h_abs = self.h_init;
        for (slot, &target) in out.iter_mut().zip(targets) {
            let dir = if target >= x { 1.0 } else { -1.0 };
            while (target - x) * dir > 0.0 {
                if stats.accepted + stats.rejected > self.max_steps {
                    return Err(StepUnderflow { x });
                }
                let remaining = (target - x).abs();
                let last = h_abs >= remaining;
                let h = dir * if last { remaining } else { h_abs };
                let mut k = [[0.0; N]; 7];
                k[0] = k0;
                for s in 1..7 {
                    let mut ys = y;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let a = A[s][j];
                        if a != 0.0 {
                            for i in 0..N {
                                ys[i] += h * a * kj[i];
                            }
                        }
                    }
                    k[s] = (self.rhs)(x + C[s] * h, &ys);
                }
                stats.evaluations += 6;
                let mut y_new = y;
                let mut err = [0.0; N];
                for i in 0..N {
                    let mut acc = 0.0;
                    let mut e = 0.0;
                    for s in 0..6 {
                        acc += A[6][s] * k[s][i];
                    }
                    for s in 0..7 {
                        e += E[s] * k[s][i];
                    }
                    y_new[i] += h * acc;
                    err[i] = h * e;
                }
                let en = (self.err_norm)(&y, &y_new, &err);
                if en <= 1.0 && en.is_finite() {
                    x = if last { target } else { x + h };
                    y = y_new;
                    k0 = k[6];
                    stats.accepted += 1;
                    let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                    if !last {
                        h_abs *= fac;
                    } else {
                        h_abs = h_abs.max(remaining * fac.min(1.0));
                    }
                } else {
                    stats.rejected += 1;
                    let fac = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
                    h_abs = h.abs() * fac;
                    if h_abs < self.h_min {
                        return Err(StepUnderflow { x });
                    }
                }
            }
            *slot = y;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_norm(tol: f64) -> impl Fn(&[f64; 2], &[f64; 2], &[f64; 2]) -> f64 {
        move |y, yn, e| (0..2).map(|i| e[i].abs() / (tol * (1e-3 + y[i].abs().max(yn[i].abs())))).fold(0.0, f64::max)
    }

    #[test]
    fn harmonic_oscillator_returns_to_start() {
        let mut dp = DormandPrince::new(|_x, y: &[f64; 2]| [y[1], -y[0]], rel_norm(1e-11));
        let mut st = OdeStats::default();
        let y = dp.integrate(0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, &mut st).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9, "{y:?}");
    }

    #[test]
    fn backward_integration_and_dense_targets() {
        let mut dp = DormandPrince::new(|_x, y: &[f64; 2]| [y[0], 0.0], rel_norm(1e-12));
        let mut st = OdeStats::default();
        let targets = [-0.5, -1.0, -2.0];
        let mut out = [[0.0; 2]; 3];
        dp.integrate_to(0.0, [1.0, 0.0], &targets, &mut out, &mut st).unwrap();
        for (t, y) in targets.iter().zip(&out) {
            assert!((y[0] - t.exp()).abs() < 1e-11);
        }
    }
}
