//! Dormand–Prince 5(4) for complex-valued linear systems.

use num_complex::Complex64;

use crate::error::DynamicsError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step, ns. `None` leaves it to the controller.
    pub max_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, max_steps: 20_000_000, max_step: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrates `dy/dt = f(t, y)` and calls `observe(k, grid[k], y)` at every
/// grid point, starting with `k = 0` at the initial state. Steps are clamped
/// so that each grid point is reached exactly.
pub fn integrate<F, O>(
    opts: &IntegratorOptions,
    mut f: F,
    y0: &[Complex64],
    grid: &[f64],
    mut observe: O,
) -> Result<OdeStats, DynamicsError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    O: FnMut(usize, f64, &[Complex64]) -> Result<(), DynamicsError>,
{
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(DynamicsError::BadGrid);
    }
    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut t = grid[0];
    let mut y = y0.to_vec();
    observe(0, t, &y)?;
    if grid.len() == 1 {
        return Ok(stats);
    }

    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut stage = vec![Complex64::new(0.0, 0.0); n];
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];

    f(t, &y, &mut k[0]);
    stats.evaluations += 1;

    let mut h = initial_step(opts, &mut f, t, &y, &k[0], &mut stage, &mut y_new, &mut stats);
    if let Some(hmax) = opts.max_step {
        h = h.min(hmax);
    }
    let mut last_rejected = false;

    for (idx, &target) in grid.iter().enumerate().skip(1) {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(DynamicsError::TooManySteps { t, max_steps: opts.max_steps });
            }
            let remaining = target - t;
            let clamped = h >= remaining;
            let step = if clamped { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) {
                return Err(DynamicsError::StepUnderflow { t, h: step });
            }

            macro_rules! combine {
                ($($c:expr => $j:expr),*) => {
                    for i in 0..n {
                        stage[i] = y[i] $(+ k[$j][i] * (step * $c))*;
                    }
                };
            }
            combine!(A21 => 0);
            f(t + C2 * step, &stage, &mut k[1]);
            combine!(A31 => 0, A32 => 1);
            f(t + C3 * step, &stage, &mut k[2]);
            combine!(A41 => 0, A42 => 1, A43 => 2);
            f(t + C4 * step, &stage, &mut k[3]);
            combine!(A51 => 0, A52 => 1, A53 => 2, A54 => 3);
            f(t + C5 * step, &stage, &mut k[4]);
            combine!(A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
            f(t + step, &stage, &mut k[5]);
            for i in 0..n {
                y_new[i] =
                    y[i] + (k[0][i] * A71 + k[2][i] * A73 + k[3][i] * A74 + k[4][i] * A75 + k[5][i] * A76) * step;
            }
            f(t + step, &y_new, &mut k[6]);
            stats.evaluations += 6;

            let mut acc = 0.0;
            for i in 0..n {
                let e =
                    (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * step;
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                acc += (e.norm() / sc).powi(2);
            }
            let err = (acc / n.max(1) as f64).sqrt();

            if err.is_nan() {
                stats.rejected += 1;
                h = step * 0.25;
                last_rejected = true;
                continue;
            }

            let mut fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                stats.accepted += 1;
                t = if clamped { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                if last_rejected {
                    fac = fac.min(1.0);
                }
                last_rejected = false;
                // a clamped step says nothing about the natural step size
                let proposal = step * fac;
                h = if clamped { h.max(proposal) } else { proposal };
            } else {
                stats.rejected += 1;
                last_rejected = true;
                h = step * fac.min(1.0);
            }
            if let Some(hmax) = opts.max_step {
                h = h.min(hmax);
            }
        }
        if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(DynamicsError::NonFinite { t });
        }
        observe(idx, t, &y)?;
    }
    Ok(stats)
}

#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    opts: &IntegratorOptions,
    f: &mut F,
    t: f64,
    y: &[Complex64],
    f0: &[Complex64],
    scratch: &mut [Complex64],
    f1: &mut [Complex64],
    stats: &mut OdeStats,
) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len().max(1) as f64;
    let sc: Vec<f64> = y.iter().map(|z| opts.atol + opts.rtol * z.norm()).collect();
    let wnorm = |v: &[Complex64]| (v.iter().zip(&sc).map(|(z, s)| (z.norm() / s).powi(2)).sum::<f64>() / n).sqrt();
    let d0 = wnorm(y);
    let d1 = wnorm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    for i in 0..y.len() {
        scratch[i] = y[i] + f0[i] * h0;
    }
    f(t + h0, scratch, f1);
    stats.evaluations += 1;
    let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = wnorm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}
