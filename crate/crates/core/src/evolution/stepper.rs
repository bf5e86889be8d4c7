use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::model::{Field, Geometry, Grid, ModelParams};

/// Thomas factorization of `W - i (dt/2) K` for one step size.
struct Factored {
    dt: f64,
    inv_pivot: Vec<Complex64>,
    upper: Vec<Complex64>,
    lower: Vec<Complex64>,
}

enum Linear {
    /// Crank-Nicolson on `W u_t = i (K - W V) u`; the potential is folded
    /// into `diag`.
    Radial { weights: Vec<f64>, diag: Vec<f64>, off: Vec<f64>, cache: Mutex<Option<Factored>> },
    /// Exact propagator on the odd extension of length `2n`.
    Line { fwd: Arc<dyn Fft<f64>>, inv: Arc<dyn Fft<f64>>, k2: Vec<f64> },
}

/// Strang splitting for `i u_t + Delta u - V u = -|u|^{p-1} u`: half phase
/// step, full linear step, half phase step. On radial grids the potential
/// goes into the implicit linear step, since the splitting error of a
/// singular `V` in the phase is large near the origin. On the line it sits
/// in the phase, next to the exact free propagator.
pub struct Stepper {
    grid: Arc<Grid>,
    p: f64,
    /// Potential applied in the phase step (zero on radial grids).
    potential: Vec<f64>,
    linear: Linear,
}

impl Stepper {
    pub fn new(grid: Arc<Grid>, mp: &ModelParams) -> Self {
        let mut potential = mp.potential_on(&grid);
        let linear = match grid.geometry() {
            Geometry::Radial => {
                let (mut diag, off) = grid.stiffness();
                for ((k, w), v) in diag.iter_mut().zip(grid.weights()).zip(&mut potential) {
                    *k -= w * *v;
                    *v = 0.0;
                }
                Linear::Radial { weights: grid.weights().to_vec(), diag, off, cache: Mutex::new(None) }
            }
            Geometry::Line => {
                let m = 2 * grid.len();
                let mut planner = FftPlanner::new();
                let period = m as f64 * grid.h();
                let k2 = (0..m)
                    .map(|j| {
                        let q = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
                        let k = 2.0 * std::f64::consts::PI * q / period;
                        k * k
                    })
                    .collect();
                Linear::Line { fwd: planner.plan_fft_forward(m), inv: planner.plan_fft_inverse(m), k2 }
            }
        };
        Self { grid, p: mp.p, potential, linear }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn phase(&self, u: &mut [Complex64], tau: f64, nonlinear: bool) {
        let e = (self.p - 1.0) / 2.0;
        for (z, v) in u.iter_mut().zip(&self.potential) {
            let mut theta = -v;
            if nonlinear {
                let a2 = z.norm_sqr();
                theta += if e == 1.0 { a2 } else { a2.powf(e) };
            }
            if theta != 0.0 {
                let (s, c) = (tau * theta).sin_cos();
                *z *= Complex64::new(c, s);
            }
        }
    }

    fn free(&self, u: &mut [Complex64], dt: f64) {
        match &self.linear {
            Linear::Radial { weights, diag, off, cache } => {
                let half = Complex64::new(0.0, 0.5 * dt);
                let n = u.len();
                let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
                if guard.as_ref().map_or(true, |f| f.dt != dt) {
                    *guard = Some(factor(weights, diag, off, half, dt));
                }
                let fac = guard.as_ref().expect("factorization present");
                // forward sweep on the right-hand side (W + i dt/2 K) u
                let mut prev = Complex64::new(0.0, 0.0);
                let mut y = Vec::with_capacity(n);
                for j in 0..n {
                    let mut ku = diag[j] * u[j];
                    if j > 0 {
                        ku += off[j - 1] * u[j - 1];
                    }
                    if j + 1 < n {
                        ku += off[j] * u[j + 1];
                    }
                    let rhs = weights[j] * u[j] + half * ku;
                    let lo = if j > 0 { fac.lower[j - 1] * prev } else { Complex64::new(0.0, 0.0) };
                    prev = (rhs - lo) * fac.inv_pivot[j];
                    y.push(prev);
                }
                for j in (0..n - 1).rev() {
                    let next = y[j + 1];
                    y[j] -= fac.upper[j] * next;
                }
                u.copy_from_slice(&y);
            }
            Linear::Line { fwd, inv, k2 } => {
                let n = u.len();
                let m = 2 * n;
                let mut buf: Vec<Complex64> = Vec::with_capacity(m);
                buf.extend_from_slice(u);
                buf.extend(u.iter().rev().map(|z| -z));
                fwd.process(&mut buf);
                let scale = 1.0 / m as f64;
                for (z, k) in buf.iter_mut().zip(k2) {
                    *z *= Complex64::from_polar(scale, -k * dt);
                }
                inv.process(&mut buf);
                u.copy_from_slice(&buf[..n]);
            }
        }
    }

    /// Advance `u` in place by `dt`. With `linear_only` the nonlinearity is
    /// dropped; the potential is kept.
    pub fn step(&self, u: &mut [Complex64], dt: f64, linear_only: bool) -> Result<()> {
        self.phase(u, 0.5 * dt, !linear_only);
        self.free(u, dt);
        self.phase(u, 0.5 * dt, !linear_only);
        if let Some(j) = u.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(format!("node {j}")));
        }
        Ok(())
    }
}

fn factor(weights: &[f64], diag: &[f64], off: &[f64], half: Complex64, dt: f64) -> Factored {
    let n = weights.len();
    let lower: Vec<Complex64> = off.iter().map(|k| -half * k).collect();
    let mut inv_pivot = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n {
        let mut pivot = weights[j] - half * diag[j];
        if j > 0 {
            pivot -= lower[j - 1] * upper[j - 1];
        }
        let inv = 1.0 / pivot;
        inv_pivot.push(inv);
        if j + 1 < n {
            upper.push(lower[j] * inv);
        }
    }
    Factored { dt, inv_pivot, upper, lower }
}

/// One Strang step of the full equation.
pub fn step_strang(u: &Field, dt: f64, mp: &ModelParams) -> Result<Field> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    let stepper = Stepper::new(u.grid().clone(), mp);
    let mut v = u.values().to_vec();
    stepper.step(&mut v, dt, false)?;
    Field::new(u.grid().clone(), v)
}
