use std::sync::Arc;

use super::ode::{Dopri, Flow};
use super::{check_shape, half_line, ode_residual, GroundStateSolution, Method};
use crate::error::{Error, Result};
use crate::model::{Field, Grid, ModelParams};

#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    /// Accepted residual of the stationary equation.
    pub tol: f64,
    pub amp_min: f64,
    pub amp_max: f64,
    /// Geometric scan points used to locate the first sign change.
    pub scan_points: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { tol: 1e-6, amp_min: 1e-3, amp_max: 1e3, scan_points: 121 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fate {
    /// Crossed zero: amplitude too large.
    Over,
    /// Turned back up or ran away: amplitude too small.
    Under,
}

struct Shooter {
    mp: ModelParams,
    r0: f64,
    r_far: f64,
    ode: Dopri,
}

impl Shooter {
    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        let mp = self.mp;
        let d1 = mp.df() - 1.0;
        move |r, y| {
            let q = y[0];
            let nl = q.abs().powf(mp.p - 1.0) * q;
            [y[1], (mp.omega + mp.potential(r)) * q - nl - d1 / r * y[1]]
        }
    }

    /// Series start at `r0`: the singular potential enters through
    /// `a gamma r^{2-mu} / ((2-mu)(d-mu))`.
    fn start(&self, a: f64) -> [f64; 2] {
        let mp = &self.mp;
        let (d, mu, r) = (mp.df(), mp.mu, self.r0);
        let lin = mp.omega * a - a.powf(mp.p);
        let (mut q, mut dq) = (a + lin * r * r / (2.0 * d), lin * r / d);
        if mp.gamma != 0.0 {
            q += a * mp.gamma * r.powf(2.0 - mu) / ((2.0 - mu) * (d - mu));
            dq += a * mp.gamma * r.powf(1.0 - mu) / (d - mu);
        }
        [q, dq]
    }

    fn watcher(a: f64) -> impl FnMut(f64, &[f64; 2]) -> Flow {
        let mut descending = false;
        let cap = 1e3 * (1.0 + a);
        move |_, y| {
            if y[0] < 0.0 || y[0] > cap || (descending && y[1] > 0.0) {
                return Flow::Stop;
            }
            if y[1] < 0.0 {
                descending = true;
            }
            Flow::Continue
        }
    }

    fn fate(&self, a: f64) -> Fate {
        let y0 = self.start(a);
        if y0[0] < 0.0 {
            return Fate::Over;
        }
        let tr = self.ode.integrate(self.rhs(), self.r0, y0, &[self.r_far], Self::watcher(a));
        if tr.last_y[0] < 0.0 {
            Fate::Over
        } else {
            Fate::Under
        }
    }

    /// Trajectory sampled at `radii`; shorter than `radii` when it left the
    /// positive decreasing branch.
    fn profile(&self, a: f64, radii: &[f64]) -> Vec<[f64; 2]> {
        self.ode.integrate(self.rhs(), self.r0, self.start(a), radii, Self::watcher(a)).samples
    }

    /// Decaying solution of the linearized equation, integrated inward from
    /// the outer edge and sampled at `radii` (increasing).
    fn linear_tail(&self, radii: &[f64], r_edge: f64) -> Vec<[f64; 2]> {
        let mp = self.mp;
        let d1 = mp.df() - 1.0;
        let kappa = (mp.omega + mp.potential(r_edge)).sqrt() + d1 / (2.0 * r_edge);
        let targets: Vec<f64> = radii.iter().rev().copied().collect();
        let f = move |r: f64, y: &[f64; 2]| [y[1], (mp.omega + mp.potential(r)) * y[0] - d1 / r * y[1]];
        let mut s = self.ode.integrate(f, r_edge, [1.0, -kappa], &targets, |_, _| Flow::Continue).samples;
        s.reverse();
        s
    }
}

/// Radial shooting on the amplitude `a = Q(0+)`, bisected between
/// zero-crossing and turning trajectories down to machine precision.
pub fn shoot(mp: &ModelParams, grid: &Arc<Grid>, opts: &ShootOptions) -> Result<GroundStateSolution> {
    mp.validate()?;
    if grid.d() != mp.d {
        return Err(Error::InvalidParams(format!("grid dimension {} differs from d = {}", grid.d(), mp.d)));
    }
    let (radii, index) = half_line(grid);
    let r_edge = grid.extent();
    let r0 = (1e-6 * r_edge).min(0.1 * radii[0]);
    let shooter = Shooter {
        mp: *mp,
        r0,
        r_far: r_edge.max(60.0 / mp.omega.sqrt()),
        ode: Dopri { rtol: 1e-13, atol: 1e-300, h_init: 0.1 * r0 },
    };

    let k = opts.scan_points.max(2);
    let ratio = (opts.amp_max / opts.amp_min).powf(1.0 / (k - 1) as f64);
    let mut bracket = None;
    let mut prev = (opts.amp_min, shooter.fate(opts.amp_min));
    for i in 1..k {
        let a = opts.amp_min * ratio.powi(i as i32);
        let fate = shooter.fate(a);
        if prev.1 == Fate::Under && fate == Fate::Over {
            bracket = Some((prev.0, a));
            break;
        }
        prev = (a, fate);
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoBracket { lo: opts.amp_min, hi: opts.amp_max })?;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shooter.fate(mid) {
            Fate::Under => lo = mid,
            Fate::Over => hi = mid,
        }
    }

    let lo_tr = shooter.profile(lo, &radii);
    let hi_tr = shooter.profile(hi, &radii);
    let peak = lo_tr.iter().chain(&hi_tr).fold(0.0f64, |m, y| m.max(y[0]));
    let m = radii.len();
    let split = (0..m)
        .position(|k| {
            if k >= lo_tr.len() || k >= hi_tr.len() {
                return true;
            }
            // graft while the bracketing shots still agree to 1e-9 relative, so
            // the derivative jump at the seam stays negligible
            let gap = (lo_tr[k][0] - hi_tr[k][0]).abs();
            gap > 1e-10 * peak || gap > 1e-9 * (lo_tr[k][0] + hi_tr[k][0]).abs()
        })
        .unwrap_or(m);
    let mut q = vec![0.0; m];
    let mut dq = vec![0.0; m];
    for k in 0..split {
        q[k] = 0.5 * (lo_tr[k][0] + hi_tr[k][0]);
        dq[k] = 0.5 * (lo_tr[k][1] + hi_tr[k][1]);
    }
    if split < m {
        if split < 8 {
            return Err(Error::WrongBranch("shooting trajectories separate next to the origin".into()));
        }
        let g = split - 1;
        let tail = shooter.linear_tail(&radii[g..], r_edge);
        let c = q[g] / tail[0][0];
        for k in split..m {
            q[k] = c * tail[k - g][0];
            dq[k] = c * tail[k - g][1];
        }
    }
    check_shape(&q, mp.gamma)?;

    let w: Vec<f64> = match grid.geometry() {
        crate::model::Geometry::Radial => grid.weights().to_vec(),
        crate::model::Geometry::Line => vec![grid.h(); m],
    };
    let sp_residual = ode_residual(&radii, &q, &dq, &w, mp);
    if sp_residual > opts.tol {
        return Err(Error::NotConverged { iterations: 0, residual: sp_residual });
    }
    let values: Vec<f64> = index.iter().map(|&k| q[k]).collect();
    let derivative: Vec<f64> = index.iter().map(|&k| dq[k]).collect();
    let profile = Field::from_real(grid.clone(), &values)?;
    Ok(GroundStateSolution::assemble(profile, Some(derivative), *mp, Method::Shoot, sp_residual))
}
