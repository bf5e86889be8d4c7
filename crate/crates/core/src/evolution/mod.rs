//! Time integration with conservation, virial and tail monitors.

mod cutoff;
mod monitors;
mod stepper;
mod trace;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use cutoff::{build_cutoffs, check_cutoff, x_profile, y_profile, Cutoff, CutoffWeights};
pub use monitors::{localized_virial, smooth_tail, tail_mass, virial_monitor, LocalizedVirial, VirialSample};
pub use stepper::{step_strang, Stepper};
pub use trace::{read_trace, write_rows, write_trace, TraceFooter};

use crate::error::{Error, Result};
use crate::functionals::{energy, virial_k};
use crate::model::{Field, ModelParams};
use monitors::{record_with, tail_of, virial_parts};

/// Fraction of the mass allowed in the outer 5% of the grid before a run
/// is flagged as contaminated by boundary reflections.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub t_end: f64,
    pub dt0: f64,
    /// Step bound `dt <= c_dt / ||grad u||^2`.
    pub c_dt: f64,
    pub dt_min: f64,
    #[serde(default = "default_blowup_factor")]
    pub blowup_factor: f64,
    #[serde(default = "default_monitor_every")]
    pub monitor_every: usize,
    /// Radii of the two tail-mass columns.
    #[serde(default = "default_tail_radii")]
    pub tail_radii: [f64; 2],
    #[serde(default)]
    pub linear_only: bool,
}

fn default_blowup_factor() -> f64 {
    1e3
}

fn default_monitor_every() -> usize {
    1
}

fn default_tail_radii() -> [f64; 2] {
    [10.0, 15.0]
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            dt0: 1e-3,
            c_dt: 0.1,
            dt_min: 1e-6,
            blowup_factor: default_blowup_factor(),
            monitor_every: default_monitor_every(),
            tail_radii: default_tail_radii(),
            linear_only: false,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        positive("dt0", self.dt0)?;
        positive("c_dt", self.c_dt)?;
        positive("dt_min", self.dt_min)?;
        positive("tail radius", self.tail_radii[0])?;
        positive("tail radius", self.tail_radii[1])?;
        if self.dt_min >= self.dt0 {
            return Err(Error::Config(format!("dt_min = {} must be below dt0 = {}", self.dt_min, self.dt0)));
        }
        if !(self.blowup_factor > 1.0 && self.blowup_factor.is_finite()) {
            return Err(Error::Config(format!("blowup_factor must exceed 1, got {}", self.blowup_factor)));
        }
        if self.monitor_every == 0 {
            return Err(Error::Config("monitor_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    GlobalWindow,
    BlowupDetected,
    GrowUpSuspected,
    StepUnderflow,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::GlobalWindow => "global-window",
            Verdict::BlowupDetected => "blowup-detected",
            Verdict::GrowUpSuspected => "grow-up-suspected",
            Verdict::StepUnderflow => "step-underflow",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global-window" => Ok(Verdict::GlobalWindow),
            "blowup-detected" => Ok(Verdict::BlowupDetected),
            "grow-up-suspected" => Ok(Verdict::GrowUpSuspected),
            "step-underflow" => Ok(Verdict::StepUnderflow),
            other => Err(Error::Parse { line: 0, msg: format!("unknown verdict {other:?}") }),
        }
    }
}

/// One monitored sample; `dt` is the step that led to `t` (0 for the first row).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    pub energy: f64,
    pub grad_sq: f64,
    pub kin_gamma_sq: f64,
    #[serde(rename = "K_gamma")]
    pub k_gamma: f64,
    pub lpp1: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "Idot")]
    pub idot: f64,
    #[serde(rename = "tail_R1")]
    pub tail_r1: f64,
    #[serde(rename = "tail_R2")]
    pub tail_r2: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub rows: Vec<TraceRow>,
    /// Running sup of `||grad u||` over every step taken.
    pub c0: f64,
    pub verdict: Verdict,
    pub t_final: f64,
    pub steps: usize,
    pub tail_radii: [f64; 2],
    /// Largest fraction of the mass seen in the outer 5% of the grid.
    pub boundary_mass: f64,
    pub final_state: Field,
}

impl EvolutionTrace {
    pub fn boundary_flagged(&self) -> bool {
        self.boundary_mass > BOUNDARY_MASS_LIMIT
    }

    pub fn footer(&self) -> TraceFooter {
        TraceFooter {
            verdict: self.verdict,
            t_final: self.t_final,
            steps: self.steps,
            c0: self.c0,
            boundary_mass: self.boundary_mass,
            tail_radii: self.tail_radii,
        }
    }

    /// Largest relative drift of a column from its first value.
    pub fn drift(&self, column: impl Fn(&TraceRow) -> f64) -> f64 {
        let Some(first) = self.rows.first() else { return 0.0 };
        let base = column(first);
        let scale = if base != 0.0 { base.abs() } else { 1.0 };
        self.rows.iter().map(|r| (column(r) - base).abs() / scale).fold(0.0, f64::max)
    }

    /// Worst relative mismatch between the central second difference of `I`
    /// and `4 K_gamma` over interior rows with equal neighbouring steps.
    pub fn virial_mismatch(&self) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for k in 1..self.rows.len().saturating_sub(1) {
            let (a, b, c) = (&self.rows[k - 1], &self.rows[k], &self.rows[k + 1]);
            let (h1, h2) = (b.t - a.t, c.t - b.t);
            if (h1 - h2).abs() > 1e-9 * h1 {
                continue;
            }
            let dd = (c.i - 2.0 * b.i + a.i) / (h1 * h2);
            let rel = (dd - 4.0 * b.k_gamma).abs() / (4.0 * b.k_gamma).abs();
            worst = Some(worst.map_or(rel, |w| w.max(rel)));
        }
        worst
    }

    /// Largest excess of `tail(t, R)` over `tail(0, R/2) + eta` for rows in
    /// `t <= eta R / (6 C0 ||u0||)`. `column` selects the tail column for `R`
    /// and `half_tail0` is the initial tail mass beyond `R/2`.
    pub fn tail_window_excess(&self, column: usize, half_tail0: f64, eta: f64) -> (f64, f64) {
        let radius = self.tail_radii[column];
        let m0 = self.rows.first().map_or(0.0, |r| r.mass);
        let window = eta * radius / (6.0 * self.c0 * m0.sqrt());
        let excess = self
            .rows
            .iter()
            .filter(|r| r.t <= window)
            .map(|r| if column == 0 { r.tail_r1 } else { r.tail_r2 } - half_tail0 - eta)
            .fold(f64::NEG_INFINITY, f64::max);
        (window, excess)
    }
}

/// Observer called on every monitored sample with the current state.
pub type Observer<'a> = dyn FnMut(&TraceRow, &Field) + 'a;

pub fn evolve(u0: &Field, mp: &ModelParams, cfg: &EvolveConfig) -> Result<EvolutionTrace> {
    evolve_with(u0, mp, cfg, &mut |_, _| {})
}

pub fn evolve_with(u0: &Field, mp: &ModelParams, cfg: &EvolveConfig, observer: &mut Observer<'_>) -> Result<EvolutionTrace> {
    cfg.validate()?;
    mp.validate()?;
    let grid = u0.grid().clone();
    let stepper = Stepper::new(grid.clone(), mp);
    let pot = mp.potential_on(&grid);
    let r2: Vec<f64> = grid.nodes().iter().map(|x| x * x).collect();
    let edge = 0.95 * grid.extent();
    let mut u: Vec<Complex64> = u0.values().to_vec();

    let g0 = grid.grad_sq(&u);
    let mut trace = EvolutionTrace {
        rows: Vec::new(),
        c0: g0.sqrt(),
        verdict: Verdict::GlobalWindow,
        t_final: 0.0,
        steps: 0,
        tail_radii: cfg.tail_radii,
        boundary_mass: 0.0,
        final_state: u0.clone(),
    };
    if cfg.t_end == 0.0 {
        return Ok(trace);
    }

    let mut sample = |t: f64, dt: f64, u: &[Complex64], trace: &mut EvolutionTrace| -> Result<()> {
        let rec = record_with(u, &grid, &pot, mp.p);
        let vir = virial_parts(u, &grid, &r2, &rec, mp);
        let row = TraceRow {
            t,
            dt,
            mass: rec.mass,
            energy: energy(&rec, mp),
            grad_sq: rec.grad_sq,
            kin_gamma_sq: rec.kinetic_gamma(),
            k_gamma: virial_k(&rec, mp),
            lpp1: rec.lpp1,
            i: vir.i,
            idot: vir.idot,
            tail_r1: tail_of(u, &grid, cfg.tail_radii[0]),
            tail_r2: tail_of(u, &grid, cfg.tail_radii[1]),
        };
        if rec.mass > 0.0 {
            trace.boundary_mass = trace.boundary_mass.max(tail_of(u, &grid, edge) / rec.mass);
        }
        observer(&row, &Field::new(grid.clone(), u.to_vec())?);
        trace.rows.push(row);
        Ok(())
    };

    sample(0.0, 0.0, &u, &mut trace)?;
    let grow_limit = cfg.blowup_factor * g0.sqrt();
    let mut t = 0.0;
    let mut g = g0;
    let mut last_dt = 0.0;
    let mut all_negative = trace.rows[0].k_gamma < 0.0;
    loop {
        let remaining = cfg.t_end - t;
        if remaining <= 1e-12 * cfg.t_end {
            break;
        }
        let dt_free = if g > 0.0 { cfg.dt0.min(cfg.c_dt / g) } else { cfg.dt0 };
        if dt_free < cfg.dt_min {
            // growth of the gradient forced the step down; without growth the
            // step bounds were simply incompatible with the data
            trace.verdict = if g >= 4.0 * g0 { Verdict::BlowupDetected } else { Verdict::StepUnderflow };
            break;
        }
        let dt = dt_free.min(remaining);
        if let Err(e) = stepper.step(&mut u, dt, cfg.linear_only) {
            match e {
                Error::NonFinite(_) => {
                    trace.verdict = Verdict::BlowupDetected;
                    break;
                }
                other => return Err(other),
            }
        }
        t = if dt == remaining { cfg.t_end } else { t + dt };
        trace.steps += 1;
        last_dt = dt;
        g = grid.grad_sq(&u);
        trace.c0 = trace.c0.max(g.sqrt());
        let done = t >= cfg.t_end;
        let blown = g0 > 0.0 && g.sqrt() >= grow_limit;
        if done || blown || trace.steps % cfg.monitor_every == 0 {
            sample(t, dt, &u, &mut trace)?;
            all_negative &= trace.rows.last().is_some_and(|r| r.k_gamma < 0.0);
        }
        if blown {
            trace.verdict = Verdict::BlowupDetected;
            break;
        }
    }
    if trace.verdict == Verdict::GlobalWindow && all_negative && g >= 4.0 * g0 {
        trace.verdict = Verdict::GrowUpSuspected;
    }
    if trace.rows.last().is_some_and(|r| r.t < t) && u.iter().all(|z| z.is_finite()) {
        sample(t, last_dt, &u, &mut trace)?;
    }
    trace.t_final = t;
    if u.iter().all(|z| z.is_finite()) {
        trace.final_state = Field::new(grid.clone(), u)?;
    }
    Ok(trace)
}

/// Solution of `i u_t + Delta u = 0` on the line from `exp(-x^2 / (2 s^2))`.
pub fn free_gaussian(x: f64, t: f64, s: f64) -> Complex64 {
    let denom = Complex64::new(s * s, 2.0 * t);
    (s * s / denom).sqrt() * (-(x * x) / (2.0 * denom)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use crate::model::{Geometry, Grid};

    fn line(n: usize, extent: f64) -> Arc<Grid> {
        Arc::new(Grid::new(Geometry::Line, extent, n, 1).unwrap())
    }

    #[test]
    fn config_checks() {
        assert!(EvolveConfig::default().validate().is_ok());
        let bad = EvolveConfig { dt_min: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = EvolveConfig { c_dt: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_horizon_is_empty() {
        let g = line(64, 10.0);
        let u = Field::from_fn(g, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        let mp = ModelParams::new(1, 7.0, 0.0, 0.5, 1.0).unwrap();
        let tr = evolve(&u, &mp, &EvolveConfig { t_end: 0.0, ..Default::default() }).unwrap();
        assert!(tr.rows.is_empty());
        assert_eq!(tr.verdict, Verdict::GlobalWindow);
    }

    #[test]
    fn free_line_gaussian() {
        let g = line(1024, 20.0);
        let u = Field::from_fn(g.clone(), |x| free_gaussian(x, 0.0, 1.0)).unwrap();
        let mp = ModelParams::new(1, 7.0, 0.0, 0.5, 1.0).unwrap();
        let cfg = EvolveConfig { t_end: 1.0, dt0: 0.1, dt_min: 1e-6, c_dt: 1e6, linear_only: true, ..Default::default() };
        let tr = evolve(&u, &mp, &cfg).unwrap();
        let err = tr
            .final_state
            .values()
            .iter()
            .zip(g.nodes())
            .map(|(z, &x)| (z - free_gaussian(x, 1.0, 1.0)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        assert!(tr.drift(|r| r.mass) < 1e-12);
    }

    #[test]
    fn real_data_has_no_current() {
        let g = Arc::new(Grid::new(Geometry::Radial, 10.0, 200, 3).unwrap());
        let u = Field::from_fn(g, |r| Complex64::new((-r * r).exp(), 0.0)).unwrap();
        let mp = ModelParams::new(3, 3.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(virial_monitor(&u, &mp).idot, 0.0);
    }

    #[test]
    fn tail_partition() {
        let g = Arc::new(Grid::new(Geometry::Radial, 10.0, 400, 3).unwrap());
        let u = Field::from_fn(g.clone(), |r| Complex64::new((-r * r / 4.0).exp(), 0.0)).unwrap();
        let inner: f64 = (0..g.len())
            .filter(|&j| g.radius(j) <= 2.0)
            .map(|j| g.weights()[j] * u.values()[j].norm_sqr())
            .sum();
        assert!((inner + tail_mass(&u, 2.0) - u.mass()).abs() < 1e-12 * u.mass());
        assert_eq!(tail_mass(&u, 11.0), 0.0);
    }
}
