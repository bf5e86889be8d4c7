//! Action thresholds `n_{omega,0}` and `r_{omega,gamma}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{action, base_integrals, k_scaled, nehari_lambda, t_functional, u_functional, virial_k};
use crate::groundstate::{nehari_flow, FlowOptions, GroundStateSolution};
use crate::model::{translate_field, Field, Geometry, ModelParams, ScalingPair};

/// Default tested pairs: virial `(d, 2)`, Nehari `(1, 0)` and `(d, 1)`.
pub fn default_pairs(d: usize) -> Vec<ScalingPair> {
    vec![ScalingPair::virial(d), ScalingPair::nehari(), ScalingPair { alpha: d as f64, beta: 1.0 }]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairAction {
    pub alpha: f64,
    pub beta: f64,
    pub action: f64,
    pub sp_residual: f64,
    pub lagrange_residual: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NonattainmentPoint {
    pub y: f64,
    pub lambda: f64,
    pub action: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub omega: f64,
    pub gamma: f64,
    pub n: f64,
    /// Absent on line grids, where the constrained flow does not run.
    pub r: Option<f64>,
    /// Largest relative deviation among the per-pair actions.
    pub spread: Option<f64>,
    pub pairs: Vec<PairAction>,
    pub nonattainment: Vec<NonattainmentPoint>,
}

/// `n_{omega,0} = omega^{1-s_c} S_{1,0}(Q_{1,0})`.
pub fn n_threshold(omega: f64, gs_ref: &GroundStateSolution) -> Result<f64> {
    if gs_ref.mp.gamma != 0.0 || (gs_ref.mp.omega - 1.0).abs() > 1e-14 {
        return Err(Error::InvalidParams("reference ground state must have gamma = 0 and omega = 1".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParams(format!("omega = {omega} must be positive")));
    }
    Ok(omega.powf(1.0 - gs_ref.mp.sc()) * gs_ref.action_value)
}

/// Result of the per-pair constrained minimizations.
#[derive(Debug, Clone)]
pub struct RThreshold {
    pub r: f64,
    pub spread: f64,
    pub pairs: Vec<PairAction>,
}

/// Median of the per-pair minimized actions from `nehari_flow`.
pub fn r_threshold(
    omega: f64,
    mp: &ModelParams,
    pairs: &[ScalingPair],
    seed: &Field,
    opts: &FlowOptions,
) -> Result<RThreshold> {
    if !(mp.gamma > 0.0) {
        return Err(Error::InvalidParams("r threshold needs gamma > 0".into()));
    }
    if pairs.is_empty() {
        return Err(Error::Empty("no scaling pairs".into()));
    }
    for sp in pairs {
        sp.check(mp.d)?;
    }
    let mpw = mp.with_omega(omega);
    let results: Vec<Result<PairAction>> = pairs
        .par_iter()
        .map(|sp| {
            nehari_flow(&mpw, sp, seed, opts)
                .map(|gs| PairAction {
                    alpha: sp.alpha,
                    beta: sp.beta,
                    action: gs.action_value,
                    sp_residual: gs.sp_residual,
                    lagrange_residual: gs.lagrange_residual,
                })
                .map_err(|e| Error::PairFailed { alpha: sp.alpha, beta: sp.beta, source: Box::new(e) })
        })
        .collect();
    let pairs: Vec<PairAction> = results.into_iter().collect::<Result<_>>()?;
    let mut acts: Vec<f64> = pairs.iter().map(|p| p.action).collect();
    acts.sort_by(f64::total_cmp);
    let m = acts.len();
    let r = if m % 2 == 1 { acts[m / 2] } else { 0.5 * (acts[m / 2 - 1] + acts[m / 2]) };
    let spread = acts.iter().map(|a| ((a - r) / r).abs()).fold(0.0, f64::max);
    Ok(RThreshold { r, spread, pairs })
}

/// Translate `Q_{omega,0}` along the line, rescale onto `K^{alpha,beta}_{omega,gamma} = 0`
/// and record the action, for each shift.
pub fn nonattainment_experiment(
    mp: &ModelParams,
    sp: &ScalingPair,
    q: &GroundStateSolution,
    shifts: &[f64],
) -> Result<Vec<NonattainmentPoint>> {
    let grid = q.grid();
    if grid.geometry() != Geometry::Line {
        return Err(Error::Geometry("translations need line geometry".into()));
    }
    if q.mp.gamma != 0.0 || (q.mp.omega - mp.omega).abs() > 1e-14 {
        return Err(Error::InvalidParams("profile must be Q_{omega,0} at the same omega".into()));
    }
    mp.validate()?;
    let total = q.profile.mass();
    shifts
        .par_iter()
        .map(|&y| {
            let reach = grid.extent() - y.abs();
            let outside: f64 = grid
                .nodes()
                .iter()
                .zip(grid.weights())
                .zip(q.profile.values())
                .filter(|((x, _), _)| x.abs() > reach)
                .map(|((_, w), z)| w * z.norm_sqr())
                .sum();
            if reach <= 0.0 || outside > 1e-12 * total {
                return Err(Error::InvalidParams(format!("shift {y} pushes the profile off the grid")));
            }
            let moved = translate_field(&q.profile, y)?;
            let rec = base_integrals(&moved, mp);
            let lambda = nehari_lambda(&rec, mp, sp)?;
            Ok(NonattainmentPoint { y, lambda, action: action(&rec.amplified(lambda, mp.p), mp) })
        })
        .collect()
}

/// One-sided checks of the two rewritten characterizations of the threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewritingReport {
    pub threshold: f64,
    pub tol: f64,
    /// Members with `K^{alpha,beta} <= 0` and the infimum of `U` over them.
    pub u_count: usize,
    pub u_inf: f64,
    /// Members with `K_gamma <= 0` and the infimum of `T` over them.
    pub t_count: usize,
    pub t_inf: f64,
    /// Members rejected because both constraints were positive.
    pub rejected: usize,
    pub passed: bool,
}

pub fn rewriting_check(
    mp: &ModelParams,
    sp: &ScalingPair,
    family: &[Field],
    threshold: f64,
    tol: f64,
) -> Result<RewritingReport> {
    if family.is_empty() {
        return Err(Error::Empty("rewriting check needs at least one field".into()));
    }
    let mut rep = RewritingReport {
        threshold,
        tol,
        u_count: 0,
        u_inf: f64::INFINITY,
        t_count: 0,
        t_inf: f64::INFINITY,
        rejected: 0,
        passed: true,
    };
    for f in family {
        let rec = base_integrals(f, mp);
        let mut used = false;
        if k_scaled(&rec, mp, sp)? <= 0.0 {
            rep.u_count += 1;
            rep.u_inf = rep.u_inf.min(u_functional(&rec, mp, sp)?);
            used = true;
        }
        if virial_k(&rec, mp) <= 0.0 {
            rep.t_count += 1;
            rep.t_inf = rep.t_inf.min(t_functional(&rec, mp));
            used = true;
        }
        if !used {
            rep.rejected += 1;
        }
    }
    if rep.u_count + rep.t_count == 0 {
        return Err(Error::Empty("no member satisfies K <= 0".into()));
    }
    rep.passed = rep.u_inf >= threshold - tol && rep.t_inf >= threshold - tol;
    Ok(rep)
}

/// Radial threshold `omega -> r_{omega,gamma}` used for the fourth pair of sets.
pub trait RadialThreshold: Sync {
    fn r(&self, omega: f64) -> Option<f64>;
}

/// `r_{omega,gamma} = omega^{1-s_c} r_{1, gamma omega^{mu/2-1}}`, with
/// `gamma' -> r_{1,gamma'}` tabulated by the constrained flow and
/// interpolated linearly in `(log gamma', log r)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub mp: ModelParams,
    pub points: Vec<(f64, f64)>,
}

impl ThresholdTable {
    /// Tabulate `r_{1,gamma'}` at `count` log-spaced `gamma'` covering
    /// `omega` in `[omega_lo, omega_hi]`.
    pub fn build(
        mp: &ModelParams,
        seed: &Field,
        omega_lo: f64,
        omega_hi: f64,
        count: usize,
        opts: &FlowOptions,
    ) -> Result<Self> {
        let e = mp.mu / 2.0 - 1.0;
        let g1 = mp.gamma * omega_lo.powf(e);
        let g2 = mp.gamma * omega_hi.powf(e);
        let (lo, hi) = (g1.min(g2), g1.max(g2));
        let count = count.max(2);
        let gammas: Vec<f64> =
            (0..count).map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64)).collect();
        let sp = ScalingPair::nehari();
        let points = gammas
            .par_iter()
            .map(|&g| {
                let m = mp.with_gamma(g).with_omega(1.0);
                nehari_flow(&m, &sp, seed, opts).map(|gs| (g, gs.action_value))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { mp: *mp, points })
    }
}

impl RadialThreshold for ThresholdTable {
    fn r(&self, omega: f64) -> Option<f64> {
        let g = self.mp.gamma * omega.powf(self.mp.mu / 2.0 - 1.0);
        let pts = &self.points;
        let (first, last) = (pts.first()?, pts.last()?);
        let tol = 1e-9 * g;
        if g < first.0 - tol || g > last.0 + tol {
            return None;
        }
        let k = pts.partition_point(|p| p.0 < g).clamp(1, pts.len() - 1);
        let (a, b) = (pts[k - 1], pts[k]);
        let t = (g.ln() - a.0.ln()) / (b.0.ln() - a.0.ln());
        let r1 = (a.1.ln() + t * (b.1.ln() - a.1.ln())).exp();
        Some(omega.powf(1.0 - self.mp.sc()) * r1)
    }
}
