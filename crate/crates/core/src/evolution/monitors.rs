use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cutoff::CutoffWeights;
use crate::error::{Error, Result};
use crate::functionals::{virial_k, FunctionalRecord};
use crate::model::{Field, Grid, ModelParams};

/// `|z|^{p+1}` from `|z|^2`, skipping `powf` for the cubic case.
#[inline]
pub(crate) fn pow_p1(a2: f64, p: f64) -> f64 {
    if p == 3.0 {
        a2 * a2
    } else {
        a2.powf((p + 1.0) / 2.0)
    }
}

/// Base integrals with a precomputed cell-averaged potential.
pub(crate) fn record_with(u: &[Complex64], grid: &Grid, pot: &[f64], p: f64) -> FunctionalRecord {
    let mut rec = FunctionalRecord { grad_sq: grid.grad_sq(u), ..Default::default() };
    for ((z, w), v) in u.iter().zip(grid.weights()).zip(pot) {
        let a2 = z.norm_sqr();
        rec.mass += w * a2;
        rec.potential += w * v * a2;
        rec.lpp1 += w * pow_p1(a2, p);
    }
    rec
}

/// `2 sum_f kappa_f (X_f - X_{f-1}) Im(conj(u_{f-1}) u_f)`: the exact time
/// derivative of `sum_j W_j X_j |u_j|^2` under the semi-discrete free flow.
fn weighted_current(u: &[Complex64], grid: &Grid, xnode: &[f64]) -> f64 {
    let kappa = grid.kappa();
    (1..u.len()).map(|f| 2.0 * kappa[f] * (xnode[f] - xnode[f - 1]) * (u[f - 1].conj() * u[f]).im).sum()
}

/// Variance `I = int |x|^2 |u|^2`, its derivative `I' = 2 Im int conj(u) x.grad u`
/// and the virial prediction `4 K_gamma` for `I''`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirialSample {
    pub i: f64,
    pub idot: f64,
    pub four_k: f64,
}

pub fn virial_monitor(u: &Field, mp: &ModelParams) -> VirialSample {
    let grid = u.grid();
    let r2: Vec<f64> = grid.nodes().iter().map(|x| x * x).collect();
    let rec = record_with(u.values(), grid, &mp.potential_on(grid), mp.p);
    virial_parts(u.values(), grid, &r2, &rec, mp)
}

pub(crate) fn virial_parts(u: &[Complex64], grid: &Grid, r2: &[f64], rec: &FunctionalRecord, mp: &ModelParams) -> VirialSample {
    let i = grid.integrate(u.iter().zip(r2).map(|(z, x)| x * z.norm_sqr()));
    VirialSample { i, idot: weighted_current(u, grid, r2), four_k: 4.0 * virial_k(rec, mp) }
}

/// `(I_R, I_R', I_R'')` for the weight `X_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizedVirial {
    pub i: f64,
    pub idot: f64,
    pub iddot: f64,
}

pub fn localized_virial(u: &Field, mp: &ModelParams, w: &CutoffWeights) -> Result<LocalizedVirial> {
    let grid = u.grid();
    let v = u.values();
    let n = grid.len();
    if w.x[0].len() != n || w.x_face[0].len() != n + 1 {
        return Err(Error::Cutoff(format!("weights sampled on {} nodes, field has {n}", w.x[0].len())));
    }
    let d = mp.df();
    let c = w.cutoff;
    let big = c.radius;
    let i = grid.integrate(v.iter().zip(&w.x[0]).map(|(z, x)| x * z.norm_sqr()));
    let idot = weighted_current(v, grid, &w.x[0]);

    // gradient terms on faces: F1 |x.grad u|^2 + 4 (w'/r) |grad u|^2 with
    // |x.grad u| = r |u_r| for radial profiles
    let mut grad = 0.0;
    for f in 0..=n {
        let kw = grid.face_weight(f);
        if kw == 0.0 {
            continue;
        }
        let r = grid.face(f).abs();
        let w1r = c.x1_over_r(r);
        let f1r2 = if r <= big { 0.0 } else { 4.0 * (w.x_face[2][f] - w1r) };
        grad += kw * (f1r2 + 4.0 * w1r) * grid.face_jump(v, f).norm_sqr();
    }

    let pot = mp.potential_on(grid);
    let k2 = 2.0 * (mp.p - 1.0) / (mp.p + 1.0);
    let mut cell = 0.0;
    for j in 0..n {
        let r = grid.radius(j);
        let a2 = v[j].norm_sqr();
        let w1r = c.x1_over_r(r);
        let f2 = k2 * (w.x[2][j] + (d - 1.0) * w1r);
        let f3 = if r <= big {
            0.0
        } else {
            w.x[4][j] + 2.0 * (d - 1.0) * w.x[3][j] / r + (d - 1.0) * (d - 3.0) * w.x[2][j] / (r * r)
                + (d - 1.0) * (3.0 - d) * w1r / (r * r)
        };
        // w' gamma r^{-mu-1} = (w'/r) gamma r^{-mu}, with the cell-averaged potential
        let pterm = 2.0 * mp.mu * w1r * pot[j];
        cell += grid.weights()[j] * (-f2 * pow_p1(a2, mp.p) - f3 * a2 + pterm * a2);
    }
    Ok(LocalizedVirial { i, idot, iddot: grad + cell })
}

/// `int_{|x| > R} |u|^2` over the cells whose centers lie beyond `R`.
pub fn tail_mass(u: &Field, radius: f64) -> f64 {
    tail_of(u.values(), u.grid(), radius)
}

pub(crate) fn tail_of(u: &[Complex64], grid: &Grid, radius: f64) -> f64 {
    (0..grid.len())
        .filter(|&j| grid.radius(j) > radius)
        .map(|j| grid.weights()[j] * u[j].norm_sqr())
        .sum()
}

/// Smoothed tail `int Y_R |u|^2`.
pub fn smooth_tail(u: &Field, w: &CutoffWeights) -> f64 {
    u.grid().integrate(u.values().iter().zip(&w.y).map(|(z, y)| y * z.norm_sqr()))
}
