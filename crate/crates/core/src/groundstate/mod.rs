//! Ground states of the stationary equation
//! `-omega Q + Delta Q - gamma |x|^-mu Q + |Q|^{p-1} Q = 0`.

mod flow;
mod io;
pub mod ode;
mod shoot;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use flow::{nehari_flow, FlowOptions};
pub use io::{read_groundstate, write_groundstate, GroundStateFile};
pub use shoot::{shoot, ShootOptions};

use crate::error::{Error, Result};
use crate::functionals::{action, base_integrals, k_scaled, FunctionalRecord, GroundBenchmark};
use crate::model::{Field, Geometry, Grid, ModelParams, ScalingPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Shoot,
    Flow,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Shoot => "shoot",
            Method::Flow => "flow",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shoot" => Ok(Method::Shoot),
            "flow" => Ok(Method::Flow),
            other => Err(Error::InvalidParams(format!("unknown method '{other}'"))),
        }
    }
}

/// A computed ground state with its diagnostics.
#[derive(Debug, Clone)]
pub struct GroundStateSolution {
    pub profile: Field,
    /// Radial derivative `Q'(|x|)` at each node, when the solver produced it.
    pub derivative: Option<Vec<f64>>,
    pub mp: ModelParams,
    pub method: Method,
    pub sp_residual: f64,
    /// Residual of the Lagrange condition on the constraint set (flow), or
    /// `sp_residual` for unconstrained solvers.
    pub lagrange_residual: f64,
    pub record: FunctionalRecord,
    /// Relative residuals of the Nehari and virial identities
    /// `omega M + G + P = N` and `2G + mu P = d(p-1)/(p+1) N`.
    pub pohozaev_res: (f64, f64),
    pub action_value: f64,
}

impl GroundStateSolution {
    pub(crate) fn assemble(
        profile: Field,
        derivative: Option<Vec<f64>>,
        mp: ModelParams,
        method: Method,
        sp_residual: f64,
    ) -> Self {
        let record = base_integrals(&profile, &mp);
        let pohozaev_res = pohozaev_residuals(&record, &mp);
        let action_value = action(&record, &mp);
        Self {
            profile,
            derivative,
            mp,
            method,
            sp_residual,
            lagrange_residual: sp_residual,
            record,
            pohozaev_res,
            action_value,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.profile.grid()
    }

    pub fn values(&self) -> Vec<f64> {
        self.profile.real_parts()
    }

    /// Virial functional `K_gamma(Q)`.
    pub fn virial(&self) -> f64 {
        crate::functionals::virial_k(&self.record, &self.mp)
    }

    pub fn energy(&self) -> f64 {
        crate::functionals::energy(&self.record, &self.mp)
    }

    pub fn benchmark(&self) -> GroundBenchmark {
        GroundBenchmark::from_record(&self.record, &self.mp)
    }

    /// `K^{alpha,beta}(Q)` relative to the size of its largest term.
    pub fn k_scaled_relative(&self, sp: &ScalingPair) -> Result<f64> {
        let (a, b) = crate::functionals::k_scaled_parts(&self.record, &self.mp, sp)?;
        Ok(k_scaled(&self.record, &self.mp, sp)?.abs() / a.abs().max(b.abs()))
    }
}

pub fn pohozaev_residuals(rec: &FunctionalRecord, mp: &ModelParams) -> (f64, f64) {
    let nehari = mp.omega * rec.mass + rec.kinetic_gamma();
    let c = mp.df() * (mp.p - 1.0) / (mp.p + 1.0);
    let virial = 2.0 * rec.grad_sq + mp.mu * rec.potential;
    let scale = rec.lpp1.max(f64::MIN_POSITIVE);
    ((nehari - rec.lpp1).abs() / scale, (virial - c * rec.lpp1).abs() / (c * scale))
}

/// Distinct radii of a grid in increasing order, and the radius index of
/// every node. Line grids fold onto the half line.
pub(crate) fn half_line(grid: &Grid) -> (Vec<f64>, Vec<usize>) {
    let n = grid.len();
    match grid.geometry() {
        Geometry::Radial => (grid.nodes().to_vec(), (0..n).collect()),
        Geometry::Line => {
            let m = n / 2;
            let radii = grid.nodes()[m..].to_vec();
            let index = (0..n).map(|j| if j >= m { j - m } else { m - 1 - j }).collect();
            (radii, index)
        }
    }
}

/// Fourth-order derivative of uniformly spaced samples, one-sided near the ends.
pub(crate) fn derivative4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "need at least five samples");
    let mut out = vec![0.0; n];
    let c = 12.0 * h;
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / c;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / c;
    for k in 2..n - 2 {
        out[k] = (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / c;
    }
    out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / c;
    out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / c;
    out
}

/// Residual of the radial equation evaluated from profile and derivative
/// samples on the half line: `Q'' + (d-1)/r Q' - (omega + V - |Q|^{p-1}) Q`.
pub(crate) fn ode_residual(radii: &[f64], q: &[f64], dq: &[f64], w: &[f64], mp: &ModelParams) -> f64 {
    let h = radii[1] - radii[0];
    let d2 = derivative4(dq, h);
    let d1 = mp.df() - 1.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..radii.len() {
        let r = radii[k];
        let res = d2[k] + d1 / r * dq[k] - (mp.omega + mp.potential(r) - q[k].abs().powf(mp.p - 1.0)) * q[k];
        num += w[k] * res * res;
        den += w[k] * q[k] * q[k];
    }
    (num / den).sqrt()
}

/// Discrete residual `||-omega u + Delta_h u - V u + |u|^{p-1} u|| / ||u||`.
pub fn discrete_residual(f: &Field, mp: &ModelParams) -> f64 {
    let grid = f.grid();
    let lap = grid.laplacian(f.values());
    let pot = mp.potential_on(grid);
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, (u, l)) in f.values().iter().zip(&lap).enumerate() {
        let w = grid.weights()[j];
        let res = -mp.omega * u + l - pot[j] * u + u * u.norm().powf(mp.p - 1.0);
        num += w * res.norm_sqr();
        den += w * u.norm_sqr();
    }
    (num / den).sqrt()
}

/// Radius-sorted values of `f` on the half line.
fn folded(values: &[f64], index: &[usize], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (j, &k) in index.iter().enumerate() {
        out[k] = values[j];
    }
    out
}

/// Residual of a profile in the equation, from derivative samples when
/// available and from the discrete Laplacian otherwise.
pub(crate) fn residual_of(profile: &Field, derivative: Option<&[f64]>, mp: &ModelParams) -> f64 {
    let grid = profile.grid();
    match derivative {
        Some(dq) => {
            let (radii, index) = half_line(grid);
            let q = folded(&profile.real_parts(), &index, radii.len());
            let dq = folded(dq, &index, radii.len());
            let w = folded(grid.weights(), &index, radii.len());
            ode_residual(&radii, &q, &dq, &w, mp)
        }
        None => discrete_residual(profile, mp),
    }
}

/// Sample-wise shape check: strictly decreasing for `gamma = 0`, single
/// interior maximum for `gamma > 0` (the repulsive core pushes the peak off
/// the origin).
pub(crate) fn check_shape(radial_values: &[f64], gamma: f64) -> Result<()> {
    if let Some(k) = radial_values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::WrongBranch(format!("profile not positive at radius index {k}")));
    }
    let peak = radial_values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc })
        .0;
    if gamma == 0.0 && peak != 0 {
        return Err(Error::WrongBranch(format!("profile peaks at radius index {peak}, not at the origin")));
    }
    for k in 1..radial_values.len() {
        let rising = radial_values[k] > radial_values[k - 1];
        if (k <= peak) != rising {
            return Err(Error::WrongBranch(format!("profile not unimodal near radius index {k}")));
        }
    }
    Ok(())
}

/// `Q_omega(x) = omega^{1/(p-1)} Q_1(sqrt(omega) x)` on the same grid.
pub fn rescale_omega(gs_at_1: &GroundStateSolution, omega: f64) -> Result<GroundStateSolution> {
    if gs_at_1.mp.gamma != 0.0 {
        return Err(Error::InvalidParams("frequency rescaling requires gamma = 0".into()));
    }
    if (gs_at_1.mp.omega - 1.0).abs() > 1e-14 {
        return Err(Error::InvalidParams("frequency rescaling starts from omega = 1".into()));
    }
    let mp = gs_at_1.mp.with_omega(omega);
    mp.validate()?;
    let grid = gs_at_1.grid().clone();
    let amp = omega.powf(1.0 / (mp.p - 1.0));
    let s = omega.sqrt();
    let values: Vec<Complex64> =
        grid.nodes().iter().map(|&x| amp * gs_at_1.profile.sample(s * x)).collect();
    let profile = Field::new(grid.clone(), values)?;
    let derivative = match &gs_at_1.derivative {
        Some(dq) => {
            let df = Field::from_real(grid.clone(), dq)?;
            Some(grid.nodes().iter().map(|&x| amp * s * df.sample(s * x).re).collect::<Vec<f64>>())
        }
        None => None,
    };
    let sp_residual = residual_of(&profile, derivative.as_deref(), &mp);
    Ok(GroundStateSolution::assemble(profile, derivative, mp, gs_at_1.method, sp_residual))
}

/// Best Gagliardo–Nirenberg constant from the ground state `Q_{1,0}`:
/// `2(p+1)/(d(p-1)) / (||Q||^{(d+2-(d-2)p)/2} ||grad Q||^{(dp-(d+4))/2})`.
pub fn cgn_constant(gs: &GroundStateSolution) -> Result<f64> {
    if gs.mp.gamma != 0.0 {
        return Err(Error::InvalidParams("C_GN is defined through the gamma = 0 ground state".into()));
    }
    let (d, p) = (gs.mp.df(), gs.mp.p);
    let rec = &gs.record;
    let a = (d + 2.0 - (d - 2.0) * p) / 2.0;
    let b = (d * p - (d + 4.0)) / 2.0;
    Ok(2.0 * (p + 1.0) / (d * (p - 1.0)) / (rec.mass.powf(a / 2.0) * rec.grad_sq.powf(b / 2.0)))
}
