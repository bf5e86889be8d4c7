//! Scalar functionals built from the four base integrals `(M, G, P, N)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Field, ModelParams, ScalingPair};

/// Mass, gradient energy, potential term and `L^{p+1}` moment of a field.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FunctionalRecord {
    pub mass: f64,
    pub grad_sq: f64,
    pub potential: f64,
    pub lpp1: f64,
}

impl FunctionalRecord {
    pub fn new(mass: f64, grad_sq: f64, potential: f64, lpp1: f64) -> Self {
        Self { mass, grad_sq, potential, lpp1 }
    }

    /// `||(-Delta_gamma)^{1/2} f||^2 = G + P`.
    pub fn kinetic_gamma(&self) -> f64 {
        self.grad_sq + self.potential
    }

    /// Record of `c f` for a real amplitude `c`.
    pub fn amplified(&self, c: f64, p: f64) -> Self {
        let c2 = c * c;
        Self {
            mass: c2 * self.mass,
            grad_sq: c2 * self.grad_sq,
            potential: c2 * self.potential,
            lpp1: c.abs().powf(p + 1.0) * self.lpp1,
        }
    }
}

pub fn base_integrals(f: &Field, mp: &ModelParams) -> FunctionalRecord {
    let grid = f.grid();
    let u = f.values();
    let mut mass = 0.0;
    let mut potential = 0.0;
    let mut lpp1 = 0.0;
    let pot = mp.potential_on(grid);
    for ((z, w), v) in u.iter().zip(grid.weights()).zip(&pot) {
        let a2 = z.norm_sqr();
        mass += w * a2;
        potential += w * v * a2;
        lpp1 += w * a2.powf((mp.p + 1.0) / 2.0);
    }
    FunctionalRecord { mass, grad_sq: grid.grad_sq(u), potential, lpp1 }
}

/// `E_gamma = (G + P)/2 - N/(p+1)`.
pub fn energy(rec: &FunctionalRecord, mp: &ModelParams) -> f64 {
    0.5 * rec.kinetic_gamma() - rec.lpp1 / (mp.p + 1.0)
}

/// `S_{omega,gamma} = (omega/2) M + E_gamma`.
pub fn action(rec: &FunctionalRecord, mp: &ModelParams) -> f64 {
    0.5 * mp.omega * rec.mass + energy(rec, mp)
}

/// Virial functional `K_gamma = 2G + mu P - d(p-1)/(p+1) N`.
pub fn virial_k(rec: &FunctionalRecord, mp: &ModelParams) -> f64 {
    let d = mp.df();
    2.0 * rec.grad_sq + mp.mu * rec.potential - d * (mp.p - 1.0) / (mp.p + 1.0) * rec.lpp1
}

/// `K_gamma` written through the energy:
/// `d(p-1) E - ((dp - (d+4))/2)(G+P) + (mu - 2) P`.
pub fn virial_k_via_energy(rec: &FunctionalRecord, mp: &ModelParams) -> f64 {
    let d = mp.df();
    let p = mp.p;
    d * (p - 1.0) * energy(rec, mp) - 0.5 * (d * p - (d + 4.0)) * rec.kinetic_gamma()
        + (mp.mu - 2.0) * rec.potential
}

/// Quadratic and nonlinear parts `(A, B)` of `K^{alpha,beta}`, so that
/// `K(c f) = c^2 A - |c|^{p+1} B`.
pub fn k_scaled_parts(rec: &FunctionalRecord, mp: &ModelParams, sp: &ScalingPair) -> Result<(f64, f64)> {
    sp.check(mp.d)?;
    let d = mp.d;
    let a = 0.5 * sp.lambda_under(d) * mp.omega * rec.mass
        + 0.5 * sp.lambda_bar(d) * rec.grad_sq
        + 0.5 * sp.mid(d, mp.mu) * rec.potential;
    let b = ((mp.p + 1.0) * sp.alpha - mp.df() * sp.beta) / (mp.p + 1.0) * rec.lpp1;
    Ok((a, b))
}

/// Scaling derivative `K^{alpha,beta}_{omega,gamma}` of the action.
pub fn k_scaled(rec: &FunctionalRecord, mp: &ModelParams, sp: &ScalingPair) -> Result<f64> {
    let (a, b) = k_scaled_parts(rec, mp, sp)?;
    Ok(a - b)
}

/// `T = S - K_gamma / (d(p-1))`; the `N` terms cancel.
pub fn t_functional(rec: &FunctionalRecord, mp: &ModelParams) -> f64 {
    let c = mp.df() * (mp.p - 1.0);
    0.5 * mp.omega * rec.mass + (0.5 - 2.0 / c) * rec.grad_sq + (0.5 - mp.mu / c) * rec.potential
}

/// `U^{alpha,beta}`, the expanded form of `S - K^{alpha,beta} / lambda_bar`.
pub fn u_functional(rec: &FunctionalRecord, mp: &ModelParams, sp: &ScalingPair) -> Result<f64> {
    sp.check(mp.d)?;
    let lb = sp.lambda_bar(mp.d);
    if lb <= 0.0 {
        return Err(Error::InadmissiblePair { alpha: sp.alpha, beta: sp.beta, reason: "2 alpha - (d-2) beta = 0".into() });
    }
    let (a, b, p) = (sp.alpha, sp.beta, mp.p);
    Ok(b * mp.omega / lb * rec.mass
        + (2.0 - mp.mu) * b / (2.0 * lb) * rec.potential
        + ((p - 1.0) * a - 2.0 * b) / ((p + 1.0) * lb) * rec.lpp1)
}

/// Quadratic form `J_{omega,gamma} = omega M + G + P`.
pub fn h1_action(rec: &FunctionalRecord, mp: &ModelParams) -> f64 {
    mp.omega * rec.mass + rec.kinetic_gamma()
}

/// Gagliardo–Nirenberg quotient `N / (||f||^{p+1-d(p-1)/2} ||(-Delta_gamma)^{1/2} f||^{d(p-1)/2})`.
pub fn gn_ratio(rec: &FunctionalRecord, mp: &ModelParams) -> Result<f64> {
    let kin = rec.kinetic_gamma();
    if !(rec.mass > 0.0 && kin > 0.0 && rec.lpp1 > 0.0) {
        return Err(Error::ZeroField);
    }
    let (d, p) = (mp.df(), mp.p);
    let a = p + 1.0 - d * (p - 1.0) / 2.0;
    let b = d * (p - 1.0) / 2.0;
    Ok(rec.lpp1 / (rec.mass.powf(a / 2.0) * kin.powf(b / 2.0)))
}

/// `g(y) = (d(p-1) y^2 - 4 y^{d(p-1)/2}) / (dp - (d+4))`.
pub fn g_curve(y: f64, mp: &ModelParams) -> f64 {
    let (d, p) = (mp.df(), mp.p);
    (d * (p - 1.0) * y * y - 4.0 * y.powf(d * (p - 1.0) / 2.0)) / (d * p - (d + 4.0))
}

/// Amplitude `lambda*` with `K^{alpha,beta}(lambda* f) = 0`.
pub fn nehari_lambda(rec: &FunctionalRecord, mp: &ModelParams, sp: &ScalingPair) -> Result<f64> {
    let (a, b) = k_scaled_parts(rec, mp, sp)?;
    if !(b > 0.0) {
        return Err(Error::ZeroNonlinearMass);
    }
    Ok((a / b).powf(1.0 / (mp.p - 1.0)))
}

/// Ground-state quantities that enter the threshold conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundBenchmark {
    pub mass: f64,
    pub grad_sq: f64,
    /// `E_0[Q]`.
    pub energy: f64,
    /// `S_{1,0}(Q)`.
    pub action: f64,
}

impl GroundBenchmark {
    pub fn from_record(rec: &FunctionalRecord, mp: &ModelParams) -> Self {
        let free = mp.with_gamma(0.0).with_omega(1.0);
        let rec0 = FunctionalRecord { potential: 0.0, ..*rec };
        Self { mass: rec.mass, grad_sq: rec.grad_sq, energy: energy(&rec0, &free), action: action(&rec0, &free) }
    }

    /// `||Q||^{1-s_c} ||grad Q||^{s_c}`.
    pub fn norm_product(&self, sc: f64) -> f64 {
        self.mass.powf((1.0 - sc) / 2.0) * self.grad_sq.powf(sc / 2.0)
    }

    /// `M[Q]^{1-s_c} E_0[Q]^{s_c}`.
    pub fn mass_energy(&self, sc: f64) -> f64 {
        self.mass.powf(1.0 - sc) * self.energy.powf(sc)
    }
}

/// The mass-energy condition "below the ground state". Nonpositive energy
/// counts as satisfied for nonzero data.
pub fn below_ground_state(rec: &FunctionalRecord, mp: &ModelParams, q: &GroundBenchmark) -> bool {
    if rec.mass <= 0.0 {
        return false;
    }
    let e = energy(rec, mp);
    let sc = mp.sc();
    e <= 0.0 || rec.mass.powf(1.0 - sc) * e.powf(sc) < q.mass_energy(sc)
}

/// Gap `epsilon1` and `delta = d(p-1) epsilon1` bounding `K_gamma` away from zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivityGap {
    pub epsilon1: f64,
    pub delta: f64,
}

pub fn coercivity_gap(rec_u0: &FunctionalRecord, q: &GroundBenchmark, mp: &ModelParams) -> Result<CoercivityGap> {
    if rec_u0.mass <= 0.0 {
        return Err(Error::ZeroField);
    }
    let sc = mp.sc();
    let e = energy(rec_u0, mp);
    let floor = (q.mass / rec_u0.mass).powf((1.0 - sc) / sc) * q.energy;
    let epsilon1 = 0.5 * (floor - e);
    // equality in the mass-energy condition sits at epsilon1 = 0
    if epsilon1 < 0.0 {
        return Err(Error::Condition(format!(
            "mass-energy condition violated: E = {e} exceeds the ground-state level {floor}"
        )));
    }
    Ok(CoercivityGap { epsilon1, delta: mp.df() * (mp.p - 1.0) * epsilon1 })
}
