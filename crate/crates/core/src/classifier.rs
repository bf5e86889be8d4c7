//! Threshold conditions on initial data and membership in the invariant sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    base_integrals, below_ground_state, coercivity_gap, energy, virial_k, virial_k_via_energy, CoercivityGap,
    FunctionalRecord, GroundBenchmark,
};
use crate::model::{Field, Geometry, ModelParams};
use crate::thresholds::RadialThreshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Plus,
    Minus,
    Outside,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub mass: f64,
    pub energy_gamma: f64,
    pub k_gamma: f64,
    /// `K_gamma` through the energy identity; agrees with `k_gamma` to rounding.
    pub k_gamma_via_energy: f64,
    pub sc: f64,
    /// `M^{1-s_c} E^{s_c}`; absent for nonpositive energy.
    pub mass_energy: Option<f64>,
    pub mass_energy_q: f64,
    pub below_ground_state: bool,
    pub product_plain: f64,
    pub product_gamma: f64,
    pub q_benchmark: f64,
    pub omega_star: f64,
    pub f_at_star: f64,
    /// Verdicts for the four pairs of sets, `j = 1..4`.
    pub memberships: [Membership; 4],
    pub coercivity: Option<CoercivityGap>,
}

/// Maximizer of `f(omega) = omega^{1-s_c} S1 - (omega/2) M - E_gamma` and its value.
pub fn omega_star(rec_u0: &FunctionalRecord, mp: &ModelParams, s1: f64) -> Result<(f64, f64)> {
    if !(rec_u0.mass > 0.0) {
        return Err(Error::ZeroField);
    }
    if !(s1 > 0.0) {
        return Err(Error::InvalidParams("ground-state action must be positive".into()));
    }
    let sc = mp.sc();
    let w0 = (2.0 * (1.0 - sc) * s1 / rec_u0.mass).powf(1.0 / sc);
    Ok((w0, f_omega(w0, rec_u0, mp, s1)))
}

/// `f(omega) = n_{omega,0} - S_{omega,gamma}(u0)`.
pub fn f_omega(omega: f64, rec: &FunctionalRecord, mp: &ModelParams, s1: f64) -> f64 {
    omega.powf(1.0 - mp.sc()) * s1 - 0.5 * omega * rec.mass - energy(rec, mp)
}

fn sign_verdict(k: f64) -> Membership {
    // ties at K = 0 count as plus
    if k >= 0.0 {
        Membership::Plus
    } else {
        Membership::Minus
    }
}

fn product_verdict(value: f64, bench: f64) -> Membership {
    if value < bench {
        Membership::Plus
    } else if value > bench {
        Membership::Minus
    } else {
        Membership::Outside
    }
}

/// Best `omega` for `r_{omega,gamma} - S_{omega,gamma}(u0)`: 25-point log grid on
/// `[1e-2, 1e2]` followed by golden-section refinement around the best point.
fn radial_window(rec: &FunctionalRecord, mp: &ModelParams, table: &dyn RadialThreshold) -> Option<f64> {
    let gap = |lw: f64| {
        let w = lw.exp();
        table.r(w).map(|r| r - 0.5 * w * rec.mass - energy(rec, mp)).unwrap_or(f64::NEG_INFINITY)
    };
    let (lo, hi) = (1e-2f64.ln(), 1e2f64.ln());
    let k: usize = 25;
    let step = (hi - lo) / (k - 1) as f64;
    let (best_i, best) = (0..k)
        .map(|i| (i, gap(lo + i as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    if !best.is_finite() {
        return None;
    }
    let (mut a, mut b) = (lo + best_i.saturating_sub(1) as f64 * step, lo + (best_i + 1).min(k - 1) as f64 * step);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (gap(c), gap(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = gap(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = gap(d);
        }
    }
    Some(best.max(fc).max(fd))
}

/// Evaluate every threshold condition for `u0` against the ground-state benchmark.
pub fn classify(
    u0: &Field,
    mp: &ModelParams,
    q: &GroundBenchmark,
    r_table: Option<&dyn RadialThreshold>,
) -> Result<ClassificationReport> {
    if u0.is_zero() {
        return Err(Error::ZeroField);
    }
    let rec = base_integrals(u0, mp);
    classify_record(&rec, mp, q, r_table, u0.grid().geometry() == Geometry::Radial)
}

pub fn classify_record(
    rec: &FunctionalRecord,
    mp: &ModelParams,
    q: &GroundBenchmark,
    r_table: Option<&dyn RadialThreshold>,
    radial: bool,
) -> Result<ClassificationReport> {
    let sc = mp.sc();
    let e = energy(rec, mp);
    let k = virial_k(rec, mp);
    let below = below_ground_state(rec, mp, q);
    let product_plain = rec.mass.powf((1.0 - sc) / 2.0) * rec.grad_sq.powf(sc / 2.0);
    let product_gamma = rec.mass.powf((1.0 - sc) / 2.0) * rec.kinetic_gamma().powf(sc / 2.0);
    let bench = q.norm_product(sc);
    let (w0, f0) = omega_star(rec, mp, q.action)?;

    let j1 = if below { product_verdict(product_plain, bench) } else { Membership::Outside };
    let j2 = if f0 > 0.0 { sign_verdict(k) } else { Membership::Outside };
    let j3 = if below { product_verdict(product_gamma, bench) } else { Membership::Outside };
    let j4 = match (r_table, radial) {
        (Some(table), true) => match radial_window(rec, mp, table) {
            Some(g) if g > 0.0 => sign_verdict(k),
            Some(_) => Membership::Outside,
            None => Membership::NotApplicable,
        },
        _ => Membership::NotApplicable,
    };
    let coercivity = if below && k < 0.0 { coercivity_gap(rec, q, mp).ok() } else { None };
    Ok(ClassificationReport {
        mass: rec.mass,
        energy_gamma: e,
        k_gamma: k,
        k_gamma_via_energy: virial_k_via_energy(rec, mp),
        sc,
        mass_energy: (e > 0.0).then(|| rec.mass.powf(1.0 - sc) * e.powf(sc)),
        mass_energy_q: q.mass_energy(sc),
        below_ground_state: below,
        product_plain,
        product_gamma,
        q_benchmark: bench,
        omega_star: w0,
        f_at_star: f0,
        memberships: [j1, j2, j3, j4],
        coercivity,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditViolation {
    pub index: usize,
    pub report: ClassificationReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub total: usize,
    pub admitted: usize,
    /// Indices filtered out because the mass-energy condition fails.
    pub excluded: Vec<usize>,
    pub plus: usize,
    pub minus: usize,
    /// Admitted members whose verdicts for `j = 1, 2, 3` disagree.
    pub violators: Vec<AuditViolation>,
    pub reports: Vec<ClassificationReport>,
}

/// Classify a family and check that, below the ground state, the plain and
/// potential products and the sign of `K_gamma` give the same verdict.
pub fn equivalence_audit(family: &[Field], mp: &ModelParams, q: &GroundBenchmark) -> Result<AuditReport> {
    let reports: Vec<ClassificationReport> =
        family.par_iter().map(|f| classify(f, mp, q, None)).collect::<Result<_>>()?;
    audit_reports(reports)
}

pub fn audit_reports(reports: Vec<ClassificationReport>) -> Result<AuditReport> {
    let mut excluded = Vec::new();
    let mut violators = Vec::new();
    let (mut plus, mut minus) = (0, 0);
    for (i, r) in reports.iter().enumerate() {
        if !r.below_ground_state {
            excluded.push(i);
            continue;
        }
        let [j1, j2, j3, _] = r.memberships;
        if j1 == j2 && j2 == j3 && j1 != Membership::Outside {
            if j1 == Membership::Plus {
                plus += 1;
            } else {
                minus += 1;
            }
        } else {
            violators.push(AuditViolation { index: i, report: r.clone() });
        }
    }
    let admitted = reports.len() - excluded.len();
    if admitted == 0 {
        return Err(Error::Empty("no family member satisfies the mass-energy condition".into()));
    }
    Ok(AuditReport { total: reports.len(), admitted, excluded, plus, minus, violators, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mp() -> ModelParams {
        ModelParams::new(3, 3.0, 0.05, 1.0, 1.0).unwrap()
    }

    // Exact Pohozaev-consistent stand-in for Q_{1,0} at d = 3, p = 3: G = 3M, N = 4M.
    fn bench() -> (GroundBenchmark, FunctionalRecord) {
        let rec = FunctionalRecord::new(18.9, 56.7, 0.0, 75.6);
        let free = mp().with_gamma(0.0);
        (GroundBenchmark::from_record(&rec, &free), rec)
    }

    #[test]
    fn omega_star_fixed_point() {
        let (q, _) = bench();
        let m = mp();
        let sc = m.sc();
        let rec = FunctionalRecord::new(2.0 * (1.0 - sc) * q.action, 1.0, 0.1, 1.0);
        assert_relative_eq!(omega_star(&rec, &m, q.action).unwrap().0, 1.0, max_relative = 1e-14);
        assert!(omega_star(&FunctionalRecord::default(), &m, q.action).is_err());
    }

    #[test]
    fn ground_state_sits_on_the_boundary() {
        let (q, rec) = bench();
        let free = mp().with_gamma(0.0);
        let (_, f0) = omega_star(&rec, &free, q.action).unwrap();
        assert!(f0.abs() < 1e-12 * q.action);
    }

    #[test]
    fn f_is_concave() {
        let (q, rec) = bench();
        let m = mp();
        let rec = rec.amplified(0.9, 3.0);
        let (w0, f0) = omega_star(&rec, &m, q.action).unwrap();
        for k in 0..40 {
            let w = 10f64.powf(-2.0 + k as f64 * 0.1);
            assert!(f_omega(w, &rec, &m, q.action) <= f0 + 1e-12);
            let h = 1e-3 * w;
            let second = f_omega(w + h, &rec, &m, q.action) - 2.0 * f_omega(w, &rec, &m, q.action)
                + f_omega(w - h, &rec, &m, q.action);
            assert!(second < 0.0);
        }
        assert!(w0 > 0.0);
    }

    #[test]
    fn scaled_records() {
        let (q, rec) = bench();
        let m = mp();
        let mut rec_small = rec.amplified(0.5, 3.0);
        rec_small.potential = 0.05 * 2.0;
        let r = classify_record(&rec_small, &m, &q, None, true).unwrap();
        assert!(r.below_ground_state);
        assert_eq!(&r.memberships[..3], &[Membership::Plus; 3]);
        assert_eq!(r.memberships[3], Membership::NotApplicable);
        assert!(r.product_gamma >= r.product_plain);
        assert_relative_eq!(r.k_gamma, r.k_gamma_via_energy, max_relative = 1e-12);

        let big = rec.amplified(1.5, 3.0);
        let r = classify_record(&big, &m, &q, None, true).unwrap();
        assert!(r.energy_gamma < 0.0 && r.mass_energy.is_none());
        assert_eq!(&r.memberships[..3], &[Membership::Minus; 3]);
        assert!(r.coercivity.unwrap().delta > 0.0);
    }
}
