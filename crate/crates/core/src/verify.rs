//! Executable invariant suites, one per module, at coarse desk-scale settings.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{classify, f_omega, omega_star, Membership};
use crate::error::{Error, Result};
use crate::evolution::{build_cutoffs, evolve, free_gaussian, localized_virial, EvolveConfig, Verdict};
use crate::functionals::{
    action, base_integrals, g_curve, k_scaled, u_functional, virial_k, virial_k_via_energy, FunctionalRecord,
};
use crate::groundstate::{shoot, FlowOptions, ShootOptions};
use crate::model::{scale_field, Field, Geometry, Grid, ModelParams, ScalingPair};
use crate::thresholds::{default_pairs, r_threshold};

pub const SUITES: [&str; 6] = ["model", "functionals", "groundstate", "thresholds", "classifier", "evolution"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: Vec::new() }
    }

    /// Record `value <= tolerance`.
    fn below(&mut self, name: &str, value: f64, tolerance: f64) {
        self.checks.push(Check {
            suite: self.name.into(),
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }

    fn holds(&mut self, name: &str, ok: bool) {
        self.below(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Run one suite by name.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<Check>> {
    match name {
        "model" => model_suite(seed),
        "functionals" => functionals_suite(seed),
        "groundstate" => groundstate_suite(),
        "thresholds" => thresholds_suite(),
        "classifier" => classifier_suite(seed),
        "evolution" => evolution_suite(),
        other => Err(Error::InvalidParams(format!("unknown suite {other:?}; expected one of {SUITES:?}"))),
    }
}

fn random_field(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> Field {
    let a = rng.gen_range(0.2..2.0);
    let w: f64 = rng.gen_range(0.5..2.0);
    let b = rng.gen_range(-1.0..1.0);
    Field::from_fn(grid.clone(), |x| Complex64::from_polar(a * (-x * x / (2.0 * w * w)).exp(), b * x * x))
        .expect("finite samples")
}

fn model_suite(seed: u64) -> Result<Vec<Check>> {
    let mut s = Suite::new("model");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // shell weights integrate constants exactly; the line midpoint rule integrates linears
    for d in 1..=4 {
        let g = Grid::new(Geometry::Radial, 3.0, 300, d)?;
        let vol = crate::model::sphere_measure(d) * 3f64.powi(d as i32) / d as f64;
        s.below(&format!("ball volume d={d}"), rel(g.integrate(std::iter::repeat(1.0)), vol), 10.0 * f64::EPSILON * 300.0);
    }
    let line = Grid::new(Geometry::Line, 2.0, 400, 1)?;
    let lin = line.integrate(line.nodes().iter().map(|x| 3.0 + 2.0 * x));
    s.below("line linear quadrature", rel(lin, 12.0), 10.0 * f64::EPSILON * 400.0);

    // Laplacian symmetric and nonpositive in the weighted inner product
    for geom in [Geometry::Radial, Geometry::Line] {
        let g = Arc::new(Grid::new(geom, 8.0, 256, if geom == Geometry::Line { 1 } else { 3 })?);
        let mut worst_sym = 0.0f64;
        let mut worst_sign = f64::NEG_INFINITY;
        for _ in 0..20 {
            let u: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let v: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let (lu, lv) = (g.laplacian(&u), g.laplacian(&v));
            let ip = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
                a.iter().zip(b).zip(g.weights()).map(|((x, y), w)| x.conj() * y * *w).sum()
            };
            let a = ip(&u, &lv);
            let b = ip(&lu, &v);
            worst_sym = worst_sym.max((a - b).norm() / a.norm().max(1.0));
            worst_sign = worst_sign.max(ip(&u, &lu).re);
        }
        s.below(&format!("laplacian symmetric ({geom:?})"), worst_sym, 1e-12);
        s.below(&format!("laplacian nonpositive ({geom:?})"), worst_sign, 0.0);
    }

    // dilations compose
    let g = Arc::new(Grid::new(Geometry::Radial, 20.0, 2000, 3)?);
    let f = Field::from_fn(g.clone(), |r| Complex64::new((-r * r / 2.0).exp(), 0.0))?;
    let sp = ScalingPair { alpha: 1.5, beta: 1.0 };
    let two = scale_field(&scale_field(&f, &sp, 0.1).field, &sp, 0.2).field;
    let once = scale_field(&f, &sp, 0.3).field;
    let err = two.values().iter().zip(once.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    s.below("scale_field composes", err, 1e-6);
    Ok(s.checks)
}

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range((1e-3f64).ln()..(1e3f64).ln()).exp()
}

fn functionals_suite(seed: u64) -> Result<Vec<Check>> {
    let mut s = Suite::new("functionals");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mp = ModelParams::new(3, 3.0, 0.7, 1.2, 1.3)?;
    let pairs = [ScalingPair::virial(3), ScalingPair::nehari(), ScalingPair { alpha: 3.0, beta: 1.0 }];
    let (mut e065, mut eu, mut bitwise) = (0.0f64, 0.0f64, true);
    for _ in 0..1000 {
        let rec = FunctionalRecord::new(log_uniform(&mut rng), log_uniform(&mut rng), log_uniform(&mut rng), log_uniform(&mut rng));
        let k = virial_k(&rec, &mp);
        let scale = 2.0 * rec.grad_sq + mp.mu * rec.potential + 1.5 * rec.lpp1;
        e065 = e065.max((virial_k_via_energy(&rec, &mp) - k).abs() / scale);
        bitwise &= k_scaled(&rec, &mp, &ScalingPair::virial(3))? == k;
        for sp in &pairs {
            let lb = sp.lambda_bar(3);
            let lhs = action(&rec, &mp) - k_scaled(&rec, &mp, sp)? / lb;
            let mag = mp.omega * rec.mass + rec.grad_sq + rec.potential + rec.lpp1;
            eu = eu.max((lhs - u_functional(&rec, &mp, sp)?).abs() / mag);
        }
    }
    s.below("virial via energy", e065, 1e-12);
    s.holds("K^{d,2} equals K_gamma bitwise", bitwise);
    s.below("U expansion", eu, 1e-12);
    s.below("g(1) = 1", (g_curve(1.0, &mp) - 1.0).abs(), 1e-14);
    let h = 1e-4;
    let slope = (g_curve(1.0 + h, &mp) - g_curve(1.0 - h, &mp)) / (2.0 * h);
    s.below("g'(1) = 0", slope.abs(), 1e-6);
    Ok(s.checks)
}

fn groundstate_suite() -> Result<Vec<Check>> {
    let mut s = Suite::new("groundstate");
    let mp = ModelParams::new(1, 7.0, 0.0, 0.5, 1.0)?;
    let g = Arc::new(Grid::new(Geometry::Line, 20.0, 16384, 1)?);
    let gs = shoot(&mp, &g, &ShootOptions::default())?;
    let sup = g
        .nodes()
        .iter()
        .zip(gs.values())
        .map(|(&x, v)| (v - 4f64.powf(1.0 / 6.0) * (1.0 / (3.0 * x).cosh()).powf(1.0 / 3.0)).abs())
        .fold(0.0, f64::max);
    s.below("sech soliton sup error", sup, 1e-8);
    s.below("soliton Pohozaev", gs.pohozaev_res.0.max(gs.pohozaev_res.1), 1e-5);

    let mp3 = ModelParams::new(3, 3.0, 0.0, 1.0, 1.0)?;
    let g3 = Arc::new(Grid::new(Geometry::Radial, 20.0, 16000, 3)?);
    let q = shoot(&mp3, &g3, &ShootOptions::default())?;
    s.below("d=3 Pohozaev", q.pohozaev_res.0.max(q.pohozaev_res.1), 1e-5);
    for sp in default_pairs(3) {
        s.below(&format!("K^({},{})(Q) = 0", sp.alpha, sp.beta), q.k_scaled_relative(&sp)?.abs(), 1e-5);
    }
    Ok(s.checks)
}

fn thresholds_suite() -> Result<Vec<Check>> {
    let mut s = Suite::new("thresholds");
    let mp = ModelParams::new(3, 3.0, 1.0, 1.0, 1.0)?;
    let g = Arc::new(Grid::new(Geometry::Radial, 20.0, 4000, 3)?);
    let seed = Field::from_fn(g.clone(), |r| Complex64::new(2.0 * (-r * r / 2.0).exp(), 0.0))?;
    let opts = FlowOptions::default();
    let rt = r_threshold(1.0, &mp, &default_pairs(3), &seed, &opts)?;
    s.below("pair agreement", rt.spread, 1e-4);
    let q = shoot(&mp.with_gamma(0.0), &g, &ShootOptions { tol: 1e-4, ..Default::default() })?;
    s.below("r exceeds n", -(rt.r - q.action_value - 10.0 * opts.tol * rt.r), 0.0);
    Ok(s.checks)
}

fn classifier_suite(seed: u64) -> Result<Vec<Check>> {
    let mut s = Suite::new("classifier");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mp0 = ModelParams::new(3, 3.0, 0.0, 1.0, 1.0)?;
    let g = Arc::new(Grid::new(Geometry::Radial, 20.0, 4000, 3)?);
    let q = shoot(&mp0, &g, &ShootOptions { tol: 1e-4, ..Default::default() })?;
    let bench = q.benchmark();
    let mp = mp0.with_gamma(0.05);
    let r = classify(&q.profile.scaled(0.9), &mp, &bench, None)?;
    s.holds("0.9 Q is plus for j = 1, 2, 3", r.memberships[..3].iter().all(|m| *m == Membership::Plus));

    let (mut agree, mut one_sided, mut neg_minus, mut consistent) = (true, true, true, 0.0f64);
    for _ in 0..200 {
        let f = random_field(&g, &mut rng);
        let rep = classify(&f, &mp, &bench, None)?;
        consistent = consistent.max(rel(rep.k_gamma_via_energy, rep.k_gamma));
        if rep.below_ground_state {
            let [a, b, c, _] = rep.memberships;
            agree &= a == b && b == c;
        }
        if rep.product_gamma < rep.q_benchmark {
            one_sided &= rep.product_plain < rep.q_benchmark;
        }
        if rep.energy_gamma <= 0.0 {
            neg_minus &= rep.memberships[..3].iter().all(|m| *m == Membership::Minus);
        }
    }
    s.holds("verdicts agree for j = 1, 2, 3", agree);
    s.holds("product_gamma below implies product_plain below", one_sided);
    s.holds("nonpositive energy classifies minus", neg_minus);
    s.below("K_gamma via energy", consistent, 1e-10);

    // f(omega) strictly concave with maximum at omega_star
    let rec = base_integrals(&q.profile.scaled(0.7), &mp);
    let (w0, f0) = omega_star(&rec, &mp, bench.action)?;
    let mut concave = true;
    let mut below_max = true;
    for k in 1..40 {
        let w = 10f64.powf(-2.0 + 4.0 * k as f64 / 40.0);
        let (a, b, c) = (f_omega(w * 0.99, &rec, &mp, bench.action), f_omega(w, &rec, &mp, bench.action), f_omega(w * 1.01, &rec, &mp, bench.action));
        concave &= a + c < 2.0 * b + 1e-12 * b.abs();
        below_max &= b <= f0 + 1e-12 * f0.abs();
    }
    s.holds("f concave on a log grid", concave);
    s.holds(&format!("f maximal at omega0 = {w0:.6}"), below_max);
    Ok(s.checks)
}

fn evolution_suite() -> Result<Vec<Check>> {
    let mut s = Suite::new("evolution");
    let g = Arc::new(Grid::new(Geometry::Radial, 30.0, 600, 3)?);
    let w = build_cutoffs(5.0, &g)?;
    let over = w.x[2].iter().chain(&w.x_face[2]).map(|v| v - 2.0).fold(f64::NEG_INFINITY, f64::max);
    s.below("cutoff X'' <= 2", over, 1e-8);

    let line = Arc::new(Grid::new(Geometry::Line, 20.0, 1024, 1)?);
    let u0 = Field::from_fn(line.clone(), |x| free_gaussian(x, 0.0, 1.0))?;
    let mp1 = ModelParams::new(1, 7.0, 0.0, 0.5, 1.0)?;
    let cfg = EvolveConfig { t_end: 1.0, dt0: 0.05, c_dt: 1e6, dt_min: 1e-6, linear_only: true, ..Default::default() };
    let tr = evolve(&u0, &mp1, &cfg)?;
    let peak = free_gaussian(0.0, 1.0, 1.0).norm();
    let err = tr
        .final_state
        .values()
        .iter()
        .zip(line.nodes())
        .map(|(z, &x)| (z - free_gaussian(x, 1.0, 1.0)).norm())
        .fold(0.0, f64::max);
    s.below("free Gaussian on the line", err / peak, 1e-6);

    let mp = ModelParams::new(3, 3.0, 0.05, 1.0, 1.0)?;
    let g = Arc::new(Grid::new(Geometry::Radial, 40.0, 4000, 3)?);
    let u0 = Field::from_fn(g.clone(), |r| Complex64::new(1.5 * (-r * r / 2.0).exp(), 0.0))?;
    let cfg = EvolveConfig { t_end: 0.5, dt0: 1e-3, c_dt: 1.0, dt_min: 1e-6, ..Default::default() };
    let mut lv = Vec::new();
    let w = build_cutoffs(4.0, &g)?;
    let tr = evolve_observed(&u0, &mp, &cfg, |t, f| lv.push((t, localized_virial(f, &mp, &w))))?;
    s.holds("short run stays global", tr.verdict == Verdict::GlobalWindow);
    s.below("mass drift", tr.drift(|r| r.mass), 1e-8);
    s.below("virial second difference", tr.virial_mismatch().unwrap_or(f64::INFINITY), 1e-2);
    let lv: Vec<(f64, f64, f64)> = lv.into_iter().map(|(t, r)| r.map(|v| (t, v.i, v.iddot))).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for k in 1..lv.len() - 1 {
        let h = lv[k].0 - lv[k - 1].0;
        let dd = (lv[k + 1].1 - 2.0 * lv[k].1 + lv[k - 1].1) / (h * h);
        worst = worst.max((dd - lv[k].2).abs() / lv[k].2.abs());
    }
    s.below("localized virial second difference", worst, 1e-2);
    Ok(s.checks)
}

fn evolve_observed(
    u0: &Field,
    mp: &ModelParams,
    cfg: &EvolveConfig,
    mut f: impl FnMut(f64, &Field),
) -> Result<crate::evolution::EvolutionTrace> {
    crate::evolution::evolve_with(u0, mp, cfg, &mut |row, field| f(row.t, field))
}

/// Run every named suite, collecting all checks.
pub fn run_all(names: &[String], seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in names {
        out.extend(run_suite(n, seed)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("astrology", 0).is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        for name in ["model", "functionals"] {
            for c in run_suite(name, 3).unwrap() {
                assert!(c.passed, "{c:?}");
            }
        }
    }
}
