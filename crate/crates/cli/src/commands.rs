use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nlslab::classifier::{audit_reports, classify, ClassificationReport};
use nlslab::evolution::{evolve, write_trace, EvolutionTrace, EvolveConfig, TraceFooter};
use nlslab::families::{random_profiles, read_tabulated, Profile};
use nlslab::functionals::{
    action, base_integrals, coercivity_gap, energy, gn_ratio, virial_k, GroundBenchmark,
};
use nlslab::groundstate::{
    cgn_constant, nehari_flow, read_groundstate, rescale_omega, shoot, write_groundstate, FlowOptions, GroundStateSolution,
    Method, ShootOptions,
};
use nlslab::model::{Field, Geometry, Grid, ModelParams, ScalingPair};
use nlslab::thresholds::{
    default_pairs, n_threshold, nonattainment_experiment, r_threshold, RadialThreshold, ThresholdReport, ThresholdTable,
};
use nlslab::verify::{run_all, SUITES};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{InitialSpec, RunConfig};
use crate::error::CliError;

pub struct Context {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub seed: u64,
    pub quiet: bool,
}

impl Context {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        self.note(format!("wrote {}", path.display()));
        Ok(())
    }

    fn write_trace(&self, name: &str, trace: &EvolutionTrace) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        write_trace(&mut w, trace)?;
        w.flush()?;
        self.note(format!("wrote {}", path.display()));
        Ok(())
    }
}

/// Reference shooting grids: `[0, 20]` with these node counts.
const REFERENCE_EXTENT: f64 = 20.0;
const REFERENCE_RADIAL_N: usize = 8000;
const REFERENCE_LINE_N: usize = 16384;

/// `Q_{1,0}` for the configured `(d, p)`: the benchmark and the profile on
/// `grid`. Coarse or very wide grids get it from the reference grid,
/// resampled, since shooting needs a fine mesh and its cost grows with the
/// extent.
fn reference_q(cfg: &RunConfig, grid: &Arc<Grid>) -> Result<(GroundStateSolution, Field), CliError> {
    let mp0 = cfg.model_params(1.0)?.with_gamma(0.0);
    let opts = ShootOptions::default();
    let n = match grid.geometry() {
        Geometry::Radial => REFERENCE_RADIAL_N,
        Geometry::Line => REFERENCE_LINE_N,
    };
    let reference = Arc::new(Grid::new(grid.geometry(), REFERENCE_EXTENT, n, grid.d())?);
    if grid.extent() <= 1.5 * REFERENCE_EXTENT && grid.h() <= reference.h() * (1.0 + 1e-12) {
        let gs = shoot(&mp0, grid, &opts)?;
        let profile = gs.profile.clone();
        return Ok((gs, profile));
    }
    let gs = shoot(&mp0, &reference, &opts)?;
    let profile = gs.profile.resample(grid)?;
    Ok((gs, profile))
}

fn gaussian_seed(grid: &Arc<Grid>, mp: &ModelParams) -> Result<Field, CliError> {
    let w = mp.omega;
    let a = 2.0 * w.powf(1.0 / (mp.p - 1.0));
    Ok(Field::from_fn(grid.clone(), |x| (a * (-w * x * x / 2.0).exp()).into())?)
}

/// Build the initial data; `Random` yields several members.
fn initial_fields(
    cfg: &RunConfig,
    seed: u64,
    grid: &Arc<Grid>,
    q: &mut Option<Field>,
) -> Result<Vec<(String, Field)>, CliError> {
    let spec = cfg.initial.clone().ok_or_else(|| CliError::Usage("missing [initial] section".into()))?;
    let mut q_field = |cfg: &RunConfig| -> Result<Field, CliError> {
        if q.is_none() {
            *q = Some(reference_q(cfg, grid)?.1);
        }
        Ok(q.clone().expect("set above"))
    };
    match spec {
        InitialSpec::GroundstateFile { path, amplitude } => {
            let file = read_groundstate(BufReader::new(File::open(&path)?))?;
            let f = file.field()?;
            let f = if f.grid().len() == grid.len() && f.grid().extent() == grid.extent() && f.grid().geometry() == grid.geometry() {
                Field::new(grid.clone(), f.into_values())?
            } else {
                f.resample(grid)?
            };
            Ok(vec![(format!("file:{}", path.display()), f.scaled(amplitude))])
        }
        InitialSpec::Tabulated { path } => {
            let f = read_tabulated(BufReader::new(File::open(&path)?), grid)?;
            Ok(vec![(format!("tabulated:{}", path.display()), f)])
        }
        InitialSpec::Random { family, count } => {
            let profiles = random_profiles(&family, count, seed)?;
            profiles.iter().map(|p| Ok((label(p), p.build(grid, None)?))).collect()
        }
        other => {
            let p = other.profile().expect("built-in profile");
            let q = if matches!(p, Profile::ScaledQ { .. }) { Some(q_field(cfg)?) } else { None };
            Ok(vec![(label(&p), p.build(grid, q.as_ref())?)])
        }
    }
}

fn label(p: &Profile) -> String {
    serde_json::to_string(p).unwrap_or_else(|_| p.name().to_string())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GroundstateDiagnostics {
    pub d: usize,
    pub p: f64,
    pub gamma: f64,
    pub mu: f64,
    pub omega: f64,
    pub method: Method,
    pub geometry: Geometry,
    pub extent: f64,
    pub n: usize,
    pub sp_residual: f64,
    pub lagrange_residual: f64,
    pub pohozaev: [f64; 2],
    pub mass: f64,
    pub grad_sq: f64,
    pub potential: f64,
    pub lpp1: f64,
    pub energy: f64,
    pub action: f64,
    pub virial_k: f64,
    /// Best Gagliardo–Nirenberg constant from the ground state (gamma = 0).
    pub cgn: Option<f64>,
    /// The quotient evaluated on the profile itself.
    pub gn_ratio: Option<f64>,
}

pub fn cmd_groundstate(ctx: &Context) -> Result<(), CliError> {
    let sec = ctx.cfg.groundstate();
    let mp = ctx.cfg.model_params(sec.omega)?;
    let grid = Arc::new(ctx.cfg.grid()?);
    let gs = match sec.method {
        Method::Shoot => shoot(&mp, &grid, &ShootOptions { tol: sec.tol, ..Default::default() })?,
        Method::Flow => {
            let seed = gaussian_seed(&grid, &mp)?;
            nehari_flow(&mp, &ScalingPair::nehari(), &seed, &FlowOptions { tol: sec.tol, max_iter: sec.max_iter })?
        }
    };
    let path = ctx.path("groundstate.dat");
    let mut w = BufWriter::new(File::create(&path)?);
    write_groundstate(&mut w, &gs)?;
    w.flush()?;
    ctx.note(format!("wrote {}", path.display()));
    let rec = gs.record;
    let diag = GroundstateDiagnostics {
        d: mp.d,
        p: mp.p,
        gamma: mp.gamma,
        mu: mp.mu,
        omega: mp.omega,
        method: gs.method,
        geometry: grid.geometry(),
        extent: grid.extent(),
        n: grid.len(),
        sp_residual: gs.sp_residual,
        lagrange_residual: gs.lagrange_residual,
        pohozaev: [gs.pohozaev_res.0, gs.pohozaev_res.1],
        mass: rec.mass,
        grad_sq: rec.grad_sq,
        potential: rec.potential,
        lpp1: rec.lpp1,
        energy: energy(&rec, &mp),
        action: action(&rec, &mp),
        virial_k: virial_k(&rec, &mp),
        cgn: cgn_constant(&gs).ok(),
        gn_ratio: gn_ratio(&rec, &mp).ok(),
    };
    ctx.write_json("groundstate.json", &diag)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyOutput {
    pub gamma: f64,
    pub benchmark: GroundBenchmark,
    pub labels: Vec<String>,
    pub reports: Vec<ClassificationReport>,
    pub admitted: usize,
    pub plus: usize,
    pub minus: usize,
    pub excluded: Vec<usize>,
    pub violators: Vec<usize>,
}

pub fn cmd_classify(ctx: &Context) -> Result<(), CliError> {
    let mp = ctx.cfg.model_params(1.0)?;
    let grid = Arc::new(ctx.cfg.grid()?);
    let (q, q_field) = reference_q(&ctx.cfg, &grid)?;
    let bench = q.benchmark();
    let fields = initial_fields(&ctx.cfg, ctx.seed, &grid, &mut Some(q_field))?;
    let sec = ctx.cfg.classify.unwrap_or_default();
    let table = if sec.radial_threshold && grid.geometry() == Geometry::Radial && mp.gamma > 0.0 {
        let seed = gaussian_seed(&grid, &mp)?;
        Some(ThresholdTable::build(&mp, &seed, 1e-2, 1e2, sec.table_points, &FlowOptions::default())?)
    } else {
        None
    };
    let reports = fields
        .par_iter()
        .map(|(_, f)| classify(f, &mp, &bench, table.as_ref().map(|t| t as &dyn RadialThreshold)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = ClassifyOutput {
        gamma: mp.gamma,
        benchmark: bench,
        labels: fields.iter().map(|(l, _)| l.clone()).collect(),
        reports: reports.clone(),
        admitted: 0,
        plus: 0,
        minus: 0,
        excluded: (0..reports.len()).collect(),
        violators: Vec::new(),
    };
    match audit_reports(reports) {
        Ok(a) => {
            out.admitted = a.admitted;
            out.plus = a.plus;
            out.minus = a.minus;
            out.excluded = a.excluded;
            out.violators = a.violators.iter().map(|v| v.index).collect();
        }
        Err(nlslab::Error::Empty(_)) => {}
        Err(e) => return Err(e.into()),
    }
    ctx.write_json("classify.json", &out)?;
    if !out.violators.is_empty() {
        return Err(CliError::Invariant(format!("{} inputs with disagreeing verdicts", out.violators.len())));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolveSummary {
    pub label: String,
    pub footer: TraceFooter,
    pub boundary_flagged: bool,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub virial_mismatch: Option<f64>,
    pub k_sign_constant: bool,
    /// `delta` of the coercivity gap when the data start below the ground
    /// state with `K_gamma < 0`.
    pub coercivity_delta: Option<f64>,
    /// `max_t (K_gamma(u(t)) + delta)`; negative means `K < -delta` throughout.
    pub coercivity_margin: Option<f64>,
}

fn summarize(label: String, u0: &Field, mp: &ModelParams, bench: &GroundBenchmark, trace: &EvolutionTrace) -> EvolveSummary {
    let rec = base_integrals(u0, mp);
    let k0 = virial_k(&rec, mp);
    let delta = if k0 < 0.0 { coercivity_gap(&rec, bench, mp).ok().map(|g| g.delta) } else { None };
    let margin = delta.map(|d| trace.rows.iter().map(|r| r.k_gamma + d).fold(f64::NEG_INFINITY, f64::max));
    EvolveSummary {
        label,
        footer: trace.footer(),
        boundary_flagged: trace.boundary_flagged(),
        mass_drift: trace.drift(|r| r.mass),
        energy_drift: trace.drift(|r| r.energy),
        virial_mismatch: trace.virial_mismatch(),
        k_sign_constant: trace.rows.iter().all(|r| (r.k_gamma >= 0.0) == (k0 >= 0.0)),
        coercivity_delta: delta,
        coercivity_margin: margin,
    }
}

fn evolve_config(cfg: &RunConfig) -> Result<EvolveConfig, CliError> {
    cfg.evolve.clone().ok_or_else(|| CliError::Usage("missing [evolve] section".into()))
}

pub fn cmd_evolve(ctx: &Context) -> Result<(), CliError> {
    let mp = ctx.cfg.model_params(1.0)?;
    let grid = Arc::new(ctx.cfg.grid()?);
    let ecfg = evolve_config(&ctx.cfg)?;
    let (q, q_field) = reference_q(&ctx.cfg, &grid)?;
    let mut fields = initial_fields(&ctx.cfg, ctx.seed, &grid, &mut Some(q_field))?;
    if fields.len() != 1 {
        return Err(CliError::Usage("evolve needs a single initial datum, not a random family".into()));
    }
    let (label, u0) = fields.remove(0);
    let trace = evolve(&u0, &mp, &ecfg)?;
    ctx.write_trace("trace.csv", &trace)?;
    let summary = summarize(label, &u0, &mp, &q.benchmark(), &trace);
    ctx.note(format!("verdict: {} at t = {}", trace.verdict, trace.t_final));
    ctx.write_json("evolve.json", &summary)
}

pub fn cmd_sweep(ctx: &Context) -> Result<(), CliError> {
    let mp = ctx.cfg.model_params(1.0)?;
    let grid = Arc::new(ctx.cfg.grid()?);
    let ecfg = evolve_config(&ctx.cfg)?;
    let amps = ctx.cfg.sweep.clone().ok_or_else(|| CliError::Usage("missing [sweep] section".into()))?.amplitudes;
    if amps.is_empty() {
        return Err(CliError::Usage("sweep needs at least one amplitude".into()));
    }
    let (q, q_field) = reference_q(&ctx.cfg, &grid)?;
    let bench = q.benchmark();
    let runs = amps
        .par_iter()
        .enumerate()
        .map(|(k, &a)| -> Result<EvolveSummary, CliError> {
            let u0 = q_field.scaled(a);
            let trace = evolve(&u0, &mp, &ecfg)?;
            ctx.write_trace(&format!("sweep_{k:03}.csv"), &trace)?;
            Ok(summarize(format!("{a} Q"), &u0, &mp, &bench, &trace))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ctx.write_json("sweep.json", &runs)
}

pub fn cmd_thresholds(ctx: &Context) -> Result<(), CliError> {
    let sec = ctx.cfg.thresholds.clone().ok_or_else(|| CliError::Usage("missing [thresholds] section".into()))?;
    let mp = ctx.cfg.model_params(1.0)?;
    let grid = Arc::new(ctx.cfg.grid()?);
    let d = mp.d;
    let pairs: Vec<ScalingPair> = match &sec.pairs {
        Some(list) => list
            .iter()
            .map(|[a, b]| ScalingPair::new(*a, *b, d))
            .collect::<Result<_, _>>()
            .map_err(CliError::usage)?,
        None => default_pairs(d),
    };
    let (q, _) = reference_q(&ctx.cfg, &grid)?;
    let opts = FlowOptions { tol: sec.tol, max_iter: sec.max_iter };
    let mut reports = Vec::new();
    let mut q_line: Option<GroundStateSolution> = None;
    for &omega in &sec.omegas {
        let n = n_threshold(omega, &q)?;
        let mpw = mp.with_omega(omega);
        let mut rep = ThresholdReport {
            omega,
            gamma: mp.gamma,
            n,
            r: None,
            spread: None,
            pairs: Vec::new(),
            nonattainment: Vec::new(),
        };
        match grid.geometry() {
            Geometry::Radial if mp.gamma > 0.0 => {
                let seed = gaussian_seed(&grid, &mpw)?;
                let rt = r_threshold(omega, &mp, &pairs, &seed, &opts)?;
                rep.r = Some(rt.r);
                rep.spread = Some(rt.spread);
                rep.pairs = rt.pairs;
            }
            Geometry::Line if !sec.shifts.is_empty() => {
                // Translations need the true profile on this grid, not a resampled one.
                let q_here = match &q_line {
                    Some(q) => q.clone(),
                    None => {
                        let q = shoot(&mp.with_gamma(0.0), &grid, &ShootOptions::default())?;
                        q_line = Some(q.clone());
                        q
                    }
                };
                let qw = if omega == 1.0 { q_here } else { rescale_omega(&q_here, omega)? };
                let sp = pairs.iter().copied().find(|p| p.beta == 0.0).unwrap_or_else(ScalingPair::nehari);
                rep.nonattainment = nonattainment_experiment(&mpw, &sp, &qw, &sec.shifts)?;
            }
            _ => {}
        }
        reports.push(rep);
    }
    ctx.write_json("thresholds.json", &reports)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<nlslab::verify::Check>,
}

pub fn cmd_verify(ctx: &Context) -> Result<(), CliError> {
    let names: Vec<String> = match &ctx.cfg.verify {
        Some(v) => v.suites.clone(),
        None => SUITES.iter().map(|s| s.to_string()).collect(),
    };
    let checks = run_all(&names, ctx.seed).map_err(|e| match e {
        nlslab::Error::InvalidParams(m) => CliError::Usage(m),
        other => other.into(),
    })?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if !ctx.quiet {
        for c in &checks {
            println!(
                "{} {}/{}: {:e} (tolerance {:e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.value,
                c.tolerance
            );
        }
    }
    let out = VerifyOutput { seed: ctx.seed, passed: checks.len() - failed, failed, checks };
    ctx.write_json("verify.json", &out)?;
    if failed > 0 {
        return Err(CliError::Invariant(format!("{failed} invariant checks failed")));
    }
    Ok(())
}

pub fn ensure_dir(p: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(p).map_err(|e| CliError::Usage(format!("cannot create output directory {}: {e}", p.display())))
}
