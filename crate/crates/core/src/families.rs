//! Built-in initial data families.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Field, Geometry, Grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    /// `amplitude * Q` for a supplied ground state.
    ScaledQ { amplitude: f64 },
    /// `a exp(-|x|^2 / (2 s^2))`.
    Gaussian { amplitude: f64, width: f64 },
    /// Gaussian times the phase `exp(i b |x|^2)`.
    ChirpedGaussian { amplitude: f64, width: f64, chirp: f64 },
    /// Central Gaussian plus a second bump at distance `offset`: a shell in
    /// radial geometry, a shifted copy on the line.
    TwoBump { amplitude: f64, second: f64, offset: f64, width: f64 },
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::ScaledQ { .. } => "scaled-Q",
            Profile::Gaussian { .. } => "gaussian",
            Profile::ChirpedGaussian { .. } => "chirped-gaussian",
            Profile::TwoBump { .. } => "two-bump",
        }
    }

    /// Sample the profile on `grid`; `q` is required for `ScaledQ`.
    pub fn build(&self, grid: &Arc<Grid>, q: Option<&Field>) -> Result<Field> {
        let gauss = |x: f64, w: f64| (-x * x / (2.0 * w * w)).exp();
        match *self {
            Profile::ScaledQ { amplitude } => {
                let q = q.ok_or_else(|| Error::InvalidField("scaled-Q needs a ground state".into()))?;
                if q.grid().len() != grid.len() || q.grid().extent() != grid.extent() {
                    return Err(Error::InvalidGrid("ground state lives on a different grid".into()));
                }
                Ok(Field::new(grid.clone(), q.scaled(amplitude).into_values())?)
            }
            Profile::Gaussian { amplitude, width } => {
                check_width(width)?;
                Field::from_fn(grid.clone(), |x| Complex64::new(amplitude * gauss(x, width), 0.0))
            }
            Profile::ChirpedGaussian { amplitude, width, chirp } => {
                check_width(width)?;
                Field::from_fn(grid.clone(), |x| Complex64::from_polar(amplitude * gauss(x, width), chirp * x * x))
            }
            Profile::TwoBump { amplitude, second, offset, width } => {
                check_width(width)?;
                let line = grid.geometry() == Geometry::Line;
                Field::from_fn(grid.clone(), |x| {
                    let v = if line {
                        amplitude * gauss(x + 0.5 * offset, width) + second * gauss(x - 0.5 * offset, width)
                    } else {
                        amplitude * gauss(x, width) + second * gauss(x - offset, width)
                    };
                    Complex64::new(v, 0.0)
                })
            }
        }
    }
}

fn check_width(w: f64) -> Result<()> {
    if w > 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidField(format!("width must be positive, got {w}")))
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Seeded random members of the named family (`gaussian`, `chirped-gaussian`,
/// `two-bump`, or `mixed` for an even split of the three).
pub fn random_profiles(kind: &str, count: usize, seed: u64) -> Result<Vec<Profile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = ["gaussian", "chirped-gaussian", "two-bump"];
    if kind != "mixed" && !kinds.contains(&kind) {
        return Err(Error::InvalidField(format!("unknown random family {kind:?}")));
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let k = if kind == "mixed" { kinds[i % 3] } else { kind };
        let amplitude = log_uniform(&mut rng, 0.05, 3.0);
        let width = log_uniform(&mut rng, 0.4, 3.0);
        out.push(match k {
            "gaussian" => Profile::Gaussian { amplitude, width },
            "chirped-gaussian" => Profile::ChirpedGaussian { amplitude, width, chirp: rng.gen_range(-1.0..1.0) },
            _ => Profile::TwoBump {
                amplitude,
                second: amplitude * rng.gen_range(0.1..1.0),
                offset: rng.gen_range(2.0..6.0),
                width: width.min(1.5),
            },
        });
    }
    Ok(out)
}

/// Read an expression-free tabulated profile: whitespace-separated lines of
/// `x re [im]`, `#` comments allowed. Coordinates must match the grid nodes.
pub fn read_tabulated<R: std::io::BufRead>(r: R, grid: &Arc<Grid>) -> Result<Field> {
    let mut vals = Vec::with_capacity(grid.len());
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = t
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Parse { line: k + 1, msg: format!("bad number {s:?}") }))
            .collect::<Result<_>>()?;
        if !(2..=3).contains(&nums.len()) {
            return Err(Error::Parse { line: k + 1, msg: format!("expected 2 or 3 columns, got {}", nums.len()) });
        }
        let j = vals.len();
        if j >= grid.len() {
            return Err(Error::Parse { line: k + 1, msg: "more samples than grid nodes".into() });
        }
        let x = grid.nodes()[j];
        if (nums[0] - x).abs() > 1e-9 * grid.extent() {
            return Err(Error::Parse { line: k + 1, msg: format!("coordinate {} does not match node {x}", nums[0]) });
        }
        vals.push(Complex64::new(nums[1], nums.get(2).copied().unwrap_or(0.0)));
    }
    if vals.is_empty() {
        return Err(Error::Empty("tabulated profile has no samples".into()));
    }
    Field::new(grid.clone(), vals)
}
