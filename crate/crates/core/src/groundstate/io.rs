use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::Arc;

use super::{GroundStateSolution, Method};
use crate::error::{Error, Result};
use crate::model::{Field, Geometry, Grid, ModelParams};

/// Write a ground state as `# key=value` headers followed by
/// `coordinate value` lines at 17 significant digits.
pub fn write_groundstate(mut w: impl Write, gs: &GroundStateSolution) -> Result<()> {
    let grid = gs.grid();
    let geometry = match grid.geometry() {
        Geometry::Radial => "radial",
        Geometry::Line => "line",
    };
    let mp = &gs.mp;
    writeln!(w, "# d={}", mp.d)?;
    for (k, v) in [("p", mp.p), ("gamma", mp.gamma), ("mu", mp.mu), ("omega", mp.omega)] {
        writeln!(w, "# {k}={v:.16e}")?;
    }
    writeln!(w, "# method={}", gs.method.as_str())?;
    writeln!(w, "# sp_residual={:.16e}", gs.sp_residual)?;
    writeln!(w, "# M={:.16e}", gs.record.mass)?;
    writeln!(w, "# E={:.16e}", gs.energy())?;
    writeln!(w, "# S={:.16e}", gs.action_value)?;
    writeln!(w, "# K={:.16e}", gs.virial())?;
    writeln!(w, "# geometry={geometry}")?;
    writeln!(w, "# extent={:.16e}", grid.extent())?;
    writeln!(w, "# n={}", grid.len())?;
    for (x, z) in grid.nodes().iter().zip(gs.profile.values()) {
        writeln!(w, "{x:.16e} {:.16e}", z.re)?;
    }
    Ok(())
}

/// Parsed ground-state file.
#[derive(Debug, Clone)]
pub struct GroundStateFile {
    pub header: BTreeMap<String, String>,
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
}

impl GroundStateFile {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.header.get(key).ok_or_else(|| Error::Parse { line: 0, msg: format!("missing header '{key}'") })?;
        raw.parse().map_err(|_| Error::Parse { line: 0, msg: format!("bad value '{raw}' for header '{key}'") })
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.get("d")?, self.get("p")?, self.get("gamma")?, self.get("mu")?, self.get("omega")?)
    }

    pub fn method(&self) -> Result<Method> {
        self.get::<String>("method")?.parse()
    }

    /// Rebuild the grid recorded in the header and check the coordinates match.
    pub fn grid(&self) -> Result<Arc<Grid>> {
        let geometry = match self.get::<String>("geometry")?.as_str() {
            "radial" => Geometry::Radial,
            "line" => Geometry::Line,
            other => return Err(Error::Parse { line: 0, msg: format!("unknown geometry '{other}'") }),
        };
        let grid = Grid::new(geometry, self.get("extent")?, self.get("n")?, self.get("d")?)?;
        if grid.len() != self.coords.len() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header n = {} but {} data lines", grid.len(), self.coords.len()),
            });
        }
        for (j, (a, b)) in grid.nodes().iter().zip(&self.coords).enumerate() {
            if (a - b).abs() > 1e-12 * grid.extent() {
                return Err(Error::Parse { line: 0, msg: format!("coordinate {j} does not match the grid") });
            }
        }
        Ok(Arc::new(grid))
    }

    pub fn field(&self) -> Result<Field> {
        Field::from_real(self.grid()?, &self.values)
    }

    /// Rebuild a solution; residual and functionals are recomputed on the grid.
    pub fn solution(&self) -> Result<GroundStateSolution> {
        let profile = self.field()?;
        let mp = self.params()?;
        let sp_residual = self.get("sp_residual")?;
        Ok(GroundStateSolution::assemble(profile, None, mp, self.method()?, sp_residual))
    }
}

pub fn read_groundstate(r: impl BufRead) -> Result<GroundStateFile> {
    let mut header = BTreeMap::new();
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: lineno, msg: "header without '='".into() })?;
            header.insert(k.trim().to_string(), v.trim().to_string());
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let mut num = || -> Result<f64> {
            let tok = parts.next().ok_or_else(|| Error::Parse { line: lineno, msg: "expected two columns".into() })?;
            tok.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("not a number: '{tok}'") })
        };
        let (x, v) = (num()?, num()?);
        if parts.next().is_some() {
            return Err(Error::Parse { line: lineno, msg: "extra columns".into() });
        }
        coords.push(x);
        values.push(v);
    }
    if coords.is_empty() {
        return Err(Error::Empty("ground-state file has no data lines".into()));
    }
    Ok(GroundStateFile { header, coords, values })
}
