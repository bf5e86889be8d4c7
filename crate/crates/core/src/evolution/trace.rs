use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{EvolutionTrace, TraceRow, Verdict};
use crate::error::{Error, Result};

/// Run summary written as `# key: value` lines after the CSV rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceFooter {
    pub verdict: Verdict,
    pub t_final: f64,
    pub steps: usize,
    pub c0: f64,
    pub boundary_mass: f64,
    pub tail_radii: [f64; 2],
}

pub fn write_trace<W: Write>(w: W, trace: &EvolutionTrace) -> Result<()> {
    write_rows(w, &trace.rows, &trace.footer())
}

pub fn write_rows<W: Write>(mut w: W, rows: &[TraceRow], footer: &TraceFooter) -> Result<()> {
    {
        let mut csv = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(&mut w);
        csv.write_record(["t", "dt", "mass", "energy", "grad_sq", "kin_gamma_sq", "K_gamma", "lpp1", "I", "Idot", "tail_R1", "tail_R2"])?;
        for r in rows {
            csv.serialize(r)?;
        }
        csv.flush()?;
    }
    writeln!(w, "# verdict: {}", footer.verdict)?;
    writeln!(w, "# t_final: {:e}", footer.t_final)?;
    writeln!(w, "# steps: {}", footer.steps)?;
    writeln!(w, "# c0: {:e}", footer.c0)?;
    writeln!(w, "# boundary_mass: {:e}", footer.boundary_mass)?;
    writeln!(w, "# tail_radii: {:e} {:e}", footer.tail_radii[0], footer.tail_radii[1])?;
    Ok(())
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse { line, msg: format!("bad value for {key}: {v:?}") })
}

/// Read rows and footer back from a trace CSV.
pub fn read_trace<R: BufRead>(r: R) -> Result<(Vec<TraceRow>, TraceFooter)> {
    let mut body = String::new();
    let mut verdict = None;
    let mut t_final = None;
    let mut steps = None;
    let mut c0 = None;
    let mut boundary_mass = None;
    let mut tail_radii = None;
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        if let Some(meta) = line.strip_prefix('#') {
            let (key, v) = meta
                .split_once(':')
                .ok_or_else(|| Error::Parse { line: lineno, msg: format!("footer line without key: {line:?}") })?;
            let key = key.trim();
            match key {
                "verdict" => verdict = Some(v.trim().parse::<Verdict>().map_err(|_| Error::Parse { line: lineno, msg: format!("unknown verdict {v:?}") })?),
                "t_final" => t_final = Some(parse_num(lineno, key, v)?),
                "steps" => steps = Some(parse_num(lineno, key, v)?),
                "c0" => c0 = Some(parse_num(lineno, key, v)?),
                "boundary_mass" => boundary_mass = Some(parse_num(lineno, key, v)?),
                "tail_radii" => {
                    let parts: Vec<&str> = v.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(Error::Parse { line: lineno, msg: "tail_radii needs two values".into() });
                    }
                    tail_radii = Some([parse_num(lineno, key, parts[0])?, parse_num(lineno, key, parts[1])?]);
                }
                _ => return Err(Error::Parse { line: lineno, msg: format!("unknown footer key {key:?}") }),
            }
        } else {
            body.push_str(&line);
            body.push('\n');
        }
    }
    if body.trim().is_empty() {
        return Err(Error::Empty("trace has no header".into()));
    }
    let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<TraceRow>, _>>()?;
    let missing = |k: &str| Error::Parse { line: 0, msg: format!("footer is missing {k}") };
    let footer = TraceFooter {
        verdict: verdict.ok_or_else(|| missing("verdict"))?,
        t_final: t_final.ok_or_else(|| missing("t_final"))?,
        steps: steps.ok_or_else(|| missing("steps"))?,
        c0: c0.ok_or_else(|| missing("c0"))?,
        boundary_mass: boundary_mass.ok_or_else(|| missing("boundary_mass"))?,
        tail_radii: tail_radii.ok_or_else(|| missing("tail_radii"))?,
    };
    Ok((rows, footer))
}
