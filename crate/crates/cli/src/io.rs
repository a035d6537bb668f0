use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::Value;

use tropmod_core::arith::rat::parse_rat;
use tropmod_core::intersection::SmoothChart;
use tropmod_core::moduli::quotient::quotient_smooth_chart;
use tropmod_core::moduli::ModuliChart;
use tropmod_core::polyhedral::json::{from_json_str, map_from_json_str};
use tropmod_core::polyhedral::{PLMap, WeightedComplex};
use tropmod_core::QVec;

/// Where results go and in which form.
pub struct Output {
    pub json: bool,
    pub out: Option<PathBuf>,
}

impl Output {
    pub fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut so = std::io::stdout().lock();
                writeln!(so, "{text}")?;
                Ok(())
            }
        }
    }

    pub fn emit_value(&self, v: &Value) -> Result<()> {
        self.emit(&serde_json::to_string_pretty(v)?)
    }
}

/// Contents of a file, or of standard input for `-`.
pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_complex(path: &Path) -> Result<WeightedComplex> {
    Ok(from_json_str(&read_input(path)?)?)
}

pub fn read_map(path: &Path) -> Result<PLMap> {
    Ok(map_from_json_str(&read_input(path)?)?)
}

/// A point written as comma-separated rationals, e.g. `1/2,0,-3`.
pub fn parse_point(s: &str) -> Result<QVec> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.is_empty() {
        return Ok(Vec::new());
    }
    Ok(s.split(',').map(|t| parse_rat(t.trim().trim_matches('"'))).collect::<Result<_, _>>()?)
}

/// Smooth structure of a target: `affine`, `bergman:R` (lineality kept), `bergman0:R` (first
/// coordinate normalized away) or `moduli:N` (quotient coordinates of `M_N`).
pub fn parse_chart(spec: &str, ambient: usize) -> Result<SmoothChart> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let num = || arg.trim().parse::<usize>().with_context(|| format!("bad chart argument in {spec:?}"));
    let chart = match kind {
        "affine" => SmoothChart::affine_space(ambient),
        "bergman" => SmoothChart::bergman(ambient, num()?),
        "bergman0" => SmoothChart::bergman_mod_lineality(ambient, num()?),
        "moduli" => quotient_smooth_chart(&ModuliChart::standard(num()?)?),
        _ => bail!("unknown chart {spec:?}; use affine, bergman:R, bergman0:R or moduli:N"),
    };
    if chart.ambient != ambient {
        bail!("chart {spec:?} lives in dimension {} but the target has dimension {ambient}", chart.ambient);
    }
    Ok(chart)
}
