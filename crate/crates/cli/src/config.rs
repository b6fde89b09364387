//! Flat `key = value` run configuration.
//!
//! `scheme`, `N` and `CFL` accept comma-separated lists; a file then stands
//! for every combination of them. `scheme = all` picks every scheme valid
//! for the case's dimension.

use std::path::{Path, PathBuf};

use mof_core::advection::Scheme;
use mof_core::benchcases::{case, BenchCase};

use crate::RunError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: String,
    pub scheme: Scheme,
    pub n: usize,
    pub cfl: f64,
    pub depth: u32,
    pub output: PathBuf,
    pub seed: u64,
    pub emit_interfaces: bool,
    pub emit_fields: bool,
}

impl RunConfig {
    pub fn bench_case(&self) -> Result<BenchCase, RunError> {
        case(&self.case).map_err(|e| RunError::Config(e.to_string()))
    }

    /// File stem shared by every artifact of this run.
    pub fn stem(&self) -> String {
        format!("{}_{}_N{}_CFL{}", self.case, self.scheme, self.n, self.cfl)
    }
}

#[derive(Debug, Default, Clone)]
struct Raw {
    case: Option<String>,
    scheme: Option<String>,
    n: Option<String>,
    cfl: Option<String>,
    depth: Option<String>,
    output: Option<String>,
    seed: Option<String>,
    emit_interfaces: Option<String>,
    emit_fields: Option<String>,
}

impl Raw {
    fn set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        let v = Some(value.trim().to_string());
        match key.trim().to_ascii_lowercase().as_str() {
            "case" => self.case = v,
            "scheme" => self.scheme = v,
            "n" => self.n = v,
            "cfl" => self.cfl = v,
            "depth" => self.depth = v,
            "output" => self.output = v,
            "seed" => self.seed = v,
            "emit_interfaces" => self.emit_interfaces = v,
            "emit_fields" => self.emit_fields = v,
            other => return Err(RunError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }
}

fn split_pair(line: &str) -> Result<(&str, &str), RunError> {
    line.split_once('=')
        .ok_or_else(|| RunError::Config(format!("expected key=value, got {line:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, RunError> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(RunError::Config(format!("{key}: expected a boolean, got {v:?}"))),
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, RunError> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| RunError::Config(format!("{key}: cannot parse {s:?}")))
        })
        .collect()
}

/// Parse config text plus `key=value` overrides into the runs it describes.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<Vec<RunConfig>, RunError> {
    let mut raw = Raw::default();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = split_pair(line)?;
        raw.set(k, v)?;
    }
    for o in overrides {
        let (k, v) = split_pair(o)?;
        raw.set(k, v)?;
    }
    let need = |v: &Option<String>, key: &str| {
        v.clone()
            .ok_or_else(|| RunError::Config(format!("missing key {key:?}")))
    };
    let case_name = need(&raw.case, "case")?;
    let bench = case(&case_name).map_err(|e| RunError::Config(e.to_string()))?;
    let scheme_text = need(&raw.scheme, "scheme")?;
    let schemes: Vec<Scheme> = if scheme_text.eq_ignore_ascii_case("all") {
        Scheme::for_dim(bench.dim)
    } else {
        let list: Vec<Scheme> = scheme_text
            .split(',')
            .map(|s| s.parse().map_err(|e: mof_core::advection::UnknownScheme| RunError::Config(e.to_string())))
            .collect::<Result<_, _>>()?;
        for s in &list {
            if !s.supports(bench.dim) {
                return Err(RunError::Config(format!(
                    "scheme {s} does not support the {}D case {}",
                    bench.dim, bench.name
                )));
            }
        }
        list
    };
    let ns: Vec<usize> = parse_list("N", &need(&raw.n, "N")?)?;
    let cfls: Vec<f64> = parse_list("CFL", &need(&raw.cfl, "CFL")?)?;
    for &n in &ns {
        if n < 4 {
            return Err(RunError::Config(format!("N must be at least 4, got {n}")));
        }
        if !n.is_power_of_two() {
            eprintln!("warning: N = {n} is not a power of two");
        }
    }
    for &c in &cfls {
        if !(c > 0.0 && c.is_finite()) {
            return Err(RunError::Config(format!("CFL must be positive, got {c}")));
        }
    }
    let depth: u32 = match &raw.depth {
        Some(v) => v
            .parse()
            .map_err(|_| RunError::Config(format!("depth: cannot parse {v:?}")))?,
        None => 6,
    };
    if !(1..=12).contains(&depth) {
        return Err(RunError::Config(format!("depth must be in 1..=12, got {depth}")));
    }
    let seed: u64 = match &raw.seed {
        Some(v) => v
            .parse()
            .map_err(|_| RunError::Config(format!("seed: cannot parse {v:?}")))?,
        None => 0,
    };
    let emit_interfaces = match &raw.emit_interfaces {
        Some(v) => parse_bool("emit_interfaces", v)?,
        None => false,
    };
    let emit_fields = match &raw.emit_fields {
        Some(v) => parse_bool("emit_fields", v)?,
        None => false,
    };
    let output = PathBuf::from(raw.output.unwrap_or_else(|| "out".to_string()));

    let mut runs = Vec::new();
    for &scheme in &schemes {
        for &n in &ns {
            for &cfl in &cfls {
                runs.push(RunConfig {
                    case: bench.name.to_string(),
                    scheme,
                    n,
                    cfl,
                    depth,
                    output: output.clone(),
                    seed,
                    emit_interfaces,
                    emit_fields,
                });
            }
        }
    }
    Ok(runs)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<Vec<RunConfig>, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expands_lists() {
        let text = "case = singlevortex2d\nscheme = EI, EILE2D\nN = 32,64\nCFL = 0.5 # comment\n";
        let runs = parse_config(text, &[]).unwrap();
        assert_eq!(runs.len(), 4);
        assert_eq!(runs[0].depth, 6);
        assert_eq!(runs[3].scheme, Scheme::Eile2d);
        assert_eq!(runs[3].n, 64);
    }

    #[test]
    fn overrides_win() {
        let runs = parse_config("case=zalesak2d\nscheme=EI\nN=32\nCFL=0.5", &["N=16".into(), "emit_fields=yes".into()]).unwrap();
        assert_eq!(runs[0].n, 16);
        assert!(runs[0].emit_fields);
    }

    #[test]
    fn all_schemes_follow_dimension() {
        let runs = parse_config("case=zalesak3d\nscheme=all\nN=8\nCFL=0.5", &[]).unwrap();
        assert_eq!(runs.len(), 6);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "case=nowhere\nscheme=EI\nN=32\nCFL=0.5",
            "case=zalesak2d\nscheme=EILE3D\nN=32\nCFL=0.5",
            "case=zalesak2d\nscheme=EI\nN=2\nCFL=0.5",
            "case=zalesak2d\nscheme=EI\nN=32\nCFL=-1",
            "case=zalesak2d\nscheme=EI\nN=32",
            "case=zalesak2d\nscheme=EI\nN=32\nCFL=0.5\ncolour=blue",
            "case=zalesak2d\nscheme=EI\nN=32\nCFL=0.5\ndepth=0",
            "just words",
        ] {
            assert!(matches!(parse_config(text, &[]), Err(RunError::Config(_))), "{text}");
        }
    }
}
