//! Run configuration: built-in defaults, then an INI file, then flags.

use std::path::{Path, PathBuf};

use ini::Ini;
use qmem_core::ftec::{Physical, SuccessConvention};
use qmem_core::optimizer::SearchSpace;

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub phys: Physical,
    pub conv: SuccessConvention,
    pub space: SearchSpace,
    pub format: Format,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub quiet: bool,
    pub sequential: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            phys: Physical::default(),
            conv: SuccessConvention::default(),
            space: SearchSpace::default(),
            format: Format::Human,
            seed: 0,
            out: None,
            quiet: false,
            sequential: false,
        }
    }
}

fn bad(key: &str, value: &str) -> UsageError {
    UsageError(format!("config: bad value for {key}: {value:?}"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value.trim().parse().map_err(|_| bad(key, value))
}

fn flag(key: &str, value: &str) -> Result<bool, UsageError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad(key, value)),
    }
}

/// `a..b` (inclusive), a comma list, or a single value.
pub fn parse_range(key: &str, value: &str) -> Result<Vec<usize>, UsageError> {
    let v = value.trim();
    let out: Vec<usize> = if let Some((a, b)) = v.split_once("..") {
        let b = b.trim_start_matches('=');
        let (a, b): (usize, usize) = (num(key, a)?, num(key, b)?);
        (a..=b).collect()
    } else {
        v.split(',').map(|s| num(key, s)).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(bad(key, value));
    }
    Ok(out)
}

impl RunConfig {
    pub fn apply_file(&mut self, path: &Path) -> Result<(), UsageError> {
        let ini = Ini::load_from_file(path).map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        for (_, props) in ini.iter() {
            for (k, v) in props.iter() {
                self.set(k, v)?;
            }
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        match key.trim() {
            "p" => self.phys.p = num(key, value)?,
            "p_th" | "pth" => self.phys.p_th = num(key, value)?,
            "t_c" | "tc" => self.phys.t_c = num(key, value)?,
            "a" | "A" => self.phys.a = num(key, value)?,
            "alpha" => self.phys.alpha = num(key, value)?,
            "beta" => self.phys.beta = num(key, value)?,
            "w_e" => self.space.w_e = parse_range(key, value)?,
            "w_m" => self.space.w_m = parse_range(key, value)?,
            "m" => self.space.m = parse_range(key, value)?,
            "d" => {
                let ds = parse_range(key, value)?;
                self.space.d = if value.contains("..") { ds.into_iter().filter(|d| d % 2 == 1).collect() } else { ds };
            }
            "measurements_exposed" => self.conv.measurements_exposed = flag(key, value)?,
            "coset_deviation" => self.conv.coset_deviation = flag(key, value)?,
            "format" => {
                self.format = <Format as clap::ValueEnum>::from_str(value.trim(), true).map_err(|_| bad(key, value))?
            }
            "seed" => self.seed = num(key, value)?,
            "quiet" => self.quiet = flag(key, value)?,
            "sequential" => self.sequential = flag(key, value)?,
            other => return Err(UsageError(format!("config: unknown key {other:?}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("m", "3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_range("m", "1..=2").unwrap(), vec![1, 2]);
        assert_eq!(parse_range("m", "7, 9").unwrap(), vec![7, 9]);
        assert!(parse_range("m", "x").is_err());
        assert!(parse_range("m", "5..3").is_err());
    }

    #[test]
    fn distance_range_keeps_odd() {
        let mut c = RunConfig::default();
        c.set("d", "4..9").unwrap();
        assert_eq!(c.space.d, vec![5, 7, 9]);
        assert!(c.set("colour", "red").is_err());
    }
}
