//! Run configuration: defaults, then a flat `key=value` file, then flags.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use distcent::DanglingPolicy;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineMode {
    KnownN,
    UnknownN,
    Dist,
}

impl FromStr for EngineMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <EngineMode as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub damping: f64,
    pub omega: f64,
    pub rho: f64,
    pub iterations: u64,
    pub seed: u64,
    pub mode: EngineMode,
    pub dangling: DanglingPolicy,
    pub snapshot_stride: u64,
    pub joint_window: usize,
    pub trace_stride: u64,
    pub power_tol: f64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            damping: 0.15,
            omega: 0.0,
            rho: 0.9,
            iterations: 200_000,
            seed: 1,
            mode: EngineMode::UnknownN,
            dangling: DanglingPolicy::Backlink,
            snapshot_stride: 100,
            joint_window: 1,
            trace_stride: 100,
            power_tol: 1e-13,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Flags shared by every command. Unset flags fall back to the config file,
/// then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Teleportation probability m, in (0, 1) [default: 0.15]
    #[arg(long)]
    pub damping: Option<f64>,
    /// Uniform jump probability of the surfer, in [0, 1] [default: 0]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Forgetting factor of the persistent average, in (0, 1] [default: 0.9]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Number of activations [default: 200000]
    #[arg(long)]
    pub iterations: Option<u64>,
    /// Seed of the surfer's generator [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Engine: known-n, unknown-n or dist [default: unknown-n]
    #[arg(long, value_enum)]
    pub mode: Option<EngineMode>,
    /// Dangling-node repair: backlink or uniform-column [default: backlink]
    #[arg(long)]
    pub dangling: Option<DanglingPolicy>,
    /// Activations per snapshot in temporal runs [default: 100]
    #[arg(long)]
    pub snapshot_stride: Option<u64>,
    /// Snapshots per joint-connectivity window when omega = 0 [default: 1]
    #[arg(long)]
    pub joint_window: Option<usize>,
    /// Activations between trace rows [default: 100]
    #[arg(long)]
    pub trace_stride: Option<u64>,
    /// Stopping tolerance of the power-method oracle [default: 1e-13]
    #[arg(long)]
    pub power_tol: Option<f64>,
    /// Directory for output tables [default: out]
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Flat key=value file with any of the settings above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: bad value `{value}` for {key}")))
}

/// Applies `key=value` lines to `cfg`. Keys are the flag names without dashes.
pub fn apply_config_text(cfg: &mut RunConfig, text: &str) -> Result<(), CliError> {
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| CliError::Usage(format!("config line {line}: expected key=value")))?;
        match key {
            "damping" => cfg.damping = parse_value(key, value, line)?,
            "omega" => cfg.omega = parse_value(key, value, line)?,
            "rho" => cfg.rho = parse_value(key, value, line)?,
            "iterations" => cfg.iterations = parse_value(key, value, line)?,
            "seed" => cfg.seed = parse_value(key, value, line)?,
            "mode" => cfg.mode = parse_value(key, value, line)?,
            "dangling" => cfg.dangling = parse_value(key, value, line)?,
            "snapshot-stride" => cfg.snapshot_stride = parse_value(key, value, line)?,
            "joint-window" => cfg.joint_window = parse_value(key, value, line)?,
            "trace-stride" => cfg.trace_stride = parse_value(key, value, line)?,
            "power-tol" => cfg.power_tol = parse_value(key, value, line)?,
            "output-dir" => cfg.output_dir = PathBuf::from(value),
            other => {
                return Err(CliError::Usage(format!(
                    "config line {line}: unknown key `{other}`"
                )))
            }
        }
    }
    Ok(())
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(o: &Overrides) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &o.config {
            apply_config_text(&mut cfg, &read_config(path)?)?;
        }
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = o.$field.clone() { cfg.$field = v; })*
            };
        }
        take!(
            damping,
            omega,
            rho,
            iterations,
            seed,
            mode,
            dangling,
            snapshot_stride,
            joint_window,
            trace_stride,
            power_tol,
            output_dir
        );
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Usage(what.to_owned()));
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return bad("--damping must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return bad("--omega must lie in [0, 1]");
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return bad("--rho must lie in (0, 1]");
        }
        if self.snapshot_stride == 0 || self.trace_stride == 0 || self.joint_window == 0 {
            return bad("--snapshot-stride, --trace-stride and --joint-window must be at least 1");
        }
        if !(self.power_tol > 0.0) {
            return bad("--power-tol must be positive");
        }
        Ok(())
    }

    /// `# key=value` lines recorded in every output table.
    pub fn notes(&self) -> Vec<(String, String)> {
        vec![
            ("damping".into(), self.damping.to_string()),
            ("omega".into(), self.omega.to_string()),
            ("iterations".into(), self.iterations.to_string()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join(format!("distcent-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        fs::write(&path, "# test\nomega = 0.3\nseed=9\nmode=dist\n").unwrap();
        let o = Overrides {
            seed: Some(4),
            config: Some(path),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&o).unwrap();
        assert_eq!(cfg.omega, 0.3);
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.mode, EngineMode::Dist);
        assert_eq!(cfg.damping, 0.15);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        assert!(apply_config_text(&mut cfg, "speed=3").is_err());
        assert!(apply_config_text(&mut cfg, "omega").is_err());
        assert!(apply_config_text(&mut cfg, "omega=x").is_err());
        for o in [
            Overrides { damping: Some(1.0), ..Default::default() },
            Overrides { omega: Some(-0.1), ..Default::default() },
            Overrides { rho: Some(0.0), ..Default::default() },
            Overrides { trace_stride: Some(0), ..Default::default() },
        ] {
            assert!(RunConfig::resolve(&o).is_err());
        }
    }
}
