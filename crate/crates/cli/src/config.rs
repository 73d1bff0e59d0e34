//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file.
//!
//! File keys are the long flag names without dashes (`max-order = 10`,
//! `bands = LF:0.04-0.15,HF:0.15-0.4`, `conditioned-te = true`). Blank
//! lines and lines starting with `#` are ignored. Flags always win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use pird::{PirdError, Result};

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV time series (header row of channel names).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Model JSON written by `fit`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Built-in benchmark: sim1, sim2 or sim3.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Coupling parameter of sim1/sim2, in [0, 0.8].
    #[arg(long)]
    pub c: Option<f64>,
    /// Target channel name.
    #[arg(long)]
    pub target: Option<String>,
    /// Comma-separated source channel names.
    #[arg(long)]
    pub sources: Option<String>,
    /// Sampling frequency in Hz.
    #[arg(long)]
    pub fs: Option<f64>,
    /// Fixed VAR order (skips AIC selection).
    #[arg(long)]
    pub order: Option<usize>,
    /// Largest order tried by AIC selection.
    #[arg(long = "max-order")]
    pub max_order: Option<usize>,
    /// Number of frequency grid points on [0, fs/2].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Bands as "LABEL:lo-hi,..." in Hz.
    #[arg(long)]
    pub bands: Option<String>,
    /// nats or bits.
    #[arg(long)]
    pub units: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Random seed for simulation.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Condition each marginal transfer entropy on the other sources.
    #[arg(long = "conditioned-te")]
    pub conditioned_te: bool,
    /// Diagonal loading δ added as δ·trace/Q to every spectral matrix.
    #[arg(long = "diag-load")]
    pub diag_load: Option<f64>,
    /// Coarse-graining rule: atoms (default) or bottom.
    #[arg(long = "coarse-rule")]
    pub coarse_rule: Option<String>,
    /// Samples to simulate when a scenario feeds `fit` or `simulate`.
    #[arg(long)]
    pub length: Option<usize>,
    /// Sweep of c for `bench`, as start:step:stop.
    #[arg(long)]
    pub sweep: Option<String>,
}

const KEYS: &[&str] = &[
    "input",
    "model",
    "scenario",
    "c",
    "target",
    "sources",
    "fs",
    "order",
    "max-order",
    "grid",
    "bands",
    "units",
    "out",
    "seed",
    "conditioned-te",
    "diag-load",
    "coarse-rule",
    "length",
    "sweep",
];

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| PirdError::Format(format!("config line {}: expected key = value", n + 1)))?;
        let key = k.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(PirdError::Argument(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| PirdError::Argument(format!("config key {key}: cannot parse {v:?}"))),
    }
}

impl CommonArgs {
    /// Fills every unset flag from the config file, if one was given.
    pub fn resolve(self) -> Result<CommonArgs> {
        let file = match &self.config {
            Some(path) => parse_config_text(&read_text(path)?)?,
            None => return Ok(self),
        };
        let conditioned_te = self.conditioned_te || pick::<bool>(None, &file, "conditioned-te")?.unwrap_or(false);
        Ok(CommonArgs {
            config: self.config,
            input: pick(self.input, &file, "input")?,
            model: pick(self.model, &file, "model")?,
            scenario: pick(self.scenario, &file, "scenario")?,
            c: pick(self.c, &file, "c")?,
            target: pick(self.target, &file, "target")?,
            sources: pick(self.sources, &file, "sources")?,
            fs: pick(self.fs, &file, "fs")?,
            order: pick(self.order, &file, "order")?,
            max_order: pick(self.max_order, &file, "max-order")?,
            grid: pick(self.grid, &file, "grid")?,
            bands: pick(self.bands, &file, "bands")?,
            units: pick(self.units, &file, "units")?,
            out: pick(self.out, &file, "out")?,
            seed: pick(self.seed, &file, "seed")?,
            conditioned_te,
            diag_load: pick(self.diag_load, &file, "diag-load")?,
            coarse_rule: pick(self.coarse_rule, &file, "coarse-rule")?,
            length: pick(self.length, &file, "length")?,
            sweep: pick(self.sweep, &file, "sweep")?,
        })
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| PirdError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}
