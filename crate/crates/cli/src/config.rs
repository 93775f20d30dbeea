//! Run configuration: defaults, then the `GAUSS_CHAOS_THREADS` environment
//! variable, then a `key=value` file, then command-line flags.

use std::fs;
use std::path::Path;

use clap::ValueEnum;

pub const THREADS_ENV: &str = "GAUSS_CHAOS_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// decimal digits for logarithms
    pub precision: u32,
    /// largest cover or enumeration allowed
    pub max_cover: u128,
    /// enclosure depth cap for scramble witnesses
    pub max_depth: usize,
    pub seed: u64,
    /// `None` lets each command pick its natural format
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: 50,
            max_cover: 1 << 24,
            max_depth: gauss_chaos::scramble::DEFAULT_DEPTH_CAP,
            seed: 0,
            format: None,
            threads: None,
        }
    }
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub precision: Option<u32>,
    pub max_cover: Option<u128>,
    pub max_depth: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

fn parse_positive<T: std::str::FromStr + PartialEq + Default>(key: &str, v: &str) -> Result<T, String> {
    let x: T = v.trim().parse().map_err(|_| format!("{key}: cannot parse {v:?}"))?;
    if x == T::default() {
        return Err(format!("{key} must be positive"));
    }
    Ok(x)
}

impl RunConfig {
    pub fn resolve(
        file: Option<&Path>,
        env_threads: Option<String>,
        flags: &Overrides,
    ) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        if let Some(v) = env_threads.filter(|v| !v.trim().is_empty()) {
            cfg.threads = Some(parse_positive(THREADS_ENV, &v)?);
        }
        if let Some(path) = file {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            cfg.apply_file(&text)?;
        }
        cfg.apply(flags)?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key.replace('-', "_").as_str() {
                "precision" => self.precision = parse_positive(key, value)?,
                "max_cover" => self.max_cover = parse_positive(key, value)?,
                "max_depth" => self.max_depth = parse_positive(key, value)?,
                "seed" => {
                    self.seed = value
                        .parse()
                        .map_err(|_| format!("seed: cannot parse {value:?}"))?
                }
                "format" => {
                    self.format = Some(
                        Format::from_str(value, true).map_err(|_| format!("format: unknown {value:?}"))?,
                    )
                }
                "threads" => self.threads = Some(parse_positive(key, value)?),
                _ => return Err(format!("config line {}: unknown key {key:?}", i + 1)),
            }
        }
        Ok(())
    }

    fn apply(&mut self, o: &Overrides) -> Result<(), String> {
        let positive = |ok: bool, key: &str| if ok { Ok(()) } else { Err(format!("{key} must be positive")) };
        if let Some(p) = o.precision {
            positive(p > 0, "precision")?;
            self.precision = p;
        }
        if let Some(c) = o.max_cover {
            positive(c > 0, "max-cover")?;
            self.max_cover = c;
        }
        if let Some(d) = o.max_depth {
            positive(d > 0, "max-depth")?;
            self.max_depth = d;
        }
        if let Some(t) = o.threads {
            positive(t > 0, "threads")?;
            self.threads = Some(t);
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if o.format.is_some() {
            self.format = o.format;
        }
        Ok(())
    }
}
