//! Plain-text run configuration: one `key = value` per line, `#` comments.
//!
//! Recognized keys: `m`, `h`, `T_support`, `n_paths`, `seed`, `V.name`,
//! `V.lambda`, `F.name`, `quad_tol`, `eps_list` (comma-separated).
//! Unknown keys are an error. Missing keys keep the defaults, which
//! reproduce the full verification suite.

use crate::scalar::ScalarFn;
use crate::sde::{potential_cosine, potential_tanhpoly, Observable, SdeError, SimConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error(transparent)]
    Invalid(#[from] SdeError),
}

#[derive(Clone)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub observable: Observable,
    pub eps_list: Vec<f64>,
    pub v_name: String,
    pub v_lambda: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::standard(),
            observable: Observable::Cos,
            eps_list: vec![0.1, 0.05, 0.025, 0.0125],
            v_name: "cosine".into(),
            v_lambda: 0.5,
        }
    }
}

pub fn potential_by_name(name: &str, lambda: f64) -> Option<ScalarFn> {
    match name {
        "cosine" => Some(potential_cosine(lambda)),
        "tanhpoly" => Some(potential_tanhpoly(lambda)),
        _ => None,
    }
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
                line: line_no,
                msg: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |msg: String| ConfigError::Parse { line: line_no, msg };
            let num = |v: &str| -> Result<f64, ConfigError> {
                v.parse::<f64>()
                    .map_err(|_| bad(format!("`{v}` is not a number")))
            };
            match key {
                "m" => cfg.sim.m = num(value)?,
                "h" => cfg.sim.h = num(value)?,
                "T_support" => cfg.sim.t_support = num(value)?,
                "n_paths" => {
                    cfg.sim.n_paths = value
                        .parse::<usize>()
                        .map_err(|_| bad(format!("`{value}` is not a positive integer")))?
                }
                "seed" => {
                    cfg.sim.master_seed = value
                        .parse::<u64>()
                        .map_err(|_| bad(format!("`{value}` is not a 64-bit integer")))?
                }
                "V.name" => cfg.v_name = value.to_string(),
                "V.lambda" => cfg.v_lambda = num(value)?,
                "F.name" => {
                    cfg.observable = Observable::parse(value)
                        .ok_or_else(|| bad(format!("unknown observable `{value}`")))?
                }
                "quad_tol" => cfg.sim.quad_tol = num(value)?,
                "eps_list" => {
                    cfg.eps_list = value
                        .split(',')
                        .map(|s| num(s.trim()))
                        .collect::<Result<Vec<f64>, _>>()?;
                    if cfg.eps_list.is_empty() {
                        return Err(bad("eps_list must not be empty".into()));
                    }
                }
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        cfg.sim.v = potential_by_name(&cfg.v_name, cfg.v_lambda)
            .ok_or_else(|| ConfigError::UnknownKey(format!("V.name = {}", cfg.v_name)))?;
        cfg.sim.f = ScalarFn::bump(cfg.sim.t_support);
        cfg.sim.validate()?;
        Ok(cfg)
    }
}
