use std::path::{Path, PathBuf};

use lattice_rep::PhaseReducer;
use rotation_algebra::AlphaId;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::CliError;

/// Every knob of a run. Files and `--set` use the same flat keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `golden`, a ratio `p/q`, or a decimal.
    pub alpha: String,
    pub beta: f64,
    pub delta: f64,
    pub gamma: f64,
    /// Truncations act on `n = -half_width..=half_width`.
    pub half_width: usize,
    pub phases: usize,
    /// Periodic approximant `dos_p/dos_q` for the density of states.
    pub dos_p: i64,
    pub dos_q: i64,
    pub dos_phases: usize,
    pub dos_sites: usize,
    /// Phase samples for the resolvent coefficients.
    pub samples: usize,
    pub p_max: i64,
    pub q_max: i64,
    pub z_re: f64,
    pub z_im: f64,
    pub theta: f64,
    pub steps: usize,
    pub grid: usize,
    /// Half side of the square window for the potential grid.
    pub extent: f64,
    pub tol: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: "golden".into(),
            beta: 2.0,
            delta: 1.5,
            gamma: 1.0,
            half_width: 150,
            phases: 8,
            dos_p: 55,
            dos_q: 89,
            dos_phases: 16,
            dos_sites: 356,
            samples: 128,
            p_max: 5,
            q_max: 5,
            z_re: 0.5,
            z_im: 1.0,
            theta: 0.3,
            steps: 40,
            grid: 121,
            extent: 6.0,
            tol: 1e-12,
            seed: 2024,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Defaults, then the file, then the overrides (later wins).
    pub fn load(file: Option<&Path>, overrides: Table) -> Result<Self, CliError> {
        let mut table = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                text.parse::<Table>().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => Table::new(),
        };
        table.extend(overrides);
        let cfg: RunConfig = Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.alpha_id()?;
        if !(self.beta > 1.0 && self.beta.is_finite()) {
            return bad(format!("beta must exceed 1, got {}", self.beta));
        }
        if !(self.delta >= 1.0 && self.delta.is_finite()) {
            return bad(format!("delta must be at least 1, got {}", self.delta));
        }
        if !(self.gamma >= 1.0 / self.beta && self.gamma <= self.beta) {
            return bad(format!("gamma must lie in [1/beta, beta], got {}", self.gamma));
        }
        if self.half_width < 10 {
            return bad(format!("half_width must be at least 10, got {}", self.half_width));
        }
        if self.phases == 0 || self.dos_phases == 0 || self.steps == 0 {
            return bad("phases, dos_phases and steps must be positive".into());
        }
        if self.dos_q < 2 || self.dos_p <= 0 || self.dos_p >= self.dos_q {
            return bad(format!("dos_p/dos_q must satisfy 0 < p < q, q ≥ 2, got {}/{}", self.dos_p, self.dos_q));
        }
        if self.dos_sites < self.dos_q as usize {
            return bad(format!("dos_sites must be at least dos_q = {}", self.dos_q));
        }
        if self.p_max < 0 || self.q_max < 1 || self.p_max > 40 || self.q_max > 40 {
            return bad("p_max must lie in 0..=40 and q_max in 1..=40".into());
        }
        if self.samples <= 4 * self.q_max as usize {
            return bad(format!("samples must exceed 4·q_max = {}", 4 * self.q_max));
        }
        if self.grid < 3 {
            return bad("grid must be at least 3".into());
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return bad("extent must be positive".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad("tol must lie in (0, 1)".into());
        }
        if !self.z_re.is_finite() || !self.z_im.is_finite() || !self.theta.is_finite() {
            return bad("z_re, z_im and theta must be finite".into());
        }
        Ok(())
    }

    pub fn alpha_id(&self) -> Result<AlphaId, CliError> {
        let id = AlphaId::parse(self.alpha.trim()).map_err(|e| CliError::Config(e.to_string()))?;
        if let AlphaId::Float(a) = id {
            if !a.is_finite() {
                return Err(CliError::Config(format!("alpha must be finite, got {a}")));
            }
        }
        Ok(id)
    }

    pub fn reducer(&self) -> PhaseReducer {
        self.alpha_id().map(|a| a.reducer()).unwrap_or_else(|_| PhaseReducer::golden())
    }
}

/// Parse `key=value`; the value is read as a TOML scalar, else as a string.
pub fn parse_assignment(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s.split_once('=').ok_or_else(|| CliError::Config(format!("expected key=value, got '{s}'")))?;
    let key = k.trim().to_string();
    if key.is_empty() {
        return Err(CliError::Config(format!("empty key in '{s}'")));
    }
    let v = v.trim();
    let value = format!("v = {v}").parse::<Table>().ok().and_then(|mut t| t.remove("v")).unwrap_or_else(|| Value::String(v.to_string()));
    Ok((key, value))
}
