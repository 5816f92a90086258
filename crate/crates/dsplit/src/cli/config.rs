//! Experiment configuration: JSON schema plus helpers for flag overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

/// One value or a list, so configs can write `"h": 0.1` or `"h": [0.1, 0.05]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            Self::One(v) => vec![v.clone()],
            Self::Many(vs) => vs.clone(),
        }
    }
}

/// Experiment description shared by every command.
///
/// JSON config files mirror these field names; command-line flags override
/// individual fields. Each command applies its own defaults for fields left
/// unset and rejects combinations it cannot use (for example `tol` in a
/// fixed-step sweep).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Problem name: exp, oscillator, ramp, modulated, kepler, or wave.
    pub problem: Option<String>,
    /// Method name(s) or scheme-file path(s).
    pub method: Option<OneOrMany<String>>,
    /// Fixed step size(s); mutually exclusive with `tol`.
    pub h: Option<OneOrMany<f64>>,
    /// Adaptive tolerance; mutually exclusive with `h`.
    pub tol: Option<f64>,
    pub t0: Option<f64>,
    pub tf: Option<f64>,
    /// Grid size (wave problem).
    #[serde(alias = "N")]
    pub n: Option<usize>,
    /// Orbit eccentricity (Kepler problem).
    pub e: Option<f64>,
    /// Total evaluation budget (kepler command).
    pub budget: Option<u64>,
    /// Output CSV path; stdout when unset.
    #[serde(alias = "out")]
    pub output: Option<PathBuf>,
    /// Record every n-th sample.
    #[serde(alias = "stride")]
    pub sample_stride: Option<usize>,
    /// Halvings applied when a sweep is given a single base `h`.
    pub levels: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    }

    /// Configured methods, empty when unset.
    pub fn methods(&self) -> Vec<String> {
        self.method.as_ref().map(|m| m.to_vec()).unwrap_or_default()
    }

    /// Configured step sizes, empty when unset.
    pub fn step_sizes(&self) -> Vec<f64> {
        self.h.as_ref().map(|h| h.to_vec()).unwrap_or_default()
    }

    /// The single configured method, or a config error.
    pub fn single_method(&self) -> Result<String> {
        let methods = self.methods();
        match methods.as_slice() {
            [one] => Ok(one.clone()),
            [] => Err(Error::Config("no method configured; pass --method".into())),
            many => Err(Error::Config(format!(
                "this command takes exactly one method, got {}",
                many.len()
            ))),
        }
    }

    /// Rejects configs that set an adaptive tolerance.
    pub fn reject_tol(&self, command: &str) -> Result<()> {
        if self.tol.is_some() {
            return Err(Error::Config(format!(
                "{command} runs fixed-step integrations; use h, not tol"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scalar_and_list_fields() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"problem": "wave", "method": ["BM4", "RK4"], "h": 0.05, "N": 256, "stride": 7}"#,
        )
        .unwrap();
        assert_eq!(cfg.problem.as_deref(), Some("wave"));
        assert_eq!(cfg.methods(), vec!["BM4", "RK4"]);
        assert_eq!(cfg.step_sizes(), vec![0.05]);
        assert_eq!(cfg.n, Some(256));
        assert_eq!(cfg.sample_stride, Some(7));
    }

    #[test]
    fn rejects_unknown_fields() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"stepsize": 0.1}"#);
        assert!(err.is_err());
    }

    #[test]
    fn single_method_requires_exactly_one() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.single_method().is_err());
        cfg.method = Some(OneOrMany::One("S2".into()));
        assert_eq!(cfg.single_method().unwrap(), "S2");
        cfg.method = Some(OneOrMany::Many(vec!["S2".into(), "BM4".into()]));
        assert!(cfg.single_method().is_err());
    }

    #[test]
    fn missing_config_file_reports_path() {
        let err = ExperimentConfig::from_file(Path::new("/nonexistent/cfg.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/cfg.json"), "{err}");
    }
}
