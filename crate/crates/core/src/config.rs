//! Flat `key = value` configuration and its translation into solver inputs.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::noise::{derive_noise_params, AttemptCaps, NoiseBiases, PhysicalNoiseParams};
use crate::pipeline::{allocate_budget, BudgetPolicy, ErrorBudget, FloorplanCounts, SolveOptions};
use crate::surgery::{bundled_error_data, bundled_msf_table, fit_error_curve, read_error_data, read_msf_table};
use crate::synthesis::{CountMode, Rounding, SynthesisStrategy};
use crate::timing::TimingModel;
use crate::trotter::ProblemSpec;

/// Recognized keys and their defaults (`None` means unset by default).
pub const KEYS: &[(&str, Option<&str>)] = &[
    ("problem.L", Some("8")),
    ("problem.u_over_t", Some("8")),
    ("problem.sim_time_multiple", Some("10")),
    ("problem.w_msf", Some("2")),
    ("noise.p", Some("0.01")),
    ("noise.biases.loss", Some("0.9")),
    ("noise.biases.distinguishability", Some("0.085")),
    ("noise.biases.idle", Some("0.01")),
    ("noise.biases.gate", Some("0.005")),
    ("noise.n_rus", Some("10")),
    ("noise.n_init", Some("5")),
    ("noise.n_measure", Some("5")),
    ("budget.total", Some("0.01")),
    ("budget.policy", Some("split")),
    ("budget.rot_fraction", Some("0.01")),
    ("synthesis.strategy", Some("mixed_fallback")),
    ("synthesis.p_succ", Some("0.99")),
    ("synthesis.mode", Some("worst")),
    ("synthesis.rounding", Some("integer")),
    ("timing.single_qubit_ns", Some("5")),
    ("timing.rus_cycle_ns", Some("30")),
    ("timing.syndrome_round_ns", Some("305")),
    ("timing.reaction_us", Some("10")),
    ("floorplan.override_total", None),
    ("floorplan.override_msf", None),
    ("data.lattice_surgery_csv", None),
    ("data.msf_table_csv", None),
    ("solver.max_iterations", Some("10")),
    ("solver.initial_rounds", None),
];

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !known(k) {
                return Err(Error::Config {
                    line: i + 1,
                    reason: format!("unknown key `{k}`"),
                });
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config {
                    line: i + 1,
                    reason: format!("duplicate key `{k}`"),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            reason: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::Config {
            line: 0,
            reason: format!("override `{pair}` is not key=value"),
        })?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !known(key) {
            return Err(Error::Config {
                line: 0,
                reason: format!("unknown key `{key}`"),
            });
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .or_else(|| KEYS.iter().find(|(k, _)| *k == key).and_then(|(_, d)| *d))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| Error::Config {
                    line: 0,
                    reason: format!("{key} = `{v}`: {e}"),
                })
            })
            .transpose()
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| Error::Config {
            line: 0,
            reason: format!("missing `{key}`"),
        })
    }

    fn choice<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<T> {
        let v: String = self.required(key)?;
        parse(&v).ok_or_else(|| Error::Config {
            line: 0,
            reason: format!("{key}: unrecognized value `{v}`"),
        })
    }
}

/// All inputs of one estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateInputs {
    pub spec: ProblemSpec,
    pub noise: PhysicalNoiseParams,
    pub caps: AttemptCaps,
    pub budget: ErrorBudget,
    pub options: SolveOptions,
}

impl EstimateInputs {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let spec = ProblemSpec::new(
            cfg.required("problem.L")?,
            cfg.required("problem.u_over_t")?,
            cfg.required("problem.sim_time_multiple")?,
            cfg.required("problem.w_msf")?,
        )?;
        let biases = NoiseBiases {
            loss: cfg.required("noise.biases.loss")?,
            distinguishability: cfg.required("noise.biases.distinguishability")?,
            idle: cfg.required("noise.biases.idle")?,
            gate: cfg.required("noise.biases.gate")?,
        };
        let noise = derive_noise_params(cfg.required("noise.p")?, Some(biases))?;
        let caps = AttemptCaps::new(
            cfg.required("noise.n_rus")?,
            cfg.required("noise.n_init")?,
            cfg.required("noise.n_measure")?,
        )?;
        cfg.choice("budget.policy", |s| (s == "split").then_some(()))?;
        let budget = allocate_budget(
            cfg.required("budget.total")?,
            BudgetPolicy::Split {
                rot_fraction: cfg.required("budget.rot_fraction")?,
            },
        )?;
        let timing = TimingModel::new(
            cfg.required("timing.single_qubit_ns")?,
            cfg.required("timing.rus_cycle_ns")?,
            cfg.required("timing.syndrome_round_ns")?,
            cfg.required("timing.reaction_us")?,
            caps.n_rus,
            caps.n_init,
            caps.n_measure,
        );
        timing.validate()?;
        let error_data = match cfg.get("data.lattice_surgery_csv") {
            Some(path) => read_error_data(open(path)?)?,
            None => bundled_error_data(),
        };
        let msf_table = match cfg.get("data.msf_table_csv") {
            Some(path) => read_msf_table(open(path)?)?,
            None => bundled_msf_table(),
        };
        let floorplan_override = match (
            cfg.parsed::<u64>("floorplan.override_total")?,
            cfg.parsed::<u64>("floorplan.override_msf")?,
        ) {
            (Some(t), Some(m)) => Some(FloorplanCounts::new(t, m)?),
            (None, None) => None,
            _ => {
                return Err(Error::Config {
                    line: 0,
                    reason: "floorplan overrides need both override_total and override_msf".into(),
                })
            }
        };
        let options = SolveOptions {
            strategy: cfg.choice("synthesis.strategy", SynthesisStrategy::parse)?,
            count_mode: cfg.choice("synthesis.mode", CountMode::parse)?,
            p_succ: cfg.required("synthesis.p_succ")?,
            rounding: cfg.choice("synthesis.rounding", |s| match s {
                "integer" => Some(Rounding::Integer),
                "exact" => Some(Rounding::Exact),
                _ => None,
            })?,
            timing,
            fit: fit_error_curve(&error_data)?,
            msf_table,
            floorplan_override,
            max_iterations: cfg.required("solver.max_iterations")?,
            initial_rounds: cfg.parsed("solver.initial_rounds")?,
        };
        Ok(Self {
            spec,
            noise,
            caps,
            budget,
            options,
        })
    }
}

fn open(path: &str) -> Result<File> {
    File::open(path).map_err(|e| Error::Data(format!("{path}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_library_defaults() {
        let inputs = EstimateInputs::from_config(&Config::default()).unwrap();
        assert_eq!(inputs.spec, ProblemSpec::default());
        assert_eq!(inputs.caps, AttemptCaps::default());
        assert_eq!(inputs.options, SolveOptions::default());
        assert_eq!(inputs.options.timing, TimingModel::default());
    }

    #[test]
    fn parse_and_override() {
        let mut cfg = Config::parse("# comment\nproblem.L = 6  # trailing\n\nbudget.total=0.02\n").unwrap();
        assert_eq!(cfg.get("problem.L"), Some("6"));
        cfg.set_pair("problem.L=10").unwrap();
        assert_eq!(cfg.get("problem.L"), Some("10"));
        assert_eq!(cfg.get("noise.p"), Some("0.01"));
        assert_eq!(cfg.get("floorplan.override_total"), None);
    }

    #[test]
    fn errors() {
        assert!(matches!(Config::parse("nonsense"), Err(Error::Config { line: 1, .. })));
        assert!(Config::parse("problem.Q = 1").is_err());
        assert!(Config::parse("problem.L = 1\nproblem.L = 2").is_err());
        let mut cfg = Config::default();
        assert!(cfg.set_pair("novalue").is_err());
        cfg.set("problem.L", "x").unwrap();
        assert!(EstimateInputs::from_config(&cfg).is_err());
        let mut cfg = Config::default();
        cfg.set("floorplan.override_total", "100").unwrap();
        assert!(EstimateInputs::from_config(&cfg).is_err());
        let mut cfg = Config::default();
        cfg.set("synthesis.strategy", "magic").unwrap();
        assert!(EstimateInputs::from_config(&cfg).is_err());
    }
}
