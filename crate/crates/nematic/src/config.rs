//! Flat key-value run configuration. Dotted keys group related settings;
//! parsing collects every problem instead of stopping at the first one,
//! and unknown keys are errors.

use std::path::PathBuf;

use crate::coefficients::LeslieCoefficients;
use crate::constitutive::OmegaConvention;
use crate::error::{NematicError, Result};
use crate::solver::{Scheme, StepperConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Equilibrium,
    ShearWave,
    DirectorWave,
    RandomSmooth,
    SmallData,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    pub mu: [f64; 6],
    pub eta: f64,
    pub m1: f64,
    pub m2: f64,
    pub preset: Preset,
    pub checkpoint: Option<PathBuf>,
    pub seed: u64,
    pub decay: f64,
    pub epsilon: f64,
    pub shear: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub dealias_factor: f64,
    pub cfl_safety: f64,
    pub report_every: usize,
    pub stabilization: f64,
    pub t_final: f64,
    pub csv: String,
    pub checkpoint_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: 2,
            n: 64,
            mu: [1.0, -1.5, 0.5, 2.0, 1.0, 0.0],
            eta: 0.5,
            m1: 0.5,
            m2: 1.5,
            preset: Preset::Equilibrium,
            checkpoint: None,
            seed: 0,
            decay: 2.0,
            epsilon: 0.01,
            shear: 0.0,
            dt: 1e-3,
            scheme: Scheme::Imex1,
            dealias_factor: 2.0,
            cfl_safety: 0.5,
            report_every: 10,
            stabilization: 0.0,
            t_final: 1.0,
            csv: "energy.csv".to_string(),
            checkpoint_every: 0,
        }
    }
}

impl RunConfig {
    pub fn coefficients(&self) -> Result<LeslieCoefficients> {
        LeslieCoefficients::new(self.mu, self.eta)
    }

    pub fn stepper(&self) -> StepperConfig {
        StepperConfig {
            dt: self.dt,
            scheme: self.scheme,
            dealias_factor: self.dealias_factor,
            cfl_safety: self.cfl_safety,
            report_every: self.report_every,
            stabilization: self.stabilization,
            omega_convention: OmegaConvention::Standard,
            ..StepperConfig::default()
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut errors = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {}: expected key = value", lineno + 1));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        let mut f64_into = |slot: &mut f64| match value.parse::<f64>() {
            Ok(v) => *slot = v,
            Err(_) => errors.push(format!("line {}: {key}: not a number: {value}", lineno + 1)),
        };
        match key {
            "grid.dim" | "grid.n" | "stepper.report_every" | "output.checkpoint_every" => {
                match value.parse::<usize>() {
                    Ok(v) => match key {
                        "grid.dim" => cfg.dim = v,
                        "grid.n" => cfg.n = v,
                        "stepper.report_every" => cfg.report_every = v,
                        _ => cfg.checkpoint_every = v,
                    },
                    Err(_) => errors.push(format!(
                        "line {}: {key}: not an unsigned integer: {value}",
                        lineno + 1
                    )),
                }
            }
            "coefficients.mu1" => f64_into(&mut cfg.mu[0]),
            "coefficients.mu2" => f64_into(&mut cfg.mu[1]),
            "coefficients.mu3" => f64_into(&mut cfg.mu[2]),
            "coefficients.mu4" => f64_into(&mut cfg.mu[3]),
            "coefficients.mu5" => f64_into(&mut cfg.mu[4]),
            "coefficients.mu6" => f64_into(&mut cfg.mu[5]),
            "coefficients.eta" => f64_into(&mut cfg.eta),
            "density.m1" => f64_into(&mut cfg.m1),
            "density.m2" => f64_into(&mut cfg.m2),
            "initial.decay" => f64_into(&mut cfg.decay),
            "initial.epsilon" => f64_into(&mut cfg.epsilon),
            "initial.shear" => f64_into(&mut cfg.shear),
            "stepper.dt" => f64_into(&mut cfg.dt),
            "stepper.dealias_factor" => f64_into(&mut cfg.dealias_factor),
            "stepper.cfl_safety" => f64_into(&mut cfg.cfl_safety),
            "stepper.stabilization" => f64_into(&mut cfg.stabilization),
            "run.t_final" => f64_into(&mut cfg.t_final),
            "initial.seed" => match value.parse::<u64>() {
                Ok(v) => cfg.seed = v,
                Err(_) => errors.push(format!(
                    "line {}: initial.seed: not an unsigned integer: {value}",
                    lineno + 1
                )),
            },
            "initial.preset" => {
                cfg.preset = match value {
                    "equilibrium" => Preset::Equilibrium,
                    "shear-wave" => Preset::ShearWave,
                    "director-wave" => Preset::DirectorWave,
                    "random-smooth" => Preset::RandomSmooth,
                    "small-data" => Preset::SmallData,
                    other => {
                        errors.push(format!(
                            "line {}: initial.preset: unknown preset {other}",
                            lineno + 1
                        ));
                        continue;
                    }
                }
            }
            "initial.checkpoint" => cfg.checkpoint = Some(PathBuf::from(value)),
            "stepper.scheme" => {
                cfg.scheme = match value {
                    "imex1" => Scheme::Imex1,
                    "imex2" => Scheme::Imex2,
                    other => {
                        errors.push(format!(
                            "line {}: stepper.scheme: unknown scheme {other}",
                            lineno + 1
                        ));
                        continue;
                    }
                }
            }
            "output.csv" => cfg.csv = value.to_string(),
            other => errors.push(format!("line {}: unknown key {other}", lineno + 1)),
        }
    }
    // semantic checks, still collected
    if !(2..=3).contains(&cfg.dim) {
        errors.push(format!("grid.dim must be 2 or 3, got {}", cfg.dim));
    }
    if cfg.n < 4 || cfg.n % 2 != 0 {
        errors.push(format!("grid.n must be even and at least 4, got {}", cfg.n));
    }
    if !(cfg.eta > 0.0) {
        errors.push(format!("coefficients.eta must be positive, got {}", cfg.eta));
    }
    if !(cfg.m1 > 0.0 && cfg.m1 <= cfg.m2) {
        errors.push(format!(
            "density bounds need 0 < m1 <= m2, got m1={} m2={}",
            cfg.m1, cfg.m2
        ));
    }
    if !(cfg.dt > 0.0) {
        errors.push(format!("stepper.dt must be positive, got {}", cfg.dt));
    }
    if !(cfg.t_final > 0.0) {
        errors.push(format!("run.t_final must be positive, got {}", cfg.t_final));
    }
    if cfg.dealias_factor < 1.5 {
        errors.push(format!(
            "stepper.dealias_factor must be at least 1.5, got {}",
            cfg.dealias_factor
        ));
    }
    if let Some(path) = &cfg.checkpoint {
        if !path.exists() {
            errors.push(format!(
                "initial.checkpoint does not exist: {}",
                path.display()
            ));
        }
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(NematicError::Config(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config("grid.n = 32\n").unwrap();
        assert_eq!(cfg.n, 32);
        assert_eq!(cfg.dim, 2);
        assert_eq!(cfg.mu[3], 2.0);
        assert_eq!(cfg.preset, Preset::Equilibrium);
    }

    #[test]
    fn mu4_zero_parses() {
        // the admissibility gate, not the parser, rejects this run
        let cfg = parse_config("coefficients.mu4 = 0.0\n").unwrap();
        assert_eq!(cfg.mu[3], 0.0);
        let report = crate::coefficients::check_dissipation(&cfg.coefficients().unwrap());
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn unknown_key_named() {
        let err = parse_config("coefficients.mu7 = 1.0\n").unwrap_err();
        match err {
            NematicError::Config(list) => {
                assert_eq!(list.len(), 1);
                assert!(list[0].contains("mu7"), "{list:?}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_errors_reported() {
        let err = parse_config("grid.dim = 5\nbogus.key = 1\nstepper.dt = frog\n").unwrap_err();
        match err {
            NematicError::Config(list) => {
                assert!(list.len() >= 3, "{list:?}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let cfg = parse_config("# a comment\n\ngrid.n = 16 # trailing\n").unwrap();
        assert_eq!(cfg.n, 16);
    }
}
