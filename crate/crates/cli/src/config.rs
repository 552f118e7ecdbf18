//! Experiment configuration: JSON file plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use discrim_core::discrimination::{OptimizerConfig, PriorPair, ORTHOGONALITY_TOL};
use discrim_core::states::{bell_phi_plus, h_state, phi0, phi1, psi_pair, werner_noise, PureState2Q};
use discrim_core::tomography::MleConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "DISCRIM_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Pair,
    Grid,
    Curve,
    Tomo,
    Optimize,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Pair => "pair",
            Experiment::Grid => "grid",
            Experiment::Curve => "curve",
            Experiment::Tomo => "tomo",
            Experiment::Optimize => "optimize",
        }
    }

    fn samples(&self) -> bool {
        !matches!(self, Experiment::Optimize)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// State fed to the tomography experiment before noise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `φ₀(theta0)`
    #[default]
    Phi0,
    /// `φ₁(theta1)`
    Phi1,
    /// first state of the pair at `eta`
    Psi0,
    /// second state of the pair at `eta`
    Psi1,
    Bell,
    Hh,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    /// Degrees, `[0, 90]`.
    pub theta0: f64,
    pub theta1: f64,
    /// Explicit pure states replacing `φ₀(theta0)`, `φ₁(theta1)` in `pair`
    /// and `optimize`.
    pub state0: Option<PureState2Q>,
    pub state1: Option<PureState2Q>,
    /// Angle step of the `grid` experiment; must divide 90.
    pub grid_step: f64,
    pub eta_start: f64,
    pub eta_stop: f64,
    pub eta_step: f64,
    /// Pair parameter for the `psi0`/`psi1` tomography targets.
    pub eta: f64,
    /// Werner visibility applied to every prepared state.
    pub noise_v: f64,
    /// Events per prepared state.
    pub n_events: u64,
    pub n_per_setting: u64,
    pub target: Target,
    /// Prior of state 0.
    pub p0: f64,
    pub master_seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub optimizer: OptimizerConfig,
    pub mle: MleConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            theta0: 30.0,
            theta1: 60.0,
            state0: None,
            state1: None,
            grid_step: 15.0,
            eta_start: 0.0,
            eta_stop: 45.0,
            eta_step: 5.0,
            eta: 22.5,
            noise_v: 1.0,
            n_events: 1_000_000,
            n_per_setting: 10_000,
            target: Target::Phi0,
            p0: 0.5,
            master_seed: None,
            output_path: None,
            format: Format::Csv,
            optimizer: OptimizerConfig::default(),
            mle: MleConfig::default(),
        }
    }
}

/// Values given on the command line; each one replaces the file value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_range(name: &str, value: f64, min: f64, max: f64) -> Result<(), CliError> {
    if !(value.is_finite() && value >= min && value <= max) {
        return Err(config_err(format!("`{name}` = {value} is outside [{min}, {max}]")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| config_err(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Applies the experiment chosen on the command line and the flag
    /// overrides, then validates.
    pub fn resolve(mut self, experiment: Experiment, overrides: &Overrides) -> Result<Self, CliError> {
        self.experiment = Some(experiment);
        if let Some(out) = &overrides.out {
            self.output_path = Some(out.clone());
        }
        if let Some(format) = overrides.format {
            self.format = format;
        }
        if let Some(seed) = overrides.seed {
            self.master_seed = Some(seed);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment.unwrap_or(Experiment::Pair)
    }

    pub fn seed(&self) -> u64 {
        self.master_seed.unwrap_or(0)
    }

    pub fn priors(&self) -> PriorPair {
        PriorPair::new(self.p0, 1.0 - self.p0).expect("validated")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let experiment = self.experiment();
        check_range("theta0", self.theta0, 0.0, 90.0)?;
        check_range("theta1", self.theta1, 0.0, 90.0)?;
        check_range("noise_v", self.noise_v, 0.0, 1.0)?;
        check_range("eta", self.eta, 0.0, 45.0)?;
        check_range("eta_start", self.eta_start, 0.0, 45.0)?;
        check_range("eta_stop", self.eta_stop, 0.0, 45.0)?;
        if self.eta_start > self.eta_stop {
            return Err(config_err("`eta_start` must not exceed `eta_stop`"));
        }
        if !(self.eta_step.is_finite() && self.eta_step > 0.0) {
            return Err(config_err("`eta_step` must be positive"));
        }
        if !(self.grid_step.is_finite() && self.grid_step > 0.0) {
            return Err(config_err("`grid_step` must be positive"));
        }
        let cells = 90.0 / self.grid_step;
        if (cells - cells.round()).abs() > 1e-9 {
            return Err(config_err(format!("`grid_step` = {} does not divide 90", self.grid_step)));
        }
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            return Err(config_err(format!("`p0` = {} must lie strictly between 0 and 1", self.p0)));
        }
        if self.n_events == 0 {
            return Err(config_err("`n_events` must be positive"));
        }
        if self.n_per_setting == 0 {
            return Err(config_err("`n_per_setting` must be positive"));
        }
        if experiment.samples() && self.master_seed.is_none() {
            return Err(config_err(format!(
                "`{experiment}` samples counts and needs a master seed: set `master_seed` or pass --seed"
            )));
        }
        if self.state0.is_some() != self.state1.is_some() {
            return Err(config_err("`state0` and `state1` must be given together"));
        }
        if let (Some(a), Some(b)) = (&self.state0, &self.state1) {
            if experiment == Experiment::Pair && a.inner(b).norm() > ORTHOGONALITY_TOL {
                return Err(config_err(format!(
                    "`pair` needs orthogonal states; |⟨state0|state1⟩| = {:.3e}",
                    a.inner(b).norm()
                )));
            }
        }
        self.optimizer
            .validate()
            .map_err(|e| config_err(format!("optimizer: {e}")))?;
        self.mle.validate().map_err(|e| config_err(format!("mle: {e}")))?;
        Ok(())
    }

    /// The ideal pair used by `pair` and `optimize`.
    pub fn pair_states(&self) -> Result<(PureState2Q, PureState2Q), CliError> {
        if let (Some(a), Some(b)) = (&self.state0, &self.state1) {
            return Ok((*a, *b));
        }
        Ok((phi0(self.theta0)?, phi1(self.theta1)?))
    }

    pub fn target_state(&self) -> Result<PureState2Q, CliError> {
        Ok(match self.target {
            Target::Phi0 => phi0(self.theta0)?,
            Target::Phi1 => phi1(self.theta1)?,
            Target::Psi0 => psi_pair(self.eta)?.0,
            Target::Psi1 => psi_pair(self.eta)?.1,
            Target::Bell => bell_phi_plus(),
            Target::Hh => PureState2Q::product(&h_state(), &h_state())?,
        })
    }

    /// `θ` values of one grid axis.
    pub fn grid_angles(&self) -> Vec<f64> {
        let cells = (90.0 / self.grid_step).round() as usize;
        (0..=cells).map(|k| k as f64 * self.grid_step).collect()
    }

    /// `η` values of the curve, ending exactly at `eta_stop`.
    pub fn eta_values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let eta = self.eta_start + k as f64 * self.eta_step;
            if eta > self.eta_stop + 1e-9 {
                break;
            }
            out.push(eta.min(self.eta_stop));
            k += 1;
        }
        out
    }

    pub fn noisy(&self, psi: &PureState2Q) -> Result<discrim_core::states::DensityMatrix2Q, CliError> {
        Ok(werner_noise(psi, self.noise_v)?)
    }

    /// Where to write, if anywhere: `output_path`, else a file named after
    /// the experiment in `$DISCRIM_OUT_DIR`, else standard output.
    pub fn output_target(&self) -> Option<PathBuf> {
        if let Some(p) = &self.output_path {
            return Some(p.clone());
        }
        std::env::var_os(OUT_DIR_VAR)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{}.{}", self.experiment(), self.format.extension())))
    }
}
