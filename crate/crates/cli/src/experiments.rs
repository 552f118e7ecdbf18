//! The five experiments. Each returns a plain report; rendering lives in
//! [`crate::output`].

use discrim_core::discrimination::{
    ff_success_probability, helstrom_bound, optimize_local_projective, walgate_decompose, FeedForwardProtocol,
    LocalOptimum,
};
use discrim_core::measurement::{
    estimate, protocol_to_povm, sample_discrimination_run, simulate_tomography, CoincidenceCounts,
    DiscriminationEstimate, TomographyRecord,
};
use discrim_core::states::{fidelity_pure, phi0, phi1, psi_pair, tangle, DensityMatrix2Q};
use discrim_core::tomography::mle_reconstruct;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::CliError;

/// Seed of row `index` of a grid or curve.
pub fn row_seed(master: u64, index: usize) -> u64 {
    master.wrapping_add(index as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sampled {
    pub seed: u64,
    pub counts0: CoincidenceCounts,
    pub counts1: CoincidenceCounts,
    pub estimate: DiscriminationEstimate,
}

fn sample(
    protocol: &FeedForwardProtocol,
    rho0: &DensityMatrix2Q,
    rho1: &DensityMatrix2Q,
    n: u64,
    seed: u64,
) -> Result<Sampled, CliError> {
    let povm = protocol_to_povm(protocol)?;
    let (counts0, counts1) = sample_discrimination_run(rho0, rho1, &povm, n, seed)?;
    Ok(Sampled {
        seed,
        counts0,
        counts1,
        estimate: estimate(&counts0, &counts1)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub ff_exact: f64,
    pub helstrom: f64,
    pub no_ff: f64,
    pub advantage: f64,
    pub sampled: Sampled,
    pub protocol: FeedForwardProtocol,
    pub no_ff_measurement: LocalOptimum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRow {
    pub theta0: f64,
    pub theta1: f64,
    pub ff_exact: f64,
    pub no_ff: f64,
    pub advantage: f64,
    pub sampled: Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub sampled_min: f64,
    pub sampled_max: f64,
    pub max_advantage: f64,
    pub max_advantage_at: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub rows: Vec<GridRow>,
    pub summary: GridSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub eta: f64,
    pub overlap: f64,
    pub helstrom_ideal: f64,
    pub helstrom_noisy: f64,
    /// Fixed `φ₀(60°)`/`φ₁(30°)` protocol on the noisy pair.
    pub ff_exact: f64,
    pub no_ff_ideal: f64,
    pub no_ff_noisy: f64,
    pub sampled: Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveReport {
    pub rows: Vec<CurveRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomoReport {
    pub seed: u64,
    /// Fidelity of the noisy input with the ideal target.
    pub fidelity_input: f64,
    /// Fidelity of the reconstruction with the ideal target.
    pub fidelity: f64,
    pub tangle_input: f64,
    pub tangle: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub likelihood_model: String,
    pub rho: DensityMatrix2Q,
    pub counts: TomographyRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub success: f64,
    pub helstrom: f64,
    pub optimum: LocalOptimum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Pair(PairReport),
    Grid(GridReport),
    Curve(CurveReport),
    Tomo(TomoReport),
    Optimize(OptimizeReport),
}

/// Runs the experiment named in a resolved config.
pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    Ok(match config.experiment() {
        Experiment::Pair => Report::Pair(run_pair(config)?),
        Experiment::Grid => Report::Grid(run_grid(config)?),
        Experiment::Curve => Report::Curve(run_curve(config)?),
        Experiment::Tomo => Report::Tomo(run_tomo(config)?),
        Experiment::Optimize => Report::Optimize(run_optimize(config)?),
    })
}

pub fn run_pair(config: &ExperimentConfig) -> Result<PairReport, CliError> {
    let (a, b) = config.pair_states()?;
    let protocol = if config.state0.is_some() {
        walgate_decompose(&a, &b)?
    } else {
        FeedForwardProtocol::canonical()
    };
    let (rho0, rho1) = (config.noisy(&a)?, config.noisy(&b)?);
    let priors = config.priors();
    let ff_exact = ff_success_probability(&protocol, &rho0, &rho1, &priors)?;
    let local = optimize_local_projective(&rho0, &rho1, &priors, &config.optimizer)?;
    Ok(PairReport {
        ff_exact,
        helstrom: helstrom_bound(&rho0, &rho1, &priors)?,
        no_ff: local.success,
        advantage: ff_exact - local.success,
        sampled: sample(&protocol, &rho0, &rho1, config.n_events, row_seed(config.seed(), 0))?,
        protocol,
        no_ff_measurement: local,
    })
}

pub fn run_grid(config: &ExperimentConfig) -> Result<GridReport, CliError> {
    let angles = config.grid_angles();
    let cells: Vec<(f64, f64)> = angles
        .iter()
        .flat_map(|&t0| angles.iter().map(move |&t1| (t0, t1)))
        .collect();
    let protocol = FeedForwardProtocol::canonical();
    let priors = config.priors();
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(index, &(theta0, theta1))| {
            let rho0 = config.noisy(&phi0(theta0)?)?;
            let rho1 = config.noisy(&phi1(theta1)?)?;
            let ff_exact = ff_success_probability(&protocol, &rho0, &rho1, &priors)?;
            let no_ff = optimize_local_projective(&rho0, &rho1, &priors, &config.optimizer)?.success;
            Ok(GridRow {
                theta0,
                theta1,
                ff_exact,
                no_ff,
                advantage: ff_exact - no_ff,
                sampled: sample(&protocol, &rho0, &rho1, config.n_events, row_seed(config.seed(), index))?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let sampled = rows.iter().map(|r| r.sampled.estimate.p_avg);
    let best = rows
        .iter()
        .fold(&rows[0], |best, r| if r.advantage > best.advantage { r } else { best });
    let summary = GridSummary {
        sampled_min: sampled.clone().fold(f64::INFINITY, f64::min),
        sampled_max: sampled.fold(f64::NEG_INFINITY, f64::max),
        max_advantage: best.advantage,
        max_advantage_at: [best.theta0, best.theta1],
    };
    Ok(GridReport { rows, summary })
}

pub fn run_curve(config: &ExperimentConfig) -> Result<CurveReport, CliError> {
    let protocol = FeedForwardProtocol::canonical();
    let priors = config.priors();
    let rows = config
        .eta_values()
        .par_iter()
        .enumerate()
        .map(|(index, &eta)| {
            let (a, b) = psi_pair(eta)?;
            let (ideal0, ideal1) = (a.density(), b.density());
            let (rho0, rho1) = (config.noisy(&a)?, config.noisy(&b)?);
            Ok(CurveRow {
                eta,
                overlap: a.overlap_sqr(&b),
                helstrom_ideal: helstrom_bound(&ideal0, &ideal1, &priors)?,
                helstrom_noisy: helstrom_bound(&rho0, &rho1, &priors)?,
                ff_exact: ff_success_probability(&protocol, &rho0, &rho1, &priors)?,
                no_ff_ideal: optimize_local_projective(&ideal0, &ideal1, &priors, &config.optimizer)?.success,
                no_ff_noisy: optimize_local_projective(&rho0, &rho1, &priors, &config.optimizer)?.success,
                sampled: sample(&protocol, &rho0, &rho1, config.n_events, row_seed(config.seed(), index))?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(CurveReport { rows })
}

pub fn run_tomo(config: &ExperimentConfig) -> Result<TomoReport, CliError> {
    let target = config.target_state()?;
    let input = config.noisy(&target)?;
    let seed = row_seed(config.seed(), 0);
    let counts = simulate_tomography(&input, config.n_per_setting, seed)?;
    let fit = mle_reconstruct(&counts, &config.mle)?;
    Ok(TomoReport {
        seed,
        fidelity_input: fidelity_pure(&input, &target)?,
        fidelity: fidelity_pure(&fit.rho, &target)?,
        tangle_input: tangle(&input)?,
        tangle: tangle(&fit.rho)?,
        log_likelihood: fit.log_likelihood,
        iterations: fit.iterations,
        converged: fit.converged,
        likelihood_model: fit.likelihood_model,
        rho: fit.rho,
        counts,
    })
}

pub fn run_optimize(config: &ExperimentConfig) -> Result<OptimizeReport, CliError> {
    let (a, b) = config.pair_states()?;
    let (rho0, rho1) = (config.noisy(&a)?, config.noisy(&b)?);
    let priors = config.priors();
    let optimum = optimize_local_projective(&rho0, &rho1, &priors, &config.optimizer)?;
    Ok(OptimizeReport {
        success: optimum.success,
        helstrom: helstrom_bound(&rho0, &rho1, &priors)?,
        optimum,
    })
}
