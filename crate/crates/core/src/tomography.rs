//! Maximum-likelihood reconstruction of a two-qubit density matrix.
//!
//! Counts are modelled as independent Poisson variables with means
//! `N eₛ pₛ`, `pₛ = Tr(ρΠₛ)`, where `eₛ` is the relative exposure of setting
//! `s`. The unknown intensity is replaced by its maximizer
//! `N̂(ρ) = Σ nₛ / Σ eₛ pₛ`, giving
//!
//! `L(ρ) = Σₛ nₛ ln(N̂ eₛ pₛ) − N̂ eₛ pₛ`.
//!
//! With equal exposures `Σ eₛ pₛ` does not depend on `ρ` for the 36-setting
//! scheme and this is the plain `Σ nₛ ln pₛ − N pₛ` up to a constant. The
//! likelihood is maximized by the diluted fixed-point iteration
//!
//! `ρ ← (1 − d) ρ + d · E⁻¹R ρ R E⁻¹ / Tr(…)`,
//!
//! with `R = Σ (nₛ/pₛ) Πₛ` and `E = Σ eₛ Πₛ`. For equal exposures `E` is
//! proportional to the identity and this is the usual `RρR` scheme. Only
//! steps that do not lower `L` are accepted; a rejected step halves `d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMat4};
use crate::measurement::TomographyRecord;
use crate::states::{fidelity_pure, DensityMatrix2Q, PureState2Q};

/// Floor applied to `pₛ` inside the logarithm and the ratio operator.
pub const PROB_FLOOR: f64 = 1e-15;

const DILUTION_RESTORE_AFTER: usize = 10;
const MIN_DILUTION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MleConfig {
    pub max_iterations: usize,
    /// Relative change of the log-likelihood below which iteration stops,
    /// measured against the distance `L_sat − L` to the saturated model.
    pub ll_tolerance: f64,
    /// Initial mixing weight `d` of the fixed-point map, in `(0, 1]`.
    pub dilution: f64,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            ll_tolerance: 1e-10,
            dilution: 0.5,
        }
    }
}

impl MleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be positive".into()));
        }
        if !(self.ll_tolerance.is_finite() && self.ll_tolerance > 0.0) {
            return Err(Error::InvalidInput("ll_tolerance must be positive".into()));
        }
        if !(self.dilution > 0.0 && self.dilution <= 1.0) {
            return Err(Error::InvalidInput("dilution must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub rho: DensityMatrix2Q,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Likelihood model used for the fit.
    pub likelihood_model: String,
}

struct Prepared {
    projectors: Vec<CMat4>,
    counts: Vec<f64>,
    exposures: Vec<f64>,
    total: f64,
}

impl Prepared {
    fn new(record: &TomographyRecord) -> Self {
        let projectors: Vec<CMat4> = record.entries().iter().map(|e| e.setting.projector()).collect();
        let counts: Vec<f64> = record.entries().iter().map(|e| e.count as f64).collect();
        let exposures: Vec<f64> = record.entries().iter().map(|e| e.exposure).collect();
        let total = counts.iter().sum();
        Self {
            projectors,
            counts,
            exposures,
            total,
        }
    }

    fn probabilities(&self, rho: &CMat4) -> Vec<f64> {
        self.projectors.iter().map(|p| rho.trace_product(p).re).collect()
    }

    fn log_likelihood(&self, rho: &CMat4) -> f64 {
        self.saturated() - self.gap(rho)
    }

    /// Likelihood of the saturated model `μₛ = nₛ`.
    fn saturated(&self) -> f64 {
        self.counts.iter().filter(|&&n| n > 0.0).map(|&n| n * n.ln()).sum::<f64>() - self.total
    }

    /// Half the deviance, `L_sat − L(ρ) ≥ 0`. Summed term by term so that it
    /// stays accurate when `L` itself is of order `N ln N`.
    fn gap(&self, rho: &CMat4) -> f64 {
        if self.total == 0.0 {
            return 0.0;
        }
        let probs = self.probabilities(rho);
        let expected: f64 = probs.iter().zip(&self.exposures).map(|(p, e)| e * p.max(0.0)).sum();
        let intensity = self.total / expected.max(PROB_FLOOR);
        let mut log_part = 0.0;
        let mut mass = 0.0;
        for (&p, (&n, &e)) in probs.iter().zip(self.counts.iter().zip(&self.exposures)) {
            if n > 0.0 {
                log_part += n * (n / (intensity * e * p.max(PROB_FLOOR))).ln();
            }
            mass += intensity * e * p;
        }
        log_part + (mass - self.total)
    }

    fn ratio_operator(&self, rho: &CMat4) -> CMat4 {
        let probs = self.probabilities(rho);
        let mut r = CMat4::zeros();
        for ((proj, &n), p) in self.projectors.iter().zip(&self.counts).zip(probs) {
            if n > 0.0 {
                r += proj.scale_re(n / p.max(PROB_FLOOR));
            }
        }
        r
    }

    /// `E⁻¹` with `E = Σ eₛ Πₛ`.
    fn inverse_exposure(&self) -> Result<CMat4> {
        let mut h = CMat4::zeros();
        for (proj, &e) in self.projectors.iter().zip(&self.exposures) {
            h += proj.scale_re(e);
        }
        let eig = hermitian_eig(&h.hermitian_part())?;
        if eig.eigenvalues[0] <= 0.0 {
            return Err(Error::InvalidInput(
                "tomography settings are not informationally complete".into(),
            ));
        }
        Ok(eig.map_spectrum(|x| 1.0 / x))
    }
}

/// Poisson log-likelihood `Σₛ nₛ ln(N̂ eₛ pₛ) − N̂ eₛ pₛ` (without the
/// `ln nₛ!` constant), `pₛ = Tr(ρΠₛ)` floored at `1e-15` in the logarithm.
pub fn log_likelihood(rho: &DensityMatrix2Q, record: &TomographyRecord) -> Result<f64> {
    DensityMatrix2Q::validate(rho.mat())?;
    Ok(Prepared::new(record).log_likelihood(rho.mat()))
}

/// Maximum-likelihood estimate starting from `I/4`.
pub fn mle_reconstruct(record: &TomographyRecord, config: &MleConfig) -> Result<MleResult> {
    mle_reconstruct_observed(record, config, |_, _, _| {})
}

/// As [`mle_reconstruct`], calling `observer(iteration, ρ, log_likelihood)`
/// after the initial point and after every accepted step.
pub fn mle_reconstruct_observed<F>(record: &TomographyRecord, config: &MleConfig, mut observer: F) -> Result<MleResult>
where
    F: FnMut(usize, &DensityMatrix2Q, f64),
{
    config.validate()?;
    let model = "poisson, intensity profiled".to_string();
    let mut rho = DensityMatrix2Q::maximally_mixed();
    if record.total_counts() == 0 {
        let ll = 0.0;
        observer(0, &rho, ll);
        return Ok(MleResult {
            rho,
            log_likelihood: ll,
            iterations: 0,
            converged: true,
            likelihood_model: model,
        });
    }

    let data = Prepared::new(record);
    let e_inv = data.inverse_exposure()?;
    let saturated = data.saturated();
    let mut gap = data.gap(rho.mat());
    let mut ll = saturated - gap;
    observer(0, &rho, ll);

    let mut dilution = config.dilution;
    let mut streak = 0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let r = data.ratio_operator(rho.mat());
        let mapped = (e_inv * r * *rho.mat() * r * e_inv).hermitian_part();
        let tr = mapped.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::ConvergenceFailure {
                what: "mle_reconstruct",
                detail: format!("degenerate fixed-point map (trace {tr})"),
            });
        }
        let mixed = rho.mat().scale_re(1.0 - dilution) + mapped.scale_re(dilution / tr);
        let candidate = mixed.scale_re(1.0 / mixed.trace().re).hermitian_part();
        let cand_gap = data.gap(&candidate);

        if cand_gap <= gap {
            let change = (gap - cand_gap) / gap.max(1.0);
            rho = DensityMatrix2Q::from_trusted(candidate);
            gap = cand_gap;
            ll = saturated - gap;
            observer(iterations, &rho, ll);
            streak += 1;
            if streak >= DILUTION_RESTORE_AFTER {
                dilution = config.dilution;
                streak = 0;
            }
            if change < config.ll_tolerance {
                converged = true;
                break;
            }
        } else {
            dilution *= 0.5;
            streak = 0;
            if dilution < MIN_DILUTION {
                // no ascent left along the fixed-point direction
                converged = true;
                break;
            }
        }
    }

    Ok(MleResult {
        rho,
        log_likelihood: ll,
        iterations,
        converged,
        likelihood_model: model,
    })
}

/// Fidelity of the reconstructed state with a pure target.
pub fn fidelity_report(result: &MleResult, target: &PureState2Q) -> Result<f64> {
    fidelity_pure(&result.rho, target)
}
