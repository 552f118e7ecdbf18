//! Discriminating two bipartite states with local measurements.
//!
//! Any two orthogonal two-qubit pure states can be written as
//! `|φ⟩ = Σᵢ cᵢ |i⟩|ηᵢ⟩` and `|ψ⟩ = Σᵢ dᵢ |i⟩|ηᵢ⊥⟩` for some basis `{|i⟩}`
//! on Alice's side. Alice measures in `{|i⟩}`, announces `i`, and Bob
//! measures in `{|ηᵢ⟩, |ηᵢ⊥⟩}`; the pair is then told apart with certainty.
//! [`walgate_decompose`] finds that basis, [`ff_success_probability`]
//! evaluates a feed-forward protocol exactly, [`helstrom_bound`] gives the
//! global optimum and [`optimize_local_projective`] searches the best
//! product measurement without feed-forward.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, trace_norm, CMat2, CMat4, CVec, CVec2, C64};
use crate::optim::nelder_mead;
use crate::states::{u_perp_state, u_state, DensityMatrix2Q, PureState2Q};

/// Orthonormality tolerance for stored bases.
pub const BASIS_TOL: f64 = 1e-12;
/// Completeness tolerance `‖Σ Π − I‖_max`.
pub const COMPLETENESS_TOL: f64 = 1e-12;
/// Orthogonality accepted by [`walgate_decompose`].
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

const TRACELESS_TOL: f64 = 1e-10;
const HOLLOW_RESIDUAL: f64 = 1e-12;
const DEGENERATE_NORM: f64 = 1e-10;

/// Index of one of the two hypotheses, `0` or `1`.
pub type Label = usize;

/// Prior probabilities of the two hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorPair {
    pub p0: f64,
    pub p1: f64,
}

impl PriorPair {
    pub fn new(p0: f64, p1: f64) -> Result<Self> {
        if !(p0.is_finite() && p1.is_finite()) || p0 < 0.0 || p1 < 0.0 || (p0 + p1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "priors ({p0}, {p1}) must be nonnegative and sum to 1"
            )));
        }
        Ok(Self { p0, p1 })
    }

    pub fn equal() -> Self {
        Self { p0: 0.5, p1: 0.5 }
    }

    pub fn get(&self, label: Label) -> f64 {
        if label == 0 {
            self.p0
        } else {
            self.p1
        }
    }
}

impl Default for PriorPair {
    fn default() -> Self {
        Self::equal()
    }
}

fn check_basis(basis: &[CVec2; 2], what: &str) -> std::result::Result<(), String> {
    let dev = (basis[0].norm_sqr() - 1.0)
        .abs()
        .max((basis[1].norm_sqr() - 1.0).abs())
        .max(basis[0].inner(&basis[1]).norm());
    if !(basis[0].is_finite() && basis[1].is_finite()) || dev > BASIS_TOL {
        return Err(format!("{what} is not orthonormal (deviation {dev:.3e})"));
    }
    Ok(())
}

fn check_label(l: Label) -> std::result::Result<(), String> {
    if l > 1 {
        return Err(format!("label {l} is not 0 or 1"));
    }
    Ok(())
}

fn completeness_deviation(projectors: &[CMat4]) -> f64 {
    let sum = projectors.iter().fold(CMat4::zeros(), |acc, p| acc + *p);
    sum.max_abs_diff(&CMat4::identity())
}

/// `Σₒ p_label(o) Tr(ρ_label(o) Πₒ)`.
fn labeled_success(
    elements: &[(CMat4, Label)],
    rho0: &DensityMatrix2Q,
    rho1: &DensityMatrix2Q,
    priors: &PriorPair,
) -> f64 {
    elements
        .iter()
        .map(|(proj, label)| {
            let rho = if *label == 0 { rho0 } else { rho1 };
            priors.get(*label) * rho.expectation(proj)
        })
        .sum()
}

/// Alice measures in `alice_basis`; on outcome `i` Bob measures in
/// `bob_bases[i]` and the pair `(i, j)` is guessed as `guess[i][j]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeedForwardProtocol {
    alice_basis: [CVec2; 2],
    bob_bases: [[CVec2; 2]; 2],
    guess: [[Label; 2]; 2],
}

impl FeedForwardProtocol {
    pub fn new(alice_basis: [CVec2; 2], bob_bases: [[CVec2; 2]; 2], guess: [[Label; 2]; 2]) -> Result<Self> {
        let p = Self {
            alice_basis,
            bob_bases,
            guess,
        };
        p.validate()?;
        Ok(p)
    }

    /// The fixed protocol for the `φ₀`/`φ₁` family: Alice measures
    /// `{H, V}`; on `H` Bob measures `{Z|u⟩, Z|u⊥⟩}`, on `V` he measures
    /// `{|u⟩, |u⊥⟩}`. Bob's first outcome is read as `φ₀`.
    pub fn canonical() -> Self {
        let z = CMat2::pauli_z();
        let (u, up) = (u_state(), u_perp_state());
        Self {
            alice_basis: [CVec2::basis(0), CVec2::basis(1)],
            bob_bases: [[z.apply(&u), z.apply(&up)], [u, up]],
            guess: [[0, 1], [0, 1]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_basis(&self.alice_basis, "Alice basis").map_err(Error::InvalidProtocol)?;
        for (i, b) in self.bob_bases.iter().enumerate() {
            check_basis(b, &format!("Bob basis for Alice outcome {i}")).map_err(Error::InvalidProtocol)?;
        }
        for row in &self.guess {
            for &l in row {
                check_label(l).map_err(Error::InvalidProtocol)?;
            }
        }
        let projs: Vec<CMat4> = self.projectors().iter().flatten().copied().collect();
        let deviation = completeness_deviation(&projs);
        if deviation > COMPLETENESS_TOL {
            return Err(Error::InvalidProtocol(format!(
                "projectors do not sum to identity (deviation {deviation:.3e})"
            )));
        }
        Ok(())
    }

    pub fn alice_basis(&self) -> &[CVec2; 2] {
        &self.alice_basis
    }

    pub fn bob_basis(&self, alice_outcome: usize) -> &[CVec2; 2] {
        &self.bob_bases[alice_outcome]
    }

    pub fn guess(&self, alice_outcome: usize, bob_outcome: usize) -> Label {
        self.guess[alice_outcome][bob_outcome]
    }

    /// `Πᵢⱼ = |i⟩⟨i| ⊗ |bⱼ|ᵢ⟩⟨bⱼ|ᵢ|`.
    pub fn projectors(&self) -> [[CMat4; 2]; 2] {
        let mut out = [[CMat4::zeros(); 2]; 2];
        for (i, a) in self.alice_basis.iter().enumerate() {
            for (j, b) in self.bob_bases[i].iter().enumerate() {
                out[i][j] = kron(&a.projector(), &b.projector());
            }
        }
        out
    }

    /// Projectors with their guessed labels, in `(i, j)` row-major order.
    pub fn labeled_elements(&self) -> [(CMat4, Label); 4] {
        let p = self.projectors();
        [
            (p[0][0], self.guess[0][0]),
            (p[0][1], self.guess[0][1]),
            (p[1][0], self.guess[1][0]),
            (p[1][1], self.guess[1][1]),
        ]
    }
}

/// A unit vector `w` with `⟨w|m|w⟩ = 0` for a traceless 2×2 matrix `m`.
///
/// Since `Tr m = 0`, the orthogonal vector `w⊥` satisfies the same equation.
/// Parametrizing `w = (cos t, e^{iφ} sin t)`, the real and imaginary parts of
/// `⟨w|m|w⟩` are driven to zero by a damped Newton (Levenberg–Marquardt)
/// iteration from 16 spread-out starting points.
pub fn hollow_vector(m: &CMat2) -> Result<CVec2> {
    let tr = m.trace();
    if tr.norm() >= TRACELESS_TOL || !m.is_finite() {
        return Err(Error::NotTraceless { trace_abs: tr.norm() });
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok(CVec2::basis(0));
    }
    let n = traceless_part(m).scale_re(1.0 / scale);
    let target = HOLLOW_RESIDUAL / scale.max(1.0);

    let mut best: Option<(f64, CVec2)> = None;
    for k in 0..4 {
        for j in 0..4 {
            let t0 = (k as f64 + 0.5) * std::f64::consts::PI / 8.0;
            let p0 = (j as f64 + 0.5) * std::f64::consts::FRAC_PI_2;
            let (t, p) = hollow_newton(&n, t0, p0);
            let w = CVec([C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), p)]);
            let res = n.expectation(&w).norm();
            if res < target {
                return Ok(w);
            }
            if best.map_or(true, |(r, _)| res < r) {
                best = Some((res, w));
            }
        }
    }
    Err(Error::ConvergenceFailure {
        what: "hollow_vector",
        detail: format!("best residual {:.3e} from 16 starts", best.map_or(f64::NAN, |b| b.0 * scale)),
    })
}

fn hollow_residual(m: &CMat2, t: f64, p: f64) -> (C64, C64, C64) {
    let e = C64::from_polar(1.0, p);
    let cross = m[(0, 1)] * e + m[(1, 0)] * e.conj();
    let (s2, c2) = (2.0 * t).sin_cos();
    let f = m[(0, 0)] * t.cos().powi(2) + m[(1, 1)] * t.sin().powi(2) + cross * (0.5 * s2);
    let df_dt = (m[(1, 1)] - m[(0, 0)]) * s2 + cross * c2;
    let df_dp = C64::new(0.0, 0.5 * s2) * (m[(0, 1)] * e - m[(1, 0)] * e.conj());
    (f, df_dt, df_dp)
}

fn hollow_newton(m: &CMat2, mut t: f64, mut p: f64) -> (f64, f64) {
    let mut mu = 1e-3;
    let (mut f, mut jt, mut jp) = hollow_residual(m, t, p);
    for _ in 0..200 {
        let cost = f.norm_sqr();
        if cost < 1e-32 {
            break;
        }
        // normal equations (JᵀJ + μI)δ = −Jᵀr with r = (Re f, Im f)
        let a11 = jt.norm_sqr() + mu;
        let a22 = jp.norm_sqr() + mu;
        let a12 = jt.re * jp.re + jt.im * jp.im;
        let g1 = jt.re * f.re + jt.im * f.im;
        let g2 = jp.re * f.re + jp.im * f.im;
        let det = a11 * a22 - a12 * a12;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dt = -(a22 * g1 - a12 * g2) / det;
        let dp = -(a11 * g2 - a12 * g1) / det;
        let (nt, np) = (t + dt, p + dp);
        let (nf, njt, njp) = hollow_residual(m, nt, np);
        if nf.norm_sqr() < cost {
            t = nt;
            p = np;
            f = nf;
            jt = njt;
            jp = njp;
            mu = (mu / 3.0).max(1e-15);
        } else {
            mu *= 4.0;
            if mu > 1e12 {
                break;
            }
        }
    }
    (t, p)
}

/// Bob's (unnormalized) conditional state given Alice projects onto `a`:
/// `Σ_a ā_a F[a][·]`.
fn conditional(coeffs: &CMat2, a: &CVec2) -> CVec2 {
    CVec([
        a[0].conj() * coeffs[(0, 0)] + a[1].conj() * coeffs[(1, 0)],
        a[0].conj() * coeffs[(0, 1)] + a[1].conj() * coeffs[(1, 1)],
    ])
}

/// Builds a feed-forward protocol that perfectly discriminates two
/// orthogonal pure states.
///
/// With `F`, `G` the coefficient matrices of `phi` and `psi`, Alice's basis
/// vector `w` must make Bob's conditionals `w†F` and `w†G` orthogonal, i.e.
/// `w† F G† w = 0`. `Tr(F G†) = ⟨psi|phi⟩ = 0`, so [`hollow_vector`] applies.
/// Bob's first basis vector on each branch is the `phi` conditional; when
/// that branch never occurs for `phi`, it is the complement of the `psi`
/// conditional instead.
pub fn walgate_decompose(phi: &PureState2Q, psi: &PureState2Q) -> Result<FeedForwardProtocol> {
    let overlap = phi.inner(psi).norm();
    if overlap >= ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal { overlap });
    }
    let f = phi.coefficient_matrix();
    let g = psi.coefficient_matrix();
    // an overlap below the tolerance can leave a trace above hollow_vector's
    let w = hollow_vector(&traceless_part(&(f * g.dagger())))?;
    let alice = [w, w.perp()];

    let mut bob = [[CVec2::zeros(); 2]; 2];
    for (i, a) in alice.iter().enumerate() {
        let cphi = conditional(&f, a);
        let cpsi = conditional(&g, a);
        let eta = if cphi.norm() >= DEGENERATE_NORM {
            cphi.normalized().expect("nonzero")
        } else if cpsi.norm() >= DEGENERATE_NORM {
            cpsi.normalized().expect("nonzero").perp()
        } else {
            CVec2::basis(0)
        };
        bob[i] = [eta, eta.perp()];
    }
    FeedForwardProtocol::new(alice, bob, [[0, 1], [0, 1]])
}

fn traceless_part(m: &CMat2) -> CMat2 {
    let half = m.trace() * 0.5;
    let mut out = *m;
    out[(0, 0)] -= half;
    out[(1, 1)] -= half;
    out
}

/// Exact average success probability of a feed-forward protocol.
pub fn ff_success_probability(
    protocol: &FeedForwardProtocol,
    rho0: &DensityMatrix2Q,
    rho1: &DensityMatrix2Q,
    priors: &PriorPair,
) -> Result<f64> {
    protocol.validate()?;
    Ok(labeled_success(&protocol.labeled_elements(), rho0, rho1, priors))
}

/// `½ (1 + ‖p₀ρ₀ − p₁ρ₁‖₁)`, the optimum over all measurements.
pub fn helstrom_bound(rho0: &DensityMatrix2Q, rho1: &DensityMatrix2Q, priors: &PriorPair) -> Result<f64> {
    DensityMatrix2Q::validate(rho0.mat())?;
    DensityMatrix2Q::validate(rho1.mat())?;
    let diff = rho0.mat().scale_re(priors.p0) - rho1.mat().scale_re(priors.p1);
    Ok(0.5 * (1.0 + trace_norm(&diff.hermitian_part())?))
}

/// Local projective measurement `{|α⟩,|α⊥⟩} ⊗ {|β⟩,|β⊥⟩}` with a label for
/// each of the four outcomes (`assignment[alice][bob]`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductMeasurement {
    alice_basis: [CVec2; 2],
    bob_basis: [CVec2; 2],
    assignment: [[Label; 2]; 2],
}

impl ProductMeasurement {
    pub fn new(alice_basis: [CVec2; 2], bob_basis: [CVec2; 2], assignment: [[Label; 2]; 2]) -> Result<Self> {
        let m = Self {
            alice_basis,
            bob_basis,
            assignment,
        };
        m.validate()?;
        Ok(m)
    }

    /// Bases from Bloch angles `(θ_A, φ_A, θ_B, φ_B)` in radians.
    pub fn from_bloch(angles: [f64; 4], assignment: [[Label; 2]; 2]) -> Result<Self> {
        let a = CVec2::bloch(angles[0], angles[1]);
        let b = CVec2::bloch(angles[2], angles[3]);
        Self::new([a, a.perp()], [b, b.perp()], assignment)
    }

    pub fn validate(&self) -> Result<()> {
        check_basis(&self.alice_basis, "Alice basis").map_err(Error::InvalidMeasurement)?;
        check_basis(&self.bob_basis, "Bob basis").map_err(Error::InvalidMeasurement)?;
        for row in &self.assignment {
            for &l in row {
                check_label(l).map_err(Error::InvalidMeasurement)?;
            }
        }
        Ok(())
    }

    pub fn alice_basis(&self) -> &[CVec2; 2] {
        &self.alice_basis
    }

    pub fn bob_basis(&self) -> &[CVec2; 2] {
        &self.bob_basis
    }

    pub fn assignment(&self) -> &[[Label; 2]; 2] {
        &self.assignment
    }

    pub fn projectors(&self) -> [[CMat4; 2]; 2] {
        let mut out = [[CMat4::zeros(); 2]; 2];
        for (i, a) in self.alice_basis.iter().enumerate() {
            for (j, b) in self.bob_basis.iter().enumerate() {
                out[i][j] = kron(&a.projector(), &b.projector());
            }
        }
        out
    }

    pub fn labeled_elements(&self) -> [(CMat4, Label); 4] {
        let p = self.projectors();
        let a = &self.assignment;
        [(p[0][0], a[0][0]), (p[0][1], a[0][1]), (p[1][0], a[1][0]), (p[1][1], a[1][1])]
    }
}

/// Exact average success probability of a product measurement.
pub fn product_success_probability(
    m: &ProductMeasurement,
    rho0: &DensityMatrix2Q,
    rho1: &DensityMatrix2Q,
    priors: &PriorPair,
) -> Result<f64> {
    m.validate()?;
    Ok(labeled_success(&m.labeled_elements(), rho0, rho1, priors))
}

/// Search parameters for [`optimize_local_projective`].
///
/// Each side's basis is parametrized by Bloch angles. A coarse grid of
/// `azimuth_steps × polar_steps` points per side is scanned exhaustively,
/// then the best `refine_starts` grid points are refined by Nelder–Mead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub azimuth_steps: usize,
    pub polar_steps: usize,
    pub refine_starts: usize,
    pub simplex_tolerance: f64,
    pub max_iterations: usize,
    /// Edge of the initial simplex, radians.
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            azimuth_steps: 24,
            polar_steps: 12,
            refine_starts: 8,
            simplex_tolerance: 1e-10,
            max_iterations: 500,
            initial_step: 0.2,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.azimuth_steps == 0 || self.polar_steps == 0 {
            return Err(Error::InvalidInput("optimizer grid must be non-empty".into()));
        }
        if !(self.simplex_tolerance.is_finite() && self.simplex_tolerance >= 0.0) {
            return Err(Error::InvalidInput("simplex_tolerance must be finite and >= 0".into()));
        }
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) {
            return Err(Error::InvalidInput("initial_step must be positive".into()));
        }
        Ok(())
    }

    fn side_grid(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.polar_steps * self.azimuth_steps);
        for i in 0..self.polar_steps {
            let theta = i as f64 * std::f64::consts::PI / self.polar_steps as f64;
            for j in 0..self.azimuth_steps {
                let phi = j as f64 * std::f64::consts::TAU / self.azimuth_steps as f64;
                pts.push((theta, phi));
            }
        }
        pts
    }
}

/// Best product measurement found and its exact success probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalOptimum {
    pub measurement: ProductMeasurement,
    pub success: f64,
    /// Bloch angles `(θ_A, φ_A, θ_B, φ_B)` of `|α⟩` and `|β⟩`.
    pub angles: [f64; 4],
}

struct Weighted {
    w0: CMat4,
    w1: CMat4,
}

impl Weighted {
    // Labels each outcome with argmax_j p_j Tr(ρ_j Π); label 0 wins ties.
    fn evaluate(&self, x: &[f64]) -> (f64, [[Label; 2]; 2]) {
        let a = CVec2::bloch(x[0], x[1]);
        let b = CVec2::bloch(x[2], x[3]);
        let alice = [a, a.perp()];
        let bob = [b, b.perp()];
        let mut total = 0.0;
        let mut assignment = [[0; 2]; 2];
        for (i, ai) in alice.iter().enumerate() {
            for (j, bj) in bob.iter().enumerate() {
                let v = ai.kron(bj);
                let q0 = self.w0.expectation(&v).re;
                let q1 = self.w1.expectation(&v).re;
                if q1 > q0 {
                    total += q1;
                    assignment[i][j] = 1;
                } else {
                    total += q0;
                }
            }
        }
        (total, assignment)
    }
}

/// Maximizes the success probability over all local projective
/// measurements without feed-forward and over all outcome assignments.
///
/// The assignment is optimal per outcome, so only the four Bloch angles are
/// searched. Results do not depend on the degree of parallelism.
pub fn optimize_local_projective(
    rho0: &DensityMatrix2Q,
    rho1: &DensityMatrix2Q,
    priors: &PriorPair,
    config: &OptimizerConfig,
) -> Result<LocalOptimum> {
    config.validate()?;
    DensityMatrix2Q::validate(rho0.mat())?;
    DensityMatrix2Q::validate(rho1.mat())?;
    let weighted = Weighted {
        w0: rho0.mat().scale_re(priors.p0),
        w1: rho1.mat().scale_re(priors.p1),
    };

    let side = config.side_grid();
    let n = side.len();
    let grid: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (ta, pa) = side[k / n];
            let (tb, pb) = side[k % n];
            weighted.evaluate(&[ta, pa, tb, pb]).0
        })
        .collect();

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]).then(a.cmp(&b)));
    let starts: Vec<[f64; 4]> = order
        .iter()
        .take(config.refine_starts.max(1))
        .map(|&k| {
            let (ta, pa) = side[k / n];
            let (tb, pb) = side[k % n];
            [ta, pa, tb, pb]
        })
        .collect();

    let refined: Vec<([f64; 4], f64)> = starts
        .par_iter()
        .map(|x0| {
            if config.refine_starts == 0 {
                return (*x0, weighted.evaluate(x0).0);
            }
            let r = nelder_mead(
                |x| -weighted.evaluate(x).0,
                x0,
                config.initial_step,
                config.simplex_tolerance,
                config.max_iterations,
            );
            let x = [r.x[0], r.x[1], r.x[2], r.x[3]];
            let v = weighted.evaluate(&x).0;
            // never report worse than the start point
            let v0 = weighted.evaluate(x0).0;
            if v >= v0 {
                (x, v)
            } else {
                (*x0, v0)
            }
        })
        .collect();

    let mut best = 0;
    for (k, r) in refined.iter().enumerate() {
        if r.1 > refined[best].1 {
            best = k;
        }
    }
    let (angles, _) = refined[best];
    let (_, assignment) = weighted.evaluate(&angles);
    let measurement = ProductMeasurement::from_bloch(angles, assignment)?;
    let success = product_success_probability(&measurement, rho0, rho1, priors)?;
    Ok(LocalOptimum {
        measurement,
        success,
        angles,
    })
}

/// Feed-forward success minus the best no-feed-forward success. Negative
/// when the protocol is worse than the best product measurement.
pub fn advantage(
    rho0: &DensityMatrix2Q,
    rho1: &DensityMatrix2Q,
    priors: &PriorPair,
    protocol: &FeedForwardProtocol,
    config: &OptimizerConfig,
) -> Result<f64> {
    let ff = ff_success_probability(protocol, rho0, rho1, priors)?;
    let local = optimize_local_projective(rho0, rho1, priors, config)?;
    Ok(ff - local.success)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::states::{bell_phi_plus, h_state, phi0, phi1, psi_pair, v_state, werner_noise};

    fn prod(a: CVec2, b: CVec2) -> PureState2Q {
        PureState2Q::product(&a, &b).unwrap()
    }

    #[test]
    fn hollow_vector_diag() {
        let m = CMat2::pauli_z();
        let w = hollow_vector(&m).unwrap();
        assert!(m.expectation(&w).norm() < 1e-11);
        assert!((w[0].norm() - w[1].norm()).abs() < 1e-6);
    }

    #[test]
    fn hollow_vector_nilpotent() {
        let mut m = CMat2::zeros();
        m[(0, 1)] = ONE;
        let w = hollow_vector(&m).unwrap();
        assert!(m.expectation(&w).norm() < 1e-11);
        assert!(m.expectation(&w.perp()).norm() < 1e-11);
    }

    #[test]
    fn hollow_vector_errors() {
        assert!(matches!(hollow_vector(&CMat2::identity()), Err(Error::NotTraceless { .. })));
        assert_eq!(hollow_vector(&CMat2::zeros()).unwrap(), CVec2::basis(0));
    }

    #[test]
    fn canonical_protocol_is_perfect_on_family() {
        let p = FeedForwardProtocol::canonical();
        let s = ff_success_probability(
            &p,
            &phi0(30.0).unwrap().density(),
            &phi1(60.0).unwrap().density(),
            &PriorPair::equal(),
        )
        .unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn walgate_on_family_pair() {
        let (a, b) = (phi0(30.0).unwrap(), phi1(60.0).unwrap());
        let p = walgate_decompose(&a, &b).unwrap();
        let s = ff_success_probability(&p, &a.density(), &b.density(), &PriorPair::equal()).unwrap();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn walgate_product_pair_sharing_alice_factor() {
        let (a, b) = (prod(h_state(), h_state()), prod(h_state(), v_state()));
        let p = walgate_decompose(&a, &b).unwrap();
        let s = ff_success_probability(&p, &a.density(), &b.density(), &PriorPair::equal()).unwrap();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn walgate_rejects_non_orthogonal() {
        let (a, b) = psi_pair(20.0).unwrap();
        assert!(matches!(walgate_decompose(&a, &b), Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn ff_on_maximally_mixed_is_half() {
        let mm = DensityMatrix2Q::maximally_mixed();
        let s = ff_success_probability(&FeedForwardProtocol::canonical(), &mm, &mm, &PriorPair::equal()).unwrap();
        assert!((s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ff_werner_closed_form() {
        let r0 = werner_noise(&phi0(30.0).unwrap(), 0.956).unwrap();
        let r1 = werner_noise(&phi1(60.0).unwrap(), 0.956).unwrap();
        let s = ff_success_probability(&FeedForwardProtocol::canonical(), &r0, &r1, &PriorPair::equal()).unwrap();
        assert!((s - 0.978).abs() < 1e-12);
    }

    #[test]
    fn invalid_protocol_rejected() {
        let h = CVec2::basis(0);
        let r = FeedForwardProtocol::new([h, h], [[h, v_state()], [h, v_state()]], [[0, 1], [0, 1]]);
        assert!(matches!(r, Err(Error::InvalidProtocol(_))));
        let r = FeedForwardProtocol::new([h, v_state()], [[h, v_state()], [h, v_state()]], [[0, 2], [0, 1]]);
        assert!(matches!(r, Err(Error::InvalidProtocol(_))));
    }

    #[test]
    fn helstrom_examples() {
        let pr = PriorPair::equal();
        let (a, b) = (phi0(15.0).unwrap(), phi1(75.0).unwrap());
        assert!((helstrom_bound(&a.density(), &b.density(), &pr).unwrap() - 1.0).abs() < 1e-12);
        assert!((helstrom_bound(&a.density(), &a.density(), &pr).unwrap() - 0.5).abs() < 1e-12);
        let skew = PriorPair::new(0.7, 0.3).unwrap();
        assert!((helstrom_bound(&a.density(), &a.density(), &skew).unwrap() - 0.7).abs() < 1e-12);
        let (a, b) = psi_pair(22.5).unwrap();
        let h = helstrom_bound(&a.density(), &b.density(), &pr).unwrap();
        assert!((h - 0.853_553_390_593_273_7).abs() < 1e-9);
    }

    #[test]
    fn product_measurement_examples() {
        let pr = PriorPair::equal();
        let (h, v) = (h_state(), v_state());
        let m = ProductMeasurement::new([h, v], [h, v], [[0, 0], [0, 1]]).unwrap();
        let (a, b) = (prod(h, h), prod(v, v));
        let s = product_success_probability(&m, &a.density(), &b.density(), &pr).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        let s = product_success_probability(&m, &a.density(), &a.density(), &pr).unwrap();
        assert!((s - 0.5).abs() < 1e-15);
        assert!(ProductMeasurement::new([h, h], [h, v], [[0, 0], [0, 1]]).is_err());
    }

    #[test]
    fn optimizer_trivial_cases() {
        let pr = PriorPair::equal();
        let cfg = OptimizerConfig::default();
        let (a, b) = (prod(h_state(), h_state()), prod(v_state(), v_state()));
        let r = optimize_local_projective(&a.density(), &b.density(), &pr, &cfg).unwrap();
        assert!((r.success - 1.0).abs() < 1e-9);
        let (a, b) = psi_pair(0.0).unwrap();
        let r = optimize_local_projective(&a.density(), &b.density(), &pr, &cfg).unwrap();
        assert!((r.success - 0.5).abs() < 1e-12);
    }

    #[test]
    fn optimizer_family_pair() {
        let r = optimize_local_projective(
            &phi0(30.0).unwrap().density(),
            &phi1(60.0).unwrap().density(),
            &PriorPair::equal(),
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!((r.success - 0.933).abs() < 1e-3, "{}", r.success);
    }

    #[test]
    fn advantage_bell_pair_is_zero() {
        // two orthogonal maximally entangled states
        let b0 = bell_phi_plus();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b1 = PureState2Q::new(crate::linalg::CVec4::from_real([s, 0.0, 0.0, -s])).unwrap();
        let proto = walgate_decompose(&b0, &b1).unwrap();
        let adv = advantage(
            &b0.density(),
            &b1.density(),
            &PriorPair::equal(),
            &proto,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!(adv.abs() < 1e-9, "{adv}");
    }

    #[test]
    fn optimizer_config_json_defaults() {
        let c: OptimizerConfig = serde_json::from_str("{\"refine_starts\": 4}").unwrap();
        assert_eq!(c.refine_starts, 4);
        assert_eq!(c.azimuth_steps, 24);
        assert!(serde_json::from_str::<OptimizerConfig>("{\"bogus\": 1}").is_err());
    }
}
