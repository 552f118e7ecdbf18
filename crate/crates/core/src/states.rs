//! Two-qubit pure states and density matrices, the orthogonal and
//! non-orthogonal state families, noise, fidelity and tangle.
//!
//! Angles are taken in degrees at the public boundary.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, CMat, CMat2, CMat4, CVec2, CVec4, C64, HERMITIAN_TOL};

/// Norm tolerance for a [`PureState2Q`].
pub const NORM_TOL: f64 = 1e-12;
/// Trace tolerance for a [`DensityMatrix2Q`].
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted in a [`DensityMatrix2Q`].
pub const MIN_EIGENVALUE: f64 = -1e-9;

/// Normalized two-qubit pure state, amplitudes ordered `HH, HV, VH, VV`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState2Q {
    vec: CVec4,
}

impl PureState2Q {
    /// Wraps an already-normalized vector.
    pub fn new(vec: CVec4) -> Result<Self> {
        if !vec.is_finite() {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let n = vec.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {n} differs from 1")));
        }
        Ok(Self { vec })
    }

    /// Normalizes `vec` first.
    pub fn normalize(vec: CVec4) -> Result<Self> {
        let v = vec
            .normalized()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::InvalidState("zero or non-finite vector".into()))?;
        Ok(Self { vec: v })
    }

    pub fn product(alice: &CVec2, bob: &CVec2) -> Result<Self> {
        Self::normalize(alice.kron(bob))
    }

    pub fn vec(&self) -> &CVec4 {
        &self.vec
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        self.vec.0
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.vec.inner(&other.vec)
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_sqr(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn density(&self) -> DensityMatrix2Q {
        DensityMatrix2Q {
            mat: self.vec.projector(),
        }
    }

    /// Coefficient matrix `F[a][b]` = amplitude of `|a⟩_A|b⟩_B`.
    pub fn coefficient_matrix(&self) -> CMat2 {
        let [a, b, c, d] = self.vec.0;
        CMat([[a, b], [c, d]])
    }
}

/// 4×4 Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2Q {
    mat: CMat4,
}

impl DensityMatrix2Q {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: CMat4) -> Result<Self> {
        Self::validate(&mat)?;
        Ok(Self { mat })
    }

    /// Ingests a matrix from outside (e.g. a file). Eigenvalues between
    /// −1e-9 and 0 are clipped to zero and the trace renormalized to one.
    pub fn from_external(mat: CMat4) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let deviation = mat.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let eig = hermitian_eig(&mat).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        if eig.eigenvalues[0] < MIN_EIGENVALUE {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {:.3e}",
                eig.eigenvalues[0]
            )));
        }
        let clipped = eig.map_spectrum(|x| x.max(0.0));
        let tr = clipped.trace().re;
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        Ok(Self {
            mat: clipped.scale_re(1.0 / tr),
        })
    }

    /// Trusted constructor for matrices produced by code in this crate.
    pub(crate) fn from_trusted(mat: CMat4) -> Self {
        debug_assert!(Self::validate(&mat).is_ok(), "{:?}", Self::validate(&mat));
        Self { mat }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            mat: CMat4::identity().scale_re(0.25),
        }
    }

    pub fn validate(mat: &CMat4) -> Result<()> {
        if !mat.is_finite() {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let deviation = mat.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let eig = hermitian_eig(mat).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        if eig.eigenvalues[0] < MIN_EIGENVALUE {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {:.3e}",
                eig.eigenvalues[0]
            )));
        }
        Ok(())
    }

    pub fn mat(&self) -> &CMat4 {
        &self.mat
    }

    /// `Tr(ρ Π)`, real part, for a Hermitian `Π`.
    pub fn expectation(&self, op: &CMat4) -> f64 {
        self.mat.trace_product(op).re
    }

    /// `⟨v|ρ|v⟩`.
    pub fn prob_of(&self, v: &CVec4) -> f64 {
        self.mat.expectation(v).re
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).re
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        0.5 * crate::linalg::trace_norm(&(self.mat - other.mat))
            .expect("difference of density matrices is Hermitian")
    }
}

/// `|u⟩ = √3/2 |H⟩ + ½ |V⟩`.
pub fn u_state() -> CVec2 {
    CVec2::from_real([3f64.sqrt() / 2.0, 0.5])
}

/// `|u⊥⟩ = ½ |H⟩ − √3/2 |V⟩`.
pub fn u_perp_state() -> CVec2 {
    CVec2::from_real([0.5, -(3f64.sqrt()) / 2.0])
}

pub fn h_state() -> CVec2 {
    CVec2::basis(0)
}

pub fn v_state() -> CVec2 {
    CVec2::basis(1)
}

fn check_finite(name: &'static str, deg: f64) -> Result<()> {
    if deg.is_finite() {
        Ok(())
    } else {
        Err(Error::RangeError {
            name,
            value: deg,
            min: f64::NEG_INFINITY,
            max: f64::INFINITY,
        })
    }
}

fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_finite() && (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::RangeError {
            name,
            value,
            min,
            max,
        })
    }
}

/// `|φ₀(θ₀)⟩ = cos θ₀ |H⟩⊗Z|u⟩ + sin θ₀ |V⟩⊗|u⟩`.
pub fn phi0(theta0_deg: f64) -> Result<PureState2Q> {
    check_finite("theta0", theta0_deg)?;
    let t = theta0_deg.to_radians();
    let z = CMat2::pauli_z();
    let u = u_state();
    let v = t.cos() * h_state().kron(&z.apply(&u)) + t.sin() * v_state().kron(&u);
    PureState2Q::normalize(v)
}

/// `|φ₁(θ₁)⟩ = cos θ₁ |H⟩⊗Z|u⊥⟩ − sin θ₁ |V⟩⊗|u⊥⟩`.
pub fn phi1(theta1_deg: f64) -> Result<PureState2Q> {
    check_finite("theta1", theta1_deg)?;
    let t = theta1_deg.to_radians();
    let z = CMat2::pauli_z();
    let up = u_perp_state();
    let v = t.cos() * h_state().kron(&z.apply(&up)) - t.sin() * v_state().kron(&up);
    PureState2Q::normalize(v)
}

/// The non-orthogonal pair built on `φ₀(60°)` and `φ₁(30°)`:
///
/// `|ψ₀⟩ = cos(45°−η)|φ₀(60°)⟩ + sin(45°−η)|φ₁(30°)⟩`,
/// `|ψ₁⟩ = sin(45°−η)|φ₀(60°)⟩ + cos(45°−η)|φ₁(30°)⟩`,
///
/// with `|⟨ψ₀|ψ₁⟩|² = cos² 2η`.
pub fn psi_pair(eta_deg: f64) -> Result<(PureState2Q, PureState2Q)> {
    check_range("eta", eta_deg, 0.0, 45.0)?;
    let a = (45.0 - eta_deg).to_radians();
    let f0 = *phi0(60.0)?.vec();
    let f1 = *phi1(30.0)?.vec();
    let psi0 = a.cos() * f0 + a.sin() * f1;
    let psi1 = a.sin() * f0 + a.cos() * f1;
    Ok((PureState2Q::normalize(psi0)?, PureState2Q::normalize(psi1)?))
}

/// `|Φ⁺⟩ = (|HH⟩ + |VV⟩)/√2`.
pub fn bell_phi_plus() -> PureState2Q {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState2Q {
        vec: CVec4::from_real([s, 0.0, 0.0, s]),
    }
}

/// Angle pair for the orthogonal family, both in `[0°, 90°]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthPairSpec {
    pub theta0: f64,
    pub theta1: f64,
}

impl OrthPairSpec {
    pub fn new(theta0: f64, theta1: f64) -> Result<Self> {
        check_range("theta0", theta0, 0.0, 90.0)?;
        check_range("theta1", theta1, 0.0, 90.0)?;
        Ok(Self { theta0, theta1 })
    }

    pub fn states(&self) -> Result<(PureState2Q, PureState2Q)> {
        Ok((phi0(self.theta0)?, phi1(self.theta1)?))
    }
}

/// Overlap angle for the non-orthogonal family, in `[0°, 45°]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonOrthPairSpec {
    pub eta: f64,
}

impl NonOrthPairSpec {
    pub fn new(eta: f64) -> Result<Self> {
        check_range("eta", eta, 0.0, 45.0)?;
        Ok(Self { eta })
    }

    pub fn states(&self) -> Result<(PureState2Q, PureState2Q)> {
        psi_pair(self.eta)
    }
}

/// `⟨target|ρ|target⟩`, clamped to `[0, 1]`.
pub fn fidelity_pure(rho: &DensityMatrix2Q, target: &PureState2Q) -> Result<f64> {
    DensityMatrix2Q::validate(rho.mat())?;
    let f = rho.prob_of(target.vec());
    if f < -1e-12 || f > 1.0 + 1e-12 {
        return Err(Error::InvalidDensity(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Concurrence `C = max(0, λ₁ − λ₂ − λ₃ − λ₄)`, where `λᵢ` are the
/// descending square roots of the eigenvalues of `ρ (Y⊗Y) ρ* (Y⊗Y)`.
///
/// Those eigenvalues are computed as the spectrum of the Hermitian matrix
/// `√ρ ρ̃ √ρ`, which is similar to `ρ ρ̃`.
pub fn concurrence(rho: &DensityMatrix2Q) -> Result<f64> {
    DensityMatrix2Q::validate(rho.mat())?;
    let yy = kron(&CMat2::pauli_y(), &CMat2::pauli_y());
    let spin_flipped = yy * rho.mat().conj() * yy;
    let sqrt_rho = hermitian_eig(rho.mat())?.map_spectrum(|x| x.max(0.0).sqrt());
    let m = (sqrt_rho * spin_flipped * sqrt_rho).hermitian_part();
    let eig = hermitian_eig(&m)?;
    // rounding leaves ~1e-16 where the spectrum is exactly zero; its square root would not be small
    let floor = 64.0 * f64::EPSILON * eig.eigenvalues[3].abs().max(1.0);
    let mut lam = eig.eigenvalues.map(|x| if x > floor { x.sqrt() } else { 0.0 });
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// Tangle `τ = C²`.
pub fn tangle(rho: &DensityMatrix2Q) -> Result<f64> {
    let c = concurrence(rho)?;
    Ok((c * c).min(1.0))
}

/// `v |ψ⟩⟨ψ| + (1 − v) I/4`.
pub fn werner_noise(psi: &PureState2Q, v: f64) -> Result<DensityMatrix2Q> {
    check_range("v", v, 0.0, 1.0)?;
    let mat = psi.vec.projector().scale_re(v) + CMat4::identity().scale_re((1.0 - v) / 4.0);
    Ok(DensityMatrix2Q::from_trusted(mat))
}

/// A local operation `a ⊗ b` applied to a two-qubit state.
pub trait LocalOps: Sized {
    fn apply_local(&self, a: &CMat2, b: &CMat2) -> Result<Self>;
}

impl LocalOps for PureState2Q {
    fn apply_local(&self, a: &CMat2, b: &CMat2) -> Result<Self> {
        a.check_unitary()?;
        b.check_unitary()?;
        Ok(Self {
            vec: kron(a, b).apply(&self.vec),
        })
    }
}

impl LocalOps for DensityMatrix2Q {
    fn apply_local(&self, a: &CMat2, b: &CMat2) -> Result<Self> {
        a.check_unitary()?;
        b.check_unitary()?;
        let u = kron(a, b);
        Ok(Self {
            mat: u.conjugate(&self.mat).hermitian_part(),
        })
    }
}

/// `(a ⊗ b)` applied to `state`; both factors must be unitary.
pub fn apply_local<S: LocalOps>(a: &CMat2, b: &CMat2, state: &S) -> Result<S> {
    state.apply_local(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S3: f64 = 0.866_025_403_784_438_6;

    #[test]
    fn u_states() {
        let u = u_state();
        assert!((u[0].re - S3).abs() < 1e-15);
        assert_eq!(u[1].re, 0.5);
        assert!(u.inner(&u_perp_state()).norm() < 1e-16);
        assert!((u.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phi_endpoints() {
        let p = phi0(0.0).unwrap();
        let expected = CVec4::from_real([S3, -0.5, 0.0, 0.0]);
        assert!(p.vec().max_abs_diff(&expected) < 1e-15);
        let p = phi0(90.0).unwrap();
        let expected = CVec4::from_real([0.0, 0.0, S3, 0.5]);
        assert!(p.vec().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn phi_grid_orthogonal() {
        for a in (0..=90).step_by(15) {
            for b in (0..=90).step_by(15) {
                let ip = phi0(a as f64).unwrap().inner(&phi1(b as f64).unwrap());
                assert!(ip.norm() < 1e-15, "{a} {b}");
            }
        }
    }

    #[test]
    fn psi_pair_examples() {
        let (a, b) = psi_pair(45.0).unwrap();
        assert!(a.vec().max_abs_diff(phi0(60.0).unwrap().vec()) < 1e-15);
        assert!(b.vec().max_abs_diff(phi1(30.0).unwrap().vec()) < 1e-15);
        assert!(a.overlap_sqr(&b) < 1e-30);
        let (a, b) = psi_pair(0.0).unwrap();
        assert!((a.overlap_sqr(&b) - 1.0).abs() < 1e-15);
        let (a, b) = psi_pair(22.5).unwrap();
        assert!((a.overlap_sqr(&b) - 0.5).abs() < 1e-15);
        assert!(matches!(psi_pair(45.5), Err(Error::RangeError { .. })));
        assert!(matches!(psi_pair(-1.0), Err(Error::RangeError { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let psi = phi0(30.0).unwrap();
        assert!((fidelity_pure(&psi.density(), &psi).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix2Q::maximally_mixed();
        assert!((fidelity_pure(&mixed, &psi).unwrap() - 0.25).abs() < 1e-15);
        let w = werner_noise(&psi, 0.956).unwrap();
        assert!((fidelity_pure(&w, &psi).unwrap() - 0.967).abs() < 1e-12);
    }

    #[test]
    fn tangle_extremes() {
        assert!((tangle(&bell_phi_plus().density()).unwrap() - 1.0).abs() < 1e-10);
        let hh = PureState2Q::product(&h_state(), &h_state()).unwrap();
        assert!(tangle(&hh.density()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn werner_endpoints_and_range() {
        let psi = phi1(60.0).unwrap();
        let w = werner_noise(&psi, 1.0).unwrap();
        assert!(w.mat().max_abs_diff(&psi.density().mat()) < 1e-15);
        let w = werner_noise(&psi, 0.0).unwrap();
        assert!(w.mat().max_abs_diff(DensityMatrix2Q::maximally_mixed().mat()) < 1e-15);
        assert!(werner_noise(&psi, 1.1).is_err());
    }

    #[test]
    fn local_z_on_bob() {
        let vv = PureState2Q::product(&v_state(), &v_state()).unwrap();
        let id = CMat2::identity();
        let z = CMat2::pauli_z();
        let out = apply_local(&id, &z, &vv).unwrap();
        assert!(out.vec().max_abs_diff(&(-*vv.vec())) < 1e-15);
        let back = apply_local(&id, &z, &out).unwrap();
        assert_eq!(back, vv);
        assert_eq!(apply_local(&id, &id, &vv).unwrap(), vv);
        let not_unitary = CMat2::from_diag([1.0, 2.0]);
        assert!(matches!(
            apply_local(&id, &not_unitary, &vv),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn external_ingest_clips_small_negatives() {
        let mut m = CMat4::from_diag([0.5, 0.5, 0.0, 0.0]);
        m[(3, 3)] = C64::new(-5e-10, 0.0);
        let rho = DensityMatrix2Q::from_external(m).unwrap();
        assert!(rho.mat()[(3, 3)].re >= 0.0);
        assert!((rho.mat().trace().re - 1.0).abs() < 1e-15);
        m[(3, 3)] = C64::new(-1e-6, 0.0);
        assert!(DensityMatrix2Q::from_external(m).is_err());
    }

    #[test]
    fn invalid_density_rejected() {
        assert!(DensityMatrix2Q::new(CMat4::identity()).is_err());
        assert!(DensityMatrix2Q::new(CMat4::from_diag([1.5, -0.5, 0.0, 0.0])).is_err());
    }
}
