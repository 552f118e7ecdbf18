mod common;

use common::*;
use discrim_core::linalg::{kron, CMat2, CMat4, C64};
use discrim_core::states::{
    apply_local, bell_phi_plus, concurrence, fidelity_pure, phi0, phi1, psi_pair, tangle, werner_noise,
    DensityMatrix2Q, PureState2Q,
};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

// Concurrence straight from its definition: square roots of the eigenvalues
// of the non-Hermitian ρ (Y⊗Y) ρ* (Y⊗Y), via a complex Schur decomposition.
fn concurrence_oracle(rho: &DensityMatrix2Q) -> f64 {
    let to_na = |m: &CMat4| DMatrix::from_fn(4, 4, |r, c| Complex::new(m[(r, c)].re, m[(r, c)].im));
    let yy = kron(&CMat2::pauli_y(), &CMat2::pauli_y());
    let tilde = yy * rho.mat().conj() * yy;
    let prod = to_na(rho.mat()) * to_na(&tilde);
    let (_, t) = prod.schur().unpack();
    let mut lam: Vec<f64> = (0..4).map(|k| t[(k, k)].re.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0)
}

#[test]
fn family_orthogonal_on_random_angles() {
    let mut rng = rng(21);
    use rand::Rng;
    for _ in 0..10_000 {
        let a: f64 = rng.random_range(0.0..90.0);
        let b: f64 = rng.random_range(0.0..90.0);
        assert!(phi0(a).unwrap().inner(&phi1(b).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn overlap_law() {
    for k in 0..=90 {
        let eta = 0.5 * k as f64;
        let (a, b) = psi_pair(eta).unwrap();
        let law = (2.0 * eta).to_radians().cos().powi(2);
        assert!((a.overlap_sqr(&b) - law).abs() < 1e-12, "eta {eta}");
    }
}

#[test]
fn werner_bell_tangle_closed_form() {
    // Werner(v) of a Bell state has C = max(0, (3v − 1)/2)
    let rho = werner_noise(&bell_phi_plus(), 0.9).unwrap();
    let c = concurrence(&rho).unwrap();
    assert!((c - 0.85).abs() < 1e-10);
    assert!((tangle(&rho).unwrap() - 0.7225).abs() < 1e-10);
    assert!((concurrence_oracle(&rho) - c).abs() < 1e-9);
    let rho = werner_noise(&bell_phi_plus(), 0.3).unwrap();
    assert!(tangle(&rho).unwrap() < 1e-12);
}

#[test]
fn tangle_pure_states_match_amplitude_formula() {
    let mut rng = rng(22);
    for _ in 0..300 {
        let psi = random_pure(&mut rng);
        let [a, b, c, d] = psi.amplitudes();
        let expected = 2.0 * (a * d - b * c).norm();
        assert!((concurrence(&psi.density()).unwrap() - expected).abs() < 1e-7);
    }
}

#[test]
fn tangle_mixed_states_match_definition() {
    let mut rng = rng(23);
    for _ in 0..300 {
        let rho = random_density(&mut rng);
        let c = concurrence(&rho).unwrap();
        assert!((c - concurrence_oracle(&rho)).abs() < 1e-8);
    }
}

#[test]
fn pure_products_and_bell() {
    let mut rng = rng(24);
    for _ in 0..100 {
        let u = random_unitary2(&mut rng);
        let v = random_unitary2(&mut rng);
        let a = u.apply(&discrim_core::states::h_state());
        let b = v.apply(&discrim_core::states::h_state());
        let p = PureState2Q::product(&a, &b).unwrap();
        assert!(tangle(&p.density()).unwrap() < 1e-10);
        let bell = apply_local(&u, &v, &bell_phi_plus()).unwrap();
        let t = tangle(&bell.density()).unwrap();
        assert!((t - 1.0).abs() < 1e-10, "{t}");
    }
}

#[test]
fn local_ops_preserve_norm_trace_and_positivity() {
    let mut rng = rng(25);
    for _ in 0..500 {
        let (u, v) = (random_unitary2(&mut rng), random_unitary2(&mut rng));
        let psi = random_pure(&mut rng);
        let out = apply_local(&u, &v, &psi).unwrap();
        assert!((out.vec().norm() - 1.0).abs() < 1e-12);
        let rho = random_density(&mut rng);
        let out = apply_local(&u, &v, &rho).unwrap();
        assert!((out.mat().trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        DensityMatrix2Q::validate(out.mat()).unwrap();
        // fidelity is invariant under the same local unitary on both sides
        let f0 = fidelity_pure(&rho, &psi).unwrap();
        let f1 = fidelity_pure(&out, &apply_local(&u, &v, &psi).unwrap()).unwrap();
        assert!((f0 - f1).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn werner_output_is_a_density_matrix(theta in 0.0f64..=90.0, v in 0.0f64..=1.0, which in 0usize..2) {
        let psi = if which == 0 { phi0(theta).unwrap() } else { phi1(theta).unwrap() };
        let rho = werner_noise(&psi, v).unwrap();
        prop_assert!(DensityMatrix2Q::validate(rho.mat()).is_ok());
        let f = fidelity_pure(&rho, &psi).unwrap();
        prop_assert!((f - (v + (1.0 - v) / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn werner_rejects_out_of_range(v in prop_oneof![-10.0f64..-1e-9, 1.0 + 1e-9..10.0]) {
        prop_assert!(werner_noise(&bell_phi_plus(), v).is_err());
    }
}
