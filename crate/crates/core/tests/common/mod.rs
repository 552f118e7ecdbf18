#![allow(dead_code)]

use discrim_core::linalg::{CMat, CMat2, CMat4, CVec, CVec4, C64};
use discrim_core::states::{DensityMatrix2Q, PureState2Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<const N: usize>(rng: &mut ChaCha8Rng) -> CMat<N> {
    let mut m = CMat::<N>::zeros();
    for r in 0..N {
        for c in 0..N {
            m[(r, c)] = gauss(rng);
        }
    }
    m
}

/// `A + A†` for Gaussian `A`.
pub fn random_hermitian<const N: usize>(rng: &mut ChaCha8Rng) -> CMat<N> {
    let a = ginibre::<N>(rng);
    a + a.dagger()
}

pub fn random_vec4(rng: &mut ChaCha8Rng) -> CVec4 {
    CVec([gauss(rng), gauss(rng), gauss(rng), gauss(rng)])
}

pub fn random_pure(rng: &mut ChaCha8Rng) -> PureState2Q {
    PureState2Q::normalize(random_vec4(rng)).unwrap()
}

/// A random pure state and a random pure state orthogonal to it.
pub fn random_orthogonal_pair(rng: &mut ChaCha8Rng) -> (PureState2Q, PureState2Q) {
    let a = random_pure(rng);
    let v = random_vec4(rng);
    let proj = a.vec().scale(a.vec().inner(&v));
    let b = PureState2Q::normalize(v - proj).unwrap();
    (a, b)
}

/// Hilbert–Schmidt random density matrix `G G† / Tr`.
pub fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix2Q {
    let g = ginibre::<4>(rng);
    let m = g * g.dagger();
    let tr = m.trace().re;
    DensityMatrix2Q::from_external(m.scale_re(1.0 / tr).hermitian_part()).unwrap()
}

/// Haar-like random 2×2 unitary `e^{iγ} [[a, −b̄], [b, ā]]`.
pub fn random_unitary2(rng: &mut ChaCha8Rng) -> CMat2 {
    let (a, b) = (gauss(rng), gauss(rng));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    let g = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    CMat([[a * g, -b.conj() * g], [b * g, a.conj() * g]])
}

pub fn mat4_identity() -> CMat4 {
    CMat4::identity()
}
