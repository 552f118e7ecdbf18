//! Fixed-size complex linear algebra for one and two qubits.
//!
//! Vectors and matrices are stack arrays indexed by a const dimension. Only
//! dimensions 2 and 4 are used by the rest of the crate, and the aliases
//! [`CVec2`], [`CVec4`], [`CMat2`], [`CMat4`] name them.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on `‖m − m†‖_max` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `‖U†U − I‖_max` accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-12;

const JACOBI_OFF_DIAG_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec<const N: usize>(pub [C64; N]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CVec2 = CVec<2>;
pub type CVec4 = CVec<4>;
pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

impl<const N: usize> CVec<N> {
    pub fn zeros() -> Self {
        Self([ZERO; N])
    }

    /// Unit vector along basis index `k`.
    pub fn basis(k: usize) -> Self {
        let mut v = Self::zeros();
        v.0[k] = ONE;
        v
    }

    pub fn from_real(re: [f64; N]) -> Self {
        Self(re.map(|x| C64::new(x, 0.0)))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns `None` when the norm is zero.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|a| a * s))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|a| a.conj()))
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> CMat<N> {
        let mut m = CMat::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = self.0[r] * other.0[c].conj();
            }
        }
        m
    }

    /// Rank-one projector `|self⟩⟨self|`.
    pub fn projector(&self) -> CMat<N> {
        self.outer(self)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Multiply by a global phase so that the largest-magnitude component is
    /// real and positive. The first index wins magnitude ties.
    pub fn fix_global_phase(&self) -> Self {
        let mut best = 0;
        for k in 1..N {
            if self.0[k].norm() > self.0[best].norm() * (1.0 + 1e-12) {
                best = k;
            }
        }
        let pivot = self.0[best];
        if pivot.norm() == 0.0 {
            return *self;
        }
        self.scale(pivot.conj() / pivot.norm())
    }
}

impl CVec2 {
    /// A unit vector orthogonal to `self` (assumed normalized):
    /// `(a, b) ↦ (−b̄, ā)`.
    pub fn perp(&self) -> Self {
        Self([-self.0[1].conj(), self.0[0].conj()])
    }

    /// `|self⟩ ⊗ |other⟩`, `self` first.
    pub fn kron(&self, other: &CVec2) -> CVec4 {
        let [a0, a1] = self.0;
        let [b0, b1] = other.0;
        CVec([a0 * b0, a0 * b1, a1 * b0, a1 * b1])
    }

    /// Qubit state at Bloch polar angle `theta` and azimuth `phi` (radians):
    /// `(cos θ/2, e^{iφ} sin θ/2)`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        Self([
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ])
    }
}

impl<const N: usize> Index<usize> for CVec<N> {
    type Output = C64;
    fn index(&self, k: usize) -> &C64 {
        &self.0[k]
    }
}

impl<const N: usize> IndexMut<usize> for CVec<N> {
    fn index_mut(&mut self, k: usize) -> &mut C64 {
        &mut self.0[k]
    }
}

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for k in 0..N {
            out.0[k] += rhs.0[k];
        }
        out
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for k in 0..N {
            out.0[k] -= rhs.0[k];
        }
        out
    }
}

impl<const N: usize> Neg for CVec<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|a| -a))
    }
}

impl<const N: usize> Mul<CVec<N>> for f64 {
    type Output = CVec<N>;
    fn mul(self, rhs: CVec<N>) -> CVec<N> {
        rhs.scale(C64::new(self, 0.0))
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        Self([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = ONE;
        }
        m
    }

    pub fn from_diag(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = C64::new(d[k], 0.0);
        }
        m
    }

    pub fn from_real(re: [[f64; N]; N]) -> Self {
        Self(re.map(|row| row.map(|x| C64::new(x, 0.0))))
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[c][r] = self.0[r][c].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|row| row.map(|a| a.conj())))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|k| self.0[k][k]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|row| row.map(|a| a * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn apply(&self, v: &CVec<N>) -> CVec<N> {
        let mut out = CVec::zeros();
        for r in 0..N {
            out.0[r] = (0..N).map(|c| self.0[r][c] * v.0[c]).sum();
        }
        out
    }

    /// `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &CVec<N>) -> C64 {
        v.inner(&self.apply(v))
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for r in 0..N {
            for c in 0..N {
                acc += self.0[r][c] * other.0[c][r];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|a| a.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// `‖self − self†‖_max`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_finite() && self.hermitian_deviation() <= tol
    }

    /// `‖self†·self − I‖_max`.
    pub fn unitary_deviation(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_finite() && self.unitary_deviation() <= tol
    }

    pub fn check_unitary(&self) -> Result<()> {
        let deviation = self.unitary_deviation();
        if !self.is_finite() || deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }

    fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if !self.is_finite() || deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// `(self + self†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.dagger()).scale_re(0.5)
    }

    /// `self · rhs · self†`.
    pub fn conjugate(&self, rhs: &Self) -> Self {
        *self * *rhs * self.dagger()
    }
}

impl CMat2 {
    pub fn pauli_x() -> Self {
        Self([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Self([[ZERO, -I], [I, ZERO]])
    }

    /// `Z = diag(1, −1)`: `|H⟩ → |H⟩`, `|V⟩ → −|V⟩`.
    pub fn pauli_z() -> Self {
        Self::from_diag([1.0, -1.0])
    }
}

/// Tensor product `a ⊗ b` with `a` acting on Alice's (first) qubit.
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    m.0[2 * ar + br][2 * ac + bc] = a.0[ar][ac] * b.0[br][bc];
                }
            }
        }
    }
    m
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.0[r][c]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.0[r][c]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        out += rhs;
        out
    }
}

impl<const N: usize> AddAssign for CMat<N> {
    fn add_assign(&mut self, rhs: Self) {
        for r in 0..N {
            for c in 0..N {
                self.0[r][c] += rhs.0[r][c];
            }
        }
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for r in 0..N {
            for c in 0..N {
                out.0[r][c] -= rhs.0[r][c];
            }
        }
        out
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for r in 0..N {
            for k in 0..N {
                let a = self.0[r][k];
                if a == ZERO {
                    continue;
                }
                for c in 0..N {
                    out.0[r][c] += a * rhs.0[k][c];
                }
            }
        }
        out
    }
}

impl<const N: usize> Mul<CMat<N>> for f64 {
    type Output = CMat<N>;
    fn mul(self, rhs: CMat<N>) -> CMat<N> {
        rhs.scale_re(self)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending. Each eigenvector has its largest-magnitude
/// component made real and positive; near-equal eigenvalues are ordered by
/// the lexicographic order of their eigenvectors' real parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEig<const N: usize> {
    pub eigenvalues: [f64; N],
    pub eigenvectors: [CVec<N>; N],
}

impl<const N: usize> HermitianEig<N> {
    /// `Σ f(λᵢ) |vᵢ⟩⟨vᵢ|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMat<N> {
        let mut m = CMat::zeros();
        for (lam, v) in self.eigenvalues.iter().zip(self.eigenvectors.iter()) {
            m += v.projector().scale_re(f(*lam));
        }
        m
    }

    pub fn reconstruct(&self) -> CMat<N> {
        self.map_spectrum(|x| x)
    }
}

const EIG_TIE_TOL: f64 = 1e-12;

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig<const N: usize>(m: &CMat<N>) -> Result<HermitianEig<N>> {
    m.check_hermitian()?;
    let mut a = m.hermitian_part();
    let mut v = CMat::<N>::identity();

    let scale = a.max_abs().max(1.0);
    let off = |a: &CMat<N>| -> f64 {
        let mut s = 0.0;
        for r in 0..N {
            for c in (r + 1)..N {
                s += a.0[r][c].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > JACOBI_OFF_DIAG_TOL * scale {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                what: "hermitian_eig",
                detail: format!("off-diagonal norm {:.3e} after {sweeps} sweeps", off(&a)),
            });
        }
        for p in 0..N {
            for q in (p + 1)..N {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut pairs: Vec<(f64, CVec<N>)> = (0..N)
        .map(|k| {
            let mut col = CVec::zeros();
            for r in 0..N {
                col.0[r] = v.0[r][k];
            }
            (a.0[k][k].re, col.fix_global_phase())
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        if (la - lb).abs() > EIG_TIE_TOL * scale {
            la.total_cmp(lb)
        } else {
            let ka = va.0.map(|z| z.re);
            let kb = vb.0.map(|z| z.re);
            ka.iter()
                .zip(kb.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        }
    });

    let mut eigenvalues = [0.0; N];
    let mut eigenvectors = [CVec::zeros(); N];
    for (k, (lam, vec)) in pairs.into_iter().enumerate() {
        eigenvalues[k] = lam;
        eigenvectors[k] = vec;
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

// Zeroes a[p][q] with the unitary U = diag(1, ē)·R(θ) on the (p, q) plane,
// where e = a_pq/|a_pq| and R is the real Jacobi rotation for the resulting
// real symmetric 2×2 block. A ← U†AU, V ← VU.
fn jacobi_rotate<const N: usize>(a: &mut CMat<N>, v: &mut CMat<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let e = apq / r;
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;
    let zeta = (aqq - app) / (2.0 * r);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -e.conj() * s;
    let u_qq = e.conj() * c;

    // A ← A·U (columns p, q)
    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * u_pp + akq * u_qp;
        a.0[k][q] = akp * u_pq + akq * u_qq;
    }
    // A ← U†·A (rows p, q)
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a.0[q][k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    a.0[p][p].im = 0.0;
    a.0[q][q].im = 0.0;

    for k in 0..N {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * u_pp + vkq * u_qp;
        v.0[k][q] = vkp * u_pq + vkq * u_qq;
    }
}

/// `Σ |λᵢ|` over the eigenvalues of a Hermitian matrix.
pub fn trace_norm<const N: usize>(m: &CMat<N>) -> Result<f64> {
    let eig = hermitian_eig(m)?;
    Ok(eig.eigenvalues.iter().map(|x| x.abs()).sum())
}
