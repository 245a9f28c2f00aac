//! Kelvin-mapped algebra for symmetric second-order tensors and fourth-order
//! operators with minor symmetries.
//!
//! Component ordering is `(11, 22, 33, 23, 13, 12)` and the three shear
//! coordinates carry a factor `√2`, so that the Euclidean inner product of two
//! 6-vectors equals the double contraction `A : B` of the tensors and a 6×6
//! matrix acting on a 6-vector reproduces the fourth-order contraction `𝔸 : X`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Index pairs `(i, j)` of the six Kelvin coordinates.
pub const KELVIN_INDEX: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

/// Determinant magnitude below which a tensor counts as singular.
pub const SINGULAR_DET: f64 = 1e-14;

/// Plain 3×3 matrix, row-major.
pub type Mat3<T> = [[T; 3]; 3];

#[inline]
fn kelvin_weight<T: Real>(k: usize) -> T {
    if k < 3 {
        T::one()
    } else {
        T::SQRT_2()
    }
}

/// Kelvin slot of the index pair `(i, j)` (order irrelevant).
#[inline]
pub fn kelvin_slot(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        (0, 1) => 5,
        _ => panic!("tensor index out of range: ({i}, {j})"),
    }
}

/// Symmetric second-order tensor stored as a Kelvin 6-vector.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SymTensorK<T> {
    pub v: [T; 6],
}

impl<T: Real> SymTensorK<T> {
    pub fn new(v: [T; 6]) -> Self {
        Self { v }
    }

    pub fn zero() -> Self {
        Self { v: [T::zero(); 6] }
    }

    pub fn identity() -> Self {
        Self::from_diag(T::one(), T::one(), T::one())
    }

    pub fn from_diag(a: T, b: T, c: T) -> Self {
        let z = T::zero();
        Self {
            v: [a, b, c, z, z, z],
        }
    }

    /// Maps a symmetric 3×3 matrix to Kelvin form.
    ///
    /// The matrix must be symmetric to a relative tolerance of `1e-12` (measured
    /// against its largest entry); the stored shear value is the mean of the two
    /// off-diagonal entries.
    pub fn from_matrix(m: &Mat3<T>) -> Result<Self> {
        let scale = m.iter().flatten().fold(T::one(), |acc, x| acc.max(x.abs()));
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(10.0)) * scale;
        for (i, j) in [(1, 2), (0, 2), (0, 1)] {
            let gap = (m[i][j] - m[j][i]).abs();
            if gap.is_nan() || gap > tol {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not symmetric: |m{}{} - m{}{}| = {:e}",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1,
                    gap.as_f64()
                )));
            }
        }
        let half = T::lit(0.5);
        let mut v = [T::zero(); 6];
        for (k, &(i, j)) in KELVIN_INDEX.iter().enumerate() {
            v[k] = if i == j {
                m[i][i]
            } else {
                half * (m[i][j] + m[j][i]) * T::SQRT_2()
            };
        }
        Ok(Self { v })
    }

    /// Inverse of [`from_matrix`](Self::from_matrix).
    pub fn to_matrix(&self) -> Mat3<T> {
        let mut m = [[T::zero(); 3]; 3];
        for (k, &(i, j)) in KELVIN_INDEX.iter().enumerate() {
            let x = self.v[k] / kelvin_weight::<T>(k);
            m[i][j] = x;
            m[j][i] = x;
        }
        m
    }

    /// Tensor component `A_ij`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        let k = kelvin_slot(i, j);
        self.v[k] / kelvin_weight::<T>(k)
    }

    pub fn trace(&self) -> T {
        self.v[0] + self.v[1] + self.v[2]
    }

    pub fn det(&self) -> T {
        let [a, b, c, d, e, f] = self.plain();
        a * b * c + T::lit(2.0) * d * e * f - a * d * d - b * e * e - c * f * f
    }

    /// Closed-form cofactor inverse.
    pub fn inv(&self) -> Result<Self> {
        let det = self.det();
        if !(det.abs() > T::lit(SINGULAR_DET)) {
            return Err(Error::SingularTensor { det: det.as_f64() });
        }
        let [a, b, c, d, e, f] = self.plain();
        let r = T::one() / det;
        let s = T::SQRT_2();
        Ok(Self {
            v: [
                (b * c - d * d) * r,
                (a * c - e * e) * r,
                (a * b - f * f) * r,
                (e * f - a * d) * r * s,
                (d * f - b * e) * r * s,
                (d * e - c * f) * r * s,
            ],
        })
    }

    /// Double contraction `A : B`.
    pub fn dot(&self, other: &Self) -> T {
        self.v
            .iter()
            .zip(other.v.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        let mut v = self.v;
        v.iter_mut().for_each(|x| *x = *x * s);
        Self { v }
    }

    /// `A X A` for symmetric `A` and `X` (the result is symmetric).
    pub fn sandwich(&self, x: &Self) -> Self {
        let a = self.to_matrix();
        let xm = x.to_matrix();
        let ax = mat_mul(&a, &xm);
        let axa = mat_mul(&ax, &a);
        let half = T::lit(0.5);
        let mut v = [T::zero(); 6];
        for (k, &(i, j)) in KELVIN_INDEX.iter().enumerate() {
            v[k] = half * (axa[i][j] + axa[j][i]) * kelvin_weight::<T>(k);
        }
        Self { v }
    }

    /// Smallest eigenvalue (closed-form trigonometric solution).
    pub fn min_eigenvalue(&self) -> T {
        let m = self.to_matrix();
        let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
        let q = self.trace() / T::lit(3.0);
        if p1 <= T::epsilon() * T::epsilon() * (q * q).max(T::one()) {
            return m[0][0].min(m[1][1]).min(m[2][2]);
        }
        let p2 = (m[0][0] - q).powi(2)
            + (m[1][1] - q).powi(2)
            + (m[2][2] - q).powi(2)
            + T::lit(2.0) * p1;
        let p = (p2 / T::lit(6.0)).sqrt();
        let mut bm = m;
        for (i, row) in bm.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (*x - if i == j { q } else { T::zero() }) / p;
            }
        }
        let r = (Self::from_matrix(&bm)
            .map(|b| b.det())
            .unwrap_or_else(|_| T::zero())
            / T::lit(2.0))
        .max(-T::one())
        .min(T::one());
        let phi = r.acos() / T::lit(3.0);
        let two_pi_3 = T::lit(2.0) * T::PI() / T::lit(3.0);
        q + T::lit(2.0) * p * (phi + two_pi_3).cos()
    }

    pub fn is_finite(&self) -> bool {
        self.v.iter().all(|x| x.is_finite())
    }

    /// Coordinates with the `√2` removed from the shear slots.
    fn plain(&self) -> [T; 6] {
        let s = T::SQRT_2();
        [
            self.v[0],
            self.v[1],
            self.v[2],
            self.v[3] / s,
            self.v[4] / s,
            self.v[5] / s,
        ]
    }
}

/// Maps a symmetric 3×3 matrix to Kelvin form (see [`SymTensorK::from_matrix`]).
pub fn to_kelvin<T: Real>(m: &Mat3<T>) -> Result<SymTensorK<T>> {
    SymTensorK::from_matrix(m)
}

pub fn from_kelvin<T: Real>(t: &SymTensorK<T>) -> Mat3<T> {
    t.to_matrix()
}

pub fn mat_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut c = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    c
}

impl<T: Real> Add for SymTensorK<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Real> AddAssign for SymTensorK<T> {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.v.iter_mut().zip(rhs.v) {
            *a = *a + b;
        }
    }
}

impl<T: Real> Sub for SymTensorK<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<T: Real> SubAssign for SymTensorK<T> {
    fn sub_assign(&mut self, rhs: Self) {
        for (a, b) in self.v.iter_mut().zip(rhs.v) {
            *a = *a - b;
        }
    }
}

impl<T: Real> Neg for SymTensorK<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul<T> for SymTensorK<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// Fourth-order operator with minor symmetries, stored as a 6×6 Kelvin matrix.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SymOperatorK<T> {
    pub m: [[T; 6]; 6],
}

impl<T: Real> SymOperatorK<T> {
    pub fn zero() -> Self {
        Self {
            m: [[T::zero(); 6]; 6],
        }
    }

    pub fn identity() -> Self {
        let mut op = Self::zero();
        for i in 0..6 {
            op.m[i][i] = T::one();
        }
        op
    }

    /// `A ⊗ B`, acting as `X ↦ A (B : X)`.
    pub fn dyad(a: &SymTensorK<T>, b: &SymTensorK<T>) -> Self {
        let mut op = Self::zero();
        for i in 0..6 {
            for j in 0..6 {
                op.m[i][j] = a.v[i] * b.v[j];
            }
        }
        op
    }

    /// `A ⊙ B` with `(A ⊙ B)_ijkl = ½ (A_ik B_jl + A_il B_jk)`, additionally
    /// symmetrised in `ij` so that it maps symmetric tensors to symmetric
    /// tensors. For `A = B` the symmetrisation is the identity, and
    /// `d(C⁻¹)/dC = -(C⁻¹ ⊙ C⁻¹)`.
    pub fn symprod(a: &SymTensorK<T>, b: &SymTensorK<T>) -> Self {
        let am = a.to_matrix();
        let bm = b.to_matrix();
        let quarter = T::lit(0.25);
        let mut op = Self::zero();
        for (p, &(i, j)) in KELVIN_INDEX.iter().enumerate() {
            for (q, &(k, l)) in KELVIN_INDEX.iter().enumerate() {
                let t = quarter
                    * (am[i][k] * bm[j][l]
                        + am[i][l] * bm[j][k]
                        + am[j][k] * bm[i][l]
                        + am[j][l] * bm[i][k]);
                op.m[p][q] = t * kelvin_weight::<T>(p) * kelvin_weight::<T>(q);
            }
        }
        op
    }

    pub fn apply(&self, x: &SymTensorK<T>) -> SymTensorK<T> {
        let mut v = [T::zero(); 6];
        for (i, out) in v.iter_mut().enumerate() {
            *out = (0..6).fold(T::zero(), |acc, j| acc + self.m[i][j] * x.v[j]);
        }
        SymTensorK { v }
    }

    /// Operator composition `self ∘ other` (matrix product).
    pub fn compose(&self, other: &Self) -> Self {
        let mut op = Self::zero();
        for i in 0..6 {
            for j in 0..6 {
                op.m[i][j] = (0..6).fold(T::zero(), |acc, k| acc + self.m[i][k] * other.m[k][j]);
            }
        }
        op
    }

    pub fn transpose(&self) -> Self {
        let mut op = Self::zero();
        for i in 0..6 {
            for j in 0..6 {
                op.m[i][j] = self.m[j][i];
            }
        }
        op
    }

    pub fn scale(&self, s: T) -> Self {
        let mut op = *self;
        op.m.iter_mut().flatten().for_each(|x| *x = *x * s);
        op
    }

    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, x| acc.max(x.abs()))
    }

    /// Largest `|m_ij - m_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> T {
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for i in 0..6 {
            for j in (i + 1)..6 {
                worst = worst.max((self.m[i][j] - self.m[j][i]).abs());
            }
        }
        worst / scale
    }

    /// Component `𝔸_ijkl` of the fourth-order tensor.
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        let p = kelvin_slot(i, j);
        let q = kelvin_slot(k, l);
        self.m[p][q] / (kelvin_weight::<T>(p) * kelvin_weight::<T>(q))
    }
}

impl<T: Real> Add for SymOperatorK<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Real> AddAssign for SymOperatorK<T> {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.m.iter_mut().flatten().zip(rhs.m.iter().flatten()) {
            *a = *a + *b;
        }
    }
}

impl<T: Real> Sub for SymOperatorK<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.m.iter_mut().flatten().zip(rhs.m.iter().flatten()) {
            *a = *a - *b;
        }
        self
    }
}

impl<T: Real> Mul<T> for SymOperatorK<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

pub fn dyad<T: Real>(a: &SymTensorK<T>, b: &SymTensorK<T>) -> SymOperatorK<T> {
    SymOperatorK::dyad(a, b)
}

pub fn symprod<T: Real>(a: &SymTensorK<T>, b: &SymTensorK<T>) -> SymOperatorK<T> {
    SymOperatorK::symprod(a, b)
}
