//! Small dense complex linear algebra.
//!
//! Everything here operates on matrices of dimension at most 256, which is the
//! full eight-qubit space. The eigen-solver is a cyclic complex Jacobi method,
//! restricted to Hermitian matrices of dimension 16 or less.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::{TOL_UNITARY};
use crate::error::{Error, Result};
use crate::party::RotationRole;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest dimension accepted by [`hermitian_eigen`].
pub const MAX_EIGEN_DIM: usize = 16;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        Self { rows, cols, data }
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { rows: N, cols: N, data }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&c)
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let mut data = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                data.push(x * y.conj());
            }
        }
        Self { rows: a.len(), cols: b.len(), data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nrows, ncols);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows, "columns must have equal length");
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// ⟨v| M |v⟩.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.mul_vec(v);
        inner(v, &mv)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Determinant of a 2×2 matrix.
    pub fn det2(&self) -> C64 {
        assert_eq!((self.rows, self.cols), (2, 2), "det2 needs a 2x2 matrix");
        self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)]
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks_exact(self.cols.max(1)) {
            let cells: Vec<String> = row.iter().map(|c| format!("{:+.4}{:+.4}i", c.re, c.im)).collect();
            writeln!(f, "  {}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// ⟨a|b⟩, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "vector lengths must agree");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

/// Result of [`hermitian_eigen`]: eigenvalues ascending, eigenvectors as the
/// matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// Σ λ_k v_k v_k†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vector(k);
            let p = ComplexMatrix::outer(&v, &v).scale(C64::new(lambda, 0.0));
            out = &out + &p;
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a small Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n > MAX_EIGEN_DIM {
        return Err(Error::DimensionTooLarge { dim: n, max: MAX_EIGEN_DIM });
    }
    let deviation = m.hermitian_deviation();
    if deviation > TOL_UNITARY {
        return Err(Error::NotHermitian { deviation });
    }

    // Symmetrize so rounding in the input cannot leak into the rotations.
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = a.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let cols: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();
    Ok(Eigen { values, vectors: ComplexMatrix::from_columns(&cols) })
}

/// One two-sided rotation zeroing `a[p][q]`. The unitary is a phase on `q`
/// (making the pivot real) followed by a real Givens rotation.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq.conj() / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * b).atan2(aqq - app);
    let (s, c) = theta.sin_cos();

    // g = diag(1, phase) * [[c, s], [-s, c]]
    let g = [[C64::new(c, 0.0), C64::new(s, 0.0)], [-phase * s, phase * c]];
    let n = a.rows;

    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * g[0][0] + akq * g[1][0];
        a[(k, q)] = akp * g[0][1] + akq * g[1][1];
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g[0][0].conj() * apk + g[1][0].conj() * aqk;
        a[(q, k)] = g[0][1].conj() * apk + g[1][1].conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g[0][0] + vkq * g[1][0];
        v[(k, q)] = vkp * g[0][1] + vkq * g[1][1];
    }
}

/// A 2×2 special-unitary matrix tagged with the apparatus it rotates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRotation {
    role: RotationRole,
    /// Row-major entries.
    u: [[C64; 2]; 2],
}

impl UnitRotation {
    pub fn identity(role: RotationRole) -> Self {
        Self { role, u: [[ONE, ZERO], [ZERO, ONE]] }
    }

    /// Validates `u†u = I` and `det u = 1` within [`TOL_UNITARY`].
    pub fn new(role: RotationRole, u: [[C64; 2]; 2]) -> Result<Self> {
        let r = Self { role, u };
        let m = r.matrix();
        if !m.is_unitary(TOL_UNITARY) || (m.det2() - ONE).norm() > TOL_UNITARY {
            return Err(Error::InvalidState(format!("rotation is not in SU(2): {m:?}")));
        }
        Ok(r)
    }

    /// Unit quaternion `a + b i + c j + d k` mapped to
    /// `[[a + ib, c + id], [-c + id, a - ib]]`. The quaternion is normalized
    /// here; a zero quaternion yields the identity.
    pub fn from_quaternion(role: RotationRole, q: [f64; 4]) -> Self {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return Self::identity(role);
        }
        let [a, b, c, d] = q.map(|x| x / n);
        Self {
            role,
            u: [[C64::new(a, b), C64::new(c, d)], [C64::new(-c, d), C64::new(a, -b)]],
        }
    }

    pub fn role(&self) -> RotationRole {
        self.role
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        self.u
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(self.u)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.u[0][0] * v[0] + self.u[0][1] * v[1], self.u[1][0] * v[0] + self.u[1][1] * v[1]]
    }

    pub fn with_role(mut self, role: RotationRole) -> Self {
        self.role = role;
        self
    }
}

/// How [`sample_rotation`] picks a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationMode {
    Haar,
    /// Test hook: always return the identity, without consuming randomness.
    IdentityOverride,
}

/// Haar-random element of SU(2): a normalized Gaussian quaternion.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R, role: RotationRole) -> UnitRotation {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    UnitRotation::from_quaternion(role, q)
}

pub fn sample_rotation<R: Rng + ?Sized>(rng: &mut R, role: RotationRole, mode: RotationMode) -> UnitRotation {
    match mode {
        RotationMode::Haar => haar_su2(rng, role),
        RotationMode::IdentityOverride => UnitRotation::identity(role),
    }
}

/// Four independent rotations, one per [`RotationRole`], in the order
/// R_A, script-R_A, R_B, script-R_B.
pub fn sample_quadruple<R: Rng + ?Sized>(rng: &mut R, mode: RotationMode) -> [UnitRotation; 4] {
    RotationRole::ALL.map(|role| sample_rotation(rng, role, mode))
}

/// The Pauli matrices as 2×2 arrays.
pub mod pauli2 {
    use super::{C64, I, ONE, ZERO};

    pub const X: [[C64; 2]; 2] = [[ZERO, ONE], [ONE, ZERO]];
    pub const Y: [[C64; 2]; 2] = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
    pub const Z: [[C64; 2]; 2] = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::party::{Family, Party};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn role() -> RotationRole {
        RotationRole::new(Party::A, Family::F)
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));

        let z = ComplexMatrix::from_rows(pauli2::Z);
        let zz = kron(&z, &z);
        assert_eq!(zz, ComplexMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]));

        let x = ComplexMatrix::from_rows(pauli2::X);
        let xi = kron(&x, &i2);
        let ket00 = vec![ONE, ZERO, ZERO, ZERO];
        assert_eq!(xi.mul_vec(&ket00), vec![ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn eigen_diagonal() {
        let m = ComplexMatrix::diag_real(&[2.0, 0.0, 1.0]);
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 2.0]);
        assert!((e.vector(0)[1].norm() - 1.0).abs() < 1e-15);
        assert!((e.vector(1)[2].norm() - 1.0).abs() < 1e-15);
        assert!((e.vector(2)[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_pauli_x() {
        let x = ComplexMatrix::from_rows(pauli2::X);
        let e = hermitian_eigen(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = [c(h), c(-h)];
        let plus = [c(h), c(h)];
        assert!((inner(&minus, &e.vector(0)).norm() - 1.0).abs() < 1e-12);
        assert!((inner(&plus, &e.vector(1)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_pauli_y_complex_pivot() {
        let y = ComplexMatrix::from_rows(pauli2::Y);
        let e = hermitian_eigen(&y).unwrap();
        for k in 0..2 {
            let v = e.vector(k);
            let lv: Vec<C64> = v.iter().map(|x| x * e.values[k]).collect();
            let yv = y.mul_vec(&v);
            assert!(yv.iter().zip(&lv).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows([[ONE, ONE], [ZERO, ONE]]);
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
        let big = ComplexMatrix::identity(17);
        assert!(matches!(hermitian_eigen(&big), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn haar_is_deterministic_and_special_unitary() {
        let mut r1 = ChaCha20Rng::seed_from_u64(7);
        let mut r2 = ChaCha20Rng::seed_from_u64(7);
        let a = haar_su2(&mut r1, role());
        let b = haar_su2(&mut r2, role());
        assert_eq!(a, b);
        assert!(a.matrix().is_unitary(TOL_UNITARY));
        assert!((a.matrix().det2() - ONE).norm() <= TOL_UNITARY);
    }

    #[test]
    fn identity_override() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let u = sample_rotation(&mut rng, role(), RotationMode::IdentityOverride);
        assert_eq!(u.matrix(), ComplexMatrix::identity(2));
    }

    #[test]
    fn haar_second_moments() {
        // Monte-Carlo oracle: every |u_ij|^2 has mean 1/2 under Haar measure.
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let n = 10_000;
        let mut sums = [[0.0f64; 2]; 2];
        for _ in 0..n {
            let u = haar_su2(&mut rng, role()).entries();
            for i in 0..2 {
                for j in 0..2 {
                    sums[i][j] += u[i][j].norm_sqr();
                }
            }
        }
        for row in sums {
            for s in row {
                assert!((s / n as f64 - 0.5).abs() < 0.02, "mean {}", s / n as f64);
            }
        }
    }

    #[test]
    fn unit_rotation_rejects_non_special() {
        let r = UnitRotation::new(role(), [[I, ZERO], [ZERO, I]]);
        assert!(r.is_err());
        let r = UnitRotation::new(role(), pauli2::Z);
        assert!(r.is_err());
        let r = UnitRotation::new(role(), [[ZERO, ONE], [-ONE, ZERO]]);
        assert!(r.is_ok());
    }
}
