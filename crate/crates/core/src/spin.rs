//! Qubit states, Pauli operators and the four-qubit singlet subspace.
//!
//! Basis convention: qubit 1 is the most significant bit of the
//! computational-basis index, so on `n` qubits the 1-based qubit `k` sits at
//! bit position `n - k`.

use serde::{Deserialize, Serialize};

use crate::config::TOL_EXACT;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, inner, kron, kron_vec, norm, pauli2, ComplexMatrix, UnitRotation, C64, ONE, ZERO};

pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn matrix2(self) -> [[C64; 2]; 2] {
        match self {
            Axis::X => pauli2::X,
            Axis::Y => pauli2::Y,
            Axis::Z => pauli2::Z,
        }
    }

    /// Eigenvector of this Pauli matrix with eigenvalue `+1` for `bit = 0` and
    /// `-1` for `bit = 1`. Only defined for X and Z, the two measured axes.
    pub fn eigenvector(self, bit: u8) -> [C64; 2] {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match (self, bit) {
            (Axis::Z, 0) => [ONE, ZERO],
            (Axis::Z, _) => [ZERO, ONE],
            (Axis::X, 0) => [h, h],
            (Axis::X, _) => [h, -h],
            (Axis::Y, 0) => [h, C64::new(0.0, h.re)],
            (Axis::Y, _) => [h, C64::new(0.0, -h.re)],
        }
    }
}

/// Normalized amplitude vector on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Validates length `2^n` and unit norm within [`TOL_EXACT`].
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_shape(n_qubits, amplitudes.len())?;
        let nrm = norm(&amplitudes);
        if (nrm - 1.0).abs() > TOL_EXACT {
            return Err(Error::InvalidState(format!("norm is {nrm:.17}, expected 1")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_shape(n_qubits, amplitudes.len())?;
        let nrm = norm(&amplitudes);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {nrm}")));
        }
        amplitudes.iter_mut().for_each(|a| *a /= nrm);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Computational basis state; `bits[0]` is qubit 1.
    pub fn basis(bits: &[u8]) -> Result<Self> {
        let n = bits.len();
        Self::check_shape(n, 1 << n)?;
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[index] = ONE;
        Ok(Self { n_qubits: n, amplitudes })
    }

    /// |0…0⟩ on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(&vec![0; n])
    }

    fn check_shape(n_qubits: usize, len: usize) -> Result<()> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidState(format!("{n_qubits} qubits; supported range is 1..={MAX_QUBITS}")));
        }
        if len != 1 << n_qubits {
            return Err(Error::InvalidState(format!("{len} amplitudes for {n_qubits} qubits")));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// |⟨self|other⟩|, the phase-insensitive overlap.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        Self::check_shape(n, self.dim() * other.dim())?;
        Ok(StateVector { n_qubits: n, amplitudes: kron_vec(&self.amplitudes, &other.amplitudes) })
    }

    /// Applies a single-qubit gate to 1-based qubit `k` in place.
    pub fn apply_single(&mut self, gate: [[C64; 2]; 2], k: usize) -> Result<()> {
        if k == 0 || k > self.n_qubits {
            return Err(Error::IndexOutOfRange { index: k, n_qubits: self.n_qubits });
        }
        let stride = 1usize << (self.n_qubits - k);
        for base in 0..self.dim() {
            if base & stride != 0 {
                continue;
            }
            let a0 = self.amplitudes[base];
            let a1 = self.amplitudes[base | stride];
            self.amplitudes[base] = gate[0][0] * a0 + gate[0][1] * a1;
            self.amplitudes[base | stride] = gate[1][0] * a0 + gate[1][1] * a1;
        }
        Ok(())
    }

    /// Exchanges two 1-based qubits.
    pub fn swap_qubits(&self, j: usize, k: usize) -> Result<StateVector> {
        for &q in &[j, k] {
            if q == 0 || q > self.n_qubits {
                return Err(Error::IndexOutOfRange { index: q, n_qubits: self.n_qubits });
            }
        }
        let bj = self.n_qubits - j;
        let bk = self.n_qubits - k;
        let mut out = vec![ZERO; self.dim()];
        for (idx, &a) in self.amplitudes.iter().enumerate() {
            let x = ((idx >> bj) ^ (idx >> bk)) & 1;
            let swapped = idx ^ ((x << bj) | (x << bk));
            out[swapped] = a;
        }
        Ok(StateVector { n_qubits: self.n_qubits, amplitudes: out })
    }
}

/// `I ⊗ … ⊗ σ_axis ⊗ … ⊗ I` with the Pauli at 1-based `qubit_index`.
pub fn pauli(axis: Axis, qubit_index: usize, n_qubits: usize) -> Result<ComplexMatrix> {
    if qubit_index == 0 || qubit_index > n_qubits || n_qubits > MAX_QUBITS {
        return Err(Error::IndexOutOfRange { index: qubit_index, n_qubits });
    }
    let id = ComplexMatrix::identity(2);
    let sigma = ComplexMatrix::from_rows(axis.matrix2());
    let mut m = ComplexMatrix::identity(1);
    for k in 1..=n_qubits {
        m = kron(&m, if k == qubit_index { &sigma } else { &id });
    }
    Ok(m)
}

/// Σ_k σ_axis,k over all qubits.
pub fn collective_spin(axis: Axis, n_qubits: usize) -> Result<ComplexMatrix> {
    let dim = 1 << n_qubits;
    (1..=n_qubits).try_fold(ComplexMatrix::zeros(dim, dim), |acc, k| Ok(&acc + &pauli(axis, k, n_qubits)?))
}

/// Σ_α (Σ_k σ_α,k)², which equals 4 S². Eigenvalue 0 marks total spin zero.
pub fn total_spin_squared(n_qubits: usize) -> Result<ComplexMatrix> {
    let dim = 1 << n_qubits;
    Axis::ALL.iter().try_fold(ComplexMatrix::zeros(dim, dim), |acc, &axis| {
        let s = collective_spin(axis, n_qubits)?;
        Ok(&acc + &(&s * &s))
    })
}

/// (|01⟩ − |10⟩)/√2.
pub fn two_qubit_singlet() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector { n_qubits: 2, amplitudes: vec![ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO] }
}

/// Orthonormal basis of the two-dimensional total-spin-zero subspace of four
/// qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct SingletBasis {
    vectors: [StateVector; 2],
}

impl SingletBasis {
    /// Accepts any pair of four-qubit vectors that are orthonormal and
    /// annihilated by the collective spin.
    pub fn from_vectors(v0: StateVector, v1: StateVector) -> Result<Self> {
        for v in [&v0, &v1] {
            if v.n_qubits() != 4 {
                return Err(Error::InvalidState(format!("singlet basis vector on {} qubits", v.n_qubits())));
            }
        }
        let gram = v0.inner(&v1).norm();
        if gram > TOL_EXACT {
            return Err(Error::InvalidState(format!("basis vectors not orthogonal: |<v0|v1>| = {gram:e}")));
        }
        let s2 = total_spin_squared(4)?;
        for v in [&v0, &v1] {
            let r = norm(&s2.mul_vec(v.amplitudes()));
            if r > TOL_EXACT {
                return Err(Error::InvalidState(format!("basis vector has |S^2 v| = {r:e}")));
            }
        }
        Ok(Self { vectors: [v0, v1] })
    }

    pub fn vectors(&self) -> &[StateVector; 2] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> &StateVector {
        &self.vectors[i]
    }

    /// Another orthonormal basis of the same plane: `w_j = Σ_i v_i mix[i][j]`.
    /// `mix` must be unitary.
    pub fn remix(&self, mix: &UnitRotation) -> Result<Self> {
        let m = mix.entries();
        let build = |j: usize| {
            let amps: Vec<C64> = self.vectors[0]
                .amplitudes()
                .iter()
                .zip(self.vectors[1].amplitudes())
                .map(|(a, b)| a * m[0][j] + b * m[1][j])
                .collect();
            StateVector::new(4, amps)
        };
        Self::from_vectors(build(0)?, build(1)?)
    }

    /// Projector Σ_i |v_i⟩⟨v_i| onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        let [a, b] = &self.vectors;
        &ComplexMatrix::outer(a.amplitudes(), a.amplitudes()) + &ComplexMatrix::outer(b.amplitudes(), b.amplitudes())
    }
}

/// Extracts the eigenvalue-0 eigenspace of the total spin on four qubits and
/// orthonormalizes it with the singlet(1,2)⊗singlet(3,4) direction first,
/// followed by singlet(1,3)⊗singlet(2,4).
pub fn four_qubit_singlet_basis() -> Result<SingletBasis> {
    let s2 = total_spin_squared(4)?;
    let eig = hermitian_eigen(&s2)?;
    // Spectrum is {0, 8, 24}; anything below 1e-8 is the J = 0 block.
    let null: Vec<Vec<C64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l.abs() < 1e-8)
        .map(|(k, _)| eig.vector(k))
        .collect();
    if null.len() != 2 {
        return Err(Error::DegenerateBasis { found: null.len() });
    }

    let project = |v: &[C64]| -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        for n in &null {
            let c = inner(n, v);
            out.iter_mut().zip(n).for_each(|(o, x)| *o += c * x);
        }
        out
    };

    let pair = pair_singlets_12_34();
    let crossed = pair.swap_qubits(2, 3)?;

    let b0 = StateVector::normalized(4, project(pair.amplitudes()))?;
    let mut w = project(crossed.amplitudes());
    let c = inner(b0.amplitudes(), &w);
    w.iter_mut().zip(b0.amplitudes()).for_each(|(x, b)| *x -= c * b);
    let b1 = StateVector::normalized(4, w)?;

    SingletBasis::from_vectors(b0, b1)
}

/// singlet(1,2) ⊗ singlet(3,4).
pub fn pair_singlets_12_34() -> StateVector {
    let s = two_qubit_singlet();
    s.tensor(&s).expect("4 qubits is within range")
}

/// Applies `u` to each listed 1-based qubit.
pub fn collective_rotate(state: &StateVector, u: &UnitRotation, qubit_indices: &[usize]) -> Result<StateVector> {
    let mut seen = 0u32;
    for &k in qubit_indices {
        if k == 0 || k > state.n_qubits() {
            return Err(Error::IndexOutOfRange { index: k, n_qubits: state.n_qubits() });
        }
        if seen & (1 << k) != 0 {
            return Err(Error::DuplicateIndex(k));
        }
        seen |= 1 << k;
    }
    let mut out = state.clone();
    for &k in qubit_indices {
        out.apply_single(u.entries(), k)?;
    }
    Ok(out)
}
