//! Reconstruction of the eight-qubit state |η⟩.
//!
//! The search space is span{S_i^A ⊗ S_j^B}: Alice's and Bob's four-qubit
//! singlet planes tensored together, four complex dimensions. Each of the
//! three zero-probability requirements is an event projector Π on the full
//! 256-dimensional space; compressed into the search space it becomes a 4×4
//! PSD matrix, and |η⟩ is the common nullspace of the three. A PSD operator
//! with zero expectation annihilates the vector, so nullspace membership is
//! the same as Π|η⟩ = 0.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{P_GAGB_TARGET, TOL_EXACT};
use crate::error::{Error, Result};
use crate::json::{complex_from_json, complex_to_json, Exact, ExactComplex};
use crate::linalg::{hermitian_eigen, kron, kron_vec, norm, sample_quadruple, ComplexMatrix, RotationMode, C64, ZERO};
use crate::measurement::{
    aggregate, aligned_rotations, event_projector, hardy_record, joint_outcome_table, Family, HardyRecord, Party,
    PartySetting, Sign,
};
use crate::spin::{four_qubit_singlet_basis, SingletBasis, StateVector};

pub const SCHEMA_VERSION: u32 = 1;

/// Tag for the singlet-basis convention used to express the coefficients.
pub const BASIS_CONVENTION: &str = "msb-qubit1;z0=+1,x0=+1;S0=singlet(12)singlet(34),S1=gram-schmidt(singlet(13)singlet(24))";

/// The three zero-probability requirements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintLabel {
    /// F_A = +1 and F_B = +1 never co-occur.
    BothFPlus,
    /// F_A = -1 and G_B = +1 never co-occur.
    FaMinusGbPlus,
    /// G_A = +1 and F_B = -1 never co-occur.
    GaPlusFbMinus,
}

impl ConstraintLabel {
    pub const ALL: [ConstraintLabel; 3] =
        [ConstraintLabel::BothFPlus, ConstraintLabel::FaMinusGbPlus, ConstraintLabel::GaPlusFbMinus];

    /// `(family, value)` of Alice's and Bob's half of the forbidden event.
    pub fn event(self) -> [(Family, Sign); 2] {
        match self {
            ConstraintLabel::BothFPlus => [(Family::F, Sign::Plus), (Family::F, Sign::Plus)],
            ConstraintLabel::FaMinusGbPlus => [(Family::F, Sign::Minus), (Family::G, Sign::Plus)],
            ConstraintLabel::GaPlusFbMinus => [(Family::G, Sign::Plus), (Family::F, Sign::Minus)],
        }
    }

    /// Full 256×256 event projector with aligned apparatus.
    pub fn full_projector(self) -> ComplexMatrix {
        let [(fa, va), (fb, vb)] = self.event();
        kron(
            &event_projector(&PartySetting::aligned(Party::A, fa), va),
            &event_projector(&PartySetting::aligned(Party::B, fb), vb),
        )
    }
}

/// An event projector compressed onto the singlet ⊗ singlet plane.
#[derive(Debug, Clone)]
pub struct ConstraintMatrix {
    pub label: ConstraintLabel,
    pub m: ComplexMatrix,
}

/// Columns `S_i^A ⊗ S_j^B` in the order (0,0), (0,1), (1,0), (1,1).
pub fn embedding(basis_a: &SingletBasis, basis_b: &SingletBasis) -> Vec<Vec<C64>> {
    let mut cols = Vec::with_capacity(4);
    for a in basis_a.vectors() {
        for b in basis_b.vectors() {
            cols.push(kron_vec(a.amplitudes(), b.amplitudes()));
        }
    }
    cols
}

/// Maps four coefficients to the 256-dimensional state.
pub fn embed(basis_a: &SingletBasis, basis_b: &SingletBasis, coefficients: &[C64; 4]) -> Vec<C64> {
    let mut out = vec![ZERO; 256];
    for (col, c) in embedding(basis_a, basis_b).iter().zip(coefficients) {
        out.iter_mut().zip(col).for_each(|(o, x)| *o += c * x);
    }
    out
}

/// `m[ij, kl] = ⟨S_i^A S_j^B| Π |S_k^A S_l^B⟩`.
pub fn build_constraint(label: ConstraintLabel, basis_a: &SingletBasis, basis_b: &SingletBasis) -> ConstraintMatrix {
    let pi = label.full_projector();
    let cols = embedding(basis_a, basis_b);
    let images: Vec<Vec<C64>> = cols.iter().map(|c| pi.mul_vec(c)).collect();
    let mut m = ComplexMatrix::zeros(4, 4);
    for (r, row) in cols.iter().enumerate() {
        for (c, img) in images.iter().enumerate() {
            m[(r, c)] = crate::linalg::inner(row, img);
        }
    }
    ConstraintMatrix { label, m }
}

/// The reconstructed state together with its diagnostics.
#[derive(Debug, Clone)]
pub struct EtaSolution {
    /// Coefficients over `S_i^A ⊗ S_j^B`, order (0,0), (0,1), (1,0), (1,1).
    pub coefficients: [C64; 4],
    pub state: StateVector,
    pub nullspace_dimension: usize,
    /// ⟨η|M_k|η⟩ for the three constraints.
    pub residuals: [f64; 3],
    pub p_gagb: f64,
    /// Eigenvalues of M₁ + M₂ + M₃, ascending.
    pub spectrum: Vec<f64>,
    /// Absolute nullspace cut: `tol * max eigenvalue`.
    pub threshold: f64,
}

/// Derives |η⟩ with the default singlet bases.
pub fn solve_eta(tol: f64) -> Result<EtaSolution> {
    let basis = four_qubit_singlet_basis()?;
    solve_eta_with(&basis, &basis, tol)
}

/// Derives |η⟩ for explicit singlet bases (used to check basis independence).
pub fn solve_eta_with(basis_a: &SingletBasis, basis_b: &SingletBasis, tol: f64) -> Result<EtaSolution> {
    let constraints: Vec<ConstraintMatrix> =
        ConstraintLabel::ALL.iter().map(|&l| build_constraint(l, basis_a, basis_b)).collect();
    solve_constraints(&constraints, basis_a, basis_b, tol)
}

/// Common nullspace of an arbitrary subset of constraints.
pub fn solve_constraints(
    constraints: &[ConstraintMatrix],
    basis_a: &SingletBasis,
    basis_b: &SingletBasis,
    tol: f64,
) -> Result<EtaSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("nullspace tolerance must be positive, got {tol}")));
    }
    let total = constraints.iter().fold(ComplexMatrix::zeros(4, 4), |acc, c| &acc + &c.m);
    let eig = hermitian_eigen(&total)?;
    let largest = eig.values.last().copied().unwrap_or(0.0).abs().max(f64::MIN_POSITIVE);
    let threshold = tol * largest;

    let null: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] < threshold).collect();
    match null.len() {
        0 => Err(Error::NoSolution { smallest: eig.values[0], threshold }),
        1 => {
            let mut coefficients: [C64; 4] = eig.vector(null[0]).try_into().expect("4 coefficients");
            fix_phase(&mut coefficients);
            let state = StateVector::normalized(8, embed(basis_a, basis_b, &coefficients))?;
            let residuals = std::array::from_fn(|k| {
                let m = &build_constraint(ConstraintLabel::ALL[k], basis_a, basis_b).m;
                m.expectation(&coefficients).re
            });
            let p_gagb = p_gagb_of(&state)?;
            Ok(EtaSolution {
                coefficients,
                state,
                nullspace_dimension: 1,
                residuals,
                p_gagb,
                spectrum: eig.values.clone(),
                threshold,
            })
        }
        _ => {
            let states = null
                .iter()
                .map(|&k| {
                    let mut c: [C64; 4] = eig.vector(k).try_into().expect("4 coefficients");
                    fix_phase(&mut c);
                    StateVector::normalized(8, embed(basis_a, basis_b, &c))
                })
                .collect::<Result<Vec<_>>>()?;
            Err(Error::AmbiguousSolution(states))
        }
    }
}

/// Makes the first coefficient with non-negligible modulus real and positive.
fn fix_phase(c: &mut [C64; 4]) {
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if let Some(first) = c.iter().find(|x| x.norm() > 1e-12 * scale).copied() {
        let phase = first.conj() / first.norm();
        c.iter_mut().for_each(|x| *x *= phase);
    }
}

/// P(G_A = 1, G_B = 1) with aligned apparatus, summed from the joint table.
pub fn p_gagb_of(state: &StateVector) -> Result<f64> {
    let t = joint_outcome_table(
        state,
        &PartySetting::aligned(Party::A, Family::G),
        &PartySetting::aligned(Party::B, Family::G),
    )?;
    aggregate(&t, (Family::G, Sign::Plus), (Family::G, Sign::Plus))
}

/// ‖Π|ψ⟩‖ for a constraint's full event projector.
pub fn full_residual(label: ConstraintLabel, state: &StateVector) -> f64 {
    norm(&label.full_projector().mul_vec(state.amplitudes()))
}

/// Result of [`certify`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certification {
    pub n_rotations: usize,
    pub seed: u64,
    /// The aligned record first, then one per random quadruple.
    pub records: Vec<HardyRecord>,
    /// Largest deviation of each quantity from its target over all records.
    pub max_deviation: [f64; 4],
    /// Largest forbidden table entry of each zero constraint over all records.
    pub max_forbidden_entry: [f64; 3],
    pub pass: bool,
}

/// Evaluates the Hardy record for aligned apparatus and `n_rotations` Haar
/// quadruples drawn from `seed`.
pub fn certify(state: &StateVector, n_rotations: usize, seed: u64) -> Result<Certification> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut quads = vec![aligned_rotations()];
    quads.extend((0..n_rotations).map(|_| sample_quadruple(&mut rng, RotationMode::Haar)));

    let records = quads.par_iter().map(|q| hardy_record(state, q)).collect::<Result<Vec<_>>>()?;
    let mut max_deviation = [0.0f64; 4];
    let mut max_forbidden_entry = [0.0f64; 3];
    for r in &records {
        for k in 0..4 {
            max_deviation[k] = max_deviation[k].max(r.deviations[k]);
        }
        for k in 0..3 {
            max_forbidden_entry[k] = max_forbidden_entry[k].max(r.max_forbidden_entry[k]);
        }
    }
    let pass = records.iter().all(|r| r.pass) && max_forbidden_entry.iter().all(|&e| e <= TOL_EXACT);
    Ok(Certification { n_rotations, seed, records, max_deviation, max_forbidden_entry, pass })
}

/// Serialized form of an [`EtaSolution`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaDocument {
    pub schema_version: u32,
    pub basis_convention: String,
    pub nullspace_dimension: usize,
    pub nullspace_threshold: Exact,
    pub constraint_spectrum: Vec<Exact>,
    pub coefficients: Vec<ExactComplex>,
    pub amplitudes: Vec<ExactComplex>,
    pub residuals: Vec<Exact>,
    pub p_gagb: Exact,
    pub p_gagb_target: Exact,
}

impl EtaDocument {
    pub fn from_solution(s: &EtaSolution) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            basis_convention: BASIS_CONVENTION.to_string(),
            nullspace_dimension: s.nullspace_dimension,
            nullspace_threshold: Exact(s.threshold),
            constraint_spectrum: s.spectrum.iter().map(|&x| Exact(x)).collect(),
            coefficients: s.coefficients.iter().map(|&c| complex_to_json(c)).collect(),
            amplitudes: s.state.amplitudes().iter().map(|&c| complex_to_json(c)).collect(),
            residuals: s.residuals.iter().map(|&x| Exact(x)).collect(),
            p_gagb: Exact(s.p_gagb),
            p_gagb_target: Exact(P_GAGB_TARGET),
        }
    }

    /// Rebuilds and validates the eight-qubit state (length 256, unit norm).
    pub fn state(&self) -> Result<StateVector> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidState(format!("unsupported schema version {}", self.schema_version)));
        }
        let amps: Vec<C64> = self.amplitudes.iter().map(|&c| complex_from_json(c)).collect();
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        StateVector::new(8, amps)
    }
}
