//! Per-party measurement settings, exact joint outcome tables and the F/G
//! coarse-graining.
//!
//! Outcome convention: bit 0 is the `+1` eigenvalue of the measured Pauli
//! (|0⟩ for z, |+⟩ for x), bit 1 the `-1` eigenvalue. Both classifiers are
//! invariant under flipping all four bits, so the opposite convention gives
//! identical F/G statistics.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{MIN_CONDITION_PROB, P_GAGB_TARGET, TOL_EXACT};
use crate::error::{Error, Result};
use crate::linalg::{kron_vec, ComplexMatrix, UnitRotation, C64, ONE, ZERO};
pub use crate::party::{Family, Party, RotationRole};
use crate::spin::{Axis, StateVector};

/// Outcomes classified F = -1, exactly as listed for the (z, z, x, x) setting.
pub const F_MINUS_OUTCOMES: [[u8; 4]; 4] = [[0, 1, 0, 1], [0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 1, 0]];

/// Outcomes classified G = -1, exactly as listed for the (z, x, z, x) setting.
pub const G_MINUS_OUTCOMES: [[u8; 4]; 4] = [[0, 0, 1, 1], [0, 1, 1, 0], [1, 0, 0, 1], [1, 1, 0, 0]];

impl Family {
    /// Measured axis per local qubit.
    pub fn axes(self) -> [Axis; 4] {
        match self {
            Family::F => [Axis::Z, Axis::Z, Axis::X, Axis::X],
            Family::G => [Axis::Z, Axis::X, Axis::Z, Axis::X],
        }
    }
}

/// A ±1 value of F or G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Four local outcome bits, ordered by local qubit, tagged with the family
/// that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome4 {
    pub bits: [u8; 4],
    pub family: Family,
}

impl Outcome4 {
    pub fn new(bits: [u8; 4], family: Family) -> Self {
        Self { bits: bits.map(|b| b & 1), family }
    }

    /// Inverse of [`Outcome4::index`].
    pub fn from_index(index: usize, family: Family) -> Self {
        let bits = std::array::from_fn(|k| ((index >> (3 - k)) & 1) as u8);
        Self { bits, family }
    }

    /// Position in the 16-entry ordering; the first local qubit is the most
    /// significant bit.
    pub fn index(self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn all(family: Family) -> impl Iterator<Item = Outcome4> {
        (0..16).map(move |i| Outcome4::from_index(i, family))
    }
}

impl fmt::Display for Outcome4 {
    /// Bits with a combining overline on x-measured positions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (bit, axis) in self.bits.iter().zip(self.family.axes()) {
            write!(f, "{bit}")?;
            if axis == Axis::X {
                f.write_str("\u{0305}")?;
            }
        }
        Ok(())
    }
}

/// F = -1 exactly when bit1 ≠ bit2 and bit3 ≠ bit4.
pub fn classify_f(outcome: Outcome4) -> Result<Sign> {
    if outcome.family != Family::F {
        return Err(Error::WrongFamily { expected: Family::F, found: outcome.family });
    }
    let b = outcome.bits;
    Ok(if b[0] != b[1] && b[2] != b[3] { Sign::Minus } else { Sign::Plus })
}

/// G = -1 exactly when bit1 ≠ bit3 and bit2 ≠ bit4.
pub fn classify_g(outcome: Outcome4) -> Result<Sign> {
    if outcome.family != Family::G {
        return Err(Error::WrongFamily { expected: Family::G, found: outcome.family });
    }
    let b = outcome.bits;
    Ok(if b[0] != b[2] && b[1] != b[3] { Sign::Minus } else { Sign::Plus })
}

/// Classifies with whichever rule matches the outcome's own family.
pub fn classify(outcome: Outcome4) -> Sign {
    match outcome.family {
        Family::F => classify_f(outcome),
        Family::G => classify_g(outcome),
    }
    .expect("family matches classifier")
}

/// One party's measurement: a family of axes plus a common rotation of all
/// four devices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartySetting {
    pub party: Party,
    pub family: Family,
    pub rotation: UnitRotation,
}

impl PartySetting {
    pub fn new(party: Party, family: Family, rotation: UnitRotation) -> Self {
        let rotation = rotation.with_role(RotationRole::new(party, family));
        Self { party, family, rotation }
    }

    pub fn aligned(party: Party, family: Family) -> Self {
        Self::new(party, family, UnitRotation::identity(RotationRole::new(party, family)))
    }

    /// Local eigenvector `⊗_k u|e(axis_k, bit_k)⟩` on the party's four qubits.
    pub fn outcome_vector(&self, outcome: Outcome4) -> Vec<C64> {
        debug_assert_eq!(outcome.family, self.family);
        self.family
            .axes()
            .iter()
            .zip(outcome.bits)
            .map(|(axis, bit)| self.rotation.apply(axis.eigenvector(bit)))
            .fold(vec![ONE], |acc, v| kron_vec(&acc, &v))
    }

    /// All 16 outcome vectors in index order.
    pub fn outcome_vectors(&self) -> Vec<Vec<C64>> {
        Outcome4::all(self.family).map(|o| self.outcome_vector(o)).collect()
    }
}

/// Rank-1 projector of one four-bit outcome on the party's 16-dimensional
/// space.
pub fn outcome_projector(setting: &PartySetting, outcome: Outcome4) -> ComplexMatrix {
    let v = setting.outcome_vector(Outcome4::new(outcome.bits, setting.family));
    ComplexMatrix::outer(&v, &v)
}

/// Sum of the outcome projectors whose classification is `value`.
pub fn event_projector(setting: &PartySetting, value: Sign) -> ComplexMatrix {
    Outcome4::all(setting.family)
        .filter(|&o| classify(o) == value)
        .fold(ComplexMatrix::zeros(16, 16), |acc, o| &acc + &outcome_projector(setting, o))
}

/// Exact joint distribution of Alice's and Bob's four-bit outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeTable {
    pub setting_a: PartySetting,
    pub setting_b: PartySetting,
    /// `p[a][b]` indexed by [`Outcome4::index`].
    pub p: Vec<[f64; 16]>,
}

impl OutcomeTable {
    pub fn get(&self, a: Outcome4, b: Outcome4) -> f64 {
        self.p[a.index()][b.index()]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    pub fn min_entry(&self) -> f64 {
        self.p.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Every cell with its outcome pair, Alice-major.
    pub fn cells(&self) -> impl Iterator<Item = (Outcome4, Outcome4, f64)> + '_ {
        let (fa, fb) = (self.setting_a.family, self.setting_b.family);
        (0..256).map(move |i| {
            let (a, b) = (i / 16, i % 16);
            (Outcome4::from_index(a, fa), Outcome4::from_index(b, fb), self.p[a][b])
        })
    }

    /// Largest entry among cells whose outcomes classify to `(value_a, value_b)`.
    pub fn max_entry_where(&self, value_a: Sign, value_b: Sign) -> f64 {
        self.cells()
            .filter(|(a, b, _)| classify(*a) == value_a && classify(*b) == value_b)
            .map(|(_, _, p)| p)
            .fold(0.0, f64::max)
    }

    pub fn is_valid_distribution(&self) -> bool {
        (self.total() - 1.0).abs() <= TOL_EXACT && self.min_entry() >= -1e-12
    }
}

/// `p[a][b] = |⟨m_a ⊗ m_b|ψ⟩|²`, contracted directly against the 16 + 16
/// rank-1 outcome vectors.
pub fn joint_outcome_table(state: &StateVector, setting_a: &PartySetting, setting_b: &PartySetting) -> Result<OutcomeTable> {
    if state.n_qubits() != 8 {
        return Err(Error::InvalidState(format!("joint table needs 8 qubits, got {}", state.n_qubits())));
    }
    if setting_a.party != Party::A {
        return Err(Error::PartyMismatch { expected: Party::A, found: setting_a.party });
    }
    if setting_b.party != Party::B {
        return Err(Error::PartyMismatch { expected: Party::B, found: setting_b.party });
    }
    let psi = state.amplitudes();
    let va = setting_a.outcome_vectors();
    let vb = setting_b.outcome_vectors();

    // half[a][j] = Σ_i conj(va[a][i]) ψ[i][j]
    let mut half = [[ZERO; 16]; 16];
    for (a, v) in va.iter().enumerate() {
        for (i, vi) in v.iter().enumerate() {
            let c = vi.conj();
            if c == ZERO {
                continue;
            }
            let row = &psi[i * 16..(i + 1) * 16];
            for (h, x) in half[a].iter_mut().zip(row) {
                *h += c * x;
            }
        }
    }
    let mut p = vec![[0.0; 16]; 16];
    for a in 0..16 {
        for (b, w) in vb.iter().enumerate() {
            let amp: C64 = half[a].iter().zip(w).map(|(h, x)| h * x.conj()).sum();
            p[a][b] = amp.norm_sqr();
        }
    }
    Ok(OutcomeTable { setting_a: setting_a.clone(), setting_b: setting_b.clone(), p })
}

/// "Party `party`'s `family` value equals `value`".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideEvent {
    pub party: Party,
    pub family: Family,
    pub value: Sign,
}

impl SideEvent {
    pub fn new(party: Party, family: Family, value: Sign) -> Self {
        Self { party, family, value }
    }

    fn holds(&self, a: Outcome4, b: Outcome4) -> bool {
        let o = match self.party {
            Party::A => a,
            Party::B => b,
        };
        classify(o) == self.value
    }
}

/// Probability that every event in `events` holds.
pub fn probability(table: &OutcomeTable, events: &[SideEvent]) -> Result<f64> {
    for e in events {
        let setting = match e.party {
            Party::A => table.setting_a.family,
            Party::B => table.setting_b.family,
        };
        if setting != e.family {
            return Err(Error::ClassifierSettingMismatch { classifier: e.family, setting });
        }
    }
    Ok(table.cells().filter(|(a, b, _)| events.iter().all(|e| e.holds(*a, *b))).map(|(_, _, p)| p).sum())
}

/// P(A's classified value = `value_a`, B's = `value_b`). The classifier for
/// each side is chosen by the family in the argument and must match the
/// table's setting.
pub fn aggregate(table: &OutcomeTable, value_a: (Family, Sign), value_b: (Family, Sign)) -> Result<f64> {
    probability(
        table,
        &[SideEvent::new(Party::A, value_a.0, value_a.1), SideEvent::new(Party::B, value_b.0, value_b.1)],
    )
}

/// P(target | given).
pub fn conditional(table: &OutcomeTable, target: SideEvent, given: SideEvent) -> Result<f64> {
    let denom = probability(table, &[given])?;
    if denom <= MIN_CONDITION_PROB {
        return Err(Error::ConditionHasZeroProbability(denom));
    }
    let joint = probability(table, &[target, given])?;
    Ok(joint / denom)
}

/// The four Hardy quantities for one choice of apparatus rotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyRecord {
    /// P(F_A = 1, F_B = 1), target 0.
    pub p_fafb: f64,
    /// P(F_A = 1 | G_B = 1), target 1.
    pub p_fa_given_gb: f64,
    /// P(F_B = 1 | G_A = 1), target 1.
    pub p_fb_given_ga: f64,
    /// P(G_A = 1, G_B = 1), target 9/112.
    pub p_gagb: f64,
    /// R_A, script-R_A, R_B, script-R_B.
    pub rotations: [UnitRotation; 4],
    /// |value - target| for the four quantities, in field order.
    pub deviations: [f64; 4],
    pub max_abs_deviation: f64,
    /// Largest single table entry in the (F+,F+), (F-,G+) and (G+,F-) cells
    /// of the (F,F), (F,G) and (G,F) tables respectively.
    pub max_forbidden_entry: [f64; 3],
    pub pass: bool,
}

impl HardyRecord {
    pub const TARGETS: [f64; 4] = [0.0, 1.0, 1.0, P_GAGB_TARGET];

    pub fn values(&self) -> [f64; 4] {
        [self.p_fafb, self.p_fa_given_gb, self.p_fb_given_ga, self.p_gagb]
    }
}

/// Evaluates all four setting pairs with rotations `[R_A, script-R_A, R_B, script-R_B]`.
pub fn hardy_record(state: &StateVector, rotations: &[UnitRotation; 4]) -> Result<HardyRecord> {
    let [ra, rra, rb, rrb] = rotations.clone();
    let a_f = PartySetting::new(Party::A, Family::F, ra);
    let a_g = PartySetting::new(Party::A, Family::G, rra);
    let b_f = PartySetting::new(Party::B, Family::F, rb);
    let b_g = PartySetting::new(Party::B, Family::G, rrb);

    let pairs = [(&a_f, &b_f), (&a_f, &b_g), (&a_g, &b_f), (&a_g, &b_g)];
    let tables = pairs
        .par_iter()
        .map(|(a, b)| joint_outcome_table(state, a, b))
        .collect::<Result<Vec<_>>>()?;
    let [ff, fg, gf, gg] = <[OutcomeTable; 4]>::try_from(tables).expect("four tables");

    use Family::{F, G};
    use Sign::{Minus, Plus};
    let p_fafb = aggregate(&ff, (F, Plus), (F, Plus))?;
    let p_fa_given_gb = conditional(&fg, SideEvent::new(Party::A, F, Plus), SideEvent::new(Party::B, G, Plus))?;
    let p_fb_given_ga = conditional(&gf, SideEvent::new(Party::B, F, Plus), SideEvent::new(Party::A, G, Plus))?;
    let p_gagb = aggregate(&gg, (G, Plus), (G, Plus))?;

    let values = [p_fafb, p_fa_given_gb, p_fb_given_ga, p_gagb];
    let deviations: [f64; 4] = std::array::from_fn(|k| (values[k] - HardyRecord::TARGETS[k]).abs());
    let max_abs_deviation = deviations.iter().copied().fold(0.0, f64::max);
    let max_forbidden_entry =
        [ff.max_entry_where(Plus, Plus), fg.max_entry_where(Minus, Plus), gf.max_entry_where(Plus, Minus)];

    Ok(HardyRecord {
        p_fafb,
        p_fa_given_gb,
        p_fb_given_ga,
        p_gagb,
        rotations: rotations.clone(),
        deviations,
        max_abs_deviation,
        max_forbidden_entry,
        pass: deviations.iter().all(|&d| d <= TOL_EXACT),
    })
}

/// Identity rotations for all four roles.
pub fn aligned_rotations() -> [UnitRotation; 4] {
    RotationRole::ALL.map(UnitRotation::identity)
}
