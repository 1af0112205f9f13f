//! Labels shared by the rotation, measurement and strategy types.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Alice owns global qubits 1–4, Bob owns 5–8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    /// Zero-based global index of this party's first qubit.
    pub fn first_qubit(self) -> usize {
        match self {
            Party::A => 0,
            Party::B => 4,
        }
    }
}

/// Measurement family. F measures (z, z, x, x) on the four local qubits,
/// G measures (z, x, z, x).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::F => f.write_str("F"),
            Family::G => f.write_str("G"),
        }
    }
}

/// Which of the four independent apparatus rotations a matrix plays:
/// `(A, F)` is R_A, `(A, G)` is the script-R_A, and likewise for Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RotationRole {
    pub party: Party,
    pub family: Family,
}

impl RotationRole {
    pub const ALL: [RotationRole; 4] = [
        RotationRole { party: Party::A, family: Family::F },
        RotationRole { party: Party::A, family: Family::G },
        RotationRole { party: Party::B, family: Family::F },
        RotationRole { party: Party::B, family: Family::G },
    ];

    pub fn new(party: Party, family: Family) -> Self {
        Self { party, family }
    }
}
