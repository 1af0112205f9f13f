//! Exhaustive local-hidden-variable check.
//!
//! An LHV model is a probability distribution over deterministic local
//! strategies λ = (a_F, a_G, b_F, b_G), one predetermined four-bit outcome per
//! party and setting. Every LHV probability is a convex combination of the
//! deterministic ones: P(E) = Σ_λ q(λ) [E holds under λ]. So if a strategy
//! with q(λ) > 0 must avoid every forbidden outcome pair, and no such strategy
//! has G_A = G_B = +1, then P(G_A = 1, G_B = 1) = 0 in every model obeying the
//! three zero constraints.
//!
//! The fine enumeration states the zero constraints on outcome pairs, using
//! the literal −1 outcome lists, while the Hardy event G_A = G_B = +1 is
//! evaluated with a [`Classifier`]. A classifier that disagrees with the lists
//! can let a strategy through, which is how a transcription error shows up.

use serde::{Deserialize, Serialize};

use crate::measurement::{classify, Family, Outcome4, Sign, F_MINUS_OUTCOMES, G_MINUS_OUTCOMES};

pub const N_STRATEGIES: usize = 16 * 16 * 16 * 16;

pub const HARDY_CHAIN: &str = "G_A=+1 and G_B=+1 force F_B=+1 (G_A=1 => F_B=1) and F_A=+1 (G_B=1 => F_A=1), \
which contradicts the requirement that F_A=+1 and F_B=+1 never co-occur; every local deterministic strategy, \
and therefore every local hidden-variable mixture, that respects the three zero constraints gives \
P(G_A=1,G_B=1)=0, against the quantum value 9/112";

/// A ±1 assignment for each of the 16 outcomes of both families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classifier {
    f: [Sign; 16],
    g: [Sign; 16],
}

impl Default for Classifier {
    fn default() -> Self {
        Self {
            f: std::array::from_fn(|i| classify(Outcome4::from_index(i, Family::F))),
            g: std::array::from_fn(|i| classify(Outcome4::from_index(i, Family::G))),
        }
    }
}

impl Classifier {
    /// Test hook: the same classifier with one entry negated.
    pub fn with_flipped(mut self, outcome: Outcome4) -> Self {
        let table = match outcome.family {
            Family::F => &mut self.f,
            Family::G => &mut self.g,
        };
        table[outcome.index()] = table[outcome.index()].flip();
        self
    }

    pub fn classify(&self, outcome: Outcome4) -> Sign {
        match outcome.family {
            Family::F => self.f[outcome.index()],
            Family::G => self.g[outcome.index()],
        }
    }
}

fn listed_minus(outcome: Outcome4) -> bool {
    let list = match outcome.family {
        Family::F => &F_MINUS_OUTCOMES,
        Family::G => &G_MINUS_OUTCOMES,
    };
    list.contains(&outcome.bits)
}

/// Predetermined outcomes for every party and setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalStrategy {
    pub a_f: Outcome4,
    pub a_g: Outcome4,
    pub b_f: Outcome4,
    pub b_g: Outcome4,
}

impl LocalStrategy {
    /// Decodes `0..65536`, four hex digits `a_f a_g b_f b_g`.
    pub fn from_index(i: usize) -> Self {
        Self {
            a_f: Outcome4::from_index((i >> 12) & 15, Family::F),
            a_g: Outcome4::from_index((i >> 8) & 15, Family::G),
            b_f: Outcome4::from_index((i >> 4) & 15, Family::F),
            b_g: Outcome4::from_index(i & 15, Family::G),
        }
    }

    pub fn all() -> impl Iterator<Item = LocalStrategy> {
        (0..N_STRATEGIES).map(LocalStrategy::from_index)
    }

    /// True when none of the strategy's outcome pairs is forbidden by the
    /// listed zero constraints.
    pub fn respects_zero_lists(&self) -> bool {
        let plus = |o: Outcome4| !listed_minus(o);
        let minus = listed_minus;
        let both_f_plus = plus(self.a_f) && plus(self.b_f);
        let fa_minus_gb_plus = minus(self.a_f) && plus(self.b_g);
        let ga_plus_fb_minus = plus(self.a_g) && minus(self.b_f);
        !(both_f_plus || fa_minus_gb_plus || ga_plus_fb_minus)
    }

    pub fn values(&self, c: &Classifier) -> SignPattern {
        SignPattern {
            f_a: c.classify(self.a_f),
            g_a: c.classify(self.a_g),
            f_b: c.classify(self.b_f),
            g_b: c.classify(self.b_g),
        }
    }
}

/// Values (F_A, G_A, F_B, G_B) of one deterministic strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    pub f_a: Sign,
    pub g_a: Sign,
    pub f_b: Sign,
    pub g_b: Sign,
}

impl SignPattern {
    pub fn all() -> impl Iterator<Item = SignPattern> {
        let s = |bit: usize| if bit == 0 { Sign::Plus } else { Sign::Minus };
        (0..16).map(move |i| SignPattern { f_a: s(i >> 3 & 1), g_a: s(i >> 2 & 1), f_b: s(i >> 1 & 1), g_b: s(i & 1) })
    }

    pub fn gg(&self) -> bool {
        self.g_a == Sign::Plus && self.g_b == Sign::Plus
    }
}

/// Which zero constraints to impose. Dropping one shows that the remaining
/// two admit G_A = G_B = +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintMask {
    pub not_both_f_plus: bool,
    pub gb_implies_fa: bool,
    pub ga_implies_fb: bool,
}

impl ConstraintMask {
    pub const ALL: ConstraintMask = ConstraintMask { not_both_f_plus: true, gb_implies_fa: true, ga_implies_fb: true };

    pub fn admits(&self, s: &SignPattern) -> bool {
        use Sign::Plus;
        let c1 = !(s.f_a == Plus && s.f_b == Plus);
        let c2 = s.g_b != Plus || s.f_a == Plus;
        let c3 = s.g_a != Plus || s.f_b == Plus;
        (!self.not_both_f_plus || c1) && (!self.gb_implies_fa || c2) && (!self.ga_implies_fb || c3)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoarseCheck {
    pub n_patterns: usize,
    /// Patterns satisfying all three constraints (G values unrestricted).
    pub n_admissible: usize,
    pub n_admissible_with_gg: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContradictionCertificate {
    pub n_strategies: usize,
    pub n_respecting_zero_constraints: usize,
    pub n_satisfying_all_zero_constraints_with_gg: usize,
    pub witnesses: Vec<LocalStrategy>,
    pub coarse_check: CoarseCheck,
    pub explanation: String,
}

impl ContradictionCertificate {
    pub fn is_valid(&self) -> bool {
        self.witnesses.is_empty() && self.n_strategies == N_STRATEGIES && self.coarse_check.n_admissible_with_gg == 0
    }
}

pub fn enumerate_contradiction() -> ContradictionCertificate {
    enumerate_contradiction_with(&Classifier::default())
}

/// Visits all 16⁴ strategies once and collects those that avoid every
/// forbidden pair yet give G_A = G_B = +1 under `classifier`.
pub fn enumerate_contradiction_with(classifier: &Classifier) -> ContradictionCertificate {
    let mut visited = 0;
    let mut respecting = 0;
    let mut witnesses = Vec::new();
    for lambda in LocalStrategy::all() {
        visited += 1;
        if !lambda.respects_zero_lists() {
            continue;
        }
        respecting += 1;
        if lambda.values(classifier).gg() {
            witnesses.push(lambda);
        }
    }

    let admissible: Vec<SignPattern> = SignPattern::all().filter(|s| ConstraintMask::ALL.admits(s)).collect();
    let coarse_check = CoarseCheck {
        n_patterns: SignPattern::all().count(),
        n_admissible: admissible.len(),
        n_admissible_with_gg: admissible.iter().filter(|s| s.gg()).count(),
    };

    ContradictionCertificate {
        n_strategies: visited,
        n_respecting_zero_constraints: respecting,
        n_satisfying_all_zero_constraints_with_gg: witnesses.len(),
        witnesses,
        coarse_check,
        explanation: HARDY_CHAIN.to_string(),
    }
}

/// Best LHV value of P(G_A = 1, G_B = 1) under a set of constraints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LhvBound {
    pub constraints: ConstraintMask,
    pub max_gg: f64,
    /// A deterministic strategy attaining the bound (weight 1), if any is admissible.
    pub optimal_pattern: Option<SignPattern>,
    pub mixture: String,
}

pub fn lhv_best_model() -> LhvBound {
    lhv_best_model_with(ConstraintMask::ALL)
}

/// P(GG) is linear in the mixture weights, so its maximum over the simplex is
/// attained at a vertex: a single deterministic sign pattern.
pub fn lhv_best_model_with(constraints: ConstraintMask) -> LhvBound {
    let best = SignPattern::all()
        .filter(|s| constraints.admits(s))
        .max_by_key(|s| s.gg());
    let max_gg = best.map_or(0.0, |s| if s.gg() { 1.0 } else { 0.0 });
    let mixture = match best {
        Some(s) => format!(
            "point mass on F_A={:+}, G_A={:+}, F_B={:+}, G_B={:+}",
            s.f_a.value(),
            s.g_a.value(),
            s.f_b.value(),
            s.g_b.value()
        ),
        None => "no admissible strategy".to_string(),
    };
    LhvBound { constraints, max_gg, optimal_pattern: best, mixture }
}
