//! Finite-shot experiment: draw outcome pairs from the exact tables and
//! estimate the four Hardy quantities.
//!
//! Single-qubit measurements on distinct qubits commute, so the joint
//! distribution of a shot is exactly the outcome table; no sequential
//! collapse is simulated.
//!
//! Each (setting pair, block) unit gets its own ChaCha20 stream derived from
//! the run seed, so blocks can be sampled in parallel and aggregated in a
//! fixed order with bit-identical results.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{P_GAGB_TARGET, Z_BOUND};
use crate::error::{Error, Result};
use crate::linalg::{sample_quadruple, RotationMode, UnitRotation};
use crate::measurement::{aligned_rotations, classify, joint_outcome_table, Family, Outcome4, OutcomeTable, Party, PartySetting, Sign};
use crate::spin::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationPolicy {
    /// Aligned apparatus throughout.
    Identity,
    /// One Haar quadruple for the whole run.
    FixedRandom,
    /// A new Haar quadruple for every block.
    FreshPerBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub shots_per_setting_pair: u64,
    pub rotation_policy: RotationPolicy,
    pub block_size: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots_per_setting_pair == 0 {
            return Err(Error::InvalidConfig("shots per setting pair must be at least 1".into()));
        }
        if self.block_size == 0 {
            return Err(Error::InvalidConfig("block size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n_blocks(&self) -> u64 {
        self.shots_per_setting_pair.div_ceil(self.block_size)
    }

    fn block_len(&self, block: u64) -> u64 {
        (self.shots_per_setting_pair - block * self.block_size).min(self.block_size)
    }
}

/// The four setting pairs in fixed order: (F,F), (F,G), (G,F), (G,G).
pub const SETTING_PAIRS: [(Family, Family); 4] =
    [(Family::F, Family::F), (Family::F, Family::G), (Family::G, Family::F), (Family::G, Family::G)];

pub fn pair_label(pair: usize) -> String {
    let (a, b) = SETTING_PAIRS[pair];
    format!("{a}{b}")
}

/// I.i.d. draws from the 256-cell distribution, cells ordered Alice-major.
/// Tiny negative rounding residue is treated as zero weight.
pub fn sample_outcomes<R: Rng + ?Sized>(table: &OutcomeTable, n: usize, rng: &mut R) -> Vec<(Outcome4, Outcome4)> {
    let weights: Vec<f64> = table.p.iter().flatten().map(|&p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights).expect("outcome table has positive mass");
    let (fa, fb) = (table.setting_a.family, table.setting_b.family);
    (0..n)
        .map(|_| {
            let cell = dist.sample(rng);
            (Outcome4::from_index(cell / 16, fa), Outcome4::from_index(cell % 16, fb))
        })
        .collect()
}

/// One drawn shot, as written to the CSV event log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotEvent {
    pub block: u64,
    pub pair: usize,
    pub a: Outcome4,
    pub b: Outcome4,
}

/// Classified counts for one setting pair: `[[++, +-], [-+, --]]`, Alice first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCounts {
    pub plus_plus: u64,
    pub plus_minus: u64,
    pub minus_plus: u64,
    pub minus_minus: u64,
}

impl SignCounts {
    fn add(&mut self, a: Sign, b: Sign) {
        match (a, b) {
            (Sign::Plus, Sign::Plus) => self.plus_plus += 1,
            (Sign::Plus, Sign::Minus) => self.plus_minus += 1,
            (Sign::Minus, Sign::Plus) => self.minus_plus += 1,
            (Sign::Minus, Sign::Minus) => self.minus_minus += 1,
        }
    }

    fn merge(&mut self, o: &SignCounts) {
        self.plus_plus += o.plus_plus;
        self.plus_minus += o.plus_minus;
        self.minus_plus += o.minus_plus;
        self.minus_minus += o.minus_minus;
    }

    pub fn total(&self) -> u64 {
        self.plus_plus + self.plus_minus + self.minus_plus + self.minus_minus
    }

    pub fn get(&self, a: Sign, b: Sign) -> u64 {
        match (a, b) {
            (Sign::Plus, Sign::Plus) => self.plus_plus,
            (Sign::Plus, Sign::Minus) => self.plus_minus,
            (Sign::Minus, Sign::Plus) => self.minus_plus,
            (Sign::Minus, Sign::Minus) => self.minus_minus,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCounts {
    pub pair: String,
    pub counts: SignCounts,
    /// Draws landing in a cell of one of the three zero events.
    pub zero_cell_hits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Ok,
    InsufficientConditioningEvents,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantityEstimate {
    pub name: String,
    pub target: f64,
    pub numerator: u64,
    /// Shots for joint quantities, conditioning-event count for conditionals.
    pub denominator: u64,
    pub estimate: Option<f64>,
    /// Wald standard error. Zero when the estimate sits at 0 or 1; see `z_score`.
    pub std_error: Option<f64>,
    /// `(estimate - target) / se`. When the Wald error vanishes the error under
    /// the target is used instead; when both vanish the z-score is undefined
    /// and consistency means exact equality.
    pub z_score: Option<f64>,
    pub consistent: bool,
    pub status: EstimateStatus,
}

impl QuantityEstimate {
    fn from_counts(name: &str, target: f64, numerator: u64, denominator: u64) -> Self {
        if denominator == 0 {
            return Self {
                name: name.to_string(),
                target,
                numerator,
                denominator,
                estimate: None,
                std_error: None,
                z_score: None,
                consistent: true,
                status: EstimateStatus::InsufficientConditioningEvents,
            };
        }
        let n = denominator as f64;
        let p = numerator as f64 / n;
        let wald = (p * (1.0 - p) / n).sqrt();
        let null = (target * (1.0 - target) / n).sqrt();
        let se = if wald > 0.0 { wald } else { null };
        let (z_score, consistent) = if se > 0.0 {
            let z = (p - target) / se;
            (Some(z), z.abs() <= Z_BOUND)
        } else {
            (None, p == target)
        };
        Self {
            name: name.to_string(),
            target,
            numerator,
            denominator,
            estimate: Some(p),
            std_error: Some(wald),
            z_score,
            consistent,
            status: EstimateStatus::Ok,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub config: ExperimentConfig,
    /// P(F_A=1,F_B=1), P(F_A=1|G_B=1), P(F_B=1|G_A=1), P(G_A=1,G_B=1).
    pub quantities: Vec<QuantityEstimate>,
    pub pairs: Vec<PairCounts>,
    /// Counts in the three constraint-violating cells: (F+,F+) of FF,
    /// (F-,G+) of FG, (G+,F-) of GF.
    pub constraint_violations: [u64; 3],
    pub zero_cell_hits: u64,
    /// Rotations used when the policy is fixed-random.
    pub fixed_rotations: Option<[UnitRotation; 4]>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl EstimateReport {
    /// Fails if any conditional quantity had no conditioning events.
    pub fn require_conditioning(&self) -> Result<()> {
        match self.quantities.iter().find(|q| q.status == EstimateStatus::InsufficientConditioningEvents) {
            Some(q) => Err(Error::InsufficientConditioningEvents(q.name.clone())),
            None => Ok(()),
        }
    }

    pub fn quantity(&self, name: &str) -> Option<&QuantityEstimate> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

pub const Q_FAFB: &str = "P(F_A=1,F_B=1)";
pub const Q_FA_GIVEN_GB: &str = "P(F_A=1|G_B=1)";
pub const Q_FB_GIVEN_GA: &str = "P(F_B=1|G_A=1)";
pub const Q_GAGB: &str = "P(G_A=1,G_B=1)";

struct BlockResult {
    counts: SignCounts,
    zero_hits: u64,
    events: Vec<ShotEvent>,
}

fn block_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const FIXED_ROTATION_STREAM: u64 = u64::MAX;

pub fn run_experiment(state: &StateVector, config: &ExperimentConfig) -> Result<EstimateReport> {
    run(state, config, false).map(|(r, _)| r)
}

/// Like [`run_experiment`] but also returns every shot in draw order.
pub fn run_experiment_logged(state: &StateVector, config: &ExperimentConfig) -> Result<(EstimateReport, Vec<ShotEvent>)> {
    run(state, config, true)
}

/// Whether a sign pair falls in one of the three zero events for setting pair
/// `pair` (index into [`SETTING_PAIRS`]).
fn forbidden(pair: usize, signs: (Sign, Sign)) -> bool {
    use Sign::{Minus, Plus};
    matches!((pair, signs), (0, (Plus, Plus)) | (1, (Minus, Plus)) | (2, (Plus, Minus)))
}

fn run(state: &StateVector, config: &ExperimentConfig, keep_events: bool) -> Result<(EstimateReport, Vec<ShotEvent>)> {
    config.validate()?;
    if state.n_qubits() != 8 {
        return Err(Error::InvalidState(format!("experiment needs 8 qubits, got {}", state.n_qubits())));
    }

    let fixed = match config.rotation_policy {
        RotationPolicy::FixedRandom => {
            Some(sample_quadruple(&mut block_rng(config.seed, FIXED_ROTATION_STREAM), RotationMode::Haar))
        }
        _ => None,
    };
    let aligned_tables = if config.rotation_policy == RotationPolicy::FreshPerBlock {
        None
    } else {
        let rot = fixed.clone().unwrap_or_else(aligned_rotations);
        Some((0..4).map(|p| pair_table(state, p, &rot)).collect::<Result<Vec<_>>>()?)
    };

    let n_blocks = config.n_blocks();
    let units: Vec<(usize, u64)> = (0..4).flat_map(|p| (0..n_blocks).map(move |b| (p, b))).collect();
    let results = units
        .par_iter()
        .map(|&(pair, block)| {
            let mut rng = block_rng(config.seed, ((pair as u64) << 48) | block);
            let fresh;
            let table = match &aligned_tables {
                Some(t) => &t[pair],
                None => {
                    let rot = sample_quadruple(&mut rng, RotationMode::Haar);
                    fresh = pair_table(state, pair, &rot)?;
                    &fresh
                }
            };
            let n = config.block_len(block) as usize;
            let draws = sample_outcomes(table, n, &mut rng);
            let mut counts = SignCounts::default();
            let mut zero_hits = 0;
            for &(a, b) in &draws {
                let signs = (classify(a), classify(b));
                counts.add(signs.0, signs.1);
                if forbidden(pair, signs) {
                    zero_hits += 1;
                }
            }
            let events = if keep_events {
                draws.into_iter().map(|(a, b)| ShotEvent { block, pair, a, b }).collect()
            } else {
                Vec::new()
            };
            Ok(BlockResult { counts, zero_hits, events })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut pairs: Vec<PairCounts> =
        (0..4).map(|p| PairCounts { pair: pair_label(p), counts: SignCounts::default(), zero_cell_hits: 0 }).collect();
    let mut events = Vec::new();
    for ((pair, _), r) in units.iter().zip(results) {
        pairs[*pair].counts.merge(&r.counts);
        pairs[*pair].zero_cell_hits += r.zero_hits;
        events.extend(r.events);
    }

    use Sign::{Minus, Plus};
    let [ff, fg, gf, gg] = [0, 1, 2, 3].map(|p| pairs[p].counts);
    let quantities = vec![
        QuantityEstimate::from_counts(Q_FAFB, 0.0, ff.plus_plus, ff.total()),
        QuantityEstimate::from_counts(Q_FA_GIVEN_GB, 1.0, fg.plus_plus, fg.plus_plus + fg.minus_plus),
        QuantityEstimate::from_counts(Q_FB_GIVEN_GA, 1.0, gf.plus_plus, gf.plus_plus + gf.plus_minus),
        QuantityEstimate::from_counts(Q_GAGB, P_GAGB_TARGET, gg.plus_plus, gg.total()),
    ];
    let constraint_violations = [ff.get(Plus, Plus), fg.get(Minus, Plus), gf.get(Plus, Minus)];
    let zero_cell_hits = pairs.iter().map(|p| p.zero_cell_hits).sum();

    let warnings: Vec<String> = quantities
        .iter()
        .filter(|q| q.status == EstimateStatus::InsufficientConditioningEvents)
        .map(|q| format!("{}: no conditioning events observed, estimate omitted", q.name))
        .chain(
            quantities
                .iter()
                .filter(|q| q.status == EstimateStatus::Ok && q.z_score.is_none())
                .map(|q| format!("{}: zero Wald error, compared by raw counts", q.name)),
        )
        .collect();
    let pass = zero_cell_hits == 0 && quantities.iter().all(|q| q.consistent);

    let report = EstimateReport {
        config: *config,
        quantities,
        pairs,
        constraint_violations,
        zero_cell_hits,
        fixed_rotations: fixed,
        warnings,
        pass,
    };
    Ok((report, events))
}

fn pair_table(state: &StateVector, pair: usize, rot: &[UnitRotation; 4]) -> Result<OutcomeTable> {
    let (fa, fb) = SETTING_PAIRS[pair];
    let ra = match fa {
        Family::F => &rot[0],
        Family::G => &rot[1],
    };
    let rb = match fb {
        Family::F => &rot[2],
        Family::G => &rot[3],
    };
    joint_outcome_table(
        state,
        &PartySetting::new(Party::A, fa, ra.clone()),
        &PartySetting::new(Party::B, fb, rb.clone()),
    )
}

/// Two-sample z-scores between matching quantities of two reports. `None`
/// where either estimate is missing or both errors vanish.
pub fn compare_reports(x: &EstimateReport, y: &EstimateReport) -> Vec<Option<f64>> {
    x.quantities
        .iter()
        .zip(&y.quantities)
        .map(|(p, q)| {
            let (ep, eq) = (p.estimate?, q.estimate?);
            let se = (p.std_error?.powi(2) + q.std_error?.powi(2)).sqrt();
            if se > 0.0 {
                Some((ep - eq) / se)
            } else if ep == eq {
                Some(0.0)
            } else {
                None
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_table() -> OutcomeTable {
        // |+…+⟩ on Alice's z positions etc. is fiddly; a uniform table is
        // easier to build by hand.
        OutcomeTable {
            setting_a: PartySetting::aligned(Party::A, Family::F),
            setting_b: PartySetting::aligned(Party::B, Family::F),
            p: vec![[1.0 / 256.0; 16]; 16],
        }
    }

    #[test]
    fn degenerate_table_repeats_its_cell() {
        let mut t = uniform_table();
        t.p = vec![[0.0; 16]; 16];
        t.p[5][9] = 1.0;
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let draws = sample_outcomes(&t, 1000, &mut rng);
        assert!(draws.iter().all(|(a, b)| a.index() == 5 && b.index() == 9));
    }

    #[test]
    fn uniform_counts_concentrate() {
        // Binomial(256000, 1/256): mean 1000, sd ~31.56.
        let t = uniform_table();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let draws = sample_outcomes(&t, 256_000, &mut rng);
        let mut counts = [0u32; 256];
        for (a, b) in draws {
            counts[a.index() * 16 + b.index()] += 1;
        }
        let sd = (256_000.0f64 * (1.0 / 256.0) * (255.0 / 256.0)).sqrt();
        for c in counts {
            assert!((c as f64 - 1000.0).abs() <= 5.0 * sd, "count {c}");
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let t = uniform_table();
        let a = sample_outcomes(&t, 100, &mut ChaCha20Rng::seed_from_u64(3));
        let b = sample_outcomes(&t, 100, &mut ChaCha20Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let base = ExperimentConfig {
            shots_per_setting_pair: 1000,
            rotation_policy: RotationPolicy::FreshPerBlock,
            block_size: 100,
            seed: 0,
        };
        assert!(base.validate().is_ok());
        assert!(ExperimentConfig { shots_per_setting_pair: 0, ..base }.validate().is_err());
        assert!(ExperimentConfig { block_size: 0, ..base }.validate().is_err());
        let ragged = ExperimentConfig { block_size: 300, ..base };
        assert!(ragged.validate().is_ok());
        assert_eq!(ragged.n_blocks(), 4);
        assert_eq!(ragged.block_len(3), 100);
        let one = ExperimentConfig { shots_per_setting_pair: 1, block_size: 1000, ..base };
        assert_eq!((one.n_blocks(), one.block_len(0)), (1, 1));
    }

    #[test]
    fn product_state_fails_fafb() {
        let zero = StateVector::zero(8).unwrap();
        let cfg = ExperimentConfig {
            shots_per_setting_pair: 2000,
            rotation_policy: RotationPolicy::Identity,
            block_size: 500,
            seed: 9,
        };
        let r = run_experiment(&zero, &cfg).unwrap();
        let q = r.quantity(Q_FAFB).unwrap();
        assert_eq!(q.estimate, Some(1.0));
        assert!(!q.consistent);
        assert!(!r.pass);
        for p in &r.pairs {
            assert_eq!(p.counts.total(), 2000);
        }
    }

    #[test]
    fn quantity_estimate_edges() {
        let q = QuantityEstimate::from_counts("x", 0.5, 0, 0);
        assert_eq!(q.status, EstimateStatus::InsufficientConditioningEvents);
        let q = QuantityEstimate::from_counts("x", 0.0, 0, 10);
        assert!(q.consistent && q.z_score.is_none());
        let q = QuantityEstimate::from_counts("x", 0.08, 0, 1);
        assert!(q.consistent);
        assert!(q.z_score.unwrap() < 0.0);
    }
}
