//! Exact checks of the four probability statements on the reconstructed state.

mod common;

use eta_core::config::{DEFAULT_NULLSPACE_TOL, P_GAGB_TARGET, TOL_CLAIM, TOL_EXACT};
use eta_core::eta::{certify, full_residual, solve_eta, solve_eta_with, ConstraintLabel};
use eta_core::linalg::{haar_su2, kron, norm, sample_quadruple, RotationMode, C64};
use eta_core::measurement::{
    aligned_rotations, event_projector, hardy_record, joint_outcome_table, outcome_projector, Outcome4, PartySetting,
    Sign,
};
use eta_core::spin::{collective_rotate, four_qubit_singlet_basis, StateVector};
use eta_core::{Family, Party, RotationRole};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[test]
fn aligned_record_matches_targets() {
    let sol = common::eta();
    let rec = hardy_record(&sol.state, &aligned_rotations()).unwrap();
    assert!(rec.p_fafb.abs() <= TOL_CLAIM);
    assert!((rec.p_fa_given_gb - 1.0).abs() <= TOL_CLAIM);
    assert!((rec.p_fb_given_ga - 1.0).abs() <= TOL_CLAIM);
    assert!((rec.p_gagb - 9.0 / 112.0).abs() <= TOL_CLAIM);
    assert!(rec.pass);
}

#[test]
fn fine_grained_zero_sets_under_rotation() {
    let sol = common::eta();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for _ in 0..20 {
        let q = sample_quadruple(&mut rng, RotationMode::Haar);
        let a_f = PartySetting::new(Party::A, Family::F, q[0].clone());
        let a_g = PartySetting::new(Party::A, Family::G, q[1].clone());
        let b_f = PartySetting::new(Party::B, Family::F, q[2].clone());
        let b_g = PartySetting::new(Party::B, Family::G, q[3].clone());

        let ff = joint_outcome_table(&sol.state, &a_f, &b_f).unwrap();
        let fg = joint_outcome_table(&sol.state, &a_f, &b_g).unwrap();
        let gf = joint_outcome_table(&sol.state, &a_g, &b_f).unwrap();
        let gg = joint_outcome_table(&sol.state, &a_g, &b_g).unwrap();
        for t in [&ff, &fg, &gf, &gg] {
            assert!(t.is_valid_distribution());
        }

        let cells = |t: &eta_core::measurement::OutcomeTable, va: Sign, vb: Sign| {
            t.cells()
                .filter(|(a, b, _)| {
                    eta_core::measurement::classify(*a) == va && eta_core::measurement::classify(*b) == vb
                })
                .map(|(_, _, p)| p)
                .collect::<Vec<_>>()
        };
        let c1 = cells(&ff, Sign::Plus, Sign::Plus);
        let c2 = cells(&fg, Sign::Minus, Sign::Plus);
        let c3 = cells(&gf, Sign::Plus, Sign::Minus);
        assert_eq!((c1.len(), c2.len(), c3.len()), (144, 48, 48));
        assert!(c1.iter().chain(&c2).chain(&c3).all(|&p| p <= TOL_EXACT));

        let sum_gg: f64 = cells(&gg, Sign::Plus, Sign::Plus).iter().sum();
        assert!((sum_gg - P_GAGB_TARGET).abs() <= TOL_CLAIM);
    }
}

#[test]
fn table_matches_explicit_projector_contraction() {
    // Independent route: ⟨ψ| Π_a ⊗ Π_b |ψ⟩ with full 256×256 matrices.
    let sol = common::eta();
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let a = PartySetting::new(Party::A, Family::G, haar_su2(&mut rng, RotationRole::new(Party::A, Family::G)));
    let b = PartySetting::new(Party::B, Family::F, haar_su2(&mut rng, RotationRole::new(Party::B, Family::F)));
    let t = joint_outcome_table(&sol.state, &a, &b).unwrap();
    for (ia, ib) in [(0, 0), (3, 12), (6, 9), (15, 15), (10, 5)] {
        let oa = Outcome4::from_index(ia, Family::G);
        let ob = Outcome4::from_index(ib, Family::F);
        let pi = kron(&outcome_projector(&a, oa), &outcome_projector(&b, ob));
        let direct = pi.expectation(sol.state.amplitudes()).re;
        assert!((direct - t.get(oa, ob)).abs() <= 1e-14);
    }
}

#[test]
fn p_gagb_two_routes_agree() {
    let sol = common::eta();
    let pi = kron(
        &event_projector(&PartySetting::aligned(Party::A, Family::G), Sign::Plus),
        &event_projector(&PartySetting::aligned(Party::B, Family::G), Sign::Plus),
    );
    let direct = pi.expectation(sol.state.amplitudes()).re;
    assert!((direct - sol.p_gagb).abs() <= 1e-12);
}

#[test]
fn constraint_projectors_annihilate_eta() {
    let sol = common::eta();
    for label in ConstraintLabel::ALL {
        assert!(full_residual(label, &sol.state) <= 1e-9, "{label:?}");
    }
}

#[test]
fn eta_lies_in_singlet_product() {
    let sol = common::eta();
    let basis = four_qubit_singlet_basis().unwrap();
    let p = kron(&basis.projector(), &basis.projector());
    let projected = p.mul_vec(sol.state.amplitudes());
    let diff: Vec<C64> = projected.iter().zip(sol.state.amplitudes()).map(|(x, y)| x - y).collect();
    assert!(norm(&diff) <= 1e-10);
}

#[test]
fn eta_is_invariant_under_each_party_rotating() {
    let sol = common::eta();
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    for _ in 0..10 {
        let ua = haar_su2(&mut rng, RotationRole::new(Party::A, Family::F));
        let ub = haar_su2(&mut rng, RotationRole::new(Party::B, Family::F));
        let r = collective_rotate(&sol.state, &ua, &[1, 2, 3, 4]).unwrap();
        let r = collective_rotate(&r, &ub, &[5, 6, 7, 8]).unwrap();
        assert!((sol.state.overlap(&r) - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn solver_is_deterministic() {
    let a = solve_eta(DEFAULT_NULLSPACE_TOL).unwrap();
    let b = solve_eta(DEFAULT_NULLSPACE_TOL).unwrap();
    let bits = |s: &eta_core::eta::EtaSolution| {
        s.coefficients.iter().flat_map(|c| [c.re.to_bits(), c.im.to_bits()]).collect::<Vec<_>>()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn solution_is_basis_independent() {
    let sol = common::eta();
    let basis = four_qubit_singlet_basis().unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(31);
    for _ in 0..5 {
        let ba = basis.remix(&haar_su2(&mut rng, RotationRole::new(Party::A, Family::F))).unwrap();
        let bb = basis.remix(&haar_su2(&mut rng, RotationRole::new(Party::B, Family::F))).unwrap();
        let other = solve_eta_with(&ba, &bb, DEFAULT_NULLSPACE_TOL).unwrap();
        assert_eq!(other.nullspace_dimension, 1);
        assert!((sol.state.overlap(&other.state) - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn certification_over_random_rotations() {
    let sol = common::eta();
    let cert = certify(&sol.state, 100, 42).unwrap();
    assert_eq!(cert.records.len(), 101);
    assert!(cert.pass);
    assert!(cert.max_deviation.iter().all(|&d| d <= TOL_CLAIM));
}

#[test]
fn perturbed_state_fails() {
    let state = common::perturbed_eta(0.1);
    let cert = certify(&state, 3, 1).unwrap();
    assert!(!cert.pass);
    assert!(!cert.records[0].pass);
}

#[test]
fn per_qubit_misalignment_is_not_covered() {
    // Rotating one of Alice's qubits on its own leaves the singlet plane, and
    // the zero constraints no longer hold.
    let sol = common::eta();
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    let u = haar_su2(&mut rng, RotationRole::new(Party::A, Family::F));
    let skewed = collective_rotate(&sol.state, &u, &[2]).unwrap();
    let rec = hardy_record(&skewed, &aligned_rotations()).unwrap();
    assert!(!rec.pass);
}

#[test]
fn product_state_violates_first_statement() {
    let rec = hardy_record(&StateVector::zero(8).unwrap(), &aligned_rotations()).unwrap();
    assert!((rec.p_fafb - 1.0).abs() <= 1e-12);
    assert!(!rec.pass);
}
