#![allow(dead_code)]

use eta_core::config::DEFAULT_NULLSPACE_TOL;
use eta_core::eta::{solve_eta, EtaSolution};
use eta_core::linalg::{inner, C64};
use eta_core::spin::StateVector;

pub fn eta() -> EtaSolution {
    solve_eta(DEFAULT_NULLSPACE_TOL).expect("unique solution")
}

/// |η⟩ + eps·w renormalized, with w a unit vector in the singlet⊗singlet plane
/// orthogonal to |η⟩.
pub fn perturbed_eta(eps: f64) -> StateVector {
    let sol = eta();
    let basis = eta_core::spin::four_qubit_singlet_basis().unwrap();
    // Gram-Schmidt (0,0,0,1) against the coefficient vector.
    let c = sol.coefficients;
    let e = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let proj = inner(&c, &e);
    let mut w: Vec<C64> = e.iter().zip(&c).map(|(x, y)| x - proj * y).collect();
    let n = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    w.iter_mut().for_each(|x| *x /= n);
    let mixed: [C64; 4] = std::array::from_fn(|k| c[k] + w[k] * eps);
    StateVector::normalized(8, eta_core::eta::embed(&basis, &basis, &mixed)).unwrap()
}
