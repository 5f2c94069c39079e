//! Fixtures shared by the criterion benches.

use hamclass_core::linalg::CVec;
use hamclass_core::oracles::heisenberg_table;
use hamclass_core::HamiltonianInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Heisenberg couplings around a ring of `n` qubits.
pub fn heisenberg_ring(n: usize) -> HamiltonianInstance {
    let mut inst = HamiltonianInstance::new(n).with_interaction("h", heisenberg_table());
    for i in 0..n {
        inst.add_term("h", &[i, (i + 1) % n], 1.0);
    }
    inst
}

pub fn random_vector(dim: usize) -> CVec {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    CVec::from_fn(dim, |_, _| hamclass_core::linalg::C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}
