//! Exactly solvable reference models used as ground truth: the Lieb–Mattis
//! bipartite Heisenberg model, the complete-graph Heisenberg model and the
//! complete-graph XY model restricted to Dicke sectors.
//!
//! Three closed forms differ from their commonly quoted printed versions; the
//! printed values are exposed next to the derived ones so reports can show both.

use serde::Serialize;

use crate::instance::HamiltonianInstance;
use crate::linalg::CVec;
use crate::pauli::PauliTable;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn heisenberg_table() -> PauliTable {
    PauliTable::terms(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)])
}

pub fn xy_table() -> PauliTable {
    PauliTable::terms(&[("XX", 1.0), ("YY", 1.0)])
}

/// Uniform superposition of the weight-k strings on n qubits.
pub fn dicke_state(n: usize, k: usize) -> CVec {
    let amp = 1.0 / binomial(n, k).sqrt();
    CVec::from_fn(1 << n, |i, _| if (i as u32).count_ones() as usize == k { crate::linalg::re(amp) } else { crate::linalg::ZERO })
}

/// (1/√(n+1)) Σ_k (−1)^k |ψ_k⟩_A |ψ_{n−k}⟩_B with block A on qubits 0..n.
pub fn lieb_mattis_state(n: usize) -> CVec {
    assert!(n >= 1);
    let norm = 1.0 / ((n + 1) as f64).sqrt();
    CVec::from_fn(1 << (2 * n), |i, _| {
        let a = (i >> n).count_ones() as usize;
        let b = (i & ((1 << n) - 1)).count_ones() as usize;
        if a + b != n {
            return crate::linalg::ZERO;
        }
        let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
        crate::linalg::re(sign * norm / (binomial(n, a) * binomial(n, b)).sqrt())
    })
}

/// Heisenberg couplings between every pair across blocks {0..n} and {n..2n}.
pub fn lieb_mattis_instance(n: usize) -> HamiltonianInstance {
    let mut inst = HamiltonianInstance::new(2 * n).with_interaction("heisenberg", heisenberg_table());
    for i in 0..n {
        for j in n..2 * n {
            inst.add_term("heisenberg", &[i, j], 1.0);
        }
    }
    inst
}

pub fn lieb_mattis_ground_energy(n: usize) -> f64 {
    let n = n as f64;
    -n * (n + 2.0)
}

/// ⟨φ_LM|F_ij|φ_LM⟩, evaluated from the state vector.
pub fn lieb_mattis_swap_expectation(n: usize, i: usize, j: usize) -> f64 {
    assert!(i != j && i < 2 * n && j < 2 * n);
    let phi = lieb_mattis_state(n);
    let nq = 2 * n;
    let (bi, bj) = (1usize << (nq - 1 - i), 1usize << (nq - 1 - j));
    let mut acc = 0.0;
    for (idx, amp) in phi.iter().enumerate() {
        let swapped = if (idx & bi != 0) != (idx & bj != 0) { idx ^ bi ^ bj } else { idx };
        acc += (phi[swapped].conj() * amp).re;
    }
    acc
}

/// The cross-block correlator as usually printed.
pub fn lieb_mattis_swap_printed(n: usize) -> f64 {
    -2.0 / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpinLevel {
    pub s: f64,
    pub energy: f64,
}

/// Levels of Σ_{i<j} (XX+YY+ZZ) on m qubits: 2s(s+1) − 3m/2, ascending.
pub fn complete_heisenberg_spectrum(m: usize) -> Vec<SpinLevel> {
    assert!((1..=14).contains(&m));
    let top = m as f64 / 2.0;
    let mut s = top - (top.floor());
    let mut out = Vec::new();
    while s <= top + 1e-12 {
        out.push(SpinLevel { s, energy: 2.0 * s * (s + 1.0) - 1.5 * m as f64 });
        s += 1.0;
    }
    out
}

/// The additive constant as usually printed (−3m/4 instead of −3m/2).
pub fn complete_heisenberg_printed_constant(m: usize) -> f64 {
    -0.75 * m as f64
}

pub fn complete_graph_instance(m: usize, table: PauliTable, name: &str) -> HamiltonianInstance {
    let mut inst = HamiltonianInstance::new(m).with_interaction(name, table);
    for i in 0..m {
        for j in i + 1..m {
            inst.add_term(name, &[i, j], 1.0);
        }
    }
    inst
}

/// Eigenvalue 2k(n−k) of the complete-graph XY operator on the weight-k Dicke state.
pub fn xy_sector_eigenvalue(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    2.0 * (k * (n - k)) as f64
}

/// Largest complete-graph XY eigenvalue: n²/2 for even n.
pub fn xy_maximum(n: usize) -> f64 {
    (0..=n).map(|k| xy_sector_eigenvalue(n, k)).fold(f64::NEG_INFINITY, f64::max)
}

pub fn xy_maximum_printed(n: usize) -> f64 {
    (n * n) as f64 / 4.0
}
