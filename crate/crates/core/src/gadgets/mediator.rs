//! Second-order mediator gadgets: a fresh qubit b penalized on ψ couples to a
//! through √Δ·H1 and to c through √Δ·H2. Eliminating b leaves an a–c
//! interaction of order one.
//!
//! The first-order terms √Δ⟨ψ⊥|B|ψ⊥⟩A (and the same for C, D) would dominate
//! the effective Hamiltonian, so by default they are cancelled with 1-local
//! fields on a and c. What remains at second order is −W†W with
//! W = Σ ⟨ψ|B|ψ⊥⟩A_a + Σ ⟨ψ|C|ψ⊥⟩D_c.

use crate::error::{Error, Result};
use crate::instance::HamiltonianInstance;
use crate::linalg::{kron, sigma_dyn, CMat, C64, ZERO};
use crate::pauli::{digit, pauli_decompose, PauliTable};

use super::{
    combine, instance_norm, normalized, orthogonal, projector_table, Block, Embedding, GadgetStep, StepKind,
};

#[derive(Clone, Debug)]
pub struct MediatorSpec {
    /// Two-qubit interaction on (a, b).
    pub h1: PauliTable,
    /// Two-qubit interaction on (b, c).
    pub h2: PauliTable,
    pub psi: [C64; 2],
    pub a: usize,
    pub c: usize,
    pub compensate: bool,
}

impl MediatorSpec {
    pub fn new(h1: PauliTable, h2: PauliTable, psi: [C64; 2], a: usize, c: usize) -> Self {
        MediatorSpec { h1, h2, psi, a, c, compensate: true }
    }
}

/// ⟨u|σ_d|v⟩.
fn elem(u: [C64; 2], d: u8, v: [C64; 2]) -> C64 {
    let s = sigma_dyn(d);
    let mut acc = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            acc += u[i].conj() * s[(i, j)] * v[j];
        }
    }
    acc
}

/// For a table on (x, y), Σ_{P,Q} h_PQ ⟨u|Q_y|v⟩ P, as a 2×2 matrix on x (mediator
/// at position `mid` in the pair).
fn contract(h: &PauliTable, mid: usize, u: [C64; 2], v: [C64; 2]) -> CMat {
    let mut out = CMat::zeros(2, 2);
    for (code, c) in h.iter() {
        let (outer, inner) = if mid == 1 { (digit(code, 2, 0), digit(code, 2, 1)) } else { (digit(code, 2, 1), digit(code, 2, 0)) };
        out += sigma_dyn(outer) * (elem(u, inner, v) * c);
    }
    out
}

fn hermitian_table(m: &CMat) -> Result<PauliTable> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(pauli_decompose(&h, 1)?.pruned(1e-14))
}

/// Error estimate for one mediator, scaling as Δ^{-1/2}; not a proven bound.
fn error_estimate(h1: f64, h2: f64, else_norm: f64, strength: f64) -> f64 {
    let s = h1 + h2;
    MEDIATOR_CONSTANT * s * s * (s + else_norm) / strength.sqrt()
}

/// Empirical prefactor of the mediator error estimate.
pub const MEDIATOR_CONSTANT: f64 = 4.0;

pub fn mediator_gadget(h_else: &HamiltonianInstance, spec: &MediatorSpec, delta: f64) -> Result<GadgetStep> {
    mediator_parallel(h_else, std::slice::from_ref(spec), delta)
}

/// Several mediators at once, each with its own fresh qubit (appended after
/// the existing register in order). Δ = δ²·max(‖H_else‖, 1)^{3/2}.
pub fn mediator_parallel(h_else: &HamiltonianInstance, specs: &[MediatorSpec], delta: f64) -> Result<GadgetStep> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::VariantPreconditionFailed(format!("delta = {delta} must be positive")));
    }
    let n = h_else.n;
    for s in specs {
        if s.a >= n || s.c >= n {
            return Err(Error::WrongArity { expected: n, got: s.a.max(s.c) + 1 });
        }
        if s.a == s.c {
            return Err(Error::VariantPreconditionFailed("mediated qubits must differ".into()));
        }
        if s.h1.k() != 2 || s.h2.k() != 2 {
            return Err(Error::WrongArity { expected: 2, got: if s.h1.k() != 2 { s.h1.k() } else { s.h2.k() } });
        }
    }
    let total = n + specs.len();
    let else_norm = instance_norm(h_else)?;
    let strength = delta * delta * else_norm.max(1.0).powf(1.5);
    let root = strength.sqrt();

    let mut added = HamiltonianInstance::new(total);
    let mut eff = HamiltonianInstance::new(n);
    let mut blocks: Vec<Block> = (0..n).map(Block::identity).collect();
    let mut error = 0.0;
    for (g, s) in specs.iter().enumerate() {
        let b = n + g;
        let psi = normalized(s.psi)?;
        let perp = orthogonal(psi);
        let name = |x: &str| format!("med{g}_{x}");
        added.add_interaction(&name("h1"), s.h1.clone());
        added.add_term(&name("h1"), &[s.a, b], root);
        added.add_interaction(&name("h2"), s.h2.clone());
        added.add_term(&name("h2"), &[b, s.c], root);
        added.add_interaction(&name("pin"), projector_table(psi));
        added.add_term(&name("pin"), &[b], strength);

        // First-order pieces ⟨ψ⊥|·|ψ⊥⟩ on a and c.
        let first_a = hermitian_table(&contract(&s.h1, 1, perp, perp))?;
        let first_c = hermitian_table(&contract(&s.h2, 0, perp, perp))?;
        if s.compensate {
            if !first_a.is_empty() {
                added.add_interaction(&name("comp_a"), first_a.scaled(-1.0));
                added.add_term(&name("comp_a"), &[s.a], root);
            }
            if !first_c.is_empty() {
                added.add_interaction(&name("comp_c"), first_c.scaled(-1.0));
                added.add_term(&name("comp_c"), &[s.c], root);
            }
        } else {
            if !first_a.is_empty() {
                eff.add_interaction(&name("first_a"), first_a);
                eff.add_term(&name("first_a"), &[s.a], root);
            }
            if !first_c.is_empty() {
                eff.add_interaction(&name("first_c"), first_c);
                eff.add_term(&name("first_c"), &[s.c], root);
            }
        }

        // Second order: −W†W on (a, c).
        let k = contract(&s.h1, 1, psi, perp);
        let m = contract(&s.h2, 0, psi, perp);
        let id = CMat::identity(2, 2);
        let w = kron(&k, &id) + kron(&id, &m);
        let second = -(w.adjoint() * &w);
        let table = pauli_decompose(&second, 2)?.pruned(1e-14);
        if !table.is_empty() {
            eff.add_interaction(&name("second"), table);
            eff.add_term(&name("second"), &[s.a, s.c], 1.0);
        }
        blocks.push(Block { qubits: vec![b], basis: super::column(perp) });
        let h1n = crate::linalg::op_norm(&s.h1.to_dense());
        let h2n = crate::linalg::op_norm(&s.h2.to_dense());
        error += error_estimate(h1n, h2n, else_norm, strength);
    }
    let mut base = h_else.clone();
    base.n = total;
    let physical = combine(&base, &added)?;
    let predicted = combine(h_else, &eff)?;
    Ok(GadgetStep {
        kind: StepKind::Mediator,
        delta,
        delta_strength: strength,
        added_terms: added.terms,
        new_qubits: specs.len(),
        physical,
        predicted_effective: predicted,
        energy_offset: 0.0,
        predicted_error: error,
        error_asserted: false,
        cutoff: strength / 2.0,
        embedding: Embedding {
            description: format!("original {n} qubits unchanged; each mediator qubit fixed to the state orthogonal to its penalized one"),
            physical_qubits: total,
            blocks,
        },
    })
}

/// Mediators realizing every 2-local string of `inst` as w·P_a Q_c through
/// H1 = s·P⊗X, H2 = ∓s·X⊗Q with s = √(|w|/2) and ψ = |1⟩. Everything else
/// stays in H_else.
pub fn product_mediators(inst: &HamiltonianInstance, delta: f64) -> Result<GadgetStep> {
    let strings = super::pauli_strings(inst);
    let mut rest = super::Strings::new();
    let mut specs = Vec::new();
    for (key, &w) in &strings {
        if w.abs() <= 1e-14 {
            continue;
        }
        if key.len() > 2 {
            return Err(Error::UnsupportedLogicalTerm(format!("{}-local string", key.len())));
        }
        if key.len() < 2 {
            rest.insert(key.clone(), w);
            continue;
        }
        let letters = ['I', 'X', 'Y', 'Z'];
        let (p, q) = (letters[key[0].1 as usize], letters[key[1].1 as usize]);
        let s = (w.abs() / 2.0).sqrt();
        let h1 = PauliTable::terms(&[(&format!("{p}X"), s)]);
        let h2 = PauliTable::terms(&[(&format!("X{q}"), -w.signum() * s)]);
        specs.push(MediatorSpec::new(h1, h2, super::one_state(), key[0].0, key[1].0));
    }
    let mut h_else = super::instance_from_strings(inst.n, &rest, "else");
    h_else.thresholds = inst.thresholds.clone();
    let mut step = mediator_parallel(&h_else, &specs, delta)?;
    step.predicted_effective.thresholds = inst.thresholds.clone();
    Ok(step)
}
