//! Ground-energy-preserving rewrites that trade 1-local terms for couplings to
//! one extra qubit.
//!
//! With an ancilla carrying P, a Hamiltonian H_rest + P_anc·Σ c_k P_k splits into
//! the two sectors H_rest ± Σ c_k P_k. When a global conjugation flips every
//! P_k while fixing H_rest, both sectors are unitarily equivalent to the
//! original, so the lowest eigenvalue is unchanged.

use crate::error::{Error, Result};
use crate::instance::HamiltonianInstance;
use crate::pauli::PauliTable;

use super::{pauli_strings, Strings};

fn describe(key: &[(usize, u8)]) -> String {
    let letters = ['I', 'X', 'Y', 'Z'];
    let label: String = key.iter().map(|(_, d)| letters[*d as usize]).collect();
    let qubits: Vec<String> = key.iter().map(|(q, _)| q.to_string()).collect();
    format!("{label} on qubits ({})", qubits.join(", "))
}

/// Rebuild an instance from strings drawn from {I, X, Z, XX, ZZ}.
fn build(n: usize, strings: &Strings, thresholds: Option<crate::instance::Thresholds>) -> HamiltonianInstance {
    let mut inst = HamiltonianInstance::new(n);
    let names = |key: &[(usize, u8)]| match key {
        [] => ("id", "I"),
        [(_, 1)] => ("x", "X"),
        [(_, 3)] => ("z", "Z"),
        [_, (_, 1)] => ("xx", "XX"),
        _ => ("zz", "ZZ"),
    };
    for (key, &w) in strings {
        if w == 0.0 {
            continue;
        }
        let (name, label) = names(key);
        if !inst.interactions.contains_key(name) {
            inst.add_interaction(name, PauliTable::terms(&[(label, 1.0)]));
        }
        let qubits: Vec<usize> = if key.is_empty() { vec![0] } else { key.iter().map(|(q, _)| *q).collect() };
        inst.add_term(name, &qubits, w);
    }
    inst.thresholds = thresholds;
    inst
}

/// Replace each 1-local Z (with ZZ couplings) or X (with XX couplings) by a
/// coupling of the same Pauli to a fresh last qubit. The instance must be
/// built from {ZZ, X, Z} or {XX, Z, X}; without convertible terms it is
/// returned unchanged.
pub fn ancilla_x_trick(inst: &HamiltonianInstance) -> Result<HamiltonianInstance> {
    let strings = pauli_strings(inst);
    let (mut has_zz, mut has_xx) = (false, false);
    for (key, w) in &strings {
        if w.abs() <= 1e-14 {
            continue;
        }
        match key.as_slice() {
            [] | [(_, 1)] | [(_, 3)] => {}
            [(_, 3), (_, 3)] => has_zz = true,
            [(_, 1), (_, 1)] => has_xx = true,
            _ => return Err(Error::SymmetryPreconditionFailed(format!("term {} breaks the sector symmetry", describe(key)))),
        }
    }
    if has_zz && has_xx {
        return Err(Error::SymmetryPreconditionFailed("both XX and ZZ couplings present".into()));
    }
    let convert: u8 = if has_xx { 1 } else { 3 };
    if !strings.iter().any(|(k, w)| matches!(k.as_slice(), [(_, d)] if *d == convert) && *w != 0.0) {
        return Ok(inst.clone());
    }
    let anc = inst.n;
    let mut out = Strings::new();
    for (key, &w) in &strings {
        match key.as_slice() {
            [(q, d)] if *d == convert => {
                out.insert(vec![(*q, convert), (anc, convert)], w);
            }
            _ => {
                out.insert(key.clone(), w);
            }
        }
    }
    Ok(build(inst.n + 1, &out, inst.thresholds.clone()))
}

#[derive(Clone, Debug)]
pub struct TimRewrite {
    pub instance: HamiltonianInstance,
    /// Angle φ per qubit: the field is conjugated by exp(−iφZ/2) (0 where no transverse field).
    pub rotations: Vec<f64>,
}

/// ZZ couplings plus arbitrary 1-local fields → transverse Ising form {ZZ, X}:
/// rotate each γX + δY into −√(γ² + δ²)X about Z, then move Z fields onto an ancilla.
pub fn tim_rewrite(inst: &HamiltonianInstance) -> Result<TimRewrite> {
    let strings = pauli_strings(inst);
    let mut fields = vec![[0.0f64; 3]; inst.n];
    let mut rest = Strings::new();
    for (key, &w) in &strings {
        if w.abs() <= 1e-14 {
            continue;
        }
        match key.as_slice() {
            [(q, d)] => fields[*q][(*d - 1) as usize] += w,
            [] | [(_, 3), (_, 3)] => {
                rest.insert(key.clone(), w);
            }
            _ => return Err(Error::NotZZForm(describe(key))),
        }
    }
    let mut rotations = vec![0.0; inst.n];
    for (q, [gx, gy, gz]) in fields.iter().enumerate() {
        let r = gx.hypot(*gy);
        if r > 0.0 {
            rest.insert(vec![(q, 1)], -r);
            rotations[q] = std::f64::consts::PI - gy.atan2(*gx);
        }
        if *gz != 0.0 {
            rest.insert(vec![(q, 3)], *gz);
        }
    }
    let rotated = build(inst.n, &rest, inst.thresholds.clone());
    Ok(TimRewrite { instance: ancilla_x_trick(&rotated)?, rotations })
}
