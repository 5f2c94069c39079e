//! Gadgets that turn a two-qubit interaction with local parts into a pure
//! 1-local term on a target qubit: a few gadget qubits are pinned into the
//! nondegenerate ground state of a heavy combination, and one more copy of the
//! interaction couples the last gadget qubit to the target.
//!
//! The target is qubit 0; gadget qubits follow.

use crate::error::{Error, Result};
use crate::instance::HamiltonianInstance;
use crate::linalg::eigh;
use crate::pauli::PauliTable;

use super::{first_order, Block, FirstOrder, GadgetStep, StepKind};

#[derive(Clone, Debug, PartialEq)]
pub enum ExtractFamily {
    /// αXX + βYY + γZZ + A⊗I + I⊗A with at least two of α, β, γ nonzero;
    /// `a` holds the X, Y, Z coefficients of A.
    Symmetric2Axis { alpha: f64, beta: f64, gamma: f64, a: [f64; 3] },
    /// XZ − ZX + A⊗I − I⊗A.
    Skew { a: [f64; 3] },
    /// XX + α(XI + IX) + β(ZI + IZ) with α ≠ 0.
    XxFields { alpha: f64, beta: f64 },
    /// XX + β(ZI + IZ) with β ≠ 0.
    XxZField { beta: f64 },
    /// The pair XX and α(XI − IX) + β(ZI − IZ) with β ≠ 0.
    SkewFields { alpha: f64, beta: f64 },
}

impl ExtractFamily {
    pub fn variant(&self) -> &'static str {
        match self {
            ExtractFamily::Symmetric2Axis { .. } => "SYMMETRIC_2AXIS",
            ExtractFamily::Skew { .. } => "SKEW",
            ExtractFamily::XxFields { .. } => "XX_FIELDS",
            ExtractFamily::XxZField { .. } => "XX_ZFIELD",
            ExtractFamily::SkewFields { .. } => "SKEW_FIELDS",
        }
    }
}

fn local(a: [f64; 3], sign_second: f64) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for (p, c) in ["X", "Y", "Z"].iter().zip(a) {
        out.push((format!("{p}I"), c));
        out.push((format!("I{p}"), sign_second * c));
    }
    out
}

fn table(entries: &[(String, f64)]) -> PauliTable {
    let refs: Vec<(&str, f64)> = entries.iter().map(|(l, c)| (l.as_str(), *c)).collect();
    PauliTable::terms(&refs).pruned(0.0)
}

struct Layout {
    /// Named tables used by the gadget and the probe.
    tables: Vec<(&'static str, PauliTable)>,
    /// Heavy terms on gadget qubits (numbered from 1): (table, qubits, sign).
    gadget: Vec<(&'static str, [usize; 2], f64)>,
    gadget_qubits: usize,
    probe: (&'static str, [usize; 2]),
}

fn layout(family: &ExtractFamily) -> Result<Layout> {
    let fail = |m: &str| Err(Error::VariantPreconditionFailed(m.to_string()));
    Ok(match *family {
        ExtractFamily::Symmetric2Axis { alpha, beta, gamma, a } => {
            if [alpha, beta, gamma].iter().filter(|v| **v != 0.0).count() < 2 {
                return fail("at least two of alpha, beta, gamma must be nonzero");
            }
            let mut e = vec![("XX".to_string(), alpha), ("YY".to_string(), beta), ("ZZ".to_string(), gamma)];
            e.extend(local(a, 1.0));
            Layout {
                tables: vec![("h", table(&e))],
                gadget: vec![("h", [1, 2], 1.0), ("h", [3, 4], 1.0), ("h", [1, 3], -1.0), ("h", [2, 4], -1.0)],
                gadget_qubits: 4,
                probe: ("h", [4, 0]),
            }
        }
        ExtractFamily::Skew { a } => {
            let mut e = vec![("XZ".to_string(), 1.0), ("ZX".to_string(), -1.0)];
            e.extend(local(a, -1.0));
            Layout {
                tables: vec![("h", table(&e))],
                gadget: vec![("h", [1, 2], 1.0), ("h", [2, 3], 1.0), ("h", [3, 4], 1.0), ("h", [4, 1], 1.0)],
                gadget_qubits: 4,
                probe: ("h", [4, 0]),
            }
        }
        ExtractFamily::XxFields { alpha, beta } => {
            if alpha == 0.0 {
                return fail("alpha must be nonzero");
            }
            let e = vec![
                ("XX".to_string(), 1.0),
                ("XI".to_string(), alpha),
                ("IX".to_string(), alpha),
                ("ZI".to_string(), beta),
                ("IZ".to_string(), beta),
            ];
            Layout {
                tables: vec![("h", table(&e))],
                gadget: vec![("h", [1, 2], 1.0), ("h", [2, 3], -1.0)],
                gadget_qubits: 3,
                probe: ("h", [3, 0]),
            }
        }
        ExtractFamily::XxZField { beta } => {
            if beta == 0.0 {
                return fail("beta must be nonzero");
            }
            let e = vec![("XX".to_string(), 1.0), ("ZI".to_string(), beta), ("IZ".to_string(), beta)];
            Layout { tables: vec![("h", table(&e))], gadget: vec![("h", [1, 2], 1.0)], gadget_qubits: 2, probe: ("h", [2, 0]) }
        }
        ExtractFamily::SkewFields { alpha, beta } => {
            if beta == 0.0 {
                return fail("beta must be nonzero");
            }
            let e = vec![("XI".to_string(), alpha), ("IX".to_string(), -alpha), ("ZI".to_string(), beta), ("IZ".to_string(), -beta)];
            Layout {
                tables: vec![("h", PauliTable::terms(&[("XX", 1.0)])), ("hp", table(&e))],
                gadget: vec![("hp", [1, 2], 1.0)],
                gadget_qubits: 2,
                probe: ("h", [2, 0]),
            }
        }
    })
}

/// Spectrum and eigenvectors of the unweighted gadget on its own qubits.
pub fn gadget_spectrum(family: &ExtractFamily) -> Result<(Vec<f64>, crate::linalg::CMat)> {
    let l = layout(family)?;
    let mut g = HamiltonianInstance::new(l.gadget_qubits);
    for (name, t) in &l.tables {
        g.add_interaction(name, t.clone());
    }
    for (name, q, s) in &l.gadget {
        g.add_term(name, &[q[0] - 1, q[1] - 1], *s);
    }
    Ok(eigh(g.assemble()?.dense()))
}

pub fn extract_local(family: &ExtractFamily, delta: f64) -> Result<GadgetStep> {
    let l = layout(family)?;
    let (vals, vecs) = gadget_spectrum(family)?;
    let gap = vals[1] - vals[0];
    if gap <= 1e-9 * vals[0].abs().max(1.0) {
        return Err(Error::VariantPreconditionFailed("gadget ground state is degenerate".into()));
    }
    let n = l.gadget_qubits + 1;
    let mut heavy = HamiltonianInstance::new(n);
    let mut v = HamiltonianInstance::new(n);
    for (name, t) in &l.tables {
        heavy.add_interaction(name, t.clone());
        v.add_interaction(name, t.clone());
    }
    for (name, q, s) in &l.gadget {
        heavy.add_term(name, q, s / gap);
    }
    heavy.interactions.retain(|k, _| heavy.terms.iter().any(|t| &t.id == k));
    v.add_term(l.probe.0, &l.probe.1, 1.0);
    v.interactions.retain(|k, _| v.terms.iter().any(|t| &t.id == k));
    let blocks = vec![Block::identity(0), Block { qubits: (1..n).collect(), basis: vecs.columns(0, 1).into_owned() }];
    first_order(FirstOrder {
        kind: StepKind::ExtractLocal,
        delta,
        v: &v,
        v_constant: 0.0,
        heavy: &heavy,
        heavy_constant: -vals[0] / gap,
        blocks,
        description: format!("{} gadget qubits 1..{} fixed to the gadget ground state; target is qubit 0", family.variant(), n - 1),
        new_qubits: l.gadget_qubits,
        prefix: "local",
    })
}
