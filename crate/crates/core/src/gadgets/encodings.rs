//! Encodings of {X, Z, XX, ZZ} instances into a single symmetric interaction.
//!
//! Each logical qubit becomes a triple of physical qubits pinned into a
//! 4-dimensional space that factors as logical ⊗ primed. A second pinning on
//! the primed qubits selects a fixed entangled state φ, and logical XX / ZZ
//! couplings are divided by ⟨φ|P'|φ⟩ so they survive the projection.
//!
//! Encoded layout: triple t on physical qubits 3t..3t+3; in the intermediate
//! register logical qubit t sits at 2t and its primed partner at 2t+1.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::instance::HamiltonianInstance;
use crate::linalg::{re, CMat, CVec};
use crate::oracles::{dicke_state, heisenberg_table, lieb_mattis_state, xy_table};
use crate::pauli::PauliTable;

use super::{first_order, pauli_strings, Block, FirstOrder, GadgetPlan, StepKind, Strings};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Heisenberg,
    Xy,
    Xzskew,
}

fn ket(bits: &str) -> usize {
    usize::from_str_radix(bits, 2).unwrap()
}

/// Columns e1..e4 of S₂ (singlet on 1,2 times |0⟩, |1⟩, then the two
/// remaining states), ordered so that e_{2l+p} is |l⟩ logical ⊗ |p⟩ primed.
pub fn heisenberg_s2_basis() -> CMat {
    let s = 1.0 / SQRT_2;
    let a = (2.0f64 / 3.0).sqrt();
    let b = 1.0 / 6f64.sqrt();
    let cols: [&[(&str, f64)]; 4] = [
        &[("010", s), ("100", -s)],
        &[("011", s), ("101", -s)],
        &[("001", -a), ("010", b), ("100", b)],
        &[("110", a), ("011", -b), ("101", -b)],
    ];
    basis_from(&cols)
}

/// The two ground states of the directed triangle H₁₂ + H₂₃ + H₃₁ for XZ − ZX.
pub fn xzskew_basis() -> CMat {
    let r3 = 3f64.sqrt();
    let n = 1.0 / (2.0 * r3);
    let cols: [&[(&str, f64)]; 2] = [
        &[("001", -n), ("010", 2.0 * n), ("011", -r3 * n), ("100", -n), ("110", r3 * n)],
        &[("001", -r3 * n), ("011", -n), ("100", r3 * n), ("101", 2.0 * n), ("110", -n)],
    ];
    basis_from(&cols)
}

fn basis_from(cols: &[&[(&str, f64)]]) -> CMat {
    let mut m = CMat::zeros(8, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (bits, v) in col.iter() {
            m[(ket(bits), j)] = re(*v);
        }
    }
    m
}

/// Physical couplings of one interaction, accumulated per qubit pair.
struct Couplings {
    antisymmetric: bool,
    map: BTreeMap<(usize, usize), f64>,
    constant: f64,
}

impl Couplings {
    fn new(antisymmetric: bool) -> Self {
        Couplings { antisymmetric, map: BTreeMap::new(), constant: 0.0 }
    }

    fn add(&mut self, a: usize, b: usize, w: f64) {
        let (key, w) = if a < b { ((a, b), w) } else if self.antisymmetric { ((b, a), -w) } else { ((b, a), w) };
        *self.map.entry(key).or_insert(0.0) += w;
    }

    fn instance(&self, n: usize, name: &str, table: &PauliTable) -> HamiltonianInstance {
        let mut inst = HamiltonianInstance::new(n).with_interaction(name, table.clone());
        for (&(a, b), &w) in &self.map {
            if w != 0.0 {
                inst.add_term(name, &[a, b], w);
            }
        }
        inst
    }
}

/// Logical terms accepted by the triple encodings.
enum LogicalTerm {
    Constant(f64),
    X(usize, f64),
    Z(usize, f64),
    XX(usize, usize, f64),
    ZZ(usize, usize, f64),
}

fn describe(key: &[(usize, u8)]) -> String {
    let letters = ['I', 'X', 'Y', 'Z'];
    let label: String = key.iter().map(|(_, d)| letters[*d as usize]).collect();
    let qubits: Vec<String> = key.iter().map(|(q, _)| q.to_string()).collect();
    format!("{label} on qubits ({})", qubits.join(", "))
}

fn logical_terms(strings: &Strings) -> Result<Vec<LogicalTerm>> {
    let mut out = Vec::new();
    for (key, &w) in strings {
        if w.abs() <= 1e-14 {
            continue;
        }
        let term = match key.as_slice() {
            [] => LogicalTerm::Constant(w),
            [(q, 1)] => LogicalTerm::X(*q, w),
            [(q, 3)] => LogicalTerm::Z(*q, w),
            [(i, 1), (j, 1)] => LogicalTerm::XX(*i, *j, w),
            [(i, 3), (j, 3)] => LogicalTerm::ZZ(*i, *j, w),
            _ => return Err(Error::UnsupportedLogicalTerm(describe(key))),
        };
        out.push(term);
    }
    Ok(out)
}

/// Per-interaction constants of a triple encoding with primed qubits.
struct TripleFamily {
    name: &'static str,
    table: PauliTable,
    kind: StepKind,
    /// Heavy term per triple: pin_weight·(H₁₂ + H₁₃ + H₂₃) + pin_constant.
    pin_weight: f64,
    pin_constant: f64,
    /// Z ⊗ I = z_weight·H₁₂ + z_constant.
    z_weight: f64,
    z_constant: f64,
    /// X ⊗ I = x_weight·(H₁₃ − H₂₃).
    x_weight: f64,
}

impl TripleFamily {
    fn heisenberg() -> Self {
        TripleFamily {
            name: "heisenberg",
            table: heisenberg_table(),
            kind: StepKind::EncodeHeisenberg,
            pin_weight: 1.0 / 6.0,
            pin_constant: 0.5,
            z_weight: -0.5,
            z_constant: -0.5,
            x_weight: 1.0 / (2.0 * 3f64.sqrt()),
        }
    }

    fn xy() -> Self {
        TripleFamily {
            name: "xy",
            table: xy_table(),
            kind: StepKind::EncodeXy,
            pin_weight: 0.5,
            pin_constant: 1.0,
            z_weight: -0.75,
            z_constant: -0.5,
            x_weight: 3f64.sqrt() / 4.0,
        }
    }

    fn z(&self, c: &mut Couplings, t: usize, w: f64) {
        c.add(3 * t, 3 * t + 1, w * self.z_weight);
        c.constant += w * self.z_constant;
    }

    fn x(&self, c: &mut Couplings, t: usize, w: f64) {
        c.add(3 * t, 3 * t + 2, w * self.x_weight);
        c.add(3 * t + 1, 3 * t + 2, -w * self.x_weight);
    }

    /// Cross-triple pattern: Σ_ab pattern[a][b]·H_{3i+a, 3j+b}.
    fn cross(c: &mut Couplings, i: usize, j: usize, pattern: &[[f64; 3]; 3], w: f64) {
        for (a, row) in pattern.iter().enumerate() {
            for (b, p) in row.iter().enumerate() {
                if *p != 0.0 {
                    c.add(3 * i + a, 3 * j + b, w * p);
                }
            }
        }
    }
}

/// XX ⊗ P' = (3/4)(H₁₄ − H₁₅ − H₂₄ + H₂₅).
const XX_PATTERN: [[f64; 3]; 3] = [[0.75, -0.75, 0.0], [-0.75, 0.75, 0.0], [0.0, 0.0, 0.0]];
/// ZZ ⊗ P' = (1/4)(H₁₄ + H₁₅ − 2H₁₆ + H₂₄ + H₂₅ − 2H₂₆ − 2H₃₄ − 2H₃₅ + 4H₃₆).
const ZZ_PATTERN: [[f64; 3]; 3] = [[0.25, 0.25, -0.5], [0.25, 0.25, -0.5], [-0.5, -0.5, 1.0]];
/// I ⊗ P' = sum of all nine cross couplings.
const ID_PATTERN: [[f64; 3]; 3] = [[1.0; 3]; 3];

/// Second-stage pinning on the primed qubits: heavy = Σ w_ij P'_{i'j'} + constant,
/// with null vector φ.
struct Deletion {
    pairs: Vec<(usize, usize, f64)>,
    constant: f64,
    phi: CVec,
}

fn lieb_mattis_deletion(m: usize) -> Deletion {
    let n = m / 2;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in n..m {
            pairs.push((i, j, 0.25));
        }
    }
    Deletion { pairs, constant: (n * (n + 2)) as f64 / 4.0, phi: lieb_mattis_state(n) }
}

fn xy_deletion(m: usize) -> Deletion {
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            pairs.push((i, j, -0.5));
        }
    }
    Deletion { pairs, constant: (m * m) as f64 / 4.0, phi: dicke_state(m, m / 2) }
}

/// ⟨φ| P'_{ij} |φ⟩ on the primed register.
fn pair_expectation(phi: &CVec, m: usize, table: &PauliTable, i: usize, j: usize) -> Result<f64> {
    let op = HamiltonianInstance::new(m).with_interaction("p", table.clone()).with_term("p", &[i, j], 1.0).assemble()?;
    Ok(phi.dotc(&op.apply(phi)).re)
}

fn four_qubit(prefix: &str, p: &PauliTable) -> PauliTable {
    let mut out = PauliTable::zero(4);
    for (lab, c) in p.labels() {
        let full = format!("{prefix}{lab}");
        out = out.plus(&PauliTable::terms(&[(full.as_str(), c)]));
    }
    out
}

fn encode_triples(logical: &HamiltonianInstance, family: TripleFamily, deletion: fn(usize) -> Deletion, delta: f64) -> Result<GadgetPlan> {
    let terms = logical_terms(&pauli_strings(logical))?;
    if terms.iter().all(|t| matches!(t, LogicalTerm::Constant(_))) {
        return Ok(GadgetPlan::from_steps(logical.clone(), Vec::new()));
    }
    let m = logical.n + logical.n % 2;
    let del = deletion(m);
    let prime = family.table.clone();

    // Stage 2 register: logical t at 2t, primed t at 2t + 1.
    let mut v_enc = HamiltonianInstance::new(2 * m)
        .with_interaction("x", PauliTable::terms(&[("X", 1.0)]))
        .with_interaction("z", PauliTable::terms(&[("Z", 1.0)]))
        .with_interaction("xx_enc", four_qubit("XX", &prime))
        .with_interaction("zz_enc", four_qubit("ZZ", &prime))
        .with_interaction("id", PauliTable::terms(&[("I", 1.0)]));
    let mut divisors = BTreeMap::new();
    for t in &terms {
        if let LogicalTerm::XX(i, j, _) | LogicalTerm::ZZ(i, j, _) = *t {
            if !divisors.contains_key(&(i, j)) {
                let c = pair_expectation(&del.phi, m, &prime, i, j)?;
                if c.abs() < 1e-9 {
                    return Err(Error::Internal(format!("primed pair ({i}, {j}) has vanishing overlap")));
                }
                divisors.insert((i, j), c);
            }
        }
    }
    for t in &terms {
        match *t {
            LogicalTerm::Constant(w) => v_enc.add_term("id", &[0], w),
            LogicalTerm::X(q, w) => v_enc.add_term("x", &[2 * q], w),
            LogicalTerm::Z(q, w) => v_enc.add_term("z", &[2 * q], w),
            LogicalTerm::XX(i, j, w) => v_enc.add_term("xx_enc", &[2 * i, 2 * j, 2 * i + 1, 2 * j + 1], w / divisors[&(i, j)]),
            LogicalTerm::ZZ(i, j, w) => v_enc.add_term("zz_enc", &[2 * i, 2 * j, 2 * i + 1, 2 * j + 1], w / divisors[&(i, j)]),
        }
    }
    v_enc.interactions.retain(|name, _| v_enc.terms.iter().any(|t| &t.id == name));
    let mut heavy2 = HamiltonianInstance::new(2 * m).with_interaction("pin_prime", prime.clone());
    for &(i, j, w) in &del.pairs {
        heavy2.add_term("pin_prime", &[2 * i + 1, 2 * j + 1], w);
    }
    let mut blocks2: Vec<Block> = (0..m).map(|t| Block::identity(2 * t)).collect();
    blocks2.push(Block { qubits: (0..m).map(|t| 2 * t + 1).collect(), basis: CMat::from_column_slice(del.phi.len(), 1, del.phi.as_slice()) });
    let step2 = first_order(FirstOrder {
        kind: StepKind::PinSubspace,
        delta,
        v: &v_enc,
        v_constant: 0.0,
        heavy: &heavy2,
        heavy_constant: del.constant,
        blocks: blocks2,
        description: "logical qubit t at position 2t; primed qubits fixed to the second-stage ground state".into(),
        new_qubits: m,
        prefix: "logical",
    })?;

    // Stage 1: realize Δ₂·heavy2 + V_enc with the single physical interaction.
    let mut v1 = Couplings::new(false);
    for t in &terms {
        match *t {
            LogicalTerm::Constant(w) => v1.constant += w,
            LogicalTerm::X(q, w) => family.x(&mut v1, q, w),
            LogicalTerm::Z(q, w) => family.z(&mut v1, q, w),
            LogicalTerm::XX(i, j, w) => TripleFamily::cross(&mut v1, i, j, &XX_PATTERN, w / divisors[&(i, j)]),
            LogicalTerm::ZZ(i, j, w) => TripleFamily::cross(&mut v1, i, j, &ZZ_PATTERN, w / divisors[&(i, j)]),
        }
    }
    for &(i, j, w) in &del.pairs {
        TripleFamily::cross(&mut v1, i, j, &ID_PATTERN, w * step2.delta_strength);
    }
    let v1_inst = v1.instance(3 * m, family.name, &family.table);
    let mut pin = Couplings::new(false);
    for t in 0..m {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            pin.add(3 * t + a, 3 * t + b, family.pin_weight);
        }
    }
    let heavy1 = pin.instance(3 * m, family.name, &family.table);
    let basis = heisenberg_s2_basis();
    let step1 = first_order(FirstOrder {
        kind: family.kind,
        delta,
        v: &v1_inst,
        v_constant: v1.constant,
        heavy: &heavy1,
        heavy_constant: m as f64 * family.pin_constant,
        blocks: (0..m).map(|t| Block { qubits: vec![3 * t, 3 * t + 1, 3 * t + 2], basis: basis.clone() }).collect(),
        description: "triple t carries logical qubit 2t and primed qubit 2t+1 of the intermediate register".into(),
        new_qubits: 3 * m - logical.n,
        prefix: "enc",
    })?;
    let mut step2 = step2;
    step2.new_qubits = 0;
    Ok(GadgetPlan::from_steps(logical.clone(), vec![step1, step2]))
}

/// Compile into an instance using only XX + YY + ZZ couplings.
pub fn encode_heisenberg(logical: &HamiltonianInstance, delta: f64) -> Result<GadgetPlan> {
    encode_triples(logical, TripleFamily::heisenberg(), lieb_mattis_deletion, delta)
}

/// Compile into an instance using only XX + YY couplings.
pub fn encode_xy(logical: &HamiltonianInstance, delta: f64) -> Result<GadgetPlan> {
    encode_triples(logical, TripleFamily::xy(), xy_deletion, delta)
}

/// Compile an instance over XX + ZZ into one using only XZ − ZX couplings.
/// Relabelling Z as Y turns the logical instance into an XY model.
pub fn encode_xzskew(logical: &HamiltonianInstance, delta: f64) -> Result<GadgetPlan> {
    let strings = pauli_strings(logical);
    let mut pairs: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    let mut constant = 0.0;
    for (key, &w) in &strings {
        if w.abs() <= 1e-14 {
            continue;
        }
        match key.as_slice() {
            [] => constant += w,
            [(i, 1), (j, 1)] => pairs.entry((*i, *j)).or_default().0 += w,
            [(i, 3), (j, 3)] => pairs.entry((*i, *j)).or_default().1 += w,
            _ => return Err(Error::UnsupportedLogicalTerm(describe(key))),
        }
    }
    for (&(i, j), &(xx, zz)) in &pairs {
        if (xx - zz).abs() > 1e-12 * xx.abs().max(zz.abs()).max(1.0) {
            return Err(Error::UnsupportedLogicalTerm(format!("XX and ZZ on ({i}, {j}) differ: {xx} vs {zz}")));
        }
    }
    if pairs.is_empty() {
        return Ok(GadgetPlan::from_steps(logical.clone(), Vec::new()));
    }
    let m = logical.n;
    let table = PauliTable::terms(&[("XZ", 1.0), ("ZX", -1.0)]);
    let scale = 3.0 * 3f64.sqrt() / 4.0;
    let mut v = Couplings::new(true);
    v.constant = constant;
    for (&(i, j), &(w, _)) in &pairs {
        v.add(3 * i, 3 * j + 2, scale * w);
        v.add(3 * i, 3 * j + 1, -scale * w);
    }
    let gap = 2.0 * 3f64.sqrt();
    let mut pin = Couplings::new(true);
    for t in 0..m {
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            pin.add(3 * t + a, 3 * t + b, 1.0 / gap);
        }
    }
    let v_inst = v.instance(3 * m, "xzskew", &table);
    let heavy = pin.instance(3 * m, "xzskew", &table);
    let basis = xzskew_basis();
    let step = first_order(FirstOrder {
        kind: StepKind::EncodeXzskew,
        delta,
        v: &v_inst,
        v_constant: v.constant,
        heavy: &heavy,
        heavy_constant: m as f64,
        blocks: (0..m).map(|t| Block { qubits: vec![3 * t, 3 * t + 1, 3 * t + 2], basis: basis.clone() }).collect(),
        description: "triple t carries logical qubit t in the directed-triangle ground space".into(),
        new_qubits: 2 * m,
        prefix: "logical",
    })?;
    Ok(GadgetPlan::from_steps(logical.clone(), vec![step]))
}
