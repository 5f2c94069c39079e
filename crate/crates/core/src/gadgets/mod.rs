//! Perturbative gadgets. Every construction returns a [`GadgetStep`]: the
//! physical instance, the effective Hamiltonian it should reproduce on its
//! low-energy space, the isometry identifying that space with the logical
//! register, and an error bound. [`GadgetStep::verify`] measures the actual
//! distance by exact diagonalization.
//!
//! Conventions: `energy_offset` is the constant e such that the low-energy
//! part of `physical + e·I` approximates `predicted_effective`. Heavy terms
//! built only from a fixed interaction cannot carry constants, so e absorbs
//! them.

mod ancilla;
mod encodings;
mod extract;
mod mediator;
mod reductions;

pub use ancilla::{ancilla_x_trick, tim_rewrite, TimRewrite};
pub use encodings::{encode_heisenberg, encode_xy, encode_xzskew, heisenberg_s2_basis, xzskew_basis, Encoding};
pub use extract::{extract_local, gadget_spectrum, ExtractFamily};
pub use mediator::{mediator_gadget, mediator_parallel, product_mediators, MediatorSpec};
pub use reductions::{force_basis, reduce_xx_ayy, reduce_xyz, synthesize_zz, Reduction, ZzSynthesis};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{HamiltonianInstance, PlacedTerm};
use crate::linalg::{eigh, embed, kron, op_norm, CMat, C64, ONE, ZERO};
use crate::pauli::{digit, pauli_decompose, with_digit, PauliTable, K_MAX};
use crate::spectrum::{low_energy_block, supported_distance, SupportedOperator, DENSE_EIG_MAX};

/// The explicit constant of the first-order bound.
pub const FIRST_ORDER_CONSTANT: f64 = 41.0;
/// Largest physical register `verify` will diagonalize.
pub const VERIFY_MAX_QUBITS: usize = 12;
/// Pauli coefficients at or below this (relative to the largest) are dropped
/// from numerically derived effective Hamiltonians.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepKind {
    PinSubspace,
    QubitPin,
    Mediator,
    EncodeHeisenberg,
    EncodeXy,
    EncodeXzskew,
    ReduceXxayy,
    ReduceXyz,
    ExtractLocal,
    AncillaX,
    TimRewrite,
    ForceBasis,
}

/// A group of physical qubits and the orthonormal columns its low space is spanned by.
/// A basis with 2^l columns carries l logical qubits.
#[derive(Clone, Debug)]
pub struct Block {
    pub qubits: Vec<usize>,
    pub basis: CMat,
}

impl Block {
    pub fn identity(q: usize) -> Self {
        Block { qubits: vec![q], basis: CMat::identity(2, 2) }
    }

    pub fn logical_qubits(&self) -> usize {
        self.basis.ncols().trailing_zeros() as usize
    }
}

/// The logical register embedded as a product over blocks. Logical qubits are
/// numbered block by block in the listed order.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub description: String,
    pub physical_qubits: usize,
    pub blocks: Vec<Block>,
}

impl Embedding {
    pub fn logical_qubits(&self) -> usize {
        self.blocks.iter().map(Block::logical_qubits).sum()
    }

    /// Dense isometry from the logical register into the physical one.
    pub fn isometry(&self) -> CMat {
        let n = self.physical_qubits;
        let order: Vec<usize> = self.blocks.iter().flat_map(|b| b.qubits.iter().copied()).collect();
        assert_eq!(order.len(), n, "blocks must partition the register");
        let mut prod = CMat::from_element(1, 1, ONE);
        for b in &self.blocks {
            prod = kron(&prod, &b.basis);
        }
        let mut out = CMat::zeros(1 << n, prod.ncols());
        for r in 0..(1usize << n) {
            let mut p = 0usize;
            for (t, &q) in order.iter().enumerate() {
                if (r >> (n - 1 - t)) & 1 == 1 {
                    p |= 1 << (n - 1 - q);
                }
            }
            out.row_mut(p).copy_from(&prod.row(r));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct GadgetStep {
    pub kind: StepKind,
    /// The dimensionless accuracy parameter δ.
    pub delta: f64,
    /// The heavy-term strength Δ.
    pub delta_strength: f64,
    pub added_terms: Vec<PlacedTerm>,
    pub new_qubits: usize,
    pub physical: HamiltonianInstance,
    pub predicted_effective: HamiltonianInstance,
    pub energy_offset: f64,
    pub predicted_error: f64,
    /// Whether `predicted_error` is a proven bound (first order) or an estimate.
    pub error_asserted: bool,
    pub cutoff: f64,
    pub embedding: Embedding,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepCheck {
    pub distance: f64,
    pub bound: f64,
    pub asserted: bool,
    pub within: bool,
    pub low_dim: usize,
}

impl GadgetStep {
    pub fn logical_embedding(&self) -> &str {
        &self.embedding.description
    }

    /// Low-energy block of the physical operator shifted by the energy offset
    /// (so the heavy part has ground energy 0), and the predicted operator on
    /// the embedded logical space.
    fn low_block(&self) -> Result<(crate::spectrum::LowEnergyBlock, SupportedOperator)> {
        if self.physical.n > VERIFY_MAX_QUBITS {
            return Err(Error::ArityTooLarge { got: self.physical.n, max: VERIFY_MAX_QUBITS });
        }
        let op = self.physical.assemble()?;
        let mut block = low_energy_block(&op, self.cutoff - self.energy_offset)?;
        let d = block.restricted.nrows();
        block.restricted += CMat::identity(d, d) * C64::new(self.energy_offset, 0.0);
        for v in block.values.iter_mut() {
            *v += self.energy_offset;
        }
        let matrix = self.predicted_effective.assemble()?.dense().clone();
        Ok((block, SupportedOperator { basis: self.embedding.isometry(), matrix }))
    }

    /// ‖H̃_{<cutoff} − iso·P·iso†‖ in the full physical space.
    pub fn verify(&self) -> Result<StepCheck> {
        let (block, predicted) = self.low_block()?;
        let distance = supported_distance(&block.as_supported(), &predicted);
        Ok(StepCheck {
            distance,
            bound: self.predicted_error,
            asserted: self.error_asserted,
            within: distance <= self.predicted_error,
            low_dim: block.dim(),
        })
    }

    /// The measured low-energy operator pulled back to the logical register
    /// and expanded in Pauli strings (offset included).
    pub fn measured_effective(&self) -> Result<PauliTable> {
        let (block, predicted) = self.low_block()?;
        let iso = predicted.basis;
        let c = iso.adjoint() * &block.basis;
        let m = &c * &block.restricted * c.adjoint();
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        pauli_decompose(&m, self.embedding.logical_qubits())
    }
}

/// Steps applied in series; step k's effective Hamiltonian is step k+1's physical one.
#[derive(Clone, Debug)]
pub struct GadgetPlan {
    pub source_set: BTreeMap<String, PauliTable>,
    pub steps: Vec<GadgetStep>,
    pub total_qubits: usize,
    pub composed_error: f64,
    pub logical: HamiltonianInstance,
}

impl GadgetPlan {
    pub fn from_steps(logical: HamiltonianInstance, steps: Vec<GadgetStep>) -> Self {
        let physical = steps.first().map(|s| s.physical.clone()).unwrap_or_else(|| logical.clone());
        let source_set = physical.interactions.iter().map(|(k, v)| (k.clone(), v.table.clone())).collect();
        GadgetPlan {
            source_set,
            total_qubits: physical.n,
            composed_error: steps.iter().map(|s| s.predicted_error).sum(),
            steps,
            logical,
        }
    }

    /// The outermost physical instance (the logical one for an empty plan).
    pub fn physical(&self) -> &HamiltonianInstance {
        self.steps.first().map(|s| &s.physical).unwrap_or(&self.logical)
    }

    /// Sum of all step offsets: E0(logical) ≈ E0(physical) + energy_offset.
    pub fn energy_offset(&self) -> f64 {
        self.steps.iter().map(|s| s.energy_offset).sum()
    }
}

// ---------------------------------------------------------------------------
// Pauli strings on a register, keyed by sorted (qubit, digit) lists.

pub type Strings = BTreeMap<Vec<(usize, u8)>, f64>;

fn add_string(out: &mut Strings, key: Vec<(usize, u8)>, c: f64) {
    if c == 0.0 {
        return;
    }
    *out.entry(key).or_insert(0.0) += c;
}

/// Expand a table placed on `qubits` into register strings (identity factors dropped).
pub fn table_strings(table: &PauliTable, qubits: &[usize], weight: f64, out: &mut Strings) {
    let k = table.k();
    for (code, v) in table.iter() {
        let mut key: Vec<(usize, u8)> =
            (0..k).filter_map(|p| Some((qubits[p], digit(code, k, p))).filter(|(_, d)| *d != 0)).collect();
        key.sort_unstable();
        add_string(out, key, v * weight);
    }
}

pub fn pauli_strings(inst: &HamiltonianInstance) -> Strings {
    let mut out = Strings::new();
    for t in &inst.terms {
        table_strings(&inst.interactions[&t.id].table, &t.qubits, t.weight, &mut out);
    }
    out
}

/// Largest coefficient difference between two string maps.
pub fn strings_distance(a: &Strings, b: &Strings) -> f64 {
    let keys: BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter().map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs()).fold(0.0, f64::max)
}

pub fn prune_strings(s: &Strings, rel_tol: f64) -> Strings {
    let scale = s.values().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    s.iter().filter(|(_, v)| v.abs() > rel_tol * scale).map(|(k, v)| (k.clone(), *v)).collect()
}

/// One interaction per distinct support, named `{prefix}{i}`, each placed once with weight 1.
/// The identity string becomes an "I" term on qubit 0.
pub fn instance_from_strings(n: usize, strings: &Strings, prefix: &str) -> HamiltonianInstance {
    let mut by_support: BTreeMap<Vec<usize>, PauliTable> = BTreeMap::new();
    let mut constant = 0.0;
    for (key, &c) in strings {
        if key.is_empty() {
            constant += c;
            continue;
        }
        let support: Vec<usize> = key.iter().map(|(q, _)| *q).collect();
        let k = support.len();
        let mut code = 0;
        for (p, (_, d)) in key.iter().enumerate() {
            code = with_digit(code, k, p, *d);
        }
        by_support.entry(support).or_insert_with(|| PauliTable::zero(k)).add_code(code, c);
    }
    let mut inst = HamiltonianInstance::new(n);
    for (i, (support, table)) in by_support.into_iter().enumerate() {
        if table.is_empty() {
            continue;
        }
        let name = format!("{prefix}{i}");
        inst.add_interaction(&name, table);
        inst.add_term(&name, &support, 1.0);
    }
    if constant != 0.0 && n > 0 {
        let name = format!("{prefix}id");
        inst.add_interaction(&name, PauliTable::terms(&[("I", 1.0)]));
        inst.add_term(&name, &[0], constant);
    }
    inst
}

/// Append `b`'s catalog and terms to `a`; shared names must carry the same table.
pub(crate) fn combine(a: &HamiltonianInstance, b: &HamiltonianInstance) -> Result<HamiltonianInstance> {
    let n = a.n.max(b.n);
    let mut out = a.clone();
    out.n = n;
    for (name, int) in &b.interactions {
        match out.interactions.get(name) {
            Some(existing) if existing.table != int.table => {
                return Err(Error::Internal(format!("interaction {name:?} defined twice with different tables")))
            }
            _ => {
                out.interactions.insert(name.clone(), int.clone());
            }
        }
    }
    out.terms.extend(b.terms.iter().cloned());
    Ok(out)
}

/// Exact operator norm at dense scale, the triangle bound beyond it.
pub fn instance_norm(inst: &HamiltonianInstance) -> Result<f64> {
    if inst.terms.is_empty() {
        return Ok(0.0);
    }
    let op = inst.assemble()?;
    if op.dim() <= DENSE_EIG_MAX {
        Ok(op_norm(op.dense()))
    } else {
        Ok(op.norm_bound())
    }
}

/// Π V Π for V given as a term list, computed block-locally, as register strings
/// on the logical qubits.
pub(crate) fn restrict(v: &HamiltonianInstance, blocks: &[Block]) -> Result<Strings> {
    let mut owner = vec![usize::MAX; v.n];
    for (bi, b) in blocks.iter().enumerate() {
        for &q in &b.qubits {
            owner[q] = bi;
        }
    }
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for b in blocks {
        offsets.push(acc);
        acc += b.logical_qubits();
    }
    // Sum dense pieces per touched-block set, then compress once per set.
    let mut groups: BTreeMap<Vec<usize>, CMat> = BTreeMap::new();
    for t in &v.terms {
        if t.weight == 0.0 {
            continue;
        }
        let mut touched: Vec<usize> = t.qubits.iter().map(|&q| owner[q]).collect();
        if touched.contains(&usize::MAX) {
            return Err(Error::Internal("term acts on a qubit outside every block".into()));
        }
        touched.sort_unstable();
        touched.dedup();
        let union: Vec<usize> = touched.iter().flat_map(|&b| blocks[b].qubits.iter().copied()).collect();
        let pos: Vec<usize> = t.qubits.iter().map(|q| union.iter().position(|u| u == q).unwrap()).collect();
        let local = v.interactions[&t.id].table.to_dense() * C64::new(t.weight, 0.0);
        let full = embed(&local, &pos, union.len());
        let entry = groups.entry(touched).or_insert_with(|| CMat::zeros(full.nrows(), full.ncols()));
        *entry += full;
    }
    let mut out = Strings::new();
    for (touched, m) in groups {
        let mut b = CMat::from_element(1, 1, ONE);
        for &bi in &touched {
            b = kron(&b, &blocks[bi].basis);
        }
        let r = b.adjoint() * m * &b;
        let r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
        let logical: Vec<usize> =
            touched.iter().flat_map(|&bi| (0..blocks[bi].logical_qubits()).map(move |j| (bi, j))).map(|(bi, j)| offsets[bi] + j).collect();
        if logical.is_empty() {
            add_string(&mut out, Vec::new(), r[(0, 0)].re);
            continue;
        }
        if logical.len() > K_MAX {
            return Err(Error::ArityTooLarge { got: logical.len(), max: K_MAX });
        }
        let table = pauli_decompose(&r, logical.len())?;
        table_strings(&table, &logical, 1.0, &mut out);
    }
    Ok(out)
}

/// Inputs of a first-order (Corollary 4) step: H = Δ·(heavy + heavy_constant) + V.
pub(crate) struct FirstOrder<'a> {
    pub kind: StepKind,
    pub delta: f64,
    pub v: &'a HamiltonianInstance,
    /// Constant dropped from V's realization; added back to the prediction.
    pub v_constant: f64,
    pub heavy: &'a HamiltonianInstance,
    pub heavy_constant: f64,
    pub blocks: Vec<Block>,
    pub description: String,
    pub new_qubits: usize,
    pub prefix: &'a str,
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta >= 4.0) {
        return Err(Error::VariantPreconditionFailed(format!("delta = {delta} must be finite and at least 4")));
    }
    Ok(())
}

pub(crate) fn first_order(spec: FirstOrder<'_>) -> Result<GadgetStep> {
    check_delta(spec.delta)?;
    let n = spec.v.n.max(spec.heavy.n);
    let mut v = spec.v.clone();
    v.n = n;
    let vnorm = instance_norm(&v)?;
    let strength = if vnorm > 1e-12 { spec.delta * vnorm * vnorm } else { spec.delta };
    let heavy = spec.heavy.scaled(strength);
    let physical = combine(&v, &heavy)?;
    let mut strings = restrict(&v, &spec.blocks)?;
    add_string(&mut strings, Vec::new(), spec.v_constant);
    let embedding = Embedding { description: spec.description, physical_qubits: n, blocks: spec.blocks };
    let logical_n = embedding.logical_qubits();
    let predicted = instance_from_strings(logical_n, &prune_strings(&strings, PRUNE_TOL), spec.prefix);
    Ok(GadgetStep {
        kind: spec.kind,
        delta: spec.delta,
        delta_strength: strength,
        added_terms: heavy.terms,
        new_qubits: spec.new_qubits,
        physical,
        predicted_effective: predicted,
        energy_offset: strength * spec.heavy_constant + spec.v_constant,
        predicted_error: FIRST_ORDER_CONSTANT / spec.delta,
        error_asserted: true,
        cutoff: strength / 2.0,
        embedding,
    })
}

// ---------------------------------------------------------------------------

/// Connected components of the qubits touched by non-identity parts of `inst`.
fn components(inst: &HamiltonianInstance) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..inst.n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut touched = vec![false; inst.n];
    for (key, _) in pauli_strings(inst) {
        for &(q, _) in &key {
            touched[q] = true;
        }
        for w in key.windows(2) {
            let (a, b) = (find(&mut parent, w[0].0), find(&mut parent, w[1].0));
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for q in 0..inst.n {
        if touched[q] {
            let r = find(&mut parent, q);
            groups.entry(r).or_default().push(q);
        }
    }
    groups.into_values().collect()
}

/// Pin onto the null space of a heavy Hamiltonian H₀ (identity terms allowed),
/// which must have lowest eigenvalue 0 and next eigenvalue at least 1. The
/// null space is found component by component and must factor into qubits.
pub fn pin_subspace(inst: &HamiltonianInstance, heavy: &HamiltonianInstance, delta: f64) -> Result<GadgetStep> {
    check_delta(delta)?;
    let n = inst.n.max(heavy.n);
    let strings = pauli_strings(heavy);
    let constant = strings.get(&Vec::new()).copied().unwrap_or(0.0);
    let mut h = heavy.clone();
    h.n = n;
    let mut blocks = Vec::new();
    let mut covered = vec![false; n];
    let mut min_sum = 0.0;
    let mut gap = f64::INFINITY;
    for comp in components(&h) {
        if comp.len() > VERIFY_MAX_QUBITS {
            return Err(Error::ArityTooLarge { got: comp.len(), max: VERIFY_MAX_QUBITS });
        }
        let mut local = Strings::new();
        for (key, c) in &strings {
            if !key.is_empty() && comp.contains(&key[0].0) {
                local.insert(key.iter().map(|(q, d)| (comp.iter().position(|x| x == q).unwrap(), *d)).collect(), *c);
            }
        }
        let m = instance_from_strings(comp.len(), &local, "h").assemble()?;
        let (vals, vecs) = eigh(m.dense());
        let lo = vals[0];
        let deg = vals.iter().take_while(|v| **v - lo <= 1e-9).count();
        if let Some(next) = vals.get(deg) {
            gap = gap.min(next - lo);
        }
        if !deg.is_power_of_two() {
            return Err(Error::NotGapNormalized(format!("null space of block {comp:?} has dimension {deg}, not a power of two")));
        }
        min_sum += lo;
        for &q in &comp {
            covered[q] = true;
        }
        blocks.push(Block { qubits: comp, basis: vecs.columns(0, deg).into_owned() });
    }
    if (min_sum + constant).abs() > 1e-9 {
        return Err(Error::NotGapNormalized(format!("lowest eigenvalue is {}, expected 0", min_sum + constant)));
    }
    if gap < 1.0 - 1e-9 {
        return Err(Error::NotGapNormalized(format!("spectral gap {gap} is below 1")));
    }
    for q in (0..n).filter(|q| !covered[*q]) {
        blocks.push(Block::identity(q));
    }
    blocks.sort_by_key(|b| b.qubits[0]);
    let heavy = rename(&h, "pin_");
    first_order(FirstOrder {
        kind: StepKind::PinSubspace,
        delta,
        v: inst,
        v_constant: 0.0,
        heavy: &heavy,
        heavy_constant: 0.0,
        blocks,
        description: "null space of the heavy Hamiltonian, one block per connected component".into(),
        new_qubits: n - inst.n,
        prefix: "eff",
    })
}

/// Prefix every interaction name.
pub(crate) fn rename(inst: &HamiltonianInstance, prefix: &str) -> HamiltonianInstance {
    let mut out = HamiltonianInstance::new(inst.n);
    for (k, v) in &inst.interactions {
        out.add_interaction(&format!("{prefix}{k}"), v.table.clone());
    }
    for t in &inst.terms {
        out.add_term(&format!("{prefix}{}", t.id), &t.qubits, t.weight);
    }
    out.thresholds = inst.thresholds.clone();
    out
}

pub(crate) fn normalized(psi: [C64; 2]) -> Result<[C64; 2]> {
    let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
    if !(norm > 1e-12 && norm.is_finite()) {
        return Err(Error::VariantPreconditionFailed("single-qubit state has zero norm".into()));
    }
    Ok([psi[0] / norm, psi[1] / norm])
}

pub(crate) fn orthogonal(psi: [C64; 2]) -> [C64; 2] {
    [-psi[1].conj(), psi[0].conj()]
}

/// |ψ⟩⟨ψ| = (I + r·σ)/2 as a 1-qubit table.
pub(crate) fn projector_table(psi: [C64; 2]) -> PauliTable {
    let [a, b] = psi;
    let x = 2.0 * (a.conj() * b).re;
    let y = 2.0 * (a.conj() * b).im;
    let z = a.norm_sqr() - b.norm_sqr();
    PauliTable::terms(&[("I", 0.5), ("X", x / 2.0), ("Y", y / 2.0), ("Z", z / 2.0)]).pruned(1e-15)
}

pub(crate) fn column(psi: [C64; 2]) -> CMat {
    CMat::from_column_slice(2, 1, &psi)
}

/// Penalize ψ on one qubit: Δ|ψ⟩⟨ψ| with Δ = δ‖H‖², leaving H restricted to ψ⊥ there.
pub fn qubit_pin(inst: &HamiltonianInstance, qubit: usize, psi: [C64; 2], delta: f64) -> Result<GadgetStep> {
    if qubit >= inst.n {
        return Err(Error::WrongArity { expected: inst.n, got: qubit + 1 });
    }
    let psi = normalized(psi)?;
    let heavy = HamiltonianInstance::new(inst.n).with_interaction("pin", projector_table(psi)).with_term("pin", &[qubit], 1.0);
    let blocks = (0..inst.n)
        .map(|q| if q == qubit { Block { qubits: vec![q], basis: column(orthogonal(psi)) } } else { Block::identity(q) })
        .collect();
    let mut step = first_order(FirstOrder {
        kind: StepKind::QubitPin,
        delta,
        v: inst,
        v_constant: 0.0,
        heavy: &heavy,
        heavy_constant: 0.0,
        blocks,
        description: format!("qubit {qubit} fixed to the state orthogonal to the penalized one; other qubits renumbered in order"),
        new_qubits: 0,
        prefix: "eff",
    })?;
    step.predicted_effective.thresholds = inst.thresholds.clone();
    Ok(step)
}

pub fn zero_state() -> [C64; 2] {
    [ONE, ZERO]
}

pub fn one_state() -> [C64; 2] {
    [ZERO, ONE]
}
