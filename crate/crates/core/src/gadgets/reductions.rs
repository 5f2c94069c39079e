//! Reductions between two-qubit interaction families: the three-qubit line
//! gadgets for XX + αYY and XX + αYY + βZZ, and the diagonal case where a
//! qubit is forced to a basis state through an ancilla.

use std::collections::BTreeMap;

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::instance::HamiltonianInstance;
use crate::linalg::{eigh, re, CMat, CVec, C64};
use crate::pauli::PauliTable;

use super::{first_order, restrict, Block, FirstOrder, GadgetStep, StepKind, Strings};

/// A line gadget: the pinned basis per triple, the effective interactions of
/// selected cross couplings, and steps isolating useful combinations.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub ground_energy: f64,
    pub gap: f64,
    /// 8 × 2 basis of the pinned space of one triple.
    pub basis: CMat,
    pub effective: BTreeMap<String, PauliTable>,
    pub steps: Vec<(String, GadgetStep)>,
}

fn strings_table(s: &Strings, k: usize) -> PauliTable {
    let mut out = PauliTable::zero(k);
    for (key, v) in s {
        let mut code = 0;
        for &(q, d) in key {
            code = crate::pauli::with_digit(code, k, q, d);
        }
        out.add_code(code, *v);
    }
    out.pruned(1e-12)
}

/// Two triples (0,1,2) and (3,4,5), each pinned by `line` on (0,1) and (1,2)
/// with the given signs, coupled by `couplings`.
struct LineSetup {
    table: PauliTable,
    signs: [f64; 2],
    ground: f64,
    gap: f64,
    basis: CMat,
}

impl LineSetup {
    fn heavy(&self) -> HamiltonianInstance {
        let mut h = HamiltonianInstance::new(6).with_interaction("h", self.table.clone());
        for t in [0, 3] {
            h.add_term("h", &[t, t + 1], self.signs[0] / self.gap);
            h.add_term("h", &[t + 1, t + 2], self.signs[1] / self.gap);
        }
        h
    }

    fn blocks(&self) -> Vec<Block> {
        vec![Block { qubits: vec![0, 1, 2], basis: self.basis.clone() }, Block { qubits: vec![3, 4, 5], basis: self.basis.clone() }]
    }

    fn couplings(&self, list: &[((usize, usize), f64)]) -> HamiltonianInstance {
        let mut v = HamiltonianInstance::new(6).with_interaction("h", self.table.clone());
        for &((a, b), w) in list {
            if w != 0.0 {
                v.add_term("h", &[a, b], w);
            }
        }
        v
    }

    fn effective(&self, list: &[((usize, usize), f64)]) -> Result<PauliTable> {
        Ok(strings_table(&restrict(&self.couplings(list), &self.blocks())?, 2))
    }

    fn step(&self, kind: StepKind, list: &[((usize, usize), f64)], delta: f64) -> Result<GadgetStep> {
        let v = self.couplings(list);
        let heavy = self.heavy();
        first_order(FirstOrder {
            kind,
            delta,
            v: &v,
            v_constant: 0.0,
            heavy: &heavy,
            heavy_constant: -2.0 * self.ground / self.gap,
            blocks: self.blocks(),
            description: "triples (0,1,2) and (3,4,5) each carry one logical qubit".into(),
            new_qubits: 4,
            prefix: "eff",
        })
    }
}

fn line_spectrum(table: &PauliTable, signs: [f64; 2]) -> Result<(Vec<f64>, CMat)> {
    let g = HamiltonianInstance::new(3)
        .with_interaction("h", table.clone())
        .with_term("h", &[0, 1], signs[0])
        .with_term("h", &[1, 2], signs[1])
        .assemble()?;
    Ok(eigh(g.dense()))
}

fn ket(bits: &str) -> usize {
    usize::from_str_radix(bits, 2).unwrap()
}

/// XX + αYY via the line H₁₂ + H₂₃; exposes XX and YY separately.
pub fn reduce_xx_ayy(alpha: f64, delta: f64) -> Result<Reduction> {
    if alpha == 0.0 || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::DegenerateAlpha(alpha));
    }
    let table = PauliTable::terms(&[("XX", 1.0), ("YY", alpha)]);
    let r = (1.0 + alpha * alpha).sqrt();
    let sg = (alpha - 1.0).signum();
    let mut basis = CMat::zeros(8, 2);
    for (bits, v) in [("001", 0.5 * sg), ("010", -(alpha + 1.0) * sg / (2.0 * r)), ("100", 0.5 * sg), ("111", (alpha - 1.0).abs() / (2.0 * r))] {
        basis[(ket(bits), 0)] = re(v);
    }
    for (bits, v) in [("000", (alpha - 1.0) / (2.0 * r)), ("011", 0.5), ("101", -(1.0 + alpha) / (2.0 * r)), ("110", 0.5)] {
        basis[(ket(bits), 1)] = re(v);
    }
    let (vals, _) = line_spectrum(&table, [1.0, 1.0])?;
    let setup = LineSetup { table, signs: [1.0, 1.0], ground: vals[0], gap: vals[2] - vals[0], basis };
    let h14 = setup.effective(&[((0, 3), 1.0)])?;
    let h24 = setup.effective(&[((1, 3), 1.0)])?;
    let (a1, a2, b1, b2) = (h14.get("XX"), h14.get("YY"), h24.get("XX"), h24.get("YY"));
    let det = a1 * b2 - a2 * b1;
    if det.abs() < 1e-12 {
        return Err(Error::DegenerateAlpha(alpha));
    }
    // Solve c1·H14 + c2·H24 ↦ target.
    let solve = |tx: f64, ty: f64| ((tx * b2 - ty * b1) / det, (a1 * ty - a2 * tx) / det);
    let (x1, x2) = solve(1.0, 0.0);
    let (y1, y2) = solve(0.0, 1.0);
    let steps = vec![
        ("XX".to_string(), setup.step(StepKind::ReduceXxayy, &[((0, 3), x1), ((1, 3), x2)], delta)?),
        ("YY".to_string(), setup.step(StepKind::ReduceXxayy, &[((0, 3), y1), ((1, 3), y2)], delta)?),
    ];
    let mut effective = BTreeMap::new();
    effective.insert("H14".to_string(), h14);
    effective.insert("H24".to_string(), h24);
    Ok(Reduction { ground_energy: setup.ground, gap: setup.gap, basis: setup.basis, effective, steps })
}

/// Pinned space of M = H₁₂ − H₂₃ with the gauge ZZZ ↦ Z, XXX ↦ X.
fn xyz_basis(vecs: &CMat) -> Result<CMat> {
    let v = vecs.columns(0, 2).into_owned();
    let zzz = PauliTable::terms(&[("ZZZ", 1.0)]).to_dense();
    let xxx = PauliTable::terms(&[("XXX", 1.0)]).to_dense();
    let r = v.adjoint() * &zzz * &v;
    let (_, u) = eigh(&r);
    let mut g1: CVec = &v * u.column(1);
    let (imax, _) = g1.iter().enumerate().fold((0, 0.0), |acc, (i, z)| if z.norm() > acc.1 + 1e-12 { (i, z.norm()) } else { acc });
    let phase = g1[imax] / g1[imax].norm();
    g1 /= phase;
    let g2 = &xxx * &g1;
    Ok(CMat::from_columns(&[g1, g2]))
}

/// XX + αYY + βZZ via the line H₁₂ − H₂₃. The effective H1 = (H₂₄ + H₃₅)/2 and
/// H2 = H₂₅ are reported multiplied by (1 + α² + β²)²; the step isolates a
/// combination with two nonzero components, without that factor.
pub fn reduce_xyz(alpha: f64, beta: f64, delta: f64) -> Result<Reduction> {
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::BothZero);
    }
    if alpha == 1.0 && beta == 1.0 {
        return Err(Error::DegenerateAlpha(alpha));
    }
    let table = PauliTable::terms(&[("XX", 1.0), ("YY", alpha), ("ZZ", beta)]).pruned(0.0);
    let (vals, vecs) = line_spectrum(&table, [1.0, -1.0])?;
    let setup = LineSetup { table, signs: [1.0, -1.0], ground: vals[0], gap: vals[2] - vals[0], basis: xyz_basis(&vecs)? };
    let scale = (1.0 + alpha * alpha + beta * beta).powi(2);
    let h1 = &[((1, 3), 0.5 * scale), ((2, 4), 0.5 * scale)];
    let h2 = &[((1, 4), scale)];
    let (c1, c2) = if alpha == 1.0 {
        (beta * beta, -1.0)
    } else if beta == 1.0 {
        (alpha * alpha, -1.0)
    } else if alpha != 0.0 && beta != 0.0 {
        (-1.0, alpha * beta)
    } else {
        (0.0, 1.0)
    };
    let combo: Vec<((usize, usize), f64)> =
        h1.iter().map(|&(p, w)| (p, w * c1 / scale)).chain(h2.iter().map(|&(p, w)| (p, w * c2 / scale))).collect();
    let mut effective = BTreeMap::new();
    effective.insert("H1".to_string(), setup.effective(h1)?);
    effective.insert("H2".to_string(), setup.effective(h2)?);
    let steps = vec![("combination".to_string(), setup.step(StepKind::ReduceXyz, &combo, delta)?)];
    Ok(Reduction { ground_energy: setup.ground, gap: setup.gap, basis: setup.basis, effective, steps })
}

/// Diagonal of a 2-qubit table that contains only I and Z factors.
fn diagonal(h: &PauliTable) -> Result<[f64; 4]> {
    if h.k() != 2 {
        return Err(Error::WrongArity { expected: 2, got: h.k() });
    }
    let m = h.to_dense();
    for i in 0..4 {
        for j in 0..4 {
            if i != j && m[(i, j)].norm() > 1e-12 {
                return Err(Error::VariantPreconditionFailed("interaction is not diagonal".into()));
            }
        }
    }
    Ok([m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re])
}

fn unique_extremum(d: &[f64; 4]) -> Option<(usize, f64)> {
    let tol = 1e-12 * d.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    for sign in [1.0, -1.0] {
        let vals: Vec<f64> = d.iter().map(|v| sign * v).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let at: Vec<usize> = (0..4).filter(|&i| vals[i] - lo <= tol).collect();
        if at.len() == 1 {
            return Some((at[0], sign));
        }
    }
    None
}

fn is_one_local(d: &[f64; 4]) -> bool {
    (d[0] + d[3] - d[1] - d[2]).abs() <= 1e-12 * d.iter().fold(1.0f64, |a, v| a.max(v.abs()))
}

/// Fix `qubit` to |bit⟩ with a fresh ancilla and a heavy copy of the diagonal
/// interaction `h`, oriented so its unique extremal entry selects `bit`.
pub fn force_basis(inst: &HamiltonianInstance, h: &PauliTable, qubit: usize, bit: u8, delta: f64) -> Result<GadgetStep> {
    let d = diagonal(h)?;
    if qubit >= inst.n || bit > 1 {
        return Err(Error::WrongArity { expected: inst.n, got: qubit + 1 });
    }
    let (idx, sign) = unique_extremum(&d).ok_or(Error::NoUniqueExtremum)?;
    let (u, v) = ((idx >> 1) as u8, (idx & 1) as u8);
    let anc = inst.n;
    // Placement (first, second) and the forced values of (qubit, anc).
    let (placement, anc_bit) = if u == bit {
        ([qubit, anc], v)
    } else if v == bit {
        ([anc, qubit], u)
    } else {
        return Err(Error::VariantPreconditionFailed(format!("extremal entry |{u}{v}⟩ cannot force |{bit}⟩")));
    };
    let shifted: Vec<f64> = d.iter().map(|x| sign * x - sign * d[idx]).collect();
    let gap = shifted.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let table = crate::pauli::pauli_decompose(&CMat::from_diagonal(&nalgebra::DVector::from_iterator(4, shifted.iter().map(|x| re(x / gap)))), 2)?
        .pruned(1e-15);
    let heavy = HamiltonianInstance::new(inst.n + 1).with_interaction("force", table).with_term("force", &placement, 1.0);
    let mut pair = CMat::zeros(4, 1);
    pair[(((bit as usize) << 1) | anc_bit as usize, 0)] = C64::new(1.0, 0.0);
    let mut blocks: Vec<Block> = (0..inst.n).filter(|&q| q != qubit).map(Block::identity).collect();
    blocks.push(Block { qubits: vec![qubit, anc], basis: pair });
    blocks.sort_by_key(|b| b.qubits[0]);
    let mut v = inst.clone();
    v.n = inst.n + 1;
    let mut step = first_order(FirstOrder {
        kind: StepKind::ForceBasis,
        delta,
        v: &v,
        v_constant: 0.0,
        heavy: &heavy,
        heavy_constant: 0.0,
        blocks,
        description: format!("qubit {qubit} fixed to |{bit}⟩ and the ancilla to |{anc_bit}⟩; other qubits renumbered in order"),
        new_qubits: 1,
        prefix: "eff",
    })?;
    step.predicted_effective.thresholds = inst.thresholds.clone();
    Ok(step)
}

/// ZZ as a linear combination of effectively available diagonal interactions.
#[derive(Clone, Debug, PartialEq)]
pub struct ZzSynthesis {
    /// "full_rank" (unique extremum) or "symmetric_diagonal".
    pub branch: &'static str,
    /// Coefficients on named interactions: "H", "H_first_forced", "H_second_forced", "I".
    pub coefficients: Vec<(String, f64)>,
}

pub fn synthesize_zz(h: &PauliTable) -> Result<ZzSynthesis> {
    let d = diagonal(h)?;
    if is_one_local(&d) {
        return Err(Error::VariantPreconditionFailed("diagonal interaction is 1-local".into()));
    }
    let target = Vector4::new(1.0, -1.0, -1.0, 1.0);
    match unique_extremum(&d) {
        Some((idx, _)) => {
            let (u, v) = (idx >> 1, idx & 1);
            let mut a = Matrix4::zeros();
            for row in 0..4 {
                let (x, y) = (row >> 1, row & 1);
                a[(row, 0)] = d[row];
                a[(row, 1)] = d[(u << 1) | y];
                a[(row, 2)] = d[(x << 1) | v];
                a[(row, 3)] = 1.0;
            }
            let c = a.lu().solve(&target).ok_or_else(|| Error::VariantPreconditionFailed("linear system is singular".into()))?;
            let names = ["H", "H_first_forced", "H_second_forced", "I"];
            Ok(ZzSynthesis { branch: "full_rank", coefficients: names.iter().zip(c.iter()).map(|(n, v)| (n.to_string(), *v)).collect() })
        }
        None => {
            let (a, b) = (d[0], d[1]);
            let tol = 1e-12 * d.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if (d[3] - a).abs() > tol || (d[2] - b).abs() > tol || (a - b).abs() <= tol {
                return Err(Error::NoUniqueExtremum);
            }
            Ok(ZzSynthesis {
                branch: "symmetric_diagonal",
                coefficients: vec![("H".into(), 2.0 / (a - b)), ("I".into(), -(a + b) / (a - b))],
            })
        }
    }
}
