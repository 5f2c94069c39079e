//! Hamiltonian instances: a catalog of named interactions placed on qubit tuples.
//!
//! Documents are UTF-8 JSON:
//!
//! ```json
//! {"n": 2,
//!  "interactions": {"zz": {"arity": 2, "pauli": {"ZZ": "1"}}},
//!  "terms": [{"id": "zz", "qubits": [0, 1], "weight": "0.5"}],
//!  "thresholds": {"a": "-1", "b": "-0.5"}}
//! ```
//!
//! Decimal strings are kept verbatim so that a read/write cycle is lossless.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{spread, CMat, CVec, C64, ZERO};
use crate::pauli::{label, parse_label, PauliTable, K_MAX};

pub const WEIGHT_MAX: f64 = 1e6;
/// Largest dimension for which a dense matrix is ever materialized.
pub const DENSE_MAX: usize = 1 << 14;
const PAR_MIN_DIM: usize = 1 << 12;

/// Shortest decimal text that parses back to the same double.
pub fn fmt_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interaction {
    pub table: PauliTable,
    /// Coefficient text as read (or as generated), keyed by "IXYZ" label.
    pub raw: BTreeMap<String, String>,
}

impl Interaction {
    pub fn new(table: PauliTable) -> Self {
        let raw = table.iter().map(|(c, v)| (label(c, table.k()), fmt_decimal(v))).collect();
        Interaction { table, raw }
    }

    pub fn arity(&self) -> usize {
        self.table.k()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlacedTerm {
    pub id: String,
    pub qubits: Vec<usize>,
    pub weight: f64,
    pub weight_text: String,
}

impl PlacedTerm {
    pub fn new(id: impl Into<String>, qubits: Vec<usize>, weight: f64) -> Self {
        PlacedTerm { id: id.into(), qubits, weight, weight_text: fmt_decimal(weight) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thresholds {
    pub a: f64,
    pub b: f64,
    pub a_text: String,
    pub b_text: String,
}

impl Thresholds {
    pub fn new(a: f64, b: f64) -> Self {
        Thresholds { a, b, a_text: fmt_decimal(a), b_text: fmt_decimal(b) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianInstance {
    pub n: usize,
    pub interactions: BTreeMap<String, Interaction>,
    pub terms: Vec<PlacedTerm>,
    pub thresholds: Option<Thresholds>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateQubit { term: usize, qubit: usize },
    IndexOutOfRange { term: usize, qubit: usize, n: usize },
    UnknownInteraction { term: usize, id: String },
    ArityMismatch { term: usize, expected: usize, got: usize },
    WeightOutOfRange { term: usize, weight: f64 },
    ThresholdOrder { a: f64, b: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateQubit { term, qubit } => write!(f, "term {term}: qubit {qubit} repeated"),
            Violation::IndexOutOfRange { term, qubit, n } => write!(f, "term {term}: qubit {qubit} not below n = {n}"),
            Violation::UnknownInteraction { term, id } => write!(f, "term {term}: unknown interaction {id:?}"),
            Violation::ArityMismatch { term, expected, got } => {
                write!(f, "term {term}: interaction needs {expected} qubits, got {got}")
            }
            Violation::WeightOutOfRange { term, weight } => {
                write!(f, "term {term}: weight {weight} exceeds the bound {WEIGHT_MAX}")
            }
            Violation::ThresholdOrder { a, b } => write!(f, "thresholds need a < b, got a = {a}, b = {b}"),
        }
    }
}

impl HamiltonianInstance {
    pub fn new(n: usize) -> Self {
        HamiltonianInstance { n, interactions: BTreeMap::new(), terms: Vec::new(), thresholds: None }
    }

    /// Register an interaction; an existing entry with the same name is replaced.
    pub fn with_interaction(mut self, name: &str, table: PauliTable) -> Self {
        self.interactions.insert(name.to_string(), Interaction::new(table));
        self
    }

    pub fn with_term(mut self, id: &str, qubits: &[usize], weight: f64) -> Self {
        self.terms.push(PlacedTerm::new(id, qubits.to_vec(), weight));
        self
    }

    pub fn add_interaction(&mut self, name: &str, table: PauliTable) {
        self.interactions.insert(name.to_string(), Interaction::new(table));
    }

    pub fn add_term(&mut self, id: &str, qubits: &[usize], weight: f64) {
        self.terms.push(PlacedTerm::new(id, qubits.to_vec(), weight));
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, t) in self.terms.iter().enumerate() {
            match self.interactions.get(&t.id) {
                None => out.push(Violation::UnknownInteraction { term: i, id: t.id.clone() }),
                Some(int) if int.arity() != t.qubits.len() => {
                    out.push(Violation::ArityMismatch { term: i, expected: int.arity(), got: t.qubits.len() })
                }
                Some(_) => {}
            }
            for (p, &q) in t.qubits.iter().enumerate() {
                if q >= self.n {
                    out.push(Violation::IndexOutOfRange { term: i, qubit: q, n: self.n });
                }
                if t.qubits[..p].contains(&q) {
                    out.push(Violation::DuplicateQubit { term: i, qubit: q });
                }
            }
            if !t.weight.is_finite() || t.weight.abs() > WEIGHT_MAX {
                out.push(Violation::WeightOutOfRange { term: i, weight: t.weight });
            }
        }
        if let Some(th) = &self.thresholds {
            if th.a.partial_cmp(&th.b) != Some(std::cmp::Ordering::Less) {
                out.push(Violation::ThresholdOrder { a: th.a, b: th.b });
            }
        }
        out
    }

    pub fn assemble(&self) -> Result<AssembledOperator> {
        let violations = self.validate();
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::ValidationFailed(msg.join("; ")));
        }
        let mut locals = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.weight == 0.0 {
                continue;
            }
            let table = &self.interactions[&t.id].table;
            locals.push(LocalOp::new(&(table.to_dense() * C64::new(t.weight, 0.0)), &t.qubits, self.n));
        }
        let op = AssembledOperator { n: self.n, terms: locals, dense: OnceLock::new() };
        let dev = op.hermiticity_probe(7);
        if dev > 1e-10 * op.norm_bound().max(1.0) {
            return Err(Error::NonHermitian(dev));
        }
        Ok(op)
    }

    /// Same structure with every weight multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            *t = PlacedTerm::new(t.id.clone(), t.qubits.clone(), t.weight * f);
        }
        out
    }

    /// Relabel qubits: qubit q becomes perm[q].
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.qubits = t.qubits.iter().map(|&q| perm[q]).collect();
        }
        out
    }

    /// Append all terms of `other` (same n), merging catalogs.
    pub fn merged(&self, other: &HamiltonianInstance) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (k, v) in &other.interactions {
            out.interactions.insert(k.clone(), v.clone());
        }
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    /// The whole Hamiltonian as one Pauli table (n ≤ K_MAX).
    pub fn total_table(&self) -> PauliTable {
        let mut out = PauliTable::zero(self.n.max(1));
        for t in &self.terms {
            let e = self.interactions[&t.id].table.embedded(&t.qubits, self.n.max(1));
            out = out.plus(&e.scaled(t.weight));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut ints = Map::new();
        for (name, int) in &self.interactions {
            let pauli: Map<String, Value> = int.raw.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
            ints.insert(name.clone(), json!({"arity": int.arity(), "pauli": pauli}));
        }
        let terms: Vec<Value> =
            self.terms.iter().map(|t| json!({"id": t.id, "qubits": t.qubits, "weight": t.weight_text})).collect();
        let mut doc = Map::new();
        doc.insert("n".into(), json!(self.n));
        doc.insert("interactions".into(), Value::Object(ints));
        doc.insert("terms".into(), Value::Array(terms));
        if let Some(th) = &self.thresholds {
            doc.insert("thresholds".into(), json!({"a": th.a_text, "b": th.b_text}));
        }
        Value::Object(doc)
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let obj = doc.as_object().ok_or_else(|| Error::parse("document", "expected a JSON object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse("n", "missing or not a non-negative integer"))? as usize;
        let interactions = parse_catalog(obj.get("interactions"))?;
        let mut terms = Vec::new();
        let raw_terms = match obj.get("terms") {
            None => Vec::new(),
            Some(Value::Array(a)) => a.clone(),
            Some(_) => return Err(Error::parse("terms", "expected an array")),
        };
        for (i, t) in raw_terms.iter().enumerate() {
            let ctx = |f: &str| format!("terms[{i}].{f}");
            let id = t
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::parse(ctx("id"), "missing or not a string"))?
                .to_string();
            if !interactions.contains_key(&id) {
                return Err(Error::parse(ctx("id"), format!("unknown interaction id {id:?}")));
            }
            let qubits = match t.get("qubits") {
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|q| q.as_u64().map(|q| q as usize))
                    .collect::<Option<Vec<usize>>>()
                    .ok_or_else(|| Error::parse(ctx("qubits"), "entries must be non-negative integers"))?,
                _ => return Err(Error::parse(ctx("qubits"), "expected an array of qubit indices")),
            };
            let (weight, weight_text) = parse_decimal(t.get("weight"), &ctx("weight"))?;
            terms.push(PlacedTerm { id, qubits, weight, weight_text });
        }
        let thresholds = match obj.get("thresholds") {
            None | Some(Value::Null) => None,
            Some(th) => {
                let (a, a_text) = parse_decimal(th.get("a"), "thresholds.a")?;
                let (b, b_text) = parse_decimal(th.get("b"), "thresholds.b")?;
                Some(Thresholds { a, b, a_text, b_text })
            }
        };
        Ok(HamiltonianInstance { n, interactions, terms, thresholds })
    }
}

fn parse_decimal(v: Option<&Value>, ctx: &str) -> Result<(f64, String)> {
    let text = match v {
        Some(Value::String(s)) => s.trim().to_string(),
        Some(Value::Number(x)) => x.to_string(),
        _ => return Err(Error::parse(ctx, "expected a decimal string")),
    };
    let x: f64 = text.parse().map_err(|_| Error::parse(ctx, format!("{text:?} is not a decimal number")))?;
    if !x.is_finite() {
        return Err(Error::parse(ctx, format!("{text:?} is not finite")));
    }
    Ok((x, text))
}

fn parse_catalog(v: Option<&Value>) -> Result<BTreeMap<String, Interaction>> {
    let obj = match v {
        Some(Value::Object(o)) => o,
        None => return Ok(BTreeMap::new()),
        Some(_) => return Err(Error::parse("interactions", "expected an object")),
    };
    let mut out = BTreeMap::new();
    for (name, body) in obj {
        let ctx = |f: &str| format!("interactions.{name}.{f}");
        let arity = body
            .get("arity")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse(ctx("arity"), "missing or not a positive integer"))? as usize;
        if arity == 0 {
            return Err(Error::parse(ctx("arity"), "must be at least 1"));
        }
        if arity > K_MAX {
            return Err(Error::ArityTooLarge { got: arity, max: K_MAX });
        }
        let pauli = body
            .get("pauli")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::parse(ctx("pauli"), "expected an object of label: decimal-string"))?;
        let mut table = PauliTable::zero(arity);
        let mut raw = BTreeMap::new();
        for (lab, val) in pauli {
            let (code, k) = parse_label(lab).ok_or_else(|| Error::parse(ctx("pauli"), format!("bad label {lab:?}")))?;
            if k != arity {
                return Err(Error::parse(ctx("pauli"), format!("label {lab:?} has length {k}, arity is {arity}")));
            }
            let (x, text) = parse_decimal(Some(val), &ctx(&format!("pauli.{lab}")))?;
            table.add_code(code, x);
            raw.insert(lab.clone(), text);
        }
        out.insert(name.clone(), Interaction { table, raw });
    }
    Ok(out)
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

pub fn read_instance(text: &str) -> Result<HamiltonianInstance> {
    let doc: Value = serde_json::from_str(text).map_err(json_error)?;
    HamiltonianInstance::from_json(&doc)
}

pub fn write_instance(inst: &HamiltonianInstance) -> String {
    serde_json::to_string_pretty(&inst.to_json()).expect("JSON values serialize")
}

/// The interaction catalog of a document, in name order. Accepts a full
/// instance or a bare `{"interactions": {...}}` object.
pub fn read_interaction_set(text: &str) -> Result<Vec<(String, PauliTable)>> {
    let doc: Value = serde_json::from_str(text).map_err(json_error)?;
    let cat = parse_catalog(doc.get("interactions"))?;
    if cat.is_empty() {
        return Err(Error::parse("interactions", "no interactions given"));
    }
    Ok(cat.into_iter().map(|(k, v)| (k, v.table)).collect())
}

/// One placed term as a sparse local matrix.
#[derive(Clone, Debug)]
struct LocalOp {
    masks: Vec<usize>,
    full_mask: usize,
    /// For each local row, the nonzero (column, value) pairs.
    rows: Vec<Vec<(usize, C64)>>,
}

impl LocalOp {
    fn new(m: &CMat, qubits: &[usize], n: usize) -> Self {
        let masks: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
        let full_mask = masks.iter().sum();
        let rows = (0..m.nrows())
            .map(|r| (0..m.ncols()).filter(|&c| m[(r, c)] != ZERO).map(|c| (spread(c, &masks), m[(r, c)])).collect())
            .collect();
        LocalOp { masks, full_mask, rows }
    }

    #[inline]
    fn row_of(&self, i: usize) -> usize {
        crate::linalg::local_index(i, &self.masks)
    }
}

/// Sum of placed terms with a matrix-free product; the dense matrix is built on demand.
#[derive(Debug)]
pub struct AssembledOperator {
    pub n: usize,
    terms: Vec<LocalOp>,
    dense: OnceLock<CMat>,
}

impl AssembledOperator {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// From an explicit matrix (dimension must be a power of two).
    pub fn from_dense(m: CMat) -> Self {
        let dim = m.nrows();
        assert!(dim.is_power_of_two() && m.is_square());
        let n = dim.trailing_zeros() as usize;
        let qubits: Vec<usize> = (0..n).collect();
        let op = LocalOp::new(&m, &qubits, n);
        let out = AssembledOperator { n, terms: vec![op], dense: OnceLock::new() };
        let _ = out.dense.set(m);
        out
    }

    #[inline]
    fn entry_sum(&self, i: usize, x: &[C64]) -> C64 {
        let mut acc = ZERO;
        for t in &self.terms {
            let base = i & !t.full_mask;
            for &(c, v) in &t.rows[t.row_of(i)] {
                acc += v * x[base | c];
            }
        }
        acc
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        if self.dim() >= PAR_MIN_DIM {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| *yi = self.entry_sum(i, x));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.entry_sum(i, x);
            }
        }
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        let mut y = CVec::zeros(self.dim());
        self.matvec(x.as_slice(), y.as_mut_slice());
        y
    }

    /// Dense matrix; panics above DENSE_MAX.
    pub fn dense(&self) -> &CMat {
        self.dense.get_or_init(|| {
            let dim = self.dim();
            assert!(dim <= DENSE_MAX, "dimension {dim} exceeds DENSE_MAX");
            let mut m = CMat::zeros(dim, dim);
            for t in &self.terms {
                for i in 0..dim {
                    let base = i & !t.full_mask;
                    for &(c, v) in &t.rows[t.row_of(i)] {
                        m[(i, base | c)] += v;
                    }
                }
            }
            m
        })
    }

    /// Triangle-inequality upper bound on ‖H‖.
    pub fn norm_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.rows.iter().map(|r| r.iter().map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0f64, f64::max))
            .sum()
    }

    /// |⟨u|Hv⟩ − conj⟨v|Hu⟩| for seeded random u, v.
    pub fn hermiticity_probe(&self, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rand_vec = || CVec::from_fn(self.dim(), |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let u = rand_vec();
        let v = rand_vec();
        let a = u.dotc(&self.apply(&v));
        let b = v.dotc(&self.apply(&u)).conj();
        (a - b).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvalsh, re};
    use proptest::prelude::*;

    const TIM_SAMPLE: &str = r#"{
  "interactions": {
    "x": {"arity": 1, "pauli": {"X": "1"}},
    "zz": {"arity": 2, "pauli": {"ZZ": "1"}}
  },
  "n": 3,
  "terms": [
    {"id": "zz", "qubits": [0, 1], "weight": "1.5"},
    {"id": "zz", "qubits": [1, 2], "weight": "-0.25"},
    {"id": "x", "qubits": [2], "weight": "0.1"}
  ],
  "thresholds": {"a": "-2", "b": "-1.75"}
}"#;

    fn heis() -> PauliTable {
        PauliTable::terms(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)])
    }

    #[test]
    fn round_trip_preserves_document() {
        let inst = read_instance(TIM_SAMPLE).unwrap();
        assert!(inst.validate().is_empty());
        let back = write_instance(&inst);
        let a: Value = serde_json::from_str(TIM_SAMPLE).unwrap();
        let b: Value = serde_json::from_str(&back).unwrap();
        assert_eq!(a, b);
        assert_eq!(read_instance(&back).unwrap(), inst);
    }

    #[test]
    fn decimal_text_is_kept() {
        let doc = TIM_SAMPLE.replace("\"0.1\"", "\"0.10000000000000000001\"");
        let inst = read_instance(&doc).unwrap();
        assert_eq!(inst.terms[2].weight_text, "0.10000000000000000001");
        assert!(write_instance(&inst).contains("0.10000000000000000001"));
    }

    #[test]
    fn parse_errors_carry_context() {
        let bad = TIM_SAMPLE.replace("[1, 2]", "[1, \"two\"]");
        match read_instance(&bad) {
            Err(Error::Parse { context, .. }) => assert_eq!(context, "terms[1].qubits"),
            other => panic!("unexpected {other:?}"),
        }
        let unknown = TIM_SAMPLE.replace("\"id\": \"x\"", "\"id\": \"yy\"");
        match read_instance(&unknown) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("\"yy\"")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(read_instance("{\"n\": 2,"), Err(Error::Parse { .. })));
    }

    #[test]
    fn validate_examples() {
        let inst = HamiltonianInstance::new(3).with_interaction("zz", PauliTable::terms(&[("ZZ", 1.0)]));
        let dup = inst.clone().with_term("zz", &[2, 2], 1.0);
        assert_eq!(dup.validate(), vec![Violation::DuplicateQubit { term: 0, qubit: 2 }]);
        let oob = inst.clone().with_term("zz", &[0, 3], 1.0);
        assert_eq!(oob.validate(), vec![Violation::IndexOutOfRange { term: 0, qubit: 3, n: 3 }]);
        assert!(read_instance(TIM_SAMPLE).unwrap().validate().is_empty());
        let heavy = inst.with_term("zz", &[0, 1], 2e6);
        assert!(matches!(heavy.validate()[0], Violation::WeightOutOfRange { .. }));
    }

    #[test]
    fn assemble_zz() {
        let inst = HamiltonianInstance::new(2)
            .with_interaction("zz", PauliTable::terms(&[("ZZ", 1.0)]))
            .with_term("zz", &[0, 1], 1.0);
        let op = inst.assemble().unwrap();
        let want = CMat::from_diagonal(&CVec::from_vec(vec![re(1.0), re(-1.0), re(-1.0), re(1.0)]));
        assert_eq!(op.dense(), &want);
    }

    #[test]
    fn orientation_matters_for_skew_terms() {
        let skew = PauliTable::terms(&[("XZ", 1.0), ("ZX", -1.0)]);
        let fwd = HamiltonianInstance::new(2).with_interaction("s", skew.clone()).with_term("s", &[0, 1], 1.0);
        let rev = HamiltonianInstance::new(2).with_interaction("s", skew).with_term("s", &[1, 0], 1.0);
        let a = fwd.assemble().unwrap();
        let b = rev.assemble().unwrap();
        assert!((a.dense() + b.dense()).norm() < 1e-15);
    }

    #[test]
    fn heisenberg_triangle_spectrum() {
        let inst = HamiltonianInstance::new(3)
            .with_interaction("h", heis())
            .with_term("h", &[0, 1], 1.0)
            .with_term("h", &[1, 2], 1.0)
            .with_term("h", &[0, 2], 1.0);
        let vals = eigvalsh(inst.assemble().unwrap().dense());
        // Oracle: 2s(s+1) − 9/2 with s = 1/2 (four states) and s = 3/2 (four states).
        let low = 2.0 * 0.5 * 1.5 - 4.5;
        let high = 2.0 * 1.5 * 2.5 - 4.5;
        for v in &vals[..4] {
            assert!((v - low).abs() < 1e-12);
        }
        for v in &vals[4..] {
            assert!((v - high).abs() < 1e-12);
        }
    }

    #[test]
    fn matvec_agrees_with_dense_above_parallel_threshold() {
        let n = 12;
        let mut inst = HamiltonianInstance::new(n).with_interaction("h", heis()).with_interaction(
            "f",
            PauliTable::terms(&[("X", 0.3), ("Z", -0.7), ("Y", 0.2)]),
        );
        for q in 0..n {
            inst.add_term("h", &[q, (q + 5) % n], 0.1 * q as f64 + 0.3);
            inst.add_term("f", &[q], 1.0);
        }
        let op = inst.assemble().unwrap();
        let x = CVec::from_fn(1 << n, |i, _| C64::new((i % 7) as f64, (i % 3) as f64 - 1.0));
        let y = op.apply(&x);
        // Oracle: act with each Pauli string bit by bit.
        let mut expect = CVec::zeros(1 << n);
        for t in &inst.terms {
            let int = &inst.interactions[&t.id];
            for (code, c) in int.table.iter() {
                for (b, xb) in x.iter().enumerate() {
                    let (mut out, mut ph) = (b, re(c * t.weight));
                    for (p, &q) in t.qubits.iter().enumerate() {
                        let bit = 1usize << (n - 1 - q);
                        let set = b & bit != 0;
                        match crate::pauli::digit(code, int.arity(), p) {
                            1 => out ^= bit,
                            2 => {
                                out ^= bit;
                                ph *= if set { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
                            }
                            3 if set => ph = -ph,
                            _ => {}
                        }
                    }
                    expect[out] += ph * xb;
                }
            }
        }
        assert!((y - expect).norm() < 1e-9);
    }

    fn random_instance(ws: &[f64]) -> HamiltonianInstance {
        let mut inst = HamiltonianInstance::new(3)
            .with_interaction("a", PauliTable::terms(&[("XZ", 1.0), ("YY", 0.5), ("ZI", -1.0)]))
            .with_interaction("b", PauliTable::terms(&[("X", 1.0), ("Y", 2.0)]));
        let places: [&[usize]; 4] = [&[0, 1], &[2, 1], &[0], &[2]];
        for (i, w) in ws.iter().enumerate() {
            let id = if i < 2 { "a" } else { "b" };
            inst.add_term(id, places[i], *w);
        }
        inst
    }

    proptest! {
        #[test]
        fn assemble_is_linear(w1 in prop::collection::vec(-3.0f64..3.0, 4), w2 in prop::collection::vec(-3.0f64..3.0, 4)) {
            let a = random_instance(&w1).assemble().unwrap();
            let b = random_instance(&w2).assemble().unwrap();
            let sum: Vec<f64> = w1.iter().zip(&w2).map(|(x, y)| x + y).collect();
            let c = random_instance(&sum).assemble().unwrap();
            prop_assert!(crate::linalg::max_abs(&(a.dense() + b.dense() - c.dense())) < 1e-12);
        }

        #[test]
        fn relabeling_preserves_spectrum(w in prop::collection::vec(-3.0f64..3.0, 4), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
            let inst = random_instance(&w);
            let a = eigvalsh(inst.assemble().unwrap().dense());
            let b = eigvalsh(inst.relabeled(&perm).assemble().unwrap().dense());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
