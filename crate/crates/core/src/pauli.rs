//! Pauli-string algebra.
//!
//! A string on k qubits is packed base 4 with qubit 0 in the most significant
//! digit, so the label "XZ" is `1 * 4 + 3`. Digits use σ⁰ = I, σ¹ = X, σ² = Y,
//! σ³ = Z.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, max_abs, CMat, C64, I, ONE, ZERO};

pub const K_MAX: usize = 8;
/// Relative singular-value / coefficient threshold for rank and support decisions.
pub const RANK_TOL: f64 = 1e-9;
/// Hermiticity tolerance for dense input.
pub const HERM_TOL: f64 = 1e-12;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

#[inline]
pub fn digit(code: u32, k: usize, q: usize) -> u8 {
    ((code >> (2 * (k - 1 - q))) & 3) as u8
}

#[inline]
pub fn with_digit(code: u32, k: usize, q: usize, d: u8) -> u32 {
    let shift = 2 * (k - 1 - q);
    (code & !(3 << shift)) | ((d as u32) << shift)
}

pub fn weight(code: u32, k: usize) -> usize {
    (0..k).filter(|&q| digit(code, k, q) != 0).count()
}

pub fn label(code: u32, k: usize) -> String {
    (0..k).map(|q| LETTERS[digit(code, k, q) as usize]).collect()
}

pub fn parse_label(s: &str) -> Option<(u32, usize)> {
    let mut code = 0u32;
    let mut k = 0;
    for ch in s.chars() {
        let d = match ch {
            'I' | '0' => 0,
            'X' | '1' => 1,
            'Y' | '2' => 2,
            'Z' | '3' => 3,
            _ => return None,
        };
        code = code * 4 + d;
        k += 1;
    }
    if k == 0 || k > K_MAX {
        return None;
    }
    Some((code, k))
}

/// Action of a Pauli string on a computational basis state:
/// σ_s|c⟩ = phase · |c ⊕ flip⟩.
#[inline]
fn act(code: u32, k: usize, c: usize) -> (usize, C64) {
    let mut flip = 0usize;
    let mut phase = ONE;
    for q in 0..k {
        let bitpos = k - 1 - q;
        let b = (c >> bitpos) & 1;
        match digit(code, k, q) {
            1 => flip |= 1 << bitpos,
            2 => {
                flip |= 1 << bitpos;
                phase *= if b == 0 { I } else { -I };
            }
            3 => {
                if b == 1 {
                    phase = -phase;
                }
            }
            _ => {}
        }
    }
    (c ^ flip, phase)
}

/// Real Pauli coefficients of a Hermitian operator on k qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTable {
    k: usize,
    coeffs: BTreeMap<u32, f64>,
}

impl PauliTable {
    pub fn zero(k: usize) -> Self {
        assert!((1..=K_MAX).contains(&k), "qubit count {k} out of range");
        PauliTable { k, coeffs: BTreeMap::new() }
    }

    /// Build from (label, coefficient) pairs; labels must share one length.
    pub fn from_terms(terms: &[(&str, f64)]) -> Result<Self> {
        let mut table: Option<PauliTable> = None;
        for (lab, c) in terms {
            let (code, k) = parse_label(lab).ok_or_else(|| Error::parse("pauli", format!("bad label {lab:?}")))?;
            let t = table.get_or_insert_with(|| PauliTable::zero(k));
            if t.k != k {
                return Err(Error::parse("pauli", format!("label {lab:?} has length {k}, expected {}", t.k)));
            }
            t.add_code(code, *c);
        }
        table.ok_or_else(|| Error::parse("pauli", "empty term list"))
    }

    /// Panicking convenience for literals in tests and examples.
    pub fn terms(terms: &[(&str, f64)]) -> Self {
        Self::from_terms(terms).expect("valid Pauli terms")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, label: &str) -> f64 {
        match parse_label(label) {
            Some((code, k)) if k == self.k => self.coeff(code),
            _ => 0.0,
        }
    }

    pub fn coeff(&self, code: u32) -> f64 {
        self.coeffs.get(&code).copied().unwrap_or(0.0)
    }

    pub fn add_code(&mut self, code: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.coeffs.entry(code).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.coeffs.remove(&code);
        }
    }

    pub fn set_code(&mut self, code: u32, c: f64) {
        if c == 0.0 {
            self.coeffs.remove(&code);
        } else {
            self.coeffs.insert(code, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// True when every coefficient is at most `tol` in magnitude.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = PauliTable::zero(self.k);
        for (c, v) in self.iter() {
            out.add_code(c, v * s);
        }
        out
    }

    pub fn plus(&self, other: &PauliTable) -> Self {
        assert_eq!(self.k, other.k);
        let mut out = self.clone();
        for (c, v) in other.iter() {
            out.add_code(c, v);
        }
        out
    }

    pub fn minus(&self, other: &PauliTable) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    /// Drop coefficients with |c| ≤ tol.
    pub fn pruned(&self, tol: f64) -> Self {
        let mut out = PauliTable::zero(self.k);
        for (c, v) in self.iter() {
            if v.abs() > tol {
                out.coeffs.insert(c, v);
            }
        }
        out
    }

    /// Keep only strings whose weight satisfies `keep`.
    pub fn filter_weight(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut out = PauliTable::zero(self.k);
        for (c, v) in self.iter() {
            if keep(weight(c, self.k)) {
                out.coeffs.insert(c, v);
            }
        }
        out
    }

    /// Relabel tensor factors: factor q of the result is factor perm[q] of self.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.k);
        let mut out = PauliTable::zero(self.k);
        for (c, v) in self.iter() {
            let mut nc = 0;
            for q in 0..self.k {
                nc = with_digit(nc, self.k, q, digit(c, self.k, perm[q]));
            }
            out.add_code(nc, v);
        }
        out
    }

    /// Place this table on `qubits` of an n-qubit register.
    pub fn embedded(&self, qubits: &[usize], n: usize) -> Self {
        assert_eq!(qubits.len(), self.k);
        let mut out = PauliTable::zero(n);
        for (c, v) in self.iter() {
            let mut nc = 0;
            for (q, &target) in qubits.iter().enumerate() {
                nc = with_digit(nc, n, target, digit(c, self.k, q));
            }
            out.add_code(nc, v);
        }
        out
    }

    pub fn to_dense(&self) -> CMat {
        dense_from_pauli(self)
    }

    pub fn labels(&self) -> BTreeMap<String, f64> {
        self.iter().map(|(c, v)| (label(c, self.k), v)).collect()
    }
}

impl Serialize for PauliTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PauliTable", 2)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("pauli", &self.labels())?;
        st.end()
    }
}

impl fmt::Display for PauliTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (c, v) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{v}·{}", label(c, self.k))?;
        }
        Ok(())
    }
}

/// Decompose a dense Hermitian matrix: coefficient of s is Tr(H σ_s) / 2^k.
pub fn pauli_decompose(h: &CMat, k: usize) -> Result<PauliTable> {
    if !(1..=K_MAX).contains(&k) {
        return Err(Error::ArityTooLarge { got: k, max: K_MAX });
    }
    let dim = 1usize << k;
    if h.nrows() != dim || h.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: h.nrows().max(h.ncols()) });
    }
    let scale = max_abs(h).max(1.0);
    let dev = hermitian_deviation(h);
    if dev > HERM_TOL * scale {
        return Err(Error::NonHermitian(dev));
    }
    let mut table = PauliTable::zero(k);
    let norm = 1.0 / dim as f64;
    for code in 0..(1u32 << (2 * k)) {
        let mut tr = ZERO;
        for c in 0..dim {
            let (d, ph) = act(code, k, c);
            let entry = h[(c, d)];
            if entry != ZERO {
                tr += entry * ph;
            }
        }
        table.set_code(code, tr.re * norm);
    }
    Ok(table)
}

pub fn dense_from_pauli(t: &PauliTable) -> CMat {
    let dim = 1usize << t.k;
    let mut m = CMat::zeros(dim, dim);
    for (code, v) in t.iter() {
        for c in 0..dim {
            let (d, ph) = act(code, t.k, c);
            m[(d, c)] += ph * v;
        }
    }
    m
}

/// M(H), the local parts v and w, and the identity coefficient of a 2-qubit table.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationData {
    pub m: Matrix3<f64>,
    pub v: Vector3<f64>,
    pub w: Vector3<f64>,
    pub trace_part: f64,
}

fn require_two(t: &PauliTable) -> Result<()> {
    if t.k != 2 {
        return Err(Error::WrongArity { expected: 2, got: t.k });
    }
    Ok(())
}

pub fn correlation_matrix(t: &PauliTable) -> Result<CorrelationData> {
    require_two(t)?;
    let c = |i: u32, j: u32| t.coeff(i * 4 + j);
    Ok(CorrelationData {
        m: Matrix3::from_fn(|i, j| c(i as u32 + 1, j as u32 + 1)),
        v: Vector3::from_fn(|i, _| c(i as u32 + 1, 0)),
        w: Vector3::from_fn(|i, _| c(0, i as u32 + 1)),
        trace_part: c(0, 0),
    })
}

/// Inverse of [`correlation_matrix`].
pub fn table_from_correlation(d: &CorrelationData) -> PauliTable {
    let mut t = PauliTable::zero(2);
    for i in 0..3 {
        for j in 0..3 {
            t.add_code(((i + 1) * 4 + j + 1) as u32, d.m[(i, j)]);
        }
        t.add_code(((i + 1) * 4) as u32, d.v[i]);
        t.add_code((i + 1) as u32, d.w[i]);
    }
    t.add_code(0, d.trace_part);
    t
}

/// Numerical rank of a 3×3 matrix with threshold RANK_TOL·σ_max.
pub fn matrix_rank3(m: &Matrix3<f64>) -> usize {
    let sv = m.svd(false, false).singular_values;
    let smax = sv.max();
    if smax <= f64::EPSILON * 16.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_TOL * smax).count()
}

pub fn pauli_rank(t: &PauliTable) -> Result<usize> {
    Ok(matrix_rank3(&correlation_matrix(t)?.m))
}

/// (H + FHF)/2 and (H − FHF)/2.
pub fn swap_symmetrize(t: &PauliTable) -> Result<(PauliTable, PauliTable)> {
    require_two(t)?;
    let swapped = t.permuted(&[1, 0]);
    Ok((t.plus(&swapped).scaled(0.5), t.minus(&swapped).scaled(0.5)))
}

/// Largest Pauli weight among coefficients above RANK_TOL·max|c|.
pub fn locality(t: &PauliTable) -> usize {
    let cut = RANK_TOL * t.max_abs();
    t.iter().filter(|(_, v)| v.abs() > cut).map(|(c, _)| weight(c, t.k)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, random_hermitian, re, sigma_dyn};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decompose_zz_is_single_string() {
        let zz = kron(&sigma_dyn(3), &sigma_dyn(3));
        let t = pauli_decompose(&zz, 2).unwrap();
        assert_eq!(t.labels(), BTreeMap::from([("ZZ".to_string(), 1.0)]));
    }

    #[test]
    fn decompose_product_expands() {
        let a = sigma_dyn(1) + sigma_dyn(3);
        let t = pauli_decompose(&kron(&a, &a), 2).unwrap();
        let want: BTreeMap<String, f64> =
            ["XX", "XZ", "ZX", "ZZ"].iter().map(|s| (s.to_string(), 1.0)).collect();
        assert_eq!(t.labels(), want);
    }

    #[test]
    fn round_trip_random_two_qubit() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let h = random_hermitian(4, &mut rng);
            let back = dense_from_pauli(&pauli_decompose(&h, 2).unwrap());
            assert!(max_abs(&(back - &h)) < 1e-12);
        }
    }

    #[test]
    fn decompose_rejects_bad_input() {
        let mut m = CMat::zeros(4, 4);
        m[(0, 1)] = re(1.0);
        assert!(matches!(pauli_decompose(&m, 2), Err(Error::NonHermitian(_))));
        assert!(matches!(pauli_decompose(&CMat::zeros(4, 4), 3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dense_of_single_z() {
        let d = dense_from_pauli(&PauliTable::terms(&[("Z", 1.0)]));
        assert_eq!(d, CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![re(1.0), re(-1.0)])));
    }

    #[test]
    fn dense_of_heisenberg() {
        let d = dense_from_pauli(&PauliTable::terms(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)]));
        let mut want = CMat::zeros(4, 4);
        for (i, v) in [1.0, -1.0, -1.0, 1.0].iter().enumerate() {
            want[(i, i)] = re(*v);
        }
        want[(1, 2)] = re(2.0);
        want[(2, 1)] = re(2.0);
        assert_eq!(d, want);
        assert_eq!(dense_from_pauli(&PauliTable::zero(2)), CMat::zeros(4, 4));
    }

    #[test]
    fn correlation_examples() {
        let d = correlation_matrix(&PauliTable::terms(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)])).unwrap();
        assert_eq!(d.m, Matrix3::identity());
        assert_eq!(d.v, Vector3::zeros());
        let d = correlation_matrix(&PauliTable::terms(&[("XZ", 1.0), ("ZX", -1.0)])).unwrap();
        assert_eq!(d.m, Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0));
        let d = correlation_matrix(&PauliTable::terms(&[("ZZ", 1.0), ("XI", 1.0)])).unwrap();
        assert_eq!(d.m, Vector3::z() * Vector3::z().transpose());
        assert_eq!(d.v, Vector3::x());
        assert_eq!(d.w, Vector3::zeros());
        assert!(matches!(
            correlation_matrix(&PauliTable::terms(&[("Z", 1.0)])),
            Err(Error::WrongArity { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(pauli_rank(&PauliTable::terms(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)])).unwrap(), 3);
        assert_eq!(pauli_rank(&PauliTable::terms(&[("ZZ", 1.0)])).unwrap(), 1);
        assert_eq!(pauli_rank(&PauliTable::terms(&[("XI", 1.0), ("IZ", 1.0)])).unwrap(), 0);
    }

    #[test]
    fn swap_examples() {
        let (p, m) = swap_symmetrize(&PauliTable::terms(&[("XZ", 1.0)])).unwrap();
        assert_eq!(p, PauliTable::terms(&[("XZ", 0.5), ("ZX", 0.5)]));
        assert_eq!(m, PauliTable::terms(&[("XZ", 0.5), ("ZX", -0.5)]));
        let xy = PauliTable::terms(&[("XX", 1.0), ("YY", 1.0)]);
        let (p, m) = swap_symmetrize(&xy).unwrap();
        assert_eq!(p, xy);
        assert!(m.is_empty());
        let (p, m) = swap_symmetrize(&PauliTable::terms(&[("XI", 1.0)])).unwrap();
        assert_eq!(p, PauliTable::terms(&[("XI", 0.5), ("IX", 0.5)]));
        assert_eq!(m, PauliTable::terms(&[("XI", 0.5), ("IX", -0.5)]));
    }

    #[test]
    fn locality_examples() {
        assert_eq!(locality(&PauliTable::terms(&[("ZZ", 1.0), ("XI", 1.0)])), 2);
        assert_eq!(locality(&PauliTable::terms(&[("XI", 1.0), ("IZ", 1.0)])), 1);
        assert_eq!(locality(&PauliTable::terms(&[("II", 1.0)])), 0);
    }

    #[test]
    fn label_packing() {
        assert_eq!(parse_label("XZ"), Some((7, 2)));
        assert_eq!(label(7, 2), "XZ");
        assert_eq!(parse_label("13"), Some((7, 2)));
        assert_eq!(parse_label("Q"), None);
        assert_eq!(parse_label(""), None);
    }

    fn arb_table(k: usize) -> impl Strategy<Value = PauliTable> {
        prop::collection::vec(-3.0f64..3.0, 1 << (2 * k)).prop_map(move |cs| {
            let mut t = PauliTable::zero(k);
            for (code, c) in cs.into_iter().enumerate() {
                t.add_code(code as u32, c);
            }
            t
        })
    }

    proptest! {
        #[test]
        fn round_trip_tables(t in (1usize..=3).prop_flat_map(arb_table)) {
            let back = pauli_decompose(&dense_from_pauli(&t), t.k()).unwrap();
            prop_assert!(back.minus(&t).max_abs() < 1e-12);
        }

        #[test]
        fn swap_parts_have_definite_parity(t in arb_table(2)) {
            let (p, m) = swap_symmetrize(&t).unwrap();
            prop_assert_eq!(p.permuted(&[1, 0]), p.clone());
            prop_assert_eq!(m.permuted(&[1, 0]), m.scaled(-1.0));
            prop_assert!(p.plus(&m).minus(&t).max_abs() < 1e-15);
            let dp = correlation_matrix(&p).unwrap();
            prop_assert_eq!(dp.m, dp.m.transpose());
            prop_assert_eq!(dp.v, dp.w);
            let dm = correlation_matrix(&m).unwrap();
            prop_assert_eq!(dm.m, -dm.m.transpose());
            prop_assert_eq!(dm.v, -dm.w);
        }
    }
}
