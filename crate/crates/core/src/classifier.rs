//! Decision procedures for the bare and with-local-terms problem variants.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normal_form::{
    common_diagonalizer, is_diagonal, normal_form_antisymmetric, normal_form_symmetric, tim_axis_test,
    AntisymmetricNormalForm, LocalRotation, SymmetricNormalForm,
};
use crate::pauli::{correlation_matrix, pauli_rank, swap_symmetrize, PauliTable, K_MAX, RANK_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    P,
    NpComplete,
    TimComplete,
    QmaComplete,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::P => "P",
            Label::NpComplete => "NP_COMPLETE",
            Label::TimComplete => "TIM_COMPLETE",
            Label::QmaComplete => "QMA_COMPLETE",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Bare,
    WithLocalTerms,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bare" => Ok(Mode::Bare),
            "with-local-terms" | "local" => Ok(Mode::WithLocalTerms),
            other => Err(format!("unknown mode {other:?} (expected bare or with-local-terms)")),
        }
    }
}

/// Which branch of the decision procedure produced the label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// With local terms: nothing survives stripping the ≤1-local parts.
    StrippedSetEmpty,
    /// With local terms: one rotation diagonalizes the stripped set.
    StrippedSetDiagonalizable,
    /// With local terms: neither of the above.
    StrippedSetGeneric,
    /// Bare: every element has vanishing 2-local part.
    AllOneLocal,
    /// Bare: one rotation diagonalizes every element including local parts.
    LocallyDiagonalizable,
    /// Bare: every 2-local part is αᵢ (u·σ)⊗(u·σ) for a shared axis u.
    SharedIsingAxis,
    /// Bare: none of the above.
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementForm {
    pub index: usize,
    pub k: usize,
    pub pauli_rank: Option<usize>,
    pub symmetric: Option<SymmetricNormalForm>,
    pub antisymmetric: Option<AntisymmetricNormalForm>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub rule_fired: Rule,
    pub rotation: Option<LocalRotation>,
    pub normal_forms: Vec<ElementForm>,
    pub stripped_set: Option<Vec<PauliTable>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub label: Label,
    pub mode: Mode,
    pub witness: Witness,
    pub warnings: Vec<String>,
}

/// Remove strings of weight ≤ 1 and drop elements that become zero.
pub fn strip_local_parts(s: &[PauliTable]) -> Vec<PauliTable> {
    s.iter()
        .filter_map(|t| {
            let cut = RANK_TOL * t.max_abs();
            let kept = t.filter_weight(|w| w >= 2).pruned(cut);
            (!kept.is_empty()).then_some(kept)
        })
        .collect()
}

fn drop_zero(s: &[PauliTable], warnings: &mut Vec<String>) -> Vec<PauliTable> {
    let mut out = Vec::new();
    for (i, t) in s.iter().enumerate() {
        if t.is_empty() {
            warnings.push(format!("element {i} is identically zero and was dropped"));
        } else {
            out.push(t.clone());
        }
    }
    out
}

fn element_forms(s: &[PauliTable]) -> Vec<ElementForm> {
    s.iter()
        .enumerate()
        .map(|(index, t)| {
            if t.k() != 2 {
                return ElementForm { index, k: t.k(), pauli_rank: None, symmetric: None, antisymmetric: None };
            }
            let (plus, minus) = swap_symmetrize(t).expect("two-qubit element");
            let cut = RANK_TOL * t.max_abs().max(1e-300);
            let nontrivial = |x: &PauliTable| {
                let mut y = x.clone();
                y.set_code(0, 0.0);
                !y.pruned(cut).is_empty()
            };
            ElementForm {
                index,
                k: 2,
                pauli_rank: pauli_rank(t).ok(),
                symmetric: if nontrivial(&plus) { normal_form_symmetric(&plus).ok() } else { None },
                antisymmetric: if nontrivial(&minus) { normal_form_antisymmetric(&minus).ok() } else { None },
            }
        })
        .collect()
}

fn two_local_vanishes(t: &PauliTable) -> bool {
    let cut = RANK_TOL * t.max_abs();
    t.filter_weight(|w| w >= 2).pruned(cut).is_empty()
}

/// Ising-axis check on the 2-local parts of the two-qubit elements.
fn shared_axis(s: &[PauliTable]) -> Option<LocalRotation> {
    let parts: Vec<PauliTable> = s.iter().filter(|t| t.k() == 2).map(|t| t.filter_weight(|w| w == 2)).collect();
    match tim_axis_test(&parts) {
        Ok(rot) => rot,
        Err(Error::RankTooHigh { .. }) => None,
        Err(_) => None,
    }
}

fn check_arity(s: &[PauliTable], max: usize) -> Result<()> {
    match s.iter().map(PauliTable::k).max() {
        Some(k) if k > max => Err(Error::ArityTooLarge { got: k, max }),
        _ => Ok(()),
    }
}

pub fn classify_with_local_terms(s: &[PauliTable]) -> Result<Classification> {
    check_arity(s, K_MAX)?;
    let mut warnings = Vec::new();
    let s = drop_zero(s, &mut warnings);
    let stripped = strip_local_parts(&s);
    let (label, rule, rotation) = if stripped.is_empty() {
        (Label::P, Rule::StrippedSetEmpty, None)
    } else if let Some(rot) = common_diagonalizer(&stripped) {
        (Label::TimComplete, Rule::StrippedSetDiagonalizable, Some(rot))
    } else {
        (Label::QmaComplete, Rule::StrippedSetGeneric, None)
    };
    let witness =
        Witness { rule_fired: rule, rotation, normal_forms: element_forms(&s), stripped_set: Some(stripped) };
    finish(&s, Mode::WithLocalTerms, label, witness, warnings)
}

pub fn classify_bare(s: &[PauliTable]) -> Result<Classification> {
    check_arity(s, 2)?;
    let mut warnings = Vec::new();
    let s = drop_zero(s, &mut warnings);
    let (label, rule, rotation) = if s.iter().all(two_local_vanishes) {
        (Label::P, Rule::AllOneLocal, None)
    } else if let Some(rot) = common_diagonalizer(&s) {
        (Label::NpComplete, Rule::LocallyDiagonalizable, Some(rot))
    } else if let Some(rot) = shared_axis(&s) {
        (Label::TimComplete, Rule::SharedIsingAxis, Some(rot))
    } else {
        (Label::QmaComplete, Rule::Generic, None)
    };
    let witness = Witness { rule_fired: rule, rotation, normal_forms: element_forms(&s), stripped_set: None };
    finish(&s, Mode::Bare, label, witness, warnings)
}

pub fn classify(s: &[PauliTable], mode: Mode) -> Result<Classification> {
    match mode {
        Mode::Bare => classify_bare(s),
        Mode::WithLocalTerms => classify_with_local_terms(s),
    }
}

fn finish(s: &[PauliTable], mode: Mode, label: Label, witness: Witness, warnings: Vec<String>) -> Result<Classification> {
    if !replay_witness(s, &witness) {
        return Err(Error::Internal(format!("witness for rule {:?} failed verification", witness.rule_fired)));
    }
    Ok(Classification { label, mode, witness, warnings })
}

/// Re-check the claim carried by a witness against the input set.
pub fn replay_witness(s: &[PauliTable], w: &Witness) -> bool {
    match w.rule_fired {
        Rule::StrippedSetEmpty => strip_local_parts(s).is_empty(),
        Rule::AllOneLocal => s.iter().all(two_local_vanishes),
        Rule::StrippedSetDiagonalizable => match &w.rotation {
            Some(rot) => strip_local_parts(s).iter().all(|t| is_diagonal(&rot.apply(t))),
            None => false,
        },
        Rule::LocallyDiagonalizable => match &w.rotation {
            Some(rot) => s.iter().all(|t| is_diagonal(&rot.apply(t))),
            None => false,
        },
        Rule::SharedIsingAxis => match &w.rotation {
            Some(rot) => s.iter().filter(|t| t.k() == 2).all(|t| {
                let part = rot.apply(&t.filter_weight(|w| w == 2));
                let Ok(d) = correlation_matrix(&part) else { return false };
                let scale = d.m.abs().max();
                let mut off = d.m;
                off[(2, 2)] = 0.0;
                off.abs().max() <= 10.0 * RANK_TOL * scale.max(1e-300)
            }),
            None => false,
        },
        Rule::StrippedSetGeneric | Rule::Generic => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_so3;
    use crate::normal_form::su2_from_so3;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(terms: &[(&str, f64)]) -> PauliTable {
        PauliTable::terms(terms)
    }

    #[test]
    fn strip_examples() {
        assert_eq!(strip_local_parts(&[t(&[("ZZ", 1.0), ("XI", 1.0), ("II", 3.0)])]), vec![t(&[("ZZ", 1.0)])]);
        assert!(strip_local_parts(&[t(&[("XI", 1.0), ("IZ", 1.0)])]).is_empty());
        let heis = t(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)]);
        assert_eq!(strip_local_parts(std::slice::from_ref(&heis)), vec![heis]);
    }

    #[test]
    fn with_local_terms_examples() {
        let x = t(&[("X", 1.0)]);
        let z = t(&[("Z", 1.0)]);
        assert_eq!(classify_with_local_terms(&[x, z]).unwrap().label, Label::P);
        assert_eq!(classify_with_local_terms(&[t(&[("ZZ", 1.0)])]).unwrap().label, Label::TimComplete);
        let heis = t(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)]);
        assert_eq!(classify_with_local_terms(&[heis]).unwrap().label, Label::QmaComplete);
        assert_eq!(classify_with_local_terms(&[t(&[("ZZZ", 1.0)])]).unwrap().label, Label::TimComplete);
    }

    #[test]
    fn bare_examples() {
        let x = t(&[("X", 1.0)]);
        let z = t(&[("Z", 1.0)]);
        assert_eq!(classify_bare(&[x.clone(), z]).unwrap().label, Label::P);
        assert_eq!(classify_bare(&[t(&[("ZZ", 1.0)])]).unwrap().label, Label::NpComplete);
        let c = classify_bare(&[t(&[("ZZ", 1.0)]), x]).unwrap();
        assert_eq!(c.label, Label::TimComplete);
        assert_eq!(c.witness.rule_fired, Rule::SharedIsingAxis);
        assert_eq!(classify_bare(&[t(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)])]).unwrap().label, Label::QmaComplete);
        assert_eq!(classify_bare(&[t(&[("XX", 1.0), ("YY", 1.0)])]).unwrap().label, Label::QmaComplete);
        assert_eq!(classify_bare(&[t(&[("XZ", 1.0), ("ZX", -1.0)])]).unwrap().label, Label::QmaComplete);
    }

    #[test]
    fn arity_guard_and_zero_warning() {
        assert!(matches!(classify_bare(&[t(&[("ZZZ", 1.0)])]), Err(Error::ArityTooLarge { got: 3, max: 2 })));
        let c = classify_bare(&[PauliTable::zero(2), t(&[("ZZ", 1.0)])]).unwrap();
        assert_eq!(c.label, Label::NpComplete);
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn one_local_two_qubit_counts_as_local() {
        let c = classify_bare(&[t(&[("XI", 1.0), ("IZ", 1.0)])]).unwrap();
        assert_eq!(c.label, Label::P);
    }

    fn arb_set() -> impl Strategy<Value = Vec<PauliTable>> {
        let elem = prop::collection::vec(prop_oneof![Just(0.0), -2.0f64..2.0], 16).prop_map(|cs| {
            let mut out = PauliTable::zero(2);
            for (c, v) in cs.into_iter().enumerate() {
                out.add_code(c as u32, v);
            }
            out
        });
        prop::collection::vec(elem, 1..3)
    }

    fn structured_set() -> impl Strategy<Value = Vec<PauliTable>> {
        // Sets drawn from a small alphabet so that every label is exercised.
        let atoms = vec![
            t(&[("ZZ", 1.0)]),
            t(&[("ZI", 1.0), ("IZ", 1.0)]),
            t(&[("XI", 1.0)]),
            t(&[("XX", 1.0), ("YY", 1.0)]),
            t(&[("ZZ", 2.0), ("XI", 1.0), ("IX", 1.0)]),
            t(&[("XZ", 1.0), ("ZX", -1.0)]),
            t(&[("ZI", 1.0), ("IX", -0.5)]),
        ];
        prop::collection::vec((0..atoms.len(), 0.25f64..3.0), 1..4)
            .prop_map(move |picks| picks.into_iter().map(|(i, s)| atoms[i].scaled(s)).collect())
    }

    fn rotated(s: &[PauliTable], seed: u64) -> Vec<PauliTable> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rot = su2_from_so3(&random_so3(&mut rng)).unwrap();
        s.iter().map(|x| rot.apply(x)).collect()
    }

    proptest! {
        #[test]
        fn local_terms_do_not_change_with_local_label(s in prop_oneof![arb_set(), structured_set()]) {
            let base = classify_with_local_terms(&s).unwrap().label;
            let mut more = s.clone();
            more.extend([t(&[("X", 1.0)]), t(&[("Y", 1.0)]), t(&[("Z", 1.0)])]);
            prop_assert_eq!(classify_with_local_terms(&more).unwrap().label, base);
            prop_assert_ne!(base, Label::NpComplete);
            prop_assert!(base >= classify_bare(&s).unwrap().label);
        }

        #[test]
        fn bare_label_is_conjugation_invariant(s in structured_set(), seed in any::<u64>()) {
            let a = classify_bare(&s).unwrap().label;
            prop_assert_eq!(classify_bare(&rotated(&s, seed)).unwrap().label, a);
        }

        #[test]
        fn labels_are_scale_invariant(s in structured_set(), f in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0]) {
            let scaled: Vec<PauliTable> = s.iter().enumerate().map(|(i, x)| if i == 0 { x.scaled(f) } else { x.clone() }).collect();
            prop_assert_eq!(classify_bare(&scaled).unwrap().label, classify_bare(&s).unwrap().label);
            prop_assert_eq!(
                classify_with_local_terms(&scaled).unwrap().label,
                classify_with_local_terms(&s).unwrap().label
            );
        }
    }
}
