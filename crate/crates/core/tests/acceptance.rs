//! Acceptance criteria 1–12. Each criterion prints one PASS/FAIL line with its
//! runtime; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use hamclass_core::gadgets::{
    ancilla_x_trick, gadget_spectrum, heisenberg_s2_basis, mediator_gadget, pin_subspace, reduce_xx_ayy, reduce_xyz,
    encode_heisenberg, extract_local, one_state, tim_rewrite, xzskew_basis, ExtractFamily, MediatorSpec,
};
use hamclass_core::linalg::{eigvalsh, embed, kron, max_abs, random_so3, re, CMat, CVec};
use hamclass_core::normal_form::{commutator_characterization, product_form_characterization};
use hamclass_core::oracles::{
    complete_graph_instance, complete_heisenberg_printed_constant, complete_heisenberg_spectrum, dicke_state, heisenberg_table,
    lieb_mattis_ground_energy, lieb_mattis_instance, lieb_mattis_state, lieb_mattis_swap_expectation, lieb_mattis_swap_printed,
    xy_maximum, xy_maximum_printed, xy_sector_eigenvalue, xy_table,
};
use hamclass_core::{
    classify, eigensystem, ground_energy, normal_form_antisymmetric, normal_form_symmetric, pauli_decompose, su2_from_so3, swap_symmetrize,
    test_local_diagonalizable, HamiltonianInstance, Label, Mode, PauliTable,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn t(terms: &[(&str, f64)]) -> PauliTable {
    PauliTable::terms(terms)
}

fn dense(terms: &[(&str, f64)]) -> CMat {
    t(terms).to_dense()
}

fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
    max_abs(&(a - b)) <= tol
}

fn random_table<R: Rng>(rng: &mut R, k: usize) -> PauliTable {
    let mut out = PauliTable::zero(k);
    for code in 0..(1u32 << (2 * k)) {
        out.add_code(code, rng.random_range(-1.0..1.0));
    }
    out
}

// ---------------------------------------------------------------------------

fn golden_table() -> Outcome {
    let s = 1.0 / 2f64.sqrt();
    let cases: Vec<(&str, Vec<PauliTable>, Mode, Label)> = vec![
        ("{X, Z}", vec![t(&[("X", 1.0)]), t(&[("Z", 1.0)])], Mode::Bare, Label::P),
        ("{ZZ}", vec![t(&[("ZZ", 1.0)])], Mode::Bare, Label::NpComplete),
        ("{ZZ, X}", vec![t(&[("ZZ", 1.0)]), t(&[("X", 1.0)])], Mode::Bare, Label::TimComplete),
        ("{ZZ} with local terms", vec![t(&[("ZZ", 1.0)])], Mode::WithLocalTerms, Label::TimComplete),
        ("{XX+YY+ZZ}", vec![heisenberg_table()], Mode::Bare, Label::QmaComplete),
        ("{XX+YY}", vec![xy_table()], Mode::Bare, Label::QmaComplete),
        ("{XZ-ZX}", vec![t(&[("XZ", 1.0), ("ZX", -1.0)])], Mode::Bare, Label::QmaComplete),
        ("{XX+ZZ} with local terms", vec![t(&[("XX", 1.0), ("ZZ", 1.0)])], Mode::WithLocalTerms, Label::QmaComplete),
        (
            "{(X+Z)⊗2} with local terms",
            vec![t(&[("XX", s * s), ("XZ", s * s), ("ZX", s * s), ("ZZ", s * s)])],
            Mode::WithLocalTerms,
            Label::QmaComplete,
        ),
        ("{ZZZ} with local terms", vec![t(&[("ZZZ", 1.0)])], Mode::WithLocalTerms, Label::TimComplete),
    ];
    let mut wrong = Vec::new();
    for (name, set, mode, want) in &cases {
        match classify(set, *mode) {
            Ok(c) if c.label == *want => {}
            Ok(c) => wrong.push(format!("{name}: expected {}, got {}", want.as_str(), c.label.as_str())),
            Err(e) => wrong.push(format!("{name}: error {e}")),
        }
    }
    outcome(wrong.is_empty(), format!("{}/{} match{}{}", cases.len() - wrong.len(), cases.len(), if wrong.is_empty() { "" } else { "; " }, wrong.join("; ")))
}

fn normal_form_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_form, mut worst_spec, mut failures) = (0.0f64, 0.0f64, 0);
    for i in 0..2000 {
        let (sym, anti) = swap_symmetrize(&random_table(&mut rng, 2)).unwrap();
        let (h, conj, shape) = if i < 1000 {
            match normal_form_symmetric(&sym) {
                Ok(nf) => {
                    let c = nf.rotation.apply(&sym);
                    (sym, c, nf.table())
                }
                Err(_) => {
                    failures += 1;
                    continue;
                }
            }
        } else {
            match normal_form_antisymmetric(&anti) {
                Ok(nf) => {
                    let c = nf.rotation.apply(&anti);
                    (anti, c, nf.table())
                }
                Err(_) => {
                    failures += 1;
                    continue;
                }
            }
        };
        let mut diff = conj.minus(&shape);
        diff.set_code(0, 0.0);
        worst_form = worst_form.max(diff.max_abs());
        let (a, b) = (eigvalsh(&h.to_dense()), eigvalsh(&conj.to_dense()));
        worst_spec = worst_spec.max(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }
    outcome(
        failures == 0 && worst_form < 1e-9 && worst_spec < 1e-10,
        format!("2000 inputs, {failures} errors, max off-form coefficient {worst_form:.2e}, max spectrum shift {worst_spec:.2e}"),
    )
}

fn diagonalizability_characterizations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut disagree, mut planted_missed, mut positives) = (0, 0, 0);
    for i in 0..2000 {
        let h = if i < 1000 {
            let d: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let diag = t(&[("ZZ", d[0]), ("ZI", d[1]), ("IZ", d[2]), ("II", d[3])]);
            su2_from_so3(&random_so3(&mut rng)).unwrap().apply(&diag)
        } else if i < 1500 {
            random_table(&mut rng, 2)
        } else {
            // Near misses: a diagonal form plus one small off-axis string.
            let d: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let extra = ["XI", "IX", "XX", "XZ"][i % 4];
            let diag = t(&[("ZZ", d[0]), ("ZI", d[1]), ("IZ", d[2]), (extra, 0.3)]);
            su2_from_so3(&random_so3(&mut rng)).unwrap().apply(&diag)
        };
        let a = test_local_diagonalizable(&h).is_some();
        let b = commutator_characterization(&h).unwrap();
        let c = product_form_characterization(&h).unwrap();
        if a != b || b != c {
            disagree += 1;
        }
        if i < 1000 && !a {
            planted_missed += 1;
        }
        positives += a as usize;
    }
    outcome(disagree == 0 && planted_missed == 0, format!("2000 inputs, {disagree} disagreements, {planted_missed} planted missed, {positives} diagonalizable"))
}

fn random_projector_heavy<R: Rng>(rng: &mut R, n: usize) -> HamiltonianInstance {
    let mut heavy = HamiltonianInstance::new(n);
    let mut qubits: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        qubits.swap(i, rng.random_range(0..=i));
    }
    let pinned = rng.random_range(1..n);
    let mut q = 0;
    let mut idx = 0;
    while q < pinned {
        if q + 2 <= pinned && rng.random_bool(0.4) {
            // I − P onto a random 2-dimensional subspace of two qubits.
            let m = CMat::from_fn(4, 2, |_, _| hamclass_core::linalg::C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let qr = m.qr();
            let b = qr.q();
            let p = CMat::identity(4, 4) - &b * b.adjoint();
            heavy.add_interaction(&format!("p{idx}"), pauli_decompose(&p, 2).unwrap());
            heavy.add_term(&format!("p{idx}"), &[qubits[q], qubits[q + 1]], 1.0);
            q += 2;
        } else {
            let v = hamclass_core::linalg::random_unit_vector(rng);
            heavy.add_interaction(&format!("p{idx}"), t(&[("I", 0.5), ("X", 0.5 * v.x), ("Y", 0.5 * v.y), ("Z", 0.5 * v.z)]));
            heavy.add_term(&format!("p{idx}"), &[qubits[q]], 1.0);
            q += 1;
        }
        idx += 1;
    }
    heavy
}

fn random_perturbation<R: Rng>(rng: &mut R, n: usize) -> HamiltonianInstance {
    let mut v = HamiltonianInstance::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.6) {
                let name = format!("v{i}_{j}");
                v.add_interaction(&name, random_table(rng, 2));
                v.add_term(&name, &[i, j], 1.0);
            }
        }
    }
    if v.terms.is_empty() {
        v.add_interaction("v", random_table(rng, 2));
        v.add_term("v", &[0, 1], 1.0);
    }
    v
}

fn first_order_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_ratio, mut violations, mut trials) = (0.0f64, 0, 0);
    for delta in [4.0, 16.0, 64.0, 256.0] {
        for trial in 0..50 {
            let n = 3 + trial % 4;
            let v = random_perturbation(&mut rng, n);
            let heavy = random_projector_heavy(&mut rng, n);
            let step = pin_subspace(&v, &heavy, delta).unwrap();
            let c = step.verify().unwrap();
            trials += 1;
            worst_ratio = worst_ratio.max(c.distance / (41.0 / delta));
            if c.distance > 41.0 / delta {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{trials} trials, {violations} above 41/δ, largest distance·δ/41 = {worst_ratio:.3e}"))
}

fn mediator_forms() -> Outcome {
    let gamma = 0.6;
    let h = t(&[("XX", 1.0), ("ZZ", gamma)]);
    let r = 1.0 / 2f64.sqrt();
    let (minus, plus) = ([re(r), re(-r)], [re(r), re(r)]);
    let (theta, a, b) = (0.3f64, 0.8, 1.3);
    let skew = t(&[("XZ", 1.0), ("ZX", -1.0)]);
    let h_else = HamiltonianInstance::new(2).with_interaction("z", t(&[("Z", 1.0)])).with_term("z", &[0], 1.0).with_term("z", &[1], 1.0);
    let cases = vec![
        ("-2XX", MediatorSpec::new(h.clone(), h.clone(), one_state(), 0, 1), "XX", -2.0),
        ("-2γ²ZZ", MediatorSpec::new(h.clone(), h.clone(), minus, 0, 1), "ZZ", -2.0 * gamma * gamma),
        (
            "αβ sin4θ XZ",
            MediatorSpec::new(t(&[("XX", a)]), t(&[("ZZ", b)]), [re(theta.cos()), re(theta.sin())], 0, 1),
            "XZ",
            a * b * (4.0 * theta).sin(),
        ),
        ("+2XX skew", MediatorSpec::new(skew.clone(), skew, plus, 0, 1), "XX", 2.0),
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, spec, label, want) in &cases {
        let step = mediator_gadget(&h_else, spec, 100.0).unwrap();
        let got = step.measured_effective().unwrap().get(label);
        let ok = (got - want).abs() <= 5.0 / 100.0;
        pass &= ok;
        let deltas = [25.0f64, 50.0, 100.0, 200.0];
        let errs: Vec<f64> = deltas.iter().map(|&d| mediator_gadget(&h_else, spec, d).unwrap().verify().unwrap().distance).collect();
        let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        pass &= slope <= -0.9;
        lines.push(format!("{name}: {got:.4} vs {want:.4}, slope {slope:.3}"));
    }
    outcome(pass, lines.join("; "))
}

fn s2_exactness() -> Outcome {
    let b = heisenberg_s2_basis();
    let r3 = 3f64.sqrt();
    let swap = |a: usize, c: usize, n: usize| (embed(&heisenberg_table().to_dense(), &[a, c], n) + CMat::identity(1 << n, 1 << n)) * re(0.5);
    let f = |a, c| b.adjoint() * swap(a, c, 3) * &b;
    let f12_printed = CMat::from_diagonal(&CVec::from_vec(vec![re(-1.0), re(-1.0), re(1.0), re(1.0)]));
    let mk = |s: f64| {
        CMat::from_row_slice(
            4,
            4,
            &[0.5, 0.0, s * r3 / 2.0, 0.0, 0.0, 0.5, 0.0, s * r3 / 2.0, s * r3 / 2.0, 0.0, -0.5, 0.0, 0.0, s * r3 / 2.0, 0.0, -0.5].map(re),
        )
    };
    let (f12, f13, f23) = (f(0, 1), f(0, 2), f(1, 2));
    let mut checks = vec![
        ("F12", close(&f12, &f12_printed, 1e-10)),
        ("F13", close(&f13, &mk(1.0), 1e-10)),
        ("F23", close(&f23, &mk(-1.0), 1e-10)),
        ("-F12 = ZI", close(&(-&f12), &dense(&[("ZI", 1.0)]), 1e-10)),
        ("(F13-F23)/√3 = XI", close(&((&f13 - &f23) * re(1.0 / r3)), &dense(&[("XI", 1.0)]), 1e-10)),
        ("ΣF = 0 on S2", close(&(&f12 + &f13 + &f23), &CMat::zeros(4, 4), 1e-10)),
    ];
    let b2 = kron(&b, &b);
    let h = |a: usize, c: usize| b2.adjoint() * embed(&heisenberg_table().to_dense(), &[a, c], 6) * &b2;
    let p = dense(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)]);
    let order = |m: CMat| embed(&m, &[0, 2, 1, 3], 4);
    let xx = (h(0, 3) - h(0, 4) - h(1, 3) + h(1, 4)) * re(0.75);
    let zz = (h(0, 3) + h(0, 4) - h(0, 5) * re(2.0) + h(1, 3) + h(1, 4) - h(1, 5) * re(2.0) - h(2, 3) * re(2.0) - h(2, 4) * re(2.0)
        + h(2, 5) * re(4.0))
        * re(0.25);
    let mut all = CMat::zeros(16, 16);
    for a in 0..3 {
        for c in 3..6 {
            all += h(a, c);
        }
    }
    checks.push(("= XX", close(&xx, &order(kron(&dense(&[("XX", 1.0)]), &p)), 1e-10)));
    checks.push(("= ZZ", close(&zz, &order(kron(&dense(&[("ZZ", 1.0)]), &p)), 1e-10)));
    checks.push(("= II", close(&all, &order(kron(&CMat::identity(4, 4), &p)), 1e-10)));
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(failed.is_empty(), format!("{} identities, failed: {:?}", checks.len(), failed))
}

fn lieb_mattis() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for n in 1..=3usize {
        let inst = lieb_mattis_instance(n);
        let op = inst.assemble().unwrap();
        let es = eigensystem(&op, 2).unwrap();
        let e = lieb_mattis_ground_energy(n);
        let ok_e = (es.values[0] - e).abs() <= 1e-10 && es.values[1] - es.values[0] > 1e-6;
        let phi = lieb_mattis_state(n);
        let resid = (op.apply(&phi) - &phi * re(e)).norm();
        let direct = |i: usize, j: usize| {
            let f = (embed(&heisenberg_table().to_dense(), &[i, j], 2 * n) + CMat::identity(1 << (2 * n), 1 << (2 * n))) * re(0.5);
            phi.dotc(&(f * &phi)).re
        };
        let same_ok = n < 2 || (direct(0, 1) - 1.0).abs() <= 1e-10;
        let cross = direct(0, n);
        let cross_ok = (cross - lieb_mattis_swap_expectation(n, 0, n)).abs() <= 1e-10 && (cross + 1.0 / n as f64).abs() <= 1e-10;
        let sum: f64 = (0..n).flat_map(|i| (n..2 * n).map(move |j| (i, j))).map(|(i, j)| direct(i, j)).sum();
        let sum_ok = (sum + n as f64).abs() <= 1e-9;
        let flagged = (lieb_mattis_swap_printed(n) - cross).abs() > 1e-9;
        let ok = ok_e && resid <= 1e-10 && same_ok && cross_ok && sum_ok && flagged;
        pass &= ok;
        lines.push(format!("n={n}: E0 {:.10} residual {resid:.1e} cross {cross:.6} (printed {:.6} flagged)", es.values[0], lieb_mattis_swap_printed(n)));
    }
    outcome(pass, lines.join("; "))
}

fn complete_graph() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for m in 1..=10usize {
        let op = complete_graph_instance(m, heisenberg_table(), "h").assemble().unwrap();
        let vals = eigvalsh(op.dense());
        let levels: Vec<f64> = complete_heisenberg_spectrum(m).iter().map(|l| l.energy).collect();
        let every_value_is_level = vals.iter().all(|v| levels.iter().any(|l| (v - l).abs() <= 1e-9));
        let every_level_occurs = levels.iter().all(|l| vals.iter().any(|v| (v - l).abs() <= 1e-9));
        if !(every_value_is_level && every_level_occurs) {
            pass = false;
            notes.push(format!("m={m} spectrum mismatch"));
        }
        if (complete_heisenberg_printed_constant(m) + 1.5 * m as f64).abs() <= 1e-12 {
            pass = false;
            notes.push(format!("m={m} printed constant not flagged"));
        }
    }
    let mut worst = 0.0f64;
    for n in 2..=12usize {
        let op = complete_graph_instance(n, xy_table(), "xy").assemble().unwrap();
        for k in 0..=n {
            let psi = dicke_state(n, k);
            let value = xy_sector_eigenvalue(n, k);
            worst = worst.max((op.apply(&psi) - &psi * re(value)).norm());
            if (value - 2.0 * (k * (n - k)) as f64).abs() > 0.0 {
                pass = false;
            }
        }
        if n % 2 == 0 {
            let argmax: Vec<usize> = (0..=n).filter(|&k| xy_sector_eigenvalue(n, k) == xy_maximum(n)).collect();
            if argmax != [n / 2] || (xy_maximum(n) - (n * n) as f64 / 2.0).abs() > 1e-12 || xy_maximum_printed(n) == xy_maximum(n) {
                pass = false;
                notes.push(format!("n={n} maximum"));
            }
            if n <= 8 {
                let top = *eigvalsh(op.dense()).last().unwrap();
                if (top - xy_maximum(n)).abs() > 1e-9 {
                    pass = false;
                    notes.push(format!("n={n} top eigenvalue {top}"));
                }
            }
        }
    }
    pass &= worst <= 1e-10;
    outcome(pass, format!("Heisenberg m ≤ 10 and XY n ≤ 12; worst Dicke residual {worst:.1e}; printed -3m/4 and n²/4 flagged{}", if notes.is_empty() { String::new() } else { format!("; {}", notes.join(", ")) }))
}

fn skew_and_line_forms() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let skew = dense(&[("XZ", 1.0), ("ZX", -1.0)]);
    let tri = embed(&skew, &[0, 1], 3) + embed(&skew, &[1, 2], 3) + embed(&skew, &[2, 0], 3);
    let vals = eigvalsh(&tri);
    let dim = vals.iter().filter(|v| (**v - vals[0]).abs() < 1e-9).count();
    let b = xzskew_basis();
    let b2 = kron(&b, &b);
    let r = b2.adjoint() * (embed(&skew, &[0, 5], 6) - embed(&skew, &[0, 4], 6)) * &b2;
    let want = dense(&[("XX", 1.0), ("ZZ", 1.0)]) * re(4.0 / (3.0 * 3f64.sqrt()));
    let spans = close(&(&tri * &b), &(&b * re(vals[0])), 1e-9);
    if dim != 2 || !spans || !close(&r, &want, 1e-9) {
        pass = false;
        notes.push("XZ-ZX triangle".to_string());
    }
    for alpha in [2.0f64, -0.5] {
        let line = HamiltonianInstance::new(3)
            .with_interaction("h", t(&[("XX", 1.0), ("YY", alpha)]))
            .with_term("h", &[0, 1], 1.0)
            .with_term("h", &[1, 2], 1.0);
        let vals = eigvalsh(line.assemble().unwrap().dense());
        let s = 2.0 * (1.0 + alpha * alpha).sqrt();
        if !vals.iter().all(|v| [0.0, s, -s].iter().any(|w| (v - w).abs() < 1e-9)) {
            pass = false;
            notes.push(format!("line spectrum α={alpha}"));
        }
        let red = reduce_xx_ayy(alpha, 8.0).unwrap();
        let r = (1.0 + alpha * alpha).sqrt();
        let (h14, h24) = (&red.effective["H14"], &red.effective["H24"]);
        let ok = (h14.get("XX") - 1.0 / (r * r)).abs() < 1e-8
            && (h14.get("YY") - alpha.powi(3) / (r * r)).abs() < 1e-8
            && (h24.get("XX") + 1.0 / r.powi(3)).abs() < 1e-8
            && (h24.get("YY") + alpha.powi(4) / r.powi(3)).abs() < 1e-8;
        if !ok {
            pass = false;
            notes.push(format!("H14/H24 α={alpha}"));
        }
    }
    for (alpha, beta) in [(2.0f64, 3.0f64), (0.5, -1.5)] {
        let red = reduce_xyz(alpha, beta, 8.0).unwrap();
        let (h1, h2) = (&red.effective["H1"], &red.effective["H2"]);
        let combo = h2.scaled(alpha * beta).minus(h1);
        let ok = combo.get("XX").abs() < 1e-8
            && (combo.get("YY") - alpha.powi(3) * beta * (alpha.powi(3) - 1.0)).abs() < 1e-8
            && (combo.get("ZZ") - alpha * beta.powi(3) * (beta.powi(3) - 1.0)).abs() < 1e-8;
        if !ok {
            pass = false;
            notes.push(format!("αβH2 - H1 at ({alpha}, {beta})"));
        }
    }
    outcome(pass, format!("skew ground dimension {dim}; {}", if notes.is_empty() { "all closed forms hold".into() } else { notes.join(", ") }))
}

fn reduced_state(psi: &CVec, keep: usize, n: usize) -> CMat {
    let mut rho = CMat::zeros(2, 2);
    let mask = 1usize << (n - 1 - keep);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            if i & !mask == j & !mask {
                rho[(((i & mask) != 0) as usize, ((j & mask) != 0) as usize)] += psi[i] * psi[j].conj();
            }
        }
    }
    rho
}

fn extraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut pass = true;
    let mut worst_rho = 0.0f64;
    for trial in 0..3 {
        let mut p = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if trial == 1 {
            p[2] = 0.0;
        }
        let fam = ExtractFamily::Symmetric2Axis { alpha: p[0], beta: p[1], gamma: p[2], a: [0.3, -0.1, 0.2] };
        let (vals, vecs) = gadget_spectrum(&fam).unwrap();
        let s = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let allowed = [0.0, 4.0 * p[0], -4.0 * p[0], 4.0 * p[1], -4.0 * p[1], 4.0 * p[2], -4.0 * p[2], 4.0 * s, -4.0 * s];
        pass &= vals.iter().all(|v| allowed.iter().any(|w| (v - w).abs() < 1e-9));
        let rho = reduced_state(&vecs.column(0).into_owned(), 3, 4);
        worst_rho = worst_rho.max(max_abs(&(rho - CMat::identity(2, 2) * re(0.5))));
        pass &= extract_local(&fam, 8.0).unwrap().verify().unwrap().within;
    }
    pass &= worst_rho <= 1e-10;
    let beta = 0.7f64;
    let (vals, vecs) = gadget_spectrum(&ExtractFamily::XxZField { beta }).unwrap();
    let s = (1.0 + 4.0 * beta * beta).sqrt();
    let mut want = CVec::zeros(4);
    want[0] = re(2.0 * beta - s);
    want[3] = re(1.0);
    let want = &want / re(want.norm());
    let overlap = vecs.column(0).dotc(&want).norm();
    pass &= overlap >= 1.0 - 1e-10 && vals[1] - vals[0] > 1e-6;
    outcome(pass, format!("3 random triples; worst |ρ - I/2| {worst_rho:.1e}; XX_ZFIELD overlap {overlap:.12}"))
}

fn reductions_preserve_energy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut inst = HamiltonianInstance::new(4).with_interaction("zz", t(&[("ZZ", 1.0)]));
        for i in 0..4 {
            for j in i + 1..4 {
                inst.add_term("zz", &[i, j], rng.random_range(-1.0..1.0));
            }
            let name = format!("f{i}");
            inst.add_interaction(&name, t(&[("X", rng.random_range(-1.0..1.0)), ("Y", rng.random_range(-1.0..1.0)), ("Z", rng.random_range(-1.0..1.0))]));
            inst.add_term(&name, &[i], 1.0);
        }
        let out = tim_rewrite(&inst).unwrap().instance;
        worst = worst.max((ground_energy(&inst).unwrap().energy - ground_energy(&out).unwrap().energy).abs());

        let mut inst = HamiltonianInstance::new(4)
            .with_interaction("zz", t(&[("ZZ", 1.0)]))
            .with_interaction("x", t(&[("X", 1.0)]))
            .with_interaction("z", t(&[("Z", 1.0)]));
        for i in 0..4 {
            for j in i + 1..4 {
                inst.add_term("zz", &[i, j], rng.random_range(-1.0..1.0));
            }
            inst.add_term("x", &[i], rng.random_range(-1.0..1.0));
            inst.add_term("z", &[i], rng.random_range(-1.0..1.0));
        }
        let out = ancilla_x_trick(&inst).unwrap();
        worst = worst.max((ground_energy(&inst).unwrap().energy - ground_energy(&out).unwrap().energy).abs());
    }
    outcome(worst <= 1e-10, format!("100 instances, largest ground-energy change {worst:.1e}"))
}

fn end_to_end() -> Outcome {
    let logical = HamiltonianInstance::new(2)
        .with_interaction("x", t(&[("X", 1.0)]))
        .with_interaction("z", t(&[("Z", 1.0)]))
        .with_interaction("xx", t(&[("XX", 1.0)]))
        .with_interaction("zz", t(&[("ZZ", 1.0)]))
        .with_term("x", &[0], 0.6)
        .with_term("z", &[1], -0.4)
        .with_term("xx", &[0, 1], 0.8)
        .with_term("zz", &[0, 1], 0.5);
    let want = ground_energy(&logical).unwrap().energy;
    // Δ grows like δ³‖V‖⁴ through the two stages; δ = 32 already exceeds the weight bound.
    let deltas = [4.0, 8.0, 16.0];
    let mut errs = Vec::new();
    let mut strengths = Vec::new();
    for d in deltas {
        let plan = encode_heisenberg(&logical, d).unwrap();
        strengths.push(plan.steps[0].delta_strength);
        let got = ground_energy(plan.physical()).unwrap().energy + plan.energy_offset();
        errs.push((got - want).abs() / want.abs());
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    outcome(
        monotone && errs[2] <= 0.1,
        format!("δ {deltas:?}, outer Δ {:?}, relative errors {:?}", strengths.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>(), errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()),
    )
}

#[test]
fn acceptance() {
    type Criterion = (usize, &'static str, fn() -> Outcome, Duration);
    let criteria: Vec<Criterion> = vec![
        (1, "golden classification table", golden_table, Duration::from_secs(1)),
        (2, "normal-form suite", normal_form_suite, Duration::from_secs(10)),
        (3, "diagonalizability characterizations agree", diagonalizability_characterizations, Duration::from_secs(10)),
        (4, "first-order bound 41/δ", first_order_bound, Duration::from_secs(120)),
        (5, "mediator closed forms and decay", mediator_forms, Duration::from_secs(180)),
        (6, "S2 swap matrices and cross combinations", s2_exactness, Duration::from_secs(30)),
        (7, "Lieb-Mattis ground state", lieb_mattis, Duration::from_secs(30)),
        (8, "complete-graph Heisenberg and XY sectors", complete_graph, Duration::from_secs(60)),
        (9, "skew triangle and line-gadget closed forms", skew_and_line_forms, Duration::from_secs(30)),
        (10, "local-term extraction gadgets", extraction, Duration::from_secs(30)),
        (11, "reductions preserve ground energy", reductions_preserve_energy, Duration::from_secs(60)),
        (12, "end-to-end Heisenberg encoding", end_to_end, Duration::from_secs(600)),
    ];
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= limit;
        println!(
            "criterion {id:>2} {} ({:.2} s, limit {} s) {name}: {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            out.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
