use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hamclass_core::gadgets::{
    encode_heisenberg, encode_xy, encode_xzskew, one_state, pauli_strings, product_mediators, qubit_pin, strings_distance, GadgetPlan,
    GadgetStep, VERIFY_MAX_QUBITS,
};
use hamclass_core::oracles::{
    complete_graph_instance, complete_heisenberg_printed_constant, complete_heisenberg_spectrum, dicke_state, heisenberg_table,
    lieb_mattis_ground_energy, lieb_mattis_instance, lieb_mattis_state, lieb_mattis_swap_expectation, lieb_mattis_swap_printed, xy_maximum,
    xy_maximum_printed, xy_sector_eigenvalue, xy_table,
};
use hamclass_core::spectrum::eigensystem_seeded;
use hamclass_core::{classify, read_instance, read_interaction_set, write_instance, Error, ErrorKind, HamiltonianInstance, Mode};
use serde_json::{json, Value};

use crate::report::{discrepancy, num, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_ARITY: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_BOUND: i32 = 5;
pub const EXIT_NUMERIC: i32 = 6;
pub const EXIT_INTERNAL: i32 = 1;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Parse => EXIT_PARSE,
                ErrorKind::Arity => EXIT_ARITY,
                ErrorKind::Unsupported | ErrorKind::Precondition => EXIT_UNSUPPORTED,
                ErrorKind::Numeric => EXIT_NUMERIC,
                ErrorKind::Internal => EXIT_INTERNAL,
            },
            CliError::Io(..) => EXIT_PARSE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

// ---------------------------------------------------------------------------

pub fn classify_cmd(set_file: &Path, mode: Mode) -> CliResult<Report> {
    let text = read(set_file)?;
    let mut report = Report::new("classify");
    report.input(text.as_bytes());
    report.input(format!("{mode:?}").as_bytes());
    let set = read_interaction_set(&text)?;
    let tables: Vec<_> = set.iter().map(|(_, t)| t.clone()).collect();
    let c = classify(&tables, mode)?;
    report.set("interactions", json!(set.iter().map(|(k, _)| k.clone()).collect::<Vec<_>>()));
    report.set("classification", serde_json::to_value(&c).map_err(|e| Error::Internal(e.to_string()))?);
    for w in &c.warnings {
        report.warn(w.clone());
    }
    report.quiet.push(c.label.as_str().into());
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Heisenberg,
    Xy,
    Xzskew,
    /// Pin one qubit to |0⟩ with a heavy projector onto |1⟩.
    Pin,
    /// Realize every 2-local product term through a mediator qubit.
    Mediator,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Heisenberg => "heisenberg",
            Target::Xy => "xy",
            Target::Xzskew => "xzskew",
            Target::Pin => "pin",
            Target::Mediator => "mediator",
        }
    }

    fn parse(s: &str) -> CliResult<Self> {
        <Target as ValueEnum>::from_str(s, false).map_err(|_| CliError::Core(Error::parse("target", format!("unknown target {s:?}"))))
    }
}

pub fn build_plan(logical: &HamiltonianInstance, target: Target, delta: f64, qubit: Option<usize>) -> CliResult<GadgetPlan> {
    Ok(match target {
        Target::Heisenberg => encode_heisenberg(logical, delta)?,
        Target::Xy => encode_xy(logical, delta)?,
        Target::Xzskew => encode_xzskew(logical, delta)?,
        Target::Pin => {
            if logical.n == 0 {
                return Err(Error::WrongArity { expected: 1, got: 0 }.into());
            }
            let q = qubit.unwrap_or(logical.n - 1);
            let step = qubit_pin(logical, q, one_state(), delta)?;
            GadgetPlan::from_steps(step.predicted_effective.clone(), vec![step])
        }
        Target::Mediator => GadgetPlan::from_steps(logical.clone(), vec![product_mediators(logical, delta)?]),
    })
}

fn step_json(step: &GadgetStep) -> Value {
    let heavy: Vec<usize> =
        step.physical.terms.iter().enumerate().filter(|(_, t)| step.added_terms.contains(t)).map(|(i, _)| i).collect();
    json!({
        "kind": step.kind,
        "delta": step.delta,
        "delta_strength": step.delta_strength,
        "predicted_error": step.predicted_error,
        "error_asserted": step.error_asserted,
        "new_qubits": step.new_qubits,
        "physical_qubits": step.physical.n,
        "logical_qubits": step.predicted_effective.n,
        "logical_embedding": step.logical_embedding(),
        "heavy_term_indices": heavy,
        "energy_offset": step.energy_offset,
    })
}

fn sidecar(plan: &GadgetPlan, source: &HamiltonianInstance, target: Target, delta: f64, qubit: Option<usize>) -> Value {
    json!({
        "encoding": target.name(),
        "delta": num(delta),
        "qubit": qubit,
        "logical_source": source.to_json(),
        "total_qubits": plan.total_qubits,
        "steps": plan.steps.iter().map(step_json).collect::<Vec<_>>(),
        "energy_offset": num(plan.energy_offset()),
        "predicted_error": num(plan.composed_error),
    })
}

pub fn compile_cmd(
    instance_file: &Path,
    target: Target,
    delta: f64,
    qubit: Option<usize>,
    out: &Path,
    plan_out: Option<&Path>,
) -> CliResult<Report> {
    let text = read(instance_file)?;
    let mut report = Report::new("compile");
    report.input(text.as_bytes());
    report.input(format!("{} {delta} {qubit:?}", target.name()).as_bytes());
    let logical = read_instance(&text)?;
    let plan = build_plan(&logical, target, delta, qubit)?;
    let plan_path = plan_out.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut p = out.as_os_str().to_owned();
        p.push(".plan.json");
        PathBuf::from(p)
    });
    let side = crate::report::stringify_floats(sidecar(&plan, &logical, target, delta, qubit));
    write(out, &write_instance(plan.physical()))?;
    write(&plan_path, &(serde_json::to_string_pretty(&side).unwrap_or_default() + "\n"))?;
    report.set("target", json!(target.name()));
    report.set("physical_file", json!(out.display().to_string()));
    report.set("plan_file", json!(plan_path.display().to_string()));
    report.set("physical_qubits", json!(plan.total_qubits));
    report.set("logical_qubits", json!(logical.n));
    report.set("steps", json!(plan.steps.iter().map(step_json).collect::<Vec<_>>()));
    report.set("energy_offset", json!(plan.energy_offset()));
    report.set("predicted_error", json!(plan.composed_error));
    if plan.steps.iter().any(|s| !s.error_asserted) {
        report.warn("predicted_error includes estimates that are not proven bounds");
    }
    report.quiet.push(num(plan.composed_error));
    Ok(report)
}

// ---------------------------------------------------------------------------

struct Sidecar {
    target: Target,
    delta: f64,
    qubit: Option<usize>,
    logical: HamiltonianInstance,
}

fn parse_sidecar(text: &str) -> CliResult<Sidecar> {
    let bad = |m: &str| CliError::Core(Error::parse("plan", m.to_string()));
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
    let target = Target::parse(doc.get("encoding").and_then(Value::as_str).ok_or_else(|| bad("missing encoding"))?)?;
    let delta = match doc.get("delta") {
        Some(Value::String(s)) => s.parse::<f64>().map_err(|_| bad("delta is not a number"))?,
        Some(Value::Number(n)) => n.as_f64().unwrap_or(f64::NAN),
        _ => return Err(bad("missing delta")),
    };
    let qubit = doc.get("qubit").and_then(Value::as_u64).map(|q| q as usize);
    let source = doc.get("logical_source").ok_or_else(|| bad("missing logical_source"))?;
    let logical = read_instance(&source.to_string())?;
    Ok(Sidecar { target, delta, qubit, logical })
}

fn check_steps(steps: &[GadgetStep]) -> CliResult<(Vec<Value>, bool, Vec<Option<f64>>)> {
    let mut rows = Vec::new();
    let mut violated = false;
    let mut distances = Vec::new();
    for (i, step) in steps.iter().enumerate() {
        if step.physical.n > VERIFY_MAX_QUBITS {
            rows.push(json!({"step": i, "kind": step.kind, "skipped": format!("{} physical qubits exceed {}", step.physical.n, VERIFY_MAX_QUBITS)}));
            distances.push(None);
            continue;
        }
        let c = step.verify()?;
        violated |= c.asserted && !c.within;
        distances.push(Some(c.distance));
        rows.push(json!({
            "step": i,
            "kind": step.kind,
            "distance": c.distance,
            "bound": c.bound,
            "bound_asserted": c.asserted,
            "pass": c.within,
            "low_dim": c.low_dim,
        }));
    }
    Ok((rows, violated, distances))
}

/// Least-squares slope of log y against log x.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

pub fn verify_cmd(instance_file: &Path, plan_file: &Path, sweep: &[f64]) -> CliResult<(Report, i32)> {
    let inst_text = read(instance_file)?;
    let plan_text = read(plan_file)?;
    let mut report = Report::new("verify-gadget");
    report.input(inst_text.as_bytes());
    report.input(plan_text.as_bytes());
    report.input(format!("{sweep:?}").as_bytes());
    let side = parse_sidecar(&plan_text)?;
    let physical = read_instance(&inst_text)?;
    let mut plan = build_plan(&side.logical, side.target, side.delta, side.qubit)?;
    let mut violated = false;
    if let Some(first) = plan.steps.first_mut() {
        let diff = strings_distance(&pauli_strings(&first.physical), &pauli_strings(&physical));
        if physical.n != first.physical.n || diff > 1e-9 * first.delta_strength.max(1.0) {
            report.warn(format!(
                "supplied physical instance differs from the recompiled plan (largest coefficient difference {}); verifying the supplied instance",
                num(diff)
            ));
            if physical.n != first.physical.n {
                return Err(Error::WrongArity { expected: first.physical.n, got: physical.n }.into());
            }
            first.physical = physical;
        }
        let (rows, v, _) = check_steps(&plan.steps)?;
        violated |= v;
        report.set("steps", json!(rows));
    } else {
        report.set("steps", json!([]));
    }

    if !sweep.is_empty() {
        let mut per_delta = Vec::new();
        let mut series: Vec<Vec<Option<f64>>> = Vec::new();
        for &d in sweep {
            let p = build_plan(&side.logical, side.target, d, side.qubit)?;
            let (rows, v, dist) = check_steps(&p.steps)?;
            violated |= v;
            per_delta.push(json!({"delta": d, "steps": rows}));
            series.push(dist);
        }
        let n_steps = series.iter().map(Vec::len).max().unwrap_or(0);
        let slopes: Vec<Value> = (0..n_steps)
            .map(|i| {
                let (xs, ys): (Vec<f64>, Vec<f64>) =
                    sweep.iter().zip(&series).filter_map(|(d, s)| s.get(i).copied().flatten().map(|y| (*d, y))).unzip();
                json!({"step": i, "slope": log_slope(&xs, &ys)})
            })
            .collect();
        report.set("sweep", json!(per_delta));
        report.set("fitted_slopes", json!(slopes));
    }
    report.set("pass", json!(!violated));
    report.quiet.push(if violated { "fail".into() } else { "pass".into() });
    Ok((report, if violated { EXIT_BOUND } else { EXIT_OK }))
}

// ---------------------------------------------------------------------------

pub fn spectrum_cmd(instance_file: &Path, k: usize, seed: u64) -> CliResult<Report> {
    let text = read(instance_file)?;
    let mut report = Report::new("spectrum");
    report.input(text.as_bytes());
    report.input(format!("{k} {seed}").as_bytes());
    let inst = read_instance(&text)?;
    let op = inst.assemble()?;
    let es = eigensystem_seeded(&op, k, seed)?;
    report.set("n", json!(inst.n));
    report.set("values", json!(es.values));
    report.set("residual_norms", json!(es.residual_norms));
    report.set("solver", json!(es.solver));
    if let Some(th) = &inst.thresholds {
        let g = hamclass_core::ground_energy(&inst)?;
        report.set("thresholds", json!({"a": th.a, "b": th.b}));
        report.set("verdict", json!(g.verdict));
    }
    report.quiet.extend(es.values.iter().map(|v| num(*v)));
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleName {
    LiebMattis,
    CompleteHeisenberg,
    XySector,
}

const ORACLE_DENSE_QUBITS: usize = 10;

fn residual(inst: &HamiltonianInstance, psi: &hamclass_core::linalg::CVec, value: f64) -> CliResult<f64> {
    let op = inst.assemble()?;
    let hv = op.apply(psi);
    Ok((hv - psi * hamclass_core::linalg::re(value)).norm())
}

pub fn oracle_cmd(name: OracleName, params: &[usize]) -> CliResult<Report> {
    let mut report = Report::new("oracle");
    report.input(format!("{name:?} {params:?}").as_bytes());
    let need = |k: usize| -> CliResult<()> {
        if params.len() != k {
            return Err(Error::WrongArity { expected: k, got: params.len() }.into());
        }
        Ok(())
    };
    match name {
        OracleName::LiebMattis => {
            need(1)?;
            let n = params[0];
            if n == 0 || 2 * n > 14 {
                return Err(Error::ArityTooLarge { got: 2 * n, max: 14 }.into());
            }
            let e = lieb_mattis_ground_energy(n);
            let cross = lieb_mattis_swap_expectation(n, 0, n);
            report.set("n", json!(n));
            report.set("ground_energy", json!(e));
            report.set("state_residual", json!(residual(&lieb_mattis_instance(n), &lieb_mattis_state(n), e)?));
            if n >= 2 {
                report.set("same_block_swap", json!(lieb_mattis_swap_expectation(n, 0, 1)));
            }
            report.set("cross_block_swap", json!(cross));
            report.set("cross_block_swap_sum", json!(cross * (n * n) as f64));
            discrepancy(&mut report, "cross-block swap expectation", lieb_mattis_swap_printed(n), cross);
            report.quiet.push(num(e));
            report.quiet.push(num(cross));
        }
        OracleName::CompleteHeisenberg => {
            need(1)?;
            let m = params[0];
            if m == 0 || m > 14 {
                return Err(Error::ArityTooLarge { got: m, max: 14 }.into());
            }
            let levels = complete_heisenberg_spectrum(m);
            report.set("m", json!(m));
            report.set("levels", json!(levels));
            if m <= ORACLE_DENSE_QUBITS {
                let op = complete_graph_instance(m, heisenberg_table(), "heisenberg").assemble()?;
                let vals = hamclass_core::linalg::eigvalsh(op.dense());
                let mut distinct: Vec<f64> = Vec::new();
                for v in vals {
                    if distinct.last().is_none_or(|l| (v - l).abs() > 1e-9) {
                        distinct.push(v);
                    }
                }
                let matches = distinct.len() == levels.len() && distinct.iter().zip(&levels).all(|(a, b)| (a - b.energy).abs() <= 1e-9);
                report.set("numeric_levels", json!(distinct));
                report.set("numeric_match", json!(matches));
            }
            discrepancy(&mut report, "complete-graph Heisenberg additive constant", complete_heisenberg_printed_constant(m), -1.5 * m as f64);
            report.quiet.extend(levels.iter().map(|l| num(l.energy)));
        }
        OracleName::XySector => {
            need(2)?;
            let (n, k) = (params[0], params[1]);
            if k > n {
                return Err(Error::parse("k", format!("sector {k} exceeds n = {n}")).into());
            }
            if n == 0 || n > 14 {
                return Err(Error::ArityTooLarge { got: n, max: 14 }.into());
            }
            let value = xy_sector_eigenvalue(n, k);
            report.set("n", json!(n));
            report.set("k", json!(k));
            report.set("value", json!(value));
            if n <= 12 && n >= 2 {
                let inst = complete_graph_instance(n, xy_table(), "xy");
                report.set("dicke_residual", json!(residual(&inst, &dicke_state(n, k), value)?));
            }
            report.set("maximum", json!(xy_maximum(n)));
            if n % 2 == 0 {
                discrepancy(&mut report, "complete-graph XY maximum", xy_maximum_printed(n), xy_maximum(n));
            }
            report.quiet.push(num(value));
        }
    }
    Ok(report)
}
