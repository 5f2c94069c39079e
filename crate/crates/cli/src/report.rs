use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Decimal string with at most 12 significant digits.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
    if rounded == 0.0 {
        return "0".into();
    }
    if rounded.abs() < 1e-6 || rounded.abs() >= 1e15 {
        return format!("{rounded:e}");
    }
    format!("{rounded}")
}

/// Replace every floating-point number in `v` by its decimal string.
pub fn stringify_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => Value::String(num(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_floats(v))).collect()),
        other => other,
    }
}

pub struct Report {
    pub command: String,
    hasher: Sha256,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
    /// The value printed under `--quiet`.
    pub quiet: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        Report { command: command.into(), hasher, results: Map::new(), warnings: Vec::new(), quiet: Vec::new() }
    }

    /// Feed an input (file contents or argument) into the digest.
    pub fn input(&mut self, bytes: &[u8]) {
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.results.insert(key.into(), value);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn render(self, quiet: bool) -> String {
        if quiet {
            return self.quiet.join("\n");
        }
        let doc = json!({
            "command": self.command,
            "inputs_digest": hex::encode(self.hasher.finalize()),
            "results": stringify_floats(Value::Object(self.results)),
            "warnings": self.warnings,
            "tool_version": env!("CARGO_PKG_VERSION"),
        });
        serde_json::to_string_pretty(&doc).unwrap_or_default()
    }
}

/// Note when a commonly printed closed form disagrees with the derived one.
pub fn discrepancy(report: &mut Report, what: &str, printed: f64, derived: f64) {
    if (printed - derived).abs() > 1e-9 * derived.abs().max(1.0) {
        report.warn(format!("{what}: printed value {} is inconsistent with the derived value {}", num(printed), num(derived)));
    }
}
