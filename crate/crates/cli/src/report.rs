//! JSON reports shared by every subcommand.

use qha_core::io::fmt_f64;
use qha_core::QhaContext;
use serde_json::{Map, Number, Value};

/// A finite float as a JSON number with 17 significant digits; non-finite
/// values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(fmt_f64(x).parse::<Number>().expect("formatted float parses"))
}

pub fn nums(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(num).collect())
}

pub fn complex(c: qha_core::Complex64) -> Value {
    Value::Array(vec![num(c.re), num(c.im)])
}

pub struct Report {
    root: Map<String, Value>,
    checks: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, ctx: &QhaContext) -> Self {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(command.into()));
        root.insert("n".into(), Value::from(ctx.n()));
        let mut tol = Map::new();
        tol.insert("zero_tol".into(), num(ctx.zero_tol()));
        tol.insert("deconv_tol".into(), num(ctx.deconv_tol()));
        root.insert("tolerances".into(), Value::Object(tol));
        Self { root, checks: Map::new() }
    }

    pub fn field(&mut self, name: &str, value: Value) -> &mut Self {
        self.root.insert(name.into(), value);
        self
    }

    /// `value ≤ tolerance`.
    pub fn bound(&mut self, name: &str, value: f64, tolerance: f64) -> &mut Self {
        self.check(name, value <= tolerance, Some(value), Some(tolerance))
    }

    pub fn flag(&mut self, name: &str, pass: bool) -> &mut Self {
        self.check(name, pass, None, None)
    }

    pub fn check(&mut self, name: &str, pass: bool, value: Option<f64>, tolerance: Option<f64>) -> &mut Self {
        let mut entry = Map::new();
        entry.insert("pass".into(), Value::Bool(pass));
        if let Some(v) = value {
            entry.insert("value".into(), num(v));
        }
        if let Some(t) = tolerance {
            entry.insert("tolerance".into(), num(t));
        }
        self.checks.insert(name.into(), Value::Object(entry));
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c["pass"] == Value::Bool(true))
    }

    pub fn render(&self) -> String {
        let mut root = self.root.clone();
        root.insert("checks".into(), Value::Object(self.checks.clone()));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
        s.push('\n');
        s
    }
}
