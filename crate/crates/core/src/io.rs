//! Plain-text CSV formats.
//!
//! Each file starts with `# qha-<kind> N=<n>` and then has one row per entry:
//!
//! | kind       | row           | order          |
//! |------------|---------------|----------------|
//! | `phasefn`  | `k,l,re,im`   | k-major        |
//! | `domain`   | `k,l,flag`    | k-major, 0/1   |
//! | `operator` | `i,j,re,im`   | row-major      |
//! | `signal`   | `n,re,im`     | by index       |
//!
//! Numbers are written with 17 significant digits (`{:.16e}`). Readers accept
//! rows in any order but require every entry exactly once.

use num_complex::Complex64;

use crate::context::QhaContext;
use crate::error::{QhaError, Result};
use crate::operators::{OperatorMatrix, Signal};
use crate::phase_space::{Domain, PhaseFn};

/// `{:.16e}`: 17 significant digits, locale independent.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(kind: &str, n: usize) -> String {
    format!("# qha-{kind} N={n}\n")
}

pub fn write_phase_fn(f: &PhaseFn) -> String {
    let n = f.ctx().n();
    let mut out = header("phasefn", n);
    for z in f.ctx().points() {
        let v = f.get(z);
        out.push_str(&format!("{},{},{},{}\n", z.k, z.l, fmt_f64(v.re), fmt_f64(v.im)));
    }
    out
}

pub fn write_domain(d: &Domain) -> String {
    let n = d.ctx().n();
    let mut out = header("domain", n);
    for z in d.ctx().points() {
        out.push_str(&format!("{},{},{}\n", z.k, z.l, d.contains(z) as u8));
    }
    out
}

pub fn write_operator(a: &OperatorMatrix) -> String {
    let n = a.ctx().n();
    let mut out = header("operator", n);
    for i in 0..n {
        for j in 0..n {
            let v = a.get(i, j);
            out.push_str(&format!("{i},{j},{},{}\n", fmt_f64(v.re), fmt_f64(v.im)));
        }
    }
    out
}

pub fn write_signal(psi: &Signal) -> String {
    let mut out = header("signal", psi.ctx().n());
    for (i, v) in psi.values().iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", fmt_f64(v.re), fmt_f64(v.im)));
    }
    out
}

fn format_err(line: usize, msg: impl std::fmt::Display) -> QhaError {
    QhaError::Format(format!("line {line}: {msg}"))
}

/// Grid size declared by the header of any qha CSV, with its kind.
pub fn read_header(text: &str) -> Result<(String, usize)> {
    let first = text.lines().next().ok_or_else(|| QhaError::Format("empty file".into()))?;
    let rest = first
        .trim()
        .strip_prefix("# qha-")
        .ok_or_else(|| format_err(1, "missing `# qha-<kind> N=<n>` header"))?;
    let (kind, size) = rest.split_once(' ').ok_or_else(|| format_err(1, "malformed header"))?;
    let n = size
        .trim()
        .strip_prefix("N=")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| format_err(1, "malformed `N=<n>` in header"))?;
    Ok((kind.to_string(), n))
}

struct Table {
    rows: Vec<(usize, Vec<String>)>,
}

fn parse_table(text: &str, ctx: &QhaContext, kinds: &[&str], width: usize) -> Result<Table> {
    let (kind, n) = read_header(text)?;
    if !kinds.contains(&kind.as_str()) {
        return Err(format_err(1, format!("expected a {} file, found `{kind}`", kinds[0])));
    }
    if n != ctx.n() {
        return Err(format_err(1, format!("file has N={n}, expected N={}", ctx.n())));
    }
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if fields.len() != width {
            return Err(format_err(i + 1, format!("expected {width} fields, found {}", fields.len())));
        }
        rows.push((i + 1, fields));
    }
    Ok(Table { rows })
}

fn parse_index(line: usize, s: &str, bound: usize) -> Result<usize> {
    let v: usize = s.parse().map_err(|_| format_err(line, format!("bad index `{s}`")))?;
    if v >= bound {
        return Err(format_err(line, format!("index {v} out of range 0..{bound}")));
    }
    Ok(v)
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| format_err(line, format!("bad number `{s}`")))?;
    if !v.is_finite() {
        return Err(format_err(line, format!("non-finite number `{s}`")));
    }
    Ok(v)
}

/// Fill a dense array from `(line, index, value)` triples, each slot once.
fn fill<T: Clone>(len: usize, zero: T, items: Vec<(usize, usize, T)>) -> Result<Vec<T>> {
    let mut out = vec![None; len];
    for (line, idx, v) in items {
        if out[idx].is_some() {
            return Err(format_err(line, "duplicate entry"));
        }
        out[idx] = Some(v);
    }
    if let Some(missing) = out.iter().position(Option::is_none) {
        return Err(QhaError::Format(format!("missing entry #{missing}")));
    }
    Ok(out.into_iter().map(|v| v.unwrap_or_else(|| zero.clone())).collect())
}

pub fn read_phase_fn(text: &str, ctx: &QhaContext) -> Result<PhaseFn> {
    let n = ctx.n();
    let table = parse_table(text, ctx, &["phasefn"], 4)?;
    let mut items = Vec::with_capacity(n * n);
    for (line, f) in table.rows {
        let k = parse_index(line, &f[0], n)?;
        let l = parse_index(line, &f[1], n)?;
        items.push((line, k * n + l, Complex64::new(parse_f64(line, &f[2])?, parse_f64(line, &f[3])?)));
    }
    PhaseFn::from_values(ctx, fill(n * n, Complex64::new(0.0, 0.0), items)?)
}

/// Accepts `domain` files and, for convenience, `phasefn`-headed ones with
/// three columns.
pub fn read_domain(text: &str, ctx: &QhaContext) -> Result<Domain> {
    let n = ctx.n();
    let table = parse_table(text, ctx, &["domain", "phasefn"], 3)?;
    let mut items = Vec::with_capacity(n * n);
    for (line, f) in table.rows {
        let k = parse_index(line, &f[0], n)?;
        let l = parse_index(line, &f[1], n)?;
        let flag = match f[2].as_str() {
            "0" => false,
            "1" => true,
            other => return Err(format_err(line, format!("flag must be 0 or 1, found `{other}`"))),
        };
        items.push((line, k * n + l, flag));
    }
    Domain::from_mask(ctx, fill(n * n, false, items)?)
}

pub fn read_operator(text: &str, ctx: &QhaContext) -> Result<OperatorMatrix> {
    let n = ctx.n();
    let table = parse_table(text, ctx, &["operator"], 4)?;
    let mut items = Vec::with_capacity(n * n);
    for (line, f) in table.rows {
        let i = parse_index(line, &f[0], n)?;
        let j = parse_index(line, &f[1], n)?;
        items.push((line, i * n + j, Complex64::new(parse_f64(line, &f[2])?, parse_f64(line, &f[3])?)));
    }
    OperatorMatrix::from_row_major(ctx, &fill(n * n, Complex64::new(0.0, 0.0), items)?)
}

pub fn read_signal(text: &str, ctx: &QhaContext) -> Result<Signal> {
    let n = ctx.n();
    let table = parse_table(text, ctx, &["signal"], 3)?;
    let mut items = Vec::with_capacity(n);
    for (line, f) in table.rows {
        let i = parse_index(line, &f[0], n)?;
        items.push((line, i, Complex64::new(parse_f64(line, &f[1])?, parse_f64(line, &f[2])?)));
    }
    Signal::new(ctx, fill(n, Complex64::new(0.0, 0.0), items)?)
}
