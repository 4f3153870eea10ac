use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qha_core::io;
use qha_core::{
    CohenKernel, Domain, MixedState, OperatorMatrix, PhaseFn, QhaContext, QhaError, Result, Signal, Window,
};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| QhaError::Io(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        QhaError::Format(m) => QhaError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn signal(ctx: &QhaContext, path: &Path) -> Result<Signal> {
    in_file(path, io::read_signal(&read_text(path)?, ctx))
}

pub fn operator(ctx: &QhaContext, path: &Path) -> Result<OperatorMatrix> {
    in_file(path, io::read_operator(&read_text(path)?, ctx))
}

pub fn state(ctx: &QhaContext, path: &Path) -> Result<MixedState> {
    MixedState::new(operator(ctx, path)?)
}

pub fn phase_fn(ctx: &QhaContext, path: &Path) -> Result<PhaseFn> {
    in_file(path, io::read_phase_fn(&read_text(path)?, ctx))
}

pub fn domain(ctx: &QhaContext, path: &Path) -> Result<Domain> {
    in_file(path, io::read_domain(&read_text(path)?, ctx))
}

/// A window preset name, or else a path to an existing signal file.
pub fn window(ctx: &QhaContext, spec: &str) -> Result<Signal> {
    match spec.parse::<Window>() {
        Ok(w) => Ok(w.signal(ctx)),
        Err(e) if !Path::new(spec).exists() => Err(e),
        Err(_) => signal(ctx, Path::new(spec)),
    }
}

/// A kernel preset, or `custom:<operator file>`.
pub fn kernel(ctx: &QhaContext, spec: &str) -> Result<CohenKernel> {
    match spec.strip_prefix("custom:") {
        Some(path) => Ok(CohenKernel::custom(operator(ctx, Path::new(path))?)),
        None => CohenKernel::preset(ctx, spec),
    }
}

/// Write to `path`, or to standard output when absent.
pub fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| QhaError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| QhaError::Io(e.to_string()))
        }
    }
}
