//! `qha`: file-level access to the finite quantum harmonic analysis toolkit.
//!
//! Exit codes: 0 success, 1 invalid arguments, 2 precondition failure,
//! 3 I/O or file-format failure. Errors are reported on standard error as
//! `error: <code>: <message>`.

mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qha_core::cohen::{
    classify, cohen_distribution, cohen_distribution_from_kernel, klm_check, klm_full_grid, phase_retrieval,
    spectrogram_decomposition, total_energy_check,
};
use qha_core::fourier_wigner::deconvolve_mask;
use qha_core::io;
use qha_core::localization::{localization_eigenproblem, mixed_state_loc, povm_verify, reconstruct_domain, spreading_uncertainty};
use qha_core::operators::tf_shift;
use qha_core::tf::{ambiguity, spectrogram, stft, wigner};
use qha_core::{selftest, CohenKernel, Domain, Fixtures, PhaseFn, QhaContext, QhaError, Result, Signal};
use rayon::ThreadPoolBuilder;
use serde_json::{json, Value};

use report::{complex, num, nums, Report};

#[derive(Parser)]
#[command(name = "qha", version, about = "Quantum harmonic analysis on the finite phase space Z_N x Z_N")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Grid {
    /// Grid size N.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = qha_core::DEFAULT_ZERO_TOL)]
    zero_tol: f64,
    #[arg(long, default_value_t = qha_core::DEFAULT_DECONV_TOL)]
    deconv_tol: f64,
}

impl Grid {
    fn ctx(&self) -> Result<QhaContext> {
        QhaContext::with_tolerances(self.n, self.zero_tol, self.deconv_tol)
    }
}

#[derive(Args)]
struct SignalWindow {
    #[command(flatten)]
    grid: Grid,
    #[arg(long)]
    signal: PathBuf,
    /// Preset (`gaussian`, `chirp-gaussian`, `impulse`, `flat`) or signal file.
    #[arg(long, default_value = "gaussian")]
    window: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Partition {
    Quadrants,
    Cells,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureKind {
    Signal,
    UnitSignal,
    Operator,
    Hermitian,
    State,
    Domain,
    Mask,
    Phasefn,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix of the time-frequency shift π(k, l).
    ShiftMatrix {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Short-time Fourier transform V_φψ.
    Stft(SignalWindow),
    /// Cross-ambiguity function A(ψ, φ).
    Ambiguity(SignalWindow),
    /// Cross-Wigner distribution W(ψ, φ); the window defaults to the signal itself.
    Wigner {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrogram |V_φψ|².
    Spectrogram(SignalWindow),
    /// Cohen's class distribution of a signal.
    Cohen {
        #[command(flatten)]
        grid: Grid,
        /// `spectrogram:<window>`, `wigner`, `born-jordan` or `custom:<operator file>`.
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Positivity and total-energy classification of a kernel.
    ClassifyKernel {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Spectrogram decomposition of a mixed state.
    Decompose {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// KLM positivity test of a real kernel function on point tuples.
    KlmCheck {
        #[command(flatten)]
        grid: Grid,
        /// Kernel function file.
        #[arg(long, conflicts_with = "kernel", required_unless_present = "kernel")]
        kernel_fn: Option<PathBuf>,
        /// Kernel preset whose kernel function is tested.
        #[arg(long)]
        kernel: Option<String>,
        /// Explicit tuple as `k,l;k,l;...`.
        #[arg(long, value_parser = parse_tuple, allow_hyphen_values = true)]
        points: Option<Tuple>,
        /// Number of random tuples when `--points` is absent.
        #[arg(long, default_value_t = 200)]
        tuples: usize,
        #[arg(long, default_value_t = 5)]
        tuple_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also test the tuple of all N² points, which decides positivity.
        #[arg(long)]
        full_grid: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Eigenproblem of the mixed-state localization operator χ_Ω ⋆ S.
    Localize {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write the operator χ_Ω ⋆ S.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// POVM axioms of Ω ↦ χ_Ω ⋆ S on a partition.
    PovmCheck {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value = "quadrants")]
        partition: Partition,
        #[arg(long, default_value_t = 4)]
        shifts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Recover Ω from H = χ_Ω ⋆ S.
    ReconstructDomain {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover f from H = f ⋆ S.
    DeconvolveMask {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover a signal up to a global phase from its spectrogram.
    RetrievePhase {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        spectrogram: PathBuf,
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Spreading-function uncertainty bounds for an operator and a domain.
    UncertaintyReport {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the identity suite and print a pass/fail table.
    Selftest {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a seeded random fixture.
    RandomFixture {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, value_enum)]
        kind: FixtureKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank of `state` fixtures.
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Done,
    /// Ran, but some asserted check failed.
    ChecksFailed,
}

fn exit_code(e: &QhaError) -> u8 {
    match e {
        QhaError::Io(_) | QhaError::Format(_) => 3,
        QhaError::InvalidDimension(_)
        | QhaError::InvalidTolerance(_)
        | QhaError::InvalidExponent(_)
        | QhaError::UnknownPreset(_) => 1,
        _ => 2,
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("QHA_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| format!("QHA_THREADS must be a non-negative integer, got `{raw}`"))?;
    if threads > 0 {
        ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: invalid-args: {msg}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {}: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}

fn finish(report: &Report, path: Option<&PathBuf>) -> Result<Outcome> {
    files::emit(path, &report.render())?;
    Ok(if report.all_pass() { Outcome::Done } else { Outcome::ChecksFailed })
}

/// A point tuple given on the command line.
#[derive(Clone)]
struct Tuple(Vec<(i64, i64)>);

fn parse_tuple(spec: &str) -> std::result::Result<Tuple, String> {
    let points: Vec<(i64, i64)> = spec
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (k, l) = pair.split_once(',').ok_or_else(|| format!("point `{pair}` is not `k,l`"))?;
            let parse = |s: &str| s.trim().parse::<i64>().map_err(|_| format!("bad coordinate `{s}`"));
            Ok((parse(k)?, parse(l)?))
        })
        .collect::<std::result::Result<_, String>>()?;
    if points.is_empty() {
        return Err("empty point list".into());
    }
    Ok(Tuple(points))
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::ShiftMatrix { grid, k, l, out } => {
            let ctx = grid.ctx()?;
            files::emit(out.as_ref(), &io::write_operator(&tf_shift(&ctx, ctx.point(k, l))))?;
        }
        Command::Stft(a) => signal_transform(a, stft)?,
        Command::Ambiguity(a) => signal_transform(a, ambiguity)?,
        Command::Spectrogram(a) => signal_transform(a, spectrogram)?,
        Command::Wigner { grid, signal, window, out } => {
            let ctx = grid.ctx()?;
            let psi = files::signal(&ctx, &signal)?;
            let phi = match window {
                Some(w) => files::window(&ctx, &w)?,
                None => psi.clone(),
            };
            files::emit(out.as_ref(), &io::write_phase_fn(&wigner(&psi, &phi)?))?;
        }
        Command::Cohen { grid, kernel, signal, out, report } => {
            let ctx = grid.ctx()?;
            let k = files::kernel(&ctx, &kernel)?;
            let psi = files::signal(&ctx, &signal)?;
            let q = cohen_distribution(&k, &psi)?;
            files::emit(out.as_ref(), &io::write_phase_fn(&q))?;
            if let Some(path) = report {
                let (lhs, rhs) = total_energy_check(&k, &psi)?;
                let via_kernel = cohen_distribution_from_kernel(&k.kernel_fn(), &psi)?;
                let scale = psi.norm_sqr() * k.op.op_norm();
                let mut r = Report::new("cohen", &ctx);
                r.field("kernel", Value::String(k.label.clone()))
                    .field("total_energy", json!({ "integral": complex(lhs), "norm_sq_times_trace": complex(rhs) }))
                    .bound("total_energy", (lhs - rhs).norm(), 1e-10 * rhs.norm().max(1.0))
                    .bound("kernel_side_agreement", q.max_abs_diff(&via_kernel), 1e-10 * scale.max(1.0))
                    .bound("sup_norm_bound", q.max_abs() - scale, 1e-10 * scale.max(1.0));
                return finish(&r, Some(&path));
            }
        }
        Command::ClassifyKernel { grid, kernel, report } => {
            let ctx = grid.ctx()?;
            let k = files::kernel(&ctx, &kernel)?;
            let cls = classify(&k)?;
            let round_trip = CohenKernel::from_kernel_fn(&k.kernel_fn(), "").op.max_abs_diff(&k.op);
            let mut r = Report::new("classify-kernel", &ctx);
            r.field("kernel", Value::String(k.label.clone()))
                .field("is_positive", Value::Bool(cls.is_positive))
                .field("energy_constant", num(cls.energy_constant))
                .field("is_correct_energy", Value::Bool(cls.is_correct_energy))
                .flag("correct_energy_implies_positive", !cls.is_correct_energy || cls.is_positive)
                .bound("kernel_round_trip", round_trip, 1e-10 * k.op.max_abs().max(1.0));
            return finish(&r, report.as_ref());
        }
        Command::Decompose { grid, state, report } => {
            let ctx = grid.ctx()?;
            let s = files::state(&ctx, &state)?;
            let pairs = spectrogram_decomposition(&s)?;
            let total: f64 = pairs.iter().map(|p| p.0).sum();
            let components: Vec<Value> = pairs
                .iter()
                .map(|(lambda, phi)| {
                    json!({
                        "lambda": num(*lambda),
                        "window": Value::Array(phi.values().iter().copied().map(complex).collect()),
                    })
                })
                .collect();
            let mut r = Report::new("decompose", &ctx);
            r.field("components", Value::Array(components))
                .field("lambda_sum", num(total))
                .bound("lambda_sum", (total - 1.0).abs(), 1e-10);
            return finish(&r, report.as_ref());
        }
        Command::KlmCheck { grid, kernel_fn, kernel, points, tuples, tuple_size, seed, full_grid, report } => {
            let ctx = grid.ctx()?;
            let phi = match (kernel_fn, kernel) {
                (Some(path), _) => files::phase_fn(&ctx, &path)?,
                (None, Some(spec)) => files::kernel(&ctx, &spec)?.kernel_fn(),
                (None, None) => unreachable!("clap requires one of the kernel flags"),
            };
            let tuple_list = match points {
                Some(Tuple(pts)) => vec![pts.into_iter().map(|(k, l)| ctx.point(k, l)).collect()],
                None => {
                    let mut fx = Fixtures::new(&ctx, seed);
                    (0..tuples).map(|_| fx.points(tuple_size.max(1))).collect()
                }
            };
            let mut min_eig = f64::INFINITY;
            let mut all_psd = true;
            for t in &tuple_list {
                let res = klm_check(&phi, t)?;
                all_psd &= res.psd;
                min_eig = min_eig.min(res.min_eig);
            }
            let mut r = Report::new("klm-check", &ctx);
            r.field("tuples", Value::from(tuple_list.len()))
                .field("all_psd", Value::Bool(all_psd))
                .field("min_eigenvalue", num(min_eig))
                .flag("all_tuples_psd", all_psd);
            if full_grid {
                let full = klm_full_grid(&phi)?;
                r.field("full_grid", json!({ "psd": full.psd, "min_eigenvalue": num(full.min_eig) }))
                    .flag("full_grid_psd", full.psd);
            }
            // a non-PSD tuple is a finding about the kernel, not a failure
            files::emit(report.as_ref(), &r.render())?;
        }
        Command::Localize { grid, domain, state, report, out } => {
            let ctx = grid.ctx()?;
            let d = files::domain(&ctx, &domain)?;
            let s = files::state(&ctx, &state)?;
            if let Some(path) = out {
                files::emit(Some(&path), &io::write_operator(&mixed_state_loc(&d, &s)?))?;
            }
            let rep = localization_eigenproblem(&d, &s)?;
            let mu = d.measure_f64();
            let mut r = Report::new("localize", &ctx);
            r.field("eigenvalues", nums(rep.eigen.eigenvalues.iter().copied()))
                .field("eigen_sum", num(rep.eigen_sum))
                .field("trace", num(rep.trace))
                .field("measure", num(mu))
                .field("measure_exact", Value::String(rep.domain_measure.to_string()))
                .bound("eigen_sum_equals_measure", (rep.eigen_sum - mu).abs(), 1e-10 * ctx.n() as f64)
                .bound("trace_equals_measure", (rep.trace - mu).abs(), 1e-10 * ctx.n() as f64)
                .bound("eigenvalues_at_most_one", rep.eigen.max() - 1.0, 1e-10)
                .bound("eigenvalues_non_negative", -rep.eigen.min(), 1e-10);
            return finish(&r, report.as_ref());
        }
        Command::PovmCheck { grid, state, partition, shifts, seed, report } => {
            let ctx = grid.ctx()?;
            let s = files::state(&ctx, &state)?;
            let parts = match partition {
                Partition::Quadrants => Domain::quadrants(&ctx),
                Partition::Cells => Domain::cells(&ctx),
            };
            let shift_points = Fixtures::new(&ctx, seed).points(shifts);
            let rep = povm_verify(s.op(), &parts, &shift_points)?;
            let mut r = Report::new("povm-check", &ctx);
            r.field("partition_size", Value::from(parts.len()))
                .field("partition_sum_error", num(rep.partition_sum_error))
                .field("covariance_error", num(rep.covariance_error))
                .field("min_eigenvalue", num(rep.min_eigenvalue))
                .field("identity_error", num(rep.identity_error))
                .bound("partition_sum_error", rep.partition_sum_error, 1e-9)
                .bound("covariance_error", rep.covariance_error, 1e-9)
                .bound("negative_eigenvalue", -rep.min_eigenvalue, 1e-9)
                .bound("identity_error", rep.identity_error, 1e-9);
            return finish(&r, report.as_ref());
        }
        Command::ReconstructDomain { grid, filter, state, out } => {
            let ctx = grid.ctx()?;
            let h = files::operator(&ctx, &filter)?;
            let s = files::operator(&ctx, &state)?;
            files::emit(out.as_ref(), &io::write_domain(&reconstruct_domain(&h, &s)?))?;
        }
        Command::DeconvolveMask { grid, filter, state, out } => {
            let ctx = grid.ctx()?;
            let h = files::operator(&ctx, &filter)?;
            let s = files::operator(&ctx, &state)?;
            files::emit(out.as_ref(), &io::write_phase_fn(&deconvolve_mask(&h, &s)?))?;
        }
        Command::RetrievePhase { grid, spectrogram: spec_path, window, out, report } => {
            let ctx = grid.ctx()?;
            let spec = files::phase_fn(&ctx, &spec_path)?;
            let phi = files::window(&ctx, &window)?;
            let psi = phase_retrieval(&spec, &phi)?;
            files::emit(out.as_ref(), &io::write_signal(&psi))?;
            if let Some(path) = report {
                let again = spectrogram(&psi, &phi)?;
                let err = again.max_abs_diff(&spec) / spec.max_abs().max(f64::MIN_POSITIVE);
                let mut r = Report::new("retrieve-phase", &ctx);
                r.field("norm", num(psi.norm())).bound("spectrogram_consistency", err, 1e-8);
                return finish(&r, Some(&path));
            }
        }
        Command::UncertaintyReport { grid, state, domain, p, report } => {
            let ctx = grid.ctx()?;
            let s = files::operator(&ctx, &state)?;
            let d = files::domain(&ctx, &domain)?;
            let u = spreading_uncertainty(&s, &d, p)?;
            let mut r = Report::new("uncertainty-report", &ctx);
            r.field("p", num(u.p))
                .field("epsilon", num(u.epsilon))
                .field("measure", num(u.measure))
                .field("finite_bound", num(u.finite_bound))
                .field("lieb_bound", num(u.lieb_bound))
                .field("lieb_holds", Value::Bool(u.lieb_holds))
                .check("finite_bound", u.finite_holds, Some(u.measure), Some(u.finite_bound));
            return finish(&r, report.as_ref());
        }
        Command::Selftest { grid, seed, report } => {
            let ctx = grid.ctx()?;
            let checks = selftest::run(&ctx, seed)?;
            let mut table = format!("qha selftest n={} seed={seed}\n", ctx.n());
            let mut r = Report::new("selftest", &ctx);
            r.field("seed", Value::from(seed));
            let mut passed = 0;
            for c in &checks {
                let status = match (c.tolerance, c.pass()) {
                    (None, _) => "INFO",
                    (Some(_), true) => "PASS",
                    (Some(_), false) => "FAIL",
                };
                passed += (c.tolerance.is_some() && c.pass()) as usize;
                let tol = c.tolerance.map(io::fmt_f64).unwrap_or_else(|| "-".into());
                table.push_str(&format!("{status}  {:<36} {:>24}  tol {tol}\n", c.name, io::fmt_f64(c.value)));
                r.check(c.name, c.pass(), Some(c.value), c.tolerance);
            }
            let asserted = checks.iter().filter(|c| c.tolerance.is_some()).count();
            table.push_str(&format!("{passed}/{asserted} checks passed\n"));
            files::emit(None, &table)?;
            if let Some(path) = report {
                files::emit(Some(&path), &r.render())?;
            }
            return Ok(if r.all_pass() { Outcome::Done } else { Outcome::ChecksFailed });
        }
        Command::RandomFixture { grid, kind, seed, rank, out } => {
            let ctx = grid.ctx()?;
            let mut fx = Fixtures::new(&ctx, seed);
            let text = match kind {
                FixtureKind::Signal => io::write_signal(&fx.signal()),
                FixtureKind::UnitSignal => io::write_signal(&fx.unit_signal()),
                FixtureKind::Operator => io::write_operator(&fx.operator()),
                FixtureKind::Hermitian => io::write_operator(&fx.hermitian()),
                FixtureKind::State => io::write_operator(fx.mixed_state(rank).op()),
                FixtureKind::Domain => io::write_domain(&fx.domain()),
                FixtureKind::Mask => io::write_phase_fn(&fx.real_mask()),
                FixtureKind::Phasefn => io::write_phase_fn(&fx.phase_fn()),
            };
            files::emit(out.as_ref(), &text)?;
        }
    }
    Ok(Outcome::Done)
}

fn signal_transform(a: SignalWindow, transform: fn(&Signal, &Signal) -> Result<PhaseFn>) -> Result<()> {
    let ctx = a.grid.ctx()?;
    let psi = files::signal(&ctx, &a.signal)?;
    let phi = files::window(&ctx, &a.window)?;
    files::emit(a.out.as_ref(), &io::write_phase_fn(&transform(&psi, &phi)?))
}
