//! Cohen's class distributions `Q_A(ψ) = (ψ ⊗ ψ) ⋆ Ǎ`.
//!
//! A kernel is stored as the operator `A`; the function-side kernel `φ`
//! with `L_φ = Ǎ` is derived on demand by [`CohenKernel::kernel_fn`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::context::{PhasePoint, QhaContext};
use crate::convolution::conv_op_op_spectral;
use crate::error::{QhaError, Result};
use crate::fourier_wigner::{fourier_wigner, inverse_fourier_wigner, weyl_symbol, weyl_transform, zero_set};
use crate::operators::{hermitian_eig, is_positive, parity_check, rank_one, MixedState, OperatorMatrix, Signal};
use crate::phase_space::{fn_convolve, symplectic_fourier, Domain, PhaseFn};
use crate::tf::{ambiguity, wigner, Window};

/// Largest admissible `|λ_i| / λ_1` (`i ≥ 2`) for a lifted spectrogram.
pub const RANK_ONE_RATIO: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct CohenKernel {
    pub op: OperatorMatrix,
    pub label: String,
}

impl CohenKernel {
    pub fn new(op: OperatorMatrix, label: impl Into<String>) -> Self {
        Self { op, label: label.into() }
    }

    pub fn custom(op: OperatorMatrix) -> Self {
        Self::new(op, "custom")
    }

    /// `A = φ ⊗ φ`, giving `Q_A(ψ) = |V_φ ψ|²`.
    pub fn spectrogram(window: &Signal) -> Result<Self> {
        Ok(Self::new(rank_one(window, window)?, "spectrogram"))
    }

    pub fn spectrogram_preset(ctx: &QhaContext, window: Window) -> Self {
        let g = window.signal(ctx);
        Self::new(rank_one(&g, &g).expect("same context"), format!("spectrogram:{window}"))
    }

    /// The kernel `φ = N δ_0`, so that `Q_A(ψ) = W(ψ, ψ)`; `A = P` for odd `N`.
    pub fn wigner(ctx: &QhaContext) -> Self {
        let phi = PhaseFn::delta(ctx, ctx.origin(), ctx.n() as f64);
        Self::from_kernel_fn(&phi, "wigner")
    }

    /// `φ = F_σ Θ` with `Θ(k, l) = sinc(π k l / N)` on symmetric representatives.
    pub fn born_jordan(ctx: &QhaContext) -> Self {
        let n = ctx.n();
        let sym = |m: usize| if m > n / 2 { m as f64 - n as f64 } else { m as f64 };
        let theta = PhaseFn::from_real_fn(ctx, |z| {
            let t = std::f64::consts::PI * sym(z.k) * sym(z.l) / n as f64;
            if t == 0.0 {
                1.0
            } else {
                t.sin() / t
            }
        });
        Self::from_kernel_fn(&symplectic_fourier(&theta), "born-jordan")
    }

    /// Kernel with `L_φ = Ǎ`, i.e. `A = P L_φ P`.
    pub fn from_kernel_fn(phi: &PhaseFn, label: impl Into<String>) -> Self {
        Self::new(parity_check(&weyl_transform(phi)), label)
    }

    /// Resolve `spectrogram:<window>`, `wigner` or `born-jordan`.
    pub fn preset(ctx: &QhaContext, name: &str) -> Result<Self> {
        match name {
            "wigner" => Ok(Self::wigner(ctx)),
            "born-jordan" => Ok(Self::born_jordan(ctx)),
            _ => match name.strip_prefix("spectrogram:") {
                Some(w) => Ok(Self::spectrogram_preset(ctx, w.parse()?)),
                None => Err(QhaError::UnknownPreset(name.to_string())),
            },
        }
    }

    pub fn ctx(&self) -> &QhaContext {
        self.op.ctx()
    }

    /// `φ = a_{Ǎ}`, the Weyl symbol of `Ǎ`.
    pub fn kernel_fn(&self) -> PhaseFn {
        weyl_symbol(&parity_check(&self.op))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CohenClassification {
    pub is_positive: bool,
    pub energy_constant: f64,
    pub is_correct_energy: bool,
}

/// `Q(ψ) = (ψ ⊗ ψ) ⋆ Ǎ`, evaluated in the spreading domain.
pub fn cohen_distribution(kernel: &CohenKernel, psi: &Signal) -> Result<PhaseFn> {
    kernel.ctx().ensure_same(psi.ctx())?;
    conv_op_op_spectral(&rank_one(psi, psi)?, &parity_check(&kernel.op))
}

/// The kernel-side path `W(ψ, ψ) ∗ φ`.
pub fn cohen_distribution_from_kernel(phi: &PhaseFn, psi: &Signal) -> Result<PhaseFn> {
    phi.ctx().ensure_same(psi.ctx())?;
    fn_convolve(&wigner(psi, psi)?, phi)
}

pub fn classify(kernel: &CohenKernel) -> Result<CohenClassification> {
    let op = &kernel.op;
    let tol = op.ctx().zero_tol();
    let defect = op.hermitian_defect();
    if defect > tol * op.max_abs().max(1.0) {
        return Err(QhaError::NonHermitianKernel(defect));
    }
    let tr = op.trace();
    if tr.im.abs() > tol {
        return Err(QhaError::NonHermitianKernel(tr.im.abs()));
    }
    let positive = is_positive(op);
    Ok(CohenClassification {
        is_positive: positive,
        energy_constant: tr.re,
        is_correct_energy: positive && (tr.re - 1.0).abs() <= tol,
    })
}

/// `((1/N) Σ_z Q(ψ)(z), ‖ψ‖² tr(A))`.
pub fn total_energy_check(kernel: &CohenKernel, psi: &Signal) -> Result<(Complex64, Complex64)> {
    let q = cohen_distribution(kernel, psi)?;
    let lhs = q.total_mass();
    let rhs = kernel.op.trace() * psi.norm_sqr();
    Ok((lhs, rhs))
}

/// Pairs `(λ_n, φ_n)` with `S = Σ λ_n φ_n ⊗ φ_n` and `λ_n > zero_tol`, so
/// that `Q_S(ψ) = Σ λ_n |V_{φ_n} ψ|²`.
pub fn spectrogram_decomposition(state: &MixedState) -> Result<Vec<(f64, Signal)>> {
    let tol = state.ctx().zero_tol();
    let spec = hermitian_eig(state.op())?;
    Ok(spec
        .eigenvalues
        .into_iter()
        .zip(spec.eigenvectors)
        .filter(|(lambda, _)| *lambda > tol)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlmResult {
    pub psd: bool,
    pub min_eig: f64,
    /// `max |eigenvalue|` of the test matrix.
    pub norm: f64,
}

fn require_real_kernel(phi: &PhaseFn) -> Result<()> {
    let imag = phi.max_imag();
    if imag > phi.ctx().zero_tol() * phi.max_abs().max(1.0) {
        return Err(QhaError::ComplexKernel(imag));
    }
    Ok(())
}

/// `M_jk = tr(L_φ π(z_k) π(z_j)*)`, written through `F_σ φ = F_W(L_φ)` as
/// `e^{2πi (k_k − k_j) l_k/N} conj(χ(z_j − z_k)) F_σφ(z_j − z_k)`.
///
/// Being a Gram matrix of `B* π(z_j)` when `L_φ = B B*`, it is PSD for every
/// positive `L_φ`.
pub fn klm_matrix(phi: &PhaseFn, points: &[PhasePoint]) -> Result<DMatrix<Complex64>> {
    require_real_kernel(phi)?;
    if points.is_empty() {
        return Err(QhaError::EmptyPoints);
    }
    let ctx = *phi.ctx();
    let spread = symplectic_fourier(phi);
    let m = points.len();
    Ok(DMatrix::from_fn(m, m, |j, k| {
        let (zj, zk) = (points[j], points[k]);
        let w = ctx.sub(zj, zk);
        let twist = ctx.root((zk.k as i64 - zj.k as i64) * zk.l as i64);
        twist * ctx.half_phase(w).conj() * spread.get(w)
    }))
}

/// PSD test `λ_min(M) ≥ −zero_tol · ‖M‖` of the matrix from [`klm_matrix`].
pub fn klm_check(phi: &PhaseFn, points: &[PhasePoint]) -> Result<KlmResult> {
    let m = klm_matrix(phi, points)?;
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let norm = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(KlmResult { psd: min_eig >= -phi.ctx().zero_tol() * norm, min_eig, norm })
}

/// [`klm_check`] on every grid point; `λ_min = N λ_min(L_φ)`, so this
/// decides positivity of `L_φ` exactly.
pub fn klm_full_grid(phi: &PhaseFn) -> Result<KlmResult> {
    let points: Vec<_> = phi.ctx().points().collect();
    klm_check(phi, &points)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CohenUncertainty {
    /// `(1/N) Σ_Ω |Q(ψ)|`.
    pub premise_value: f64,
    /// `(1 − ε) ‖A‖_op`.
    pub premise_threshold: f64,
    pub premise_holds: bool,
    pub measure: f64,
    pub bound_holds: bool,
}

/// Since `|Q(ψ)| ≤ ‖ψ‖² ‖A‖_op` pointwise, the premise forces `μ(Ω) ≥ 1 − ε`.
pub fn cohen_uncertainty(kernel: &CohenKernel, psi: &Signal, domain: &Domain, eps: f64) -> Result<CohenUncertainty> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > psi.ctx().zero_tol() {
        return Err(QhaError::NotNormalized(norm));
    }
    kernel.ctx().ensure_same(domain.ctx())?;
    let q = cohen_distribution(kernel, psi)?;
    let premise_value = q.map(|v| Complex64::new(v.norm(), 0.0)).mass_on(domain)?.re;
    let premise_threshold = (1.0 - eps) * kernel.op.op_norm();
    let premise_holds = premise_value >= premise_threshold;
    let measure = domain.measure_f64();
    let slack = crate::convolution::INEQUALITY_SLACK;
    Ok(CohenUncertainty {
        premise_value,
        premise_threshold,
        premise_holds,
        measure,
        bound_holds: !premise_holds || measure >= (1.0 - eps) - slack,
    })
}

/// Recover `ψ` up to a global phase from `|V_φ ψ|²`.
///
/// The spectrogram equals `(ψ ⊗ ψ) ⋆ (φ̌ ⊗ φ̌)`, so dividing its symplectic
/// Fourier transform by `F_W(φ̌ ⊗ φ̌)` gives `F_W(ψ ⊗ ψ)`.
pub fn phase_retrieval(spec: &PhaseFn, window: &Signal) -> Result<Signal> {
    spec.ctx().ensure_same(window.ctx())?;
    let ctx = *spec.ctx();
    let zeros = zero_set(&ambiguity(window, window)?, ctx.deconv_tol())?;
    if !zeros.is_empty() {
        return Err(QhaError::ZeroAmbiguity { zeros: zeros.count() });
    }
    let flipped = window.parity();
    let divisor = fourier_wigner(&rank_one(&flipped, &flipped)?);
    let target = symplectic_fourier(spec);
    let quotient = PhaseFn::from_fn(&ctx, |z| target.get(z) / divisor.get(z));
    let lifted = inverse_fourier_wigner(&quotient).hermitian_part();
    let eig = hermitian_eig(&lifted)?;
    let lead = eig.max();
    if spec.max_abs() == 0.0 {
        return Ok(Signal::zeros(&ctx));
    }
    let rest = eig.eigenvalues[1..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if lead <= 0.0 {
        return Err(QhaError::NotRankOne { ratio: f64::INFINITY });
    }
    if rest > RANK_ONE_RATIO * lead {
        return Err(QhaError::NotRankOne { ratio: rest / lead });
    }
    Ok(eig.eigenvectors[0].scale(Complex64::new(lead.sqrt(), 0.0)))
}
