//! Mixed-state localization operators `H_Ω = χ_Ω ⋆ S`, multiwindow filters,
//! the covariant POVM `Ω ↦ χ_Ω ⋆ S`, and reconstruction of `Ω` from `H_Ω`.

use num_complex::Complex64;
use num_rational::Ratio;

use crate::cohen::{cohen_distribution, CohenKernel};
use crate::context::PhasePoint;
use crate::convolution::{conv_fn_op, shift_sum, INEQUALITY_SLACK};
use crate::error::{QhaError, Result};
use crate::fourier_wigner::{deconvolve_mask, fourier_wigner};
use crate::operators::{conjugate_shift, hermitian_eig, rank_one, MixedState, OperatorMatrix, Signal, Spectrum};
use crate::phase_space::{Domain, PhaseFn};

/// Largest distance from `{0, 1}` tolerated in a deconvolved mask.
pub const BINARY_MASK_TOL: f64 = 0.1;

/// `χ_Ω ⋆ S`.
pub fn mixed_state_loc(domain: &Domain, state: &MixedState) -> Result<OperatorMatrix> {
    conv_fn_op(&domain.indicator(), state.op())
}

/// `F(Ω) = Σ_{z∈Ω} (1/N) α_z(S)`, the POVM evaluated by summing its density.
pub fn povm_integral(domain: &Domain, s: &OperatorMatrix) -> Result<OperatorMatrix> {
    domain.ctx().ensure_same(s.ctx())?;
    let w = Complex64::new(domain.ctx().weight(), 0.0);
    Ok(shift_sum(s, domain.points().into_iter().map(|z| (z, w))))
}

/// One term `λ · φ₂ ⊗ φ₁` of a multiwindow filter.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterTerm {
    pub lambda: Complex64,
    pub phi1: Signal,
    pub phi2: Signal,
}

fn window_operator(terms: &[FilterTerm]) -> Result<OperatorMatrix> {
    let first = terms.first().ok_or(QhaError::EmptyTerms)?;
    let mut acc = OperatorMatrix::zeros(first.phi1.ctx());
    for t in terms {
        acc = &acc + &rank_one(&t.phi2, &t.phi1)?.scale(t.lambda);
    }
    Ok(acc)
}

/// `f ⋆ Σ λ_n φ_{2,n} ⊗ φ_{1,n}`.
pub fn multiwindow_filter(f: &PhaseFn, terms: &[FilterTerm]) -> Result<OperatorMatrix> {
    let s = window_operator(terms)?;
    conv_fn_op(f, &s)
}

/// `Σ λ_n A_f^{φ_{1,n}, φ_{2,n}}`, one localization operator per term.
pub fn multiwindow_filter_termwise(f: &PhaseFn, terms: &[FilterTerm]) -> Result<OperatorMatrix> {
    let first = terms.first().ok_or(QhaError::EmptyTerms)?;
    let mut acc = OperatorMatrix::zeros(first.phi1.ctx());
    for t in terms {
        let loc = conv_fn_op(f, &rank_one(&t.phi2, &t.phi1)?)?;
        acc = &acc + &loc.scale(t.lambda);
    }
    Ok(acc)
}

/// Singular value expansion `S = Σ s_n u_n ⊗ v_n` as filter terms
/// `(s_n, φ₁ = v_n, φ₂ = u_n)`, descending; values `≤ zero_tol · s_1` are dropped.
pub fn filter_from_operator(s: &OperatorMatrix) -> Vec<FilterTerm> {
    let ctx = *s.ctx();
    let svd = s.matrix().clone().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let top = order.first().map(|&i| svd.singular_values[i]).unwrap_or(0.0);
    order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > ctx.zero_tol() * top && top > 0.0)
        .map(|i| {
            let phi2 = u.column(i).iter().copied().collect();
            let phi1 = v_t.row(i).iter().map(|x| x.conj()).collect();
            FilterTerm {
                lambda: Complex64::new(svd.singular_values[i], 0.0),
                phi1: Signal::new(&ctx, phi1).expect("length matches context"),
                phi2: Signal::new(&ctx, phi2).expect("length matches context"),
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PovmReport {
    pub partition_sum_error: f64,
    pub covariance_error: f64,
    pub min_eigenvalue: f64,
    pub identity_error: f64,
}

impl PovmReport {
    pub fn within(&self, tol: f64) -> bool {
        self.partition_sum_error <= tol
            && self.covariance_error <= tol
            && self.identity_error <= tol
            && self.min_eigenvalue >= -tol
    }
}

fn check_partition(partition: &[Domain], total: usize) -> Result<()> {
    let mut hits = vec![0usize; total];
    for d in partition {
        for (h, &m) in hits.iter_mut().zip(d.mask()) {
            *h += m as usize;
        }
    }
    if let Some(i) = hits.iter().position(|&h| h > 1) {
        return Err(QhaError::NotAPartition(format!("point #{i} is covered more than once")));
    }
    if let Some(i) = hits.iter().position(|&h| h == 0) {
        return Err(QhaError::NotAPartition(format!("point #{i} is not covered")));
    }
    Ok(())
}

/// POVM axioms of `Ω ↦ χ_Ω ⋆ S` on a partition, plus covariance
/// `α_z(F(Ω_1)) = F(Ω_1 + z)` for each shift.
///
/// `S` need not be a state; eigenvalues are taken from the Hermitian part.
pub fn povm_verify(s: &OperatorMatrix, partition: &[Domain], shifts: &[PhasePoint]) -> Result<PovmReport> {
    let ctx = *s.ctx();
    for d in partition {
        ctx.ensure_same(d.ctx())?;
    }
    check_partition(partition, ctx.n() * ctx.n())?;
    let identity = OperatorMatrix::identity(&ctx);
    let mut sum = OperatorMatrix::zeros(&ctx);
    let mut min_eigenvalue = f64::INFINITY;
    for d in partition {
        let f = conv_fn_op(&d.indicator(), s)?;
        min_eigenvalue = min_eigenvalue.min(hermitian_eig(&f.hermitian_part())?.min());
        sum = &sum + &f;
    }
    let full = conv_fn_op(&Domain::full(&ctx).indicator(), s)?;
    let first = &partition[0];
    let f1 = conv_fn_op(&first.indicator(), s)?;
    let mut covariance_error = 0.0f64;
    for &z in shifts {
        let moved = conv_fn_op(&first.translate(z).indicator(), s)?;
        covariance_error = covariance_error.max((&conjugate_shift(&f1, z) - &moved).op_norm());
    }
    Ok(PovmReport {
        partition_sum_error: (&sum - &identity).op_norm(),
        covariance_error,
        min_eigenvalue,
        identity_error: (&full - &identity).op_norm(),
    })
}

fn require_unit(psi: &Signal) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > psi.ctx().zero_tol() {
        return Err(QhaError::NotNormalized(norm));
    }
    Ok(())
}

/// `μ_ψ(Ω) = ⟨F(Ω) ψ, ψ⟩`.
pub fn prob_measure(state: &MixedState, psi: &Signal, domain: &Domain) -> Result<f64> {
    require_unit(psi)?;
    let f = mixed_state_loc(domain, state)?;
    Ok(f.quadratic_form(psi)?.re)
}

/// `μ_ψ(Ω) = (1/N) Σ_{z∈Ω} Q_S(ψ)(z)`, through the Cohen distribution with kernel `S`.
pub fn prob_measure_from_density(state: &MixedState, psi: &Signal, domain: &Domain) -> Result<f64> {
    require_unit(psi)?;
    let q = cohen_distribution(&CohenKernel::custom(state.op().clone()), psi)?;
    Ok(q.mass_on(domain)?.re)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationReport {
    pub eigen: Spectrum,
    pub eigen_sum: f64,
    pub domain_measure: Ratio<u64>,
    pub trace: f64,
}

pub fn localization_eigenproblem(domain: &Domain, state: &MixedState) -> Result<LocalizationReport> {
    let h = mixed_state_loc(domain, state)?;
    let eigen = hermitian_eig(&h)?;
    Ok(LocalizationReport {
        eigen_sum: eigen.sum(),
        domain_measure: domain.measure(),
        trace: h.trace().re,
        eigen,
    })
}

/// Recover `Ω` from `H = χ_Ω ⋆ S` by deconvolution and rounding at 1/2.
pub fn reconstruct_domain(h: &OperatorMatrix, s: &OperatorMatrix) -> Result<Domain> {
    let f = deconvolve_mask(h, s)?;
    let ctx = *f.ctx();
    let mut worst = (0.0f64, 0, 0);
    for z in ctx.points() {
        let v = f.get(z);
        let dev = v.re.abs().min((v.re - 1.0).abs()).max(v.im.abs());
        if dev > worst.0 {
            worst = (dev, z.k, z.l);
        }
    }
    if worst.0 > BINARY_MASK_TOL {
        return Err(QhaError::NonBinaryMask { deviation: worst.0, k: worst.1, l: worst.2 });
    }
    Ok(Domain::from_fn(&ctx, |z| f.get(z).re > 0.5))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadingUncertainty {
    pub p: f64,
    /// `1 − (1/N) Σ_Ω |F_W Ŝ|²` for `Ŝ = S / ‖S‖_{T²}`.
    pub epsilon: f64,
    pub measure: f64,
    /// `((1 − ε) / ‖Ŝ‖²_{T^{p′}})^{p/(p−2)}`, from Hölder and Hausdorff–Young.
    pub finite_bound: f64,
    pub finite_holds: bool,
    /// `(1 − ε)^{p/(p−2)} (p/2)^{2/(p−2)} / ‖Ŝ‖_{T¹}^{2p/(p−2)}`.
    pub lieb_bound: f64,
    pub lieb_holds: bool,
}

pub fn spreading_uncertainty(s: &OperatorMatrix, domain: &Domain, p: f64) -> Result<SpreadingUncertainty> {
    if !(p > 2.0) || p.is_infinite() {
        return Err(QhaError::InvalidExponent(format!("uncertainty exponent must satisfy 2 < p < ∞, got {p}")));
    }
    s.ctx().ensure_same(domain.ctx())?;
    let hs = s.frobenius();
    if hs == 0.0 {
        return Err(QhaError::AllZero);
    }
    let unit = s.scale(Complex64::new(1.0 / hs, 0.0));
    let concentration = fourier_wigner(&unit).abs_sq().mass_on(domain)?.re;
    let epsilon = 1.0 - concentration;
    let measure = domain.measure_f64();
    let dual = p / (p - 1.0);
    let expo = p / (p - 2.0);
    let finite_bound = (concentration.max(0.0) / unit.schatten_norm(dual)?.powi(2)).powf(expo);
    let lieb_bound = concentration.max(0.0).powf(expo) * (p / 2.0).powf(2.0 / (p - 2.0))
        / unit.schatten_norm(1.0)?.powf(2.0 * expo);
    let holds = |bound: f64| measure >= bound - INEQUALITY_SLACK * bound.max(1.0);
    Ok(SpreadingUncertainty {
        p,
        epsilon,
        measure,
        finite_bound,
        finite_holds: holds(finite_bound),
        lieb_bound,
        lieb_holds: holds(lieb_bound),
    })
}
