//! Fourier–Wigner transform (spreading function), Weyl calculus and
//! deconvolution of filters in the spreading domain.

use num_complex::Complex64;

use crate::context::QhaContext;
use crate::error::{QhaError, Result};
use crate::fft::Dft;
use crate::operators::OperatorMatrix;
use crate::phase_space::{fn_convolve, symplectic_fourier, Domain, PhaseFn};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `F_W(S)(z) = χ(z) tr(π(z)* S)` with the half-phase χ of
/// [`QhaContext::half_phase`].
///
/// `tr(π(k,l)* S) = Σ_m e^{−2πi lm/N} S[m, m−k]`, one DFT per diagonal.
pub fn fourier_wigner(s: &OperatorMatrix) -> PhaseFn {
    let ctx = *s.ctx();
    let n = ctx.n();
    let mut dft = Dft::new(n);
    let mut values = vec![ZERO; n * n];
    let mut buf = vec![ZERO; n];
    for k in 0..n {
        for (m, slot) in buf.iter_mut().enumerate() {
            *slot = s.get(m, (m + n - k) % n);
        }
        dft.forward(&mut buf);
        for l in 0..n {
            values[k * n + l] = ctx.half_phase(ctx.point(k as i64, l as i64)) * buf[l];
        }
    }
    PhaseFn::from_values(&ctx, values).expect("grid-sized")
}

/// `S = (1/N) Σ_z conj(χ(z)) F(z) π(z)`, the two-sided inverse of
/// [`fourier_wigner`].
pub fn inverse_fourier_wigner(f: &PhaseFn) -> OperatorMatrix {
    let ctx = *f.ctx();
    let n = ctx.n();
    let mut dft = Dft::new(n);
    let w = ctx.weight();
    let mut out = OperatorMatrix::zeros(&ctx);
    let mut buf = vec![ZERO; n];
    for k in 0..n {
        for (l, slot) in buf.iter_mut().enumerate() {
            *slot = ctx.half_phase(ctx.point(k as i64, l as i64)).conj() * f.at(k, l);
        }
        dft.inverse(&mut buf);
        let m_ = out.entries_mut();
        for (m, v) in buf.iter().enumerate() {
            m_[(m, (m + n - k) % n)] = v * w;
        }
    }
    out
}

/// Weyl quantization `L_a = F_W^{-1}(F_σ a)`.
pub fn weyl_transform(a: &PhaseFn) -> OperatorMatrix {
    inverse_fourier_wigner(&symplectic_fourier(a))
}

/// Weyl symbol `a_S = F_σ(F_W S)`; real exactly when `S` is Hermitian.
pub fn weyl_symbol(s: &OperatorMatrix) -> PhaseFn {
    symplectic_fourier(&fourier_wigner(s))
}

/// Weyl symbol of the filter `f ⋆ S`, computed as `f ∗ a_S`.
pub fn weyl_symbol_of_filter(f: &PhaseFn, s: &OperatorMatrix) -> Result<PhaseFn> {
    f.ctx().ensure_same(s.ctx())?;
    fn_convolve(f, &weyl_symbol(s))
}

/// Points where `|F(z)| ≤ τ · max |F|`.
pub fn zero_set(f: &PhaseFn, tau: f64) -> Result<Domain> {
    let max = f.max_abs();
    if max == 0.0 {
        return Err(QhaError::AllZero);
    }
    let ctx = *f.ctx();
    Ok(Domain::from_fn(&ctx, |z| f.get(z).norm() <= tau * max))
}

/// Zero set of the spreading function of `s` at the context's `deconv_tol`,
/// refusing with [`QhaError::ZeroSpreading`] when it is non-empty.
pub(crate) fn require_zero_free_spreading(s: &OperatorMatrix) -> Result<PhaseFn> {
    let spread = fourier_wigner(s);
    let zeros = zero_set(&spread, s.ctx().deconv_tol())?;
    if !zeros.is_empty() {
        return Err(QhaError::ZeroSpreading { zeros: zeros.count() });
    }
    Ok(spread)
}

/// Recover `f` from `H = f ⋆ S` by `f = F_σ(F_W(H) / F_W(S))`.
pub fn deconvolve_mask(h: &OperatorMatrix, s: &OperatorMatrix) -> Result<PhaseFn> {
    h.ctx().ensure_same(s.ctx())?;
    let spread = require_zero_free_spreading(s)?;
    let target = fourier_wigner(h);
    let ctx: QhaContext = *h.ctx();
    let quotient = PhaseFn::from_fn(&ctx, |z| target.get(z) / spread.get(z));
    Ok(symplectic_fourier(&quotient))
}
