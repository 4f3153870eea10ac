//! Signal-level time-frequency transforms and window presets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::context::QhaContext;
use crate::error::{QhaError, Result};
use crate::fft::Dft;
use crate::operators::Signal;
use crate::phase_space::{symplectic_fourier, PhaseFn};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Chirp rate of [`Window::ChirpGaussian`].
pub const CHIRP_RATE: f64 = 0.3;

/// Periodization range `j ∈ {−3, …, 3}` for the Gaussian presets.
const PERIODS: i64 = 3;

/// Named analysis windows, all normalized to unit norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    /// `g(n) = Σ_j e^{−π(n+jN)²/N}`.
    Gaussian,
    /// `Σ_j e^{−π(n+jN)²/N} e^{πi c (n+jN)²/N}` with `c = CHIRP_RATE`.
    ///
    /// Every real symmetric window has ambiguity zeros at `(odd, N/2)` when
    /// `N` is even; the chirp removes them.
    ChirpGaussian,
    /// `e_0`.
    Impulse,
    /// Constant `1/√N`.
    Flat,
}

impl Window {
    pub const ALL: [Window; 4] = [Window::Gaussian, Window::ChirpGaussian, Window::Impulse, Window::Flat];

    pub fn name(&self) -> &'static str {
        match self {
            Window::Gaussian => "gaussian",
            Window::ChirpGaussian => "chirp-gaussian",
            Window::Impulse => "impulse",
            Window::Flat => "flat",
        }
    }

    pub fn signal(&self, ctx: &QhaContext) -> Signal {
        let n = ctx.n();
        let nf = n as f64;
        let raw = match self {
            Window::Gaussian | Window::ChirpGaussian => {
                let chirp = if *self == Window::ChirpGaussian { CHIRP_RATE } else { 0.0 };
                Signal::from_fn(ctx, |m| {
                    (-PERIODS..=PERIODS)
                        .map(|j| {
                            let t = m as f64 + (j * n as i64) as f64;
                            Complex64::from_polar((-PI * t * t / nf).exp(), PI * chirp * t * t / nf)
                        })
                        .sum()
                })
            }
            Window::Impulse => Signal::basis(ctx, 0),
            Window::Flat => Signal::from_fn(ctx, |_| Complex64::new(1.0, 0.0)),
        };
        raw.normalized()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Window {
    type Err = QhaError;

    fn from_str(s: &str) -> Result<Self> {
        Window::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| QhaError::UnknownPreset(s.to_string()))
    }
}

/// `V_φψ(z) = ⟨ψ, π(z)φ⟩ = Σ_n ψ(n) conj(φ(n−k)) e^{−2πi ln/N}`.
pub fn stft(psi: &Signal, phi: &Signal) -> Result<PhaseFn> {
    psi.ctx().ensure_same(phi.ctx())?;
    let ctx = *psi.ctx();
    let n = ctx.n();
    let mut dft = Dft::new(n);
    let mut values = vec![ZERO; n * n];
    let mut buf = vec![ZERO; n];
    for k in 0..n {
        for (m, slot) in buf.iter_mut().enumerate() {
            *slot = psi.get(m) * phi.get((m + n - k) % n).conj();
        }
        dft.forward(&mut buf);
        values[k * n..(k + 1) * n].copy_from_slice(&buf);
    }
    PhaseFn::from_values(&ctx, values)
}

/// `A(ψ, φ)(z) = χ(z) V_φψ(z)`; equals the spreading function of `ψ ⊗ φ`.
pub fn ambiguity(psi: &Signal, phi: &Signal) -> Result<PhaseFn> {
    let v = stft(psi, phi)?;
    let ctx = *v.ctx();
    Ok(PhaseFn::from_fn(&ctx, |z| ctx.half_phase(z) * v.get(z)))
}

/// Cross-Wigner distribution `W(ψ, φ) = F_σ A(ψ, φ)`.
pub fn wigner(psi: &Signal, phi: &Signal) -> Result<PhaseFn> {
    Ok(symplectic_fourier(&ambiguity(psi, phi)?))
}

/// `|V_φψ|²`.
pub fn spectrogram(psi: &Signal, phi: &Signal) -> Result<PhaseFn> {
    Ok(stft(psi, phi)?.abs_sq())
}
