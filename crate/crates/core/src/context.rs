//! The ambient grid `Z_N × Z_N` and the conventions every object is bound to.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QhaError, Result};

pub const DEFAULT_ZERO_TOL: f64 = 1e-10;
pub const DEFAULT_DECONV_TOL: f64 = 1e-8;

/// Grid side `N` plus the two tolerances used by predicates.
///
/// `zero_tol` governs Hermitian/positivity/trace checks, `deconv_tol` is the
/// relative floor below which a spreading function counts as vanishing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QhaContext {
    n: usize,
    zero_tol: f64,
    deconv_tol: f64,
}

impl QhaContext {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_tolerances(n, DEFAULT_ZERO_TOL, DEFAULT_DECONV_TOL)
    }

    pub fn with_tolerances(n: usize, zero_tol: f64, deconv_tol: f64) -> Result<Self> {
        if n < 2 {
            return Err(QhaError::InvalidDimension(n));
        }
        for tol in [zero_tol, deconv_tol] {
            if !tol.is_finite() || tol < 0.0 {
                return Err(QhaError::InvalidTolerance(tol));
            }
        }
        Ok(Self { n, zero_tol, deconv_tol })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    #[inline]
    pub fn deconv_tol(&self) -> f64 {
        self.deconv_tol
    }

    /// Per-point weight of the phase-space measure.
    #[inline]
    pub fn weight(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn ensure_same(&self, other: &QhaContext) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(QhaError::ContextMismatch { left: self.n, right: other.n })
        }
    }

    /// Canonical representative of `m` modulo `N`.
    #[inline]
    pub fn reduce(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    pub fn point(&self, k: i64, l: i64) -> PhasePoint {
        PhasePoint { k: self.reduce(k), l: self.reduce(l) }
    }

    pub fn origin(&self) -> PhasePoint {
        PhasePoint { k: 0, l: 0 }
    }

    pub fn add(&self, z: PhasePoint, w: PhasePoint) -> PhasePoint {
        PhasePoint { k: (z.k + w.k) % self.n, l: (z.l + w.l) % self.n }
    }

    pub fn neg(&self, z: PhasePoint) -> PhasePoint {
        PhasePoint { k: (self.n - z.k) % self.n, l: (self.n - z.l) % self.n }
    }

    pub fn sub(&self, z: PhasePoint, w: PhasePoint) -> PhasePoint {
        self.add(z, self.neg(w))
    }

    /// All grid points in k-major order.
    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        let n = self.n;
        (0..n * n).map(move |i| PhasePoint { k: i / n, l: i % n })
    }

    #[inline]
    pub fn index(&self, z: PhasePoint) -> usize {
        z.k * self.n + z.l
    }

    /// `e^{2πi m/N}` for `m = 0..N`.
    pub fn roots(&self) -> Vec<Complex64> {
        (0..self.n)
            .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / self.n as f64))
            .collect()
    }

    /// `e^{2πi m/N}` for an arbitrary integer `m`.
    pub fn root(&self, m: i64) -> Complex64 {
        let r = self.reduce(m);
        Complex64::from_polar(1.0, 2.0 * PI * r as f64 / self.n as f64)
    }

    /// Half-phase χ(z) attached to the Fourier–Wigner transform.
    ///
    /// χ(z)² = e^{2πi kl/N} and χ(−z) = χ(z) for every N. Odd N uses the
    /// inverse of 2 modulo N; even N takes e^{πi k l/N} on whichever of z, −z
    /// has the lexicographically smaller canonical representative.
    pub fn half_phase(&self, z: PhasePoint) -> Complex64 {
        let n = self.n as u64;
        if n % 2 == 1 {
            let h = (n + 1) / 2;
            let m = (h * ((z.k as u64 * z.l as u64) % n)) % n;
            Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64)
        } else {
            let w = self.neg(z);
            let (k, l) = std::cmp::min((z.k, z.l), (w.k, w.l));
            // k·l < N², reduce mod 2N to keep the angle small
            let m = ((k * l) as u64) % (2 * n);
            Complex64::from_polar(1.0, PI * m as f64 / n as f64)
        }
    }
}

// Tolerances are compared bitwise; contexts are only ever copied, never recomputed.
impl Eq for QhaContext {}

/// A point `(k, l)` of the grid: time index `k`, frequency index `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    pub k: usize,
    pub l: usize,
}
