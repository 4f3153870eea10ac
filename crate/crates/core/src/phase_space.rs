//! Functions and domains on the phase-space grid `Z_N × Z_N`.
//!
//! Every point carries weight `1/N`, so the whole grid has measure `N` and
//! the weighted norms are `‖F‖_p = ((1/N) Σ_z |F(z)|^p)^{1/p}`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_rational::Ratio;

use crate::context::{PhasePoint, QhaContext};
use crate::error::{QhaError, Result};
use crate::fft::Dft;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `σ(z, z′) = l·k′ − l′·k mod N`.
pub fn symplectic_form(ctx: &QhaContext, z: PhasePoint, w: PhasePoint) -> usize {
    let n = ctx.n() as u64;
    let a = (z.l as u64 * w.k as u64) % n;
    let b = (w.l as u64 * z.k as u64) % n;
    ((a + n - b) % n) as usize
}

/// A complex function on the grid, stored k-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFn {
    ctx: QhaContext,
    values: Vec<Complex64>,
}

impl PhaseFn {
    pub fn zeros(ctx: &QhaContext) -> Self {
        Self { ctx: *ctx, values: vec![ZERO; ctx.n() * ctx.n()] }
    }

    pub fn constant(ctx: &QhaContext, c: Complex64) -> Self {
        Self { ctx: *ctx, values: vec![c; ctx.n() * ctx.n()] }
    }

    pub fn ones(ctx: &QhaContext) -> Self {
        Self::constant(ctx, Complex64::new(1.0, 0.0))
    }

    /// `scale · δ_{z0}`.
    pub fn delta(ctx: &QhaContext, z0: PhasePoint, scale: f64) -> Self {
        let mut f = Self::zeros(ctx);
        f.values[ctx.index(z0)] = Complex64::new(scale, 0.0);
        f
    }

    pub fn from_values(ctx: &QhaContext, values: Vec<Complex64>) -> Result<Self> {
        let expected = ctx.n() * ctx.n();
        if values.len() != expected {
            return Err(QhaError::ShapeMismatch { expected, actual: values.len() });
        }
        Ok(Self { ctx: *ctx, values })
    }

    pub fn from_fn(ctx: &QhaContext, mut f: impl FnMut(PhasePoint) -> Complex64) -> Self {
        Self { ctx: *ctx, values: ctx.points().map(&mut f).collect() }
    }

    pub fn from_real_fn(ctx: &QhaContext, mut f: impl FnMut(PhasePoint) -> f64) -> Self {
        Self::from_fn(ctx, |z| Complex64::new(f(z), 0.0))
    }

    #[inline]
    pub fn ctx(&self) -> &QhaContext {
        &self.ctx
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, z: PhasePoint) -> Complex64 {
        self.values[self.ctx.index(z)]
    }

    #[inline]
    pub fn at(&self, k: usize, l: usize) -> Complex64 {
        self.values[k * self.ctx.n() + l]
    }

    pub fn set(&mut self, z: PhasePoint, v: Complex64) {
        let i = self.ctx.index(z);
        self.values[i] = v;
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { ctx: self.ctx, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn abs_sq(&self) -> Self {
        self.map(|v| Complex64::new(v.norm_sqr(), 0.0))
    }

    /// Weighted p-norm; `p = f64::INFINITY` gives the sup norm.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let sum: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        (self.ctx.weight() * sum).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(1/N) Σ_z F(z)`.
    pub fn total_mass(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.ctx.weight()
    }

    /// `(1/N) Σ_{z∈Ω} F(z)`.
    pub fn mass_on(&self, domain: &Domain) -> Result<Complex64> {
        self.ctx.ensure_same(domain.ctx())?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(domain.mask())
            .filter(|(_, &m)| m)
            .map(|(v, _)| *v)
            .sum();
        Ok(s * self.ctx.weight())
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs_diff(&self, other: &PhaseFn) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul_pointwise(&self, other: &PhaseFn) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { ctx: self.ctx, values })
    }

    pub fn symplectic_fourier(&self) -> Self {
        symplectic_fourier(self)
    }

    pub fn translate(&self, z0: PhasePoint) -> Self {
        translate(self, z0)
    }

    pub fn check(&self) -> Self {
        check_fn(self)
    }
}

impl Add for &PhaseFn {
    type Output = PhaseFn;
    fn add(self, rhs: &PhaseFn) -> PhaseFn {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        let values = self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect();
        PhaseFn { ctx: self.ctx, values }
    }
}

impl Sub for &PhaseFn {
    type Output = PhaseFn;
    fn sub(self, rhs: &PhaseFn) -> PhaseFn {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        let values = self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect();
        PhaseFn { ctx: self.ctx, values }
    }
}

impl Mul<f64> for &PhaseFn {
    type Output = PhaseFn;
    fn mul(self, rhs: f64) -> PhaseFn {
        self.map(|v| v * rhs)
    }
}

/// `(F_σ F)(z) = (1/N) Σ_{z′} F(z′) e^{−2πi σ(z,z′)/N}`, an involution.
///
/// The kernel splits as `e^{−2πi l k′/N} · e^{+2πi k l′/N}`: an inverse DFT
/// along `l′` (landing on `k`) followed by a forward DFT along `k′` (landing
/// on `l`).
pub fn symplectic_fourier(f: &PhaseFn) -> PhaseFn {
    let n = f.ctx.n();
    let mut dft = Dft::new(n);
    // rows[k′][k] = Σ_{l′} F(k′, l′) e^{2πi k l′/N}
    let mut rows = f.values.clone();
    for row in rows.chunks_mut(n) {
        dft.inverse(row);
    }
    let mut out = vec![ZERO; n * n];
    let mut col = vec![ZERO; n];
    let w = f.ctx.weight();
    for k in 0..n {
        for kp in 0..n {
            col[kp] = rows[kp * n + k];
        }
        dft.forward(&mut col);
        for l in 0..n {
            out[k * n + l] = col[l] * w;
        }
    }
    PhaseFn { ctx: f.ctx, values: out }
}

/// `(T_{z0} F)(z) = F(z − z0)`.
pub fn translate(f: &PhaseFn, z0: PhasePoint) -> PhaseFn {
    let ctx = f.ctx;
    PhaseFn::from_fn(&ctx, |z| f.get(ctx.sub(z, z0)))
}

/// `F̌(z) = F(−z)`.
pub fn check_fn(f: &PhaseFn) -> PhaseFn {
    let ctx = f.ctx;
    PhaseFn::from_fn(&ctx, |z| f.get(ctx.neg(z)))
}

/// `(F ∗ G)(z) = (1/N) Σ_{z′} F(z′) G(z − z′)`.
pub fn fn_convolve(f: &PhaseFn, g: &PhaseFn) -> Result<PhaseFn> {
    f.ctx.ensure_same(&g.ctx)?;
    let ctx = f.ctx;
    let n = ctx.n();
    let w = ctx.weight();
    let mut out = vec![ZERO; n * n];
    for (i, slot) in out.iter_mut().enumerate() {
        let (k, l) = (i / n, i % n);
        let mut acc = ZERO;
        for kp in 0..n {
            let dk = (k + n - kp) % n;
            for lp in 0..n {
                let dl = (l + n - lp) % n;
                acc += f.values[kp * n + lp] * g.values[dk * n + dl];
            }
        }
        *slot = acc * w;
    }
    Ok(PhaseFn { ctx, values: out })
}

/// A subset of the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    ctx: QhaContext,
    mask: Vec<bool>,
}

impl Domain {
    pub fn empty(ctx: &QhaContext) -> Self {
        Self { ctx: *ctx, mask: vec![false; ctx.n() * ctx.n()] }
    }

    pub fn full(ctx: &QhaContext) -> Self {
        Self { ctx: *ctx, mask: vec![true; ctx.n() * ctx.n()] }
    }

    pub fn from_mask(ctx: &QhaContext, mask: Vec<bool>) -> Result<Self> {
        let expected = ctx.n() * ctx.n();
        if mask.len() != expected {
            return Err(QhaError::ShapeMismatch { expected, actual: mask.len() });
        }
        Ok(Self { ctx: *ctx, mask })
    }

    pub fn from_fn(ctx: &QhaContext, f: impl FnMut(PhasePoint) -> bool) -> Self {
        Self { ctx: *ctx, mask: ctx.points().map(f).collect() }
    }

    pub fn from_points(ctx: &QhaContext, points: &[PhasePoint]) -> Self {
        let mut d = Self::empty(ctx);
        for &z in points {
            d.mask[ctx.index(z)] = true;
        }
        d
    }

    #[inline]
    pub fn ctx(&self) -> &QhaContext {
        &self.ctx
    }

    #[inline]
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn contains(&self, z: PhasePoint) -> bool {
        self.mask[self.ctx.index(z)]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Points of the domain in k-major order.
    pub fn points(&self) -> Vec<PhasePoint> {
        self.ctx.points().filter(|&z| self.contains(z)).collect()
    }

    pub fn measure(&self) -> Ratio<u64> {
        measure(self)
    }

    pub fn measure_f64(&self) -> f64 {
        self.count() as f64 / self.ctx.n() as f64
    }

    /// χ_Ω as a phase-space function.
    pub fn indicator(&self) -> PhaseFn {
        let values = self
            .mask
            .iter()
            .map(|&m| Complex64::new(if m { 1.0 } else { 0.0 }, 0.0))
            .collect();
        PhaseFn { ctx: self.ctx, values }
    }

    /// `Ω + z0`.
    pub fn translate(&self, z0: PhasePoint) -> Self {
        let ctx = self.ctx;
        Self::from_fn(&ctx, |z| self.contains(ctx.sub(z, z0)))
    }

    pub fn complement(&self) -> Self {
        Self { ctx: self.ctx, mask: self.mask.iter().map(|m| !m).collect() }
    }

    pub fn union(&self, other: &Domain) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect();
        Ok(Self { ctx: self.ctx, mask })
    }

    pub fn is_disjoint(&self, other: &Domain) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !(*a && *b))
    }

    pub fn hamming(&self, other: &Domain) -> usize {
        self.mask.iter().zip(&other.mask).filter(|(a, b)| a != b).count()
    }

    /// The four `⌈N/2⌉`-blocks obtained by splitting both axes.
    pub fn quadrants(ctx: &QhaContext) -> Vec<Domain> {
        let half = ctx.n().div_ceil(2);
        (0..4)
            .map(|q| {
                Domain::from_fn(ctx, |z| {
                    let a = usize::from(z.k >= half);
                    let b = usize::from(z.l >= half);
                    2 * a + b == q
                })
            })
            .collect()
    }

    /// One singleton domain per grid point.
    pub fn cells(ctx: &QhaContext) -> Vec<Domain> {
        ctx.points().map(|z| Domain::from_points(ctx, &[z])).collect()
    }
}

/// `μ(Ω) = |Ω| / N`, exact.
pub fn measure(domain: &Domain) -> Ratio<u64> {
    Ratio::new(domain.count() as u64, domain.ctx.n() as u64)
}

/// Points holding the largest values of `weights`, added in decreasing order
/// until their weighted mass reaches `fraction` of the total.
pub fn top_mass_domain(weights: &PhaseFn, fraction: f64) -> Domain {
    let ctx = *weights.ctx();
    let mags: Vec<f64> = weights.values().iter().map(|v| v.norm()).collect();
    let total: f64 = mags.iter().sum();
    let mut order: Vec<usize> = (0..mags.len()).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
    let mut mask = vec![false; mags.len()];
    let mut acc = 0.0;
    for i in order {
        if acc >= fraction * total {
            break;
        }
        mask[i] = true;
        acc += mags[i];
    }
    Domain { ctx, mask }
}
