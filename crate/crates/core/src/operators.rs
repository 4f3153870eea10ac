//! Signals and N×N operators: time-frequency shifts, operator translation,
//! parity, Schatten norms and Hermitian spectra.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::context::{PhasePoint, QhaContext};
use crate::error::{QhaError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Eigenvalues closer than this are treated as one degenerate cluster.
const EIGEN_TIE_TOL: f64 = 1e-10;

/// A vector of `C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    ctx: QhaContext,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(ctx: &QhaContext, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != ctx.n() {
            return Err(QhaError::ShapeMismatch { expected: ctx.n(), actual: values.len() });
        }
        Ok(Self { ctx: *ctx, values })
    }

    pub fn zeros(ctx: &QhaContext) -> Self {
        Self { ctx: *ctx, values: vec![ZERO; ctx.n()] }
    }

    pub fn from_fn(ctx: &QhaContext, f: impl FnMut(usize) -> Complex64) -> Self {
        Self { ctx: *ctx, values: (0..ctx.n()).map(f).collect() }
    }

    /// The standard basis vector `e_i`.
    pub fn basis(ctx: &QhaContext, i: usize) -> Self {
        let mut s = Self::zeros(ctx);
        s.values[i % ctx.n()] = ONE;
        s
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
    pub fn get(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩ = Σ self(n) · conj(other(n))`.
    pub fn inner(&self, other: &Signal) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { ctx: self.ctx, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(Complex64::new(1.0 / n, 0.0))
        }
    }

    /// The same vector with its largest-magnitude entry made real and
    /// non-negative (lowest index wins ties).
    pub fn phase_normalized(&self) -> Self {
        match pivot_index(&self.values) {
            Some(i) => {
                let v = self.values[i];
                self.scale(v.conj() / v.norm())
            }
            None => self.clone(),
        }
    }

    /// `(π(z)ψ)(n) = e^{2πi l n/N} ψ(n − k)`.
    pub fn shifted(&self, z: PhasePoint) -> Self {
        let n = self.ctx.n();
        let roots = self.ctx.roots();
        Self::from_fn(&self.ctx, |m| roots[(z.l * m) % n] * self.values[(m + n - z.k) % n])
    }

    /// `(Pψ)(n) = ψ(−n)`.
    pub fn parity(&self) -> Self {
        let n = self.ctx.n();
        Self::from_fn(&self.ctx, |m| self.values[(n - m) % n])
    }

    /// `|⟨a, b⟩| / (‖a‖‖b‖)`; 1 means equal up to a unimodular factor.
    pub fn fidelity(&self, other: &Signal) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return 0.0;
        }
        self.inner(other).norm() / denom
    }

    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn column(&self) -> nalgebra::DVector<Complex64> {
        nalgebra::DVector::from_column_slice(&self.values)
    }
}

fn pivot_index(values: &[Complex64]) -> Option<usize> {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return None;
    }
    values.iter().position(|v| v.norm() >= max * (1.0 - 1e-12))
}

/// A dense N×N complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    ctx: QhaContext,
    entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn from_matrix(ctx: &QhaContext, entries: DMatrix<Complex64>) -> Result<Self> {
        let n = ctx.n();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(QhaError::ShapeMismatch { expected: n * n, actual: entries.len() });
        }
        Ok(Self { ctx: *ctx, entries })
    }

    /// Build from a row-major list of `N²` entries.
    pub fn from_row_major(ctx: &QhaContext, values: &[Complex64]) -> Result<Self> {
        let n = ctx.n();
        if values.len() != n * n {
            return Err(QhaError::ShapeMismatch { expected: n * n, actual: values.len() });
        }
        Ok(Self { ctx: *ctx, entries: DMatrix::from_row_slice(n, n, values) })
    }

    pub fn from_fn(ctx: &QhaContext, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let n = ctx.n();
        Self { ctx: *ctx, entries: DMatrix::from_fn(n, n, |i, j| f(i, j)) }
    }

    pub fn zeros(ctx: &QhaContext) -> Self {
        Self { ctx: *ctx, entries: DMatrix::zeros(ctx.n(), ctx.n()) }
    }

    pub fn identity(ctx: &QhaContext) -> Self {
        Self { ctx: *ctx, entries: DMatrix::identity(ctx.n(), ctx.n()) }
    }

    #[inline]
    pub fn ctx(&self) -> &QhaContext {
        &self.ctx
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub(crate) fn entries_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { ctx: self.ctx, entries: self.entries.adjoint() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { ctx: self.ctx, entries: &self.entries * c }
    }

    pub fn mul(&self, other: &OperatorMatrix) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(Self { ctx: self.ctx, entries: &self.entries * &other.entries })
    }

    pub fn apply(&self, psi: &Signal) -> Result<Signal> {
        self.ctx.ensure_same(psi.ctx())?;
        let v = &self.entries * psi.column();
        Ok(Signal { ctx: self.ctx, values: v.iter().copied().collect() })
    }

    /// `⟨Aψ, ψ⟩`.
    pub fn quadratic_form(&self, psi: &Signal) -> Result<Complex64> {
        Ok(self.apply(psi)?.inner(psi))
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self { ctx: self.ctx, entries: (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0) }
    }

    /// `max |A − A*|` entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.ctx.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.entries.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        schatten_norm(self, p)
    }

    /// Operator norm `‖A‖_op`, the largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// `‖A‖_{T²}`, computed from the entries.
    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `tr(A B*)`.
    pub fn hs_inner(&self, other: &OperatorMatrix) -> Complex64 {
        self.entries.iter().zip(other.entries.iter()).map(|(a, b)| a * b.conj()).sum()
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        OperatorMatrix { ctx: self.ctx, entries: &self.entries + &rhs.entries }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        OperatorMatrix { ctx: self.ctx, entries: &self.entries - &rhs.entries }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        OperatorMatrix { ctx: self.ctx, entries: &self.entries * &rhs.entries }
    }
}

/// A positive, Hermitian, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    op: OperatorMatrix,
}

impl MixedState {
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let tol = op.ctx().zero_tol();
        let defect = op.hermitian_defect();
        if defect > tol {
            return Err(QhaError::NotMixedState(format!("Hermitian defect {defect:.3e}")));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > tol {
            return Err(QhaError::NotMixedState(format!("trace {:.6} {:+.3e}i", tr.re, tr.im)));
        }
        if !is_positive(&op) {
            return Err(QhaError::NotMixedState("operator has a negative eigenvalue".into()));
        }
        Ok(Self { op })
    }

    /// The pure state `ψ⊗ψ / ‖ψ‖²`.
    pub fn pure(psi: &Signal) -> Result<Self> {
        let psi = psi.normalized();
        Self::new(rank_one(&psi, &psi)?)
    }

    #[inline]
    pub fn op(&self) -> &OperatorMatrix {
        &self.op
    }

    #[inline]
    pub fn ctx(&self) -> &QhaContext {
        self.op.ctx()
    }

    pub fn into_op(self) -> OperatorMatrix {
        self.op
    }
}

/// Eigenvalues (descending) with aligned orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Signal>,
}

impl Spectrum {
    /// `Σ λ_i v_i ⊗ v_i`.
    pub fn reconstruct(&self, ctx: &QhaContext) -> OperatorMatrix {
        let mut acc = OperatorMatrix::zeros(ctx);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let col = v.column();
            *acc.entries_mut() += (&col * col.adjoint()) * Complex64::new(*lambda, 0.0);
        }
        acc
    }

    /// Largest deviation of the eigenvector Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// `π(z) = M_l T_k`, entries `e^{2πi l n/N} [n − k ≡ m]`.
pub fn tf_shift(ctx: &QhaContext, z: PhasePoint) -> OperatorMatrix {
    let n = ctx.n();
    let roots = ctx.roots();
    OperatorMatrix::from_fn(ctx, |row, col| {
        if (row + n - z.k) % n == col {
            roots[(z.l * row) % n]
        } else {
            ZERO
        }
    })
}

/// `α_z(A) = π(z) A π(z)*`, computed entrywise as
/// `α_z(A)[a,b] = e^{2πi l(a−b)/N} A[a−k, b−k]`.
pub fn conjugate_shift(a: &OperatorMatrix, z: PhasePoint) -> OperatorMatrix {
    let ctx = *a.ctx();
    let roots = ctx.roots();
    let mut out = OperatorMatrix::zeros(&ctx);
    accumulate_shift(out.entries_mut(), ONE, a, z, &roots);
    out
}

/// `acc += w · α_z(A)`; the shared kernel behind every weighted sum of
/// translated operators, so sums built term by term agree bit for bit.
pub(crate) fn accumulate_shift(
    acc: &mut DMatrix<Complex64>,
    w: Complex64,
    a: &OperatorMatrix,
    z: PhasePoint,
    roots: &[Complex64],
) {
    let n = a.ctx().n();
    let src = a.matrix();
    for col in 0..n {
        let sc = (col + n - z.k) % n;
        for row in 0..n {
            let sr = (row + n - z.k) % n;
            let phase = roots[(z.l * ((row + n - col) % n)) % n];
            acc[(row, col)] += w * (phase * src[(sr, sc)]);
        }
    }
}

/// The parity matrix `(Pψ)(n) = ψ(−n)`.
pub fn parity_matrix(ctx: &QhaContext) -> OperatorMatrix {
    let n = ctx.n();
    OperatorMatrix::from_fn(ctx, |i, j| if (i + j) % n == 0 { ONE } else { ZERO })
}

/// `Ǎ = P A P`, i.e. `Ǎ[i,j] = A[−i,−j]`.
pub fn parity_check(a: &OperatorMatrix) -> OperatorMatrix {
    let n = a.ctx().n();
    OperatorMatrix::from_fn(a.ctx(), |i, j| a.get((n - i) % n, (n - j) % n))
}

/// `ψ ⊗ φ`, entries `ψ(i) conj(φ(j))`.
pub fn rank_one(psi: &Signal, phi: &Signal) -> Result<OperatorMatrix> {
    psi.ctx().ensure_same(phi.ctx())?;
    Ok(OperatorMatrix::from_fn(psi.ctx(), |i, j| psi.get(i) * phi.get(j).conj()))
}

/// Schatten p-norm from the full singular value decomposition.
pub fn schatten_norm(a: &OperatorMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(QhaError::InvalidExponent(format!("Schatten exponent must be ≥ 1, got {p}")));
    }
    let s = a.singular_values();
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    Ok(s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Descending spectrum of a Hermitian matrix.
///
/// Degenerate clusters (within 1e-10) are ordered by the lexicographic order
/// of `(−|v(0)|, −|v(1)|, …)`, and each eigenvector's largest-magnitude entry
/// is made real positive.
pub fn hermitian_eig(a: &OperatorMatrix) -> Result<Spectrum> {
    let ctx = *a.ctx();
    let defect = a.hermitian_defect();
    if defect > ctx.zero_tol() * a.max_abs().max(1.0) {
        return Err(QhaError::NotHermitian(defect));
    }
    let h = a.hermitian_part();
    let eig = SymmetricEigen::new(h.entries.clone());
    let n = ctx.n();
    let mut pairs: Vec<(f64, Signal)> = (0..n)
        .map(|i| {
            let v = Signal {
                ctx,
                values: eig.eigenvectors.column(i).iter().copied().collect(),
            };
            (eig.eigenvalues[i], v.phase_normalized())
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    // Cluster consecutive near-equal eigenvalues and tie-break inside.
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end - 1].0 - pairs[end].0).abs() <= EIGEN_TIE_TOL {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| magnitude_order(&a.1, &b.1));
        start = end;
    }

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(Spectrum { eigenvalues, eigenvectors })
}

fn magnitude_order(a: &Signal, b: &Signal) -> Ordering {
    for (x, y) in a.values.iter().zip(&b.values) {
        match y.norm().total_cmp(&x.norm()) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Hermitian to `zero_tol` and `λ_min ≥ −zero_tol·‖A‖_op`.
pub fn is_positive(a: &OperatorMatrix) -> bool {
    let tol = a.ctx().zero_tol();
    if a.hermitian_defect() > tol * a.max_abs().max(1.0) {
        return false;
    }
    match hermitian_eig(a) {
        Ok(spec) => spec.min() >= -tol * spec.max().abs().max(spec.min().abs()),
        Err(_) => false,
    }
}
