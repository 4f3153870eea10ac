//! The two convolutions pairing phase-space functions with operators.
//!
//! `f ⋆ S = (1/N) Σ_z f(z) α_z(S)` is an operator, `S ⋆ T(z) = tr(S α_z(Ť))`
//! a function. The `1/N` weight is part of the definition.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::context::PhasePoint;
use crate::error::{QhaError, Result};
use crate::fourier_wigner::fourier_wigner;
use crate::operators::{accumulate_shift, OperatorMatrix};
use crate::phase_space::{symplectic_fourier, PhaseFn};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative slack allowed when evaluating norm inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-10;

/// `Σ_i w_i α_{z_i}(S)` accumulated in the given order.
pub(crate) fn shift_sum(
    s: &OperatorMatrix,
    terms: impl IntoIterator<Item = (PhasePoint, Complex64)>,
) -> OperatorMatrix {
    let ctx = *s.ctx();
    let roots = ctx.roots();
    let mut out = OperatorMatrix::zeros(&ctx);
    for (z, w) in terms {
        accumulate_shift(out.entries_mut(), w, s, z, &roots);
    }
    out
}

/// `f ⋆ S = (1/N) Σ_z f(z) α_z(S)`; terms with `f(z) = 0` are skipped.
pub fn conv_fn_op(f: &PhaseFn, s: &OperatorMatrix) -> Result<OperatorMatrix> {
    f.ctx().ensure_same(s.ctx())?;
    let weight = Complex64::new(f.ctx().weight(), 0.0);
    let ctx = *f.ctx();
    let terms = ctx
        .points()
        .map(|z| (z, f.get(z)))
        .filter(|(_, v)| *v != ZERO)
        .map(|(z, v)| (z, v * weight))
        .collect::<Vec<_>>();
    Ok(shift_sum(s, terms))
}

/// `S ⋆ T(z) = tr(S α_z(P T P))`, evaluated on the whole grid by the
/// defining trace: `Σ_{a,b} S[b,a] e^{2πi l(a−b)/N} T[k−a, k−b]`.
pub fn conv_op_op(s: &OperatorMatrix, t: &OperatorMatrix) -> Result<PhaseFn> {
    s.ctx().ensure_same(t.ctx())?;
    let ctx = *s.ctx();
    let n = ctx.n();
    let roots = ctx.roots();
    let sm = s.matrix();
    let tm = t.matrix();
    let values: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (idx / n, idx % n);
            let mut acc = ZERO;
            for a in 0..n {
                let ta = (k + n - a) % n;
                for b in 0..n {
                    let tb = (k + n - b) % n;
                    let phase = roots[(l * ((a + n - b) % n)) % n];
                    acc += sm[(b, a)] * phase * tm[(ta, tb)];
                }
            }
            acc
        })
        .collect();
    PhaseFn::from_values(&ctx, values)
}

/// `S ⋆ T` through the spreading domain: `F_σ(F_W(S) · F_W(T))`.
///
/// O(N² log N); agrees with [`conv_op_op`] to rounding.
pub fn conv_op_op_spectral(s: &OperatorMatrix, t: &OperatorMatrix) -> Result<PhaseFn> {
    s.ctx().ensure_same(t.ctx())?;
    let product = fourier_wigner(s).mul_pointwise(&fourier_wigner(t))?;
    Ok(symplectic_fourier(&product))
}

/// Exponents `(p, q, r)` with `1/p + 1/q = 1 + 1/r`, each in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YoungExponents {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl YoungExponents {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if v.is_nan() || v < 1.0 {
                return Err(QhaError::InvalidExponent(format!("{name} = {v} is below 1")));
            }
        }
        let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
        let gap = inv(p) + inv(q) - 1.0 - inv(r);
        if gap.abs() > 1e-12 {
            return Err(QhaError::InvalidExponent(format!(
                "1/p + 1/q − 1 − 1/r = {gap:.3e} for (p, q, r) = ({p}, {q}, {r})"
            )));
        }
        Ok(Self { p, q, r })
    }
}

/// Both sides of a norm inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs * (1.0 + INEQUALITY_SLACK) + 1e-12;
        Self { lhs, rhs, holds }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YoungReport {
    pub exponents: YoungExponents,
    /// `‖f ⋆ T‖_{T^r} ≤ ‖f‖_p ‖T‖_{T^q}`.
    pub function_operator: Inequality,
    /// `‖S ⋆ T‖_{L^r} ≤ ‖S‖_{T^p} ‖T‖_{T^q}`.
    pub operator_operator: Inequality,
}

impl YoungReport {
    pub fn holds(&self) -> bool {
        self.function_operator.holds && self.operator_operator.holds
    }
}

pub fn young_norm_report(
    f: &PhaseFn,
    s: &OperatorMatrix,
    t: &OperatorMatrix,
    exponents: YoungExponents,
) -> Result<YoungReport> {
    let YoungExponents { p, q, r } = exponents;
    let ft = conv_fn_op(f, t)?;
    let function_operator = Inequality::new(ft.schatten_norm(r)?, f.norm(p) * t.schatten_norm(q)?);
    let st = conv_op_op(s, t)?;
    let operator_operator = Inequality::new(st.norm(r), s.schatten_norm(p)? * t.schatten_norm(q)?);
    Ok(YoungReport { exponents, function_operator, operator_operator })
}
