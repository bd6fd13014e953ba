//! Wirtinger calculus by central differences on the underlying real coordinates.
//!
//! For a coordinate `z = x + iy`, `∂_z = ½(∂_x − i∂_y)` and `∂_z̄ = ½(∂_x + i∂_y)`. Every stencil
//! perturbs real and imaginary parts separately, so the functions differentiated here need not be
//! holomorphic. Functions are plain fallible callbacks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Chart coordinates `(z¹, …, zⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint(Vec<C64>);

impl ComplexPoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("a point needs at least one coordinate".into()));
        }
        if !all_finite(&coords) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(ComplexPoint(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }
}

impl AsRef<[C64]> for ComplexPoint {
    fn as_ref(&self) -> &[C64] {
        &self.0
    }
}

/// A point `(z, w)` of `T^{1,0}M` in standard coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberPoint {
    base: ComplexPoint,
    fiber: Vec<C64>,
}

impl FiberPoint {
    pub fn new(base: Vec<C64>, fiber: Vec<C64>) -> Result<Self> {
        let base = ComplexPoint::new(base)?;
        if fiber.len() != base.dim() {
            return Err(Error::dims(base.dim(), fiber.len()));
        }
        if !all_finite(&fiber) {
            return Err(Error::InvalidPoint("non-finite fiber coordinate".into()));
        }
        Ok(FiberPoint { base, fiber })
    }

    pub fn dim(&self) -> usize {
        self.fiber.len()
    }

    pub fn z(&self) -> &[C64] {
        self.base.as_slice()
    }

    pub fn w(&self) -> &[C64] {
        &self.fiber
    }

    pub fn fiber_sup_norm(&self) -> f64 {
        self.fiber.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Rejects fibers inside the exclusion radius around the zero section.
    pub fn require_fiber(&self, w_min: f64) -> Result<()> {
        let norm = self.fiber_sup_norm();
        if norm < w_min {
            return Err(Error::DegenerateFiber { norm, min: w_min });
        }
        Ok(())
    }

    /// `(z, w)` as one point of `ℂ^{2n}`.
    pub fn concat(&self) -> Vec<C64> {
        let mut v = self.z().to_vec();
        v.extend_from_slice(&self.fiber);
        v
    }

    /// Same base, fiber scaled by `lambda`.
    pub fn scaled(&self, lambda: C64) -> FiberPoint {
        FiberPoint {
            base: self.base.clone(),
            fiber: self.fiber.iter().map(|x| x * lambda).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    Two,
    Four,
}

impl DiffOrder {
    fn exponent(self) -> i32 {
        match self {
            DiffOrder::Two => 2,
            DiffOrder::Four => 4,
        }
    }
}

/// Central-difference scheme: step, order and optional Richardson extrapolation (one halving).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffScheme {
    pub step: f64,
    pub order: DiffOrder,
    pub richardson: bool,
}

impl Default for DiffScheme {
    fn default() -> Self {
        DiffScheme { step: 1e-5, order: DiffOrder::Two, richardson: false }
    }
}

impl DiffScheme {
    pub const MIN_STEP: f64 = 1e-9;
    pub const MAX_STEP: f64 = 1e-2;

    pub fn new(step: f64, order: u8, richardson: bool) -> Result<Self> {
        let order = match order {
            2 => DiffOrder::Two,
            4 => DiffOrder::Four,
            o => return Err(Error::InvalidScheme(format!("order must be 2 or 4, got {o}"))),
        };
        let s = DiffScheme { step, order, richardson };
        s.validate()?;
        Ok(s)
    }

    /// Scheme for derivatives nested two or three levels deep (connection coefficients,
    /// lifted-field brackets): fourth order with a step large enough to keep rounding noise
    /// below `1e-7` after three levels.
    pub fn nested() -> Self {
        DiffScheme { step: 1e-3, order: DiffOrder::Four, richardson: false }
    }

    /// Scheme for the curvature stencils; the step is further scaled by `1 + |z|`.
    pub fn curvature() -> Self {
        DiffScheme { step: 1e-3, order: DiffOrder::Four, richardson: true }
    }

    pub fn with_step(self, step: f64) -> Self {
        DiffScheme { step, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::InvalidScheme(format!("step must be positive, got {}", self.step)));
        }
        if self.step < Self::MIN_STEP {
            return Err(Error::StepUnderflow(self.step));
        }
        if self.step > Self::MAX_STEP {
            return Err(Error::InvalidScheme(format!("step {} exceeds 1e-2", self.step)));
        }
        Ok(())
    }
}

/// Holomorphic and antiholomorphic Jacobians, both `m × n`: `dz[(r, i)] = ∂_{z^i} f^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub dz: CMatrix,
    pub dzbar: CMatrix,
}

pub(crate) fn all_finite(xs: &[C64]) -> bool {
    xs.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

fn eval_shifted<F>(f: &F, p: &[C64], i: usize, delta: C64) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let mut q = p.to_vec();
    q[i] += delta;
    let v = f(&q)?;
    if !all_finite(&v) {
        return Err(Error::NonFiniteEvaluation);
    }
    Ok(v)
}

/// `scale · (a − b)` componentwise, optionally plus `outer_scale · (c − d)`. Differences are formed
/// before any scaling so that a locally constant function differentiates to exactly zero.
fn antisymmetric(a: &[C64], b: &[C64], scale: f64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| (x - y) * scale).collect()
}

/// Derivative of `f` along the real direction `unit·e_i` (unit is 1 or i) with step `h`.
fn raw_axis_derivative<F>(f: &F, p: &[C64], i: usize, unit: C64, h: f64, order: DiffOrder) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let fp = eval_shifted(f, p, i, unit * h)?;
    let fm = eval_shifted(f, p, i, -unit * h)?;
    match order {
        DiffOrder::Two => Ok(antisymmetric(&fp, &fm, 0.5 / h)),
        DiffOrder::Four => {
            let fpp = eval_shifted(f, p, i, unit * (2.0 * h))?;
            let fmm = eval_shifted(f, p, i, -unit * (2.0 * h))?;
            let near = antisymmetric(&fp, &fm, 8.0);
            let far = antisymmetric(&fpp, &fmm, 1.0);
            Ok(antisymmetric(&near, &far, 1.0 / (12.0 * h)))
        }
    }
}

fn richardson(coarse: &[C64], fine: &[C64], order: DiffOrder) -> Vec<C64> {
    let k = f64::from(1u32 << order.exponent());
    coarse.iter().zip(fine).map(|(c, f)| (f * k - c) / (k - 1.0)).collect()
}

fn axis_derivative<F>(f: &F, p: &[C64], i: usize, unit: C64, h: f64, s: &DiffScheme) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let coarse = raw_axis_derivative(f, p, i, unit, h, s.order)?;
    if !s.richardson {
        return Ok(coarse);
    }
    let fine = raw_axis_derivative(f, p, i, unit, 0.5 * h, s.order)?;
    Ok(richardson(&coarse, &fine, s.order))
}

fn jacobian_with_step<F>(f: &F, p: &[C64], h: f64, s: &DiffScheme) -> Result<Jacobian>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let n = p.len();
    let mut dz: Option<CMatrix> = None;
    let mut dzbar: Option<CMatrix> = None;
    for i in 0..n {
        let dx = axis_derivative(f, p, i, ONE, h, s)?;
        let dy = axis_derivative(f, p, i, I, h, s)?;
        let m = dx.len();
        let dz = dz.get_or_insert_with(|| CMatrix::zeros(m, n));
        let dzbar = dzbar.get_or_insert_with(|| CMatrix::zeros(m, n));
        for r in 0..m {
            dz[(r, i)] = (dx[r] - I * dy[r]) * 0.5;
            dzbar[(r, i)] = (dx[r] + I * dy[r]) * 0.5;
        }
    }
    Ok(Jacobian {
        dz: dz.unwrap_or_else(|| CMatrix::zeros(0, n)),
        dzbar: dzbar.unwrap_or_else(|| CMatrix::zeros(0, n)),
    })
}

/// Wirtinger Jacobians of a vector-valued function of several complex variables.
pub fn wirtinger_jacobian<F>(f: F, p: &[C64], s: &DiffScheme) -> Result<Jacobian>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    s.validate()?;
    jacobian_with_step(&f, p, s.step, s)
}

/// Gradients `(∂_{z^i} f, ∂_{z̄^i} f)` of a complex scalar function.
pub fn wirtinger_grad<F>(f: F, p: &[C64], s: &DiffScheme) -> Result<(Vec<C64>, Vec<C64>)>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    let jac = wirtinger_jacobian(|q: &[C64]| Ok(vec![f(q)?]), p, s)?;
    Ok((jac.dz.row(0).iter().copied().collect(), jac.dzbar.row(0).iter().copied().collect()))
}

/// Mixed complex Hessian `H[(i, j)] = ∂_{w^i} ∂_{w̄^j} f` of a real function, symmetrized to be
/// exactly Hermitian.
pub fn wirtinger_hessian_mixed<F>(f: F, w: &[C64], s: &DiffScheme) -> Result<CMatrix>
where
    F: Fn(&[C64]) -> Result<f64>,
{
    s.validate()?;
    let real = |q: &[C64]| -> Result<Vec<C64>> { Ok(vec![C64::new(f(q)?, 0.0)]) };
    let conj_grad = |q: &[C64]| -> Result<Vec<C64>> {
        let jac = jacobian_with_step(&real, q, s.step, s)?;
        Ok(jac.dzbar.row(0).iter().copied().collect())
    };
    let outer = jacobian_with_step(&conj_grad, w, s.step, s)?;
    Ok(linalg::hermitize(&outer.dz.transpose()))
}

/// Holomorphy test: the residual is the largest `|∂_{z̄^i} f^r|`.
pub fn check_holomorphic<F>(f: F, p: &[C64], tol: f64, s: &DiffScheme) -> Result<(bool, f64)>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let jac = wirtinger_jacobian(f, p, s)?;
    let residual = linalg::max_abs(&jac.dzbar);
    Ok((residual <= tol, residual))
}

/// Components of `[X, Y] = (X^i ∂_i Y^j − Y^i ∂_i X^j) ∂_j` at `p` for holomorphic fields.
pub fn directional_bracket<X, Y>(x: X, y: Y, p: &[C64], s: &DiffScheme) -> Result<Vec<C64>>
where
    X: Fn(&[C64]) -> Result<Vec<C64>>,
    Y: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let xv = x(p)?;
    let yv = y(p)?;
    if xv.len() != p.len() {
        return Err(Error::dims(p.len(), xv.len()));
    }
    if yv.len() != p.len() {
        return Err(Error::dims(p.len(), yv.len()));
    }
    let jx = wirtinger_jacobian(&x, p, s)?;
    let jy = wirtinger_jacobian(&y, p, s)?;
    let a = linalg::mat_vec(&jy.dz, &xv);
    let b = linalg::mat_vec(&jx.dz, &yv);
    Ok(a.iter().zip(&b).map(|(u, v)| u - v).collect())
}

/// Apply the holomorphic derivation `Σ X^i ∂_{z^i}` to a vector-valued function at `p`.
pub fn apply_field<F>(field: &[C64], f: F, p: &[C64], s: &DiffScheme) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    if field.len() != p.len() {
        return Err(Error::dims(p.len(), field.len()));
    }
    let jac = wirtinger_jacobian(f, p, s)?;
    Ok(linalg::mat_vec(&jac.dz, field))
}

/// `∂_τ f(τ)` at `τ = 0` for a function of one complex variable, with an explicit step.
pub(crate) fn line_derivative<F>(f: F, h: f64, s: &DiffScheme) -> Result<Vec<C64>>
where
    F: Fn(C64) -> Result<Vec<C64>>,
{
    check_line_step(h)?;
    let g = |q: &[C64]| f(q[0]);
    let jac = jacobian_with_step(&g, &[C64::new(0.0, 0.0)], h, s)?;
    Ok(jac.dz.column(0).iter().copied().collect())
}

/// `∂_τ ∂_τ̄ f = ¼ Δf` at `τ = 0` for a real function of one complex variable.
pub(crate) fn line_mixed_second<F>(f: F, h: f64, s: &DiffScheme) -> Result<f64>
where
    F: Fn(C64) -> Result<f64>,
{
    check_line_step(h)?;
    let coarse = raw_laplacian(&f, h, s.order)?;
    if !s.richardson {
        return Ok(0.25 * coarse);
    }
    let fine = raw_laplacian(&f, 0.5 * h, s.order)?;
    let k = f64::from(1u32 << s.order.exponent());
    Ok(0.25 * (k * fine - coarse) / (k - 1.0))
}

fn check_line_step(h: f64) -> Result<()> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidScheme(format!("step must be positive, got {h}")));
    }
    if h < DiffScheme::MIN_STEP {
        return Err(Error::StepUnderflow(h));
    }
    Ok(())
}

fn raw_laplacian<F>(f: &F, h: f64, order: DiffOrder) -> Result<f64>
where
    F: Fn(C64) -> Result<f64>,
{
    let ev = |t: C64| -> Result<f64> {
        let v = f(t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteEvaluation)
        }
    };
    let f0 = ev(C64::new(0.0, 0.0))?;
    let mut total = 0.0;
    for unit in [ONE, I] {
        let fp = ev(unit * h)?;
        let fm = ev(-unit * h)?;
        total += match order {
            DiffOrder::Two => ((fp - f0) + (fm - f0)) / (h * h),
            DiffOrder::Four => {
                let fpp = ev(unit * (2.0 * h))?;
                let fmm = ev(-unit * (2.0 * h))?;
                (16.0 * ((fp - f0) + (fm - f0)) - ((fpp - f0) + (fmm - f0))) / (12.0 * h * h)
            }
        };
    }
    Ok(total)
}
