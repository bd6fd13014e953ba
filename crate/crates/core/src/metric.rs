//! Left-invariant complex Finsler metrics and their Chern–Finsler connection.
//!
//! The fundamental function is `G(z, w) = 𝒢(B(z) w)`. The connection is computed two ways:
//! [`jet_direct`] differentiates `G` numerically (`N^i_k = G^{j̄i} ∂_{w̄^j}∂_{z^k} G`,
//! `Γ^i_{j;k} = ∂_{w^j} N^i_k`), while [`jet_frame`] uses the frame formulas
//! `N^i_k = C^i_b v^a V_a(D^b_k)` and `Γ^i_{j;k} = C^i_b D^a_j V_a(D^b_k)` with `v = D(z) w`.

use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{self, DiffScheme, FiberPoint};
use crate::error::{Error, Result};
use crate::lie::{FrameSide, GroupModel};
use crate::linalg::{self, CMatrix, Tensor3};
use crate::norm::MinkowskiNorm;
use crate::{C64, DEFAULT_W_MIN};

/// A real fundamental function `G(z, w)` on `T^{1,0}G` in the chart of a group model.
pub trait FinslerFunction {
    fn model(&self) -> &GroupModel;
    fn value(&self, z: &[C64], w: &[C64]) -> Result<f64>;

    fn dim(&self) -> usize {
        self.model().dim()
    }

    /// Exclusion radius around the zero section.
    fn w_min(&self) -> f64 {
        DEFAULT_W_MIN
    }
}

/// `G(z, w) = 𝒢(B(z) w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftInvariantMetric {
    pub model: GroupModel,
    pub norm: MinkowskiNorm,
    pub w_min: f64,
}

impl LeftInvariantMetric {
    pub fn new(model: GroupModel, norm: MinkowskiNorm) -> Result<Self> {
        if model.dim() != norm.dim() {
            return Err(Error::dims(model.dim(), norm.dim()));
        }
        Ok(LeftInvariantMetric { model, norm, w_min: DEFAULT_W_MIN })
    }

    pub fn with_w_min(mut self, w_min: f64) -> Self {
        self.w_min = w_min;
        self
    }

    /// Left-invariant fiber coordinates `u = B(z) w`.
    pub fn algebra_coords(&self, z: &[C64], w: &[C64]) -> Result<Vec<C64>> {
        if w.len() != self.model.dim() {
            return Err(Error::dims(self.model.dim(), w.len()));
        }
        let a = self.model.left_frame(z)?;
        let u = a.lu().solve(&CMatrix::from_column_slice(w.len(), 1, w)).ok_or(Error::SingularMatrix)?;
        Ok(u.iter().copied().collect())
    }
}

impl FinslerFunction for LeftInvariantMetric {
    fn model(&self) -> &GroupModel {
        &self.model
    }

    fn value(&self, z: &[C64], w: &[C64]) -> Result<f64> {
        if !calculus::all_finite(w) {
            return Err(Error::NonFiniteEvaluation);
        }
        Ok(self.norm.value_unchecked(&self.algebra_coords(z, w)?))
    }

    fn w_min(&self) -> f64 {
        self.w_min
    }
}

/// `G'(z, w) = 𝒢(B(z) w) + ε·Re(z¹)·𝒢(w)`: not left-invariant for `ε ≠ 0`. Used as a negative
/// control for the verification harness.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedMetric {
    pub base: LeftInvariantMetric,
    pub epsilon: f64,
}

impl FinslerFunction for PerturbedMetric {
    fn model(&self) -> &GroupModel {
        &self.base.model
    }

    fn value(&self, z: &[C64], w: &[C64]) -> Result<f64> {
        let g = self.base.value(z, w)?;
        Ok(g + self.epsilon * z[0].re * self.base.norm.value_unchecked(w))
    }

    fn w_min(&self) -> f64 {
        self.base.w_min
    }
}

/// Connection data at one point `(z, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub g: f64,
    /// `∂_{w^i} G`; the conjugate gradient is its conjugate.
    pub g_i: Vec<C64>,
    /// `hess[(i, j)] = G_{i j̄}`.
    pub hess: CMatrix,
    /// Inverse of `hess`; `hess_inv[(j, i)] = G^{j̄ i}`.
    pub hess_inv: CMatrix,
    /// `mixed[(j, k)] = ∂_{w̄^j}∂_{z^k} G`.
    pub mixed: CMatrix,
    /// `n[(i, k)] = N^i_k`.
    pub n: CMatrix,
    /// `gamma[(i, j, k)] = Γ^i_{j;k}`.
    pub gamma: Tensor3,
    /// `C^i_{jk} = G^{l̄ i} ∂_{w^j} G_{k l̄}`, from the direct route only.
    pub vertical: Option<Tensor3>,
    /// Largest `|∂_{w̄^j} N^i_k|`, from the direct route only.
    pub conj_gamma_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SprayValue {
    /// Coefficients of `∂_{z^i}`.
    pub base_part: Vec<C64>,
    /// Coefficients of `∂_{w^i}`.
    pub fiber_part: Vec<C64>,
}

impl SprayValue {
    pub fn max_abs_diff(&self, other: &SprayValue) -> f64 {
        linalg::max_abs_diff_slice(&self.base_part, &other.base_part)
            .max(linalg::max_abs_diff_slice(&self.fiber_part, &other.fiber_part))
    }
}

fn validate_point<F: FinslerFunction + ?Sized>(f: &F, p: &FiberPoint) -> Result<()> {
    if p.dim() != f.dim() {
        return Err(Error::dims(f.dim(), p.dim()));
    }
    f.model().check_domain(p.z())?;
    p.require_fiber(f.w_min())
}

/// `∂_{w̄^l} G` at `(z, w)`.
pub(crate) fn conj_fiber_gradient<F: FinslerFunction + ?Sized>(
    f: &F,
    z: &[C64],
    w: &[C64],
    s: &DiffScheme,
) -> Result<Vec<C64>> {
    let g = |x: &[C64]| -> Result<Vec<C64>> { Ok(vec![C64::new(f.value(z, x)?, 0.0)]) };
    Ok(calculus::wirtinger_jacobian(g, w, s)?.dzbar.row(0).iter().copied().collect())
}

/// `(G_{i j̄}, ∂_{w̄^j}∂_{z^k} G)` from one differentiation of the conjugate fiber gradient over
/// `(z, w)`.
fn second_jet<F: FinslerFunction + ?Sized>(f: &F, z: &[C64], w: &[C64], s: &DiffScheme) -> Result<(CMatrix, CMatrix)> {
    let n = z.len();
    let mut zw = z.to_vec();
    zw.extend_from_slice(w);
    let inner = |q: &[C64]| conj_fiber_gradient(f, &q[..n], &q[n..], s);
    let jac = calculus::wirtinger_jacobian(inner, &zw, s)?.dz;
    let hess = linalg::hermitize(&CMatrix::from_fn(n, n, |i, l| jac[(l, n + i)]));
    let mixed = CMatrix::from_fn(n, n, |j, k| jac[(j, k)]);
    Ok((hess, mixed))
}

fn definite_inverse(hess: &CMatrix) -> Result<CMatrix> {
    if !linalg::is_positive_definite(hess) {
        return Err(Error::NotPseudoConvex(linalg::min_hermitian_eigenvalue(hess)));
    }
    linalg::inverse(hess)
}

/// `(G_{i j̄}, its inverse, ∂_{w̄^j}∂_{z^k} G, N)` at `(z, w)`.
fn connection_at<F: FinslerFunction + ?Sized>(
    f: &F,
    z: &[C64],
    w: &[C64],
    s: &DiffScheme,
) -> Result<(CMatrix, CMatrix, CMatrix, CMatrix)> {
    let (hess, mixed) = second_jet(f, z, w, s)?;
    let hess_inv = definite_inverse(&hess)?;
    let n = hess_inv.transpose() * &mixed;
    Ok((hess, hess_inv, mixed, n))
}

/// `N^i_k` by direct differentiation of `G`.
pub fn nonlinear_connection<F: FinslerFunction + ?Sized>(f: &F, p: &FiberPoint, s: &DiffScheme) -> Result<CMatrix> {
    validate_point(f, p)?;
    Ok(connection_at(f, p.z(), p.w(), s)?.3)
}

/// Full connection jet from numerical derivatives of `G` alone. Uses three nested stencil
/// levels for `Γ`, so `s` should have a step around `1e-3` and order 4 (see
/// [`DiffScheme::nested`]).
pub fn jet_direct<F: FinslerFunction + ?Sized>(f: &F, p: &FiberPoint, s: &DiffScheme) -> Result<MetricJet> {
    validate_point(f, p)?;
    let dim = f.dim();
    let (z, w) = (p.z(), p.w());
    let g = f.value(z, w)?;
    let (g_i, _) = calculus::wirtinger_grad(|x: &[C64]| Ok(C64::new(f.value(z, x)?, 0.0)), w, s)?;
    let (hess, hess_inv, mixed, n) = connection_at(f, z, w, s)?;

    let nn = dim * dim;
    let stacked = |x: &[C64]| -> Result<Vec<C64>> {
        let (h, _, _, nx) = connection_at(f, z, x, s)?;
        let mut out: Vec<C64> = nx.iter().copied().collect();
        out.extend(h.iter().copied());
        Ok(out)
    };
    let jac = calculus::wirtinger_jacobian(stacked, w, s)?;
    // column-major flattening: (i, k) sits at i + dim k
    let gamma = Tensor3::from_fn(dim, |i, j, k| jac.dz[(i + dim * k, j)]);
    let conj_gamma_residual = linalg::max_abs(&jac.dzbar.rows(0, nn).into_owned());
    let vertical = Tensor3::from_fn(dim, |i, j, k| {
        (0..dim).map(|l| hess_inv[(l, i)] * jac.dz[(nn + k + dim * l, j)]).sum()
    });

    Ok(MetricJet {
        g,
        g_i,
        hess,
        hess_inv,
        mixed,
        n,
        gamma,
        vertical: Some(vertical),
        conj_gamma_residual: Some(conj_gamma_residual),
    })
}

/// Derivatives `V_a(D^b_k)` as `vd[(a, b, k)]`.
fn right_derivatives_of_coframe(model: &GroupModel, z: &[C64], c: &CMatrix, s: &DiffScheme) -> Result<Tensor3> {
    let n = model.dim();
    let d_of = |q: &[C64]| -> Result<Vec<C64>> { Ok(linalg::inverse(&model.right_frame(q)?)?.iter().copied().collect()) };
    let dd = calculus::wirtinger_jacobian(d_of, z, s)?.dz;
    Ok(Tensor3::from_fn(n, |a, b, k| (0..n).map(|m| c[(m, a)] * dd[(b + n * k, m)]).sum()))
}

/// Connection jet from the invariant-frame formulas and the algebra-level norm derivatives.
/// `Γ` depends on `z` only by construction.
pub fn jet_frame(metric: &LeftInvariantMetric, p: &FiberPoint, s: &DiffScheme) -> Result<MetricJet> {
    validate_point(metric, p)?;
    let model = &metric.model;
    let dim = model.dim();
    let (z, w) = (p.z(), p.w());
    let fd = model.frame_data(z)?;
    let u = linalg::mat_vec(&fd.b, w);
    let v = linalg::mat_vec(&fd.d, w);

    let g = metric.norm.evaluate(&u)?;
    let grad_u = metric.norm.gradient(&u)?;
    let g_i = linalg::mat_vec(&fd.b.transpose(), &grad_u);
    let (hn, hn_inv) = metric.norm.hessian_with_inverse(&u)?;
    let hess = fd.b.transpose() * hn * linalg::conj(&fd.b);
    let hess_inv = linalg::conj(&fd.a) * hn_inv * fd.a.transpose();

    let vd = right_derivatives_of_coframe(model, z, &fd.c, s)?;
    let n = CMatrix::from_fn(dim, dim, |i, k| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..dim {
            for b in 0..dim {
                acc += fd.c[(i, b)] * v[a] * vd[(a, b, k)];
            }
        }
        acc
    });
    let gamma = Tensor3::from_fn(dim, |i, j, k| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..dim {
            for b in 0..dim {
                acc += fd.c[(i, b)] * fd.d[(a, j)] * vd[(a, b, k)];
            }
        }
        acc
    });
    let mixed = hess.transpose() * &n;

    Ok(MetricJet { g, g_i, hess, hess_inv, mixed, n, gamma, vertical: None, conj_gamma_residual: None })
}

/// Diameter of the set `{Γ(w_s)}` in the sup norm, maximized over components.
pub fn gamma_spread(gammas: &[Tensor3]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, ga) in gammas.iter().enumerate() {
        for gb in &gammas[a + 1..] {
            let d = ga.max_abs_diff(gb);
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Spread of `Γ` from [`jet_direct`] over fiber samples at a fixed base point.
pub fn berwald_spread<F: FinslerFunction + ?Sized>(f: &F, z: &[C64], w_samples: &[Vec<C64>], s: &DiffScheme) -> Result<f64> {
    if w_samples.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: w_samples.len() });
    }
    let gammas = w_samples
        .iter()
        .map(|w| jet_direct(f, &FiberPoint::new(z.to_vec(), w.clone())?, s).map(|j| j.gamma))
        .collect::<Result<Vec<_>>>()?;
    Ok(gamma_spread(&gammas))
}

/// The complex spray `χ = w^i ∂_{z^i} − N^i_k w^k ∂_{w^i}` with `N` from the direct route.
pub fn spray<F: FinslerFunction + ?Sized>(f: &F, p: &FiberPoint, s: &DiffScheme) -> Result<SprayValue> {
    let n = nonlinear_connection(f, p, s)?;
    let fiber_part = linalg::mat_vec(&n, p.w()).into_iter().map(|x| -x).collect();
    Ok(SprayValue { base_part: p.w().to_vec(), fiber_part })
}

/// Largest `|Ṽ_i G|` at `p`: lifted right-invariant fields annihilate a left-invariant `G`.
pub fn right_lift_residual<F: FinslerFunction + ?Sized>(f: &F, p: &FiberPoint, s: &DiffScheme) -> Result<f64> {
    validate_point(f, p)?;
    let model = f.model();
    let n = model.dim();
    let g = |q: &[C64]| -> Result<Vec<C64>> { Ok(vec![C64::new(f.value(&q[..n], &q[n..])?, 0.0)]) };
    let zw = p.concat();
    let jac = calculus::wirtinger_jacobian(g, &zw, s)?.dz;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let lift = model.lift_field(FrameSide::Right, i, p, s)?;
        let d: C64 = (0..2 * n).map(|m| jac[(0, m)] * lift[m]).sum();
        worst = worst.max(d.norm());
        if worst.is_nan() {
            break;
        }
    }
    Ok(worst)
}

/// `(‖G_{i j̄} − B^p_i conj(B^q_j) 𝒢_{p q̄}‖, max_i ‖Ṽ_i 𝒢_{j k̄}(u)‖)` at `p`, with `G_{i j̄}` taken
/// numerically and `u = B(z) w`.
pub fn algebra_hessian_residuals(metric: &LeftInvariantMetric, p: &FiberPoint, s: &DiffScheme) -> Result<(f64, f64)> {
    validate_point(metric, p)?;
    let model = &metric.model;
    let n = model.dim();
    let (z, w) = (p.z(), p.w());
    let numeric = calculus::wirtinger_hessian_mixed(|x: &[C64]| metric.value(z, x), w, &DiffScheme::nested())?;
    let b = model.left_coframe(z)?;
    let u = linalg::mat_vec(&b, w);
    let pulled = b.transpose() * metric.norm.hessian(&u)? * linalg::conj(&b);
    let transport = linalg::max_abs_diff(&numeric, &pulled);

    let hn = |q: &[C64]| -> Result<Vec<C64>> {
        let u = metric.algebra_coords(&q[..n], &q[n..])?;
        Ok(metric.norm.hessian_unchecked(&u)?.iter().copied().collect())
    };
    let zw = p.concat();
    let jac = calculus::wirtinger_jacobian(hn, &zw, s)?.dz;
    let mut invariance: f64 = 0.0;
    for i in 0..n {
        let lift = model.lift_field(FrameSide::Right, i, p, s)?;
        invariance = invariance.max(linalg::max_abs_slice(&linalg::mat_vec(&jac, &lift)));
    }
    Ok((transport, invariance))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn heis() -> LeftInvariantMetric {
        LeftInvariantMetric::new(GroupModel::Heisenberg3, MinkowskiNorm::euclidean(3)).unwrap()
    }

    #[test]
    fn abelian_value_is_norm_of_w() {
        let m = LeftInvariantMetric::new(GroupModel::Abelian { n: 2 }, MinkowskiNorm::euclidean(2)).unwrap();
        assert_eq!(m.value(&[c(3.0, 1.0), c(-2.0, 0.5)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 1.0);
    }

    #[test]
    fn heisenberg_value_uses_inverse_frame() {
        // B = [[1,0,0],[0,1,0],[0,-z1,1]] so Bw for w = e3 is e3 at z = (1, 1, 0).
        let m = heis();
        let z = [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert!((m.value(&z, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap() - 1.0).abs() < 1e-15);
        // w = e2: Bw = (0, 1, -1).
        assert!((m.value(&z, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_direct_jet_at_identity_matches_hand_oracle() {
        // G = |w1|^2 + |w2|^2 + |w3 - z1 w2|^2 near z = 0 gives N^3_1 = -w2, Γ^3_{2;1} = -1, all else 0.
        let m = heis();
        let w = vec![c(0.4, -0.3), c(0.7, 0.2), c(-0.5, 0.6)];
        let p = FiberPoint::new(m.model.identity(), w.clone()).unwrap();
        let jet = jet_direct(&m, &p, &DiffScheme::nested()).unwrap();
        let mut n_expect = CMatrix::zeros(3, 3);
        n_expect[(2, 0)] = -w[1];
        assert!(linalg::max_abs_diff(&jet.n, &n_expect) < 1e-8, "{}", jet.n);
        let mut g_expect = Tensor3::zeros(3);
        g_expect[(2, 1, 0)] = c(-1.0, 0.0);
        assert!(jet.gamma.max_abs_diff(&g_expect) < 1e-5);
        assert!(jet.conj_gamma_residual.unwrap() < 1e-5);
        assert!(linalg::max_abs_diff(&jet.hess, &linalg::identity(3)) < 1e-8);
    }

    #[test]
    fn frame_jet_matches_hand_oracle_at_identity() {
        let m = heis();
        let w = vec![c(0.4, -0.3), c(0.7, 0.2), c(-0.5, 0.6)];
        let p = FiberPoint::new(m.model.identity(), w.clone()).unwrap();
        let jet = jet_frame(&m, &p, &DiffScheme::default()).unwrap();
        assert!((jet.n[(2, 0)] + w[1]).norm() < 1e-9);
        assert!((jet.gamma[(2, 1, 0)] + c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn abelian_connection_vanishes_exactly() {
        let m = LeftInvariantMetric::new(GroupModel::Abelian { n: 2 }, MinkowskiNorm::pnorm(1.5, vec![1.0, 2.0]).unwrap())
            .unwrap();
        let p = FiberPoint::new(vec![c(0.2, 0.1), c(-0.3, 0.2)], vec![c(1.0, 0.5), c(0.3, -0.8)]).unwrap();
        let jet = jet_direct(&m, &p, &DiffScheme::nested()).unwrap();
        assert_eq!(linalg::max_abs(&jet.n), 0.0);
        assert_eq!(jet.gamma.max_abs(), 0.0);
        let s = spray(&m, &p, &DiffScheme::default()).unwrap();
        assert_eq!(s.base_part, p.w());
        assert!(s.fiber_part.iter().all(|x| *x == c(0.0, 0.0)));
    }

    #[test]
    fn degenerate_fiber_is_rejected() {
        let m = heis();
        let p = FiberPoint::new(m.model.identity(), vec![c(1e-4, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(jet_direct(&m, &p, &DiffScheme::nested()), Err(Error::DegenerateFiber { .. })));
    }

    #[test]
    fn berwald_needs_two_samples() {
        let m = heis();
        assert!(matches!(
            berwald_spread(&m, &m.model.identity(), &[vec![c(1.0, 0.0); 3]], &DiffScheme::nested()),
            Err(Error::TooFewSamples { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn gamma_spread_of_identical_tensors_is_zero() {
        let t = Tensor3::from_fn(2, |a, b, c| C64::new((a + b + c) as f64, 0.0));
        assert_eq!(gamma_spread(&[t.clone(), t]), 0.0);
    }
}
