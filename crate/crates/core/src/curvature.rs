//! Holomorphic sectional curvature, Kähler torsions and the lifted-frame spray.
//!
//! The curvature is contracted with `w` before any differencing. Writing `τ` for a complex line
//! parameter, `w^i w̄^j w^k w̄^l R_{i j̄ k l̄} = −∂_τ∂_τ̄ G(z+τw, w) + G^{q̄p} X_q̄ conj(X_p̄)` with
//! `X_q̄ = ∂_τ [∂_{w̄^q} G](z+τw, w)`, which relies on `w^i G_{i q̄} = G_q̄` and
//! `w^i w̄^j G_{i j̄} = G`. Then `K = 2 Re(R) / G²`.

use alloc::vec::Vec;

use crate::calculus::{self, DiffScheme, FiberPoint};
use crate::error::{Error, Result};
use crate::lie::{FrameSide, GroupModel};
use crate::linalg::{self, CMatrix, Tensor3};
use crate::metric::{self, FinslerFunction, SprayValue};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSample {
    pub point: FiberPoint,
    pub g: f64,
    /// `w^i w̄^j w^k w̄^l R_{i j̄ k l̄}`; real up to discretization error.
    pub r_contracted: C64,
    pub k: f64,
}

/// Holomorphic sectional curvature at `p`. The line step is `s.step · (1 + |z|)`; `s` should be
/// order 4 with Richardson extrapolation (see [`DiffScheme::curvature`]).
pub fn curvature<F: FinslerFunction + ?Sized>(f: &F, p: &FiberPoint, s: &DiffScheme) -> Result<CurvatureSample> {
    s.validate()?;
    if p.dim() != f.dim() {
        return Err(Error::dims(f.dim(), p.dim()));
    }
    f.model().check_domain(p.z())?;
    p.require_fiber(f.w_min())?;
    let (z, w) = (p.z(), p.w());
    let inner = DiffScheme::nested();
    let z_norm = libm::sqrt(z.iter().map(|x| x.norm_sqr()).sum::<f64>());
    let h = s.step * (1.0 + z_norm);
    let shifted = |t: C64| -> Vec<C64> { z.iter().zip(w).map(|(zi, wi)| zi + t * wi).collect() };

    let g = f.value(z, w)?;
    let laplacian = calculus::line_mixed_second(|t| f.value(&shifted(t), w), h, s)?;
    let x = calculus::line_derivative(|t| metric::conj_fiber_gradient(f, &shifted(t), w, &inner), h, s)?;
    let hess = calculus::wirtinger_hessian_mixed(|v: &[C64]| f.value(z, v), w, &inner)?;
    let hess_inv = linalg::inverse(&hess)?;

    let n = f.dim();
    let mut quad = C64::new(0.0, 0.0);
    for q in 0..n {
        for pp in 0..n {
            quad += hess_inv[(q, pp)] * x[q] * x[pp].conj();
        }
    }
    let r = quad - laplacian;
    let k = 2.0 * r.re / (g * g);
    if !k.is_finite() {
        return Err(Error::NonFiniteEvaluation);
    }
    Ok(CurvatureSample { point: p.clone(), g, r_contracted: r, k })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorsionReport {
    pub point: FiberPoint,
    /// `strong[(i, j, k)] = Γ^i_{j;k} − Γ^i_{k;j}`.
    pub strong: Tensor3,
    /// `contracted[(i, j)] = w^k strong[(i, j, k)]`.
    pub contracted: CMatrix,
    /// `weak[j] = G_i w^k strong[(i, j, k)]`.
    pub weak: Vec<C64>,
    /// `predicted[(i, j, k)] = C^i_r D^p_j D^q_k c^r_{pq}`.
    pub predicted: Tensor3,
}

impl TorsionReport {
    /// `(strong, contracted, weak)` sup norms.
    pub fn residuals(&self) -> [f64; 3] {
        [self.strong.max_abs(), linalg::max_abs(&self.contracted), linalg::max_abs_slice(&self.weak)]
    }

    pub fn prediction_residual(&self) -> f64 {
        self.strong.max_abs_diff(&self.predicted)
    }
}

/// Torsions of the direct-route connection at `p`, with the frame prediction alongside.
pub fn torsions<F: FinslerFunction + ?Sized>(f: &F, p: &FiberPoint, s: &DiffScheme) -> Result<TorsionReport> {
    let jet = metric::jet_direct(f, p, s)?;
    let model = f.model();
    let n = model.dim();
    let w = p.w();
    let strong = Tensor3::from_fn(n, |i, j, k| jet.gamma[(i, j, k)] - jet.gamma[(i, k, j)]);
    let contracted = CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| w[k] * strong[(i, j, k)]).sum());
    let weak = (0..n).map(|j| (0..n).map(|i| jet.g_i[i] * contracted[(i, j)]).sum()).collect();
    let predicted = predicted_torsion(model, p.z())?;
    Ok(TorsionReport { point: p.clone(), strong, contracted, weak, predicted })
}

/// `C^i_r D^p_j D^q_k c^r_{pq}` at `z`.
pub fn predicted_torsion(model: &GroupModel, z: &[C64]) -> Result<Tensor3> {
    let fd = model.frame_data(z)?;
    let sc = model.declared_constants();
    let n = model.dim();
    Ok(Tensor3::from_fn(n, |i, j, k| {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..n {
            for a in 0..n {
                for b in 0..n {
                    acc += fd.c[(i, r)] * fd.d[(a, j)] * fd.d[(b, k)] * sc.get(r, a, b);
                }
            }
        }
        acc
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KahlerVerdict {
    pub strongly: bool,
    pub kahler: bool,
    pub weakly: bool,
    /// Largest `(strong, contracted, weak)` residuals over the samples.
    pub max_residuals: [f64; 3],
    /// Sample attaining the largest weak residual.
    pub weak_witness: Option<FiberPoint>,
    /// The three flags coincide.
    pub equivalent: bool,
    /// The flags equal "the structure constants vanish".
    pub matches_abelian: bool,
}

pub const MIN_KAHLER_SAMPLES: usize = 10;

impl KahlerVerdict {
    pub fn from_reports(reports: &[TorsionReport], tol: f64, abelian: bool) -> Result<Self> {
        if reports.len() < MIN_KAHLER_SAMPLES {
            return Err(Error::TooFewSamples { needed: MIN_KAHLER_SAMPLES, got: reports.len() });
        }
        let mut max = [0.0f64; 3];
        let mut weak_witness = None;
        for rep in reports {
            let r = rep.residuals();
            for t in 0..3 {
                if r[t].is_nan() || r[t] > max[t] {
                    if t == 2 {
                        weak_witness = Some(rep.point.clone());
                    }
                    max[t] = r[t];
                }
            }
        }
        let [strongly, kahler, weakly] = max.map(|m| m <= tol);
        let equivalent = strongly == kahler && kahler == weakly;
        Ok(KahlerVerdict {
            strongly,
            kahler,
            weakly,
            max_residuals: max,
            weak_witness,
            equivalent,
            matches_abelian: equivalent && strongly == abelian,
        })
    }
}

/// Kähler flags over a sample set; needs at least [`MIN_KAHLER_SAMPLES`] points.
pub fn kahler_verdict<F: FinslerFunction + ?Sized>(
    f: &F,
    points: &[FiberPoint],
    tol: f64,
    s: &DiffScheme,
) -> Result<KahlerVerdict> {
    if points.len() < MIN_KAHLER_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_KAHLER_SAMPLES, got: points.len() });
    }
    let reports = points.iter().map(|p| torsions(f, p, s)).collect::<Result<Vec<_>>>()?;
    KahlerVerdict::from_reports(&reports, tol, f.model().declared_constants().is_abelian())
}

/// `v^a Ṽ_a` (right) or `u^a Ũ_a` (left) at `p`, with `u = B w`, `v = D w`. Both coincide with
/// the complex spray of every left-invariant metric.
pub fn spray_via_lift(model: &GroupModel, side: FrameSide, p: &FiberPoint, s: &DiffScheme) -> Result<SprayValue> {
    let n = model.dim();
    let frame = model.frame(side, p.z())?;
    let coeffs = linalg::mat_vec(&linalg::inverse(&frame)?, p.w());
    let mut total = alloc::vec![C64::new(0.0, 0.0); 2 * n];
    for (a, ca) in coeffs.iter().enumerate() {
        let lift = model.lift_field(side, a, p, s)?;
        for (t, l) in total.iter_mut().zip(&lift) {
            *t += ca * l;
        }
    }
    let fiber_part = total.split_off(n);
    Ok(SprayValue { base_part: total, fiber_part })
}
