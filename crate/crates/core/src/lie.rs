//! Complex Lie group models and the invariant-frame calculus on `G` and `T^{1,0}G`.
//!
//! A model is a holomorphic chart centred at the identity with an explicit polynomial
//! multiplication. Left-invariant fields `U_j = A^i_j ∂_{z^i}` and right-invariant fields
//! `V_j = C^i_j ∂_{z^i}` come from the holomorphic Jacobians of the multiplication in its second
//! and first argument at the identity. Those Jacobians are evaluated with forward-mode dual numbers,
//! so frame matrices carry only rounding error; all further derivatives (brackets, lifts,
//! directional derivatives of frame entries) are finite differences.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{self, DiffScheme, FiberPoint};
use crate::dual::{Dual, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Tensor3};
use crate::report::{Expect, SampleCoords, VerificationReport};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Frames with `|det| < SINGULAR_DET` are rejected.
pub const SINGULAR_DET: f64 = 1e-10;

/// Minimum distance of `affine1`'s first coordinate from the singular locus `a = 0`.
pub const AFFINE_DOMAIN_MARGIN: f64 = 1e-3;

/// Bracket coefficients `[e_i, e_j] = c^k_{ij} e_k`, stored as `c[(k, i, j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    c: Tensor3,
}

impl StructureConstants {
    pub const JACOBI_TOL: f64 = 1e-12;

    pub fn new(c: Tensor3) -> Result<Self> {
        let n = c.dim();
        if n == 0 {
            return Err(Error::InvalidStructureConstants("dimension must be positive".into()));
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if c[(k, i, j)] != -c[(k, j, i)] {
                        return Err(Error::InvalidStructureConstants(format!(
                            "c^{k}_{{{i}{j}}} is not antisymmetric"
                        )));
                    }
                }
            }
        }
        let sc = StructureConstants { c };
        let jacobi = sc.jacobi_residual();
        if jacobi.is_nan() || jacobi > Self::JACOBI_TOL {
            return Err(Error::InvalidStructureConstants(format!("Jacobi identity residual {jacobi:e}")));
        }
        Ok(sc)
    }

    pub fn zero(n: usize) -> Self {
        StructureConstants { c: Tensor3::zeros(n) }
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    /// `c^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> C64 {
        self.c[(k, i, j)]
    }

    pub fn tensor(&self) -> &Tensor3 {
        &self.c
    }

    pub fn is_abelian(&self) -> bool {
        self.c.as_slice().iter().all(|x| *x == ZERO)
    }

    /// Largest `|Σ_m c^m_{ij} c^l_{mk} + c^m_{jk} c^l_{mi} + c^m_{ki} c^l_{mj}|`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let c = &self.c;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s: C64 = (0..n)
                            .map(|m| {
                                c[(m, i, j)] * c[(l, m, k)] + c[(m, j, k)] * c[(l, m, i)] + c[(m, k, i)] * c[(l, m, j)]
                            })
                            .sum();
                        worst = worst.max(s.norm());
                    }
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameSide {
    /// Left-invariant fields `U_j`, matrix `A`.
    Left,
    /// Right-invariant fields `V_j`, matrix `C`.
    Right,
}

/// Frame matrices at one point: `U_j = A^i_j ∂_i`, `V_j = C^i_j ∂_i`, `B = A⁻¹`, `D = C⁻¹`,
/// `ψ = B·C` (so `V_j = ψ^i_j U_i`) and `φ = D·A = ψ⁻¹` (so `U_j = φ^i_j V_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameData {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
    pub phi: CMatrix,
    pub psi: CMatrix,
}

impl FrameData {
    /// Worst deviation among `AB = BA = I`, `CD = DC = I`, `φψ = ψφ = I`.
    pub fn inverse_residual(&self) -> f64 {
        let n = self.a.nrows();
        let id = linalg::identity(n);
        [
            &self.a * &self.b,
            &self.b * &self.a,
            &self.c * &self.d,
            &self.d * &self.c,
            &self.phi * &self.psi,
            &self.psi * &self.phi,
        ]
        .iter()
        .map(|m| linalg::max_abs_diff(m, &id))
        .fold(0.0, f64::max)
    }
}

/// Built-in complex Lie group charts. The identity sits at the origin in every chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupModel {
    /// `ℂⁿ` under addition.
    Abelian { n: usize },
    /// Unitriangular 3×3 matrices with superdiagonal `(z¹, z²)` and corner `z³`.
    Heisenberg3,
    /// Affine maps `x ↦ a x + b` in the chart `(a − 1, b)`, defined for `a ≠ 0`.
    Affine1,
}

impl GroupModel {
    /// Parses `abelian(n)`, `heisenberg3` or `affine1`.
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "heisenberg3" => return Ok(GroupModel::Heisenberg3),
            "affine1" => return Ok(GroupModel::Affine1),
            _ => {}
        }
        if let Some(arg) = name.strip_prefix("abelian(").and_then(|r| r.strip_suffix(')')) {
            if let Ok(n) = arg.trim().parse::<usize>() {
                if n >= 1 {
                    return Ok(GroupModel::Abelian { n });
                }
            }
        }
        Err(Error::UnknownModel(name.to_string()))
    }

    pub fn name(&self) -> String {
        match self {
            GroupModel::Abelian { n } => format!("abelian({n})"),
            GroupModel::Heisenberg3 => "heisenberg3".into(),
            GroupModel::Affine1 => "affine1".into(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            GroupModel::Abelian { n } => *n,
            GroupModel::Heisenberg3 => 3,
            GroupModel::Affine1 => 2,
        }
    }

    pub fn identity(&self) -> Vec<C64> {
        vec![ZERO; self.dim()]
    }

    pub fn declared_constants(&self) -> StructureConstants {
        let n = self.dim();
        let mut c = Tensor3::zeros(n);
        match self {
            GroupModel::Abelian { .. } => {}
            GroupModel::Heisenberg3 => {
                c[(2, 0, 1)] = ONE;
                c[(2, 1, 0)] = -ONE;
            }
            GroupModel::Affine1 => {
                c[(1, 0, 1)] = ONE;
                c[(1, 1, 0)] = -ONE;
            }
        }
        StructureConstants::new(c).expect("built-in structure constants are valid")
    }

    /// Validates dimension, finiteness and chart domain.
    pub fn check_domain(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::dims(self.dim(), z.len()));
        }
        if !calculus::all_finite(z) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        if let GroupModel::Affine1 = self {
            let dist = (z[0] + ONE).norm();
            if dist < AFFINE_DOMAIN_MARGIN {
                return Err(Error::OutOfDomain {
                    model: self.name(),
                    reason: format!("|z1 + 1| = {dist:e} < {AFFINE_DOMAIN_MARGIN:e}"),
                });
            }
        }
        Ok(())
    }

    /// Group multiplication written over any [`Scalar`].
    pub fn multiply_generic<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        match self {
            GroupModel::Abelian { .. } => a.iter().zip(b).map(|(x, y)| *x + *y).collect(),
            GroupModel::Heisenberg3 => vec![a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]],
            GroupModel::Affine1 => {
                let one = S::constant(ONE);
                let a1 = a[0] + one;
                let a2 = b[0] + one;
                vec![a1 * a2 - one, a1 * b[1] + a[1]]
            }
        }
    }

    pub fn multiply(&self, a: &[C64], b: &[C64]) -> Result<Vec<C64>> {
        self.check_domain(a)?;
        self.check_domain(b)?;
        Ok(self.multiply_generic(a, b))
    }

    pub fn inverse(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.check_domain(z)?;
        Ok(match self {
            GroupModel::Abelian { .. } => z.iter().map(|x| -x).collect(),
            GroupModel::Heisenberg3 => vec![-z[0], -z[1], -z[2] + z[0] * z[1]],
            GroupModel::Affine1 => {
                let a = z[0] + ONE;
                vec![ONE / a - ONE, -z[1] / a]
            }
        })
    }

    /// `∂ m(a, b) / ∂ b`, the tangent map of `L_a` at `b`.
    pub fn left_translation_jacobian(&self, a: &[C64], b: &[C64]) -> Result<CMatrix> {
        self.check_domain(a)?;
        self.check_domain(b)?;
        Ok(self.dual_jacobian(a, b, false))
    }

    /// `∂ m(a, b) / ∂ a`, the tangent map of `R_b` at `a`.
    pub fn right_translation_jacobian(&self, a: &[C64], b: &[C64]) -> Result<CMatrix> {
        self.check_domain(a)?;
        self.check_domain(b)?;
        Ok(self.dual_jacobian(a, b, true))
    }

    fn dual_jacobian(&self, a: &[C64], b: &[C64], wrt_first: bool) -> CMatrix {
        let n = self.dim();
        let mut jac = CMatrix::zeros(n, n);
        let consts = |x: &[C64]| x.iter().map(|v| Dual::constant(*v)).collect::<Vec<_>>();
        for j in 0..n {
            let mut da = consts(a);
            let mut db = consts(b);
            if wrt_first {
                da[j] = Dual::variable(a[j]);
            } else {
                db[j] = Dual::variable(b[j]);
            }
            for (i, out) in self.multiply_generic(&da, &db).iter().enumerate() {
                jac[(i, j)] = out.deriv;
            }
        }
        jac
    }

    fn checked_frame(&self, m: CMatrix) -> Result<CMatrix> {
        let det = m.determinant().norm();
        if det.is_nan() || det < SINGULAR_DET {
            return Err(Error::SingularFrame(det));
        }
        Ok(m)
    }

    /// `A(z)`: column `j` holds the components of the left-invariant field `U_j`.
    pub fn left_frame(&self, z: &[C64]) -> Result<CMatrix> {
        self.checked_frame(self.left_translation_jacobian(z, &self.identity())?)
    }

    /// `C(z)`: column `j` holds the components of the right-invariant field `V_j`.
    pub fn right_frame(&self, z: &[C64]) -> Result<CMatrix> {
        self.checked_frame(self.right_translation_jacobian(&self.identity(), z)?)
    }

    pub fn frame(&self, side: FrameSide, z: &[C64]) -> Result<CMatrix> {
        match side {
            FrameSide::Left => self.left_frame(z),
            FrameSide::Right => self.right_frame(z),
        }
    }

    /// `B(z) = A(z)⁻¹`, the map `w ↦ u` into left-invariant coordinates.
    pub fn left_coframe(&self, z: &[C64]) -> Result<CMatrix> {
        linalg::inverse(&self.left_frame(z)?)
    }

    pub fn frame_data(&self, z: &[C64]) -> Result<FrameData> {
        let a = self.left_frame(z)?;
        let c = self.right_frame(z)?;
        let b = linalg::inverse(&a)?;
        let d = linalg::inverse(&c)?;
        let psi = &b * &c;
        let phi = &d * &a;
        Ok(FrameData { a, b, c, d, phi, psi })
    }

    /// Closed-form `A(z)` for cross-checks.
    pub fn analytic_left_frame(&self, z: &[C64]) -> Option<CMatrix> {
        let n = self.dim();
        Some(match self {
            GroupModel::Abelian { .. } => linalg::identity(n),
            GroupModel::Heisenberg3 => {
                let mut m = linalg::identity(3);
                m[(2, 1)] = z[0];
                m
            }
            GroupModel::Affine1 => linalg::identity(2) * (z[0] + ONE),
        })
    }

    /// Closed-form `C(z)` for cross-checks.
    pub fn analytic_right_frame(&self, z: &[C64]) -> Option<CMatrix> {
        let n = self.dim();
        Some(match self {
            GroupModel::Abelian { .. } => linalg::identity(n),
            GroupModel::Heisenberg3 => {
                let mut m = linalg::identity(3);
                m[(2, 0)] = z[1];
                m
            }
            GroupModel::Affine1 => {
                let mut m = linalg::identity(2);
                m[(0, 0)] = z[0] + ONE;
                m[(1, 0)] = z[1];
                m
            }
        })
    }

    pub fn frame_column(&self, side: FrameSide, z: &[C64], j: usize) -> Result<Vec<C64>> {
        Ok(self.frame(side, z)?.column(j).iter().copied().collect())
    }

    /// Components of the lifted field `Ũ_j` or `Ṽ_j` at `(z, w)`, ordered `(∂_z…, ∂_w…)`:
    /// `F^i_j ∂_{z^i} + w^i ∂_{z^i} F^k_j ∂_{w^k}`.
    pub fn lift_field(&self, side: FrameSide, j: usize, p: &FiberPoint, s: &DiffScheme) -> Result<Vec<C64>> {
        self.lift_at(side, j, p.z(), p.w(), s)
    }

    fn lift_at(&self, side: FrameSide, j: usize, z: &[C64], w: &[C64], s: &DiffScheme) -> Result<Vec<C64>> {
        if j >= self.dim() {
            return Err(Error::dims(self.dim(), j));
        }
        lift_holomorphic(|q: &[C64]| self.frame_column(side, q, j), z, w, s)
    }

    /// The lifted field as a function on `ℂ^{2n}`.
    pub fn lifted_field(&self, side: FrameSide, j: usize, s: DiffScheme) -> impl Fn(&[C64]) -> Result<Vec<C64>> + '_ {
        let n = self.dim();
        move |q: &[C64]| {
            let (z, w) = q.split_at(n);
            self.lift_at(side, j, z, w, &s)
        }
    }

    /// The vertical field `∂_{u^j} = A^i_j ∂_{w^i}` (left) or `∂_{v^j} = C^i_j ∂_{w^i}` (right) on
    /// `ℂ^{2n}`.
    pub fn fiber_field(&self, side: FrameSide, j: usize) -> impl Fn(&[C64]) -> Result<Vec<C64>> + '_ {
        let n = self.dim();
        move |q: &[C64]| {
            let col = self.frame_column(side, &q[..n], j)?;
            let mut out = vec![ZERO; n];
            out.extend(col);
            Ok(out)
        }
    }

    /// Structure constants read off from brackets of frame fields at the identity. Left frames
    /// reproduce the declared constants; right frames give their negatives.
    pub fn derived_constants(&self, side: FrameSide, s: &DiffScheme) -> Result<Tensor3> {
        let n = self.dim();
        let e = self.identity();
        let inv = linalg::inverse(&self.frame(side, &e)?)?;
        let mut out = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let br = calculus::directional_bracket(
                    |q: &[C64]| self.frame_column(side, q, i),
                    |q: &[C64]| self.frame_column(side, q, j),
                    &e,
                    s,
                )?;
                let coeffs = linalg::mat_vec(&inv, &br);
                for k in 0..n {
                    out[(k, i, j)] = coeffs[k];
                }
            }
        }
        Ok(out)
    }

    /// Independent route to `ψ(g)`: `Ad(g⁻¹) e_j = (L_{g⁻¹})_* (R_g)_* e_j`, with the tangent map of
    /// `L_{g⁻¹}` taken by finite differences of the multiplication.
    pub fn adjoint_inverse_by_pushforward(&self, g: &[C64], s: &DiffScheme) -> Result<CMatrix> {
        let e = self.identity();
        let right_push = self.right_translation_jacobian(&e, g)?;
        let g_inv = self.inverse(g)?;
        let left_push = calculus::wirtinger_jacobian(|x: &[C64]| self.multiply(&g_inv, x), g, s)?.dz;
        Ok(left_push * right_push)
    }

    /// Checks every identity of the invariant-frame calculus at `(z, w)` (frame transitions,
    /// brackets of frames and of their lifts, directional derivatives of `ψ` and `φ`, lifted frame
    /// transitions, the action of lifts on invariant fiber coordinates, and brackets with the
    /// vertical fields).
    pub fn verify_frame_identities(&self, p: &FiberPoint, tol: f64, s: &DiffScheme) -> Result<VerificationReport> {
        let n = self.dim();
        let z = p.z();
        let w = p.w();
        self.check_domain(z)?;
        let fd = self.frame_data(z)?;
        let sc = self.declared_constants();
        let c = |k: usize, i: usize, j: usize| sc.get(k, i, j);
        let zw = p.concat();
        let at = SampleCoords::fiber(p);
        let mut rep = VerificationReport::new("frames");
        let mut row = |label: &str, r: f64| rep.record(label, r, tol, Expect::AtMost, at.clone());

        let u = linalg::mat_vec(&fd.b, w);
        let v = linalg::mat_vec(&fd.d, w);

        // (1)
        row("U_j = phi^i_j V_i", linalg::max_abs_diff(&fd.a, &(&fd.c * &fd.phi)));
        row("V_j = psi^i_j U_i", linalg::max_abs_diff(&fd.c, &(&fd.a * &fd.psi)));
        row(
            "u = psi v, v = phi u",
            linalg::max_abs_diff_slice(&u, &linalg::mat_vec(&fd.psi, &v))
                .max(linalg::max_abs_diff_slice(&v, &linalg::mat_vec(&fd.phi, &u))),
        );

        // (2) on G
        let field = |side: FrameSide, j: usize| move |q: &[C64]| self.frame_column(side, q, j);
        let mut uu: f64 = 0.0;
        let mut vv: f64 = 0.0;
        let mut uv: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let b_uu = calculus::directional_bracket(field(FrameSide::Left, i), field(FrameSide::Left, j), z, s)?;
                let b_vv = calculus::directional_bracket(field(FrameSide::Right, i), field(FrameSide::Right, j), z, s)?;
                let b_uv = calculus::directional_bracket(field(FrameSide::Left, i), field(FrameSide::Right, j), z, s)?;
                let exp_uu: Vec<C64> = (0..n).map(|r| (0..n).map(|k| c(k, i, j) * fd.a[(r, k)]).sum()).collect();
                let exp_vv: Vec<C64> = (0..n).map(|r| -(0..n).map(|k| c(k, i, j) * fd.c[(r, k)]).sum::<C64>()).collect();
                uu = uu.max(linalg::max_abs_diff_slice(&b_uu, &exp_uu));
                vv = vv.max(linalg::max_abs_diff_slice(&b_vv, &exp_vv));
                uv = uv.max(linalg::max_abs_slice(&b_uv));
            }
        }
        row("[U_i,U_j] = c^k_ij U_k", uu);
        row("[V_i,V_j] = -c^k_ij V_k", vv);
        row("[U_i,V_j] = 0", uv);

        // (2) lifted, on T^{1,0}G
        let lift_u: Vec<Vec<C64>> = (0..n).map(|j| self.lift_field(FrameSide::Left, j, p, s)).collect::<Result<_>>()?;
        let lift_v: Vec<Vec<C64>> = (0..n).map(|j| self.lift_field(FrameSide::Right, j, p, s)).collect::<Result<_>>()?;
        let mut luu: f64 = 0.0;
        let mut lvv: f64 = 0.0;
        let mut luv: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let b_uu = calculus::directional_bracket(
                    self.lifted_field(FrameSide::Left, i, *s),
                    self.lifted_field(FrameSide::Left, j, *s),
                    &zw,
                    s,
                )?;
                let b_vv = calculus::directional_bracket(
                    self.lifted_field(FrameSide::Right, i, *s),
                    self.lifted_field(FrameSide::Right, j, *s),
                    &zw,
                    s,
                )?;
                let b_uv = calculus::directional_bracket(
                    self.lifted_field(FrameSide::Left, i, *s),
                    self.lifted_field(FrameSide::Right, j, *s),
                    &zw,
                    s,
                )?;
                let exp_uu: Vec<C64> = (0..2 * n).map(|r| (0..n).map(|k| c(k, i, j) * lift_u[k][r]).sum()).collect();
                let exp_vv: Vec<C64> =
                    (0..2 * n).map(|r| -(0..n).map(|k| c(k, i, j) * lift_v[k][r]).sum::<C64>()).collect();
                luu = luu.max(linalg::max_abs_diff_slice(&b_uu, &exp_uu));
                lvv = lvv.max(linalg::max_abs_diff_slice(&b_vv, &exp_vv));
                luv = luv.max(linalg::max_abs_slice(&b_uv));
            }
        }
        row("[U~_i,U~_j] = c^k_ij U~_k", luu);
        row("[V~_i,V~_j] = -c^k_ij V~_k", lvv);
        row("[U~_i,V~_j] = 0", luv);

        // (3)
        let vec_of = |m: CMatrix| -> Vec<C64> { m.iter().copied().collect() };
        let dpsi = calculus::wirtinger_jacobian(|q: &[C64]| Ok(vec_of(self.frame_data(q)?.psi)), z, s)?.dz;
        let dphi = calculus::wirtinger_jacobian(|q: &[C64]| Ok(vec_of(self.frame_data(q)?.phi)), z, s)?.dz;
        // column-major flattening: entry (k, j) sits at k + n j
        let mut r3u: f64 = 0.0;
        let mut r3v: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let idx = k + n * j;
                    let u_psi: C64 = (0..n).map(|m| fd.a[(m, i)] * dpsi[(idx, m)]).sum();
                    let exp_u: C64 = (0..n).map(|l| fd.psi[(l, j)] * c(k, l, i)).sum();
                    let v_phi: C64 = (0..n).map(|m| fd.c[(m, i)] * dphi[(idx, m)]).sum();
                    let exp_v: C64 = (0..n).map(|l| fd.phi[(l, j)] * c(k, i, l)).sum();
                    r3u = r3u.max((u_psi - exp_u).norm());
                    r3v = r3v.max((v_phi - exp_v).norm());
                }
            }
        }
        row("U_i(psi^k_j) = psi^l_j c^k_li", r3u);
        row("V_i(phi^k_j) = phi^l_j c^k_il", r3v);

        // (4)
        let mut r4v: f64 = 0.0;
        let mut r4u: f64 = 0.0;
        for i in 0..n {
            let mut rhs_v: Vec<C64> = (0..2 * n).map(|r| (0..n).map(|j| fd.psi[(j, i)] * lift_u[j][r]).sum()).collect();
            let mut rhs_u: Vec<C64> = (0..2 * n).map(|r| (0..n).map(|j| fd.phi[(j, i)] * lift_v[j][r]).sum()).collect();
            for k in 0..n {
                let cv: C64 = (0..n).map(|l| c(k, l, i) * v[l]).sum();
                let cu: C64 = (0..n).map(|l| c(k, l, i) * u[l]).sum();
                for r in 0..n {
                    rhs_v[n + r] -= cv * fd.c[(r, k)];
                    rhs_u[n + r] += cu * fd.a[(r, k)];
                }
            }
            r4v = r4v.max(linalg::max_abs_diff_slice(&lift_v[i], &rhs_v));
            r4u = r4u.max(linalg::max_abs_diff_slice(&lift_u[i], &rhs_u));
        }
        row("V~_i = psi^j_i U~_j - c^k_li v^l d_v^k", r4v);
        row("U~_i = phi^j_i V~_j + c^k_li u^l d_u^k", r4u);

        // (5)
        let u_fn = |q: &[C64]| -> Result<Vec<C64>> { Ok(linalg::mat_vec(&self.left_coframe(&q[..n])?, &q[n..])) };
        let v_fn = |q: &[C64]| -> Result<Vec<C64>> {
            Ok(linalg::mat_vec(&linalg::inverse(&self.right_frame(&q[..n])?)?, &q[n..]))
        };
        let mut r5cross: f64 = 0.0;
        let mut r5u: f64 = 0.0;
        let mut r5v: f64 = 0.0;
        for i in 0..n {
            let uu = calculus::apply_field(&lift_u[i], u_fn, &zw, s)?;
            let uv = calculus::apply_field(&lift_u[i], v_fn, &zw, s)?;
            let vu = calculus::apply_field(&lift_v[i], u_fn, &zw, s)?;
            let vv = calculus::apply_field(&lift_v[i], v_fn, &zw, s)?;
            r5cross = r5cross.max(linalg::max_abs_slice(&uv)).max(linalg::max_abs_slice(&vu));
            for j in 0..n {
                let exp_u: C64 = (0..n).map(|l| c(j, l, i) * u[l]).sum();
                let exp_v: C64 = -(0..n).map(|l| c(j, l, i) * v[l]).sum::<C64>();
                r5u = r5u.max((uu[j] - exp_u).norm());
                r5v = r5v.max((vv[j] - exp_v).norm());
            }
        }
        row("U~_j v^i = V~_j u^i = 0", r5cross);
        row("U~_i u^j = c^j_li u^l", r5u);
        row("V~_i v^j = -c^j_li v^l", r5v);

        // (6)
        let mut r6u: f64 = 0.0;
        let mut r6cross: f64 = 0.0;
        let mut r6v: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let b_uu = calculus::directional_bracket(
                    self.lifted_field(FrameSide::Left, i, *s),
                    self.fiber_field(FrameSide::Left, j),
                    &zw,
                    s,
                )?;
                let b_uv = calculus::directional_bracket(
                    self.lifted_field(FrameSide::Left, i, *s),
                    self.fiber_field(FrameSide::Right, j),
                    &zw,
                    s,
                )?;
                let b_vu = calculus::directional_bracket(
                    self.lifted_field(FrameSide::Right, i, *s),
                    self.fiber_field(FrameSide::Left, j),
                    &zw,
                    s,
                )?;
                let b_vv = calculus::directional_bracket(
                    self.lifted_field(FrameSide::Right, i, *s),
                    self.fiber_field(FrameSide::Right, j),
                    &zw,
                    s,
                )?;
                let mut exp_u = vec![ZERO; 2 * n];
                let mut exp_v = vec![ZERO; 2 * n];
                for k in 0..n {
                    for r in 0..n {
                        exp_u[n + r] += c(k, i, j) * fd.a[(r, k)];
                        exp_v[n + r] -= c(k, i, j) * fd.c[(r, k)];
                    }
                }
                r6u = r6u.max(linalg::max_abs_diff_slice(&b_uu, &exp_u));
                r6v = r6v.max(linalg::max_abs_diff_slice(&b_vv, &exp_v));
                r6cross = r6cross.max(linalg::max_abs_slice(&b_uv)).max(linalg::max_abs_slice(&b_vu));
            }
        }
        row("[U~_i, d_u^j] = c^k_ij d_u^k", r6u);
        row("[U~_i, d_v^j] = [V~_i, d_u^j] = 0", r6cross);
        row("[V~_i, d_v^j] = -c^k_ij d_v^k", r6v);

        Ok(rep)
    }
}

/// Complete lift of a holomorphic field `f^i ∂_{z^i}` to `T^{1,0}M` at `(z, w)`:
/// `f^i ∂_{z^i} + w^i ∂_{z^i} f^j ∂_{w^j}`, components ordered `(∂_z…, ∂_w…)`.
pub fn lift_holomorphic<F>(field: F, z: &[C64], w: &[C64], s: &DiffScheme) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    if z.len() != w.len() {
        return Err(Error::dims(z.len(), w.len()));
    }
    let mut out = field(z)?;
    out.extend(calculus::apply_field(w, &field, z, s)?);
    Ok(out)
}
