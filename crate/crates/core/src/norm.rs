//! Complex Minkowski norms `𝒢 = F²` on the Lie algebra `ℂⁿ`.
//!
//! `PNorm { p, weights }` is `𝒢(u) = (Σ c_i |u^i|^{2p})^{1/p}`; `p = 1` is the Hermitian norm
//! `diag(c)`. With `s_i = |u^i|²`, `S = Σ c_i s_i^p` and `y_q = c_q s_q^{p−1} u^q` its derivatives are
//!
//! ```text
//! ∂_{u^a} 𝒢        = S^{1/p−1} · conj(y_a)
//! ∂_{u^a}∂_{ū^q} 𝒢 = (1−p) S^{1/p−2} conj(y_a) y_q + δ_{aq} p c_q s_q^{p−1} S^{1/p−1}
//! ```

use alloc::format;
use alloc::vec::Vec;

use crate::calculus::{self, DiffScheme};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::report::{Expect, SampleCoords, VerificationReport};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum MinkowskiNorm {
    /// `𝒢(u) = Σ H_{pq} u^p ū^q` with `H` Hermitian positive definite.
    Hermitian { h: CMatrix },
    PNorm { p: f64, weights: Vec<f64> },
}

impl MinkowskiNorm {
    /// Hermitizes `h` and rejects it unless positive definite.
    pub fn hermitian(h: CMatrix) -> Result<Self> {
        if h.nrows() != h.ncols() || h.nrows() == 0 {
            return Err(Error::InvalidNorm(format!("matrix must be square and nonempty, got {}x{}", h.nrows(), h.ncols())));
        }
        if !calculus::all_finite(h.as_slice()) {
            return Err(Error::InvalidNorm("matrix has non-finite entries".into()));
        }
        let h = linalg::hermitize(&h);
        if !linalg::is_positive_definite(&h) {
            return Err(Error::NotPseudoConvex(linalg::min_hermitian_eigenvalue(&h)));
        }
        Ok(MinkowskiNorm::Hermitian { h })
    }

    pub fn euclidean(n: usize) -> Self {
        MinkowskiNorm::Hermitian { h: linalg::identity(n) }
    }

    pub fn pnorm(p: f64, weights: Vec<f64>) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidNorm(format!("exponent p must be a finite number >= 1, got {p}")));
        }
        if weights.is_empty() {
            return Err(Error::InvalidNorm("weights must be nonempty".into()));
        }
        if let Some(c) = weights.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidNorm(format!("weights must be positive and finite, got {c}")));
        }
        Ok(MinkowskiNorm::PNorm { p, weights })
    }

    pub fn dim(&self) -> usize {
        match self {
            MinkowskiNorm::Hermitian { h } => h.nrows(),
            MinkowskiNorm::PNorm { weights, .. } => weights.len(),
        }
    }

    fn check(&self, u: &[C64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::dims(self.dim(), u.len()));
        }
        if !calculus::all_finite(u) {
            return Err(Error::InvalidPoint("non-finite vector".into()));
        }
        Ok(())
    }

    /// `(S, s_i)` for the p-norm.
    fn power_sum(p: f64, weights: &[f64], u: &[C64]) -> (f64, Vec<f64>) {
        let s: Vec<f64> = u.iter().map(|x| x.norm_sqr()).collect();
        let total = weights.iter().zip(&s).map(|(c, si)| c * libm::pow(*si, p)).sum();
        (total, s)
    }

    pub fn evaluate(&self, u: &[C64]) -> Result<f64> {
        self.check(u)?;
        Ok(self.value_unchecked(u))
    }

    pub(crate) fn value_unchecked(&self, u: &[C64]) -> f64 {
        match self {
            MinkowskiNorm::Hermitian { h } => {
                let n = u.len();
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        acc += h[(i, j)] * u[i] * u[j].conj();
                    }
                }
                acc.re
            }
            MinkowskiNorm::PNorm { p, weights } => {
                let (total, _) = Self::power_sum(*p, weights, u);
                if total == 0.0 {
                    0.0
                } else {
                    libm::pow(total, 1.0 / p)
                }
            }
        }
    }

    /// `∂_{u^a} 𝒢`. The conjugate gradient is its complex conjugate.
    pub fn gradient(&self, u: &[C64]) -> Result<Vec<C64>> {
        self.check(u)?;
        let n = u.len();
        match self {
            MinkowskiNorm::Hermitian { h } => {
                Ok((0..n).map(|a| (0..n).map(|q| h[(a, q)] * u[q].conj()).sum()).collect())
            }
            MinkowskiNorm::PNorm { p, weights } => {
                let (total, s) = Self::power_sum(*p, weights, u);
                if total == 0.0 {
                    return Err(Error::DegenerateFiber { norm: 0.0, min: f64::MIN_POSITIVE });
                }
                let outer = libm::pow(total, 1.0 / p - 1.0);
                Ok((0..n).map(|a| (u[a] * weights[a] * libm::pow(s[a], p - 1.0)).conj() * outer).collect())
            }
        }
    }

    /// Closed-form `𝒢_{a q̄} = ∂_{u^a}∂_{ū^q} 𝒢`, without the definiteness check.
    pub fn hessian_unchecked(&self, u: &[C64]) -> Result<CMatrix> {
        self.check(u)?;
        let n = u.len();
        match self {
            MinkowskiNorm::Hermitian { h } => Ok(h.clone()),
            MinkowskiNorm::PNorm { p, weights } => {
                let p = *p;
                let (total, s) = Self::power_sum(p, weights, u);
                if total == 0.0 {
                    return Err(Error::DegenerateFiber { norm: 0.0, min: f64::MIN_POSITIVE });
                }
                let y: Vec<C64> = (0..n).map(|q| u[q] * weights[q] * libm::pow(s[q], p - 1.0)).collect();
                let rank_one = (1.0 - p) * libm::pow(total, 1.0 / p - 2.0);
                let diag = p * libm::pow(total, 1.0 / p - 1.0);
                let mut m = CMatrix::from_fn(n, n, |a, q| y[a].conj() * y[q] * rank_one);
                for q in 0..n {
                    m[(q, q)] += diag * weights[q] * libm::pow(s[q], p - 1.0);
                }
                Ok(linalg::hermitize(&m))
            }
        }
    }

    /// `𝒢_{a q̄}`; fails with [`Error::NotPseudoConvex`] unless positive definite.
    pub fn hessian(&self, u: &[C64]) -> Result<CMatrix> {
        let m = self.hessian_unchecked(u)?;
        if !linalg::is_positive_definite(&m) {
            return Err(Error::NotPseudoConvex(linalg::min_hermitian_eigenvalue(&m)));
        }
        Ok(m)
    }

    /// `(𝒢_{a q̄}, 𝒢^{q̄ a})`.
    pub fn hessian_with_inverse(&self, u: &[C64]) -> Result<(CMatrix, CMatrix)> {
        let m = self.hessian(u)?;
        let inv = linalg::inverse(&m)?;
        Ok((m, inv))
    }

    /// Checks `𝒢(λu) = |λ|²𝒢(u)`, `u^a 𝒢_a = 𝒢`, `u^a 𝒢_{a q̄} = 𝒢_{q̄}`, `u^a ∂_{u^a} 𝒢_{j k̄} = 0`
    /// and the closed-form derivatives against Wirtinger differences at every sample.
    pub fn verify_homogeneity_identities(&self, samples: &[Vec<C64>], tol: f64, s: &DiffScheme) -> Result<VerificationReport> {
        let mut rep = VerificationReport::new("minkowski");
        let lambdas = [C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(1.0, 1.0), C64::new(-3.0, 0.0), C64::new(0.0, 2.0)];
        for u in samples {
            let at = SampleCoords { z: Vec::new(), w: Some(u.clone()) };
            let g = self.evaluate(u)?;
            let scale = g.abs().max(1.0);
            let grad = self.gradient(u)?;
            let hess = self.hessian_unchecked(u)?;

            let scaling = lambdas
                .iter()
                .map(|l| {
                    let lu: Vec<C64> = u.iter().map(|x| x * l).collect();
                    self.evaluate(&lu).map(|v| (v - l.norm_sqr() * g).abs() / (l.norm_sqr() * scale))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            rep.record("G(lambda u) = |lambda|^2 G(u)", scaling, tol, Expect::AtMost, at.clone());

            let euler: C64 = grad.iter().zip(u).map(|(ga, ua)| ga * ua).sum();
            rep.record("G_i u^i = G", (euler - g).norm() / scale, tol, Expect::AtMost, at.clone());

            let n = u.len();
            let contraction = (0..n)
                .map(|q| {
                    let lhs: C64 = (0..n).map(|a| u[a] * hess[(a, q)]).sum();
                    (lhs - grad[q].conj()).norm()
                })
                .fold(0.0, f64::max);
            rep.record("u^i G_iq = G_q", contraction / scale, tol, Expect::AtMost, at.clone());

            let hess_vec = |q: &[C64]| -> Result<Vec<C64>> { Ok(self.hessian_unchecked(q)?.iter().copied().collect()) };
            let euler_hess = calculus::apply_field(u, hess_vec, u, s)?;
            rep.record("u^i d_i G_jk = 0", linalg::max_abs_slice(&euler_hess) / scale, tol, Expect::AtMost, at.clone());

            let (num_grad, _) = calculus::wirtinger_grad(|q: &[C64]| Ok(C64::new(self.evaluate(q)?, 0.0)), u, s)?;
            rep.record(
                "closed-form gradient = numerical",
                linalg::max_abs_diff_slice(&grad, &num_grad) / scale,
                tol,
                Expect::AtMost,
                at.clone(),
            );

            let num_hess = calculus::wirtinger_hessian_mixed(|q: &[C64]| self.evaluate(q), u, &DiffScheme::nested())?;
            rep.record("closed-form Hessian = numerical", linalg::max_abs_diff(&hess, &num_hess) / scale, tol, Expect::AtMost, at);
        }
        Ok(rep)
    }

    /// Smallest Hessian eigenvalue over the samples; `ok` iff it exceeds `tol`.
    pub fn verify_pseudo_convex(&self, samples: &[Vec<C64>], tol: f64) -> Result<(bool, f64)> {
        let mut min_ev = f64::INFINITY;
        for u in samples {
            let ev = linalg::min_hermitian_eigenvalue(&self.hessian_unchecked(u)?);
            if ev.is_nan() || ev < min_ev {
                min_ev = ev;
            }
            if min_ev.is_nan() {
                break;
            }
        }
        Ok((tol > 0.0 && min_ev > tol, min_ev))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn euclidean_unit_vector() {
        assert_eq!(MinkowskiNorm::euclidean(2).evaluate(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 1.0);
    }

    #[test]
    fn pnorm_three_halves_on_ones() {
        let nm = MinkowskiNorm::pnorm(1.5, vec![1.0, 1.0]).unwrap();
        let g = nm.evaluate(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((g - libm::pow(2.0, 2.0 / 3.0)).abs() < 1e-15);
        assert!((g - 1.58740).abs() < 1e-5);
    }

    #[test]
    fn pnorm_with_unit_exponent_is_hermitian() {
        let nm = MinkowskiNorm::pnorm(1.0, vec![1.0, 2.0]).unwrap();
        let u = [c(0.3, -1.0), c(0.7, 0.2)];
        let herm = u[0].norm_sqr() + 2.0 * u[1].norm_sqr();
        assert!((nm.evaluate(&u).unwrap() - herm).abs() < 1e-14);
        let h = nm.hessian(&u).unwrap();
        assert!((h[(0, 0)].re - 1.0).abs() < 1e-14 && (h[(1, 1)].re - 2.0).abs() < 1e-14);
        assert!(h[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn hermitian_hessian_is_its_matrix() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let nm = MinkowskiNorm::hermitian(h.clone()).unwrap();
        assert_eq!(nm.hessian(&[c(0.2, 0.1), c(-1.0, 3.0)]).unwrap(), h);
    }

    #[test]
    fn off_diagonal_is_hermitized() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.1), c(0.0, 0.0), c(2.0, 0.0)]);
        let MinkowskiNorm::Hermitian { h } = MinkowskiNorm::hermitian(h).unwrap() else { unreachable!() };
        assert_eq!(h[(0, 1)], c(0.15, 0.05));
        assert_eq!(h[(1, 0)], c(0.15, -0.05));
    }

    #[test]
    fn quartic_hessian_hand_oracle() {
        // (|w1|^4 + |w2|^4)^(1/2) at (1, 0): Hessian diag(1, 0).
        let nm = MinkowskiNorm::pnorm(2.0, vec![1.0, 1.0]).unwrap();
        let h = nm.hessian_unchecked(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((h[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(h[(1, 1)].norm() < 1e-15 && h[(0, 1)].norm() < 1e-15);
        assert!(matches!(nm.hessian(&[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::NotPseudoConvex(_))));
    }

    #[test]
    fn closed_form_matches_numerical_hessian() {
        let nm = MinkowskiNorm::pnorm(1.5, vec![1.0, 1.0]).unwrap();
        let u = [c(1.0, 0.0), c(1.0, 0.0)];
        let num = calculus::wirtinger_hessian_mixed(|q: &[C64]| nm.evaluate(q), &u, &DiffScheme::nested()).unwrap();
        assert!(linalg::max_abs_diff(&num, &nm.hessian(&u).unwrap()) < 1e-6);
    }

    #[test]
    fn scaling_by_two_i_is_exact_for_hermitian() {
        let nm = MinkowskiNorm::euclidean(2);
        let u = [c(0.3, 0.4), c(-1.2, 0.5)];
        let lu: Vec<C64> = u.iter().map(|x| x * c(0.0, 2.0)).collect();
        assert!((nm.evaluate(&lu).unwrap() - 4.0 * nm.evaluate(&u).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(MinkowskiNorm::pnorm(0.5, vec![1.0]).is_err());
        assert!(MinkowskiNorm::pnorm(1.5, vec![1.0, -1.0]).is_err());
        assert!(MinkowskiNorm::pnorm(f64::NAN, vec![1.0]).is_err());
        let indefinite = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(MinkowskiNorm::hermitian(indefinite), Err(Error::NotPseudoConvex(_))));
    }

    #[test]
    fn euclidean_pseudo_convexity_floor_is_one() {
        let (ok, ev) = MinkowskiNorm::euclidean(2).verify_pseudo_convex(&[vec![c(1.0, 0.0), c(0.0, 1.0)]], 1e-8).unwrap();
        assert!(ok);
        assert!((ev - 1.0).abs() < 1e-12);
    }
}
