//! Reproducible sample points.
//!
//! The generator is SplitMix64. A uniform draw in `[0, 1)` is `(x >> 11) · 2⁻⁵³`; standard normals
//! come from Box–Muller on two uniforms (`√(−2 ln(1 − u₁)) · cos(2π u₂)`, the sine branch is
//! discarded). Base points are uniform in the real `2n`-ball of the given radius around the
//! identity; fiber vectors are uniform on the unit sphere of `ℂⁿ` scaled by a uniform factor in
//! `[0.5, 2]`.

use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::calculus::FiberPoint;
use crate::error::Result;
use crate::lie::GroupModel;
use crate::C64;

/// Radius of the ball of base points around the identity.
pub const BASE_RADIUS: f64 = 0.5;

/// Per-stream seed offset, the 64-bit golden-ratio constant.
pub const STREAM_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

pub struct Sampler {
    rng: SplitMix64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: SplitMix64::seed_from_u64(seed) }
    }

    /// Independent stream number `index` derived from `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        Self::new(seed.wrapping_add(index.wrapping_mul(STREAM_STRIDE)))
    }

    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(1.0 - u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Uniform on the unit sphere of `ℂⁿ`.
    pub fn unit_vector(&mut self, n: usize) -> Vec<C64> {
        loop {
            let v: Vec<C64> = (0..n).map(|_| C64::new(self.normal(), self.normal())).collect();
            let norm = libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());
            if norm > 1e-12 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    /// Uniform in the ball of `radius` around the identity of `model`.
    pub fn base_point(&mut self, model: &GroupModel, radius: f64) -> Vec<C64> {
        let n = model.dim();
        let dir = self.unit_vector(n);
        let r = radius * libm::pow(self.uniform(), 1.0 / (2 * n) as f64);
        model.identity().iter().zip(dir).map(|(e, d)| e + d * r).collect()
    }

    /// Sphere direction scaled by a uniform factor in `[0.5, 2]`.
    pub fn fiber(&mut self, n: usize) -> Vec<C64> {
        let dir = self.unit_vector(n);
        let scale = 0.5 + 1.5 * self.uniform();
        dir.into_iter().map(|d| d * scale).collect()
    }

    pub fn fiber_point(&mut self, model: &GroupModel) -> Result<FiberPoint> {
        let z = self.base_point(model, BASE_RADIUS);
        let w = self.fiber(model.dim());
        FiberPoint::new(z, w)
    }
}
