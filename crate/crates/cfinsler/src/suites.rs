//! The seven verification suites.
//!
//! Each suite draws its own sample stream (`Sampler::stream(seed, suite index)`), evaluates its
//! sample points in parallel and folds the per-point reports together in sample order, so results
//! do not depend on thread scheduling or on which other suites run.

use std::time::Instant;

use cfinsler_core::curvature::{self, KahlerVerdict, TorsionReport};
use cfinsler_core::metric::{self, FinslerFunction};
use cfinsler_core::sampling::Sampler;
use cfinsler_core::{
    calculus, linalg, Expect, FiberPoint, FrameSide, LeftInvariantMetric, PerturbedMetric, SampleCoords, VerificationReport,
    C64,
};
use rayon::prelude::*;

use crate::config::{RunConfig, Suite, PSEUDO_CONVEX_FLOOR};

pub struct SuiteOutcome {
    pub report: VerificationReport,
    pub runtime_ms: u64,
}

/// Runs every configured suite. Errors inside a suite are recorded in its report and never stop
/// the other suites.
pub fn run_suites(cfg: &RunConfig) -> Vec<SuiteOutcome> {
    cfg.suites
        .iter()
        .map(|suite| {
            let start = Instant::now();
            let report = run_suite(cfg, *suite);
            SuiteOutcome { report, runtime_ms: start.elapsed().as_millis() as u64 }
        })
        .collect()
}

pub fn run_suite(cfg: &RunConfig, suite: Suite) -> VerificationReport {
    let ctx = Context::new(cfg, suite);
    let mut rep = VerificationReport::new(suite.as_str());
    match suite {
        Suite::Frames => frames(&ctx, &mut rep),
        Suite::Minkowski => minkowski(&ctx, &mut rep),
        Suite::Connection => connection(&ctx, &mut rep),
        Suite::Berwald => berwald(&ctx, &mut rep),
        Suite::Spray => spray(&ctx, &mut rep),
        Suite::Kahler => kahler(&ctx, &mut rep),
        Suite::Curvature => curvature_suite(&ctx, &mut rep),
    }
    if cfg.perturbation != 0.0 && !matches!(suite, Suite::Frames | Suite::Minkowski) {
        rep.note(format!("metric perturbed by {} Re(z1) G(w); left invariance is deliberately broken", cfg.perturbation));
    }
    rep
}

struct Context<'a> {
    cfg: &'a RunConfig,
    metric: LeftInvariantMetric,
    perturbed: Option<PerturbedMetric>,
    factor: f64,
    suite: Suite,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a RunConfig, suite: Suite) -> Self {
        let metric = cfg.metric();
        let perturbed = (cfg.perturbation != 0.0).then(|| PerturbedMetric { base: metric.clone(), epsilon: cfg.perturbation });
        Context { cfg, metric, perturbed, factor: cfg.tol_factor(suite), suite }
    }

    /// The metric under test; differs from `metric` only for a negative-control run.
    fn subject(&self) -> &(dyn FinslerFunction + Sync) {
        match &self.perturbed {
            Some(p) => p,
            None => &self.metric,
        }
    }

    fn tol(&self, base: f64) -> f64 {
        base * self.factor
    }

    fn sampler(&self) -> Sampler {
        Sampler::stream(self.cfg.seed, self.suite.index())
    }

    fn fiber_points(&self, count: usize) -> Vec<FiberPoint> {
        let mut rng = self.sampler();
        (0..count).map(|_| rng.fiber_point(&self.cfg.model).expect("sampled points are finite")).collect()
    }

    fn abelian(&self) -> bool {
        self.cfg.model.declared_constants().is_abelian()
    }
}

type PointCheck<'a> = dyn Fn(&FiberPoint, &mut VerificationReport) -> cfinsler_core::Result<()> + Sync + 'a;

/// Evaluates `check` at every point in parallel and merges the results in sample order.
fn per_point(rep: &mut VerificationReport, points: &[FiberPoint], check: &PointCheck<'_>) {
    let results: Vec<_> = points
        .par_iter()
        .map(|p| {
            let mut local = VerificationReport::new(&rep.suite);
            check(p, &mut local).map(|_| local)
        })
        .collect();
    for (p, result) in points.iter().zip(results) {
        match result {
            Ok(local) => rep.merge(local),
            Err(e) => rep.record_error(format!("at z = {:?}, w = {:?}: {e}", p.z(), p.w())),
        }
    }
}

fn frames(ctx: &Context<'_>, rep: &mut VerificationReport) {
    let model = &ctx.cfg.model;
    let e = SampleCoords::base(&model.identity());
    let declared = model.declared_constants();
    match (model.derived_constants(FrameSide::Left, &ctx.cfg.scheme), model.derived_constants(FrameSide::Right, &ctx.cfg.scheme)) {
        (Ok(left), Ok(right)) => {
            let minus = cfinsler_core::Tensor3::from_fn(model.dim(), |k, i, j| -declared.get(k, i, j));
            rep.record("[U_i,U_j] at e = declared c", left.max_abs_diff(declared.tensor()), ctx.tol(1e-6), Expect::AtMost, e.clone());
            rep.record("[V_i,V_j] at e = -declared c", right.max_abs_diff(&minus), ctx.tol(1e-6), Expect::AtMost, e);
        }
        (Err(err), _) | (_, Err(err)) => rep.record_error(format!("structure constants: {err}")),
    }

    let points = ctx.fiber_points(ctx.cfg.samples.points);
    per_point(rep, &points, &|p, r| {
        let at = SampleCoords::fiber(p);
        let z = p.z();
        let fd = model.frame_data(z)?;
        r.record("AB = CD = phi psi = I", fd.inverse_residual(), ctx.tol(1e-10), Expect::AtMost, at.clone());
        let analytic = match (model.analytic_left_frame(z), model.analytic_right_frame(z)) {
            (Some(a), Some(c)) => linalg::max_abs_diff(&fd.a, &a).max(linalg::max_abs_diff(&fd.c, &c)),
            _ => 0.0,
        };
        r.record("frames = closed forms", analytic, ctx.tol(1e-10), Expect::AtMost, at.clone());
        let mut holo: f64 = 0.0;
        for side in [FrameSide::Left, FrameSide::Right] {
            let entries = |q: &[C64]| Ok(model.frame(side, q)?.iter().copied().collect());
            holo = holo.max(calculus::check_holomorphic(entries, z, 0.0, &ctx.cfg.scheme)?.1);
        }
        r.record("frame entries holomorphic", holo, ctx.tol(1e-6), Expect::AtMost, at.clone());
        let ad = model.adjoint_inverse_by_pushforward(z, &ctx.cfg.scheme)?;
        r.record("psi = Ad(g^-1) by pushforward", linalg::max_abs_diff(&fd.psi, &ad), ctx.tol(1e-6), Expect::AtMost, at);
        r.merge(model.verify_frame_identities(p, ctx.tol(1e-5), &ctx.cfg.nested)?);
        Ok(())
    });
}

fn minkowski(ctx: &Context<'_>, rep: &mut VerificationReport) {
    let norm = &ctx.cfg.norm;
    let n = ctx.cfg.model.dim();
    let mut rng = ctx.sampler();
    let sphere: Vec<Vec<C64>> = (0..ctx.cfg.samples.norm_samples).map(|_| rng.unit_vector(n)).collect();
    let fibers: Vec<Vec<C64>> = (0..ctx.cfg.samples.norm_samples.min(50)).map(|_| rng.fiber(n)).collect();

    match norm.verify_pseudo_convex(&sphere, PSEUDO_CONVEX_FLOOR) {
        Ok((_, min_ev)) => {
            rep.record("min Hessian eigenvalue on unit sphere", min_ev, PSEUDO_CONVEX_FLOOR, Expect::AtLeast, SampleCoords::none())
        }
        Err(e) => rep.record_error(format!("pseudo-convexity scan: {e}")),
    }
    match norm.verify_homogeneity_identities(&fibers, ctx.tol(1e-5), &ctx.cfg.nested) {
        Ok(r) => rep.merge(r),
        Err(e) => rep.record_error(format!("homogeneity identities: {e}")),
    }
    for u in &fibers {
        let at = SampleCoords { z: Vec::new(), w: Some(u.clone()) };
        match norm.hessian_with_inverse(u) {
            Ok((h, inv)) => {
                rep.record("Hessian is Hermitian", linalg::max_abs_diff(&h, &h.adjoint()), ctx.tol(1e-12), Expect::AtMost, at.clone());
                let id = linalg::identity(n);
                rep.record("Hessian times inverse = I", linalg::max_abs_diff(&(&h * &inv), &id), ctx.tol(1e-10), Expect::AtMost, at);
            }
            Err(e) => rep.record_error(format!("Hessian at u = {u:?}: {e}")),
        }
    }
}

fn connection(ctx: &Context<'_>, rep: &mut VerificationReport) {
    let points = ctx.fiber_points(ctx.cfg.samples.points);
    let subject = ctx.subject();
    per_point(rep, &points, &|p, r| {
        let at = SampleCoords::fiber(p);
        let direct = metric::jet_direct(subject, p, &ctx.cfg.nested)?;
        let frame = metric::jet_frame(&ctx.metric, p, &ctx.cfg.scheme)?;
        r.record("N direct = N frame", linalg::max_abs_diff(&direct.n, &frame.n), ctx.tol(1e-5), Expect::AtMost, at.clone());
        r.record("Gamma direct = Gamma frame", direct.gamma.max_abs_diff(&frame.gamma), ctx.tol(1e-4), Expect::AtMost, at.clone());
        let euler: C64 = direct.g_i.iter().zip(p.w()).map(|(a, b)| a * b).sum();
        r.record("G_i w^i = G", (euler - direct.g).norm(), ctx.tol(1e-5), Expect::AtMost, at.clone());
        let conj = direct.conj_gamma_residual.unwrap_or(f64::NAN);
        r.record("d N / d conj(w) = 0", conj, ctx.tol(1e-4), Expect::AtMost, at.clone());
        if let Some(v) = &direct.vertical {
            let n = p.dim();
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for k in 0..n {
                    let s: C64 = (0..n).map(|j| v[(i, j, k)] * p.w()[j]).sum();
                    worst = worst.max(s.norm());
                }
            }
            r.record("C^i_jk w^j = 0", worst, ctx.tol(1e-4), Expect::AtMost, at.clone());
        }
        let lift = metric::right_lift_residual(subject, p, &ctx.cfg.scheme)?;
        r.record("V~_i G = 0", lift, ctx.tol(1e-5), Expect::AtMost, at.clone());
        let (transport, invariance) = metric::algebra_hessian_residuals(&ctx.metric, p, &ctx.cfg.scheme)?;
        r.record("G_ij = B^p_i conj(B^q_j) G_pq", transport, ctx.tol(1e-5), Expect::AtMost, at.clone());
        r.record("V~_i G_jk(u) = 0", invariance, ctx.tol(1e-4), Expect::AtMost, at);
        Ok(())
    });
}

fn berwald(ctx: &Context<'_>, rep: &mut VerificationReport) {
    let mut rng = ctx.sampler();
    let n = ctx.cfg.model.dim();
    let cells: Vec<(Vec<C64>, Vec<Vec<C64>>)> = (0..ctx.cfg.samples.base_points)
        .map(|_| {
            let z = rng.base_point(&ctx.cfg.model, cfinsler_core::sampling::BASE_RADIUS);
            let ws = (0..ctx.cfg.samples.fibers).map(|_| rng.fiber(n)).collect();
            (z, ws)
        })
        .collect();
    let jobs: Vec<(usize, FiberPoint)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, (z, ws))| ws.iter().map(move |w| (i, FiberPoint::new(z.clone(), w.clone()).expect("finite sample"))))
        .collect();
    let subject = ctx.subject();
    let gammas: Vec<_> = jobs.par_iter().map(|(_, p)| metric::jet_direct(subject, p, &ctx.cfg.nested).map(|j| j.gamma)).collect();
    for (i, (z, _)) in cells.iter().enumerate() {
        let mut ok = Vec::new();
        for ((cell, p), g) in jobs.iter().zip(&gammas) {
            if *cell != i {
                continue;
            }
            match g {
                Ok(g) => ok.push(g.clone()),
                Err(e) => rep.record_error(format!("at z = {:?}, w = {:?}: {e}", p.z(), p.w())),
            }
        }
        rep.record(
            "Gamma spread over fibers",
            metric::gamma_spread(&ok),
            ctx.tol(1e-4),
            Expect::AtMost,
            SampleCoords::base(z),
        );
    }
}

fn spray(ctx: &Context<'_>, rep: &mut VerificationReport) {
    let points = ctx.fiber_points(ctx.cfg.samples.points);
    let model = &ctx.cfg.model;
    let subject = ctx.subject();
    per_point(rep, &points, &|p, r| {
        let at = SampleCoords::fiber(p);
        let chi = metric::spray(subject, p, &ctx.cfg.nested)?;
        let right = curvature::spray_via_lift(model, FrameSide::Right, p, &ctx.cfg.scheme)?;
        let left = curvature::spray_via_lift(model, FrameSide::Left, p, &ctx.cfg.scheme)?;
        r.record("chi = v^a V~_a", chi.max_abs_diff(&right), ctx.tol(1e-5), Expect::AtMost, at.clone());
        r.record("u^a U~_a = v^a V~_a", left.max_abs_diff(&right), ctx.tol(1e-5), Expect::AtMost, at.clone());
        let doubled = metric::spray(subject, &p.scaled(C64::new(2.0, 0.0)), &ctx.cfg.nested)?;
        let expect: Vec<C64> = chi.fiber_part.iter().map(|x| x * 4.0).collect();
        let scale = linalg::max_abs_slice(&expect).max(1.0);
        r.record(
            "chi(z, 2w) = 4 chi(z, w)",
            linalg::max_abs_diff_slice(&doubled.fiber_part, &expect) / scale,
            ctx.tol(1e-5),
            Expect::AtMost,
            at,
        );
        Ok(())
    });
}

fn kahler(ctx: &Context<'_>, rep: &mut VerificationReport) {
    let points = ctx.fiber_points(ctx.cfg.samples.kahler_points);
    let subject = ctx.subject();
    let results: Vec<_> = points.par_iter().map(|p| curvature::torsions(subject, p, &ctx.cfg.nested)).collect();
    let abelian = ctx.abelian();
    let tol = ctx.tol(1e-4);
    let expect = if abelian { Expect::AtMost } else { Expect::Witness };
    let mut reports: Vec<TorsionReport> = Vec::new();
    for (p, result) in points.iter().zip(results) {
        match result {
            Ok(t) => {
                let at = SampleCoords::fiber(p);
                let [strong, contracted, weak] = t.residuals();
                rep.record("strong torsion = C D D c", t.prediction_residual(), tol, Expect::AtMost, at.clone());
                rep.record("strong torsion", strong, tol, expect, at.clone());
                rep.record("w-contracted torsion", contracted, tol, expect, at.clone());
                rep.record("weak torsion", weak, tol, expect, at);
                reports.push(t);
            }
            Err(e) => rep.record_error(format!("at z = {:?}, w = {:?}: {e}", p.z(), p.w())),
        }
    }
    match KahlerVerdict::from_reports(&reports, tol, abelian) {
        Ok(v) => {
            let flag = |b: bool| if b { 0.0 } else { 1.0 };
            rep.record("Kahler flags agree", flag(v.equivalent), 0.0, Expect::AtMost, SampleCoords::none());
            rep.record("Kahler flags = abelian", flag(v.matches_abelian), 0.0, Expect::AtMost, SampleCoords::none());
            let verdict = if v.strongly { "Kahler" } else { "not Kahler" };
            let why = if abelian { "abelian" } else { "nonabelian" };
            rep.note(format!(
                "strongly/plain/weakly Kahler = {}/{}/{}: {verdict} (as predicted: {why})",
                v.strongly, v.kahler, v.weakly
            ));
        }
        Err(e) => rep.record_error(format!("verdict: {e}")),
    }
}

fn curvature_suite(ctx: &Context<'_>, rep: &mut VerificationReport) {
    let points = ctx.fiber_points(ctx.cfg.samples.curvature_points);
    let subject = ctx.subject();
    let abelian = ctx.abelian() && ctx.perturbed.is_none();
    per_point(rep, &points, &|p, r| {
        let at = SampleCoords::fiber(p);
        let s = curvature::curvature(subject, p, &ctx.cfg.curvature)?;
        r.record("|K|", s.k.abs(), ctx.tol(1e-4), Expect::AtMost, at.clone());
        if abelian {
            r.record("|K| abelian floor", s.k.abs(), ctx.tol(1e-10), Expect::AtMost, at.clone());
        }
        let im = s.r_contracted.im.abs() / (1.0 + s.r_contracted.norm());
        r.record("|Im R| / (1 + |R|)", im, ctx.tol(1e-4), Expect::AtMost, at.clone());
        let mut drift: f64 = 0.0;
        for l in [C64::new(2.0, 0.0), C64::new(0.0, 1.0)] {
            drift = drift.max((curvature::curvature(subject, &p.scaled(l), &ctx.cfg.curvature)?.k - s.k).abs());
        }
        r.record("K(z, lambda w) = K(z, w)", drift, ctx.tol(1e-4), Expect::AtMost, at);
        Ok(())
    });
}
