//! The registered verification checks and the suite runner.
//!
//! Each check draws all of its randomness from a dedicated stream, so a
//! report depends only on (suite, n, seed, build). A failing check is rerun
//! once on a derived stream and fails only if both attempts fail; both
//! attempts are recorded. The `n` argument budgets the checks that do not
//! pin their own replicate count (the numbered acceptance criteria do).

use crate::azema;
use crate::error::{Error, Result};
use crate::excursion::{self, ExcursionFeatures};
use crate::laws::{self, FeatureKind, LawParams};
use crate::minorant::{self, reference};
use crate::paths::{simulate_brownian_two_sided, GridPath, Path, ProcessSpec};
use crate::report::{Attempt, CheckRecord, Report, SCHEMA_VERSION};
use crate::rng::RngStream;
use crate::sampler::{self, DirectSampler, FeaturePool};
use crate::special;
use crate::stats::{self, correlation, ks_one_sample, ks_two_sample, moment_check};
use rand::Rng;
use rayon::prelude::*;

const P_THRESHOLD: f64 = 1e-3;
const K_SIGMA: f64 = 3.0;
const RERUN_TAG: u64 = 0x52455255;

/// Outcome of one check attempt.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub statistic: f64,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub p_value: Option<f64>,
    pub pass: bool,
    pub n: u64,
}

impl CheckOutcome {
    fn from_ks(d: f64, p: f64, n: u64) -> Self {
        CheckOutcome {
            statistic: d,
            target: None,
            tolerance: None,
            p_value: Some(p),
            pass: p > P_THRESHOLD,
            n,
        }
    }

    fn from_bound(statistic: f64, bound: f64, n: u64) -> Self {
        CheckOutcome {
            statistic,
            target: None,
            tolerance: Some(bound),
            p_value: None,
            pass: statistic <= bound,
            n,
        }
    }

    /// Max |z|-score across a set of moment checks, pass at K_SIGMA.
    fn from_zscores(zs: &[f64], n: u64) -> Self {
        let worst = zs.iter().cloned().fold(0.0f64, f64::max);
        CheckOutcome {
            statistic: worst,
            target: None,
            tolerance: Some(K_SIGMA),
            p_value: None,
            pass: worst <= K_SIGMA,
            n,
        }
    }
}

fn zscore(mc: &stats::MomentCheck) -> f64 {
    let slack = 1e-12 * (1.0 + mc.target.abs());
    (mc.mean - mc.target).abs().max(slack) / (mc.se + slack / K_SIGMA)
}

pub struct CheckCtx {
    pub stream: RngStream,
    pub n: u64,
}

type CheckFn = fn(&CheckCtx) -> Result<CheckOutcome>;

pub struct Check {
    pub name: &'static str,
    pub f: CheckFn,
}

// ---------------------------------------------------------------------------
// shared pathwise machinery
// ---------------------------------------------------------------------------

/// Everything the statistical checks read off one simulated two-sided path.
struct PathStudy {
    d: f64,
    g: Option<f64>,
    straddle_d: Option<f64>,
    features: Vec<ExcursionFeatures>,
    pre_inf: f64,
    post_increment: Option<f64>,
}

/// Simulate, take the minorant, slice. Contact detection uses tolerance 0:
/// on a grid the discrete minorant touches the walk exactly at its own
/// contact indices, and a positive tolerance would flag noise clusters
/// around each true contact, polluting the excursion-length law with
/// spurious one-step excursions.
fn study_brownian_path(
    params: LawParams,
    tmin: f64,
    tmax: f64,
    dt: f64,
    stream: RngStream,
) -> Result<PathStudy> {
    let (alpha, beta) = (params.alpha(), params.beta());
    let spec = ProcessSpec::BrownianWithDrift { beta, sigma: 1.0 };
    let mean_zeta = laws::mean_features(params).zeta;
    let buffer = 5.0 * mean_zeta;
    let margin = 10.0 * mean_zeta;
    for attempt in 0..5u64 {
        let scale = (1u64 << attempt) as f64;
        let path =
            simulate_brownian_two_sided(&spec, tmin * scale, tmax, dt, stream.substream(attempt))?;
        let m = minorant::compute_minorant(&Path::Grid(path.clone()), alpha)?;
        let contacts =
            match minorant::extract_contact_set(&Path::Grid(path.clone()), &m, 0.0, buffer) {
                Ok(c) => c,
                Err(Error::WindowTooSmall(_)) => continue,
                Err(e) => return Err(e),
            };
        let (_, d) = match minorant::recipe_times(&path, alpha, margin) {
            Ok(sd) => sd,
            Err(Error::TruncationUnsafe(_)) | Err(Error::WindowTooSmall(_)) => continue,
            Err(e) => return Err(e),
        };
        let (excs, _) = excursion::extract_generic_excursions(&path, &contacts, buffer)?;
        let features = excs
            .iter()
            .map(|e| excursion::excursion_features(e, alpha))
            .collect::<Result<Vec<_>>>()?;

        let mut pre_inf = f64::INFINITY;
        for k in 0..path.len() {
            let t = path.time(k);
            if t > 1e-12 {
                break;
            }
            pre_inf = pre_inf.min(path.values[k] - alpha * t);
        }
        let post_increment = if d + 1.0 <= path.tmax() {
            let kd = path.index_nearest(d)?;
            let k1 = path.index_nearest(d + 1.0)?;
            Some(path.values[k1] - path.values[kd])
        } else {
            None
        };
        return Ok(PathStudy {
            d,
            g: contacts.g,
            straddle_d: contacts.d,
            features,
            pre_inf,
            post_increment,
        });
    }
    Err(Error::TruncationUnsafe(
        "path study kept hitting the window edge after widenings".into(),
    ))
}

/// Generic-excursion lifetimes gathered from as many paths as needed.
fn pathwise_zetas(
    params: LawParams,
    tmin: f64,
    tmax: f64,
    dt: f64,
    n_target: usize,
    stream: RngStream,
) -> Result<Vec<f64>> {
    let mean_zeta = laws::mean_features(params).zeta;
    let usable = (tmax - 10.0 * mean_zeta).max(1.0);
    let per_path = (usable / mean_zeta * 0.8).max(1.0) as usize;
    let n_paths = n_target / per_path + 1;
    let studies: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            study_brownian_path(params, tmin, tmax, dt, stream.replicate(i as u64))
                .map(|s| s.features.iter().map(|f| f.zeta).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut zetas: Vec<f64> = studies.into_iter().flatten().collect();
    zetas.truncate(n_target.max(100));
    Ok(zetas)
}

fn random_grid<R: Rng>(rng: &mut R, max_n: usize) -> (Vec<f64>, f64) {
    let n = 2 + rng.gen_range(0..max_n - 1);
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (values, 0.01)
}

// ---------------------------------------------------------------------------
// minorant suite
// ---------------------------------------------------------------------------

fn c01_minorant_brute_force(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let alphas = [0.5, 1.0, 2.0];
    let mismatches: usize = (0..1000u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ctx.stream.replicate(rep).rng();
            let (values, dt) = random_grid(&mut rng, 512);
            let alpha = alphas[(rep % 3) as usize];
            let p = Path::Grid(GridPath::new(0.0, dt, values.clone()).unwrap());
            let m = minorant::compute_minorant(&p, alpha).unwrap();
            let brute = reference::brute_force_minorant(&values, alpha, dt);
            usize::from(m.values != brute)
        })
        .sum();
    Ok(CheckOutcome::from_bound(mismatches as f64, 0.0, 1000))
}

fn minorant_lipschitz_dominance(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for rep in 0..200u64 {
        let mut rng = ctx.stream.replicate(rep).rng();
        let (values, dt) = random_grid(&mut rng, 256);
        let alpha = 1.0;
        let p = Path::Grid(GridPath::new(0.0, dt, values.clone()).unwrap());
        let m = minorant::compute_minorant(&p, alpha)?;
        for k in 0..values.len() {
            worst = worst.max(m.values[k] - values[k]); // dominance
            if k > 0 {
                worst = worst.max((m.values[k] - m.values[k - 1]).abs() - alpha * dt);
            }
        }
    }
    Ok(CheckOutcome::from_bound(worst.max(0.0), 1e-12, 200))
}

fn minorant_space_time_homogeneity(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for rep in 0..200u64 {
        let mut rng = ctx.stream.replicate(rep).rng();
        let (values, dt) = random_grid(&mut rng, 256);
        let x: f64 = rng.gen_range(-2.0..2.0);
        let shift: f64 = rng.gen_range(-5.0..5.0);
        let p1 = Path::Grid(GridPath::new(0.0, dt, values.clone()).unwrap());
        let m1 = minorant::compute_minorant(&p1, 1.0)?;
        let shifted: Vec<f64> = values.iter().map(|v| v + x).collect();
        let p2 = Path::Grid(GridPath::new(shift, dt, shifted).unwrap());
        let m2 = minorant::compute_minorant(&p2, 1.0)?;
        for k in 0..values.len() {
            worst = worst.max((m2.values[k] - (m1.values[k] + x)).abs());
        }
    }
    Ok(CheckOutcome::from_bound(worst, 1e-12, 200))
}

fn minorant_sawtooth_reconstruction(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let alpha = 1.0;
    let dt = 1e-3;
    let worst = (0..20u64)
        .into_par_iter()
        .map(|rep| {
            let spec = ProcessSpec::brownian(0.0);
            let path = simulate_brownian_two_sided(&spec, -10.0, 40.0, dt, ctx.stream.replicate(rep))
                .unwrap();
            let p = Path::Grid(path.clone());
            let m = minorant::compute_minorant(&p, alpha).unwrap();
            let cs = minorant::extract_contact_set(&p, &m, 0.0, 0.0).unwrap();
            let mut w: f64 = 0.0;
            for pair in cs.indices.windows(2) {
                let (k0, k1) = (pair[0], pair[1]);
                let saw = minorant::sawtooth_segment(
                    path.time(k0),
                    path.values[k0],
                    path.time(k1),
                    path.values[k1],
                    alpha,
                )
                .unwrap();
                for k in k0..=k1 {
                    w = w.max((m.values[k] - saw.eval(path.time(k))).abs());
                }
            }
            w
        })
        .reduce(|| 0.0, f64::max);
    Ok(CheckOutcome::from_bound(worst, alpha * dt * (1.0 + 1e-9), 20))
}

fn minorant_recipe_vs_contact(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let alpha = 1.0;
    let dt = 1e-3;
    let worst_steps = (0..200u64)
        .into_par_iter()
        .map(|rep| {
            let spec = ProcessSpec::brownian(0.0);
            let path =
                simulate_brownian_two_sided(&spec, -15.0, 15.0, dt, ctx.stream.replicate(rep))
                    .unwrap();
            let p = Path::Grid(path.clone());
            let m = minorant::compute_minorant(&p, alpha).unwrap();
            let cs = minorant::extract_contact_set(&p, &m, 0.0, 0.0).unwrap();
            let first_contact = cs.times.iter().find(|&&t| t > 1e-12);
            match (minorant::recipe_times(&path, alpha, 2.0), first_contact) {
                (Ok((_, d)), Some(&tc)) => (d - tc).abs() / dt,
                _ => 0.0, // window retries are exercised elsewhere
            }
        })
        .reduce(|| 0.0, f64::max);
    Ok(CheckOutcome::from_bound(worst_steps, 1.0 + 1e-9, 200))
}

fn minorant_contact_nonempty(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let misses: usize = (0..500u64)
        .into_par_iter()
        .map(|rep| {
            let spec = ProcessSpec::brownian(0.0);
            let path =
                simulate_brownian_two_sided(&spec, -10.0, 10.0, 2e-3, ctx.stream.replicate(rep))
                    .unwrap();
            let p = Path::Grid(path);
            let m = minorant::compute_minorant(&p, 1.0).unwrap();
            usize::from(minorant::extract_contact_set(&p, &m, 0.0, 0.0).is_err())
        })
        .sum();
    Ok(CheckOutcome::from_bound(misses as f64, 0.0, 500))
}

// ---------------------------------------------------------------------------
// laws suite (deterministic identities, criterion 14)
// ---------------------------------------------------------------------------

fn c14_psi_time_reversal(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut rng = ctx.stream.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = rng.gen_range(0.5..2.5);
        let b = rng.gen_range(-0.9..0.9) * a;
        let p = LawParams::new(a, b)?;
        let pr = LawParams::new(a, -b)?;
        // keep both radicands positive: 2α|ρ4| must stay below the
        // smaller of (α±β)²
        let rho4_cap = 0.45 * (a + b).powi(2).min((a - b).powi(2)) / a;
        let rho = [
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(-1.0..1.0) * rho4_cap,
        ];
        let lhs = laws::psi_joint_laplace(p, rho)?;
        let rhs = laws::psi_joint_laplace(pr, [rho[0], rho[2], rho[1], -rho[3]])?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(CheckOutcome::from_bound(worst, 1e-12, 100))
}

fn c14_psi_scaling(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut rng = ctx.stream.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = rng.gen_range(0.5..2.0);
        let b = rng.gen_range(-0.9..0.9) * a;
        let c = rng.gen_range(0.3..3.0);
        let p = LawParams::new(a, b)?;
        let pc = LawParams::new(c * a, c * b)?;
        // keep both radicands positive: 2α|ρ4| must stay below the
        // smaller of (α±β)²
        let rho4_cap = 0.45 * (a + b).powi(2).min((a - b).powi(2)) / a;
        let rho = [
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(-1.0..1.0) * rho4_cap,
        ];
        let lhs = laws::psi_joint_laplace(p, rho)?;
        // the spatial variable W_ζ scales by c, the time variables by c²
        let rhs =
            laws::psi_joint_laplace(pc, [c * c * rho[0], c * c * rho[1], c * c * rho[2], c * rho[3]])?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(CheckOutcome::from_bound(worst, 1e-12, 100))
}

fn c14_integral_identity(_ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for (a, b) in [(1.0, 4.0), (0.25, 1.0), (2.0, 2.0), (0.5, 7.0)] {
        worst = worst.max(laws::check_integral_identity(a, b)?);
    }
    Ok(CheckOutcome::from_bound(worst, 1e-6, 4))
}

fn c14_density_normalizations(_ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let cases = [
        (FeatureKind::Zeta, LawParams::new(1.0, 0.0)?),
        (FeatureKind::Zeta, LawParams::new(2.0, 0.0)?),
        (FeatureKind::LPeak, LawParams::new(1.0, 0.0)?),
        (FeatureKind::LPeak, LawParams::new(2.0, 1.0)?),
        (FeatureKind::ZetaMinusL, LawParams::new(2.0, 1.0)?),
        (FeatureKind::ZetaMinusL, LawParams::new(1.0, -0.5)?),
    ];
    for (kind, p) in cases {
        worst = worst.max((laws::density_normalization(kind, p)? - 1.0).abs());
    }
    // frak T and the joint density, plus the first-passage law
    for p in [LawParams::new(1.0, 0.0)?, LawParams::new(1.0, 0.5)?] {
        let total = crate::quad::integrate_density(
            move |t| laws::density_frak_t(p, t).unwrap_or(0.0),
            0.5 * (p.alpha() - p.beta()) * (p.alpha() - p.beta()),
            1e-9,
        )?;
        worst = worst.max((total - 1.0).abs());
    }
    let law = laws::hitting_time_law(0.7, 1.3)?;
    let total = crate::quad::integrate_density(move |t| law.density(t), 0.2, 1e-9)?;
    worst = worst.max((total - 1.0).abs());
    Ok(CheckOutcome::from_bound(worst, 1e-6, 9))
}

fn c14_feature_laplace_specialization(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut rng = ctx.stream.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = rng.gen_range(0.5..2.0);
        let b = rng.gen_range(-0.9..0.9) * a;
        let p = LawParams::new(a, b)?;
        let lam = rng.gen_range(0.0..3.0);
        for (kind, rho) in [
            (FeatureKind::Zeta, [lam, 0.0, 0.0, 0.0]),
            (FeatureKind::LPeak, [0.0, lam, 0.0, 0.0]),
            (FeatureKind::ZetaMinusL, [0.0, 0.0, lam, 0.0]),
        ] {
            let lhs = laws::feature_laplace(kind, p, lam)?;
            let rhs = laws::psi_joint_laplace(p, rho)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(CheckOutcome::from_bound(worst, 0.0, 50))
}

fn laws_means_numeric_diff(_ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for p in [LawParams::new(1.2, 0.5)?, LawParams::new(1.0, 0.0)?, LawParams::new(0.7, -0.3)?] {
        let m = laws::mean_features(p);
        let want = [m.zeta, m.l_peak, m.zeta_minus_l, m.w_zeta];
        let h = 1e-5;
        for i in 0..4 {
            let mut up = [0.0; 4];
            let mut dn = [0.0; 4];
            up[i] = h;
            dn[i] = -h;
            let d = -(laws::psi_joint_laplace(p, up)? - laws::psi_joint_laplace(p, dn)?)
                / (2.0 * h);
            worst = worst.max((d - want[i]).abs());
        }
    }
    Ok(CheckOutcome::from_bound(worst, 1e-6, 12))
}

fn laws_laplace_density_consistency(_ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for (kind, p) in [
        (FeatureKind::Zeta, LawParams::new(1.0, 0.0)?),
        (FeatureKind::LPeak, LawParams::new(1.0, 0.0)?),
        (FeatureKind::LPeak, LawParams::new(2.0, 1.0)?),
        (FeatureKind::ZetaMinusL, LawParams::new(2.0, 1.0)?),
    ] {
        let decay = 0.25 * (p.alpha() - p.beta().abs()).powi(2);
        for lam in [0.1, 1.0, 10.0] {
            let q = laws::laplace_by_quadrature(
                move |l| laws::feature_density(kind, p, l).unwrap_or(0.0),
                lam,
                decay,
            )?;
            worst = worst.max((q - laws::feature_laplace(kind, p, lam)?).abs());
        }
    }
    Ok(CheckOutcome::from_bound(worst, 1e-5, 12))
}

fn laws_frak_t_inversion(_ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for p in [LawParams::new(1.0, 0.0)?, LawParams::new(1.0, 0.4)?] {
        let closed = laws::inverse_frak_t_laplace_closed(p, 1.0)?;
        let quad = laws::inverse_frak_t_laplace_quadrature(p, 1.0)?;
        worst = worst.max((closed - quad).abs());
    }
    Ok(CheckOutcome::from_bound(worst, 1e-5, 2))
}

fn laws_joint_factorization(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let mut rng = ctx.stream.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = rng.gen_range(0.5..2.0);
        let b = rng.gen_range(-0.9..0.9) * a;
        let p = LawParams::new(a, b)?;
        let t = rng.gen_range(0.05..3.0);
        let x = rng.gen_range(0.0..2.0 * a * t);
        let lhs = laws::joint_density_tau_gamma(p, t, x)?;
        let rhs = laws::density_frak_t(p, t)? * laws::conditional_density_gamma(p, x, t)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(CheckOutcome::from_bound(worst, 1e-10, 200))
}

fn laws_zeta_laplace_two_routes(_ctx: &CheckCtx) -> Result<CheckOutcome> {
    let p = LawParams::new(1.0, 0.0)?;
    let mut worst: f64 = 0.0;
    for lam in [0.1, 0.5] {
        let via_joint = laws::zeta_laplace_from_tau_gamma(p, lam)?;
        let closed = laws::feature_laplace(FeatureKind::Zeta, p, lam)?;
        worst = worst.max((via_joint - closed).abs());
    }
    Ok(CheckOutcome::from_bound(worst, 1e-5, 2))
}

// ---------------------------------------------------------------------------
// samplers suite
// ---------------------------------------------------------------------------

fn direct_features(params: LawParams, n: usize, stream: RngStream) -> Result<Vec<ExcursionFeatures>> {
    let sampler = DirectSampler::new(params)?;
    let chunk = 10_000usize;
    let chunks = n.div_ceil(chunk);
    let nested: Vec<Vec<ExcursionFeatures>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.replicate(c as u64).rng();
            let m = chunk.min(n - c * chunk);
            (0..m).map(|_| sampler.sample_features(&mut rng)).collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

fn mean_zeta_check(params: LawParams, ctx: &CheckCtx) -> Result<CheckOutcome> {
    let n = 100_000;
    let fs = direct_features(params, n, ctx.stream)?;
    let zetas: Vec<f64> = fs.iter().map(|f| f.zeta).collect();
    let mc = moment_check(&zetas, laws::mean_features(params).zeta, K_SIGMA);
    Ok(CheckOutcome::from_zscores(&[zscore(&mc)], n as u64))
}

fn c02_mean_zeta_a1b0(ctx: &CheckCtx) -> Result<CheckOutcome> {
    mean_zeta_check(LawParams::new(1.0, 0.0)?, ctx)
}

fn c02_mean_zeta_a2b1(ctx: &CheckCtx) -> Result<CheckOutcome> {
    mean_zeta_check(LawParams::new(2.0, 1.0)?, ctx)
}

fn feature_means_check(params: LawParams, ctx: &CheckCtx) -> Result<CheckOutcome> {
    let n = 100_000;
    let fs = direct_features(params, n, ctx.stream)?;
    let means = laws::mean_features(params);
    let l: Vec<f64> = fs.iter().map(|f| f.l_peak).collect();
    let zl: Vec<f64> = fs.iter().map(|f| f.zeta_minus_l).collect();
    let w: Vec<f64> = fs.iter().map(|f| f.w_zeta).collect();
    let zs = [
        zscore(&moment_check(&l, means.l_peak, K_SIGMA)),
        zscore(&moment_check(&zl, means.zeta_minus_l, K_SIGMA)),
        zscore(&moment_check(&w, means.w_zeta, K_SIGMA)),
    ];
    Ok(CheckOutcome::from_zscores(&zs, n as u64))
}

fn c03_feature_means_a1b0(ctx: &CheckCtx) -> Result<CheckOutcome> {
    feature_means_check(LawParams::new(1.0, 0.0)?, ctx)
}

fn c03_feature_means_a2b1(ctx: &CheckCtx) -> Result<CheckOutcome> {
    feature_means_check(LawParams::new(2.0, 1.0)?, ctx)
}

fn c04_zeta_ks(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let n = 10_000;
    let fs = direct_features(params, n, ctx.stream)?;
    let zetas: Vec<f64> = fs.iter().map(|f| f.zeta).collect();
    let table = laws::feature_cdf_table(FeatureKind::Zeta, params, 4096)?;
    let (d, p) = ks_one_sample(&zetas, |t| table.cdf_normalized(t))?;
    Ok(CheckOutcome::from_ks(d, p, n as u64))
}

fn laplace_spot_check(lambda: f64, ctx: &CheckCtx) -> Result<CheckOutcome> {
    // Both parameter sets of criteria 2–3. The W_ζ estimator e^{−λW} has
    // finite variance only for λ < (α+β)²/(4α); at (1, 0) the λ = 0.5 cell
    // sits exactly on the Laplace-domain boundary (E e^{−2λW} = ∞), where a
    // 3-SE band is meaningless, so that single cell is checked on the
    // (2, 1) run instead, whose domain is comfortably larger.
    let n = 100_000;
    let mut zs = Vec::new();
    for (j, params) in [LawParams::new(1.0, 0.0)?, LawParams::new(2.0, 1.0)?]
        .into_iter()
        .enumerate()
    {
        let fs = direct_features(params, n, ctx.stream.substream(j as u64))?;
        for (kind, get) in [
            (FeatureKind::Zeta, (|f: &ExcursionFeatures| f.zeta) as fn(&ExcursionFeatures) -> f64),
            (FeatureKind::LPeak, |f| f.l_peak),
            (FeatureKind::ZetaMinusL, |f| f.zeta_minus_l),
            (FeatureKind::WZeta, |f| f.w_zeta),
        ] {
            if matches!(kind, FeatureKind::WZeta) {
                let var_boundary = (params.alpha() + params.beta()).powi(2) / (4.0 * params.alpha());
                if lambda >= var_boundary {
                    continue;
                }
            }
            let target = laws::feature_laplace(kind, params, lambda)?;
            let samples: Vec<f64> = fs.iter().map(|f| (-lambda * get(f)).exp()).collect();
            zs.push(zscore(&moment_check(&samples, target, K_SIGMA)));
        }
    }
    Ok(CheckOutcome::from_zscores(&zs, n as u64))
}

fn c05_laplace_spot_lam01(ctx: &CheckCtx) -> Result<CheckOutcome> {
    laplace_spot_check(0.1, ctx)
}

fn c05_laplace_spot_lam05(ctx: &CheckCtx) -> Result<CheckOutcome> {
    laplace_spot_check(0.5, ctx)
}

fn c06_pathwise_direct_zeta_ks(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let n = 20_000;
    let pathwise = pathwise_zetas(params, -20.0, 200.0, 1e-4, n, ctx.stream.substream(1))?;
    let fs = direct_features(params, n, ctx.stream.substream(2))?;
    let direct: Vec<f64> = fs.iter().map(|f| f.zeta).collect();
    let (d, p) = ks_two_sample(&pathwise, &direct)?;
    Ok(CheckOutcome::from_ks(d, p, n as u64))
}

fn williams_check(mu: f64, ctx: &CheckCtx) -> Result<CheckOutcome> {
    let n = 10_000usize;
    let dt = 1e-4;
    let h1: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = sampler::sample_williams_path(mu, 1.0, dt, ctx.stream.replicate(i as u64))?;
            Ok(*p.values.last().unwrap())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (d, p) = ks_one_sample(&h1, |x| special::normal_cdf(x - mu))?;
    Ok(CheckOutcome::from_ks(d, p, n as u64))
}

fn c09_williams_mu05(ctx: &CheckCtx) -> Result<CheckOutcome> {
    williams_check(0.5, ctx)
}

fn c09_williams_mu2(ctx: &CheckCtx) -> Result<CheckOutcome> {
    williams_check(2.0, ctx)
}

fn c10_bessel_from_min_ks(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let (b, mu) = (1.0, 1.0);
    let n = 4000usize;
    let dt = 2e-4;
    let construction: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = sampler::sample_bessel_from_min(b, mu, 1.0, dt, ctx.stream.replicate(i as u64))?;
            Ok(*s.path.values.last().unwrap())
        })
        .collect::<Result<Vec<f64>>>()?;
    // rejection oracle: BES^b(3, μ) is b − BM(−μ) conditioned on
    // sup BM(−μ) ≤ b, i.e. a drift-(+μ) Brownian motion from b conditioned
    // to stay positive; the horizon makes later deaths negligible
    // (probability ≤ e^{−2μ(b+μ·horizon)} on surviving paths)
    let horizon = 8.0;
    let steps = (horizon / dt) as usize;
    let t1 = (1.0 / dt) as usize;
    let rejection: Vec<f64> = (0..(2 * n))
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ctx.stream.substream(7).replicate(i as u64).rng();
            let sd = dt.sqrt();
            let mut v = b;
            let mut at_t1 = None;
            for k in 1..=steps {
                let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                v += mu * dt + sd * z;
                if v <= 0.0 {
                    return None;
                }
                if k == t1 {
                    at_t1 = Some(v);
                }
            }
            at_t1
        })
        .collect();
    let (d, p) = ks_two_sample(&construction, &rejection[..n.min(rejection.len())])?;
    Ok(CheckOutcome::from_ks(d, p, n as u64))
}

fn c11_frak_t_ks(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let n = 10_000usize;
    let ts: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sampler::sample_frak_t(params, 1e-3, 500.0, ctx.stream.replicate(i as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let table = laws::frak_t_cdf_table(params, 4096)?;
    let (d, p) = ks_one_sample(&ts, |t| table.cdf_normalized(t))?;
    Ok(CheckOutcome::from_ks(d, p, n as u64))
}

fn samplers_tau_ks(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.25)?;
    let sampler = DirectSampler::new(params)?;
    let n = ctx.n.max(1000) as usize;
    let mut rng = ctx.stream.rng();
    let mut taus = Vec::with_capacity(n);
    let mut support_violations = 0usize;
    for _ in 0..n {
        let s = sampler.sample_tau_gamma(&mut rng);
        if !(s.gamma_hat >= 0.0 && s.gamma_hat <= 2.0 * params.alpha() * s.tau + 1e-12) {
            support_violations += 1;
        }
        taus.push(s.tau);
    }
    if support_violations > 0 {
        return Ok(CheckOutcome::from_bound(support_violations as f64, 0.0, n as u64));
    }
    let table = laws::frak_t_cdf_table(params, 4096)?;
    let (d, p) = ks_one_sample(&taus, |t| table.cdf_normalized(t))?;
    Ok(CheckOutcome::from_ks(d, p, n as u64))
}

fn samplers_hitting_time_ks(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let (mu, y) = (2.0, 3.0);
    let n = ctx.n.max(1000) as usize;
    let mut rng = ctx.stream.rng();
    let xs: Vec<f64> = (0..n)
        .map(|_| sampler::sample_inverse_gaussian_hitting(mu, y, &mut rng))
        .collect::<Result<Vec<f64>>>()?;
    let law = laws::hitting_time_law(mu, y)?;
    let table = crate::cdf::CdfTable::build(move |t| law.density(t), 1.0, 2048, 1e-10)?;
    let (d, p) = ks_one_sample(&xs, |t| table.cdf_normalized(t))?;
    Ok(CheckOutcome::from_ks(d, p, n as u64))
}

fn samplers_brownian_excursion(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let n = ctx.n.max(1000) as usize;
    let mut rng = ctx.stream.rng();
    let mut mid = Vec::with_capacity(n);
    let mut quarter = Vec::with_capacity(n);
    for _ in 0..n {
        let e = sampler::sample_brownian_excursion(16, &mut rng)?;
        mid.push(e[8]);
        quarter.push(e[4] * e[4] / (0.25 * 0.75));
    }
    let mc = moment_check(&mid, 0.7978845608028654, K_SIGMA);
    let (_, p) = ks_one_sample(&quarter, special::chi2_3_cdf)?;
    let mut out = CheckOutcome::from_zscores(&[zscore(&mc)], n as u64);
    out.p_value = Some(p);
    out.pass = out.pass && p > P_THRESHOLD;
    Ok(out)
}

fn samplers_feature_algebra(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.3, -0.4)?;
    let n = ctx.n.max(1000) as usize;
    let fs = direct_features(params, n, ctx.stream)?;
    let mut worst: f64 = 0.0;
    for f in &fs {
        let scale = 1.0 + f.zeta;
        worst = worst.max((f.l_peak + f.zeta_minus_l - f.zeta).abs() / scale);
        worst = worst.max((f.w_zeta - params.alpha() * (2.0 * f.l_peak - f.zeta)).abs() / scale);
        if f.w_zeta.abs() > params.alpha() * f.zeta * (1.0 + 1e-12) {
            worst = worst.max(1.0);
        }
    }
    Ok(CheckOutcome::from_bound(worst, 1e-12, n as u64))
}

fn samplers_h_pathwise_vs_direct(ctx: &CheckCtx) -> Result<CheckOutcome> {
    // The gap H at the sawtooth peak: measured on extracted excursions vs
    // the direct χ₃ construction. The grid cannot place the peak of an
    // excursion only a few steps long, so both sides are conditioned on
    // ζ ≥ 50·dt and the conditional laws compared.
    let params = LawParams::new(1.0, 0.0)?;
    let dt = 1e-3;
    let floor = 50.0 * dt;
    let n = 5000;
    let n_paths = 60usize;
    let hs_path: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            study_brownian_path(params, -15.0, 60.0, dt, ctx.stream.substream(1).replicate(i as u64))
                .map(|s| {
                    s.features
                        .iter()
                        .filter(|f| f.zeta >= floor)
                        .map(|f| f.h)
                        .collect::<Vec<f64>>()
                })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .take(n)
        .collect();
    let fs = direct_features(params, 3 * n, ctx.stream.substream(2))?;
    let hs_direct: Vec<f64> = fs
        .iter()
        .filter(|f| f.zeta >= floor)
        .map(|f| f.h)
        .take(n)
        .collect();
    // The measured h carries O(√dt) sampling noise around the peak, so the
    // conditional laws agree only up to a few hundredths in Kolmogorov
    // distance. That is still an order of magnitude below the ~0.3 gap a
    // wrong H scale (e.g. a missing √τ) would produce, which is what this
    // check guards.
    let (d, _) = ks_two_sample(&hs_path, &hs_direct)?;
    Ok(CheckOutcome::from_bound(d, 0.08, hs_path.len().min(hs_direct.len()) as u64))
}

// ---------------------------------------------------------------------------
// straddle suite
// ---------------------------------------------------------------------------

fn straddle_samples(
    params: LawParams,
    n: usize,
    dt: f64,
    stream: RngStream,
) -> Result<Vec<PathStudy>> {
    (0..n)
        .into_par_iter()
        .map(|i| study_brownian_path(params, -20.0, 20.0, dt, stream.replicate(i as u64)))
        .collect()
}

fn c07_uniform_split_ks(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let n = 5000;
    let studies = straddle_samples(params, n, 1e-3, ctx.stream)?;
    let us: Vec<f64> = studies
        .iter()
        .filter_map(|s| match (s.g, s.straddle_d) {
            (Some(g), Some(d)) if d > g => Some(-g / (d - g)),
            _ => None,
        })
        .collect();
    let (d, p) = ks_one_sample(&us, |x| x.clamp(0.0, 1.0))?;
    Ok(CheckOutcome::from_ks(d, p, us.len() as u64))
}

fn c08_size_biased_lifetime(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let n = 5000;
    let studies = straddle_samples(params, n, 1e-3, ctx.stream)?;
    let lifetimes: Vec<f64> = studies
        .iter()
        .filter_map(|s| match (s.g, s.straddle_d) {
            (Some(g), Some(d)) if d > g => Some(d - g),
            _ => None,
        })
        .collect();
    // E[D − G] = E[ζ²]/E[ζ] = 2 for α = 1, β = 0 (second derivative of the
    // ζ Laplace transform at 0 gives E[ζ²] = 1)
    let mc = moment_check(&lifetimes, 2.0, K_SIGMA);
    Ok(CheckOutcome::from_zscores(&[zscore(&mc)], lifetimes.len() as u64))
}

fn c15_d_decomposition_ks(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let n = 5000;
    let from_sampler: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sampler::sample_d_decomposition(params, 1e-4, ctx.stream.substream(1).replicate(i as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let pathwise: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            study_brownian_path(params, -15.0, 25.0, 2e-4, ctx.stream.substream(2).replicate(i as u64))
                .map(|s| s.d)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (d, p) = ks_two_sample(&from_sampler, &pathwise)?;
    Ok(CheckOutcome::from_ks(d, p, n as u64))
}

fn straddle_post_d_independence(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let n = 5000;
    let studies = straddle_samples(params, n, 1e-3, ctx.stream)?;
    let pairs: Vec<(f64, f64)> = studies
        .iter()
        .filter_map(|s| s.post_increment.map(|inc| (s.pre_inf, inc)))
        .collect();
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let rho = correlation(&a, &b).abs();
    Ok(CheckOutcome::from_bound(rho, 3.0 / (a.len() as f64).sqrt(), a.len() as u64))
}

fn straddle_iid_excursions(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let n = 10_000;
    let pairs: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            study_brownian_path(params, -15.0, 12.0, 2e-3, ctx.stream.replicate(i as u64)).map(|s| {
                if s.features.len() >= 2 {
                    Some((s.features[0].zeta, s.features[1].zeta))
                } else {
                    None
                }
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let first: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let second: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (d, p) = ks_two_sample(&first, &second)?;
    let rho = correlation(&first, &second).abs();
    let mut out = CheckOutcome::from_ks(d, p, first.len() as u64);
    out.pass = out.pass && rho <= 3.0 / (first.len() as f64).sqrt();
    out.tolerance = Some(3.0 / (first.len() as f64).sqrt());
    out.statistic = rho.max(d);
    Ok(out)
}

fn straddle_renewal_reward(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.3)?;
    let zetas_and_ws: Vec<(f64, f64)> = (0..60u64)
        .into_par_iter()
        .map(|i| {
            study_brownian_path(params, -20.0, 150.0, 1e-3, ctx.stream.replicate(i))
                .map(|s| s.features.iter().map(|f| (f.zeta, f.w_zeta)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    // E[W_ζ] = β E[ζ]: test E[W − βζ] = 0
    let diffs: Vec<f64> =
        zetas_and_ws.iter().map(|(z, w)| w - params.beta() * z).collect();
    let mc = moment_check(&diffs, 0.0, K_SIGMA);
    Ok(CheckOutcome::from_zscores(&[zscore(&mc)], diffs.len() as u64))
}

fn straddle_size_bias_identity(ctx: &CheckCtx) -> Result<CheckOutcome> {
    // E[f(D−G)] = E[ζ f(ζ)]/E[ζ] for f(ζ) = e^{−ζ}. The left side is a
    // ratio statistic of pool A; the right side resamples pool B, so its
    // fluctuation stacks the pool's own ratio-statistic error on top of the
    // resampling noise. All three variance terms enter the band.
    let params = LawParams::new(1.0, 0.0)?;
    let sampler = DirectSampler::new(params)?;
    let n = (ctx.n as usize).max(10_000);
    let nf = n as f64;
    let ratio_with_se = |pool: &FeaturePool| {
        let num: f64 = pool.features().iter().map(|f| f.zeta * (-f.zeta).exp()).sum::<f64>() / nf;
        let den: f64 = pool.features().iter().map(|f| f.zeta).sum::<f64>() / nf;
        let g = num / den;
        let resid_var = pool
            .features()
            .iter()
            .map(|f| {
                let r = f.zeta * (-f.zeta).exp() - g * f.zeta;
                r * r
            })
            .sum::<f64>()
            / (nf - 1.0);
        (g, (resid_var / nf).sqrt() / den)
    };
    let pool_a = FeaturePool::build(&sampler, n, ctx.stream.substream(1))?;
    let pool_b = FeaturePool::build(&sampler, n, ctx.stream.substream(2))?;
    let (lhs, se_a) = ratio_with_se(&pool_a);
    let (_, se_b) = ratio_with_se(&pool_b);
    let mut rng = ctx.stream.substream(3).rng();
    let draws: Vec<f64> = (0..n)
        .map(|_| (-sampler::sample_straddling_features(&pool_b, &mut rng).lifetime).exp())
        .collect();
    let mean = draws.iter().sum::<f64>() / nf;
    let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (nf - 1.0);
    let se = (se_a * se_a + se_b * se_b + var / nf).sqrt();
    let z = (mean - lhs).abs() / se;
    Ok(CheckOutcome::from_zscores(&[z], n as u64))
}

fn straddle_lifetime_identity(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let sampler = DirectSampler::new(params)?;
    let n = (ctx.n as usize).max(20_000);
    let pool = FeaturePool::build(&sampler, n, ctx.stream.substream(1))?;
    let mut rng = ctx.stream.substream(2).rng();
    let mut zv = Vec::with_capacity(n);
    let mut zw = Vec::with_capacity(n);
    for _ in 0..n {
        let s = sampler::sample_straddling_features(&pool, &mut rng);
        zv.push(s.lifetime);
        zw.push(s.u * s.lifetime);
    }
    let mut worst: f64 = 0.0;
    let h = 0.05;
    for &t in &[0.2, 0.5, 1.0] {
        let pv = zv.iter().filter(|&&z| t < z).count() as f64 / n as f64;
        let pw = zw.iter().filter(|&&z| t < z).count() as f64 / n as f64;
        let dens = stats::kernel_density_h(&zw, t, h);
        let rhs = pw + t * dens;
        // binomial noise of both survivals, KDE noise t·√(f·R(K)/(nh)) with
        // R(gaussian) ≈ 0.282, and an O(h²) smoothing-bias allowance
        let se = (pv * (1.0 - pv) / n as f64).sqrt()
            + (pw * (1.0 - pw) / n as f64).sqrt()
            + t * (dens.max(0.05) * 0.282 / (n as f64 * h)).sqrt()
            + t * h * h;
        worst = worst.max((pv - rhs).abs() / se);
    }
    Ok(CheckOutcome {
        statistic: worst,
        target: None,
        tolerance: Some(5.0),
        p_value: None,
        pass: worst <= 5.0,
        n: n as u64,
    })
}

// ---------------------------------------------------------------------------
// azema suite
// ---------------------------------------------------------------------------

fn c12_azema_z_vs_survival(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let probes = [0.1, 0.5, 1.0, 2.0];
    let n = 10_000;
    let samples: Vec<azema::AzemaSample> = (0..n)
        .into_par_iter()
        .map(|i| azema::azema_one_path(params, &probes, 1e-3, ctx.stream.replicate(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut zs = Vec::new();
    for (j, _) in probes.iter().enumerate() {
        let t = probes[j];
        let diffs: Vec<f64> = samples
            .iter()
            .map(|s| s.z_at[j] - if s.d > t { 1.0 } else { 0.0 })
            .collect();
        zs.push(zscore(&moment_check(&diffs, 0.0, K_SIGMA)));
    }
    Ok(CheckOutcome::from_zscores(&zs, n as u64))
}

fn c13_ito_residual(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let alpha = 1.0;
    let mut medians = Vec::new();
    for (j, dt) in [1e-3f64, 1e-4, 1e-5].into_iter().enumerate() {
        let mut residuals: Vec<f64> = (0..100u64)
            .into_par_iter()
            .map(|rep| {
                let stream = ctx.stream.substream(j as u64).replicate(rep);
                let n = (1.0 / dt) as usize;
                let mut rng = stream.rng();
                let sd = dt.sqrt();
                let mut values = vec![0.0f64; n + 1];
                for k in 1..=n {
                    let z: f64 =
                        rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                    values[k] = values[k - 1] + sd * z;
                }
                let path = GridPath::new(0.0, dt, values).unwrap();
                azema::ito_identity_residual(&path, alpha).unwrap()
            })
            .collect();
        residuals.sort_by(|a, b| a.total_cmp(b));
        medians.push(residuals[residuals.len() / 2]);
    }
    // calibrated bound at dt = 1e−5 plus monotone decrease across dt
    let pass = medians[2] < 0.02 && medians[2] < medians[1] && medians[1] < medians[0];
    Ok(CheckOutcome {
        statistic: medians[2],
        target: None,
        tolerance: Some(0.02),
        p_value: None,
        pass,
        n: 300,
    })
}

fn azema_z_bounds_and_supermartingale(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let probes: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
    let n = 2000;
    let samples: Vec<azema::AzemaSample> = (0..n)
        .into_par_iter()
        .map(|i| azema::azema_one_path(params, &probes, 2e-3, ctx.stream.replicate(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    // bounds
    let mut bound_excess: f64 = 0.0;
    for s in &samples {
        for &z in &s.z_at {
            bound_excess = bound_excess.max(-z).max(z - 1.0);
        }
    }
    if bound_excess > 0.0 {
        return Ok(CheckOutcome::from_bound(bound_excess, 0.0, n as u64));
    }
    // mean Z decreasing along the grid within statistical error
    let nf = n as f64;
    let mut worst_z: f64 = 0.0;
    for j in 1..probes.len() {
        let diffs: Vec<f64> = samples.iter().map(|s| s.z_at[j] - s.z_at[j - 1]).collect();
        let mean = diffs.iter().sum::<f64>() / nf;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (nf - 1.0);
        let se = (var / nf).sqrt();
        if mean > 0.0 {
            worst_z = worst_z.max(mean / (se + 1e-15));
        }
    }
    Ok(CheckOutcome::from_zscores(&[worst_z], n as u64))
}

fn azema_survival_vs_d_sampler(ctx: &CheckCtx) -> Result<CheckOutcome> {
    let params = LawParams::new(1.0, 0.0)?;
    let ts = [0.5, 1.0, 2.0];
    let n = 2000;
    let curve = azema::survival_curve(params, &ts, n, 2e-3, ctx.stream.substream(1))?;
    let ds: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sampler::sample_d_decomposition(params, 2e-4, ctx.stream.substream(2).replicate(i as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let nf = n as f64;
    let mut zs = Vec::new();
    for (j, &t) in ts.iter().enumerate() {
        let p2 = ds.iter().filter(|&&d| d > t).count() as f64 / nf;
        let se2 = (p2 * (1.0 - p2) / nf).sqrt();
        let se = (curve[j].se * curve[j].se + se2 * se2).sqrt();
        zs.push((curve[j].p - p2).abs() / (se + 1e-15));
    }
    Ok(CheckOutcome::from_zscores(&zs, n as u64))
}

// ---------------------------------------------------------------------------
// registry and runner
// ---------------------------------------------------------------------------

const MINORANT_CHECKS: &[Check] = &[
    Check { name: "c01_minorant_brute_force_equivalence", f: c01_minorant_brute_force },
    Check { name: "minorant_lipschitz_dominance", f: minorant_lipschitz_dominance },
    Check { name: "minorant_space_time_homogeneity", f: minorant_space_time_homogeneity },
    Check { name: "minorant_sawtooth_reconstruction", f: minorant_sawtooth_reconstruction },
    Check { name: "minorant_recipe_vs_contact_d", f: minorant_recipe_vs_contact },
    Check { name: "minorant_contact_set_nonempty", f: minorant_contact_nonempty },
];

const LAWS_CHECKS: &[Check] = &[
    Check { name: "c14_psi_time_reversal", f: c14_psi_time_reversal },
    Check { name: "c14_psi_scaling_rho4_linear", f: c14_psi_scaling },
    Check { name: "c14_integral_identity", f: c14_integral_identity },
    Check { name: "c14_density_normalizations", f: c14_density_normalizations },
    Check { name: "c14_feature_laplace_specialization", f: c14_feature_laplace_specialization },
    Check { name: "laws_means_numeric_diff", f: laws_means_numeric_diff },
    Check { name: "laws_laplace_density_consistency", f: laws_laplace_density_consistency },
    Check { name: "laws_frak_t_time_inversion", f: laws_frak_t_inversion },
    Check { name: "laws_joint_factorization", f: laws_joint_factorization },
    Check { name: "laws_zeta_laplace_two_routes", f: laws_zeta_laplace_two_routes },
];

const SAMPLER_CHECKS: &[Check] = &[
    Check { name: "c02_mean_zeta_alpha1_beta0", f: c02_mean_zeta_a1b0 },
    Check { name: "c02_mean_zeta_alpha2_beta1", f: c02_mean_zeta_a2b1 },
    Check { name: "c03_feature_means_alpha1_beta0", f: c03_feature_means_a1b0 },
    Check { name: "c03_feature_means_alpha2_beta1", f: c03_feature_means_a2b1 },
    Check { name: "c04_zeta_distribution_ks", f: c04_zeta_ks },
    Check { name: "c05_laplace_spot_lambda_0_1", f: c05_laplace_spot_lam01 },
    Check { name: "c05_laplace_spot_lambda_0_5", f: c05_laplace_spot_lam05 },
    Check { name: "c06_pathwise_direct_zeta_ks", f: c06_pathwise_direct_zeta_ks },
    Check { name: "c09_williams_h1_mu_0_5", f: c09_williams_mu05 },
    Check { name: "c09_williams_h1_mu_2", f: c09_williams_mu2 },
    Check { name: "c10_bessel_from_min_marginal_ks", f: c10_bessel_from_min_ks },
    Check { name: "c11_frak_t_law_ks", f: c11_frak_t_ks },
    Check { name: "samplers_tau_gamma_ks_support", f: samplers_tau_ks },
    Check { name: "samplers_hitting_time_ks", f: samplers_hitting_time_ks },
    Check { name: "samplers_brownian_excursion_marginals", f: samplers_brownian_excursion },
    Check { name: "samplers_feature_algebra_exact", f: samplers_feature_algebra },
    Check { name: "samplers_h_pathwise_vs_direct", f: samplers_h_pathwise_vs_direct },
];

const STRADDLE_CHECKS: &[Check] = &[
    Check { name: "c07_uniform_split_ks", f: c07_uniform_split_ks },
    Check { name: "c08_size_biased_lifetime", f: c08_size_biased_lifetime },
    Check { name: "c15_d_decomposition_ks", f: c15_d_decomposition_ks },
    Check { name: "straddle_post_d_independence", f: straddle_post_d_independence },
    Check { name: "straddle_iid_excursions", f: straddle_iid_excursions },
    Check { name: "straddle_renewal_reward", f: straddle_renewal_reward },
    Check { name: "straddle_size_bias_identity", f: straddle_size_bias_identity },
    Check { name: "straddle_lifetime_identity", f: straddle_lifetime_identity },
];

const AZEMA_CHECKS: &[Check] = &[
    Check { name: "c12_azema_z_vs_survival", f: c12_azema_z_vs_survival },
    Check { name: "c13_ito_identity_residual", f: c13_ito_residual },
    Check { name: "azema_z_bounds_supermartingale", f: azema_z_bounds_and_supermartingale },
    Check { name: "azema_survival_vs_d_sampler", f: azema_survival_vs_d_sampler },
];

pub fn suite_checks(suite: &str) -> Result<Vec<&'static Check>> {
    let groups: &[&[Check]] = match suite {
        "minorant" => &[MINORANT_CHECKS],
        "laws" => &[LAWS_CHECKS],
        "samplers" => &[SAMPLER_CHECKS],
        "straddle" => &[STRADDLE_CHECKS],
        "azema" => &[AZEMA_CHECKS],
        "all" => &[MINORANT_CHECKS, LAWS_CHECKS, SAMPLER_CHECKS, STRADDLE_CHECKS, AZEMA_CHECKS],
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite '{other}' (expected minorant, laws, samplers, straddle, azema, all)"
            )))
        }
    };
    Ok(groups.iter().flat_map(|g| g.iter()).collect())
}

/// Run the named suite with stream-per-check seeding; a failing check is
/// rerun once on a derived stream.
pub fn run_suite(suite: &str, n: u64, seed: u64) -> Result<Report> {
    let checks = suite_checks(suite)?;
    let start = std::time::Instant::now();
    let records: Vec<CheckRecord> = checks
        .par_iter()
        .enumerate()
        .map(|(i, check)| run_check(check, i as u64, n, seed))
        .collect::<Result<Vec<_>>>()?;
    let pass = records.iter().all(|r| r.pass);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        suite: suite.to_string(),
        n,
        seed,
        pass,
        checks: records,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

fn run_check(check: &Check, index: u64, n: u64, seed: u64) -> Result<CheckRecord> {
    let stream = RngStream::new(seed, index);
    let first = (check.f)(&CheckCtx { stream, n })?;
    let mut attempts = vec![Attempt {
        statistic: first.statistic,
        p_value: first.p_value,
        pass: first.pass,
    }];
    let (outcome, rerun) = if first.pass {
        (first, false)
    } else {
        let retry_stream = stream.substream(RERUN_TAG);
        let second = (check.f)(&CheckCtx { stream: retry_stream, n })?;
        attempts.push(Attempt {
            statistic: second.statistic,
            p_value: second.p_value,
            pass: second.pass,
        });
        (second, true)
    };
    Ok(CheckRecord {
        name: check.name.to_string(),
        statistic: outcome.statistic,
        target: outcome.target,
        tolerance: outcome.tolerance,
        p_value: outcome.p_value,
        pass: attempts.iter().any(|a| a.pass),
        n: outcome.n,
        seed,
        stream: index,
        rerun,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_rejected() {
        assert!(suite_checks("nope").is_err());
        assert!(suite_checks("all").unwrap().len() > 30);
    }

    #[test]
    fn laws_suite_runs_and_is_deterministic() {
        let a = run_suite("laws", 1000, 7).unwrap();
        assert!(a.pass, "{}", a.format_lines());
        let b = run_suite("laws", 1000, 7).unwrap();
        assert_eq!(a.to_json_string().unwrap(), b.to_json_string().unwrap());
    }

    #[test]
    fn minorant_suite_runs() {
        let r = run_suite("minorant", 1000, 11).unwrap();
        assert!(r.pass, "{}", r.format_lines());
    }
}
