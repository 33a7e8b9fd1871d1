//! Command-line surface: simulate, minorant, excursions, sample-excursion,
//! laws eval, azema, verify.
//!
//! Exit codes: 0 success / all checks passed, 1 verification failure,
//! 2 usage error (clap's default). The seed falls back to LIPMIN_SEED.

use crate::error::{Error, Result};
use crate::excursion;
use crate::laws::{self, FeatureKind, LawParams};
use crate::minorant;
use crate::paths::{self, Path, ProcessSpec};
use crate::rng::RngStream;
use crate::sampler::{self, DirectSampler};
use crate::{azema, suite};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "lipmin",
    about = "Lipschitz minorants of Lévy paths: simulation, excursion sampling, closed-form laws, verification",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Simulate a two-sided process path and write it as JSON (and CSV).
    Simulate(SimulateArgs),
    /// Compute the α-Lipschitz minorant and contact set of a path.
    Minorant(MinorantArgs),
    /// Slice a grid path into generic excursions and print feature rows.
    Excursions(ExcursionsArgs),
    /// Sample excursions directly from the path decomposition.
    SampleExcursion(SampleExcursionArgs),
    /// Evaluate closed-form laws.
    Laws(LawsArgs),
    /// Monte Carlo check of the Azéma supermartingale against P(D > t).
    Azema(AzemaArgs),
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ProcessKind {
    Brownian,
    Cpp,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "brownian")]
    pub process: ProcessKind,
    /// Drift β of the Brownian variant.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Volatility σ of the Brownian variant.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Drift d of the compound Poisson variant.
    #[arg(long, default_value_t = 0.0)]
    pub drift: f64,
    /// Jump intensity of the compound Poisson variant.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Jump law: constant:<v>, exponential:<rate>, normal:<mean>,<sd>,
    /// cauchy:<median>,<scale>.
    #[arg(long, default_value = "constant:1.0")]
    pub jump_law: String,
    #[arg(long, allow_hyphen_values = true)]
    pub tmin: f64,
    #[arg(long)]
    pub tmax: f64,
    /// Grid step (Brownian only; the compound Poisson path is exact).
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, env = "LIPMIN_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Output JSON file.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional CSV export with columns (t, x).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct MinorantArgs {
    /// Input path JSON (grid or event form).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    /// Contact tolerance; defaults to 0.5·σ·√dt for grid paths, 0 for
    /// event paths.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Boundary buffer inside which D is not reported.
    #[arg(long, default_value_t = 0.0)]
    pub buffer: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ExcursionsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    /// Contact tolerance (0 = exact grid contacts).
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    /// Boundary buffer; defaults to five mean excursion lengths.
    #[arg(long)]
    pub buffer: Option<f64>,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SampleMode {
    Features,
    Path,
}

#[derive(Args)]
pub struct SampleExcursionArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "features")]
    pub mode: SampleMode,
    /// Grid step for path mode.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, env = "LIPMIN_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Feature CSV output (features mode) or JSON path list (path mode);
    /// stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    ZetaDensity,
    LDensity,
    ZetaMinusLDensity,
    ZetaLaplace,
    LLaplace,
    ZetaMinusLLaplace,
    WLaplace,
    Psi,
    TauGamma,
    FrakTDensity,
    GammaConditional,
    HittingDensity,
    HittingLaplace,
    LevyMeasure,
    Means,
    IntegralIdentity,
}

#[derive(Args)]
pub struct LawsArgs {
    #[command(subcommand)]
    pub action: LawsAction,
}

#[derive(Subcommand)]
pub enum LawsAction {
    /// Evaluate one quantity and print the number(s).
    Eval(LawsEvalArgs),
}

#[derive(Args)]
pub struct LawsEvalArgs {
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Primary evaluation point (λ, l, t, or a — see the quantity).
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<f64>,
    /// Secondary evaluation point (x, t, or b).
    #[arg(long, allow_hyphen_values = true)]
    pub at2: Option<f64>,
    /// Ψ arguments ρ1..ρ4.
    #[arg(long, num_args = 4, allow_hyphen_values = true)]
    pub rho: Option<Vec<f64>>,
    /// First-passage drift μ.
    #[arg(long)]
    pub mu: Option<f64>,
    /// First-passage level y.
    #[arg(long)]
    pub y: Option<f64>,
    /// JSON batch mode: a file holding an array of request objects with the
    /// same fields; results are written as a JSON array to stdout.
    #[arg(long, conflicts_with = "quantity")]
    pub batch: Option<PathBuf>,
}

/// One batch request, mirroring the flag surface.
#[derive(Debug, Serialize, Deserialize)]
pub struct LawRequest {
    pub quantity: Quantity,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub at: Option<f64>,
    #[serde(default)]
    pub at2: Option<f64>,
    #[serde(default)]
    pub rho: Option<[f64; 4]>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub y: Option<f64>,
}

fn default_alpha() -> f64 {
    1.0
}

#[derive(Args)]
pub struct AzemaArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    /// Probe times, comma separated.
    #[arg(long, default_value = "0.1,0.5,1,2", value_delimiter = ',')]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, env = "LIPMIN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// JSON report output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Suite: minorant, laws, samplers, straddle, azema, all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Replicate budget for checks without a pinned sample size.
    #[arg(long, default_value_t = 10_000)]
    pub n: u64,
    #[arg(long, env = "LIPMIN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// JSON report output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn parse_jump_law(s: &str) -> Result<paths::JumpLaw> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("jump law '{s}' needs kind:params")))?;
    let nums: Vec<f64> = rest
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number '{x}' in jump law")))
        })
        .collect::<Result<_>>()?;
    let law = match (kind, nums.as_slice()) {
        ("constant", [v]) => paths::JumpLaw::Constant { value: *v },
        ("exponential", [r]) => paths::JumpLaw::Exponential { rate: *r },
        ("normal", [m, s]) => paths::JumpLaw::Normal { mean: *m, sd: *s },
        ("cauchy", [m, s]) => paths::JumpLaw::Cauchy { median: *m, scale: *s },
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown jump law '{s}' (constant:v, exponential:r, normal:m,s, cauchy:m,s)"
            )))
        }
    };
    law.validate()?;
    Ok(law)
}

fn write_or_stdout(out: &Option<PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, contents)?,
        None => print!("{contents}"),
    }
    Ok(())
}

/// Evaluate one law request; the single entry point for both the flag form
/// and the JSON batch form.
pub fn eval_law_request(req: &LawRequest) -> Result<f64> {
    let p = LawParams::new(req.alpha, req.beta)?;
    let need = |v: Option<f64>, what: &str| -> Result<f64> {
        v.ok_or_else(|| Error::InvalidArgument(format!("missing --{what} for this quantity")))
    };
    let finite = |v: f64, what: &str| -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidArgument(format!("non-finite {what}")))
        }
    };
    match req.quantity {
        Quantity::ZetaDensity => {
            laws::feature_density(FeatureKind::Zeta, p, finite(need(req.at, "at")?, "at")?)
        }
        Quantity::LDensity => {
            laws::feature_density(FeatureKind::LPeak, p, finite(need(req.at, "at")?, "at")?)
        }
        Quantity::ZetaMinusLDensity => {
            laws::feature_density(FeatureKind::ZetaMinusL, p, finite(need(req.at, "at")?, "at")?)
        }
        Quantity::ZetaLaplace => {
            laws::feature_laplace(FeatureKind::Zeta, p, finite(need(req.at, "at")?, "at")?)
        }
        Quantity::LLaplace => {
            laws::feature_laplace(FeatureKind::LPeak, p, finite(need(req.at, "at")?, "at")?)
        }
        Quantity::ZetaMinusLLaplace => {
            laws::feature_laplace(FeatureKind::ZetaMinusL, p, finite(need(req.at, "at")?, "at")?)
        }
        Quantity::WLaplace => {
            laws::feature_laplace(FeatureKind::WZeta, p, finite(need(req.at, "at")?, "at")?)
        }
        Quantity::Psi => {
            let rho = req.rho.ok_or_else(|| {
                Error::InvalidArgument("psi needs --rho r1 r2 r3 r4".into())
            })?;
            for r in rho {
                finite(r, "rho")?;
            }
            laws::psi_joint_laplace(p, rho)
        }
        Quantity::TauGamma => laws::joint_density_tau_gamma(
            p,
            finite(need(req.at, "at")?, "at")?,
            finite(need(req.at2, "at2")?, "at2")?,
        ),
        Quantity::FrakTDensity => laws::density_frak_t(p, finite(need(req.at, "at")?, "at")?),
        Quantity::GammaConditional => laws::conditional_density_gamma(
            p,
            finite(need(req.at, "at")?, "at")?,
            finite(need(req.at2, "at2")?, "at2")?,
        ),
        Quantity::HittingDensity => {
            let law = laws::hitting_time_law(need(req.mu, "mu")?, need(req.y, "y")?)?;
            Ok(law.density(finite(need(req.at, "at")?, "at")?))
        }
        Quantity::HittingLaplace => {
            let law = laws::hitting_time_law(need(req.mu, "mu")?, need(req.y, "y")?)?;
            law.laplace(finite(need(req.at, "at")?, "at")?)
        }
        Quantity::LevyMeasure => {
            laws::levy_measure_density(req.alpha, finite(need(req.at, "at")?, "at")?)
        }
        Quantity::Means => {
            // scalar surface: report E[ζ]; the full tuple goes to stdout in
            // the flag form below
            Ok(laws::mean_features(p).zeta)
        }
        Quantity::IntegralIdentity => laws::check_integral_identity(
            finite(need(req.at, "at")?, "at")?,
            finite(need(req.at2, "at2")?, "at2")?,
        ),
    }
}

/// Parse and evaluate a JSON batch; the fuzzed entry point.
pub fn eval_laws_batch_json(json: &str) -> Result<String> {
    let reqs: Vec<LawRequest> = serde_json::from_str(json)?;
    #[derive(Serialize)]
    struct Entry {
        ok: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        value: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    }
    let results: Vec<Entry> = reqs
        .iter()
        .map(|r| match eval_law_request(r) {
            Ok(v) => Entry { ok: true, value: Some(v), error: None },
            Err(e) => Entry { ok: false, value: None, error: Some(e.to_string()) },
        })
        .collect();
    Ok(serde_json::to_string_pretty(&results)?)
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate(a) => {
            let path = match a.process {
                ProcessKind::Brownian => {
                    let spec = ProcessSpec::BrownianWithDrift { beta: a.beta, sigma: a.sigma };
                    Path::Grid(paths::simulate_brownian_two_sided(
                        &spec,
                        a.tmin,
                        a.tmax,
                        a.dt,
                        RngStream::new(a.seed, a.stream),
                    )?)
                }
                ProcessKind::Cpp => {
                    let spec = ProcessSpec::CompoundPoissonDrift {
                        drift: a.drift,
                        rate: a.rate,
                        jumps: parse_jump_law(&a.jump_law)?,
                    };
                    Path::Event(paths::simulate_compound_poisson(
                        &spec,
                        a.tmin,
                        a.tmax,
                        RngStream::new(a.seed, a.stream),
                    )?)
                }
            };
            fs::write(&a.out, paths::path_to_json(&path)?)?;
            if let Some(csv) = &a.csv {
                let mut buf = Vec::new();
                paths::path_to_csv(&path, &mut buf)?;
                fs::write(csv, buf)?;
            }
            Ok(0)
        }
        Command::Minorant(a) => {
            let path = paths::parse_path_json(&fs::read_to_string(&a.input)?)?;
            let m = minorant::compute_minorant(&path, a.alpha)?;
            let tol = a.tol.unwrap_or(match &path {
                Path::Grid(g) => 0.5 * g.dt.sqrt(),
                Path::Event(_) => 0.0,
            });
            let cs = minorant::extract_contact_set(&path, &m, tol, a.buffer)?;
            #[derive(Serialize)]
            struct Out<'a> {
                alpha: f64,
                minorant: &'a [f64],
                contacts: &'a [usize],
                times: &'a [f64],
                g: Option<f64>,
                d: Option<f64>,
            }
            let out = Out {
                alpha: a.alpha,
                minorant: &m.values,
                contacts: &cs.indices,
                times: &cs.times,
                g: cs.g,
                d: cs.d,
            };
            fs::write(&a.out, serde_json::to_string_pretty(&out)?)?;
            Ok(0)
        }
        Command::Excursions(a) => {
            let path = paths::parse_path_json(&fs::read_to_string(&a.input)?)?;
            let grid = match path {
                Path::Grid(g) => g,
                Path::Event(_) => {
                    return Err(Error::Unsupported(
                        "excursion slicing is implemented for grid paths".into(),
                    ))
                }
            };
            let m = minorant::compute_minorant(&Path::Grid(grid.clone()), a.alpha)?;
            let buffer = a
                .buffer
                .unwrap_or(5.0 / (2.0 * a.alpha * a.alpha));
            let cs = minorant::extract_contact_set(&Path::Grid(grid.clone()), &m, a.tol, buffer)?;
            let (excs, warn) = excursion::extract_generic_excursions(&grid, &cs, buffer)?;
            if warn {
                eprintln!("warning: contact list too thin, no generic excursions extracted");
            }
            let rows: Vec<(f64, excursion::ExcursionFeatures)> = excs
                .iter()
                .map(|e| excursion::excursion_features(e, a.alpha).map(|f| (e.start, f)))
                .collect::<Result<_>>()?;
            let mut buf = Vec::new();
            excursion::features_to_csv(&rows, &mut buf)?;
            write_or_stdout(&a.out, &String::from_utf8_lossy(&buf))?;
            Ok(0)
        }
        Command::SampleExcursion(a) => {
            let params = LawParams::new(a.alpha, a.beta)?;
            let sampler = DirectSampler::new(params)?;
            let mut rng = RngStream::new(a.seed, a.stream).rng();
            match a.mode {
                SampleMode::Features => {
                    let rows: Vec<(f64, excursion::ExcursionFeatures)> = (0..a.n)
                        .map(|_| sampler.sample_features(&mut rng).map(|f| (0.0, f)))
                        .collect::<Result<_>>()?;
                    let mut buf = Vec::new();
                    excursion::features_to_csv(&rows, &mut buf)?;
                    write_or_stdout(&a.out, &String::from_utf8_lossy(&buf))?;
                }
                SampleMode::Path => {
                    let paths: Vec<sampler::SampledExcursion> = (0..a.n)
                        .map(|_| sampler.sample_excursion_path(a.dt, &mut rng))
                        .collect::<Result<_>>()?;
                    write_or_stdout(&a.out, &serde_json::to_string_pretty(&paths)?)?;
                }
            }
            Ok(0)
        }
        Command::Laws(a) => match a.action {
            LawsAction::Eval(e) => {
                if let Some(batch) = &e.batch {
                    let out = eval_laws_batch_json(&fs::read_to_string(batch)?)?;
                    println!("{out}");
                    return Ok(0);
                }
                let quantity = e.quantity.ok_or_else(|| {
                    Error::InvalidArgument("need --quantity or --batch".into())
                })?;
                if matches!(quantity, Quantity::Means) {
                    let m = laws::mean_features(LawParams::new(e.alpha, e.beta)?);
                    println!(
                        "E[zeta]={} E[L]={} E[zeta-L]={} E[W_zeta]={}",
                        m.zeta, m.l_peak, m.zeta_minus_l, m.w_zeta
                    );
                    return Ok(0);
                }
                let req = LawRequest {
                    quantity,
                    alpha: e.alpha,
                    beta: e.beta,
                    at: e.at,
                    at2: e.at2,
                    rho: e.rho.map(|v| [v[0], v[1], v[2], v[3]]),
                    mu: e.mu,
                    y: e.y,
                };
                println!("{}", eval_law_request(&req)?);
                Ok(0)
            }
        },
        Command::Azema(a) => {
            let params = LawParams::new(a.alpha, a.beta)?;
            use rayon::prelude::*;
            let base = RngStream::new(a.seed, 0);
            let samples: Vec<azema::AzemaSample> = (0..a.n)
                .into_par_iter()
                .map(|i| azema::azema_one_path(params, &a.t, a.dt, base.replicate(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            #[derive(Serialize)]
            struct Row {
                t: f64,
                mean_z: f64,
                survival: f64,
                se: f64,
                pass_3se: bool,
            }
            let nf = a.n as f64;
            let mut rows = Vec::new();
            for (j, &t) in a.t.iter().enumerate() {
                let mean_z = samples.iter().map(|s| s.z_at[j]).sum::<f64>() / nf;
                let survival = samples.iter().filter(|s| s.d > t).count() as f64 / nf;
                let diffs: Vec<f64> = samples
                    .iter()
                    .map(|s| s.z_at[j] - if s.d > t { 1.0 } else { 0.0 })
                    .collect();
                let mean = diffs.iter().sum::<f64>() / nf;
                let var =
                    diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (nf - 1.0);
                let se = (var / nf).sqrt();
                rows.push(Row { t, mean_z, survival, se, pass_3se: mean.abs() <= 3.0 * se });
            }
            let pass = rows.iter().all(|r| r.pass_3se);
            let json = serde_json::to_string_pretty(&rows)?;
            match &a.report {
                Some(p) => fs::write(p, &json)?,
                None => println!("{json}"),
            }
            for r in &rows {
                println!(
                    "t={}: mean Z = {:.4}, P(D>t) = {:.4}, se = {:.4} -> {}",
                    r.t,
                    r.mean_z,
                    r.survival,
                    r.se,
                    if r.pass_3se { "PASS" } else { "FAIL" }
                );
            }
            Ok(if pass { 0 } else { 1 })
        }
        Command::Verify(a) => {
            let report = suite::run_suite(&a.suite, a.n, a.seed)?;
            print!("{}", report.format_lines());
            if let Some(p) = &a.report {
                fs::write(p, report.to_json_string()?)?;
            }
            std::io::stdout().flush().ok();
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}
