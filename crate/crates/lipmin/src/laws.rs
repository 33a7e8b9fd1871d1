//! Closed-form laws of the Brownian excursion decomposition.
//!
//! For Brownian motion with drift β, |β| < α, the generic excursion away
//! from the contact set splits at (τ, γ̂): a scaled Brownian excursion plus
//! slope 2α up to τ, then a downward drifting segment run to a first
//! passage. Everything here is a deterministic function of (α, β): the
//! four-variable Laplace transform Ψ of (ζ, L, ζ−L, W_ζ), its marginal
//! specializations, the densities that admit closed forms, the (τ, γ̂)
//! joint law, the first-passage law, and the quadrature utilities used to
//! cross-check them.
//!
//! Density formulas pair `exp(c²l/2)·Φ̄(c√l)` factors; these are evaluated
//! through the scaled complement erfcx to avoid cancellation.

use crate::cdf::CdfTable;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_density, integrate_tail};
use crate::special::normal_sf_scaled;
use serde::{Deserialize, Serialize};

/// Slope bound α and drift β with |β| < α strictly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawParams {
    alpha: f64,
    beta: f64,
}

impl LawParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need finite alpha > 0, got alpha={alpha}, beta={beta}"
            )));
        }
        if !(beta.abs() < alpha) {
            return Err(Error::InvalidArgument(format!(
                "need |beta| < alpha, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(LawParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Which excursion feature a marginal law refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Zeta,
    LPeak,
    ZetaMinusL,
    WZeta,
}

/// Joint Laplace transform Ψ(ρ₁, ρ₂, ρ₃, ρ₄) of (ζ, L, ζ−L, W_ζ):
/// 4α / (2α + √(2(ρ₁+ρ₃−αρ₄)+(α+β)²) + √(2(ρ₁+ρ₂+αρ₄)+(α−β)²)).
pub fn psi_joint_laplace(p: LawParams, rho: [f64; 4]) -> Result<f64> {
    let (a, b) = (p.alpha, p.beta);
    let r_minus = 2.0 * (rho[0] + rho[2] - a * rho[3]) + (a + b) * (a + b);
    let r_plus = 2.0 * (rho[0] + rho[1] + a * rho[3]) + (a - b) * (a - b);
    if r_minus < 0.0 || r_plus < 0.0 {
        return Err(Error::Domain(format!(
            "negative radicand in Psi: {r_minus} / {r_plus}"
        )));
    }
    Ok(4.0 * a / (2.0 * a + r_minus.sqrt() + r_plus.sqrt()))
}

/// Marginal Laplace transform of one feature; exactly the specialization of
/// Ψ with a single nonzero argument.
pub fn feature_laplace(kind: FeatureKind, p: LawParams, lambda: f64) -> Result<f64> {
    match kind {
        FeatureKind::Zeta | FeatureKind::LPeak | FeatureKind::ZetaMinusL => {
            if lambda < 0.0 {
                return Err(Error::Domain(format!(
                    "lambda must be >= 0 for time features, got {lambda}"
                )));
            }
        }
        FeatureKind::WZeta => {}
    }
    let rho = match kind {
        FeatureKind::Zeta => [lambda, 0.0, 0.0, 0.0],
        FeatureKind::LPeak => [0.0, lambda, 0.0, 0.0],
        FeatureKind::ZetaMinusL => [0.0, 0.0, lambda, 0.0],
        FeatureKind::WZeta => [0.0, 0.0, 0.0, lambda],
    };
    psi_joint_laplace(p, rho)
}

/// Density of the family with Laplace transform 2c/(c + √(2λ + a²)):
/// f(l) = e^{−a²l/2}·(2c/√(2πl) − c²·erfcx(c√(l/2))).
fn two_sided_tail_density(a: f64, c: f64, l: f64) -> f64 {
    let gauss = (-0.5 * a * a * l).exp();
    gauss * (2.0 * c / (2.0 * std::f64::consts::PI * l).sqrt()
        - c * c * erfcx_half(c * l.sqrt()))
}

/// erfcx-based evaluation of 2·exp(x²/2)·Φ̄(x).
fn erfcx_half(x: f64) -> f64 {
    2.0 * normal_sf_scaled(x)
}

/// Closed-form marginal density of ζ (β = 0 only), L, or ζ−L at l > 0.
pub fn feature_density(kind: FeatureKind, p: LawParams, l: f64) -> Result<f64> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidArgument(format!("need l > 0, got {l}")));
    }
    let (a, b) = (p.alpha, p.beta);
    match kind {
        FeatureKind::Zeta => {
            if b != 0.0 {
                return Err(Error::Unsupported(
                    "zeta density for beta != 0: invert the Laplace transform numerically".into(),
                ));
            }
            // Laplace 4α/(2α + 2√(2λ+α²)) = 2α/(α+√(2λ+α²))
            Ok(two_sided_tail_density(a, a, l))
        }
        // Laplace 4α/(3α+β+√(2λ+(α−β)²)) = (2α/c)·2c/(c+√(2λ+a²)), c = 3α+β
        FeatureKind::LPeak => {
            let c = 3.0 * a + b;
            Ok(2.0 * a / c * two_sided_tail_density(a - b, c, l))
        }
        FeatureKind::ZetaMinusL => {
            let c = 3.0 * a - b;
            Ok(2.0 * a / c * two_sided_tail_density(a + b, c, l))
        }
        FeatureKind::WZeta => Err(Error::Unsupported(
            "W_zeta has atoms of sign and no closed density here; use the Laplace transform".into(),
        )),
    }
}

/// Means (E ζ, E L, E(ζ−L), E W_ζ) =
/// (1/(2(α²−β²)), 1/(4α(α−β)), 1/(4α(α+β)), β/(2(α²−β²))).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeans {
    pub zeta: f64,
    pub l_peak: f64,
    pub zeta_minus_l: f64,
    pub w_zeta: f64,
}

pub fn mean_features(p: LawParams) -> FeatureMeans {
    let (a, b) = (p.alpha, p.beta);
    FeatureMeans {
        zeta: 1.0 / (2.0 * (a * a - b * b)),
        l_peak: 1.0 / (4.0 * a * (a - b)),
        zeta_minus_l: 1.0 / (4.0 * a * (a + b)),
        w_zeta: b / (2.0 * (a * a - b * b)),
    }
}

/// Joint density of (τ, γ̂) at (t, x):
/// exp(−(α−β)²t/2 − 2(α+β)x)/√(2πt³) on {0 ≤ x ≤ 2αt}.
pub fn joint_density_tau_gamma(p: LawParams, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("need t > 0, got {t}")));
    }
    let (a, b) = (p.alpha, p.beta);
    if !(0.0..=2.0 * a * t).contains(&x) {
        return Ok(0.0);
    }
    let e = -0.5 * (a - b) * (a - b) * t - 2.0 * (a + b) * x;
    Ok(e.exp() / (2.0 * std::f64::consts::PI * t * t * t).sqrt())
}

/// Density of 𝔗 = inf{t : R_t = 2αt} (the τ marginal):
/// (e^{−(α−β)²t/2} − e^{−(3α+β)²t/2}) / (2(α+β)√(2πt³)).
pub fn density_frak_t(p: LawParams, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("need t > 0, got {t}")));
    }
    let (a, b) = (p.alpha, p.beta);
    // e^{-A} − e^{-B} = −e^{-A}·expm1(−(B − A)), B − A = 4α(α+β)t
    let head = (-0.5 * (a - b) * (a - b) * t).exp();
    let diff = -head * (-4.0 * a * (a + b) * t).exp_m1();
    Ok(diff / (2.0 * (a + b) * (2.0 * std::f64::consts::PI * t * t * t).sqrt()))
}

/// Conditional density of γ̂ given τ = t: the exponential of rate 2(α+β)
/// truncated to [0, 2αt].
pub fn conditional_density_gamma(p: LawParams, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("need t > 0, got {t}")));
    }
    let (a, b) = (p.alpha, p.beta);
    if !(0.0..=2.0 * a * t).contains(&x) {
        return Ok(0.0);
    }
    let r = 2.0 * (a + b);
    Ok(r * (-r * x).exp() / -(-2.0 * r * a * t).exp_m1())
}

/// First-passage law of drift-μ Brownian motion to level y > 0: density
/// y/√(2πt³)·exp(−(y−μt)²/(2t)), Laplace e^{−y(√(2λ+μ²)−μ)}; mean y/μ.
#[derive(Debug, Clone, Copy)]
pub struct HittingTimeLaw {
    pub mu: f64,
    pub y: f64,
}

pub fn hitting_time_law(mu: f64, y: f64) -> Result<HittingTimeLaw> {
    if !(mu > 0.0) || !(y > 0.0) || !mu.is_finite() || !y.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need mu > 0 and y > 0, got mu={mu}, y={y}"
        )));
    }
    Ok(HittingTimeLaw { mu, y })
}

impl HittingTimeLaw {
    pub fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let d = self.y - self.mu * t;
        self.y / (2.0 * std::f64::consts::PI * t * t * t).sqrt() * (-d * d / (2.0 * t)).exp()
    }

    pub fn laplace(&self, lambda: f64) -> Result<f64> {
        let r = 2.0 * lambda + self.mu * self.mu;
        if r < 0.0 {
            return Err(Error::Domain(format!(
                "first-passage Laplace radicand negative at lambda = {lambda}"
            )));
        }
        Ok((-self.y * (r.sqrt() - self.mu)).exp())
    }

    pub fn mean(&self) -> f64 {
        self.y / self.mu
    }

    /// Inverse-Gaussian CDF (analytic), used as a cross-check of the
    /// quadrature tables.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let rt = t.sqrt();
        let a = (self.mu * t - self.y) / rt;
        let b = -(self.mu * t + self.y) / rt;
        crate::special::normal_cdf(a) + (2.0 * self.mu * self.y).exp() * crate::special::normal_cdf(b)
    }
}

/// Density of the Lévy measure (normalized to a probability) of the
/// subordinator whose closed range is the contact set, β = 0:
/// 2α e^{−α²x/2}/√(2πx) − 2α² Φ̄(α√x) — the same expression as the ζ density.
pub fn levy_measure_density(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("need x > 0, got {x}")));
    }
    Ok(two_sided_tail_density(alpha, alpha, x))
}

/// Quadrature residual of ∫₀^∞ (e^{−at} − e^{−bt})/√(2πt³) dt against the
/// closed form √(2b) − √(2a).
pub fn check_integral_identity(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need a, b > 0, got a={a}, b={b}"
        )));
    }
    let f = move |t: f64| {
        // e^{-at} − e^{-bt} = −e^{-at}·expm1(−(b−a)t), stable for a ≈ b
        let diff = -(-a * t).exp() * (-(b - a) * t).exp_m1();
        diff / (2.0 * std::f64::consts::PI * t * t * t).sqrt()
    };
    let value = integrate_density(f, a.min(b), 1e-9)?;
    let closed = (2.0 * b).sqrt() - (2.0 * a).sqrt();
    Ok((value - closed).abs())
}

/// Normalization ∫₀^∞ density of the named feature (β as given), by
/// adaptive quadrature.
pub fn density_normalization(kind: FeatureKind, p: LawParams) -> Result<f64> {
    let decay = match kind {
        FeatureKind::Zeta => 0.5 * (p.alpha - p.beta.abs()).powi(2),
        FeatureKind::LPeak => 0.5 * (p.alpha - p.beta) * (p.alpha - p.beta),
        FeatureKind::ZetaMinusL => 0.5 * (p.alpha + p.beta) * (p.alpha + p.beta),
        FeatureKind::WZeta => {
            return Err(Error::Unsupported("W_zeta has no closed density".into()))
        }
    };
    integrate_density(move |l| feature_density(kind, p, l).unwrap_or(0.0), decay, 1e-9)
}

/// CDF table of a closed-form feature density, for KS references and
/// inverse sampling.
pub fn feature_cdf_table(kind: FeatureKind, p: LawParams, cells: usize) -> Result<CdfTable> {
    let decay = match kind {
        FeatureKind::Zeta => 0.5 * (p.alpha - p.beta.abs()).powi(2),
        FeatureKind::LPeak => 0.5 * (p.alpha - p.beta) * (p.alpha - p.beta),
        FeatureKind::ZetaMinusL => 0.5 * (p.alpha + p.beta) * (p.alpha + p.beta),
        FeatureKind::WZeta => {
            return Err(Error::Unsupported("W_zeta has no closed density".into()))
        }
    };
    CdfTable::build(
        move |l| feature_density(kind, p, l).unwrap_or(0.0),
        decay,
        cells,
        1e-9,
    )
}

/// CDF table of the 𝔗 density.
pub fn frak_t_cdf_table(p: LawParams, cells: usize) -> Result<CdfTable> {
    let decay = 0.5 * (p.alpha - p.beta) * (p.alpha - p.beta);
    CdfTable::build(
        move |t| density_frak_t(p, t).unwrap_or(0.0),
        decay,
        cells,
        1e-9,
    )
}

/// Laplace transform of a density on (0, ∞) by quadrature.
pub fn laplace_by_quadrature<F: Fn(f64) -> f64 + Copy>(
    density: F,
    lambda: f64,
    decay: f64,
) -> Result<f64> {
    integrate_density(move |t| (-lambda * t).exp() * density(t), decay + lambda, 1e-9)
}

/// Closed-form Laplace transform of 1/𝔗 (the last passage time of the
/// time-inverted Bessel construction):
/// e^{−2α√(2μ)}·sinh((α+β)√(2μ)) / ((α+β)√(2μ)).
pub fn inverse_frak_t_laplace_closed(p: LawParams, mu: f64) -> Result<f64> {
    if mu < 0.0 {
        return Err(Error::Domain(format!("need mu >= 0, got {mu}")));
    }
    let (a, b) = (p.alpha, p.beta);
    let s = (2.0 * mu).sqrt();
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok((-2.0 * a * s).exp() * ((a + b) * s).sinh() / ((a + b) * s))
}

/// Quadrature Laplace transform of 1/𝔗 from the 𝔗 density (the
/// time-inversion route), for consistency checks against the closed form.
pub fn inverse_frak_t_laplace_quadrature(p: LawParams, mu: f64) -> Result<f64> {
    // E[e^{−μ/𝔗}] = ∫ e^{−μ/t}·f_𝔗(t) dt; substitute s = 1/t to put the
    // singularity at 0: ∫ e^{−μs}·f_𝔗(1/s)/s² ds
    let f = move |s: f64| {
        let t = 1.0 / s;
        (-mu * s).exp() * density_frak_t(p, t).unwrap_or(0.0) / (s * s)
    };
    let head = crate::quad::integrate_sqrt0(f, 1.0, 5e-10)?;
    let tail = integrate_tail(f, 1.0, 1.0 / (mu + 1.0), 5e-10)?;
    Ok(head + tail)
}

/// Laplace transform of the ζ-marginal via quadrature over the (τ, γ̂)
/// decomposition: E[e^{−λζ}] = ∫∫ e^{−λt}·E[e^{−λT̃_γ̂}|γ̂=x]·f(t,x) dx dt.
/// Independent route used to cross-check Ψ.
pub fn zeta_laplace_from_tau_gamma(p: LawParams, lambda: f64) -> Result<f64> {
    let (a, b) = (p.alpha, p.beta);
    let mu = a + b;
    let fp_rate = (2.0 * lambda + mu * mu).sqrt() - mu;
    let outer = move |t: f64| {
        let inner = integrate(
            |x: f64| {
                (-fp_rate * x).exp() * joint_density_tau_gamma(p, t, x).unwrap_or(0.0)
            },
            0.0,
            2.0 * a * t,
            1e-12,
        )
        .unwrap_or(0.0);
        (-lambda * t).exp() * inner
    };
    integrate_density(outer, 0.5 * (a - b) * (a - b) + lambda, 1e-8)
}
