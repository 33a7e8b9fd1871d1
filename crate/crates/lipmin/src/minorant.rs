//! The α-Lipschitz minorant: computation, contact set, and recipe times.
//!
//! The minorant of f is the infimal convolution m(t) = inf_s f(s) + α|t−s|.
//! On a grid it splits into a causal part (forward sweep) and an anticausal
//! part (backward sweep), each a running min with per-step allowance α·dt;
//! the minorant is their pointwise min. The sweeps use one floating-point
//! addition of `α·dt` per step, and the reference brute force reproduces the
//! same summation order, so the two agree bit for bit.

use crate::error::{Error, Result};
use crate::paths::{EventPath, GridPath, Path, ProcessSpec};
use serde::{Deserialize, Serialize};

/// Minorant values aligned with the input grid points (or breakpoints),
/// plus the indices where it touches X ∧ X₋ exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinorantResult {
    pub alpha: f64,
    #[serde(rename = "minorant")]
    pub values: Vec<f64>,
    pub contacts: Vec<usize>,
}

/// Contact times around zero: G is the last contact ≤ 0, D the first
/// contact > 0 (only reported when it clears the boundary buffer), S the
/// auxiliary recipe time when the caller computed it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContactTimes {
    pub times: Vec<f64>,
    pub indices: Vec<usize>,
    pub g: Option<f64>,
    pub d: Option<f64>,
    pub s: Option<f64>,
}

/// Whether the α-Lipschitz minorant of the process exists almost surely:
/// E|X₁| < ∞ and |E X₁| < α (boundary excluded).
pub fn check_existence(spec: &ProcessSpec, alpha: f64) -> Result<bool> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
    }
    spec.validate()?;
    Ok(spec.mean_x1()?.abs() < alpha)
}

fn grid_minorant_values(values: &[f64], alpha: f64, dt: f64) -> Vec<f64> {
    let n = values.len();
    let step = alpha * dt;
    let mut fwd = vec![0.0f64; n];
    fwd[0] = values[0];
    for k in 1..n {
        fwd[k] = values[k].min(fwd[k - 1] + step);
    }
    let mut m = vec![0.0f64; n];
    m[n - 1] = values[n - 1];
    for k in (0..n - 1).rev() {
        m[k] = values[k].min(m[k + 1] + step);
    }
    for k in 0..n {
        m[k] = m[k].min(fwd[k]);
    }
    m
}

fn event_minorant_values(path: &EventPath, alpha: f64) -> Result<Vec<f64>> {
    let n = path.segments.len();
    let mut fwd = vec![0.0f64; n];
    // forward: α·t + running inf of f(s) − α·s, left limits included
    let mut c = f64::INFINITY;
    let mut prev_t = path.tmin;
    let mut prev_v = path.v0;
    for (j, b) in path.segments.iter().enumerate() {
        c = c.min(prev_v - alpha * prev_t).min(b.left - alpha * b.t);
        fwd[j] = alpha * b.t + c.min(b.right - alpha * b.t);
        c = c.min(b.right - alpha * b.t);
        prev_t = b.t;
        prev_v = b.right;
    }
    // backward: −α·t + running inf of f(s) + α·s over s ≥ t
    let mut m = vec![0.0f64; n];
    let mut c = f64::INFINITY;
    let mut next_t = path.tmax;
    let mut next_v = path.value(path.tmax)?;
    for (j, b) in path.segments.iter().enumerate().rev() {
        c = c.min(next_v + alpha * next_t).min(b.right + alpha * b.t);
        m[j] = (-alpha * b.t + c).min(fwd[j]);
        next_t = b.t;
        next_v = b.left;
    }
    Ok(m)
}

/// Compute the α-Lipschitz minorant of the path restricted to its window.
///
/// The `contacts` field holds the exact contact indices (tolerance 0);
/// [`extract_contact_set`] re-derives them at a caller-chosen tolerance.
pub fn compute_minorant(path: &Path, alpha: f64) -> Result<MinorantResult> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
    }
    path.validate()?;
    let values = match path {
        Path::Grid(g) => grid_minorant_values(&g.values, alpha, g.dt),
        Path::Event(e) => event_minorant_values(e, alpha)?,
    };
    let contacts = contact_indices(path, &values, 0.0);
    Ok(MinorantResult { alpha, values, contacts })
}

fn contact_indices(path: &Path, minorant: &[f64], tol: f64) -> Vec<usize> {
    match path {
        Path::Grid(g) => (0..g.values.len())
            .filter(|&k| g.values[k] - minorant[k] <= tol)
            .collect(),
        Path::Event(e) => (0..e.segments.len())
            .filter(|&j| e.segments[j].min_left() - minorant[j] <= tol)
            .collect(),
    }
}

fn index_time(path: &Path, k: usize) -> f64 {
    match path {
        Path::Grid(g) => g.time(k),
        Path::Event(e) => e.segments[k].t,
    }
}

/// List the contact set 𝒵 ∩ window at tolerance `tol`, and derive G and D.
///
/// D is reported only when it lies at least `buffer` inside the right window
/// edge; excursion consumers discard material closer to the edge because the
/// window-restricted minorant differs from the global one there.
pub fn extract_contact_set(
    path: &Path,
    minorant: &MinorantResult,
    tol: f64,
    buffer: f64,
) -> Result<ContactTimes> {
    if tol < 0.0 {
        return Err(Error::InvalidArgument(format!("tol must be >= 0, got {tol}")));
    }
    let indices = contact_indices(path, &minorant.values, tol);
    if indices.is_empty() {
        return Err(Error::WindowTooSmall(
            "no contact point inside the window".into(),
        ));
    }
    let times: Vec<f64> = indices.iter().map(|&k| index_time(path, k)).collect();
    let (_, tmax) = path.window();
    let g = times.iter().rev().find(|&&t| t <= 0.0).copied();
    let d = times
        .iter()
        .find(|&&t| t > 0.0 && tmax - t >= buffer)
        .copied();
    Ok(ContactTimes { times, indices, g, d, s: None })
}

/// Scale-aware default contact tolerance for Brownian grids: the path moves
/// O(σ√dt) per step, so exact touching of the continuum minorant is not
/// observable; c·σ·√dt with c = 0.5 flags grid points within sampling noise
/// of a contact. Event paths are exact, so their default is 0.
pub fn default_contact_tol(spec: &ProcessSpec, dt: f64) -> f64 {
    match spec {
        ProcessSpec::BrownianWithDrift { sigma, .. } => 0.5 * sigma * dt.sqrt(),
        ProcessSpec::CompoundPoissonDrift { .. } => 0.0,
    }
}

/// The recipe times (S, D) of the minorant construction:
/// S = inf{t > 0 : X_t ∧ X_{t−} − αt ≤ inf_{u≤0}(X_u − αu)} and D the first
/// time ≥ S where X ∧ X₋ + αt attains its infimum over [S, ∞), both read off
/// the window.
///
/// `left_margin` guards the truncation of inf over (−∞, 0]: the attained
/// argmin must be at least that far from the left window edge.
pub fn recipe_times(path: &GridPath, alpha: f64, left_margin: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
    }
    path.validate()?;
    let n = path.len();

    // infimum of X_u − αu over grid points u ≤ 0 (ties: earliest)
    let mut inf_left = f64::INFINITY;
    let mut arg_left = None;
    for k in 0..n {
        let t = path.time(k);
        if t > 1e-12 {
            break;
        }
        let v = path.values[k] - alpha * t;
        if v < inf_left {
            inf_left = v;
            arg_left = Some(k);
        }
    }
    let arg_left = arg_left.ok_or_else(|| {
        Error::WindowTooSmall("window has no grid points at or before 0".into())
    })?;
    if path.time(arg_left) - path.t0 < left_margin {
        return Err(Error::TruncationUnsafe(format!(
            "argmin of X_u − αu at t = {} is within {} of the left window edge",
            path.time(arg_left),
            left_margin
        )));
    }

    // S: first positive grid time where X_t − αt drops to the left infimum
    let mut ks = None;
    for k in 0..n {
        let t = path.time(k);
        if t <= 1e-12 {
            continue;
        }
        if path.values[k] - alpha * t <= inf_left {
            ks = Some(k);
            break;
        }
    }
    let ks = ks.ok_or_else(|| {
        Error::WindowTooSmall("S not attained inside the window; extend to the right".into())
    })?;

    // D: argmin of X_t + αt over [S, tmax] (ties: smallest t)
    let mut best = f64::INFINITY;
    let mut kd = ks;
    for k in ks..n {
        let v = path.values[k] + alpha * path.time(k);
        if v < best {
            best = v;
            kd = k;
        }
    }
    if kd == n - 1 {
        return Err(Error::TruncationUnsafe(
            "argmin of X_t + αt sits on the right window edge".into(),
        ));
    }
    Ok((path.time(ks), path.time(kd)))
}

/// The sawtooth piece of the minorant between two consecutive contacts:
/// rises at slope α from (t_l, v_l), peaks at t*, falls at −α into (t_r, v_r).
#[derive(Debug, Clone, Copy)]
pub struct Sawtooth {
    pub t_l: f64,
    pub v_l: f64,
    pub t_r: f64,
    pub v_r: f64,
    pub alpha: f64,
    pub t_star: f64,
    pub peak: f64,
}

impl Sawtooth {
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.t_star {
            self.v_l + self.alpha * (t - self.t_l)
        } else {
            self.v_r + self.alpha * (self.t_r - t)
        }
    }
}

/// Build the sawtooth between contacts (t_l, v_l) and (t_r, v_r):
/// t* = (v_r − v_l + α(t_r + t_l)) / (2α).
pub fn sawtooth_segment(t_l: f64, v_l: f64, t_r: f64, v_r: f64, alpha: f64) -> Result<Sawtooth> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
    }
    if !(t_l < t_r) {
        return Err(Error::InvalidArgument(format!(
            "need t_l < t_r, got {t_l} >= {t_r}"
        )));
    }
    let span = alpha * (t_r - t_l);
    if (v_r - v_l).abs() > span * (1.0 + 1e-12) + 1e-300 {
        return Err(Error::InvalidArgument(format!(
            "invalid contact pair: |{v_r} - {v_l}| exceeds α·(t_r - t_l) = {span}"
        )));
    }
    let t_star = (v_r - v_l + alpha * (t_r + t_l)) / (2.0 * alpha);
    let peak = v_l + alpha * (t_star - t_l);
    Ok(Sawtooth { t_l, v_l, t_r, v_r, alpha, t_star, peak })
}

/// Reference implementations used by the verification suite.
pub mod reference {
    /// O(n²) infimal convolution on the grid, with the same floating-point
    /// summation order as the sweeps (distances accumulate one α·dt addition
    /// per step outward from each source point), so equality is exact.
    pub fn brute_force_minorant(values: &[f64], alpha: f64, dt: f64) -> Vec<f64> {
        let n = values.len();
        let step = alpha * dt;
        let mut m = values.to_vec();
        for s in 0..n {
            let mut acc = values[s];
            for k in (s + 1)..n {
                acc += step;
                if acc < m[k] {
                    m[k] = acc;
                }
            }
            let mut acc = values[s];
            for k in (0..s).rev() {
                acc += step;
                if acc < m[k] {
                    m[k] = acc;
                }
            }
        }
        m
    }
}
