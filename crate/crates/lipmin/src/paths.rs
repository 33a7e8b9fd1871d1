//! Path representations and process simulators.
//!
//! Two-sided paths are anchored at zero: simulators always place t = 0 on
//! the grid (or among the event times) with value exactly 0, and window
//! endpoints are snapped outward so the requested window is covered.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Uniformly sampled path: value k is X(t0 + k·dt).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPath {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl GridPath {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        let p = GridPath { t0, dt, values };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("grid path has no values".into()));
        }
        if !self.t0.is_finite() || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite value in grid path".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn tmax(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t0, self.tmax())
    }

    /// Index of the grid point nearest to `t`.
    pub fn index_nearest(&self, t: f64) -> Result<usize> {
        let (lo, hi) = self.window();
        if t < lo - 0.5 * self.dt || t > hi + 0.5 * self.dt {
            return Err(Error::OutsideWindow { t, tmin: lo, tmax: hi });
        }
        let k = ((t - self.t0) / self.dt).round();
        Ok((k.max(0.0) as usize).min(self.values.len() - 1))
    }

    /// Index of the grid point at exactly t = 0 (simulator anchoring).
    pub fn index_of_zero(&self) -> Option<usize> {
        let k = (-self.t0 / self.dt).round();
        if k < 0.0 || k as usize >= self.values.len() {
            return None;
        }
        let k = k as usize;
        (self.time(k).abs() < 0.5 * self.dt).then_some(k)
    }
}

/// A breakpoint of an event-based path: left limit and right value at `t`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Breakpoint {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

impl Breakpoint {
    pub fn jump(&self) -> f64 {
        self.right - self.left
    }

    pub fn min_left(&self) -> f64 {
        self.left.min(self.right)
    }
}

/// Piecewise-affine path with jumps: affine with slope `slope` between
/// breakpoints, value `v0` at the left window edge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventPath {
    pub tmin: f64,
    pub tmax: f64,
    pub slope: f64,
    pub v0: f64,
    pub segments: Vec<Breakpoint>,
}

impl EventPath {
    pub fn new(tmin: f64, tmax: f64, slope: f64, v0: f64, segments: Vec<Breakpoint>) -> Result<Self> {
        let p = EventPath { tmin, tmax, slope, v0, segments };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tmin.is_finite() && self.tmax.is_finite() && self.tmin <= self.tmax) {
            return Err(Error::InvalidArgument(format!(
                "bad window [{}, {}]",
                self.tmin, self.tmax
            )));
        }
        if !self.slope.is_finite() || !self.v0.is_finite() {
            return Err(Error::InvalidArgument("non-finite slope or anchor".into()));
        }
        let mut prev_t = self.tmin;
        let mut prev_v = self.v0;
        for b in &self.segments {
            if !(b.t.is_finite() && b.left.is_finite() && b.right.is_finite()) {
                return Err(Error::InvalidArgument("non-finite breakpoint".into()));
            }
            if b.t <= prev_t {
                return Err(Error::InvalidArgument(format!(
                    "breakpoint times must be strictly increasing inside the window at t = {}",
                    b.t
                )));
            }
            if b.t > self.tmax {
                return Err(Error::InvalidArgument(format!(
                    "breakpoint {} outside window",
                    b.t
                )));
            }
            // left limit must continue the affine piece from the previous breakpoint
            let expect_left = prev_v + self.slope * (b.t - prev_t);
            let scale = 1.0 + expect_left.abs().max(b.left.abs());
            if (b.left - expect_left).abs() > 1e-9 * scale {
                return Err(Error::InvalidArgument(format!(
                    "breakpoint at t = {} has left value {} but the affine piece gives {}",
                    b.t, b.left, expect_left
                )));
            }
            prev_t = b.t;
            prev_v = b.right;
        }
        Ok(())
    }

    pub fn window(&self) -> (f64, f64) {
        (self.tmin, self.tmax)
    }

    fn check_window(&self, t: f64) -> Result<()> {
        if t < self.tmin - 1e-12 || t > self.tmax + 1e-12 {
            return Err(Error::OutsideWindow { t, tmin: self.tmin, tmax: self.tmax });
        }
        Ok(())
    }

    /// Càdlàg value X(t).
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_window(t)?;
        // last breakpoint with time <= t
        let idx = self.segments.partition_point(|b| b.t <= t);
        if idx == 0 {
            return Ok(self.v0 + self.slope * (t - self.tmin));
        }
        let b = &self.segments[idx - 1];
        Ok(b.right + self.slope * (t - b.t))
    }

    /// X(t) ∧ X(t−): differs from `value` only at breakpoints.
    pub fn min_left(&self, t: f64) -> Result<f64> {
        self.check_window(t)?;
        for b in &self.segments {
            if (b.t - t).abs() <= 1e-12 * (1.0 + t.abs()) {
                return Ok(b.min_left());
            }
        }
        self.value(t)
    }
}

/// Either path representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Path {
    Grid(GridPath),
    Event(EventPath),
}

impl Path {
    pub fn validate(&self) -> Result<()> {
        match self {
            Path::Grid(g) => g.validate(),
            Path::Event(e) => e.validate(),
        }
    }

    pub fn window(&self) -> (f64, f64) {
        match self {
            Path::Grid(g) => g.window(),
            Path::Event(e) => e.window(),
        }
    }
}

/// Parse a path from its JSON form, validating invariants.
pub fn parse_path_json(s: &str) -> Result<Path> {
    let p: Path = serde_json::from_str(s)?;
    p.validate()?;
    Ok(p)
}

pub fn path_to_json(p: &Path) -> Result<String> {
    Ok(serde_json::to_string_pretty(p)?)
}

/// X(t) ∧ X(t−) for either representation. For grid paths this is the grid
/// value at the nearest point (continuous-path convention).
pub fn path_value_min_left(path: &Path, t: f64) -> Result<f64> {
    match path {
        Path::Grid(g) => {
            let (lo, hi) = g.window();
            if t < lo - 1e-12 || t > hi + 1e-12 {
                return Err(Error::OutsideWindow { t, tmin: lo, tmax: hi });
            }
            Ok(g.values[g.index_nearest(t)?])
        }
        Path::Event(e) => e.min_left(t),
    }
}

/// Write a plot-ready CSV with columns (t, x).
pub fn path_to_csv<W: Write>(path: &Path, mut w: W) -> Result<()> {
    writeln!(w, "t,x")?;
    match path {
        Path::Grid(g) => {
            for (k, v) in g.values.iter().enumerate() {
                writeln!(w, "{},{}", g.time(k), v)?;
            }
        }
        Path::Event(e) => {
            writeln!(w, "{},{}", e.tmin, e.v0)?;
            for b in &e.segments {
                writeln!(w, "{},{}", b.t, b.left)?;
                writeln!(w, "{},{}", b.t, b.right)?;
            }
            let (_, tmax) = e.window();
            let last = e.value(tmax)?;
            writeln!(w, "{},{}", tmax, last)?;
        }
    }
    Ok(())
}

/// Jump-size law of a compound Poisson process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpLaw {
    Constant { value: f64 },
    Exponential { rate: f64 },
    Normal { mean: f64, sd: f64 },
    /// Heavy-tailed law without a finite mean; the minorant existence
    /// criterion is undecidable for it.
    Cauchy { median: f64, scale: f64 },
}

impl JumpLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            JumpLaw::Constant { value } => value.is_finite(),
            JumpLaw::Exponential { rate } => *rate > 0.0 && rate.is_finite(),
            JumpLaw::Normal { mean, sd } => mean.is_finite() && *sd > 0.0 && sd.is_finite(),
            JumpLaw::Cauchy { median, scale } => median.is_finite() && *scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad jump law {self:?}")))
        }
    }

    /// Mean jump size, if the law has one.
    pub fn mean(&self) -> Option<f64> {
        match self {
            JumpLaw::Constant { value } => Some(*value),
            JumpLaw::Exponential { rate } => Some(1.0 / rate),
            JumpLaw::Normal { mean, .. } => Some(*mean),
            JumpLaw::Cauchy { .. } => None,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            JumpLaw::Constant { value } => *value,
            JumpLaw::Exponential { rate } => Exp::new(*rate).unwrap().sample(rng),
            JumpLaw::Normal { mean, sd } => Normal::new(*mean, *sd).unwrap().sample(rng),
            JumpLaw::Cauchy { median, scale } => {
                let u: f64 = rng.gen::<f64>() - 0.5;
                median + scale * (std::f64::consts::PI * u).tan()
            }
        }
    }
}

/// Which Lévy process to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum ProcessSpec {
    BrownianWithDrift { beta: f64, sigma: f64 },
    CompoundPoissonDrift { drift: f64, rate: f64, jumps: JumpLaw },
}

impl ProcessSpec {
    pub fn brownian(beta: f64) -> Self {
        ProcessSpec::BrownianWithDrift { beta, sigma: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::BrownianWithDrift { beta, sigma } => {
                if !(*sigma > 0.0) || !sigma.is_finite() || !beta.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "brownian spec needs finite beta and sigma > 0, got beta={beta}, sigma={sigma}"
                    )));
                }
                Ok(())
            }
            ProcessSpec::CompoundPoissonDrift { drift, rate, jumps } => {
                if !(*rate > 0.0) || !rate.is_finite() || !drift.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "compound poisson spec needs finite drift and rate > 0, got drift={drift}, rate={rate}"
                    )));
                }
                jumps.validate()
            }
        }
    }

    /// E[X₁], if it exists.
    pub fn mean_x1(&self) -> Result<f64> {
        match self {
            ProcessSpec::BrownianWithDrift { beta, .. } => Ok(*beta),
            ProcessSpec::CompoundPoissonDrift { drift, rate, jumps } => match jumps.mean() {
                Some(m) => Ok(drift + rate * m),
                None => Err(Error::ExistenceUndecidable(format!(
                    "jump law {jumps:?} has no finite mean"
                ))),
            },
        }
    }
}

fn check_window(tmin: f64, tmax: f64) -> Result<()> {
    if !(tmin <= 0.0 && 0.0 <= tmax) || !tmin.is_finite() || !tmax.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "window [{tmin}, {tmax}] must contain 0"
        )));
    }
    Ok(())
}

/// Simulate two-sided Brownian motion with drift on a grid covering
/// [tmin, tmax], anchored at X(0) = 0.
///
/// Forward and backward halves are glued at 0 from independent substreams:
/// forward increments are Normal(β·dt, σ²·dt) and the backward half makes
/// (X₋ₜ)ₜ a Brownian motion with drift −β.
pub fn simulate_brownian_two_sided(
    spec: &ProcessSpec,
    tmin: f64,
    tmax: f64,
    dt: f64,
    stream: RngStream,
) -> Result<GridPath> {
    let (beta, sigma) = match spec {
        ProcessSpec::BrownianWithDrift { beta, sigma } => (*beta, *sigma),
        other => {
            return Err(Error::InvalidArgument(format!(
                "expected a Brownian spec, got {other:?}"
            )))
        }
    };
    spec.validate()?;
    check_window(tmin, tmax)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }

    // snap the window outward so 0 is a grid point
    let n_back = ((-tmin) / dt - 1e-9).ceil().max(0.0) as usize;
    let n_fwd = (tmax / dt - 1e-9).ceil().max(0.0) as usize;
    let mut values = vec![0.0f64; n_back + n_fwd + 1];

    let mean = beta * dt;
    let sd = sigma * dt.sqrt();

    let mut fw = stream.substream(0).rng();
    for k in 0..n_fwd {
        let z: f64 = StandardNormal.sample(&mut fw);
        values[n_back + k + 1] = values[n_back + k] + mean + sd * z;
    }
    let mut bw = stream.substream(1).rng();
    for j in 0..n_back {
        let z: f64 = StandardNormal.sample(&mut bw);
        values[n_back - j - 1] = values[n_back - j] - mean + sd * z;
    }

    GridPath::new(-(n_back as f64) * dt, dt, values)
}

/// Simulate a compound Poisson process with drift, exactly (event-based).
pub fn simulate_compound_poisson(
    spec: &ProcessSpec,
    tmin: f64,
    tmax: f64,
    stream: RngStream,
) -> Result<EventPath> {
    let (drift, rate, jumps) = match spec {
        ProcessSpec::CompoundPoissonDrift { drift, rate, jumps } => (*drift, *rate, *jumps),
        other => {
            return Err(Error::InvalidArgument(format!(
                "expected a compound Poisson spec, got {other:?}"
            )))
        }
    };
    spec.validate()?;
    check_window(tmin, tmax)?;

    // forward jumps on (0, tmax]
    let mut events: Vec<(f64, f64)> = Vec::new();
    {
        let mut rng = stream.substream(0).rng();
        let gap = Exp::new(rate).unwrap();
        let mut t = 0.0;
        loop {
            t += gap.sample(&mut rng);
            if t > tmax {
                break;
            }
            events.push((t, jumps.sample(&mut rng)));
        }
    }
    // backward jumps on (tmin, 0)
    {
        let mut rng = stream.substream(1).rng();
        let gap = Exp::new(rate).unwrap();
        let mut t = 0.0;
        loop {
            t -= gap.sample(&mut rng);
            if t <= tmin {
                break;
            }
            events.push((t, jumps.sample(&mut rng)));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    // X(t) = drift·t + sum of jumps in (0, t] (negative t: minus jumps in (t, 0])
    let mut segments = Vec::with_capacity(events.len());
    let neg_jump_total: f64 = events.iter().filter(|(t, _)| *t < 0.0).map(|(_, j)| j).sum();
    let mut acc = -neg_jump_total; // cumulative jump sum just after tmin
    for (t, j) in &events {
        let left = drift * t + acc;
        acc += j;
        segments.push(Breakpoint { t: *t, left, right: drift * t + acc });
    }
    let v0 = drift * tmin - neg_jump_total;
    EventPath::new(tmin, tmax, drift, v0, segments)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(beta: f64) -> ProcessSpec {
        ProcessSpec::brownian(beta)
    }

    #[test]
    fn degenerate_window_gives_single_zero() {
        let p = simulate_brownian_two_sided(&bm(0.0), 0.0, 0.0, 1.0, RngStream::new(1, 0)).unwrap();
        assert_eq!(p.values, vec![0.0]);
        assert_eq!(p.t0, 0.0);
    }

    #[test]
    fn anchored_at_zero_and_window_covered() {
        let p =
            simulate_brownian_two_sided(&bm(0.3), -1.05, 2.34, 0.1, RngStream::new(9, 4)).unwrap();
        let k0 = p.index_of_zero().unwrap();
        assert_eq!(p.values[k0], 0.0);
        assert!(p.t0 <= -1.05 + 1e-12 && p.tmax() >= 2.34 - 1e-12);
    }

    #[test]
    fn reproducible_and_stream_sensitive() {
        let a = simulate_brownian_two_sided(&bm(0.5), -2.0, 2.0, 0.01, RngStream::new(3, 7)).unwrap();
        let b = simulate_brownian_two_sided(&bm(0.5), -2.0, 2.0, 0.01, RngStream::new(3, 7)).unwrap();
        assert_eq!(a.values, b.values);
        let c = simulate_brownian_two_sided(&bm(0.5), -2.0, 2.0, 0.01, RngStream::new(3, 8)).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn forward_mean_matches_drift() {
        // E X_1 = beta; 1e4 replicates, coarse grid so each path is cheap.
        let beta = 0.5;
        let n = 10_000;
        let base = RngStream::new(42, 0);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..n {
            let p = simulate_brownian_two_sided(&bm(beta), 0.0, 1.0, 1e-3, base.replicate(i))
                .unwrap();
            let x1 = *p.values.last().unwrap();
            sum += x1;
            sumsq += x1 * x1;
        }
        let mean = sum / n as f64;
        assert!((mean - beta).abs() < 3.0 / 100.0, "mean {mean}");
        let var = sumsq / n as f64 - mean * mean;
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn window_errors() {
        assert!(simulate_brownian_two_sided(&bm(0.0), 0.5, 1.0, 0.1, RngStream::new(0, 0)).is_err());
        assert!(simulate_brownian_two_sided(&bm(0.0), -1.0, 1.0, 0.0, RngStream::new(0, 0)).is_err());
        let cpp = ProcessSpec::CompoundPoissonDrift {
            drift: 0.0,
            rate: -1.0,
            jumps: JumpLaw::Constant { value: 1.0 },
        };
        assert!(simulate_compound_poisson(&cpp, -1.0, 1.0, RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn cpp_no_events_on_degenerate_window() {
        let spec = ProcessSpec::CompoundPoissonDrift {
            drift: 1.0,
            rate: 2.0,
            jumps: JumpLaw::Constant { value: -1.0 },
        };
        let p = simulate_compound_poisson(&spec, 0.0, 0.0, RngStream::new(1, 1)).unwrap();
        assert!(p.segments.is_empty());
        assert_eq!(p.value(0.0).unwrap(), 0.0);
    }

    #[test]
    fn cpp_event_count_and_compensation() {
        let spec = ProcessSpec::CompoundPoissonDrift {
            drift: 0.0,
            rate: 2.0,
            jumps: JumpLaw::Constant { value: 1.0 },
        };
        let base = RngStream::new(11, 0);
        let n = 10_000;
        let mut count_sum = 0.0;
        for i in 0..n {
            let p = simulate_compound_poisson(&spec, 0.0, 10.0, base.replicate(i)).unwrap();
            count_sum += p.segments.len() as f64;
        }
        let mean_count = count_sum / n as f64;
        // Poisson(20): 3 sigma band is 3*sqrt(20)/100
        assert!((mean_count - 20.0).abs() < 3.0 * 20.0f64.sqrt() / 100.0, "{mean_count}");

        // d=1, rate=1, jumps = -1: E X_t = 0
        let comp = ProcessSpec::CompoundPoissonDrift {
            drift: 1.0,
            rate: 1.0,
            jumps: JumpLaw::Constant { value: -1.0 },
        };
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..n {
            let p = simulate_compound_poisson(&comp, 0.0, 5.0, base.replicate(n + i)).unwrap();
            let x = p.value(5.0).unwrap();
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let se = ((sumsq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!(mean.abs() < 3.0 * se + 1e-9, "mean {mean}, se {se}");
    }

    #[test]
    fn cpp_path_value_at_zero_is_zero_and_cadlag() {
        let spec = ProcessSpec::CompoundPoissonDrift {
            drift: 0.7,
            rate: 3.0,
            jumps: JumpLaw::Normal { mean: 0.0, sd: 1.0 },
        };
        let p = simulate_compound_poisson(&spec, -5.0, 5.0, RngStream::new(5, 2)).unwrap();
        assert!(p.value(0.0).unwrap().abs() < 1e-9);
        p.validate().unwrap();
        // breakpoint jump identity
        for b in &p.segments {
            assert!((b.right - b.left - b.jump()).abs() < 1e-12);
        }
    }

    #[test]
    fn min_left_at_breakpoints() {
        let seg = vec![Breakpoint { t: 1.0, left: 2.0, right: 0.0 }];
        let p = EventPath::new(0.0, 2.0, 2.0, 0.0, seg).unwrap();
        assert_eq!(p.min_left(1.0).unwrap(), 0.0);
        let seg = vec![Breakpoint { t: 1.0, left: 0.0, right: 2.0 }];
        let p = EventPath::new(0.0, 2.0, 0.0, 0.0, seg).unwrap();
        assert_eq!(p.min_left(1.0).unwrap(), 0.0);
        assert!(p.min_left(5.0).is_err());
    }

    #[test]
    fn grid_min_left_is_grid_value() {
        let g = GridPath::new(-1.0, 0.5, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let p = Path::Grid(g);
        assert_eq!(path_value_min_left(&p, 0.0).unwrap(), 3.0);
        assert!(path_value_min_left(&p, 2.0).is_err());
    }

    #[test]
    fn existence_mean() {
        assert_eq!(bm(0.5).mean_x1().unwrap(), 0.5);
        let cpp = ProcessSpec::CompoundPoissonDrift {
            drift: 0.0,
            rate: 1.0,
            jumps: JumpLaw::Constant { value: 0.3 },
        };
        assert!((cpp.mean_x1().unwrap() - 0.3).abs() < 1e-15);
        let heavy = ProcessSpec::CompoundPoissonDrift {
            drift: 0.0,
            rate: 1.0,
            jumps: JumpLaw::Cauchy { median: 0.0, scale: 1.0 },
        };
        assert!(matches!(heavy.mean_x1(), Err(Error::ExistenceUndecidable(_))));
    }

    #[test]
    fn json_round_trip() {
        let g = GridPath::new(-1.0, 0.5, vec![0.0, 1.0, 0.5]).unwrap();
        let s = path_to_json(&Path::Grid(g)).unwrap();
        let p = parse_path_json(&s).unwrap();
        assert!(matches!(p, Path::Grid(_)));

        let e = EventPath::new(
            -1.0,
            2.0,
            0.5,
            -0.5,
            vec![Breakpoint { t: 0.5, left: 0.25, right: 1.25 }],
        )
        .unwrap();
        let s = path_to_json(&Path::Event(e)).unwrap();
        let p = parse_path_json(&s).unwrap();
        assert!(matches!(p, Path::Event(_)));
    }
}
