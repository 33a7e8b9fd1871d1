//! Slicing paths into excursions away from the contact set.
//!
//! Between consecutive contact times the path sits strictly above its
//! sawtooth minorant; rebasing each slice at its left contact gives the
//! excursion. Excursions whose left endpoint is at or after D are the
//! "generic" ones (iid); the slice between G and D is the straddling
//! excursion, size-biased by its length.

use crate::error::{Error, Result};
use crate::minorant::{sawtooth_segment, ContactTimes};
use crate::paths::GridPath;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// One excursion: the path slice between two consecutive contact times,
/// rebased so the first value is 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Excursion {
    /// Left contact time T_n in the original path's clock.
    pub start: f64,
    /// Grid spacing of `samples`.
    pub dt: f64,
    /// Rebased values X(T_n + k·dt) − X(T_n); first entry is 0.
    pub samples: Vec<f64>,
    /// Lifetime ζ = T_{n+1} − T_n.
    pub zeta: f64,
}

/// Scalar features of an excursion and its sawtooth minorant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExcursionFeatures {
    /// Lifetime ζ.
    pub zeta: f64,
    /// Time L of the sawtooth peak, from the tent-apex formula.
    pub l_peak: f64,
    /// ζ − L; equals (αζ − W_ζ)/(2α) exactly.
    pub zeta_minus_l: f64,
    /// Final value W_ζ of the excursion.
    pub w_zeta: f64,
    /// Gap between the path and the sawtooth peak at (the grid point
    /// nearest to) L; discretization bias O(√dt).
    pub h: f64,
}

/// Cut the path into generic excursions: one per consecutive pair of
/// contact times starting at or after D, ending at least `buffer` before
/// the right window edge.
///
/// Returns the excursions in time order, plus a flag that is true when the
/// contact list was too thin to produce any (fewer than 2 usable contacts).
pub fn extract_generic_excursions(
    path: &GridPath,
    contacts: &ContactTimes,
    buffer: f64,
) -> Result<(Vec<Excursion>, bool)> {
    path.validate()?;
    if contacts.indices.len() < 2 {
        return Ok((Vec::new(), true));
    }
    let d = match contacts.d {
        Some(d) => d,
        None => return Ok((Vec::new(), true)),
    };
    let tmax = path.tmax();
    let mut out = Vec::new();
    for w in contacts.indices.windows(2) {
        let (k0, k1) = (w[0], w[1]);
        let t0 = path.time(k0);
        let t1 = path.time(k1);
        if t0 < d - 0.5 * path.dt || tmax - t1 < buffer {
            continue;
        }
        let base = path.values[k0];
        let samples: Vec<f64> = path.values[k0..=k1].iter().map(|v| v - base).collect();
        out.push(Excursion {
            start: t0,
            dt: path.dt,
            samples,
            zeta: (k1 - k0) as f64 * path.dt,
        });
    }
    let warn = out.is_empty();
    Ok((out, warn))
}

/// The excursion straddling time zero: the slice between G and D, rebased
/// at G. Returns (G, D, excursion).
pub fn straddling_excursion(
    path: &GridPath,
    contacts: &ContactTimes,
) -> Result<(f64, f64, Excursion)> {
    let g = contacts.g.ok_or_else(|| {
        Error::WindowTooSmall("no contact at or before 0 inside the window".into())
    })?;
    let d = contacts.d.ok_or_else(|| {
        Error::WindowTooSmall("no buffered contact after 0 inside the window".into())
    })?;
    let kg = path.index_nearest(g)?;
    let kd = path.index_nearest(d)?;
    if kd <= kg {
        return Err(Error::WindowTooSmall(format!(
            "degenerate straddling interval [{g}, {d}]"
        )));
    }
    let base = path.values[kg];
    let samples: Vec<f64> = path.values[kg..=kd].iter().map(|v| v - base).collect();
    let exc = Excursion {
        start: g,
        dt: path.dt,
        samples,
        zeta: (kd - kg) as f64 * path.dt,
    };
    Ok((g, d, exc))
}

/// Features of an extracted excursion. L comes from the sawtooth apex
/// formula applied to the rebased endpoints (exact given the contacts);
/// H is measured at the grid point nearest L.
pub fn excursion_features(exc: &Excursion, alpha: f64) -> Result<ExcursionFeatures> {
    if exc.samples.len() < 2 {
        return Err(Error::CorruptExcursion(format!(
            "excursion needs at least 2 samples, got {}",
            exc.samples.len()
        )));
    }
    let zeta = exc.zeta;
    let w_zeta = *exc.samples.last().unwrap();
    if w_zeta.abs() > alpha * zeta * (1.0 + 1e-9) {
        return Err(Error::CorruptExcursion(format!(
            "|W_ζ| = {} exceeds α·ζ = {}",
            w_zeta.abs(),
            alpha * zeta
        )));
    }
    let saw = sawtooth_segment(0.0, 0.0, zeta, w_zeta, alpha)?;
    let l_peak = saw.t_star;
    let zeta_minus_l = (alpha * zeta - w_zeta) / (2.0 * alpha);
    let k = ((l_peak / exc.dt).round() as usize).min(exc.samples.len() - 1);
    let h = exc.samples[k] - saw.peak;
    Ok(ExcursionFeatures { zeta, l_peak, zeta_minus_l, w_zeta, h })
}

/// Write excursion features as CSV rows (start, zeta, L, w_zeta, h).
pub fn features_to_csv<W: Write>(rows: &[(f64, ExcursionFeatures)], mut w: W) -> Result<()> {
    writeln!(w, "start,zeta,L,w_zeta,h")?;
    for (start, f) in rows {
        writeln!(w, "{},{},{},{},{}", start, f.zeta, f.l_peak, f.w_zeta, f.h)?;
    }
    Ok(())
}
