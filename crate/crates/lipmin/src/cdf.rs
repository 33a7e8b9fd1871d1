//! Cached CDF tables for densities on (0, ∞).
//!
//! KS references and inverse-CDF sampling need many CDF evaluations, so the
//! density is integrated once onto a table and interpolated. Nodes are
//! square-root spaced (uniform in u with x = u²), which both resolves the
//! x^(−1/2) singularity at 0 and concentrates nodes near the origin; one
//! Kronrod panel per cell in the u variable is then accurate to well below
//! the table tolerance. Interpolation is monotone cubic Hermite with the
//! density as the exact slope, Fritsch–Carlson limited; inversion is a cell
//! search plus bisection on the cubic.

use crate::error::{Error, Result};
use crate::quad::{gk15, integrate_tail};

#[derive(Debug, Clone)]
pub struct CdfTable {
    /// Node abscissae, x[0] = 0.
    xs: Vec<f64>,
    /// CDF values at the nodes (not normalized; see `total`).
    ps: Vec<f64>,
    /// Fritsch–Carlson limited slopes (density values at the nodes).
    ds: Vec<f64>,
    total: f64,
}

impl CdfTable {
    /// Tabulate the CDF of `density` on [0, x_max], where x_max is expanded
    /// until the remaining tail mass is below `tail_eps` (estimated with the
    /// given exponential decay rate). `cells` nodes are used.
    pub fn build<F: Fn(f64) -> f64>(
        density: F,
        decay: f64,
        cells: usize,
        tail_eps: f64,
    ) -> Result<Self> {
        if !(decay > 0.0) {
            return Err(Error::InvalidArgument(format!("decay must be > 0, got {decay}")));
        }
        let cells = cells.max(16);

        // expand the upper end until the tail is negligible
        let mut x_max = 4.0 / decay;
        for _ in 0..60 {
            let tail = integrate_tail(&density, x_max, 1.0 / decay, 1e-13)?;
            if tail < tail_eps {
                break;
            }
            x_max *= 2.0;
        }

        let u_max = x_max.sqrt();
        let mut xs = Vec::with_capacity(cells + 1);
        let mut ps = Vec::with_capacity(cells + 1);
        let mut ds = Vec::with_capacity(cells + 1);
        xs.push(0.0);
        ps.push(0.0);
        let mut acc = 0.0;
        // integrate in the u variable: d/du CDF(u²) = 2u·density(u²)
        let g = |u: f64| 2.0 * u * density(u * u);
        for i in 1..=cells {
            let u0 = u_max * (i - 1) as f64 / cells as f64;
            let u1 = u_max * i as f64 / cells as f64;
            let (v, _) = gk15(&g, u0, u1);
            acc += v.max(0.0);
            xs.push(u1 * u1);
            ps.push(acc);
        }
        // exact slopes are the density values; FC-limit them for monotone cubics
        ds.push(0.0); // slope at 0 in x; the value there may be +inf, limited below
        for i in 1..=cells {
            ds.push(density(xs[i]).max(0.0));
        }
        let mut table = CdfTable { xs, ps, ds, total: acc };
        table.limit_slopes();
        Ok(table)
    }

    fn limit_slopes(&mut self) {
        let n = self.xs.len();
        for i in 0..n {
            let left = if i > 0 {
                let h = self.xs[i] - self.xs[i - 1];
                (self.ps[i] - self.ps[i - 1]) / h
            } else {
                f64::INFINITY
            };
            let right = if i + 1 < n {
                let h = self.xs[i + 1] - self.xs[i];
                (self.ps[i + 1] - self.ps[i]) / h
            } else {
                f64::INFINITY
            };
            let cap = 3.0 * left.min(right);
            if !self.ds[i].is_finite() || self.ds[i] > cap {
                self.ds[i] = cap.clamp(0.0, f64::MAX);
            }
        }
    }

    /// Total tabulated mass; within the table tolerance of 1 for a density.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn hermite(&self, cell: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[cell], self.xs[cell + 1]);
        let (p0, p1) = (self.ps[cell], self.ps[cell + 1]);
        let (d0, d1) = (self.ds[cell], self.ds[cell + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        p0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * h * (t3 - 2.0 * t2 + t)
            + p1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * h * (t3 - t2)
    }

    /// CDF at x (clamped to [0, total] and constant outside the table).
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.x_max() {
            return self.total;
        }
        let cell = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ps[i],
            Err(i) => i - 1,
        };
        self.hermite(cell, x).clamp(self.ps[cell], self.ps[cell + 1])
    }

    /// Normalized CDF suitable as a KS reference (divides by the total mass,
    /// which equals 1 up to the tabulation tolerance).
    pub fn cdf_normalized(&self, x: f64) -> f64 {
        (self.cdf(x) / self.total).clamp(0.0, 1.0)
    }

    /// Inverse CDF: the x with cdf(x) = p·total for p in [0, 1).
    /// Bisection on the monotone cubic; absolute tolerance 1e−12·x_max.
    pub fn inverse(&self, p: f64) -> f64 {
        let target = (p.clamp(0.0, 1.0)) * self.total;
        let mut lo_cell = self.ps.partition_point(|&v| v < target);
        if lo_cell == 0 {
            return 0.0;
        }
        if lo_cell >= self.ps.len() {
            lo_cell = self.ps.len() - 1;
        }
        let cell = lo_cell - 1;
        let (mut lo, mut hi) = (self.xs[cell], self.xs[cell + 1]);
        let tol = 1e-12 * self.x_max().max(1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.hermite(cell, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < tol {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_cdf_table() {
        let t = CdfTable::build(|x| (-x).exp(), 1.0, 1024, 1e-12).unwrap();
        assert!((t.total_mass() - 1.0).abs() < 1e-9);
        for &x in &[0.1, 0.5, 1.0, 2.5, 7.0] {
            let want = 1.0 - (-x as f64).exp();
            assert!((t.cdf(x) - want).abs() < 1e-9, "x={x}: {} vs {want}", t.cdf(x));
        }
        for &p in &[0.01, 0.3, 0.5, 0.9, 0.999] {
            let want = -(1.0f64 - p).ln();
            let got = t.inverse(p);
            assert!((got - want).abs() < 1e-7, "p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn sqrt_singularity_table() {
        // density ∝ x^(−1/2) e^{−x}: Gamma(1/2) normalization
        let c = 1.0 / std::f64::consts::PI.sqrt();
        let t = CdfTable::build(move |x| c * (-x).exp() / x.sqrt(), 1.0, 2048, 1e-12).unwrap();
        assert!((t.total_mass() - 1.0).abs() < 1e-8, "{}", t.total_mass());
        // CDF of Gamma(1/2, 1) is erf(√x); its median is erfinv(1/2)²
        let median = 0.22746821155978664; // mpmath
        assert!((t.cdf(median) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn inverse_is_right_inverse() {
        let t = CdfTable::build(|x| (-x).exp(), 1.0, 512, 1e-12).unwrap();
        for i in 1..50 {
            let p = i as f64 / 50.0;
            let x = t.inverse(p);
            assert!((t.cdf_normalized(x) - p).abs() < 1e-9);
        }
    }
}
