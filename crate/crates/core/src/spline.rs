//! Clamped cubic splines in Hermite form.
//!
//! On `[z_n, z_{n+1}]` with `h = z_{n+1} - z_n` and `t = (z - z_n)/h` the
//! segment is
//!
//! ```text
//! S(z) = r_n (1 - 3t^2 + 2t^3) + r_{n+1} (3t^2 - 2t^3)
//!      + h d_n t (1 - t)^2 + h d_{n+1} t^2 (t - 1)
//! ```
//!
//! so values and slopes are continuous by construction and C2 continuity at
//! the interior nodes is the tridiagonal condition
//!
//! ```text
//! h_n d_{n-1} + 2 (h_{n-1} + h_n) d_n + h_{n-1} d_{n+1}
//!     = 3 (h_n delta_{n-1} + h_{n-1} delta_n),   delta_n = (r_{n+1} - r_n) / h_n
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

/// Slack allowed when evaluating just outside the node range.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClampedSpline {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

/// `n + 1` equally spaced nodes on `[0, 1]`.
pub fn uniform_nodes(intervals: usize) -> Vec<f64> {
    let h = 1.0 / intervals as f64;
    (0..=intervals)
        .map(|i| if i == intervals { 1.0 } else { i as f64 * h })
        .collect()
}

impl ClampedSpline {
    /// Interpolates `values` at `nodes` with end slopes `alpha` (first node)
    /// and `beta` (last node), solving the C2 continuity system for the
    /// interior slopes.
    pub fn fit_clamped(nodes: &[f64], values: &[f64], alpha: f64, beta: f64) -> Result<Self> {
        check_nodes(nodes, values.len())?;
        let n = nodes.len() - 1;
        let mut slopes = vec![0.0; n + 1];
        slopes[0] = alpha;
        slopes[n] = beta;
        if n >= 2 {
            // Thomas algorithm on the (n-1) interior unknowns; the matrix is
            // strictly diagonally dominant so no pivoting is needed.
            let m = n - 1;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            let mut lower = vec![0.0; m];
            for k in 0..m {
                let i = k + 1;
                let hl = nodes[i] - nodes[i - 1];
                let hr = nodes[i + 1] - nodes[i];
                let dl = (values[i] - values[i - 1]) / hl;
                let dr = (values[i + 1] - values[i]) / hr;
                lower[k] = hr;
                diag[k] = 2.0 * (hl + hr);
                upper[k] = hl;
                rhs[k] = 3.0 * (hr * dl + hl * dr);
            }
            rhs[0] -= lower[0] * alpha;
            rhs[m - 1] -= upper[m - 1] * beta;
            for k in 1..m {
                let w = lower[k] / diag[k - 1];
                diag[k] -= w * upper[k - 1];
                rhs[k] -= w * rhs[k - 1];
            }
            slopes[m] = rhs[m - 1] / diag[m - 1];
            for k in (0..m - 1).rev() {
                slopes[k + 1] = (rhs[k] - upper[k] * slopes[k + 2]) / diag[k];
            }
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            values: values.to_vec(),
            slopes,
        })
    }

    /// Spline from explicit nodal values and slopes, e.g. the solution of a
    /// time step.
    pub fn from_parts(nodes: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        check_nodes(&nodes, values.len())?;
        if slopes.len() != nodes.len() {
            return Err(FlowError::Domain(format!(
                "{} slopes for {} nodes",
                slopes.len(),
                nodes.len()
            )));
        }
        Ok(Self {
            nodes,
            values,
            slopes,
        })
    }

    /// Samples `f` on `nodes` and fits with the given end slopes.
    pub fn interpolate<F: Fn(f64) -> f64>(nodes: &[f64], f: F, alpha: f64, beta: f64) -> Result<Self> {
        let values: Vec<f64> = nodes.iter().map(|&z| f(z)).collect();
        Self::fit_clamped(nodes, &values, alpha, beta)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interval_width(&self, n: usize) -> f64 {
        self.nodes[n + 1] - self.nodes[n]
    }

    pub fn min_value(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc })
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        Ok(self.eval_all(z)?.0)
    }

    pub fn eval_d(&self, z: f64) -> Result<f64> {
        Ok(self.eval_all(z)?.1)
    }

    pub fn eval_dd(&self, z: f64) -> Result<f64> {
        Ok(self.eval_all(z)?.2)
    }

    /// `(S, S', S'')` at `z`. At a node, the segment to the right is used
    /// (the last node uses the last segment).
    pub fn eval_all(&self, z: f64) -> Result<(f64, f64, f64)> {
        let (a, b) = (self.nodes[0], self.nodes[self.nodes.len() - 1]);
        if !(z >= a - DOMAIN_SLACK && z <= b + DOMAIN_SLACK) {
            return Err(FlowError::Domain(format!("z = {z} outside [{a}, {b}]")));
        }
        let seg = self.segment_of(z);
        Ok(self.eval_segment(seg, z))
    }

    /// Evaluates segment `seg` at `z` without any range check.
    #[inline]
    pub fn eval_segment(&self, seg: usize, z: f64) -> (f64, f64, f64) {
        let h = self.nodes[seg + 1] - self.nodes[seg];
        let t = (z - self.nodes[seg]) / h;
        let (r0, r1) = (self.values[seg], self.values[seg + 1]);
        let (d0, d1) = (self.slopes[seg], self.slopes[seg + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let s = r0 * (1.0 - 3.0 * t2 + 2.0 * t3)
            + r1 * (3.0 * t2 - 2.0 * t3)
            + h * d0 * (t - 2.0 * t2 + t3)
            + h * d1 * (t3 - t2);
        let ds = (r1 - r0) * 6.0 * (t - t2) / h + d0 * (1.0 - 4.0 * t + 3.0 * t2) + d1 * (3.0 * t2 - 2.0 * t);
        let dds = (r1 - r0) * (6.0 - 12.0 * t) / (h * h) + (d0 * (6.0 * t - 4.0) + d1 * (6.0 * t - 2.0)) / h;
        (s, ds, dds)
    }

    /// Second derivative at node `n` from the segment formulas: the segment
    /// starting at `n` for `n < N`, the last segment's right end for `n = N`.
    pub fn node_curvature(&self, n: usize) -> f64 {
        let last = self.intervals();
        if n < last {
            self.dd_left_end(n)
        } else {
            self.dd_right_end(last - 1)
        }
    }

    /// `S''` at the left end of segment `seg`.
    pub fn dd_left_end(&self, seg: usize) -> f64 {
        let h = self.interval_width(seg);
        let delta = (self.values[seg + 1] - self.values[seg]) / h;
        (6.0 * delta - 4.0 * self.slopes[seg] - 2.0 * self.slopes[seg + 1]) / h
    }

    /// `S''` at the right end of segment `seg`.
    pub fn dd_right_end(&self, seg: usize) -> f64 {
        let h = self.interval_width(seg);
        let delta = (self.values[seg + 1] - self.values[seg]) / h;
        (-6.0 * delta + 2.0 * self.slopes[seg] + 4.0 * self.slopes[seg + 1]) / h
    }

    /// Largest relative jump of `S''` across the interior nodes,
    /// `|S''(z-) - S''(z+)| / (1 + |S''|)`.
    pub fn max_curvature_jump(&self) -> f64 {
        (1..self.intervals())
            .map(|n| {
                let left = self.dd_right_end(n - 1);
                let right = self.dd_left_end(n);
                (left - right).abs() / (1.0 + left.abs().max(right.abs()))
            })
            .fold(0.0, f64::max)
    }

    fn segment_of(&self, z: f64) -> usize {
        let last = self.intervals() - 1;
        // first node strictly greater than z, minus one
        let idx = self.nodes.partition_point(|&x| x <= z);
        idx.saturating_sub(1).min(last)
    }
}

fn check_nodes(nodes: &[f64], values: usize) -> Result<()> {
    if nodes.len() < 2 {
        return Err(FlowError::Domain("a spline needs at least one interval".into()));
    }
    if values != nodes.len() {
        return Err(FlowError::Domain(format!(
            "{values} values for {} nodes",
            nodes.len()
        )));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FlowError::Domain("spline nodes must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_slopes_are_exact() {
        let nodes = uniform_nodes(10);
        let s = ClampedSpline::interpolate(&nodes, |z| z * z * z, 0.0, 3.0).unwrap();
        for (z, d) in nodes.iter().zip(s.slopes()) {
            assert!((d - 3.0 * z * z).abs() < 1e-12);
        }
        assert!((s.eval_dd(0.5).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn flat_profile() {
        let nodes = uniform_nodes(7);
        let s = ClampedSpline::interpolate(&nodes, |_| 0.5, 0.0, 0.0).unwrap();
        assert!(s.slopes().iter().all(|&d| d == 0.0));
        for z in [0.0, 0.13, 0.5, 0.99, 1.0] {
            assert_eq!(s.eval_all(z).unwrap(), (0.5, 0.0, 0.0));
        }
    }

    #[test]
    fn single_segment_hermite() {
        let s = ClampedSpline::fit_clamped(&[0.0, 1.0], &[0.7, 0.4], 0.0, 0.0).unwrap();
        assert_eq!(s.eval(0.0).unwrap(), 0.7);
        assert_eq!(s.eval(1.0).unwrap(), 0.4);
        assert_eq!(s.eval_d(0.0).unwrap(), 0.0);
        assert_eq!(s.eval_d(1.0).unwrap(), 0.0);
        assert!((s.eval(0.5).unwrap() - 0.55).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let s = ClampedSpline::fit_clamped(&[0.0, 0.5, 1.0], &[1.0, 1.0, 1.0], 0.0, 0.0).unwrap();
        assert!(s.eval(1.1).is_err());
        assert!(s.eval(-0.01).is_err());
        assert!(ClampedSpline::fit_clamped(&[0.0, 0.5, 0.5, 1.0], &[1.0; 4], 0.0, 0.0).is_err());
        assert!(ClampedSpline::fit_clamped(&[0.0, 1.0], &[1.0; 3], 0.0, 0.0).is_err());
        assert!(ClampedSpline::fit_clamped(&[0.0], &[1.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn node_curvature_matches_both_sides() {
        let nodes = uniform_nodes(12);
        let s = ClampedSpline::interpolate(&nodes, |z| (3.0 * z).sin(), 3.0, 3.0 * 3f64.cos()).unwrap();
        assert!(s.max_curvature_jump() < 1e-10);
        for n in 1..12 {
            assert!((s.node_curvature(n) - s.dd_right_end(n - 1)).abs() < 1e-9);
        }
    }
}
