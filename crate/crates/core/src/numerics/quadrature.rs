use crate::error::{FlowError, Result};

/// Gauss-Legendre abscissae and weights on `[-1, 1]` for 1..=5 points.
const GAUSS_LEGENDRE: [&[(f64, f64)]; 5] = [
    &[(0.0, 2.0)],
    &[
        (-0.577_350_269_189_625_764_51, 1.0),
        (0.577_350_269_189_625_764_51, 1.0),
    ],
    &[
        (-0.774_596_669_241_483_377_04, 0.555_555_555_555_555_555_56),
        (0.0, 0.888_888_888_888_888_888_89),
        (0.774_596_669_241_483_377_04, 0.555_555_555_555_555_555_56),
    ],
    &[
        (-0.861_136_311_594_052_575_22, 0.347_854_845_137_453_857_37),
        (-0.339_981_043_584_856_264_80, 0.652_145_154_862_546_142_63),
        (0.339_981_043_584_856_264_80, 0.652_145_154_862_546_142_63),
        (0.861_136_311_594_052_575_22, 0.347_854_845_137_453_857_37),
    ],
    &[
        (-0.906_179_845_938_663_992_80, 0.236_926_885_056_189_087_51),
        (-0.538_469_310_105_683_091_04, 0.478_628_670_499_366_468_04),
        (0.0, 0.568_888_888_888_888_888_89),
        (0.538_469_310_105_683_091_04, 0.478_628_670_499_366_468_04),
        (0.906_179_845_938_663_992_80, 0.236_926_885_056_189_087_51),
    ],
];

/// An n-point Gauss-Legendre rule, applied per sub-interval of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_legendre(points: usize) -> Result<Self> {
        let table = points
            .checked_sub(1)
            .and_then(|i| GAUSS_LEGENDRE.get(i))
            .ok_or_else(|| {
                FlowError::Domain(format!(
                    "Gauss-Legendre rules are tabulated for 1..=5 points, got {points}"
                ))
            })?;
        Ok(Self {
            nodes: table.iter().map(|p| p.0).collect(),
            weights: table.iter().map(|p| p.1).collect(),
        })
    }

    pub fn points_per_interval(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature points `(z, w)` of the composite rule over `breakpoints`,
    /// interval by interval.
    pub fn points<'a>(&'a self, breakpoints: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
        breakpoints.windows(2).flat_map(move |ab| {
            let half = 0.5 * (ab[1] - ab[0]);
            let mid = 0.5 * (ab[1] + ab[0]);
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(move |(&x, &w)| (mid + half * x, half * w))
        })
    }

    /// Composite integral of `f` over the partition given by `breakpoints`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, breakpoints: &[f64]) -> Result<f64> {
        if breakpoints.windows(2).any(|ab| !(ab[1] > ab[0])) {
            return Err(FlowError::Domain(
                "quadrature breakpoints must be strictly increasing".into(),
            ));
        }
        let mut sum = CompensatedSum::default();
        for (z, w) in self.points(breakpoints) {
            sum.add(w * f(z));
        }
        Ok(sum.value())
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
