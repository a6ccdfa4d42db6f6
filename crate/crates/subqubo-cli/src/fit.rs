//! Call-count scaling fits: per problem size, a zero-intercept least-squares
//! slope of mean subroutine calls against N/d, then a least-squares fit of
//! the numerator a·N on the basis {N², N}.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use crate::bench::BenchRecord;

/// Mean calls and confidence half-width at one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub d: usize,
    pub mean_calls: f64,
    /// 1.96 standard errors over instances (0 for a single sample).
    pub ci95: f64,
    pub samples: usize,
}

/// Per-N fit of `calls = a / (d/N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerNFit {
    pub n: usize,
    pub a: f64,
    pub r_squared: f64,
    pub points: Vec<PointSummary>,
}

/// Full scaling fit: per-N slopes plus the quadratic numerator coefficients
/// of `calls ≈ (α N² + β N) / d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub per_n: Vec<PerNFit>,
    pub alpha: f64,
    pub beta: f64,
}

/// Fits the scaling model to bench records grouped by problem size. Needs at
/// least 4 distinct d per N and at least 2 distinct N.
pub fn fit_scaling(records: &[BenchRecord]) -> Result<ScalingFit> {
    fit_scaling_values(
        records
            .iter()
            .map(|r| (r.n, r.d, r.subroutine_calls as f64)),
    )
}

/// [`fit_scaling`] over raw `(n, d, calls)` observations; call counts may be
/// non-integral (e.g. synthetic model values).
pub fn fit_scaling_values(
    observations: impl IntoIterator<Item = (usize, usize, f64)>,
) -> Result<ScalingFit> {
    let mut cells: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for (n, d, calls) in observations {
        cells.entry((n, d)).or_default().push(calls);
    }
    let mut by_n: BTreeMap<usize, Vec<PointSummary>> = BTreeMap::new();
    for ((n, d), calls) in cells {
        let samples = calls.len();
        let mean = calls.iter().sum::<f64>() / samples as f64;
        let ci95 = if samples > 1 {
            let var = calls.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
            1.96 * (var / samples as f64).sqrt()
        } else {
            0.0
        };
        by_n.entry(n).or_default().push(PointSummary {
            d,
            mean_calls: mean,
            ci95,
            samples,
        });
    }

    if by_n.len() < 2 {
        bail!(
            "scaling fit needs at least 2 distinct problem sizes, found {}",
            by_n.len()
        );
    }

    let mut per_n = Vec::new();
    for (n, points) in by_n {
        if points.len() < 4 {
            bail!(
                "scaling fit needs at least 4 distinct d values per N, found {} for N={n}",
                points.len()
            );
        }
        // slope through the origin of mean calls against u = N/d
        let mut uy = 0.0;
        let mut uu = 0.0;
        for p in &points {
            let u = n as f64 / p.d as f64;
            uy += u * p.mean_calls;
            uu += u * u;
        }
        let a = uy / uu;
        let y_bar = points.iter().map(|p| p.mean_calls).sum::<f64>() / points.len() as f64;
        let ss_res: f64 = points
            .iter()
            .map(|p| (p.mean_calls - a * n as f64 / p.d as f64).powi(2))
            .sum();
        let ss_tot: f64 = points.iter().map(|p| (p.mean_calls - y_bar).powi(2)).sum();
        let r_squared = if ss_tot > 0.0 {
            (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
        } else {
            1.0
        };
        per_n.push(PerNFit {
            n,
            a,
            r_squared,
            points,
        });
    }

    // least squares of A(N) = a*N on the basis {N², N}
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for fit in &per_n {
        let n = fit.n as f64;
        let a_total = fit.a * n;
        let (x1, x2) = (n * n, n);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * a_total;
        b2 += x2 * a_total;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < f64::EPSILON * s11.max(s22) {
        bail!("degenerate problem-size grid for the quadratic fit");
    }
    let alpha = (b1 * s22 - b2 * s12) / det;
    let beta = (s11 * b2 - s12 * b1) / det;

    Ok(ScalingFit { per_n, alpha, beta })
}
