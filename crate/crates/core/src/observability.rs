//! Observability diagnostics: eigenfunction masses on a region, cluster
//! minima, the time-averaged Gram operator of the Schrödinger evolution,
//! level spacings and geodesic Husimi weights.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{build_grid, UnitVector3};
use crate::harmonics::{eval_basis, flat_index};
use crate::operator::{RegionProjectorMatrix, SpectralDecomposition};

/// Relative tolerance below which eigenvalues count as equal.
pub const MERGE_TOLERANCE: f64 = 1e-10;

/// Lower bound on the cluster minimal mass of `V = 4xz` in `Cap(e₃, arccos 0.3)`
/// for `10 ≤ k ≤ 40`; a regression anchor.
pub const MASS_ANCHOR: f64 = 0.3;

pub fn merge_tolerance(lambda: f64) -> f64 {
    MERGE_TOLERANCE * lambda.abs().max(1.0)
}

/// `uᵀ P_ω u`.
pub fn eigen_mass(u: &DVector<f64>, projector: &RegionProjectorMatrix) -> Result<f64> {
    if u.len() != projector.entries.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against projector of size {}",
            u.len(),
            projector.entries.nrows()
        )));
    }
    Ok(u.dot(&(&projector.entries * u)))
}

/// Maximal runs of (numerically) equal eigenvalues.
pub fn degenerate_groups(values: &[f64]) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for j in 1..=values.len() {
        if j == values.len() || values[j] - values[j - 1] > merge_tolerance(values[j]) {
            groups.push(start..j);
            start = j;
        }
    }
    groups
}

#[derive(Debug, Clone, Serialize)]
pub struct MassRecord {
    pub k: usize,
    pub min_mass: f64,
    pub argmin: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservabilityCurve {
    pub region: String,
    pub l_max: usize,
    pub records: Vec<MassRecord>,
}

impl ObservabilityCurve {
    pub fn record(&self, k: usize) -> Option<&MassRecord> {
        self.records.iter().find(|r| r.k == k)
    }
}

/// Smallest mass on ω over each retained cluster; degenerate eigenspaces are
/// minimized over exactly through the compressed projector.
pub fn cluster_min_mass(s: &SpectralDecomposition, projector: &RegionProjectorMatrix) -> Result<ObservabilityCurve> {
    if projector.entries.nrows() != s.eigenvectors.nrows() {
        return Err(Error::DimensionMismatch("projector and decomposition use different truncations".into()));
    }
    let records = s
        .clusters
        .par_iter()
        .map(|cluster| {
            let mut best = (f64::INFINITY, cluster.range.start);
            for group in degenerate_groups(&s.eigenvalues[cluster.range.clone()]) {
                let cols = s
                    .eigenvectors
                    .columns(cluster.range.start + group.start, group.len());
                let compressed = cols.transpose() * &projector.entries * cols;
                let (value, local) = if group.len() == 1 {
                    (compressed[(0, 0)], 0)
                } else {
                    let diag_min = (0..group.len())
                        .min_by(|&a, &b| compressed[(a, a)].total_cmp(&compressed[(b, b)]))
                        .unwrap_or(0);
                    (compressed.symmetric_eigenvalues().min(), diag_min)
                };
                if value < best.0 {
                    best = (value, cluster.range.start + group.start + local);
                }
            }
            MassRecord {
                k: cluster.k,
                min_mass: best.0,
                argmin: best.1,
            }
        })
        .collect();
    Ok(ObservabilityCurve {
        region: projector.region.to_string(),
        l_max: s.l_max,
        records,
    })
}

/// `(e^{iδT} − 1)/(iδT)`, with the removable singularity at `δT = 0`.
pub fn time_average_kernel(delta: f64, horizon: f64) -> Complex64 {
    let x = delta * horizon;
    if x.abs() < 1e-8 {
        return Complex64::new(1.0, 0.5 * x);
    }
    let (s, c) = x.sin_cos();
    Complex64::new(s / x, (1.0 - c) / x)
}

#[derive(Debug, Clone)]
pub struct GramReport {
    pub min_eigenvalue: f64,
    pub matrix: DMatrix<Complex64>,
}

/// `G_T = (1/T)∫₀^T e^{itH} P_ω e^{−itH} dt` in the eigenbasis of `H`.
pub fn evolution_gram(s: &SpectralDecomposition, projector: &RegionProjectorMatrix, horizon: f64) -> Result<GramReport> {
    if projector.entries.nrows() != s.eigenvectors.nrows() {
        return Err(Error::DimensionMismatch("projector and decomposition use different truncations".into()));
    }
    let v = &s.eigenvectors;
    let rotated = v.transpose() * &projector.entries * v;
    let n = rotated.nrows();
    let matrix = DMatrix::from_fn(n, n, |j, k| {
        time_average_kernel(s.eigenvalues[j] - s.eigenvalues[k], horizon) * rotated[(j, k)]
    });
    let min_eigenvalue = hermitian_min_eigenvalue(&matrix)?;
    Ok(GramReport { min_eigenvalue, matrix })
}

/// Smallest eigenvalue of a Hermitian matrix, solved block by block.
pub fn hermitian_min_eigenvalue(m: &DMatrix<Complex64>) -> Result<f64> {
    let n = m.nrows();
    let blocks = crate::operator::coupled_blocks_by(n, |i, j| m[(i, j)].norm());
    let mut best = f64::INFINITY;
    for block in blocks {
        let size = block.len();
        let sub = DMatrix::from_fn(size, size, |i, j| m[(block[i], block[j])]);
        let values = nalgebra::SymmetricEigen::try_new(sub, f64::EPSILON, 0)
            .ok_or(Error::EigenNonConvergence {
                size,
                matrix_size: n,
                max_entry: m.iter().map(|z| z.norm()).fold(0.0, f64::max),
            })?
            .eigenvalues;
        best = best.min(values.min());
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacingRow {
    pub j: usize,
    pub lambda: f64,
    pub gap: f64,
    pub sqrt_scaled: f64,
    pub cube_scaled: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacingTable {
    pub rows: Vec<SpacingRow>,
}

impl SpacingTable {
    /// Table of gaps between consecutive distinct values (ascending input).
    pub fn from_values(values: &[f64]) -> Self {
        let distinct: Vec<f64> = degenerate_groups(values).into_iter().map(|g| values[g.start]).collect();
        let rows = distinct
            .windows(2)
            .enumerate()
            .map(|(j, w)| {
                let gap = w[1] - w[0];
                let lambda = w[0];
                SpacingRow {
                    j,
                    lambda,
                    gap,
                    sqrt_scaled: lambda.abs().sqrt() * gap,
                    cube_scaled: lambda.abs().powf(1.5) * gap,
                }
            })
            .collect();
        SpacingTable { rows }
    }

    pub fn min_sqrt_scaled(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.sqrt_scaled).reduce(f64::min)
    }

    pub fn min_cube_scaled(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.cube_scaled).reduce(f64::min)
    }

    pub fn median_sqrt_scaled(&self) -> Option<f64> {
        let mut v: Vec<f64> = self.rows.iter().map(|r| r.sqrt_scaled).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        Some(v[v.len() / 2])
    }
}

/// Spacings over all retained clusters.
pub fn spacing_table(s: &SpectralDecomposition) -> SpacingTable {
    let end = s.clusters.last().map_or(0, |c| c.range.end);
    let start = s.clusters.first().map_or(0, |c| c.range.start);
    SpacingTable::from_values(&s.eigenvalues[start..end])
}

/// Spacings inside one cluster.
pub fn cluster_spacing_table(s: &SpectralDecomposition, k: usize) -> Result<SpacingTable> {
    let c = s.cluster(k)?;
    Ok(SpacingTable::from_values(&s.eigenvalues[c.range.clone()]))
}

#[derive(Debug, Clone, Serialize)]
pub struct HusimiWeights {
    pub normals: Vec<UnitVector3>,
    pub weights: Vec<f64>,
}

impl HusimiWeights {
    /// Total weight within angular distance `radius` of any of `centers`.
    pub fn weight_near(&self, centers: &[UnitVector3], radius: f64) -> f64 {
        self.normals
            .iter()
            .zip(&self.weights)
            .filter(|(n, _)| centers.iter().any(|c| n.angle_to(c) <= radius))
            .map(|(_, w)| w)
            .sum()
    }
}

/// `∫(1 − t²)^k dt` over `[−1, 1]`.
fn beam_norm_squared(k: usize) -> f64 {
    let mut v = 2.0;
    for j in 1..=k {
        v *= 2.0 * j as f64 / (2.0 * j as f64 + 1.0);
    }
    2.0 * std::f64::consts::PI * v
}

/// Normalized Gaussian beam `((x·a) + i(x·b))^k` along the great circle with normal `n`.
pub fn beam_value(n: &UnitVector3, k: usize, x: &nalgebra::Vector3<f64>) -> Complex64 {
    let (a, b) = n.frame();
    Complex64::new(x.dot(&a), x.dot(&b)).powu(k as u32) / beam_norm_squared(k).sqrt()
}

/// Geodesic Husimi weights `|⟨beam_{k,n}, u⟩|²` over `grid`, normalized to sum 1.
pub fn geodesic_husimi(u: &DVector<f64>, k: usize, grid: &[UnitVector3]) -> Result<HusimiWeights> {
    let l_max = (u.len() as f64).sqrt().round() as usize;
    if l_max * l_max != u.len() || l_max == 0 || k >= l_max {
        return Err(Error::DimensionMismatch(format!(
            "coefficient vector of length {} has no degree-{k} block",
            u.len()
        )));
    }
    let quad = build_grid(2 * k)?;
    let mut basis = vec![0.0; (k + 1) * (k + 1)];
    let samples: Vec<(nalgebra::Vector3<f64>, f64)> = quad
        .nodes
        .iter()
        .map(|(x, w)| {
            eval_basis(x, k, &mut basis);
            let value: f64 = (-(k as i64)..=(k as i64))
                .map(|m| u[flat_index(k, m)] * basis[flat_index(k, m)])
                .sum();
            (**x, w * value)
        })
        .collect();
    let raw: Vec<f64> = grid
        .par_iter()
        .map(|n| {
            let overlap: Complex64 = samples
                .iter()
                .map(|(x, wv)| beam_value(n, k, x).conj() * *wv)
                .sum();
            overlap.norm_sqr()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NumericalBreakdown(format!(
            "state has no weight on degree {k} beams over the grid"
        )));
    }
    Ok(HusimiWeights {
        normals: grid.to_vec(),
        weights: raw.into_iter().map(|w| w / total).collect(),
    })
}
