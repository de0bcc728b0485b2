//! Real orthonormal spherical harmonics.
//!
//! Basis functions are indexed lexicographically by `(ℓ, m)`, `-ℓ ≤ m ≤ ℓ`, at
//! flat position `ℓ² + ℓ + m`. For `m > 0` the function carries `cos(mφ)`, for
//! `m < 0` it carries `sin(|m|φ)`, both with a factor `√2`; there is no
//! Condon–Shortley phase, so `Y₁₁ ∝ x`, `Y₁,₋₁ ∝ y` and `Y₂₁ ∝ xz`.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{build_grid, QuadratureGrid, UnitVector3};

/// Coefficients below this magnitude count as zero for degree and parity bookkeeping.
pub const COEFFICIENT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub degree: usize,
    pub order: i64,
}

impl HarmonicIndex {
    pub fn new(degree: usize, order: i64) -> Result<Self> {
        if order.unsigned_abs() as usize > degree {
            return Err(Error::InvalidIndex {
                l: degree as i64,
                m: order,
            });
        }
        Ok(HarmonicIndex { degree, order })
    }

    pub fn flat(&self) -> usize {
        flat_index(self.degree, self.order)
    }

    pub fn from_flat(i: usize) -> Self {
        let degree = (i as f64).sqrt() as usize;
        let degree = if (degree + 1) * (degree + 1) <= i {
            degree + 1
        } else if degree * degree > i {
            degree - 1
        } else {
            degree
        };
        HarmonicIndex {
            degree,
            order: i as i64 - (degree * degree + degree) as i64,
        }
    }
}

/// Number of basis functions with `ℓ ≤ l_max`.
pub fn basis_size(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Flat index of `(ℓ, m)`.
pub fn flat_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Harmonic degree of every flat index up to `l_max`.
pub fn degrees(l_max: usize) -> Vec<usize> {
    (0..=l_max)
        .flat_map(|l| std::iter::repeat_n(l, 2 * l + 1))
        .collect()
}

/// Evaluates every basis function with `ℓ ≤ l_max` at the unit vector `x`.
///
/// Uses the normalized upward recurrence on `P̄ₗₘ / sinᵐθ`, which is a
/// polynomial in `z`, and takes the azimuthal factor from `(x + iy)ᵐ`.
pub fn eval_basis(x: &Vector3<f64>, l_max: usize, out: &mut [f64]) {
    debug_assert!(out.len() >= basis_size(l_max));
    let z = x.z;
    let w = Complex64::new(x.x, x.y);
    let mut q_mm = 1.0 / (4.0 * PI).sqrt();
    let mut wm = Complex64::new(1.0, 0.0);
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            q_mm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
            wm *= w;
        }
        let (cos_part, sin_part) = if m == 0 {
            (1.0, 0.0)
        } else {
            (std::f64::consts::SQRT_2 * wm.re, std::f64::consts::SQRT_2 * wm.im)
        };
        let mut store = |l: usize, q: f64| {
            if m == 0 {
                out[flat_index(l, 0)] = q;
            } else {
                out[flat_index(l, m as i64)] = q * cos_part;
                out[flat_index(l, -(m as i64))] = q * sin_part;
            }
        };
        store(m, q_mm);
        if m == l_max {
            break;
        }
        let mf = m as f64;
        let mut q_prev = q_mm;
        let mut q_cur = (2.0 * mf + 3.0).sqrt() * z * q_mm;
        store(m + 1, q_cur);
        for l in (m + 2)..=l_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            let q_next = a * (z * q_cur - b * q_prev);
            store(l, q_next);
            q_prev = q_cur;
            q_cur = q_next;
        }
    }
}

/// Single basis function value; convenience for tests and oracles.
pub fn eval_harmonic(index: HarmonicIndex, x: &Vector3<f64>) -> f64 {
    let mut buf = vec![0.0; basis_size(index.degree)];
    eval_basis(x, index.degree, &mut buf);
    buf[index.flat()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// A finite real spherical-harmonic expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExpansion {
    coefficients: Vec<f64>,
    max_degree: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct CoefficientRecord {
    l: i64,
    m: i64,
    coef: f64,
}

impl HarmonicExpansion {
    pub fn zeros(max_degree: usize) -> Self {
        HarmonicExpansion {
            coefficients: vec![0.0; basis_size(max_degree)],
            max_degree,
        }
    }

    pub fn from_coefficients(max_degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != basis_size(max_degree) {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for max degree {max_degree} (expected {})",
                coefficients.len(),
                basis_size(max_degree)
            )));
        }
        Ok(HarmonicExpansion {
            coefficients,
            max_degree,
        })
    }

    /// Builds an expansion from `(ℓ, m, coefficient)` triples; the max degree is the largest ℓ.
    pub fn from_terms<I: IntoIterator<Item = (usize, i64, f64)>>(terms: I) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        let max_degree = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut e = Self::zeros(max_degree);
        let mut seen = vec![false; basis_size(max_degree)];
        for (l, m, c) in terms {
            let idx = HarmonicIndex::new(l, m)?.flat();
            if seen[idx] {
                return Err(Error::DuplicateIndex { l, m });
            }
            seen[idx] = true;
            e.coefficients[idx] = c;
        }
        Ok(e)
    }

    pub fn constant(value: f64) -> Self {
        Self::from_coefficients(0, vec![value * (4.0 * PI).sqrt()]).expect("size 1")
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.max_degree || m.unsigned_abs() as usize > l {
            return 0.0;
        }
        self.coefficients[flat_index(l, m)]
    }

    /// Highest degree carrying a coefficient above [`COEFFICIENT_FLOOR`].
    pub fn effective_degree(&self) -> usize {
        (0..=self.max_degree)
            .rev()
            .find(|&l| self.degree_mass(l) > COEFFICIENT_FLOOR)
            .unwrap_or(0)
    }

    fn degree_mass(&self, l: usize) -> f64 {
        let lo = l * l;
        self.coefficients[lo..lo + 2 * l + 1]
            .iter()
            .fold(0.0f64, |acc, c| acc.max(c.abs()))
    }

    /// Re-expressed at a different truncation degree (zero-padded or truncated).
    pub fn with_max_degree(&self, max_degree: usize) -> Self {
        let mut c = vec![0.0; basis_size(max_degree)];
        let n = c.len().min(self.coefficients.len());
        c[..n].copy_from_slice(&self.coefficients[..n]);
        HarmonicExpansion {
            coefficients: c,
            max_degree,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        HarmonicExpansion {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
            max_degree: self.max_degree,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let max_degree = self.max_degree.max(other.max_degree);
        let mut out = self.with_max_degree(max_degree);
        for (i, c) in other.coefficients.iter().enumerate() {
            out.coefficients[i] += c;
        }
        out
    }

    pub fn evaluate(&self, x: &Vector3<f64>) -> f64 {
        let n = self.coefficients.len();
        let mut stack = [0.0; 81];
        let mut heap = Vec::new();
        let buf: &mut [f64] = if n <= stack.len() {
            &mut stack[..n]
        } else {
            heap.resize(n, 0.0);
            &mut heap
        };
        eval_basis(x, self.max_degree, buf);
        self.coefficients.iter().zip(buf.iter()).map(|(c, y)| c * y).sum()
    }

    /// Even/odd/mixed by which degrees carry coefficients above [`COEFFICIENT_FLOOR`].
    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for l in 0..=self.max_degree {
            if self.degree_mass(l) > COEFFICIENT_FLOOR {
                if l % 2 == 0 {
                    even = true;
                } else {
                    odd = true;
                }
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    /// Upper bound on the sup norm from `|Yₗₘ| ≤ √((2ℓ+1)/(4π))`.
    pub fn sup_norm_bound(&self) -> f64 {
        (0..=self.max_degree)
            .map(|l| {
                let lo = l * l;
                let s: f64 = self.coefficients[lo..lo + 2 * l + 1].iter().map(|c| c.abs()).sum();
                s * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()
            })
            .sum()
    }

    /// Sup norm of `|V|`: maximum over a dense product grid, polished by local
    /// pattern search around the best grid nodes.
    pub fn sup_norm_sampled(&self) -> f64 {
        let degree = (8 * self.max_degree).max(64);
        let grid = build_grid(degree).expect("sampling grid within budget");
        let abs_at = |v: &Vector3<f64>| self.evaluate(&v.normalize()).abs();
        let mut ranked: Vec<(f64, Vector3<f64>)> =
            grid.nodes.iter().map(|(x, _)| (abs_at(x), **x)).collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
        let spacing = 2.0 * PI / (degree + 1) as f64;
        ranked
            .iter()
            .take(8)
            .map(|&(mut best, mut x)| {
                let mut step = spacing;
                while step > 1e-9 {
                    let (a, b) = UnitVector3::from_unit(x).frame();
                    let mut moved = false;
                    for d in [a, -a, b, -b] {
                        let y = (x + d * step).normalize();
                        let v = abs_at(&y);
                        if v > best {
                            best = v;
                            x = y;
                            moved = true;
                            break;
                        }
                    }
                    if !moved {
                        step *= 0.5;
                    }
                }
                best
            })
            .fold(0.0, f64::max)
    }

    /// Pointwise product re-analyzed exactly at degree `deg(self) + deg(other)`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let l = self.effective_degree() + other.effective_degree();
        analyze_with_grid_degree(|x| self.evaluate(x) * other.evaluate(x), l, 2 * l + 2)
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Json { source, .. } => Error::Json {
                context: path.display().to_string(),
                source,
            },
            other => other,
        })
    }

    /// Parses a JSON array of `{l, m, coef}` records.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let records: Vec<CoefficientRecord> = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "potential coefficients".into(),
            source,
        })?;
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            if r.l < 0 || r.m.abs() > r.l {
                return Err(Error::InvalidIndex { l: r.l, m: r.m });
            }
            if !r.coef.is_finite() {
                return Err(Error::Config(format!("coefficient (l = {}, m = {}) is not finite", r.l, r.m)));
            }
            terms.push((r.l as usize, r.m, r.coef));
        }
        Self::from_terms(terms)
    }

    /// JSON records for every nonzero coefficient, in flat-index order.
    pub fn to_json_string(&self) -> String {
        let records: Vec<CoefficientRecord> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| {
                let idx = HarmonicIndex::from_flat(i);
                CoefficientRecord {
                    l: idx.degree as i64,
                    m: idx.order,
                    coef: *c,
                }
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("records serialize")
    }
}

/// Coefficients `⟨Yₗₘ, f⟩` for `ℓ ≤ l_max`, using a grid of degree `2·l_max + 8`.
pub fn analyze<F: Fn(&Vector3<f64>) -> f64>(f: F, l_max: usize) -> Result<HarmonicExpansion> {
    analyze_with_grid_degree(f, l_max, 2 * l_max + 8)
}

pub fn analyze_with_grid_degree<F: Fn(&Vector3<f64>) -> f64>(
    f: F,
    l_max: usize,
    grid_degree: usize,
) -> Result<HarmonicExpansion> {
    let grid = build_grid(grid_degree)?;
    let values: Vec<f64> = grid.nodes.iter().map(|(x, _)| f(x)).collect();
    Ok(analyze_values(&grid, &values, l_max))
}

/// Projects sampled values on `grid` onto the basis.
pub fn analyze_values(grid: &QuadratureGrid, values: &[f64], l_max: usize) -> HarmonicExpansion {
    let n = basis_size(l_max);
    let mut coeffs = vec![0.0; n];
    let mut buf = vec![0.0; n];
    for ((x, w), v) in grid.nodes.iter().zip(values) {
        eval_basis(x, l_max, &mut buf);
        let wv = w * v;
        for (c, y) in coeffs.iter_mut().zip(&buf) {
            *c += wv * y;
        }
    }
    HarmonicExpansion {
        coefficients: coeffs,
        max_degree: l_max,
    }
}

/// Evaluates a coefficient vector (any scalar type) at each grid node.
pub fn synthesize_complex(coeffs: &[Complex64], l_max: usize, points: &[UnitVector3]) -> Vec<Complex64> {
    let n = basis_size(l_max);
    let mut buf = vec![0.0; n];
    points
        .iter()
        .map(|x| {
            eval_basis(x, l_max, &mut buf);
            coeffs.iter().zip(&buf).map(|(c, y)| c * y).sum()
        })
        .collect()
}

/// Coefficients of `f ∘ R_z(−angle)`, i.e. the function rotated by `angle` about e₃.
pub fn rotate_z_coefficients<T>(coeffs: &[T], angle: f64) -> Vec<T>
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let mut out = coeffs.to_vec();
    let l_max = (coeffs.len() as f64).sqrt() as usize - 1;
    for l in 1..=l_max {
        for m in 1..=l as i64 {
            let (s, c) = (m as f64 * angle).sin_cos();
            let ic = flat_index(l, m);
            let is = flat_index(l, -m);
            let (a, b) = (coeffs[ic], coeffs[is]);
            out[ic] = a * c - b * s;
            out[is] = a * s + b * c;
        }
    }
    out
}
