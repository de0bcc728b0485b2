//! The truncated Hamiltonian `H = −Δ/2 + V` in the real harmonic basis, its
//! eigendecomposition, cluster partition and region projectors.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::control::Region;
use crate::error::{Error, Result};
use crate::geom::{gauss_legendre, QuadratureGrid, UnitVector3, DEFAULT_NODE_BUDGET};
use crate::harmonics::{basis_size, degrees, eval_basis, HarmonicExpansion, HarmonicIndex, Parity, COEFFICIENT_FLOOR};

/// Extra half-width added to `‖V‖∞` for cluster windows.
pub const CLUSTER_WINDOW_PAD: f64 = 0.25;

/// Nodes per GEMM chunk when accumulating Gram-type matrices.
const CHUNK: usize = 1024;

/// Accumulates `Σ w_q Y(x_q) Y(x_q)ᵀ` over weighted nodes.
pub fn weighted_gram<'a, I>(nodes: I, l_max: usize) -> DMatrix<f64>
where
    I: IntoIterator<Item = (&'a UnitVector3, f64)>,
{
    let n = basis_size(l_max);
    let mut out = DMatrix::<f64>::zeros(n, n);
    let mut basis = DMatrix::<f64>::zeros(n, CHUNK);
    let mut weighted = DMatrix::<f64>::zeros(CHUNK, n);
    let mut filled = 0;
    let flush = |out: &mut DMatrix<f64>, basis: &DMatrix<f64>, weighted: &DMatrix<f64>, filled: usize| {
        if filled > 0 {
            out.gemm(
                1.0,
                &basis.columns(0, filled),
                &weighted.rows(0, filled),
                1.0,
            );
        }
    };
    for (x, w) in nodes {
        let mut col = basis.column_mut(filled);
        eval_basis(x, l_max, col.as_mut_slice());
        for i in 0..n {
            weighted[(filled, i)] = w * basis[(i, filled)];
        }
        filled += 1;
        if filled == CHUNK {
            flush(&mut out, &basis, &weighted, filled);
            filled = 0;
        }
    }
    flush(&mut out, &basis, &weighted, filled);
    symmetrize(&mut out);
    out
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// `(M_V)_{ij} = ⟨Y_i, V Y_j⟩`, exact by quadrature of degree `2L + deg V`.
pub fn multiplication_matrix(v: &HarmonicExpansion, l_max: usize) -> Result<DMatrix<f64>> {
    multiplication_matrix_with_budget(v, l_max, DEFAULT_NODE_BUDGET)
}

pub fn multiplication_matrix_with_budget(
    v: &HarmonicExpansion,
    l_max: usize,
    budget: usize,
) -> Result<DMatrix<f64>> {
    let grid = QuadratureGrid::polar_band(&UnitVector3::E3, -1.0, 1.0, 2 * l_max + v.effective_degree(), budget)?;
    let weighted: Vec<(&UnitVector3, f64)> = grid.nodes.iter().map(|(x, w)| (x, w * v.evaluate(x))).collect();
    let mut m = weighted_gram(weighted, l_max);
    apply_selection_rules(&mut m, v, l_max);
    Ok(m)
}

/// Zeroes entries that vanish analytically: degree gaps beyond `deg V`,
/// parity mismatches and orders no term of `V` can bridge.
fn apply_selection_rules(m: &mut DMatrix<f64>, v: &HarmonicExpansion, l_max: usize) {
    let deg = v.effective_degree();
    let parity = v.parity();
    let terms: Vec<i64> = (0..=deg)
        .flat_map(|l| (-(l as i64)..=(l as i64)).map(move |o| (l, o)))
        .filter(|&(l, o)| v.get(l, o).abs() > COEFFICIENT_FLOOR)
        .map(|(_, o)| o)
        .collect();
    let index: Vec<HarmonicIndex> = (0..basis_size(l_max)).map(HarmonicIndex::from_flat).collect();
    let bridged = |a: &HarmonicIndex, b: &HarmonicIndex| {
        let sine = (a.order < 0) != (b.order < 0);
        let (p, q) = (a.order.abs(), b.order.abs());
        [p + q, (p - q).abs()].into_iter().any(|c| {
            !(c == 0 && sine)
                && terms
                    .iter()
                    .any(|&o| o.abs() == c && (o < 0) == sine)
        })
    };
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let (a, b) = (&index[i], &index[j]);
            let gap = a.degree.abs_diff(b.degree);
            let parity_ok = match parity {
                Parity::Even => (a.degree + b.degree) % 2 == 0,
                Parity::Odd => (a.degree + b.degree) % 2 == 1,
                Parity::Mixed => true,
            };
            if gap > deg || !parity_ok || !bridged(a, b) {
                m[(i, j)] = 0.0;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    l_max: usize,
    potential: HarmonicExpansion,
    entries: DMatrix<f64>,
}

impl HamiltonianMatrix {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn potential(&self) -> &HarmonicExpansion {
        &self.potential
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    /// The potential part `M_V = H − diag(ℓ(ℓ+1)/2)`.
    pub fn potential_matrix(&self) -> DMatrix<f64> {
        let mut m = self.entries.clone();
        for (i, l) in degrees(self.l_max).into_iter().enumerate() {
            m[(i, i)] -= kinetic_level(l);
        }
        m
    }
}

/// `k(k+1)/2`, the eigenvalue of `−Δ/2` on degree-k harmonics.
pub fn kinetic_level(k: usize) -> f64 {
    (k * (k + 1)) as f64 / 2.0
}

/// Assembles `H = diag(ℓ(ℓ+1)/2) + M_V` truncated to degrees `≤ l_max`.
pub fn assemble(v: &HarmonicExpansion, l_max: usize) -> Result<HamiltonianMatrix> {
    let mut entries = multiplication_matrix(v, l_max)?;
    for (i, l) in degrees(l_max).into_iter().enumerate() {
        entries[(i, i)] += kinetic_level(l);
    }
    Ok(HamiltonianMatrix {
        l_max,
        potential: v.clone(),
        entries,
    })
}

/// One Weinstein cluster: the `2k+1` eigenvalues near `k(k+1)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub k: usize,
    pub range: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub l_max: usize,
    pub potential_sup_norm: f64,
    pub window_half_width: f64,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn cluster(&self, k: usize) -> Result<&Cluster> {
        self.clusters
            .iter()
            .find(|c| c.k == k)
            .ok_or(Error::ClusterNotRetained { k })
    }

    pub fn cluster_of_index(&self, index: usize) -> Option<usize> {
        self.clusters.iter().find(|c| c.range.contains(&index)).map(|c| c.k)
    }

    pub fn eigenvector(&self, index: usize) -> DVector<f64> {
        self.eigenvectors.column(index).into_owned()
    }

    /// Eigenvectors of cluster k as columns.
    pub fn cluster_vectors(&self, k: usize) -> Result<DMatrix<f64>> {
        let c = self.cluster(k)?;
        Ok(self.eigenvectors.columns(c.range.start, c.range.len()).into_owned())
    }
}

/// Options controlling cluster retention.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClusterOptions {
    /// Lowest cluster to retain. `None` picks the smallest k whose window is
    /// separated from both neighbours.
    pub min_cluster: Option<usize>,
}

/// Full eigendecomposition with the default cluster options.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<SpectralDecomposition> {
    diagonalize_with(h, ClusterOptions::default())
}

pub fn diagonalize_with(h: &HamiltonianMatrix, options: ClusterOptions) -> Result<SpectralDecomposition> {
    let (eigenvalues, eigenvectors) = block_symmetric_eigen(&h.entries)?;
    let hv = &h.entries * &eigenvectors;
    let residuals: Vec<f64> = (0..eigenvalues.len())
        .map(|j| (hv.column(j) - eigenvectors.column(j) * eigenvalues[j]).norm())
        .collect();

    let sup = if h.potential.effective_degree() == 0 {
        h.potential.get(0, 0).abs() / (4.0 * std::f64::consts::PI).sqrt()
    } else {
        h.potential.sup_norm_sampled()
    };
    let half_width = sup + CLUSTER_WINDOW_PAD;
    let separated_below = |k: usize| k == 0 || k as f64 > 2.0 * half_width;
    let separated_above = |k: usize| (k + 1) as f64 > 2.0 * half_width;

    let deg = h.potential.effective_degree();
    let top = (h.l_max as i64) - (deg as i64) - 2;
    let mut clusters = Vec::new();
    if top >= 0 {
        let top = top as usize;
        let first = match options.min_cluster {
            Some(k) => {
                if !separated_below(k) || !separated_above(k) {
                    return Err(Error::ClusterOverlap { k, half_width });
                }
                k
            }
            None => (0..=top)
                .find(|&k| separated_below(k) && separated_above(k))
                .unwrap_or(top + 1),
        };
        for k in first..=top {
            let range = k * k..(k + 1) * (k + 1);
            let center = kinetic_level(k);
            let found = eigenvalues
                .iter()
                .filter(|&&l| (l - center).abs() <= half_width)
                .count();
            let inside = eigenvalues[range.clone()]
                .iter()
                .all(|&l| (l - center).abs() <= half_width);
            if found != 2 * k + 1 || !inside {
                return Err(Error::ClusterCount {
                    k,
                    found,
                    expected: 2 * k + 1,
                });
            }
            clusters.push(Cluster { k, range });
        }
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        residuals,
        clusters,
        l_max: h.l_max,
        potential_sup_norm: sup,
        window_half_width: half_width,
    })
}

/// Connected components of the sparsity graph of a symmetric matrix, with
/// entries below `1e-13·max|offdiag|` treated as zero.
pub fn coupled_blocks(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    coupled_blocks_by(m.nrows(), |i, j| m[(i, j)].abs())
}

/// Connected components of the graph whose edges are entries with
/// `magnitude(i, j) > 1e-13·max offdiagonal magnitude`.
pub fn coupled_blocks_by<F: Fn(usize, usize) -> f64>(n: usize, magnitude: F) -> Vec<Vec<usize>> {
    let mut scale = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                scale = scale.max(magnitude(i, j));
            }
        }
    }
    let threshold = 1e-13 * scale;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    if scale > 0.0 {
        for j in 0..n {
            for i in (j + 1)..n {
                if magnitude(i, j) > threshold {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

/// Dense symmetric eigensolve, block by block; eigenvalues ascending and
/// eigenvectors sign-normalized (largest component positive).
pub fn block_symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let mut pairs: Vec<(f64, usize, DVector<f64>)> = Vec::with_capacity(n);
    for block in coupled_blocks(m) {
        let size = block.len();
        let sub = DMatrix::from_fn(size, size, |i, j| m[(block[i], block[j])]);
        let eig = SymmetricEigen::try_new(sub, f64::EPSILON, 0).ok_or_else(|| Error::EigenNonConvergence {
            size,
            matrix_size: n,
            max_entry: m.amax(),
        })?;
        for j in 0..size {
            let mut v = DVector::zeros(n);
            for (i, &row) in block.iter().enumerate() {
                v[row] = eig.eigenvectors[(i, j)];
            }
            let (imax, _) = v.iter().enumerate().fold((0, 0.0f64), |acc, (i, x)| {
                if x.abs() > acc.1 + 1e-12 {
                    (i, x.abs())
                } else {
                    acc
                }
            });
            if v[imax] < 0.0 {
                v.neg_mut();
            }
            let lead = v.iter().position(|x| x.abs() > 1e-12).unwrap_or(0);
            pairs.push((eig.eigenvalues[j], lead, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let values = pairs.iter().map(|p| p.0).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (j, p) in pairs.iter().enumerate() {
        vectors.set_column(j, &p.2);
    }
    Ok((values, vectors))
}

/// `Π_k M Π_k` restricted to the degree-k harmonics.
pub fn compress_to_cluster(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let start = k * k;
    let size = 2 * k + 1;
    m.view((start, start), (size, size)).into_owned()
}

/// Gram matrix `⟨Y_i, 1_ω Y_j⟩` for `ℓ ≤ L`.
#[derive(Debug, Clone)]
pub struct RegionProjectorMatrix {
    pub region: Region,
    pub l_max: usize,
    pub entries: DMatrix<f64>,
}

pub fn region_projector(region: &Region, l_max: usize) -> Result<RegionProjectorMatrix> {
    let n = basis_size(l_max);
    let entries = match region {
        Region::Full => DMatrix::identity(n, n),
        Region::Empty => DMatrix::zeros(n, n),
        Region::Cap(cap) => cap_projector(&cap.center, cap.radius, l_max)?,
        Region::Complement(inner) => match inner.as_ref() {
            Region::Cap(cap) => DMatrix::identity(n, n) - cap_projector(&cap.center, cap.radius, l_max)?,
            _ => latitude_projector(region, l_max),
        },
        _ => latitude_projector(region, l_max),
    };
    Ok(RegionProjectorMatrix {
        region: region.clone(),
        l_max,
        entries,
    })
}

fn cap_projector(center: &UnitVector3, radius: f64, l_max: usize) -> Result<DMatrix<f64>> {
    let n = basis_size(l_max);
    if radius <= 0.0 {
        return Ok(DMatrix::zeros(n, n));
    }
    if radius >= std::f64::consts::PI {
        return Ok(DMatrix::identity(n, n));
    }
    let band = QuadratureGrid::polar_band(center, radius.cos(), 1.0, 2 * l_max, DEFAULT_NODE_BUDGET)?;
    Ok(weighted_gram(band.nodes.iter().map(|(x, w)| (x, *w)), l_max))
}

/// General boolean regions: exact azimuthal arcs per latitude, Gauss–Legendre
/// along each arc and across latitude segments.
fn latitude_projector(region: &Region, l_max: usize) -> DMatrix<f64> {
    let latitudes = region.latitude_rule(l_max + 24);
    let mut nodes = Vec::new();
    for (t, wt) in latitudes {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for (lo, hi) in region.latitude_arcs(t) {
            let len = hi - lo;
            let count = (0.5 * l_max as f64 * len).ceil() as usize + 16;
            let (gx, gw) = gauss_legendre(count);
            for (x, w) in gx.iter().zip(&gw) {
                let phi = lo + 0.5 * len * (x + 1.0);
                let (sp, cp) = phi.sin_cos();
                nodes.push((
                    UnitVector3::from_unit(nalgebra::Vector3::new(s * cp, s * sp, t)),
                    wt * w * 0.5 * len,
                ));
            }
        }
    }
    weighted_gram(nodes.iter().map(|(x, w)| (x, *w)), l_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::Cap;
    use crate::harmonics::analyze;
    use std::f64::consts::PI;

    #[test]
    fn selection_rules_only_remove_vanishing_entries() {
        let potentials = [
            analyze(|x| x.x * x.z, 2).unwrap(),
            analyze(|x| 0.7 * x.z + x.x * x.y, 2).unwrap(),
            analyze(|x| x.y * x.y * x.y - 0.3 * x.x, 3).unwrap(),
            analyze(|x| (x.x + 2.0 * x.y) * x.z * x.z + 1.0, 3).unwrap(),
        ];
        for v in &potentials {
            let l = 9;
            let grid = QuadratureGrid::polar_band(&UnitVector3::E3, -1.0, 1.0, 2 * l + 3, DEFAULT_NODE_BUDGET).unwrap();
            let raw = weighted_gram(grid.nodes.iter().map(|(x, w)| (x, w * v.evaluate(x))), l);
            let masked = multiplication_matrix(v, l).unwrap();
            let mut removed = 0;
            for (a, b) in raw.iter().zip(masked.iter()) {
                if *b == 0.0 && *a != 0.0 {
                    removed += 1;
                    assert!(a.abs() < 1e-13, "removed entry {a}");
                } else {
                    assert!((a - b).abs() < 1e-13);
                }
            }
            assert!(removed > 0);
        }
    }

    #[test]
    fn free_hamiltonian_is_kinetic_diagonal() {
        let h = assemble(&HarmonicExpansion::zeros(0), 2).unwrap();
        let expect = [0.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 3.0, 3.0];
        for i in 0..9 {
            for j in 0..9 {
                let e = if i == j { expect[i] } else { 0.0 };
                assert_eq!(h.entries()[(i, j)], e);
            }
        }
    }

    #[test]
    fn constant_potential_shifts() {
        let c = 0.7;
        let h0 = assemble(&HarmonicExpansion::zeros(0), 6).unwrap();
        let h = assemble(&HarmonicExpansion::constant(c), 6).unwrap();
        let diff = h.entries() - h0.entries() - DMatrix::identity(49, 49) * c;
        assert!(diff.amax() < 1e-12);
    }

    #[test]
    fn odd_potential_couples_neighbouring_degrees_only() {
        let v = analyze(|x| x.z, 1).unwrap();
        let m = multiplication_matrix(&v, 2).unwrap();
        let deg = degrees(2);
        let mut coupled = false;
        for i in 0..9 {
            for j in 0..9 {
                let gap = deg[i].abs_diff(deg[j]);
                if gap != 1 {
                    assert!(m[(i, j)].abs() < 1e-14, "({i},{j})");
                } else if m[(i, j)].abs() > 0.1 {
                    coupled = true;
                }
            }
        }
        assert!(coupled);
        // ⟨Y₀₀, z Y₁₀⟩ = 1/√3.
        assert!((m[(0, 2)] - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn free_ladder() {
        let s = diagonalize(&assemble(&HarmonicExpansion::zeros(0), 10).unwrap()).unwrap();
        for k in 0..=10 {
            for i in k * k..(k + 1) * (k + 1) {
                assert_eq!(s.eigenvalues[i], kinetic_level(k));
            }
        }
        assert_eq!(s.clusters.len(), 9);
    }

    #[test]
    fn xz_cluster_width() {
        let v = analyze(|x| x.x * x.z, 2).unwrap();
        let s = diagonalize(&assemble(&v, 20).unwrap()).unwrap();
        let c = s.cluster(10).unwrap();
        assert_eq!(c.range.len(), 21);
        for &l in &s.eigenvalues[c.range.clone()] {
            assert!((l - 55.0).abs() <= 0.5 + 1e-12);
        }
        let counted: usize = s.clusters.iter().map(|c| c.range.len()).sum();
        let expected: usize = s.clusters.iter().map(|c| 2 * c.k + 1).sum();
        assert_eq!(counted, expected);
        assert!(s.clusters.iter().all(|c| c.k <= 16));
        for (j, r) in s.residuals.iter().enumerate() {
            assert!(*r <= 1e-9 * (1.0 + s.eigenvalues[j].abs()));
        }
        let gram = s.eigenvectors.transpose() * &s.eigenvectors;
        assert!((gram - DMatrix::identity(441, 441)).amax() < 1e-10);
    }

    #[test]
    fn even_potential_gives_pure_parity_vectors() {
        let v = analyze(|x| x.x * x.z + 0.3 * x.y * x.y, 2).unwrap();
        let s = diagonalize(&assemble(&v, 12).unwrap()).unwrap();
        let deg = degrees(12);
        for j in 0..s.len() {
            let (mut even, mut odd) = (0.0, 0.0);
            for (i, d) in deg.iter().enumerate() {
                let c = s.eigenvectors[(i, j)] * s.eigenvectors[(i, j)];
                if d % 2 == 0 {
                    even += c;
                } else {
                    odd += c;
                }
            }
            assert!(even.min(odd) <= 1e-10);
        }
    }

    #[test]
    fn explicit_low_cluster_overlap_is_an_error() {
        let v = analyze(|x| 4.0 * x.x * x.z, 2).unwrap();
        let h = assemble(&v, 12).unwrap();
        assert!(matches!(
            diagonalize_with(&h, ClusterOptions { min_cluster: Some(2) }),
            Err(Error::ClusterOverlap { k: 2, .. })
        ));
        let s = diagonalize(&h).unwrap();
        assert_eq!(s.clusters.first().unwrap().k, 5);
    }

    #[test]
    fn compression_examples() {
        let id = DMatrix::<f64>::identity(49, 49);
        assert_eq!(compress_to_cluster(&id, 3), DMatrix::identity(7, 7));
        let m = multiplication_matrix(&analyze(|x| x.z * x.z * x.z, 3).unwrap(), 6).unwrap();
        for k in 0..=6 {
            assert!(compress_to_cluster(&m, k).amax() < 1e-12);
        }
    }

    #[test]
    fn projector_examples() {
        let full = region_projector(&Region::Full, 4).unwrap();
        assert_eq!(full.entries, DMatrix::identity(25, 25));
        let empty = region_projector(&Region::Empty, 4).unwrap();
        assert_eq!(empty.entries, DMatrix::zeros(25, 25));
        let hemi = Region::Cap(Cap::new(UnitVector3::E3, PI / 2.0));
        let p = region_projector(&hemi, 6).unwrap();
        assert!((p.entries[(0, 0)] - 0.5).abs() < 1e-8);
    }

    fn check_projector(region: &Region, l: usize) {
        let p = region_projector(region, l).unwrap();
        let n = basis_size(l) as f64;
        let trace = p.entries.trace();
        let expect = n * region.area() / (4.0 * PI);
        assert!((trace - expect).abs() <= 1e-6 * expect.max(1e-12), "{trace} vs {expect}");
        let eig = p.entries.clone().symmetric_eigenvalues();
        assert!(eig.min() >= -1e-10 && eig.max() <= 1.0 + 1e-10);
    }

    #[test]
    fn cap_projector_spectrum_and_trace() {
        check_projector(&Region::Cap(Cap::new(UnitVector3::new(0.3, -0.2, 0.9), 0.8)), 10);
        check_projector(
            &Region::Complement(Box::new(Region::Cap(Cap::new(UnitVector3::E1, 1.1)))),
            8,
        );
    }

    #[test]
    fn boolean_projector_matches_cap_projector() {
        let cap = Cap::new(UnitVector3::new(0.2, 0.5, 0.7), 0.9);
        let exact = region_projector(&Region::Cap(cap.clone()), 8).unwrap();
        let via_union = latitude_projector(&Region::Union(vec![Region::Cap(cap.clone()), Region::Empty]), 8);
        assert!((exact.entries - via_union).amax() < 1e-10);
    }

    #[test]
    fn boolean_projector_invariants() {
        let a = Region::Cap(Cap::new(UnitVector3::E3, PI / 3.0));
        let b = Region::Cap(Cap::new(UnitVector3::E1, PI / 3.0));
        check_projector(&Region::Union(vec![a.clone(), b.clone()]), 8);
        check_projector(&Region::Intersection(vec![a.clone(), b.clone()]), 8);
        let pu = region_projector(&Region::Union(vec![a.clone(), b.clone()]), 6).unwrap().entries;
        let pi = region_projector(&Region::Intersection(vec![a.clone(), b.clone()]), 6).unwrap().entries;
        let pa = region_projector(&a, 6).unwrap().entries;
        let pb = region_projector(&b, 6).unwrap().entries;
        assert!((pu + pi - pa - pb).amax() < 1e-10);
    }
}
