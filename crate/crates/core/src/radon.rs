//! Classical averaging on the space of geodesics `G(S²) ≅ S²`: the Radon (Funk)
//! transform, the second-order average, and Hamiltonian flows of these
//! averages on the geodesic sphere.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{
    build_grid, cogeodesic_position, great_circle_point, phase_gradient, bracket_of_gradients, CanonicalChart,
    PhasePoint, UnitVector3, DEFAULT_BRACKET_STEP,
};
use crate::harmonics::{analyze_values, flat_index, HarmonicExpansion, Parity};

/// Default nodes per period for the bracket term of the second-order average.
pub const DEFAULT_SECOND_AVERAGE_NODES: usize = 128;
/// Base points on the geodesic used for the invariance check.
pub const SECOND_AVERAGE_BASE_POINTS: usize = 8;
/// Base-point disagreement above which the second-order average is rejected.
pub const UNDER_RESOLVED_SPREAD: f64 = 1e-3;
/// Step of the central differences behind flow gradients.
pub const GRADIENT_STEP: f64 = 1e-6;
/// Largest accepted change of the Hamiltonian over one flow step.
pub const STEP_DRIFT_LIMIT: f64 = 1e-10;
pub const MAX_STEP_HALVINGS: usize = 20;

type Evaluator = Arc<dyn Fn(&Vector3<f64>) -> f64 + Send + Sync>;

/// A function on the geodesic sphere, optionally backed by a harmonic expansion.
#[derive(Clone)]
pub struct GeodesicFunction {
    evaluator: Evaluator,
    expansion: Option<HarmonicExpansion>,
    even: bool,
}

impl fmt::Debug for GeodesicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeodesicFunction")
            .field("expansion", &self.expansion)
            .field("even", &self.even)
            .finish()
    }
}

impl GeodesicFunction {
    pub fn from_expansion(expansion: HarmonicExpansion) -> Self {
        let even = expansion.parity() == Parity::Even;
        let e = expansion.clone();
        GeodesicFunction {
            evaluator: Arc::new(move |n| e.evaluate(n)),
            expansion: Some(expansion),
            even,
        }
    }

    pub fn from_fn<F>(f: F, even: bool) -> Self
    where
        F: Fn(&Vector3<f64>) -> f64 + Send + Sync + 'static,
    {
        GeodesicFunction {
            evaluator: Arc::new(f),
            expansion: None,
            even,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_expansion(HarmonicExpansion::constant(value))
    }

    pub fn expansion(&self) -> Option<&HarmonicExpansion> {
        self.expansion.as_ref()
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    /// Value at the unit vector `n`.
    pub fn evaluate(&self, n: &Vector3<f64>) -> f64 {
        (self.evaluator)(n)
    }

    pub fn negated(&self) -> Self {
        let inner = self.evaluator.clone();
        GeodesicFunction {
            evaluator: Arc::new(move |n| -inner(n)),
            expansion: self.expansion.as_ref().map(|e| e.scaled(-1.0)),
            even: self.even,
        }
    }

    /// Tangential gradient at `n` by central differences of `H(y/|y|)`.
    pub fn tangential_gradient(&self, n: &Vector3<f64>) -> Vector3<f64> {
        let h = GRADIENT_STEP;
        let mut g = Vector3::zeros();
        for i in 0..3 {
            let mut plus = *n;
            let mut minus = *n;
            plus[i] += h;
            minus[i] -= h;
            g[i] = (self.evaluate(&plus.normalize()) - self.evaluate(&minus.normalize())) / (2.0 * h);
        }
        g - n * g.dot(n)
    }

    /// Hamiltonian vector field `∇̃H × n` for the area form of the unit sphere.
    pub fn hamiltonian_field(&self, n: &Vector3<f64>) -> Vector3<f64> {
        self.tangential_gradient(n).cross(n)
    }
}

/// `P_ℓ(0)`, the eigenvalue of the Radon transform on degree-ℓ harmonics.
pub fn funk_multiplier(l: usize) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    let mut p = 1.0;
    let mut j = 2;
    while j <= l {
        p *= -((j - 1) as f64) / j as f64;
        j += 2;
    }
    p
}

/// Coefficients of `I(V)` on the geodesic sphere.
pub fn radon_expansion(v: &HarmonicExpansion) -> HarmonicExpansion {
    let l_max = v.max_degree();
    let mut c = v.coefficients().to_vec();
    for l in 0..=l_max {
        let mult = funk_multiplier(l);
        for m in -(l as i64)..=(l as i64) {
            c[flat_index(l, m)] *= mult;
        }
    }
    HarmonicExpansion::from_coefficients(l_max, c).expect("same size")
}

/// Nodes used by [`radon_quadrature`] for a potential of the given degree.
pub fn circle_nodes(degree: usize) -> usize {
    4 * degree + 8
}

/// `(1/2π)∫ V(γ_n(s)) ds` by the equispaced rule on the great circle with normal `n`.
pub fn radon_quadrature(v: &HarmonicExpansion, n: &UnitVector3) -> f64 {
    let count = circle_nodes(v.effective_degree());
    (0..count)
        .map(|j| v.evaluate(&great_circle_point(n, 2.0 * PI * j as f64 / count as f64)))
        .sum::<f64>()
        / count as f64
}

/// `I(V)` as a function on the geodesic sphere.
pub fn radon(v: &HarmonicExpansion) -> GeodesicFunction {
    GeodesicFunction::from_expansion(radon_expansion(v))
}

fn omega(u: &[f64; 4], v: &[f64; 4]) -> f64 {
    bracket_of_gradients(u, v)
}

/// Bracket term `(1/2π)∫₀^{2π}∫₀^t {V∘φᵗ, V∘φˢ} ds dt` at one base point.
///
/// The phase gradients of `V∘φᵗ` form a trigonometric polynomial in `t`; its
/// discrete Fourier coefficients give the double integral in closed form.
pub fn bracket_average(v: &HarmonicExpansion, base: &PhasePoint, nodes: usize, h: f64) -> Result<f64> {
    let chart = CanonicalChart::for_point(&base.base, &base.codir);
    let coords = chart.to_coords(&base.base, &base.codir);
    let mut samples = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let t = 2.0 * PI * j as f64 / nodes as f64;
        let pulled = move |x: &Vector3<f64>, xi: &Vector3<f64>| v.evaluate(&cogeodesic_position(x, xi, t));
        samples.push(phase_gradient(&pulled, &chart, coords, h)?);
    }
    let nf = nodes as f64;
    let mut mean = [0.0; 4];
    for w in &samples {
        for i in 0..4 {
            mean[i] += w[i] / nf;
        }
    }
    let mut s = [0.0; 4];
    let mut swirl = 0.0;
    for k in 1..nodes.div_ceil(2) {
        let mut alpha = [0.0; 4];
        let mut beta = [0.0; 4];
        for (j, w) in samples.iter().enumerate() {
            let (sn, cs) = (2.0 * PI * (k * j % nodes) as f64 / nf).sin_cos();
            for i in 0..4 {
                alpha[i] += 2.0 * w[i] * cs / nf;
                beta[i] += 2.0 * w[i] * sn / nf;
            }
        }
        let kf = k as f64;
        for i in 0..4 {
            s[i] += beta[i] / kf;
        }
        swirl += omega(&alpha, &beta) / kf;
    }
    let value = 2.0 * omega(&mean, &s) - swirl;
    if !value.is_finite() {
        return Err(Error::NumericalBreakdown("non-finite bracket average".into()));
    }
    Ok(value)
}

/// `I(V²)` at the geodesic `n`.
pub fn radon_of_square(v: &HarmonicExpansion, n: &UnitVector3) -> Result<f64> {
    let square = v.product(v)?;
    Ok(radon_expansion(&square).evaluate(n))
}

/// Relative size below which the non-constant part of `I(V)` counts as zero.
pub const CONSTANT_AVERAGE_TOLERANCE: f64 = 1e-10;

/// Rejects potentials whose Radon transform is not constant; the second-order
/// average is only flow-invariant for odd potentials up to a constant.
pub fn require_constant_average(v: &HarmonicExpansion) -> Result<()> {
    let r = radon_expansion(v);
    let c = r.coefficients();
    let norm = c.iter().skip(1).map(|x| x * x).sum::<f64>().sqrt();
    let scale = v.coefficients().iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > CONSTANT_AVERAGE_TOLERANCE * scale.max(1.0) {
        return Err(Error::NonConstantAverage { norm });
    }
    Ok(())
}

/// Second-order average at every base point `φ^{2πj/8}` on the geodesic `n`.
pub fn second_average_samples(v: &HarmonicExpansion, n: &UnitVector3, nodes: usize) -> Result<Vec<f64>> {
    require_constant_average(v)?;
    samples_with_square(v, &radon_expansion(&v.product(v)?), n, nodes)
}

fn samples_with_square(
    v: &HarmonicExpansion,
    radon_square: &HarmonicExpansion,
    n: &UnitVector3,
    nodes: usize,
) -> Result<Vec<f64>> {
    let square = radon_square.evaluate(n);
    (0..SECOND_AVERAGE_BASE_POINTS)
        .map(|j| {
            let base = PhasePoint::on_geodesic(n, 2.0 * PI * j as f64 / SECOND_AVERAGE_BASE_POINTS as f64);
            Ok(square - bracket_average(v, &base, nodes, DEFAULT_BRACKET_STEP)?)
        })
        .collect()
}

/// `I⁽²⁾(V)(n)`, averaged over base points on the geodesic.
///
/// Fails with [`Error::NonConstantAverage`] unless `I(V)` is constant, and with
/// [`Error::UnderResolved`] when the base points disagree by more than
/// [`UNDER_RESOLVED_SPREAD`].
pub fn second_average(v: &HarmonicExpansion, n: &UnitVector3, nodes: usize) -> Result<f64> {
    averaged(second_average_samples(v, n, nodes)?)
}

fn averaged(samples: Vec<f64>) -> Result<f64> {
    let spread = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - samples.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread > UNDER_RESOLVED_SPREAD {
        return Err(Error::UnderResolved { spread });
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Cached expansion of `I⁽²⁾(V)` at degree `max(8, 2·deg V)` for flow integration.
pub fn second_average_function(v: &HarmonicExpansion, nodes: usize) -> Result<GeodesicFunction> {
    require_constant_average(v)?;
    let l_max = (2 * v.effective_degree()).max(8);
    let grid = build_grid(2 * l_max + 8)?;
    let radon_square = radon_expansion(&v.product(v)?);
    let values: Vec<f64> = grid
        .nodes
        .par_iter()
        .map(|(n, _)| averaged(samples_with_square(v, &radon_square, n, nodes)?))
        .collect::<Result<_>>()?;
    let mut expansion = analyze_values(&grid, &values, l_max);
    // I⁽²⁾ is orientation independent; drop the odd degrees, which only carry quadrature noise.
    let mut c = expansion.coefficients().to_vec();
    for l in (1..=l_max).step_by(2) {
        for m in -(l as i64)..=(l as i64) {
            c[flat_index(l, m)] = 0.0;
        }
    }
    expansion = HarmonicExpansion::from_coefficients(l_max, c)?;
    Ok(GeodesicFunction::from_expansion(expansion))
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<UnitVector3>,
    pub energies: Vec<f64>,
}

impl FlowTrajectory {
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energies[0];
        self.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }
}

fn rk4_step(h: &GeodesicFunction, n: &Vector3<f64>, tau: f64) -> Vector3<f64> {
    let k1 = h.hamiltonian_field(n);
    let k2 = h.hamiltonian_field(&(n + k1 * (0.5 * tau)).normalize());
    let k3 = h.hamiltonian_field(&(n + k2 * (0.5 * tau)).normalize());
    let k4 = h.hamiltonian_field(&(n + k3 * tau).normalize());
    n + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (tau / 6.0)
}

/// Integrates the flow of `h` from `n0` over `[0, horizon]` (negative horizons
/// run backwards), calling `observer(t, n)` after each accepted step. The
/// observer returns `false` to stop early.
pub fn integrate_flow<F>(h: &GeodesicFunction, n0: &UnitVector3, horizon: f64, dt: f64, mut observer: F) -> Result<()>
where
    F: FnMut(f64, &UnitVector3) -> bool,
{
    if !(dt > 0.0) || !horizon.is_finite() {
        return Err(Error::Config(format!("flow step {dt} and horizon {horizon} must be positive and finite")));
    }
    let steps = (horizon.abs() / dt).ceil().max(1.0) as usize;
    let tau = horizon / steps as f64;
    let mut n = *n0;
    let mut energy = h.evaluate(&n);
    for step in 0..steps {
        let t0 = tau * step as f64;
        let mut halvings = 0;
        let next = loop {
            let pieces = 1usize << halvings;
            let sub = tau / pieces as f64;
            let mut y = *n.vector();
            let mut worst = 0.0f64;
            let mut e_prev = energy;
            for _ in 0..pieces {
                y = *UnitVector3::from_unit(rk4_step(h, &y, sub)).vector();
                let e = h.evaluate(&y);
                worst = worst.max((e - e_prev).abs());
                e_prev = e;
            }
            if worst <= STEP_DRIFT_LIMIT {
                energy = e_prev;
                break UnitVector3::from_unit(y);
            }
            halvings += 1;
            if halvings > MAX_STEP_HALVINGS {
                return Err(Error::FlowStepRejected {
                    time: t0,
                    drift: worst,
                    halvings: MAX_STEP_HALVINGS,
                });
            }
        };
        n = next;
        if !observer(t0 + tau, &n) {
            break;
        }
    }
    Ok(())
}

/// Sampled trajectory of the Hamiltonian flow of `h` with nominal step `dt`.
pub fn hamiltonian_flow(h: &GeodesicFunction, n0: &UnitVector3, horizon: f64, dt: f64) -> Result<FlowTrajectory> {
    let mut traj = FlowTrajectory {
        times: vec![0.0],
        points: vec![*n0],
        energies: vec![h.evaluate(n0)],
    };
    integrate_flow(h, n0, horizon, dt, |t, n| {
        traj.times.push(t);
        traj.points.push(*n);
        traj.energies.push(h.evaluate(n));
        true
    })?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{fibonacci_sphere, geodesic_flow, gauss_legendre};
    use crate::harmonics::{analyze, basis_size, HarmonicIndex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng) -> UnitVector3 {
        loop {
            let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let r = v.norm();
            if r > 0.1 && r < 1.0 {
                return UnitVector3::from_unit(v / r);
            }
        }
    }

    #[test]
    fn multiplier_examples() {
        assert_eq!(funk_multiplier(0), 1.0);
        assert_eq!(funk_multiplier(1), 0.0);
        assert_eq!(funk_multiplier(2), -0.5);
        // Bonnet recurrence at 0: P_{l+1}(0) = −l/(l+1)·P_{l−1}(0).
        let (mut prev, mut cur) = (1.0, 0.0);
        for l in 1..20 {
            let next = -(l as f64) / (l as f64 + 1.0) * prev;
            prev = cur;
            cur = next;
            assert!((funk_multiplier(l + 1) - cur).abs() < 1e-15);
        }
    }

    #[test]
    fn radon_examples() {
        let one = radon(&HarmonicExpansion::constant(1.0));
        let odd = HarmonicExpansion::from_terms([(1, 0, 1.0), (3, 2, -0.4), (5, -1, 0.3)]).unwrap();
        let xz = analyze(|x| x.x * x.z, 2).unwrap();
        let ixz = radon(&xz);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = random_unit(&mut rng);
            assert!((one.evaluate(&n) - 1.0).abs() < 1e-14);
            assert!(radon_quadrature(&odd, &n).abs() < 1e-13);
            assert!(radon(&odd).evaluate(&n).abs() < 1e-13);
            let expect = -n.x() * n.z() / 2.0;
            assert!((radon_quadrature(&xz, &n) - expect).abs() < 1e-12);
            assert!((ixz.evaluate(&n) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn radon_diagonalizes_harmonics() {
        let pts = fibonacci_sphere(12);
        for i in 0..basis_size(12) {
            let idx = HarmonicIndex::from_flat(i);
            let y = HarmonicExpansion::from_terms([(idx.degree, idx.order, 1.0)]).unwrap();
            let mult = funk_multiplier(idx.degree);
            for n in &pts {
                assert!((radon_quadrature(&y, n) - mult * y.evaluate(n)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn radon_is_linear() {
        let v = HarmonicExpansion::from_terms([(2, 1, 0.3), (4, -3, 1.2)]).unwrap();
        let w = HarmonicExpansion::from_terms([(3, 0, -0.7), (2, 2, 0.5)]).unwrap();
        let combo = v.scaled(1.7).add(&w.scaled(-0.4));
        for n in fibonacci_sphere(20) {
            let lhs = radon_quadrature(&combo, &n);
            let rhs = 1.7 * radon_quadrature(&v, &n) - 0.4 * radon_quadrature(&w, &n);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    /// Brute-force bracket term: pairwise Poisson brackets on a nested Gauss–Legendre rule.
    fn bracket_oracle(v: &HarmonicExpansion, base: &PhasePoint, nodes: usize) -> f64 {
        let (gx, gw) = gauss_legendre(nodes);
        let mut total = 0.0;
        for (xt, wt) in gx.iter().zip(&gw) {
            let t = PI * (xt + 1.0);
            let ft = move |x: &Vector3<f64>, xi: &Vector3<f64>| v.evaluate(&cogeodesic_position(x, xi, t));
            let mut inner = 0.0;
            let (hx, hw) = gauss_legendre(24);
            for (xs, ws) in hx.iter().zip(&hw) {
                let s = 0.5 * t * (xs + 1.0);
                let fs = move |x: &Vector3<f64>, xi: &Vector3<f64>| v.evaluate(&cogeodesic_position(x, xi, s));
                inner += ws * 0.5 * t * crate::geom::poisson_bracket(&ft, &fs, base, DEFAULT_BRACKET_STEP).unwrap();
            }
            total += wt * PI * inner;
        }
        total / (2.0 * PI)
    }

    #[test]
    fn bracket_average_matches_brute_force() {
        let v = HarmonicExpansion::from_terms([(1, 0, 0.8), (2, 1, 0.5), (3, -2, 0.3)]).unwrap();
        let base = PhasePoint::on_geodesic(&UnitVector3::new(0.3, -0.5, 0.8), 0.7);
        let fast = bracket_average(&v, &base, 64, DEFAULT_BRACKET_STEP).unwrap();
        let slow = bracket_oracle(&v, &base, 48);
        assert!((fast - slow).abs() < 1e-6, "{fast} vs {slow}");
    }

    #[test]
    fn second_average_of_constant() {
        let c = 0.37;
        let v = HarmonicExpansion::constant(c);
        let value = second_average(&v, &UnitVector3::new(0.2, 0.4, 0.9), 32).unwrap();
        assert!((value - c * c).abs() < 1e-10);
    }

    #[test]
    fn second_average_of_z_closed_form() {
        let z = analyze(|x| x.z, 1).unwrap();
        for n in fibonacci_sphere(7) {
            let sq = radon_of_square(&z, &n).unwrap();
            assert!((sq - (1.0 - n.z() * n.z()) / 2.0).abs() < 1e-10);
            let samples = second_average_samples(&z, &n, 32).unwrap();
            for s in &samples {
                assert!((s - (1.0 - 3.0 * n.z() * n.z()) / 2.0).abs() < 1e-6, "{s} at {n:?}");
            }
            let back = second_average(&z, &n.antipode(), 32).unwrap();
            assert!((back - samples[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn second_average_invariance_for_generic_odd_potential() {
        let v = HarmonicExpansion::from_terms([(1, 1, 0.4), (3, 0, 0.6), (3, -2, 0.3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..3 {
            let n = random_unit(&mut rng);
            let s = second_average_samples(&v, &n, 64).unwrap();
            let spread = s.iter().cloned().fold(f64::MIN, f64::max) - s.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread < 1e-6, "{spread}");
        }
    }

    #[test]
    fn second_average_rejects_even_potentials() {
        let xz = analyze(|x| 4.0 * x.x * x.z, 2).unwrap();
        let n = UnitVector3::new(0.3, 0.1, -0.8);
        assert!(matches!(second_average(&xz, &n, 32), Err(Error::NonConstantAverage { .. })));
        assert!(matches!(second_average_function(&xz, 32), Err(Error::NonConstantAverage { .. })));
        let shifted = analyze(|x| x.z + 0.5, 1).unwrap();
        assert!(second_average(&shifted, &n, 32).is_ok());
    }

    #[test]
    fn constant_flow_is_frozen() {
        let h = GeodesicFunction::constant(2.0);
        let n0 = UnitVector3::new(0.3, 0.1, -0.8);
        let traj = hamiltonian_flow(&h, &n0, 3.0, 0.1).unwrap();
        assert!(traj.points.iter().all(|p| p == &n0));
    }

    #[test]
    fn height_flow_rotates_about_e3() {
        let h = GeodesicFunction::from_expansion(analyze(|x| x.z, 1).unwrap());
        let n0 = UnitVector3::new(0.6, -0.2, 0.5);
        let traj = hamiltonian_flow(&h, &n0, 1.0, 0.01).unwrap();
        let end = traj.points.last().unwrap();
        let expect = n0.rotate_z(1.0);
        assert!((end.vector() - expect.vector()).norm() < 1e-8);
        assert!(traj.max_energy_drift() < 1e-8);
    }

    #[test]
    fn xz_flow_leaves_the_pole() {
        let h = radon(&analyze(|x| x.x * x.z, 2).unwrap());
        let g = h.tangential_gradient(&UnitVector3::E3);
        assert!((g.x + 0.5).abs() < 1e-8 && g.y.abs() < 1e-8);
        let traj = hamiltonian_flow(&h, &UnitVector3::E3, 10.0, 0.01).unwrap();
        assert!(traj.points.iter().any(|p| p.z() <= 0.999));
        assert!(traj.points.iter().all(|p| (p.norm() - 1.0).abs() < 1e-9));
        assert!(traj.max_energy_drift() < 1e-8);
    }

    #[test]
    fn reversed_hamiltonian_reverses_time() {
        let h = radon(&analyze(|x| x.x * x.z + 0.3 * x.y * x.y, 2).unwrap());
        let n0 = UnitVector3::new(0.1, 0.7, 0.4);
        let fwd = hamiltonian_flow(&h.negated(), &n0, 2.0, 0.01).unwrap();
        let back = hamiltonian_flow(&h, &n0, -2.0, 0.01).unwrap();
        let (a, b) = (fwd.points.last().unwrap(), back.points.last().unwrap());
        assert!((a.vector() - b.vector()).norm() < 1e-8);
    }

    #[test]
    fn flow_stays_on_level_set_for_geodesic_flow_sample() {
        let p = PhasePoint::on_geodesic(&UnitVector3::new(0.0, 0.6, 0.8), 0.0);
        let q = geodesic_flow(&p, 0.3);
        assert!((q.geodesic().vector() - p.geodesic().vector()).norm() < 1e-12);
    }
}
