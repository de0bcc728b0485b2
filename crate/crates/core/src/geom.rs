//! Geometry of the round 2-sphere and its cotangent bundle.
//!
//! Points of S² and points of the space of oriented great circles share the
//! [`UnitVector3`] type: a great circle is identified with its oriented unit
//! normal. Cotangent vectors are identified with tangent vectors through the
//! round metric, so a phase-space point is a pair `(x, ξ)` with `x·ξ = 0`.

use std::f64::consts::PI;
use std::ops::Deref;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Default cap on the number of nodes of any quadrature grid.
pub const DEFAULT_NODE_BUDGET: usize = 4_000_000;

/// Default finite-difference step for Poisson brackets.
pub const DEFAULT_BRACKET_STEP: f64 = 1e-5;

/// A unit vector in R³: a point of S², or an oriented great circle via its normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vector3<f64>);

impl UnitVector3 {
    pub const E1: UnitVector3 = UnitVector3(Vector3::new(1.0, 0.0, 0.0));
    pub const E2: UnitVector3 = UnitVector3(Vector3::new(0.0, 1.0, 0.0));
    pub const E3: UnitVector3 = UnitVector3(Vector3::new(0.0, 0.0, 1.0));

    /// Normalizes `(x, y, z)`.
    ///
    /// Panics if the vector is zero or not finite; use [`UnitVector3::try_new`]
    /// for fallible construction.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self::try_new(Vector3::new(x, y, z)).expect("UnitVector3::new needs a finite nonzero vector")
    }

    pub fn try_new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NumericalBreakdown(format!(
                "cannot normalize vector ({}, {}, {})",
                v.x, v.y, v.z
            )));
        }
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(UnitVector3(v));
        }
        Ok(UnitVector3(v / norm))
    }

    /// Wraps a vector already known to have unit length.
    ///
    /// Renormalizes only when the norm is off by more than a few ulps so that
    /// unit inputs pass through bit-for-bit.
    pub fn from_unit(v: Vector3<f64>) -> Self {
        let n2 = v.norm_squared();
        if (n2 - 1.0).abs() <= 8.0 * f64::EPSILON {
            UnitVector3(v)
        } else {
            UnitVector3(v / n2.sqrt())
        }
    }

    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::from_unit(Vector3::new(st * cp, st * sp, ct))
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn antipode(&self) -> Self {
        UnitVector3(-self.0)
    }

    /// Angle in `[0, π]`, accurate near 0 and π.
    pub fn angle_to(&self, other: &UnitVector3) -> f64 {
        self.0.cross(&other.0).norm().atan2(self.0.dot(&other.0))
    }

    /// The deterministic orthonormal frame `(a, b)` with `(a, b, self)` right-handed.
    ///
    /// `a = normalize(e₃ × n)` away from the poles, `a = e₁` (orthogonalized) near them.
    pub fn frame(&self) -> (Vector3<f64>, Vector3<f64>) {
        let n = &self.0;
        let c = Vector3::z().cross(n);
        let cn = c.norm();
        let a = if cn > 1e-6 {
            c / cn
        } else {
            let e1 = Vector3::x();
            let v = e1 - n * n.dot(&e1);
            v / v.norm()
        };
        let b = n.cross(&a);
        (a, b)
    }

    /// Rotation about e₃ by `angle` (counterclockwise seen from +e₃).
    pub fn rotate_z(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let v = &self.0;
        UnitVector3(Vector3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z))
    }
}

impl serde::Serialize for UnitVector3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x(), self.y(), self.z()].serialize(s)
    }
}

impl Deref for UnitVector3 {
    type Target = Vector3<f64>;

    fn deref(&self) -> &Vector3<f64> {
        &self.0
    }
}

/// A point of the unit cotangent bundle S*S².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub base: UnitVector3,
    pub codir: UnitVector3,
}

impl PhasePoint {
    pub fn new(base: UnitVector3, codir: UnitVector3) -> Result<Self> {
        let d = base.dot(&codir);
        if d.abs() > 1e-10 {
            return Err(Error::NumericalBreakdown(format!(
                "codirection is not tangent to the base point (x·ξ = {d:.3e})"
            )));
        }
        // Remove the residual normal component so the invariant holds to rounding.
        let codir = UnitVector3::try_new(*codir - *base * d)?;
        Ok(PhasePoint { base, codir })
    }

    /// The oriented great circle `x × ξ` traced by this point under the geodesic flow.
    pub fn geodesic(&self) -> UnitVector3 {
        UnitVector3::from_unit(self.base.cross(&self.codir))
    }

    /// Start point `(γ(0), γ'(0))` of the great circle with normal `gamma`.
    pub fn on_geodesic(gamma: &UnitVector3, s: f64) -> Self {
        let (a, b) = gamma.frame();
        let (sn, cs) = s.sin_cos();
        PhasePoint {
            base: UnitVector3::from_unit(a * cs + b * sn),
            codir: UnitVector3::from_unit(b * cs - a * sn),
        }
    }
}

/// Geodesic flow on S*S²: rotation by angle `t` in the plane spanned by `x` and `ξ`.
pub fn geodesic_flow(p: &PhasePoint, t: f64) -> PhasePoint {
    let (s, c) = t.sin_cos();
    let x = *p.base * c + *p.codir * s;
    let xi = *p.codir * c - *p.base * s;
    PhasePoint {
        base: UnitVector3::from_unit(x),
        codir: UnitVector3::from_unit(xi),
    }
}

/// Position after time `t` of the Hamiltonian flow of `‖ξ‖` on T*S² minus the
/// zero section: unit speed for every `ξ ≠ 0`, so functions pulled back by it
/// stay 0-homogeneous in `ξ`.
pub fn cogeodesic_position(x: &Vector3<f64>, xi: &Vector3<f64>, t: f64) -> Vector3<f64> {
    let (s, c) = t.sin_cos();
    x * c + xi * (s / xi.norm())
}

/// Unit-speed parametrization `cos s · a + sin s · b` of the great circle with normal `gamma`.
pub fn great_circle_point(gamma: &UnitVector3, s: f64) -> UnitVector3 {
    let (a, b) = gamma.frame();
    let (sn, cs) = s.sin_cos();
    UnitVector3::from_unit(a * cs + b * sn)
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    if n == 0 {
        return (nodes, weights);
    }
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Newton from cos(...) converges to the roots in descending order.
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A weighted point set on S² that integrates spherical polynomials exactly.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub nodes: Vec<(UnitVector3, f64)>,
    pub polynomial_degree: usize,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(&UnitVector3) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|(x, w)| w * f(x)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|(_, w)| w).sum()
    }

    /// Product grid on the band `t_lo ≤ x·axis ≤ t_hi`: Gauss–Legendre in the
    /// axial coordinate and equispaced azimuths, exact for polynomials of
    /// total degree `≤ degree` restricted to the band.
    pub fn polar_band(
        axis: &UnitVector3,
        t_lo: f64,
        t_hi: f64,
        degree: usize,
        budget: usize,
    ) -> Result<Self> {
        let n_t = degree / 2 + 1;
        let n_phi = degree + 1;
        let count = n_t.checked_mul(n_phi).unwrap_or(usize::MAX);
        if count > budget {
            return Err(Error::BudgetExceeded {
                degree,
                nodes: count,
                budget,
            });
        }
        let (a, b) = axis.frame();
        let (gl_x, gl_w) = gauss_legendre(n_t);
        let half = 0.5 * (t_hi - t_lo);
        let mid = 0.5 * (t_hi + t_lo);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(count);
        for (xi, wi) in gl_x.iter().zip(&gl_w) {
            let t = mid + half * xi;
            let s = (1.0 - t * t).max(0.0).sqrt();
            let w = wi * half * dphi;
            for j in 0..n_phi {
                let (sp, cp) = (j as f64 * dphi).sin_cos();
                let v = a * (s * cp) + b * (s * sp) + **axis * t;
                nodes.push((UnitVector3::from_unit(v), w));
            }
        }
        Ok(QuadratureGrid {
            nodes,
            polynomial_degree: degree,
        })
    }
}

/// Gauss–Legendre × equispaced-azimuth grid exact to the requested polynomial degree.
pub fn build_grid(polynomial_degree: usize) -> Result<QuadratureGrid> {
    build_grid_with_budget(polynomial_degree, DEFAULT_NODE_BUDGET)
}

pub fn build_grid_with_budget(polynomial_degree: usize, budget: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::polar_band(&UnitVector3::E3, -1.0, 1.0, polynomial_degree, budget)
}

/// Near-uniform deterministic point set on S² (golden-angle spiral).
pub fn fibonacci_sphere(count: usize) -> Vec<UnitVector3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            UnitVector3::from_unit(Vector3::new(r * c, r * s, z))
        })
        .collect()
}

/// Canonical coordinates `(θ, φ, p_θ, p_φ)` on T*S² relative to a pole axis.
#[derive(Debug, Clone, Copy)]
pub struct CanonicalChart {
    pub pole_axis: UnitVector3,
    e1: Vector3<f64>,
    e2: Vector3<f64>,
}

impl CanonicalChart {
    pub fn new(pole_axis: UnitVector3) -> Self {
        let (e1, e2) = pole_axis.frame();
        CanonicalChart { pole_axis, e1, e2 }
    }

    /// A chart whose pole sits 90° away from `x`, chosen along `x × ξ` when `ξ ≠ 0`.
    pub fn for_point(x: &Vector3<f64>, xi: &Vector3<f64>) -> Self {
        let c = x.cross(xi);
        let pole = if c.norm() > 1e-8 {
            c.normalize()
        } else {
            let (a, _) = UnitVector3::from_unit(*x).frame();
            a
        };
        Self::new(UnitVector3::from_unit(pole))
    }

    /// Polar angle of `x` measured from the pole axis.
    pub fn polar_angle(&self, x: &Vector3<f64>) -> f64 {
        let z = x.dot(&self.pole_axis);
        let r = (x - *self.pole_axis * z).norm();
        r.atan2(z)
    }

    pub fn to_coords(&self, x: &Vector3<f64>, xi: &Vector3<f64>) -> [f64; 4] {
        let z = x.dot(&self.pole_axis);
        let u = x.dot(&self.e1);
        let v = x.dot(&self.e2);
        let s = (u * u + v * v).sqrt();
        let theta = s.atan2(z);
        let phi = v.atan2(u);
        let (e_theta, e_phi) = self.unit_vectors(theta, phi);
        [theta, phi, xi.dot(&e_theta), s * xi.dot(&e_phi)]
    }

    pub fn from_coords(&self, c: [f64; 4]) -> (Vector3<f64>, Vector3<f64>) {
        let [theta, phi, p_theta, p_phi] = c;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let x = self.e1 * (st * cp) + self.e2 * (st * sp) + *self.pole_axis * ct;
        let (e_theta, e_phi) = self.unit_vectors(theta, phi);
        let xi = e_theta * p_theta + e_phi * (p_phi / st);
        (x, xi)
    }

    pub fn phase_point(&self, c: [f64; 4]) -> Result<PhasePoint> {
        let (x, xi) = self.from_coords(c);
        PhasePoint::new(UnitVector3::try_new(x)?, UnitVector3::try_new(xi)?)
    }

    fn unit_vectors(&self, theta: f64, phi: f64) -> (Vector3<f64>, Vector3<f64>) {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let e_theta = self.e1 * (ct * cp) + self.e2 * (ct * sp) - *self.pole_axis * st;
        let e_phi = self.e2 * cp - self.e1 * sp;
        (e_theta, e_phi)
    }
}

/// Gradient `(∂_θ, ∂_φ, ∂_{p_θ}, ∂_{p_φ})` of a phase function by central differences.
pub fn phase_gradient<F>(f: &F, chart: &CanonicalChart, coords: [f64; 4], h: f64) -> Result<[f64; 4]>
where
    F: Fn(&Vector3<f64>, &Vector3<f64>) -> f64 + ?Sized,
{
    let mut grad = [0.0; 4];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut plus = coords;
        let mut minus = coords;
        plus[i] += h;
        minus[i] -= h;
        let (xp, pp) = chart.from_coords(plus);
        let (xm, pm) = chart.from_coords(minus);
        *g = (f(&xp, &pp) - f(&xm, &pm)) / (2.0 * h);
        if !g.is_finite() {
            return Err(Error::NumericalBreakdown(format!(
                "non-finite phase derivative along coordinate {i}"
            )));
        }
    }
    Ok(grad)
}

/// Bracket of two gradients: `∂_p f·∂_q g − ∂_q f·∂_p g`, so that `{p, q} = 1`
/// and `{‖ξ‖²/2, g}` is the derivative of `g` along the geodesic flow.
pub fn bracket_of_gradients(df: &[f64; 4], dg: &[f64; 4]) -> f64 {
    df[2] * dg[0] + df[3] * dg[1] - df[0] * dg[2] - df[1] * dg[3]
}

/// Poisson bracket at `p`, computed in a chart whose pole is 90° away from `p.base`.
pub fn poisson_bracket<F, G>(f: &F, g: &G, p: &PhasePoint, h: f64) -> Result<f64>
where
    F: Fn(&Vector3<f64>, &Vector3<f64>) -> f64 + ?Sized,
    G: Fn(&Vector3<f64>, &Vector3<f64>) -> f64 + ?Sized,
{
    let chart = CanonicalChart::for_point(&p.base, &p.codir);
    poisson_bracket_in_chart(f, g, p, &chart, h)
}

pub fn poisson_bracket_in_chart<F, G>(
    f: &F,
    g: &G,
    p: &PhasePoint,
    chart: &CanonicalChart,
    h: f64,
) -> Result<f64>
where
    F: Fn(&Vector3<f64>, &Vector3<f64>) -> f64 + ?Sized,
    G: Fn(&Vector3<f64>, &Vector3<f64>) -> f64 + ?Sized,
{
    let theta = chart.polar_angle(&p.base);
    if !(0.2..=PI - 0.2).contains(&theta) {
        return Err(Error::NumericalBreakdown(format!(
            "evaluation point at polar angle {theta:.3} is too close to the chart pole"
        )));
    }
    let coords = chart.to_coords(&p.base, &p.codir);
    let df = phase_gradient(f, chart, coords, h)?;
    let dg = phase_gradient(g, chart, coords, h)?;
    let value = bracket_of_gradients(&df, &dg);
    if !value.is_finite() {
        return Err(Error::NumericalBreakdown("non-finite Poisson bracket".into()));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Vector3<f64>, b: &Vector3<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn geodesic_flow_examples() {
        let p = PhasePoint::new(UnitVector3::E3, UnitVector3::E1).unwrap();
        let q = geodesic_flow(&p, 0.0);
        assert!(close(&q.base, &UnitVector3::E3, 0.0));
        assert!(close(&q.codir, &UnitVector3::E1, 0.0));

        let q = geodesic_flow(&p, PI / 2.0);
        assert!(close(&q.base, &UnitVector3::E1, 1e-15));
        assert!(close(&q.codir, &-*UnitVector3::E3, 1e-15));

        let q = geodesic_flow(&p, 2.0 * PI);
        assert!(close(&q.base, &UnitVector3::E3, 1e-12));
        assert!(close(&q.codir, &UnitVector3::E1, 1e-12));
    }

    #[test]
    fn great_circle_examples() {
        let p = great_circle_point(&UnitVector3::E3, 0.0);
        assert!(close(&p, &UnitVector3::E1, 1e-15));
        for i in 0..50 {
            let s = i as f64 * 0.37;
            assert!(great_circle_point(&UnitVector3::E3, s).z().abs() < 1e-12);
        }
        let start = great_circle_point(&UnitVector3::E1, 0.0);
        let end = great_circle_point(&UnitVector3::E1, 2.0 * PI);
        assert!(close(&start, &end, 1e-12));
    }

    #[test]
    fn frame_is_right_handed() {
        for n in fibonacci_sphere(200) {
            let (a, b) = n.frame();
            assert!((a.norm() - 1.0).abs() < 1e-14);
            assert!(a.dot(&n).abs() < 1e-14);
            assert!((a.cross(&b) - *n).norm() < 1e-14);
        }
        let (a, _) = UnitVector3::E3.frame();
        assert_eq!(a, Vector3::x());
    }

    #[test]
    fn gauss_legendre_is_exact() {
        let (x, w) = gauss_legendre(7);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-15);
        // degree 12 moment
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((m - 2.0 / 13.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(400);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2)).sum();
        assert!((m - 2.0 / 3.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn grid_moments() {
        let g = build_grid(10).unwrap();
        assert!((g.integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-12);
        assert!((g.integrate(|x| x.z() * x.z()) - 4.0 * PI / 3.0).abs() < 1e-12);
        let g4 = build_grid(4).unwrap();
        assert!(g4.integrate(|x| x.z()).abs() < 1e-14);
    }

    #[test]
    fn grid_budget_is_enforced() {
        let err = build_grid_with_budget(100, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn canonical_pair_bracket() {
        let chart = CanonicalChart::new(UnitVector3::E3);
        let p = PhasePoint::new(UnitVector3::new(1.0, 0.2, 0.3), UnitVector3::new(-0.3, 0.0, 1.0)).unwrap();
        let p_theta = |x: &Vector3<f64>, xi: &Vector3<f64>| chart.to_coords(x, xi)[2];
        let theta = |x: &Vector3<f64>, xi: &Vector3<f64>| chart.to_coords(x, xi)[0];
        let b = poisson_bracket_in_chart(&p_theta, &theta, &p, &chart, DEFAULT_BRACKET_STEP).unwrap();
        assert!((b - 1.0).abs() < 1e-8, "{b}");
    }

    #[test]
    fn self_bracket_vanishes() {
        let p = PhasePoint::new(UnitVector3::new(0.3, -0.4, 0.8), UnitVector3::new(1.0, 0.0, -0.375)).unwrap();
        let f = |x: &Vector3<f64>, xi: &Vector3<f64>| x.x * xi.z + (x.y * 3.0).sin() * xi.norm();
        let b = poisson_bracket(&f, &f, &p, DEFAULT_BRACKET_STEP).unwrap();
        assert!(b.abs() < 1e-9);
    }

    #[test]
    fn kinetic_bracket_is_flow_derivative() {
        // oracle: d/dt V(φᵗ p) at t = 0 by central differences along the flow
        let p = PhasePoint::new(UnitVector3::E1, UnitVector3::E3).unwrap();
        let v = |x: &Vector3<f64>| x.z;
        let dt = 1e-5;
        let oracle = (v(&geodesic_flow(&p, dt).base) - v(&geodesic_flow(&p, -dt).base)) / (2.0 * dt);
        assert!((oracle - 1.0).abs() < 1e-9);
        let kinetic = |_: &Vector3<f64>, xi: &Vector3<f64>| 0.5 * xi.norm_squared();
        let pot = |x: &Vector3<f64>, _: &Vector3<f64>| v(x);
        let b = poisson_bracket(&kinetic, &pot, &p, DEFAULT_BRACKET_STEP).unwrap();
        assert!((b - oracle).abs() < 1e-6, "{b} vs {oracle}");
    }

    #[test]
    fn chart_round_trip() {
        let chart = CanonicalChart::new(UnitVector3::new(0.2, 0.5, -0.7));
        for (i, x) in fibonacci_sphere(300).into_iter().enumerate() {
            let theta = chart.polar_angle(&x);
            if !(0.2..=PI - 0.2).contains(&theta) {
                continue;
            }
            let (a, b) = x.frame();
            let xi = a * (i as f64 * 0.1).cos() + b * (i as f64 * 0.1).sin();
            let c = chart.to_coords(&x, &xi);
            let (x2, xi2) = chart.from_coords(c);
            assert!((x2 - *x).norm() < 1e-10);
            assert!((xi2 - xi).norm() < 1e-10);
        }
    }

    #[test]
    fn pole_too_close_is_rejected() {
        let chart = CanonicalChart::new(UnitVector3::E3);
        let p = PhasePoint::new(UnitVector3::new(0.01, 0.0, 1.0), UnitVector3::E2).unwrap();
        let f = |x: &Vector3<f64>, _: &Vector3<f64>| x.x;
        assert!(poisson_bracket_in_chart(&f, &f, &p, &chart, 1e-5).is_err());
    }
}
