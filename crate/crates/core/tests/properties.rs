use std::f64::consts::PI;

use nalgebra::{DVector, Vector3};
use proptest::prelude::*;

use spherelab::config::{Band, ExperimentConfig, PotentialSpec, Term};
use spherelab::control::{gcc_classical, Region};
use spherelab::geom::{geodesic_flow, poisson_bracket, PhasePoint, UnitVector3, DEFAULT_BRACKET_STEP};
use spherelab::harmonics::{basis_size, flat_index, HarmonicExpansion, HarmonicIndex};
use spherelab::observability::{degenerate_groups, evolution_gram, geodesic_husimi, time_average_kernel};
use spherelab::operator::{assemble, diagonalize, region_projector};
use spherelab::radon::{hamiltonian_flow, radon};

fn unit() -> impl Strategy<Value = UnitVector3> {
    (0.0..PI, 0.0..2.0 * PI).prop_map(|(t, p)| UnitVector3::from_spherical(t, p))
}

fn expansion(max_degree: usize) -> impl Strategy<Value = HarmonicExpansion> {
    prop::collection::vec(-1.0..1.0f64, basis_size(max_degree))
        .prop_map(move |c| HarmonicExpansion::from_coefficients(max_degree, c).unwrap())
}

fn region() -> impl Strategy<Value = Region> {
    let cap = (unit(), 0.05..3.0f64).prop_map(|(c, a)| Region::cap(c, a));
    cap.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(Region::Union),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Region::Intersection),
            inner.prop_map(|r| Region::Complement(Box::new(r))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flat_index_round_trip(l in 0usize..60, frac in 0.0..1.0f64) {
        let m = (frac * (2 * l + 1) as f64).floor() as i64 - l as i64;
        let m = m.clamp(-(l as i64), l as i64);
        let i = flat_index(l, m);
        prop_assert_eq!(HarmonicIndex::from_flat(i), HarmonicIndex::new(l, m).unwrap());
        prop_assert!(i < basis_size(l));
    }

    #[test]
    fn expansion_json_round_trip_and_linearity(a in expansion(4), b in expansion(4), x in unit()) {
        let back = HarmonicExpansion::from_json_str(&a.to_json_string()).unwrap();
        let back = back.with_max_degree(4);
        prop_assert_eq!(back.coefficients(), a.coefficients());
        let sum = a.add(&b);
        prop_assert!((sum.evaluate(&x) - a.evaluate(&x) - b.evaluate(&x)).abs() < 1e-12);
    }

    #[test]
    fn region_text_round_trip(r in region(), x in unit()) {
        let parsed = Region::parse(&r.to_string()).unwrap();
        prop_assert_eq!(parsed.to_string(), r.to_string());
        prop_assert_eq!(parsed.contains(&x), r.contains(&x));
        let outside = Region::Complement(Box::new(r.clone()));
        if r.signed_depth(&x).abs() > 1e-9 {
            prop_assert_ne!(r.contains(&x), outside.contains(&x));
        }
    }

    #[test]
    fn geodesic_flow_is_a_unit_speed_group(gamma in unit(), s0 in 0.0..6.3f64, s in -5.0..5.0f64, t in -5.0..5.0f64) {
        let p = PhasePoint::on_geodesic(&gamma, s0);
        let a = geodesic_flow(&geodesic_flow(&p, s), t);
        let b = geodesic_flow(&p, s + t);
        prop_assert!((*a.base - *b.base).norm() < 1e-12);
        prop_assert!((*a.codir - *b.codir).norm() < 1e-12);
        prop_assert!(a.base.dot(&a.codir).abs() < 1e-12);
        prop_assert!((a.geodesic().dot(&gamma) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bracket_is_antisymmetric(gamma in unit(), s0 in 0.0..6.3f64, c in -2.0..2.0f64) {
        let p = PhasePoint::on_geodesic(&gamma, s0);
        let f = |x: &Vector3<f64>, xi: &Vector3<f64>| x.x * xi.y - c * x.z * x.z;
        let g = |x: &Vector3<f64>, xi: &Vector3<f64>| xi.z + x.y * x.x;
        let fg = poisson_bracket(&f, &g, &p, DEFAULT_BRACKET_STEP).unwrap();
        let gf = poisson_bracket(&g, &f, &p, DEFAULT_BRACKET_STEP).unwrap();
        prop_assert!((fg + gf).abs() < 1e-12);
        let constant = |_: &Vector3<f64>, _: &Vector3<f64>| c;
        prop_assert!(poisson_bracket(&f, &constant, &p, DEFAULT_BRACKET_STEP).unwrap().abs() < 1e-12);
    }

    #[test]
    fn averaged_potential_is_even(v in expansion(5), n in unit()) {
        let h = radon(&v);
        prop_assert!((h.evaluate(&n) - h.evaluate(&n.antipode())).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_a_contraction(delta in -50.0..50.0f64, horizon in 0.01..50.0f64) {
        prop_assert!(time_average_kernel(delta, horizon).norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn degenerate_groups_partition(mut values in prop::collection::vec(-10.0..10.0f64, 1..40)) {
        values.sort_by(f64::total_cmp);
        let groups = degenerate_groups(&values);
        prop_assert_eq!(groups.first().unwrap().start, 0);
        prop_assert_eq!(groups.last().unwrap().end, values.len());
        for w in groups.windows(2) {
            prop_assert_eq!(w[0].end, w[1].start);
            prop_assert!(values[w[1].start] - values[w[0].end - 1] > 1e-10 * values[w[1].start].abs().max(1.0));
        }
    }

    #[test]
    fn config_round_trip(
        l in 1usize..60,
        horizon in 0.1..100.0f64,
        grid in 1usize..5000,
        k_max in prop::option::of(0usize..50),
        coef in -3.0..3.0f64,
        band in prop_oneof![Just(Band::Min), Just(Band::Max)],
    ) {
        let config = ExperimentConfig {
            potential: PotentialSpec::Terms(vec![Term { l: 2, m: -1, coef }]),
            l_max: l,
            horizon,
            grid,
            k_max,
            husimi_band: band,
            ..Default::default()
        };
        prop_assert_eq!(ExperimentConfig::from_json_str(&config.to_json()).unwrap(), config);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn flow_conserves_energy_and_norm(v in expansion(3), n0 in unit()) {
        let h = radon(&v);
        let traj = hamiltonian_flow(&h, &n0, 5.0, 0.02).unwrap();
        prop_assert!(traj.max_energy_drift() <= 1e-8);
        for p in &traj.points {
            prop_assert!((p.vector().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_trace_follows_the_addition_theorem(c in unit(), alpha in 0.1..3.0f64, l in 2usize..9) {
        let r = Region::cap(c, alpha);
        let p = region_projector(&r, l).unwrap();
        let expected = basis_size(l) as f64 * r.area() / (4.0 * PI);
        prop_assert!((p.entries.trace() - expected).abs() < 1e-9);
        let eig = p.entries.clone().symmetric_eigenvalues();
        prop_assert!(eig.min() >= -1e-10 && eig.max() <= 1.0 + 1e-10);
    }

    #[test]
    fn gram_is_hermitian_psd(v in expansion(2), c in unit(), alpha in 0.2..2.5f64, horizon in 0.5..20.0f64) {
        let s = diagonalize(&assemble(&v.scaled(0.5), 6).unwrap()).unwrap();
        let p = region_projector(&Region::cap(c, alpha), 6).unwrap();
        let g = evolution_gram(&s, &p, horizon).unwrap();
        prop_assert!(g.min_eigenvalue >= -1e-10);
        prop_assert!((g.matrix.trace().re - p.entries.trace()).abs() < 1e-8);
        let herm = (&g.matrix - g.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(herm < 1e-12);
    }

    #[test]
    fn classical_control_is_monotone_in_radius(c in unit(), a in 0.3..1.4f64, grow in 0.0..0.5f64) {
        let small = gcc_classical(&Region::cap(c, a), 400);
        let large = gcc_classical(&Region::cap(c, a + grow), 400);
        prop_assert!(large.witnesses.len() <= small.witnesses.len());
        prop_assert!(large.margin >= small.margin - 1e-12);
    }

    #[test]
    fn husimi_weights_are_a_distribution(coeffs in prop::collection::vec(-1.0..1.0f64, basis_size(7))) {
        let u = DVector::from_vec(coeffs);
        let grid = spherelab::geom::fibonacci_sphere(150);
        let h = geodesic_husimi(&u, 6, &grid).unwrap();
        prop_assert!(h.weights.iter().all(|&w| w >= 0.0));
        prop_assert!((h.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
