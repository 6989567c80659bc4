use matlip::linalg::pauli;
use matlip::linalg::random::stream;
use matlip::metric::{hermitian_basis, InnerSolver};
use matlip::oracle::{ergodic_ground_metric, grid_distance, monge_kantorovich};
use matlip::*;
use rand::Rng;

fn two_point(lambda: f64) -> Seminorm {
    Seminorm::commutator(&OperatorSystem::two_point(), pauli::x().scale_real(lambda)).unwrap()
}

fn opts(r: usize) -> DistanceOptions {
    DistanceOptions {
        max_level: r,
        ..Default::default()
    }
}

fn probability(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

#[test]
fn two_point_closed_form() {
    for lambda in [0.5, 1.0, 2.0] {
        let l = two_point(lambda);
        let d0 = MatrixState::classical(l.system(), &[1.0, 0.0]).unwrap();
        let d1 = MatrixState::classical(l.system(), &[0.0, 1.0]).unwrap();
        let d = distance(&l, &d0, &d1, &opts(2)).unwrap();
        assert!((d.value - 1.0 / lambda).abs() < 1e-6, "Λ={lambda}: {}", d.value);
        assert!(d.converged);
        let grid = grid_distance(&l, &d0, &d1, 1, 400).unwrap();
        assert!((grid - 1.0 / lambda).abs() < 1e-2, "grid {grid}");
    }
}

#[test]
fn identical_states_are_at_distance_zero() {
    let l = Seminorm::translation(FiniteGroup::cyclic(3), vec![0.0, 1.0, 1.0]).unwrap();
    let s = MatrixState::random_seeded(l.system(), 2, 4).unwrap();
    let d = distance(&l, &s, &s, &opts(2)).unwrap();
    assert_eq!(d.value, 0.0);
    assert_eq!(d.per_level, vec![0.0, 0.0]);
}

#[test]
fn cyclic_translations_match_transport() {
    for m in 2..=5 {
        let g = FiniteGroup::cyclic(m);
        let len = g.word_length(&[1]);
        let l = Seminorm::translation(g.clone(), len.clone()).unwrap();
        let classical = ergodic_ground_metric(&g, &len).unwrap();
        for k in 0..4 {
            let mut rng = stream(17, (m * 10 + k) as u64);
            let p = probability(&mut rng, m);
            let q = probability(&mut rng, m);
            let d = distance(
                &l,
                &classical.state(&p).unwrap(),
                &classical.state(&q).unwrap(),
                &opts(1),
            )
            .unwrap();
            let mk = monge_kantorovich(&classical, &p, &q).unwrap();
            assert!((d.value - mk).abs() < 1e-6, "Z_{m}: {} vs {mk}", d.value);
        }
    }
}

#[test]
fn grid_stays_below_solver_bound() {
    let l = Seminorm::translation(FiniteGroup::cyclic(3), vec![0.0, 1.0, 1.0]).unwrap();
    for k in 0..3 {
        let phi = MatrixState::random_seeded(l.system(), 1, 100 + k).unwrap();
        let psi = MatrixState::random_seeded(l.system(), 1, 200 + k).unwrap();
        let d = distance(&l, &phi, &psi, &opts(1)).unwrap().value;
        let grid = grid_distance(&l, &phi, &psi, 1, 2500).unwrap();
        // both are lower bounds; the solver is within its relative gap of the supremum
        assert!(
            grid <= d * (1.0 + DistanceOptions::default().gap_tol),
            "grid {grid} above solver {d}"
        );
        assert!((d - grid).abs() < 1e-2, "grid {grid} vs solver {d}");
    }
}

#[test]
fn witness_certifies_value() {
    let l = two_point(1.3);
    let phi = MatrixState::random_seeded(l.system(), 2, 1).unwrap();
    let psi = MatrixState::random_seeded(l.system(), 2, 2).unwrap();
    let d = distance(&l, &phi, &psi, &opts(3)).unwrap();
    let lw = l.eval(&d.witness).unwrap();
    assert!(lw <= 1.0 + 1e-8, "L(witness) = {lw}");
    assert!(d.witness.self_adjoint_defect() < 1e-12);
    let f = phi.difference(&psi).unwrap();
    let value = matlip::linalg::operator_norm(&f.pair(&d.witness).unwrap()).unwrap();
    assert!((value - d.value).abs() < 1e-8);
    assert_eq!(*d.per_level.last().unwrap(), d.value);
    assert!(d.per_level.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn distance_equals_dual_gauge_of_difference() {
    let mut rng = stream(8, 0);
    let dirac = matlip::linalg::random::hermitian(&mut rng, 3);
    let l = Seminorm::commutator(&OperatorSystem::diagonal(3), dirac).unwrap();
    for k in 0..3 {
        let phi = MatrixState::random(l.system(), 1 + k % 2, &mut rng).unwrap();
        let psi = MatrixState::random(l.system(), 1 + k % 2, &mut rng).unwrap();
        let d = distance(&l, &phi, &psi, &opts(2)).unwrap();
        let g = dual_gauge(&l, &phi.difference(&psi).unwrap(), &opts(2)).unwrap();
        assert!((d.value - g.value).abs() < 1e-8);
    }
}

#[test]
fn dual_gauge_is_adjoint_symmetric() {
    let l = Seminorm::translation(FiniteGroup::cyclic(3), vec![0.0, 1.0, 1.0]).unwrap();
    let f = MatrixFunctional::random_reduced(l.system(), 1, &mut stream(9, 0));
    let a = dual_gauge(&l, &f, &opts(2)).unwrap().value;
    let b = dual_gauge(&l, &f.adjoint(), &opts(2)).unwrap().value;
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn scaling_the_seminorm_scales_distances_inversely() {
    let l = Seminorm::translation(FiniteGroup::cyclic(4), vec![0.0, 1.0, 2.0, 1.0]).unwrap();
    let phi = MatrixState::random_seeded(l.system(), 1, 5).unwrap();
    let psi = MatrixState::random_seeded(l.system(), 1, 6).unwrap();
    let base = distance(&l, &phi, &psi, &opts(2)).unwrap().value;
    for c in [0.5, 2.0] {
        let scaled = distance(&l.scaled(c), &phi, &psi, &opts(2)).unwrap().value;
        assert!((scaled * c - base).abs() <= 1e-6 * base, "c={c}: {scaled} vs {base}");
    }
}

#[test]
fn cutting_planes_agree_with_barrier_on_polyhedral_bodies() {
    let g = FiniteGroup::cyclic(3);
    let l = Seminorm::translation(g, vec![0.0, 1.0, 1.0]).unwrap();
    let phi = MatrixState::random_seeded(l.system(), 1, 11).unwrap();
    let psi = MatrixState::random_seeded(l.system(), 1, 12).unwrap();
    let barrier = distance(&l, &phi, &psi, &opts(1)).unwrap().value;
    let kelley = distance(
        &l,
        &phi,
        &psi,
        &DistanceOptions {
            max_level: 1,
            inner: InnerSolver::CuttingPlane,
            ..Default::default()
        },
    )
    .unwrap()
    .value;
    assert!((barrier - kelley).abs() < 1e-6 * kelley.max(1.0));
}

#[test]
fn mismatched_levels_are_rejected() {
    let l = two_point(1.0);
    let a = MatrixState::maximally_mixed(l.system(), 1);
    let b = MatrixState::maximally_mixed(l.system(), 2);
    assert!(matches!(
        distance(&l, &a, &b, &opts(1)),
        Err(Error::DimensionMismatch(_))
    ));
    let other = MatrixState::maximally_mixed(&OperatorSystem::diagonal(3), 1);
    assert!(matches!(distance(&l, &a, &other, &opts(1)), Err(Error::SystemMismatch)));
}

#[test]
fn hermitian_basis_is_orthonormal() {
    for r in 1..=3 {
        let b = hermitian_basis(r);
        assert_eq!(b.len(), r * r);
        for (i, x) in b.iter().enumerate() {
            assert!(x.is_hermitian(0.0));
            for (j, y) in b.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((x.re_inner(y) - expected).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn cb_norm_bounds() {
    let l = two_point(1.0);
    let mut rng = stream(21, 0);
    for n in 1..=2 {
        let phi = MatrixState::random(l.system(), n, &mut rng).unwrap();
        let psi = MatrixState::random(l.system(), n, &mut rng).unwrap();
        let f = phi.difference(&psi).unwrap();
        let c = cb_norm(&f, &DistanceOptions::default()).unwrap();
        assert!(c <= 2.0 + 1e-6);
        let tight = DistanceOptions {
            gap_tol: 1e-10,
            ..Default::default()
        };
        let g = MatrixFunctional::random_reduced(l.system(), n, &mut rng);
        let a = cb_norm(&g, &tight).unwrap();
        let b = cb_norm(&g.adjoint(), &tight).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
    // extreme classical pair: ‖δ0 − δ1‖_cb = 2
    let d0 = MatrixState::classical(l.system(), &[1.0, 0.0]).unwrap();
    let d1 = MatrixState::classical(l.system(), &[0.0, 1.0]).unwrap();
    let c = cb_norm(&d0.difference(&d1).unwrap(), &DistanceOptions::default()).unwrap();
    assert!((c - 2.0).abs() < 1e-6, "{c}");
}
