use matlip::linalg::pauli;
use matlip::linalg::random::stream;
use matlip::linalg::C64;
use matlip::*;

fn two_point() -> Seminorm {
    Seminorm::commutator(&OperatorSystem::two_point(), pauli::x()).unwrap()
}

fn opts(r: usize) -> DistanceOptions {
    DistanceOptions {
        max_level: r,
        ..Default::default()
    }
}

#[test]
fn recovered_seminorm_of_unit_is_zero() {
    let l = two_point();
    let table = MetricOracleTable::new(&l, opts(2));
    let unit = MatrixElement::unit(l.system(), 2);
    let r = recovered_seminorm(&unit, &RecoveryBudget::default(), &table).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(table.is_empty());
}

#[test]
fn recovered_seminorm_finds_two_point_witness() {
    let l = two_point();
    let table = MetricOracleTable::new(&l, opts(2));
    let a = MatrixElement::basis_element(l.system(), 1);
    let la = l.eval(&a).unwrap();
    assert!((la - 2.0).abs() < 1e-12);
    let r = recovered_seminorm(&a, &RecoveryBudget::default(), &table).unwrap();
    assert!(r.value >= 0.95 * la, "{}", r.value);
    assert!(r.value <= la + 1e-6);
}

#[test]
fn recovered_seminorm_is_dominated() {
    let l = Seminorm::translation(FiniteGroup::cyclic(2), vec![0.0, 1.0]).unwrap();
    let table = MetricOracleTable::new(&l, opts(2));
    let budget = RecoveryBudget {
        starts: 8,
        ..Default::default()
    };
    let mut rng = stream(31, 0);
    for n in 1..=2 {
        let a = MatrixElement::random(l.system(), n, &mut rng);
        let r = recovered_seminorm(&a, &budget, &table).unwrap();
        let la = l.eval(&a).unwrap();
        assert!(r.value <= la + 1e-6, "{} > {la}", r.value);
        assert!(r.value >= 0.95 * la, "{} < 0.95 * {la}", r.value);
    }
    let (hits, misses) = table.statistics();
    assert_eq!(misses, table.len());
    assert!(hits + misses > 0);
}

#[test]
fn norm_from_metric_on_state_differences() {
    let l = two_point();
    let mut rng = stream(32, 0);
    let phi = MatrixState::random(l.system(), 1, &mut rng).unwrap();
    let psi = MatrixState::random(l.system(), 1, &mut rng).unwrap();
    let d = distance(&l, &phi, &psi, &opts(2)).unwrap().value;
    let q = norm_from_metric(&l, &phi.difference(&psi).unwrap(), &opts(2)).unwrap();
    assert!((q.value - d).abs() < 1e-4, "{} vs {d}", q.value);
}

#[test]
fn norm_from_metric_is_adjoint_invariant() {
    let l = Seminorm::translation(FiniteGroup::cyclic(3), vec![0.0, 1.0, 1.0]).unwrap();
    let f = MatrixFunctional::random_reduced(l.system(), 1, &mut stream(33, 0));
    let a = norm_from_metric(&l, &f, &opts(2)).unwrap().value;
    let b = norm_from_metric(&l, &f.adjoint(), &opts(2)).unwrap().value;
    assert!((a - b).abs() < 1e-4 * a.max(1.0), "{a} vs {b}");
    let c = norm_from_metric(&l, &f.scale(C64::new(0.0, 2.0)), &opts(2))
        .unwrap()
        .value;
    assert!((c - 2.0 * a).abs() < 1e-4 * c.max(1.0), "{c} vs 2·{a}");
}

#[test]
fn audits_pass_on_two_point_triple() {
    let l = two_point();
    let report = metric_axiom_audit(&l, 10, 3, &opts(2));
    assert!(report.passed(), "{report}");
    assert_eq!(report.check("direct_sum").unwrap().samples, 10);
    let report = convexity_audit(&l, 10, 3, &opts(2));
    assert!(report.passed(), "{report}");
}

#[test]
fn audits_are_reproducible() {
    let l = two_point();
    let a = metric_axiom_audit(&l, 4, 9, &opts(2));
    let b = metric_axiom_audit(&l, 4, 9, &opts(2));
    for (x, y) in a.checks.iter().zip(&b.checks) {
        assert_eq!(x.max_violation.to_bits(), y.max_violation.to_bits());
    }
}

#[test]
fn seminorm_audit_passes() {
    for l in [
        two_point(),
        Seminorm::translation(FiniteGroup::cyclic(3), vec![0.0, 1.0, 1.0]).unwrap(),
    ] {
        let report = seminorm_axiom_audit(&l, 50, 4, 1);
        assert!(report.passed(), "{report}");
    }
}
