//! Acceptance criteria 1 to 11. Runs as a plain binary so the PASS/FAIL lines
//! are always shown; exits nonzero when any criterion fails.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use matlip::linalg::random::{self, stream};
use matlip::linalg::{pauli, C64};
use matlip::oracle::{ergodic_ground_metric, grid_distance, monge_kantorovich};
use matlip::*;
use rand::Rng;

const AXIOM_TOL: f64 = 1e-9;
const TWO_POINT_TOL: f64 = 1e-4;
const TRANSPORT_TOL: f64 = 1e-3;
const DOMINANCE_SLACK: f64 = 1e-6;
const RECOVERY_FRACTION: f64 = 0.95;
const GAUGE_TOL: f64 = 1e-8;
const MATRIX_METRIC_TOL: f64 = 1e-3;
const CONVEXITY_TOL: f64 = 2e-3;
const Q_TOL: f64 = 1e-4;
const Q_TRIANGLE_TOL: f64 = 2e-4;
const CB_TOL: f64 = 1e-6;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn two_point(lambda: f64) -> Seminorm {
    Seminorm::commutator(&OperatorSystem::two_point(), pauli::x().scale_real(lambda)).unwrap()
}

fn commutator(d: usize, seed: u64) -> Seminorm {
    let dirac = random::hermitian(&mut stream(seed, 0), d);
    Seminorm::commutator(&OperatorSystem::diagonal(d), dirac).unwrap()
}

fn cyclic(m: usize) -> Seminorm {
    let g = FiniteGroup::cyclic(m);
    let len = g.word_length(&[1]);
    Seminorm::translation(g, len).unwrap()
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

fn criterion_1() -> Outcome {
    let families = [
        ("commutator d=2", commutator(2, 101)),
        ("commutator d=3", commutator(3, 102)),
        ("Z_2", cyclic(2)),
        ("Z_3", cyclic(3)),
        ("Z_4", cyclic(4)),
    ];
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for (i, (name, l)) in families.iter().enumerate() {
        let report = seminorm_axiom_audit(l, 200, 4, 1000 + i as u64);
        let v = report.max_violation();
        worst = worst.max(v);
        if !(v <= AXIOM_TOL) {
            failed.push(*name);
        }
    }
    outcome(
        failed.is_empty(),
        format!(
            "5 families x 200 samples, levels <= 4, max violation {worst:.1e} (tol {AXIOM_TOL:.0e}), failing {failed:?}"
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_grid: f64 = 0.0;
    for lambda in [0.5, 1.0, 2.0] {
        let l = two_point(lambda);
        let d0 = MatrixState::classical(l.system(), &[1.0, 0.0]).unwrap();
        let d1 = MatrixState::classical(l.system(), &[0.0, 1.0]).unwrap();
        let d = distance(&l, &d0, &d1, &DistanceOptions::default()).unwrap().value;
        worst = worst.max((d - 1.0 / lambda).abs());
        let g = grid_distance(&l, &d0, &d1, 1, 400).unwrap();
        worst_grid = worst_grid.max((g - 1.0 / lambda).abs());
    }
    outcome(
        worst <= TWO_POINT_TOL && worst_grid <= 1e-2,
        format!("|D - 1/Λ| max {worst:.1e} (tol {TWO_POINT_TOL:.0e}), grid oracle max {worst_grid:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    let pairs = 50;
    for k in 0..pairs {
        let m = 2 + k % 4;
        let g = FiniteGroup::cyclic(m);
        let len = g.word_length(&[1]);
        let l = Seminorm::translation(g.clone(), len.clone()).unwrap();
        let classical = ergodic_ground_metric(&g, &len).unwrap();
        let mut rng = stream(3, k as u64);
        let p = probability(&mut rng, m);
        let q = probability(&mut rng, m);
        let d = distance(
            &l,
            &classical.state(&p).unwrap(),
            &classical.state(&q).unwrap(),
            &opts(2),
        )
        .unwrap()
        .value;
        worst = worst.max((d - monge_kantorovich(&classical, &p, &q).unwrap()).abs());
    }
    outcome(
        worst <= TRANSPORT_TOL,
        format!("{pairs} pairs on Z_2..Z_5 at R=2, max |D - MK| {worst:.1e} (tol {TRANSPORT_TOL:.0e})"),
    )
}

fn dominance_systems() -> Vec<Seminorm> {
    vec![two_point(1.0), commutator(3, 104), cyclic(2), cyclic(3)]
}

fn criterion_4() -> Outcome {
    let budget = RecoveryBudget {
        max_level: 2,
        starts: 4,
        steps: 6,
        seed: 4,
    };
    let systems = dominance_systems();
    let tables: Vec<MetricOracleTable> = systems.iter().map(|l| MetricOracleTable::new(l, opts(2))).collect();
    let mut worst = f64::NEG_INFINITY;
    for k in 0..100 {
        let s = k % systems.len();
        let n = 1 + (k / systems.len()) % 2;
        let a = MatrixElement::random(systems[s].system(), n, &mut stream(4, k as u64));
        let r = recovered_seminorm(
            &a,
            &RecoveryBudget {
                seed: k as u64,
                ..budget
            },
            &tables[s],
        )
        .unwrap();
        worst = worst.max(r.value - systems[s].eval(&a).unwrap());
    }
    outcome(
        worst <= DOMINANCE_SLACK,
        format!("100 elements, levels 1-2, max (recovered - L) {worst:.1e} (slack {DOMINANCE_SLACK:.0e})"),
    )
}

fn criterion_5() -> Outcome {
    let budget = RecoveryBudget {
        max_level: 2,
        starts: 16,
        ..Default::default()
    };
    let mut worst = f64::INFINITY;
    for (s, l) in [two_point(1.0), cyclic(2), cyclic(3)].iter().enumerate() {
        let table = MetricOracleTable::new(l, opts(2));
        for k in 0..20 {
            let a = MatrixElement::random(l.system(), 1, &mut stream(50 + s as u64, k));
            let la = l.eval(&a).unwrap();
            let r = recovered_seminorm(&a, &RecoveryBudget { seed: k, ..budget }, &table).unwrap();
            worst = worst.min(r.value / la);
        }
    }
    outcome(
        worst >= RECOVERY_FRACTION,
        format!("3 systems x 20 elements, R=2, 16 starts, min recovered/L {worst:.6} (need {RECOVERY_FRACTION})"),
    )
}

fn criterion_6() -> Outcome {
    let systems = [two_point(1.0), cyclic(3), commutator(3, 106)];
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let l = &systems[k % 3];
        let n = 1 + (k / 3) % 2;
        let mut rng = stream(6, k as u64);
        let phi = MatrixState::random(l.system(), n, &mut rng).unwrap();
        let psi = MatrixState::random(l.system(), n, &mut rng).unwrap();
        let d = distance(l, &phi, &psi, &opts(2)).unwrap().value;
        let g = dual_gauge(l, &phi.difference(&psi).unwrap(), &opts(2)).unwrap().value;
        worst = worst.max((d - g).abs());
    }
    outcome(
        worst <= GAUGE_TOL,
        format!("50 pairs, max |D - L'(φ-ψ)| {worst:.1e} (tol {GAUGE_TOL:.0e})"),
    )
}

fn criterion_7() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, l) in [("two-point", two_point(1.0)), ("Z_3", cyclic(3))] {
        let report = metric_axiom_audit(&l, 50, 7, &opts(2));
        let sum = report.check("direct_sum").unwrap().max_violation;
        let comp = report.check("compression").unwrap().max_violation;
        passed &= report.passed() && sum <= MATRIX_METRIC_TOL && comp <= MATRIX_METRIC_TOL;
        parts.push(format!(
            "{name}: direct sum {sum:.1e}, compression {comp:.1e}, symmetry/triangle {}",
            if report.check("symmetry").unwrap().passed && report.check("triangle").unwrap().passed {
                "ok"
            } else {
                "violated"
            }
        ));
    }
    outcome(
        passed,
        format!("50 tuples each; {} (tol {MATRIX_METRIC_TOL:.0e})", parts.join("; ")),
    )
}

fn criterion_8() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, l) in [("two-point", two_point(1.0)), ("Z_3", cyclic(3))] {
        let report = convexity_audit(&l, 100, 8, &opts(2));
        let v = report.max_violation();
        passed &= report
            .checks
            .iter()
            .all(|c| c.passed && c.max_violation <= CONVEXITY_TOL);
        parts.push(format!("{name} {v:.1e}"));
    }
    outcome(
        passed,
        format!(
            "100 tuples per property; max violation {} (tol {CONVEXITY_TOL:.0e})",
            parts.join(", ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let systems = [two_point(1.0), cyclic(3)];
    let o = opts(2);
    let q = |l: &Seminorm, f: &MatrixFunctional| norm_from_metric(l, f, &o).unwrap().value;
    let mut identity: f64 = 0.0;
    for k in 0..30 {
        let l = &systems[k % 2];
        let mut rng = stream(9, k as u64);
        let phi = MatrixState::random(l.system(), 1, &mut rng).unwrap();
        let psi = MatrixState::random(l.system(), 1, &mut rng).unwrap();
        let d = distance(l, &phi, &psi, &o).unwrap().value;
        identity = identity.max((q(l, &phi.difference(&psi).unwrap()) - d).abs());
    }
    let scalars = [
        C64::new(0.5, 0.0),
        C64::new(2.0, 0.0),
        C64::new(0.0, 1.0),
        C64::from_polar(1.0, FRAC_PI_4),
    ];
    let (mut adjoint, mut homogeneity, mut triangle): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..6 {
        let l = &systems[k % 2];
        let mut rng = stream(90, k as u64);
        let f = MatrixFunctional::random_reduced(l.system(), 1, &mut rng);
        let g = MatrixFunctional::random_reduced(l.system(), 1, &mut rng);
        let qf = q(l, &f);
        adjoint = adjoint.max((q(l, &f.adjoint()) - qf).abs());
        for c in scalars {
            homogeneity = homogeneity.max((q(l, &f.scale(c)) - c.norm() * qf).abs());
        }
        triangle = triangle.max(q(l, &f.add(&g).unwrap()) - qf - q(l, &g));
    }
    outcome(
        identity <= Q_TOL && adjoint <= Q_TOL && homogeneity <= Q_TOL && triangle <= Q_TRIANGLE_TOL,
        format!(
            "Q(φ-ψ)=D on 30 pairs {identity:.1e}, Q(f*)=Q(f) {adjoint:.1e}, |c| homogeneity {homogeneity:.1e} \
             (tol {Q_TOL:.0e}); triangle excess {triangle:.1e} (tol {Q_TRIANGLE_TOL:.0e})"
        ),
    )
}

fn criterion_10() -> Outcome {
    let tight = DistanceOptions {
        gap_tol: 1e-10,
        ..Default::default()
    };
    let systems = [OperatorSystem::two_point(), OperatorSystem::diagonal(3)];
    let (mut bound, mut adjoint): (f64, f64) = (f64::NEG_INFINITY, 0.0);
    for k in 0..100 {
        let sys = &systems[k % 2];
        let n = 1 + (k / 2) % 2;
        let mut rng = stream(10, k as u64);
        let phi = MatrixState::random(sys, n, &mut rng).unwrap();
        let psi = MatrixState::random(sys, n, &mut rng).unwrap();
        bound = bound.max(cb_norm(&phi.difference(&psi).unwrap(), &DistanceOptions::default()).unwrap());
        let f = MatrixFunctional::random_reduced(sys, n, &mut rng);
        adjoint = adjoint.max((cb_norm(&f, &tight).unwrap() - cb_norm(&f.adjoint(), &tight).unwrap()).abs());
    }
    outcome(
        bound <= 2.0 + CB_TOL && adjoint <= CB_TOL,
        format!("100 pairs, max ‖φ-ψ‖_cb {bound:.9} (bound 2 + {CB_TOL:.0e}), max |‖f*‖_cb - ‖f‖_cb| {adjoint:.1e}"),
    )
}

fn criterion_11() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        ("distance", "two_point.toml"),
        ("recover", "z3.toml"),
        ("metric-audit", "z3.toml"),
        ("norm-from-metric", "two_point.toml"),
    ];
    let mut mismatched = Vec::new();
    for (task, config) in runs {
        let mut outputs = Vec::new();
        for (label, threads) in [("a", "1"), ("b", "1"), ("c", "8")] {
            let out = dir.path().join(format!("{task}-{label}"));
            let status = Command::new(env!("CARGO_BIN_EXE_matlip"))
                .args([task, "--config"])
                .arg(configs.join(config))
                .arg("--out")
                .arg(&out)
                .args(["--threads", threads])
                .output()
                .unwrap()
                .status;
            assert!(status.success(), "{task} exited with {status}");
            let records = std::fs::read(out.join("records.jsonl")).unwrap();
            let witnesses = std::fs::read(out.join("witnesses.jsonl")).unwrap();
            outputs.push((records, witnesses));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatched.push(task);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{} tasks, repeated and --threads 1 vs 8 records byte-identical; mismatched {mismatched:?}",
            runs.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome, Option<Duration>); 11] = [
        (1, "seminorm axioms", criterion_1, Some(Duration::from_secs(60))),
        (2, "two-point triple", criterion_2, Some(Duration::from_secs(10))),
        (3, "Kantorovich duality", criterion_3, Some(Duration::from_secs(120))),
        (4, "dominance", criterion_4, None),
        (5, "recovery", criterion_5, Some(Duration::from_secs(600))),
        (6, "distance = dual gauge", criterion_6, None),
        (7, "matrix metric axioms", criterion_7, None),
        (8, "convexity and midpoints", criterion_8, None),
        (9, "norm from metric", criterion_9, None),
        (10, "cb-norm", criterion_10, None),
        (11, "determinism", criterion_11, None),
    ];
    let mut failures = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let passed = o.passed && in_time;
        if !passed {
            failures += 1;
        }
        let limit = budget.map_or(String::new(), |b| format!(" (limit {} s)", b.as_secs()));
        println!(
            "criterion {id:>2} {} {name}: {} [{:.1} s{limit}]",
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
