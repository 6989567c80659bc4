//! The eight tasks of the command-line front end.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use matlip::audit::AuditReport;
use matlip::linalg::random::stream;
use matlip::oracle::{ergodic_ground_metric, grid_distance, monge_kantorovich};
use matlip::state::functional_fingerprint;
use matlip::*;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{self, ConfigError, RunConfig, Setup, StateSpec};
use crate::records::{Item, Output};

/// Tolerance of the transport comparison in `oracle-compare`.
pub const TRANSPORT_TOL: f64 = 1e-3;
/// Tolerance of the grid comparison in `oracle-compare`.
pub const GRID_TOL: f64 = 1e-2;

// Salts separating the random streams of different input kinds.
const PAIR_SALT: u64 = 0x7061_6972;
const FUNCTIONAL_SALT: u64 = 0x6675_6e63;
const ELEMENT_SALT: u64 = 0x656c_656d;
const RECOVERY_SALT: u64 = 0x7265_636f;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    CheckSeminorm,
    Distance,
    Recover,
    DualGauge,
    MetricAudit,
    ConvexityAudit,
    NormFromMetric,
    OracleCompare,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::CheckSeminorm => "check-seminorm",
            Task::Distance => "distance",
            Task::Recover => "recover",
            Task::DualGauge => "dual-gauge",
            Task::MetricAudit => "metric-audit",
            Task::ConvexityAudit => "convexity-audit",
            Task::NormFromMetric => "norm-from-metric",
            Task::OracleCompare => "oracle-compare",
        }
    }
}

/// Result of a run: the files to write and whether an audit found violations.
pub struct RunResult {
    pub output: Output,
    pub violations: bool,
}

/// Runs `task`. `base` resolves relative paths in the config; `seed` overrides the config seed.
pub fn run(task: Task, cfg: &RunConfig, base: &Path, seed: Option<u64>) -> Result<RunResult> {
    if let Some(t) = &cfg.task {
        if t != task.name() {
            return Err(ConfigError::Invalid {
                field: "task".into(),
                message: format!("config is for `{t}` but the subcommand is `{}`", task.name()),
            }
            .into());
        }
    }
    // Every task draws seeded solver starts, so none may run without a seed.
    let seed = seed
        .or(cfg.seed)
        .ok_or_else(|| ConfigError::MissingSeed(task.name().into()))?;
    let setup = cfg.setup(base, seed)?;
    let runner = Runner { cfg, setup, seed, task };
    let mut output = Output::default();
    output.summary.push(format!("task: {}", task.name()));
    output.summary.push(format!(
        "seminorm: {} on M_{} with {} basis elements",
        runner.setup.seminorm.family_name(),
        runner.setup.seminorm.system().ambient_dim(),
        runner.setup.seminorm.system().len()
    ));
    output.summary.push(format!("seed: {seed}"));
    output
        .summary
        .push(format!("truncation level: {}", runner.setup.options.max_level));
    let violations = match task {
        Task::CheckSeminorm => {
            let samples = cfg.inputs.samples.unwrap_or(200);
            let level = cfg.inputs.audit_level.unwrap_or(4);
            let report = seminorm_axiom_audit(&runner.setup.seminorm, samples, level, seed);
            runner.push_report(&mut output, report, level)
        }
        Task::MetricAudit => {
            let samples = cfg.inputs.samples.unwrap_or(50);
            let report = metric_axiom_audit(&runner.setup.seminorm, samples, seed, &runner.setup.options);
            runner.push_report(&mut output, report, 2)
        }
        Task::ConvexityAudit => {
            let samples = cfg.inputs.samples.unwrap_or(100);
            let report = convexity_audit(&runner.setup.seminorm, samples, seed, &runner.setup.options);
            runner.push_report(&mut output, report, 2)
        }
        Task::Distance => runner.items(&mut output, runner.pairs()?, |(phi, psi)| runner.distance(phi, psi))?,
        Task::DualGauge => runner.items(&mut output, runner.functionals()?, |f| runner.dual_gauge(f))?,
        Task::NormFromMetric => runner.items(&mut output, runner.functionals()?, |f| runner.norm(f))?,
        Task::Recover => {
            let table = MetricOracleTable::new(&runner.setup.seminorm, runner.setup.options);
            let elements: Vec<(usize, MatrixElement)> = runner.elements()?.into_iter().enumerate().collect();
            let v = runner.items(&mut output, elements, |(i, a)| runner.recover(*i, a, &table))?;
            let (hits, misses) = table.statistics();
            output
                .summary
                .push(format!("distance table: {hits} hits, {misses} misses"));
            v
        }
        Task::OracleCompare => runner.oracle_compare(&mut output)?,
    };
    output
        .summary
        .push(format!("status: {}", if violations { "violations" } else { "ok" }));
    Ok(RunResult { output, violations })
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    setup: Setup,
    seed: u64,
    task: Task,
}

fn hash_all(parts: &[u64]) -> u64 {
    let mut h = DefaultHasher::new();
    parts.hash(&mut h);
    h.finish()
}

fn element_fingerprint(a: &MatrixElement) -> u64 {
    let mut h = DefaultHasher::new();
    a.level().hash(&mut h);
    for x in a.coeffs() {
        for z in x.as_slice() {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

fn probability(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn distance_diagnostics(d: &DistanceResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("per_level".into(), json!(d.per_level));
    m.insert("solver_iters".into(), json!(d.solver_iters));
    m.insert("converged".into(), json!(d.converged));
    m.insert("budget_exceeded".into(), json!(d.budget_exceeded));
    m
}

impl Runner<'_> {
    fn level(&self) -> Result<usize> {
        let n = self.cfg.inputs.level.unwrap_or(1);
        if n == 0 || n > 4 {
            bail!(ConfigError::Invalid {
                field: "inputs.level".into(),
                message: "must lie in 1..=4".into()
            });
        }
        Ok(n)
    }

    fn no_inputs(&self, keys: &str) -> anyhow::Error {
        ConfigError::Invalid {
            field: "inputs".into(),
            message: format!("task `{}` needs inputs: set {keys}", self.task.name()),
        }
        .into()
    }

    fn pairs(&self) -> Result<Vec<(MatrixState, MatrixState)>> {
        let sys = self.setup.seminorm.system();
        let mut pairs = Vec::new();
        for (i, p) in self.cfg.inputs.pairs.iter().flatten().enumerate() {
            let field = format!("inputs.pairs[{i}]");
            let index = 2 * i as u64;
            pairs.push((
                p.phi
                    .build(sys, self.seed ^ PAIR_SALT, index, &format!("{field}.phi"))?,
                p.psi
                    .build(sys, self.seed ^ PAIR_SALT, index + 1, &format!("{field}.psi"))?,
            ));
        }
        let level = self.level()?;
        let offset = 2 * pairs.len() as u64;
        for k in 0..self.cfg.inputs.random_pairs.unwrap_or(0) as u64 {
            let spec = StateSpec::Random(level);
            let field = "inputs.random_pairs";
            pairs.push((
                spec.build(sys, self.seed ^ PAIR_SALT, offset + 2 * k, field)?,
                spec.build(sys, self.seed ^ PAIR_SALT, offset + 2 * k + 1, field)?,
            ));
        }
        if pairs.is_empty() {
            return Err(self.no_inputs("`inputs.pairs` or `inputs.random_pairs`"));
        }
        Ok(pairs)
    }

    fn functionals(&self) -> Result<Vec<MatrixFunctional>> {
        let sys = self.setup.seminorm.system();
        let mut out = Vec::new();
        for (i, values) in self.cfg.inputs.functionals.iter().flatten().enumerate() {
            out.push(config::functional(sys, values, &format!("inputs.functionals[{i}]"))?);
        }
        let level = self.level()?;
        for k in 0..self.cfg.inputs.random_functionals.unwrap_or(0) as u64 {
            out.push(MatrixFunctional::random_reduced(
                sys,
                level,
                &mut stream(self.seed ^ FUNCTIONAL_SALT, k),
            ));
        }
        if out.is_empty() {
            return Err(self.no_inputs("`inputs.functionals` or `inputs.random_functionals`"));
        }
        Ok(out)
    }

    fn elements(&self) -> Result<Vec<MatrixElement>> {
        let sys = self.setup.seminorm.system();
        let mut out = Vec::new();
        for (i, coeffs) in self.cfg.inputs.elements.iter().flatten().enumerate() {
            out.push(config::element(sys, coeffs, &format!("inputs.elements[{i}]"))?);
        }
        let level = self.level()?;
        for k in 0..self.cfg.inputs.random_elements.unwrap_or(0) as u64 {
            out.push(MatrixElement::random(
                sys,
                level,
                &mut stream(self.seed ^ ELEMENT_SALT, k),
            ));
        }
        if out.is_empty() {
            return Err(self.no_inputs("`inputs.elements` or `inputs.random_elements`"));
        }
        Ok(out)
    }

    /// Evaluates `f` on every input in parallel and appends the items in input order.
    /// Returns whether any item is flagged as a violation.
    fn items<T: Sync>(
        &self,
        output: &mut Output,
        inputs: Vec<T>,
        f: impl Fn(&T) -> Result<(Item, bool)> + Sync,
    ) -> Result<bool> {
        let results: Vec<Result<(Item, bool)>> = inputs.par_iter().map(&f).collect();
        let mut items = Vec::with_capacity(results.len());
        let mut violations = false;
        for (i, r) in results.into_iter().enumerate() {
            let (item, flagged) = r.with_context(|| format!("{} item {i}", self.task.name()))?;
            output.summary.push(format!(
                "item {i}: level {} value {:.9}{}",
                item.level,
                item.value,
                if flagged { " VIOLATION" } else { "" }
            ));
            violations |= flagged;
            items.push(item);
        }
        output.push_items(self.task.name(), self.seed, items);
        Ok(violations)
    }

    fn push_report(&self, output: &mut Output, report: AuditReport, level: usize) -> bool {
        output.summary.extend(report.to_string().lines().map(str::to_string));
        let items = report
            .checks
            .iter()
            .map(|c| {
                let mut d = Map::new();
                d.insert("check".into(), json!(c.name));
                d.insert("samples".into(), json!(c.samples));
                d.insert("tolerance".into(), json!(c.tolerance));
                d.insert("passed".into(), json!(c.passed));
                Item {
                    fingerprint: hash_all(&[self.seed, c.samples as u64]),
                    level,
                    value: c.max_violation,
                    witness: None,
                    diagnostics: d,
                    wall_seconds: 0.0,
                }
            })
            .collect();
        output.push_items(self.task.name(), self.seed, items);
        !report.passed()
    }

    fn distance(&self, phi: &MatrixState, psi: &MatrixState) -> Result<(Item, bool)> {
        let (d, secs) = timed(|| Ok(distance(&self.setup.seminorm, phi, psi, &self.setup.options)?))?;
        Ok((
            Item {
                fingerprint: hash_all(&[phi.fingerprint(), psi.fingerprint()]),
                level: phi.level(),
                value: d.value,
                diagnostics: distance_diagnostics(&d),
                witness: Some(d.witness),
                wall_seconds: secs,
            },
            false,
        ))
    }

    fn dual_gauge(&self, f: &MatrixFunctional) -> Result<(Item, bool)> {
        let (d, secs) = timed(|| Ok(dual_gauge(&self.setup.seminorm, f, &self.setup.options)?))?;
        Ok((
            Item {
                fingerprint: functional_fingerprint(f),
                level: f.level(),
                value: d.value,
                diagnostics: distance_diagnostics(&d),
                witness: Some(d.witness),
                wall_seconds: secs,
            },
            false,
        ))
    }

    fn norm(&self, f: &MatrixFunctional) -> Result<(Item, bool)> {
        let (q, secs) = timed(|| Ok(norm_from_metric(&self.setup.seminorm, f, &self.setup.options)?))?;
        let mut diagnostics = match &q.distance {
            Some(d) => distance_diagnostics(d),
            None => Map::new(),
        };
        diagnostics.insert("scale".into(), json!(q.scale));
        diagnostics.insert("cb_norm".into(), json!(q.cb_norm));
        Ok((
            Item {
                fingerprint: functional_fingerprint(f),
                level: f.level(),
                value: q.value,
                witness: q.distance.map(|d| d.witness),
                diagnostics,
                wall_seconds: secs,
            },
            false,
        ))
    }

    fn recover(&self, index: usize, a: &MatrixElement, table: &MetricOracleTable) -> Result<(Item, bool)> {
        let budget = RecoveryBudget {
            max_level: self.cfg.inputs.recover_level.unwrap_or(2),
            starts: self.cfg.inputs.recover_starts.unwrap_or(16),
            steps: self.cfg.inputs.recover_steps.unwrap_or(12),
            seed: hash_all(&[self.seed ^ RECOVERY_SALT, index as u64]),
        };
        let ((r, la), secs) = timed(|| {
            let r = recovered_seminorm(a, &budget, table)?;
            Ok((r, self.setup.seminorm.eval(a)?))
        })?;
        let mut d = Map::new();
        d.insert("seminorm".into(), json!(la));
        d.insert("ratio".into(), json!(if la > 0.0 { r.value / la } else { 0.0 }));
        d.insert("evaluations".into(), json!(r.evaluations));
        d.insert("recover_level".into(), json!(budget.max_level));
        d.insert("starts".into(), json!(budget.starts));
        Ok((
            Item {
                fingerprint: element_fingerprint(a),
                level: a.level(),
                value: r.value,
                witness: None,
                diagnostics: d,
                wall_seconds: secs,
            },
            false,
        ))
    }

    fn oracle_compare(&self, output: &mut Output) -> Result<bool> {
        let count = self.cfg.inputs.random_pairs.unwrap_or(10) as u64;
        if count == 0 {
            return Err(self.no_inputs("a positive `inputs.random_pairs`"));
        }
        if let Some((group, length)) = &self.setup.translation {
            let classical = ergodic_ground_metric(group, length)?;
            let m = classical.point_count();
            let inputs: Vec<(Vec<f64>, Vec<f64>)> = (0..count)
                .map(|k| {
                    let mut rng = stream(self.seed ^ PAIR_SALT, k);
                    (probability(&mut rng, m), probability(&mut rng, m))
                })
                .collect();
            output.summary.push(format!(
                "oracle: transport on the ergodic ground metric, tolerance {TRANSPORT_TOL:.0e}"
            ));
            self.items(output, inputs, |(p, q)| {
                let phi = classical.state(p)?;
                let psi = classical.state(q)?;
                let (mut item, _) = self.distance(&phi, &psi)?;
                let mk = monge_kantorovich(&classical, p, q)?;
                let diff = (item.value - mk).abs();
                item.diagnostics.insert("monge_kantorovich".into(), json!(mk));
                item.diagnostics.insert("difference".into(), json!(diff));
                Ok((item, diff > TRANSPORT_TOL))
            })
        } else {
            let density = self.cfg.inputs.grid_density.unwrap_or(400);
            let sys = self.setup.seminorm.system();
            let inputs: Vec<(MatrixState, MatrixState)> = (0..count)
                .map(|k| {
                    let spec = StateSpec::Random(1);
                    Ok((
                        spec.build(sys, self.seed ^ PAIR_SALT, 2 * k, "inputs.random_pairs")?,
                        spec.build(sys, self.seed ^ PAIR_SALT, 2 * k + 1, "inputs.random_pairs")?,
                    ))
                })
                .collect::<Result<_, ConfigError>>()?;
            output.summary.push(format!(
                "oracle: grid search at level 1, density {density}, tolerance {GRID_TOL:.0e}"
            ));
            self.items(output, inputs, |(phi, psi)| {
                let (mut item, _) = self.distance(phi, psi)?;
                let grid = grid_distance(&self.setup.seminorm, phi, psi, 1, density)?;
                let diff = (item.value - grid).abs();
                item.diagnostics.insert("grid".into(), json!(grid));
                item.diagnostics.insert("difference".into(), json!(diff));
                Ok((item, diff > GRID_TOL))
            })
        }
    }
}
