//! TOML run configuration and its translation into library objects.
//!
//! The schema is documented in `docs/config.md`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use matlip::linalg::{CMatrix, C64};
use matlip::metric::InnerSolver;
use matlip::{DistanceOptions, FiniteGroup, MatrixElement, MatrixFunctional, MatrixState, OperatorSystem, Seminorm};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("task `{0}` is stochastic and needs a seed: pass --seed or set `seed` in the config")]
    MissingSeed(String),
}

fn invalid(field: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.to_string(),
    }
}

/// A matrix entry: a real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

pub type MatrixSpec = Vec<Vec<Entry>>;

pub fn matrix(spec: &MatrixSpec, field: &str) -> Result<CMatrix, ConfigError> {
    let rows = spec.len();
    let cols = spec.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || spec.iter().any(|r| r.len() != cols) {
        return Err(invalid(field, "matrix rows must be nonempty and of equal length"));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| spec[i][j].into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when present.
    pub task: Option<String>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub system: Option<SystemSpec>,
    pub seminorm: SeminormSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub inputs: InputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// `two-point`, `qubit` or `diagonal`.
    pub preset: Option<String>,
    /// Size of the `diagonal` preset.
    pub points: Option<usize>,
    pub ambient_dim: Option<usize>,
    pub basis: Option<Vec<MatrixSpec>>,
    /// Path of a file holding `ambient_dim` and `basis`, relative to the config.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    ambient_dim: usize,
    basis: Vec<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeminormSpec {
    Commutator {
        dirac: MatrixSpec,
        #[serde(default = "one")]
        scale: f64,
    },
    GroupAction {
        cayley_table: Vec<Vec<usize>>,
        #[serde(default)]
        identity: usize,
        unitaries: Vec<MatrixSpec>,
        length: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Translation on functions over a finite group, on the diagonal system of its order.
    Translation {
        cyclic: Option<usize>,
        cayley_table: Option<Vec<Vec<usize>>>,
        #[serde(default)]
        identity: usize,
        length: Option<Vec<f64>>,
        /// Word length over these generators when `length` is absent.
        generators: Option<Vec<usize>>,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub max_level: Option<usize>,
    pub starts: Option<usize>,
    pub max_iters: Option<usize>,
    pub gap_tol: Option<f64>,
    pub max_alternations: Option<usize>,
    /// `barrier` or `cutting-plane`.
    pub inner_solver: Option<String>,
}

/// A matrix state.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Classical(Vec<f64>),
    Vector(Vec<Entry>),
    MaximallyMixed(usize),
    Random(usize),
    Choi { level: usize, matrix: MatrixSpec },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub phi: StateSpec,
    pub psi: StateSpec,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    /// Level of randomly drawn items.
    pub level: Option<usize>,
    pub pairs: Option<Vec<PairSpec>>,
    pub random_pairs: Option<usize>,
    /// Functionals as lists of values `f(b_i)`.
    pub functionals: Option<Vec<Vec<MatrixSpec>>>,
    pub random_functionals: Option<usize>,
    /// Elements as lists of coefficient blocks `x_i`.
    pub elements: Option<Vec<Vec<MatrixSpec>>>,
    pub random_elements: Option<usize>,
    pub samples: Option<usize>,
    /// Highest level sampled by `check-seminorm`.
    pub audit_level: Option<usize>,
    /// Level cap, starts and steps of `recover`.
    pub recover_level: Option<usize>,
    pub recover_starts: Option<usize>,
    pub recover_steps: Option<usize>,
    pub grid_density: Option<usize>,
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Library objects built from a configuration.
pub struct Setup {
    pub seminorm: Seminorm,
    /// Group and length when the seminorm is a translation, for the transport oracle.
    pub translation: Option<(FiniteGroup, Vec<f64>)>,
    pub options: DistanceOptions,
}

impl RunConfig {
    pub fn setup(&self, base: &Path, seed: u64) -> Result<Setup, ConfigError> {
        let (seminorm, translation) = self.build_seminorm(base)?;
        Ok(Setup {
            seminorm,
            translation,
            options: self.solver.options(seed)?,
        })
    }

    fn build_system(&self, base: &Path) -> Result<Arc<OperatorSystem>, ConfigError> {
        let spec = self
            .system
            .as_ref()
            .ok_or_else(|| invalid("system", "missing table [system]"))?;
        if let Some(preset) = &spec.preset {
            return match preset.as_str() {
                "two-point" => Ok(OperatorSystem::two_point()),
                "qubit" => Ok(OperatorSystem::qubit()),
                "diagonal" => {
                    let m = spec
                        .points
                        .ok_or_else(|| invalid("system.points", "missing key `points` for the diagonal preset"))?;
                    if m == 0 {
                        return Err(invalid("system.points", "must be positive"));
                    }
                    Ok(OperatorSystem::diagonal(m))
                }
                other => Err(invalid("system.preset", format!("unknown preset `{other}`"))),
            };
        }
        let (dim, basis) = if let Some(file) = &spec.file {
            let path = base.join(file);
            let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Read {
                path: path.clone(),
                source,
            })?;
            let parsed: SystemFile = toml::from_str(&text).map_err(|e| ConfigError::Parse {
                path,
                message: e.to_string(),
            })?;
            (parsed.ambient_dim, parsed.basis)
        } else {
            let dim = spec
                .ambient_dim
                .ok_or_else(|| invalid("system", "missing key `ambient_dim`"))?;
            let basis = spec
                .basis
                .clone()
                .ok_or_else(|| invalid("system", "missing key `basis`"))?;
            (dim, basis)
        };
        let basis = basis
            .iter()
            .enumerate()
            .map(|(i, b)| matrix(b, &format!("system.basis[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        OperatorSystem::new(dim, basis).map_err(|e| invalid("system", e))
    }

    fn build_seminorm(&self, base: &Path) -> Result<(Seminorm, Option<(FiniteGroup, Vec<f64>)>), ConfigError> {
        let field = "seminorm";
        match &self.seminorm {
            SeminormSpec::Commutator { dirac, scale } => {
                let system = self.build_system(base)?;
                let l =
                    Seminorm::commutator(&system, matrix(dirac, "seminorm.dirac")?).map_err(|e| invalid(field, e))?;
                Ok((l.scaled(*scale), None))
            }
            SeminormSpec::GroupAction {
                cayley_table,
                identity,
                unitaries,
                length,
                scale,
            } => {
                let system = self.build_system(base)?;
                let group = FiniteGroup::new(cayley_table.clone(), *identity).map_err(|e| invalid(field, e))?;
                let unitaries = unitaries
                    .iter()
                    .enumerate()
                    .map(|(i, u)| matrix(u, &format!("seminorm.unitaries[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let l =
                    Seminorm::group_action(&system, group, unitaries, length.clone()).map_err(|e| invalid(field, e))?;
                Ok((l.scaled(*scale), None))
            }
            SeminormSpec::Translation {
                cyclic,
                cayley_table,
                identity,
                length,
                generators,
                scale,
            } => {
                if self.system.is_some() {
                    return Err(invalid(
                        "system",
                        "a translation seminorm builds its own diagonal system",
                    ));
                }
                let group = match (cyclic, cayley_table) {
                    (Some(m), None) if *m > 0 => FiniteGroup::cyclic(*m),
                    (None, Some(table)) => FiniteGroup::new(table.clone(), *identity).map_err(|e| invalid(field, e))?,
                    _ => {
                        return Err(invalid(
                            field,
                            "give exactly one of `cyclic` (a positive order) or `cayley_table`",
                        ))
                    }
                };
                let length = match (length, generators) {
                    (Some(l), None) => l.clone(),
                    (None, Some(g)) => {
                        if g.iter().any(|&x| x >= group.order()) {
                            return Err(invalid("seminorm.generators", "generator outside the group"));
                        }
                        group.word_length(g)
                    }
                    _ => return Err(invalid(field, "give exactly one of `length` or `generators`")),
                };
                let l = Seminorm::translation(group.clone(), length.clone()).map_err(|e| invalid(field, e))?;
                Ok((l.scaled(*scale), Some((group, length))))
            }
        }
    }
}

impl SolverSpec {
    pub fn options(&self, seed: u64) -> Result<DistanceOptions, ConfigError> {
        let d = DistanceOptions::default();
        let inner = match self.inner_solver.as_deref() {
            None | Some("barrier") => InnerSolver::Barrier,
            Some("cutting-plane") => InnerSolver::CuttingPlane,
            Some(other) => {
                return Err(invalid(
                    "solver.inner_solver",
                    format!("unknown solver `{other}`, expected `barrier` or `cutting-plane`"),
                ))
            }
        };
        let opts = DistanceOptions {
            max_level: self.max_level.unwrap_or(d.max_level),
            starts: self.starts.unwrap_or(d.starts),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            gap_tol: self.gap_tol.unwrap_or(d.gap_tol),
            max_alternations: self.max_alternations.unwrap_or(d.max_alternations),
            inner,
            seed,
        };
        if opts.max_level == 0 || opts.max_level > 6 {
            return Err(invalid("solver.max_level", "must lie in 1..=6"));
        }
        if opts.starts == 0 || opts.max_iters == 0 || opts.max_alternations == 0 {
            return Err(invalid(
                "solver",
                "starts, max_iters and max_alternations must be positive",
            ));
        }
        if !(opts.gap_tol > 0.0 && opts.gap_tol < 1.0) {
            return Err(invalid("solver.gap_tol", "must lie in (0, 1)"));
        }
        Ok(opts)
    }
}

impl StateSpec {
    pub fn build(
        &self,
        system: &Arc<OperatorSystem>,
        seed: u64,
        index: u64,
        field: &str,
    ) -> Result<MatrixState, ConfigError> {
        let built = match self {
            StateSpec::Classical(p) => MatrixState::classical(system, p),
            StateSpec::Vector(xi) => {
                let xi: Vec<C64> = xi.iter().map(|&e| e.into()).collect();
                MatrixState::vector(system, &xi)
            }
            StateSpec::MaximallyMixed(n) if *n > 0 => Ok(MatrixState::maximally_mixed(system, *n)),
            StateSpec::Random(n) if *n > 0 => {
                MatrixState::random(system, *n, &mut matlip::linalg::random::stream(seed, index))
            }
            StateSpec::MaximallyMixed(_) | StateSpec::Random(_) => {
                return Err(invalid(field, "level must be positive"))
            }
            StateSpec::Choi { level, matrix: m } => MatrixState::from_choi(system, *level, matrix(m, field)?),
        };
        built.map_err(|e| invalid(field, e))
    }
}

pub fn functional(
    system: &Arc<OperatorSystem>,
    values: &[MatrixSpec],
    field: &str,
) -> Result<MatrixFunctional, ConfigError> {
    let values = values
        .iter()
        .enumerate()
        .map(|(i, v)| matrix(v, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    MatrixFunctional::new(system, values).map_err(|e| invalid(field, e))
}

pub fn element(system: &Arc<OperatorSystem>, coeffs: &[MatrixSpec], field: &str) -> Result<MatrixElement, ConfigError> {
    let coeffs = coeffs
        .iter()
        .enumerate()
        .map(|(i, v)| matrix(v, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    MatrixElement::new(system, coeffs).map_err(|e| invalid(field, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    #[test]
    fn missing_dirac_is_named() {
        let err = parse("[system]\npreset = \"two-point\"\n[seminorm]\ntype = \"commutator\"\n").unwrap_err();
        assert!(err.contains("dirac"), "{err}");
    }

    #[test]
    fn complex_and_real_entries() {
        let cfg = parse(
            "seed = 3\n[system]\npreset = \"two-point\"\n[seminorm]\ntype = \"commutator\"\ndirac = [[0, [1, 0]], [1, 0]]\n",
        )
        .unwrap();
        let setup = cfg.setup(Path::new("."), 3).unwrap();
        assert_eq!(setup.seminorm.family_name(), "commutator");
        assert_eq!(setup.options.seed, 3);
    }

    #[test]
    fn translation_by_generators() {
        let cfg = parse("[seminorm]\ntype = \"translation\"\ncyclic = 4\ngenerators = [1]\n").unwrap();
        let setup = cfg.setup(Path::new("."), 0).unwrap();
        let (_, length) = setup.translation.unwrap();
        assert_eq!(length, vec![0.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn rejects_unknown_inner_solver() {
        let spec = SolverSpec {
            inner_solver: Some("simplex".into()),
            ..Default::default()
        };
        assert!(matches!(spec.options(0), Err(ConfigError::Invalid { .. })));
    }
}
