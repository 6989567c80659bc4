//! The norm `Q` on functionals vanishing on the unit that is built from the
//! metric: `Q(f) = t · D(φ1, φ2)` where `[[0, f], [f*, 0]] / t = φ1 − φ2`.

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::seminorm::Seminorm;
use crate::state::decompose_selfadjoint;
use crate::system::{same_system, MatrixFunctional};

use super::distance::{cb_norm, distance, DistanceOptions, DistanceResult, REDUCED_TOL};

/// Factor applied to `‖g‖_cb / 2` before decomposing `g / t`; the computed
/// cb-norm is a lower bound, so a little room keeps `‖g / t‖_cb ≤ 2`.
pub const DECOMPOSITION_MARGIN: f64 = 1.1;
/// Growth of `t` after a failed decomposition.
const MARGIN_GROWTH: f64 = 1.5;
const DECOMPOSITION_ATTEMPTS: usize = 6;

#[derive(Debug, Clone)]
pub struct NormFromMetric {
    pub value: f64,
    /// The scale `t` at which `g / t` was decomposed.
    pub scale: f64,
    /// Computed `‖g‖_cb` of the off-diagonal embedding `g`.
    pub cb_norm: f64,
    /// Distance between the two states of the decomposition, at level `2n`.
    pub distance: Option<DistanceResult>,
}

/// `Q_n(f)` for a level-`n` functional with `f(1) = 0`.
pub fn norm_from_metric(l: &Seminorm, f: &MatrixFunctional, opts: &DistanceOptions) -> Result<NormFromMetric> {
    same_system(l.system(), f.system())?;
    let unit = f.unit_value_norm();
    if unit > REDUCED_TOL {
        return Err(Error::NotReduced { value: unit });
    }
    let g = f.off_diagonal_embedding();
    let cb = cb_norm(&g, opts)?;
    if cb == 0.0 {
        return Ok(NormFromMetric {
            value: 0.0,
            scale: 0.0,
            cb_norm: 0.0,
            distance: None,
        });
    }
    let mut t = DECOMPOSITION_MARGIN * cb / 2.0;
    let mut attempt = 0;
    let (phi, psi) = loop {
        let h = g.scale(C64::new(1.0 / t, 0.0));
        match decompose_selfadjoint(&h) {
            Ok(pair) => break pair,
            Err(Error::NoDecompositionFound { .. }) if attempt + 1 < DECOMPOSITION_ATTEMPTS => {
                attempt += 1;
                t *= MARGIN_GROWTH;
            }
            Err(e) => return Err(e),
        }
    };
    let d = distance(l, &phi, &psi, opts)?;
    Ok(NormFromMetric {
        value: t * d.value,
        scale: t,
        cb_norm: cb,
        distance: Some(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::state::MatrixState;
    use crate::system::OperatorSystem;

    #[test]
    fn difference_of_states() {
        let l = Seminorm::commutator(&OperatorSystem::two_point(), pauli::x()).unwrap();
        let opts = DistanceOptions {
            max_level: 2,
            ..Default::default()
        };
        let phi = MatrixState::classical(l.system(), &[1.0, 0.0]).unwrap();
        let psi = MatrixState::classical(l.system(), &[0.0, 1.0]).unwrap();
        let q = norm_from_metric(&l, &phi.difference(&psi).unwrap(), &opts).unwrap();
        assert!((q.value - 1.0).abs() < 1e-4, "{}", q.value);
        let zero = MatrixFunctional::zero(l.system(), 1);
        assert_eq!(norm_from_metric(&l, &zero, &opts).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_unit_mass() {
        let l = Seminorm::commutator(&OperatorSystem::two_point(), pauli::x()).unwrap();
        let phi = MatrixState::classical(l.system(), &[1.0, 0.0]).unwrap();
        let f = phi.restriction().scale(C64::new(1.0, 0.0));
        assert!(matches!(
            norm_from_metric(&l, &f, &DistanceOptions::default()),
            Err(Error::NotReduced { .. })
        ));
    }
}
