//! Unitary and first-order time evolution of joint states under
//! `H = H0 + V`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, propagator, ComplexMatrix, ComplexVector};

/// Duration and sampling for a trajectory. The dimensionless phase is
/// `x = v0 · dt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub dt: f64,
    pub steps: usize,
}

impl EvolutionParams {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::NonFinite("dt"));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        Ok(EvolutionParams { dt, steps })
    }

    pub fn phase(&self, v0: f64) -> f64 {
        v0 * self.dt
    }
}

fn total_hamiltonian(
    state: &ComplexVector,
    h0: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if h0.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: h0.dim(),
            found: v.dim(),
        });
    }
    if state.dim() != h0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h0.dim(),
            found: state.dim(),
        });
    }
    h0.ensure_hermitian()?;
    v.ensure_hermitian()?;
    Ok(h0 + v)
}

/// `exp(-i dt (h0 + v)) |state⟩`.
pub fn evolve_exact(
    state: &ComplexVector,
    h0: &ComplexMatrix,
    v: &ComplexMatrix,
    dt: f64,
) -> Result<ComplexVector> {
    let h = total_hamiltonian(state, h0, v)?;
    propagator(&h, dt)?.apply(state)
}

/// Result of the truncated propagator before and after renormalization.
#[derive(Clone, Debug)]
pub struct FirstOrderStep {
    pub state: ComplexVector,
    /// Norm of `(I - i dt H)|state⟩` before renormalizing.
    pub raw_norm: f64,
}

/// `(I - i dt (h0 + v)) |state⟩`, renormalized.
pub fn evolve_first_order(
    state: &ComplexVector,
    h0: &ComplexMatrix,
    v: &ComplexMatrix,
    dt: f64,
) -> Result<ComplexVector> {
    first_order_step(state, h0, v, dt).map(|s| s.state)
}

pub fn first_order_step(
    state: &ComplexVector,
    h0: &ComplexMatrix,
    v: &ComplexMatrix,
    dt: f64,
) -> Result<FirstOrderStep> {
    if !dt.is_finite() {
        return Err(Error::NonFinite("dt"));
    }
    let h = total_hamiltonian(state, h0, v)?;
    let step = &ComplexMatrix::identity(h.dim()) - &h.scale(c(0.0, dt));
    let raw = step.apply(state)?;
    let raw_norm = raw.norm();
    if raw_norm <= f64::EPSILON {
        return Err(Error::ZeroNorm);
    }
    Ok(FirstOrderStep {
        state: raw.normalized()?,
        raw_norm,
    })
}

/// Exact evolution sampled at `t_k = k dt / steps`, `k = 0..=steps`. Each
/// sample uses its own propagator from `t = 0`. A zero duration yields the
/// single `t = 0` sample.
pub fn trajectory(
    state: &ComplexVector,
    h0: &ComplexMatrix,
    v: &ComplexMatrix,
    dt: f64,
    steps: usize,
) -> Result<Vec<(f64, ComplexVector)>> {
    let params = EvolutionParams::new(dt, steps)?;
    let h = total_hamiltonian(state, h0, v)?;
    if params.dt == 0.0 {
        return Ok(vec![(0.0, state.clone())]);
    }
    (0..=params.steps)
        .map(|k| {
            let t = params.dt * k as f64 / params.steps as f64;
            Ok((t, propagator(&h, t)?.apply(state)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entangle::concurrence_pure;
    use crate::model::{
        build_h0, build_potential, initial_two_qubit_state, FreeHamiltonianSpec, PotentialSpec,
    };
    use crate::qmath::C64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn h0(eps: f64) -> ComplexMatrix {
        build_h0(&FreeHamiltonianSpec::new(eps, 0.0), 2).unwrap()
    }

    /// Closed form of the Case-1 evolved state.
    fn case1_closed_form(eps: f64, v0: f64, dt: f64) -> ComplexVector {
        let x = v0 * dt;
        let pre = C64::from_polar(0.5, -dt * (eps + v0));
        let e = C64::from_polar(1.0, x);
        let q1 = ComplexVector::new(vec![c(1.0, 0.0), e]);
        let q2 = ComplexVector::new(vec![c(1.0, 0.0), -e]);
        q1.kron(&q2).scale(pre)
    }

    /// Closed form of the Case-2 evolved state (global phase e^{-iεΔt}).
    fn case2_closed_form(eps: f64, v0: f64, dt: f64) -> ComplexVector {
        let x = v0 * dt + PI / 4.0;
        let pre = C64::from_polar(FRAC_1_SQRT_2, -dt * eps);
        let q1 = ComplexVector::from_real(&[x.cos(), x.sin()]);
        let q2 = ComplexVector::from_real(&[1.0, -1.0]);
        q1.kron(&q2).scale(pre)
    }

    #[test]
    fn case1_matches_closed_form() {
        for (eps, v0, dt) in [(0.0, 1.0, 0.3), (1.5, -2.0, 4.1), (0.2, 0.7, 12.0)] {
            let v = build_potential(&PotentialSpec::case1(v0)).unwrap();
            let out = evolve_exact(&initial_two_qubit_state(), &h0(eps), &v, dt).unwrap();
            assert!(out.max_abs_diff(&case1_closed_form(eps, v0, dt)) < 1e-10);
        }
    }

    #[test]
    fn case2_matches_closed_form() {
        for (eps, v0, dt) in [(0.0, 1.0, 0.3), (1.5, -2.0, 4.1), (0.2, 0.7, 12.0)] {
            let v = build_potential(&PotentialSpec::case2(v0)).unwrap();
            let out = evolve_exact(&initial_two_qubit_state(), &h0(eps), &v, dt).unwrap();
            assert!(out.max_abs_diff(&case2_closed_form(eps, v0, dt)) < 1e-10);
        }
    }

    #[test]
    fn free_evolution_is_global_phase() {
        let eps = 0.8;
        let dt = 2.5;
        let s = initial_two_qubit_state();
        let out = evolve_exact(&s, &h0(eps), &ComplexMatrix::zeros(4), dt).unwrap();
        assert!(out.max_abs_diff(&s.scale(C64::from_polar(1.0, -eps * dt))) < 1e-14);
    }

    #[test]
    fn pulse_first_order_gives_bell() {
        for (eps, v0) in [(2.0, 1.0), (0.3, 5.0), (-1.0, 0.25)] {
            let v = build_potential(&PotentialSpec::mixed_pulse(eps, v0)).unwrap();
            let out = evolve_first_order(&initial_two_qubit_state(), &h0(eps), &v, 1.0 / v0)
                .unwrap()
                .phase_fixed();
            let bell = ComplexVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]);
            assert!(out.max_abs_diff(&bell) < 1e-12);
        }
    }

    #[test]
    fn first_order_zero_dt_is_identity() {
        let s = initial_two_qubit_state();
        let v = build_potential(&PotentialSpec::mixed_pulse(1.0, 1.0)).unwrap();
        let out = evolve_first_order(&s, &h0(1.0), &v, 0.0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn first_order_fidelity_bound_for_free_evolution() {
        let s = initial_two_qubit_state();
        let zero = ComplexMatrix::zeros(4);
        for eps_dt in [0.001, 0.01, 0.05, 0.1] {
            let eps = 2.0;
            let dt = eps_dt / eps;
            let exact = evolve_exact(&s, &h0(eps), &zero, dt).unwrap();
            let first = evolve_first_order(&s, &h0(eps), &zero, dt).unwrap();
            let fid = exact.inner(&first).norm_sqr();
            assert!(
                fid >= 1.0 - eps_dt.powi(4),
                "eps·dt={eps_dt}: fidelity {fid}"
            );
        }
    }

    #[test]
    fn trajectory_endpoints() {
        let s = initial_two_qubit_state();
        let v = build_potential(&PotentialSpec::general_flip(1.0, 0.4, 1.1)).unwrap();
        let traj = trajectory(&s, &h0(0.3), &v, 1.7, 1).unwrap();
        assert_eq!(traj.len(), 2);
        assert_eq!(traj[0].0, 0.0);
        let last = evolve_exact(&s, &h0(0.3), &v, 1.7).unwrap();
        assert!(traj[1].1.max_abs_diff(&last) < 1e-15);

        assert_eq!(trajectory(&s, &h0(0.3), &v, 0.0, 5).unwrap().len(), 1);
        assert!(trajectory(&s, &h0(0.3), &v, 1.0, 0).is_err());
    }

    #[test]
    fn case1_trajectory_stays_separable() {
        let v = build_potential(&PotentialSpec::case1(1.3)).unwrap();
        let traj = trajectory(&initial_two_qubit_state(), &h0(0.5), &v, 9.0, 50).unwrap();
        for (_, s) in traj {
            assert!(concurrence_pure(&s).unwrap() < 1e-12);
        }
    }

    #[test]
    fn flip_trajectory_concurrence() {
        let v0 = 1.0;
        let v = build_potential(&PotentialSpec::general_flip(v0, FRAC_PI_2, FRAC_PI_2)).unwrap();
        let traj = trajectory(&initial_two_qubit_state(), &h0(0.0), &v, PI, 64).unwrap();
        for (t, s) in traj {
            let x = v0 * t;
            assert!((concurrence_pure(&s).unwrap() - (2.0 * x).sin().abs()).abs() < 1e-10);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let v = build_potential(&PotentialSpec::nonlocal_flip(1.0)).unwrap();
        assert!(matches!(
            evolve_exact(&initial_two_qubit_state(), &h0(0.0), &v, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
