//! Energy bookkeeping: `Tr(V ρ)`, its drift along trajectories, and the
//! analytic initial-expectation surfaces of the generalized families.

use crate::error::{Error, Result};
use crate::evolve::trajectory;
use crate::model::Family;
use crate::qmath::{ComplexMatrix, ComplexVector, C64, ZERO};

/// Allowed imaginary residue of `Tr(V ρ)`, relative to `max(1, ‖V‖_F)`.
const IMAG_TOL: f64 = 1e-12;

/// An expectation below this magnitude counts as energy-conserving.
pub const CONSERVATION_TOL: f64 = 1e-10;

/// Default number of trajectory samples for conservation audits.
pub const DEFAULT_SAMPLES: usize = 100;

fn real_part(trace: C64, v: &ComplexMatrix) -> Result<f64> {
    let scale = v.frobenius_norm().max(1.0);
    if trace.im.abs() > IMAG_TOL * scale {
        return Err(Error::NotHermitian {
            deviation: trace.im.abs(),
        });
    }
    Ok(trace.re)
}

/// `⟨ψ|V|ψ⟩ = Tr(V |ψ⟩⟨ψ|)`.
pub fn expectation(v: &ComplexMatrix, state: &ComplexVector) -> Result<f64> {
    let vs = v.apply(state)?;
    real_part(state.inner(&vs), v)
}

/// `Tr(V ρ)`.
pub fn expectation_rho(v: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    if v.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: rho.dim(),
        });
    }
    let n = v.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += v[(i, k)] * rho[(k, i)];
        }
    }
    real_part(acc, v)
}

pub fn is_conserving(expectation: f64) -> bool {
    expectation.abs() <= CONSERVATION_TOL
}

/// Largest deviation of `Tr(V ρ(t))` from `Tr(V ρ(0))` over `steps + 1`
/// exact trajectory samples.
pub fn conservation_residual(
    v: &ComplexMatrix,
    h0: &ComplexMatrix,
    state: &ComplexVector,
    dt: f64,
    steps: usize,
) -> Result<f64> {
    let start = expectation(v, state)?;
    trajectory(state, h0, v, dt, steps)?
        .iter()
        .map(|(_, s)| expectation(v, s).map(|e| (e - start).abs()))
        .try_fold(0.0_f64, |acc, r| r.map(|r| acc.max(r)))
}

/// Exact `Tr(V ρ(0))` for the canonical two-qubit initial state.
///
/// Basis-preserving: `(v0/4)(1+η)(1+κ)`; basis-flipping:
/// `-(v0/2)[cos(η+κ) + cos(η-κ)]`.
pub fn vbar_contour(family: Family, eta: f64, kappa: f64, v0: f64) -> Result<f64> {
    match family {
        Family::GeneralDiag => Ok(0.25 * v0 * (1.0 + eta) * (1.0 + kappa)),
        Family::GeneralFlip => Ok(-0.5 * v0 * ((eta + kappa).cos() + (eta - kappa).cos())),
        other => Err(Error::UnsupportedFamily(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::evolve_first_order;
    use crate::model::{
        build_h0, build_potential, initial_two_qubit_state, FreeHamiltonianSpec, PotentialSpec,
    };
    use std::f64::consts::FRAC_PI_2;

    fn h0() -> ComplexMatrix {
        build_h0(&FreeHamiltonianSpec::new(0.6, 0.4), 2).unwrap()
    }

    #[test]
    fn case1_initial_expectation_vanishes() {
        let v = build_potential(&PotentialSpec::case1(3.0)).unwrap();
        assert_eq!(expectation(&v, &initial_two_qubit_state()).unwrap(), 0.0);
    }

    #[test]
    fn mixed_pulse_expectations() {
        let (eps, v0) = (2.0, 1.0);
        let v = build_potential(&PotentialSpec::mixed_pulse(eps, v0)).unwrap();
        let s0 = initial_two_qubit_state();
        assert!((expectation(&v, &s0).unwrap() + eps / 2.0).abs() < 1e-15);
        let h = build_h0(&FreeHamiltonianSpec::new(eps, 0.0), 2).unwrap();
        let after = evolve_first_order(&s0, &h, &v, 1.0 / v0).unwrap();
        assert!(expectation(&v, &after).unwrap().abs() < 1e-12);
        let rho_value = expectation_rho(&v, &s0.outer()).unwrap();
        assert!((rho_value + 1.0).abs() < 1e-15);
    }

    #[test]
    fn imaginary_residue_is_rejected() {
        let mut v = ComplexMatrix::zeros(4);
        v[(0, 0)] = C64::new(0.0, 1.0);
        assert!(matches!(
            expectation(&v, &initial_two_qubit_state()),
            Err(Error::NotHermitian { .. })
        ));
        assert!(expectation_rho(&ComplexMatrix::zeros(2), &ComplexMatrix::zeros(4)).is_err());
    }

    #[test]
    fn residuals() {
        let s = initial_two_qubit_state();
        for spec in [
            PotentialSpec::case1(1.1),
            PotentialSpec::case2(0.9),
            PotentialSpec::general_diag(1.0, 0.3, -2.0),
            PotentialSpec::general_flip(1.4, 0.3, -2.0),
            PotentialSpec::mixed_pulse(1.0, 2.0),
        ] {
            let v = build_potential(&spec).unwrap();
            let r = conservation_residual(&v, &h0(), &s, 5.0, DEFAULT_SAMPLES).unwrap();
            assert!(r <= 1e-10, "{spec}: {r:e}");
        }
        let zero = ComplexMatrix::zeros(4);
        assert_eq!(
            conservation_residual(&zero, &h0(), &s, 5.0, 10).unwrap(),
            0.0
        );
    }

    #[test]
    fn disallowed_potential_is_flagged() {
        let v0 = 1.5;
        let v = build_potential(&PotentialSpec::general_diag(v0, 1.0, 1.0)).unwrap();
        let s = initial_two_qubit_state();
        let start = expectation(&v, &s).unwrap();
        assert!((start - v0).abs() < 1e-15);
        assert!(!is_conserving(start));
        assert!(conservation_residual(&v, &h0(), &s, 3.0, 20).unwrap() < 1e-12);
    }

    #[test]
    fn contour_zeros() {
        for kappa in [-3.0, 0.0, 2.2] {
            assert_eq!(
                vbar_contour(Family::GeneralDiag, -1.0, kappa, 1.7).unwrap(),
                0.0
            );
            assert!(
                vbar_contour(Family::GeneralFlip, FRAC_PI_2, kappa, 1.7)
                    .unwrap()
                    .abs()
                    < 1e-15
            );
        }
        assert!(vbar_contour(Family::MixedPulse, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn contour_matches_trace() {
        let s = initial_two_qubit_state();
        for (eta, kappa, v0) in [(0.3, -1.2, 0.8), (2.0, 2.5, -1.3), (-4.0, 0.1, 3.0)] {
            let d = build_potential(&PotentialSpec::general_diag(v0, eta, kappa)).unwrap();
            let f = build_potential(&PotentialSpec::general_flip(v0, eta, kappa)).unwrap();
            let cd = vbar_contour(Family::GeneralDiag, eta, kappa, v0).unwrap();
            let cf = vbar_contour(Family::GeneralFlip, eta, kappa, v0).unwrap();
            assert!((expectation(&d, &s).unwrap() - cd).abs() < 1e-12);
            assert!((expectation(&f, &s).unwrap() - cf).abs() < 1e-12);
        }
    }
}
