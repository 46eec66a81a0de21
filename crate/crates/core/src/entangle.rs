//! Concurrence, Schmidt decomposition and separability classification for
//! two qubits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Family;
use crate::qmath::{c, eig_hermitian, ComplexMatrix, ComplexVector, C64, ZERO};

/// Eigenvalues of ρ below this are treated as round-off when building the
/// Wootters decomposition.
const RANK_CUTOFF: f64 = 1e-12;

/// Tolerance on negative eigenvalues and trace defects of density matrices.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntanglementClass {
    Separable,
    Partial,
    MaxEntangled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementConfig {
    pub tol: f64,
}

impl Default for EntanglementConfig {
    fn default() -> Self {
        EntanglementConfig { tol: 1e-9 }
    }
}

impl EntanglementConfig {
    pub fn classify(&self, concurrence: f64) -> EntanglementClass {
        if concurrence <= self.tol {
            EntanglementClass::Separable
        } else if concurrence >= 1.0 - self.tol {
            EntanglementClass::MaxEntangled
        } else {
            EntanglementClass::Partial
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    /// Schmidt coefficients, descending.
    pub schmidt: (f64, f64),
    pub class: EntanglementClass,
}

pub fn entanglement_report(
    state: &ComplexVector,
    config: &EntanglementConfig,
) -> Result<EntanglementReport> {
    let concurrence = concurrence_pure(state)?;
    let s = schmidt(state)?;
    Ok(EntanglementReport {
        concurrence,
        schmidt: (s.lambda1, s.lambda2),
        class: config.classify(concurrence),
    })
}

fn check_two_qubit(dim: usize) -> Result<()> {
    if dim == 4 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 4,
            found: dim,
        })
    }
}

/// `2 |a d - b c|` for amplitudes `(a, b, c, d)`, clamped to `[0, 1]`.
pub fn concurrence_pure(state: &ComplexVector) -> Result<f64> {
    check_two_qubit(state.dim())?;
    let det = state[0] * state[3] - state[1] * state[2];
    Ok((2.0 * det.norm()).clamp(0.0, 1.0))
}

/// `σy ⊗ σy`, real in the computational basis.
fn spin_flip() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m[(0, 3)] = c(-1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 0)] = c(-1.0, 0.0);
    m
}

/// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)` of a two-qubit density
/// matrix.
///
/// The λ are computed as singular values of `τ = Wᵀ (σy⊗σy) W`, where the
/// columns of `W` are `√p_i |e_i⟩` from the eigen-decomposition of ρ. This
/// matches the eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)` and stays exact for
/// pure inputs.
pub fn concurrence_wootters(rho: &ComplexMatrix) -> Result<f64> {
    check_two_qubit(rho.dim())?;
    let eig = eig_hermitian(rho)?;
    let min = eig.values[0];
    if min < -PSD_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > PSD_TOL {
        return Err(Error::InvalidParameter(format!(
            "density matrix trace {} != 1",
            trace.re
        )));
    }

    let kept: Vec<(f64, ComplexVector)> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > RANK_CUTOFF)
        .map(|(k, &p)| (p, eig.vector(k)))
        .collect();
    if kept.is_empty() {
        return Ok(0.0);
    }
    let flip = spin_flip();
    let w: Vec<ComplexVector> = kept
        .iter()
        .map(|(p, e)| e.scale(c(p.sqrt(), 0.0)))
        .collect();
    let flipped: Vec<ComplexVector> = w.iter().map(|wj| flip.apply(wj)).collect::<Result<_>>()?;
    let k = w.len();
    // τ_ij = w_iᵀ Σ w_j (bilinear, no conjugation)
    let tau: Vec<Vec<C64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..4).map(|r| w[i][r] * flipped[j][r]).sum())
                .collect()
        })
        .collect();

    let mut lambdas = if k == 1 {
        vec![tau[0][0].norm()]
    } else {
        let gram =
            ComplexMatrix::from_fn(k, |i, j| (0..k).map(|r| tau[r][i].conj() * tau[r][j]).sum());
        eig_hermitian(&gram)?
            .values
            .into_iter()
            .map(|v| v.max(0.0).sqrt())
            .collect()
    };
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = lambdas[1..].iter().sum();
    Ok((lambdas[0] - rest).clamp(0.0, 1.0))
}

/// Schmidt coefficients with the matching local bases.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending.
    pub coefficients: [f64; 2],
    /// Basis of the first qubit.
    pub first: [ComplexVector; 2],
    /// Basis of the second qubit, so that the state is
    /// `Σ λ_k |first_k⟩ ⊗ |second_k⟩`.
    pub second: [ComplexVector; 2],
}

/// Singular-value decomposition of the 2×2 amplitude matrix
/// `M[i][j] = ψ[2i + j]`.
///
/// The right singular vectors come from the Gram matrix `M†M`; the
/// coefficients are the norms `‖M v_k‖`, which keeps a vanishing second
/// coefficient at round-off level instead of its square root.
pub fn schmidt_decomposition(state: &ComplexVector) -> Result<SchmidtDecomposition> {
    check_two_qubit(state.dim())?;
    let m = |i: usize, j: usize| state[2 * i + j];
    let gram = ComplexMatrix::from_fn(2, |i, j| (0..2).map(|r| m(r, i).conj() * m(r, j)).sum());
    let eig = eig_hermitian(&gram)?;
    // ascending eigenvalues: column 1 is dominant
    let mut coefficients = [0.0; 2];
    let mut first = [ComplexVector::basis(2, 0), ComplexVector::basis(2, 1)];
    let mut second = [ComplexVector::basis(2, 0), ComplexVector::basis(2, 1)];
    for (slot, col) in [(0usize, 1usize), (1, 0)] {
        let v = eig.vector(col);
        let mv = ComplexVector::new(
            (0..2)
                .map(|i| (0..2).map(|j| m(i, j) * v[j]).sum())
                .collect(),
        );
        let norm = mv.norm();
        coefficients[slot] = norm;
        second[slot] = ComplexVector::new(v.entries().iter().map(|z| z.conj()).collect());
        first[slot] = if norm > 0.0 {
            mv.scale(c(1.0 / norm, 0.0))
        } else {
            // orthogonal complement of the dominant left vector
            let u = &first[0];
            ComplexVector::new(vec![-u[1].conj(), u[0].conj()])
        };
    }
    if coefficients[1] > coefficients[0] {
        coefficients.swap(0, 1);
        first.swap(0, 1);
        second.swap(0, 1);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        first,
        second,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schmidt {
    pub lambda1: f64,
    pub lambda2: f64,
}

pub fn schmidt(state: &ComplexVector) -> Result<Schmidt> {
    let d = schmidt_decomposition(state)?;
    Ok(Schmidt {
        lambda1: d.coefficients[0],
        lambda2: d.coefficients[1],
    })
}

/// Analytic concurrence of the generalized families after phase
/// `x = v0·dt`.
///
/// Basis-preserving: `|sin(x (1-η)(1-κ) / 2)|`, the half-angle form of
/// `½|1 - e^{iθ}|`. Basis-flipping: `½|[cos(η+κ) - cos(η-κ)] sin 2x|`.
pub fn closed_form_concurrence(family: Family, eta: f64, kappa: f64, x: f64) -> Result<f64> {
    let value = match family {
        Family::GeneralDiag => (0.5 * x * (1.0 - eta) * (1.0 - kappa)).sin().abs(),
        Family::GeneralFlip => {
            0.5 * (((eta + kappa).cos() - (eta - kappa).cos()) * (2.0 * x).sin()).abs()
        }
        other => return Err(Error::UnsupportedFamily(other)),
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Purity `Tr(ρ²)`.
pub fn purity(rho: &ComplexMatrix) -> f64 {
    let n = rho.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * rho[(j, i)];
        }
    }
    acc.re
}
