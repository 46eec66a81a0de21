//! Canonical states, free Hamiltonians and interaction potentials.
//!
//! # Basis ordering
//!
//! Every vector and matrix in this crate uses one fixed ordering of the
//! product basis. For two qubits with bases `{|φ1⟩, |φ2⟩}` and
//! `{|χ1⟩, |χ2⟩}`:
//!
//! | index | state     |
//! |-------|-----------|
//! | 0     | `|φ1 χ1⟩` |
//! | 1     | `|φ1 χ2⟩` |
//! | 2     | `|φ2 χ1⟩` |
//! | 3     | `|φ2 χ2⟩` |
//!
//! With a third qubit `{|η1⟩, |η2⟩}`, `|φi χj ηk⟩` sits at
//! `4(i-1) + 2(j-1) + (k-1)`. This is the ordering produced by
//! [`kron`](crate::qmath::kron) with the first system as the most
//! significant factor.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, kron, kron_all, pauli_x, ComplexMatrix, ComplexVector, C64, I};

/// Interaction-potential families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `V0 (|φ1χ1⟩⟨φ1χ1| - |φ2χ2⟩⟨φ2χ2|)`
    Case1Diag,
    /// `V0 (i|φ1⟩⟨φ2| - i|φ2⟩⟨φ1|) ⊗ (|χ1⟩⟨χ2| + |χ2⟩⟨χ1|)`
    Case2Flip,
    /// Basis-preserving: `V0 (|φ1⟩⟨φ1| + η|φ2⟩⟨φ2|) ⊗ (|χ1⟩⟨χ1| + κ|χ2⟩⟨χ2|)`
    GeneralDiag,
    /// Basis-flipping: `V0 (e^{iη}|φ1⟩⟨φ2| + h.c.) ⊗ (e^{iκ}|χ1⟩⟨χ2| + h.c.)`
    GeneralFlip,
    /// Energy-violating short pulse mixing both kinds.
    MixedPulse,
    /// Three-qubit `I ⊗ V0 (i|χ1⟩⟨χ2| + h.c.) ⊗ (|η1⟩⟨η2| + h.c.)`
    NonlocalFlip,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Case1Diag,
        Family::Case2Flip,
        Family::GeneralDiag,
        Family::GeneralFlip,
        Family::MixedPulse,
        Family::NonlocalFlip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Case1Diag => "case1_diag",
            Family::Case2Flip => "case2_flip",
            Family::GeneralDiag => "general_diag",
            Family::GeneralFlip => "general_flip",
            Family::MixedPulse => "mixed_pulse",
            Family::NonlocalFlip => "nonlocal_flip",
        }
    }

    pub fn n_qubits(self) -> usize {
        match self {
            Family::NonlocalFlip => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// One member of a potential family with its real parameters. Parameters a
/// family does not use are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    pub v0: f64,
    pub eta: f64,
    pub kappa: f64,
    pub eps: f64,
}

impl PotentialSpec {
    pub fn new(family: Family, v0: f64) -> Self {
        PotentialSpec {
            family,
            v0,
            eta: 0.0,
            kappa: 0.0,
            eps: 0.0,
        }
    }

    pub fn case1(v0: f64) -> Self {
        Self::new(Family::Case1Diag, v0)
    }

    pub fn case2(v0: f64) -> Self {
        Self::new(Family::Case2Flip, v0)
    }

    pub fn general_diag(v0: f64, eta: f64, kappa: f64) -> Self {
        PotentialSpec {
            eta,
            kappa,
            ..Self::new(Family::GeneralDiag, v0)
        }
    }

    pub fn general_flip(v0: f64, eta: f64, kappa: f64) -> Self {
        PotentialSpec {
            eta,
            kappa,
            ..Self::new(Family::GeneralFlip, v0)
        }
    }

    pub fn mixed_pulse(eps: f64, v0: f64) -> Self {
        PotentialSpec {
            eps,
            ..Self::new(Family::MixedPulse, v0)
        }
    }

    pub fn nonlocal_flip(v0: f64) -> Self {
        Self::new(Family::NonlocalFlip, v0)
    }

    pub fn dim(&self) -> usize {
        1 << self.family.n_qubits()
    }

    fn check_finite(&self) -> Result<()> {
        let check = |v: f64, name: &'static str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite(name))
            }
        };
        check(self.v0, "v0")?;
        match self.family {
            Family::GeneralDiag | Family::GeneralFlip => {
                check(self.eta, "eta")?;
                check(self.kappa, "kappa")
            }
            Family::MixedPulse => check(self.eps, "eps"),
            _ => Ok(()),
        }
    }
}

/// Canonical text form: `family=general_flip v0=1 eta=1.5708 kappa=1.5708`.
impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={} v0={}", self.family, self.v0)?;
        match self.family {
            Family::GeneralDiag | Family::GeneralFlip => {
                write!(f, " eta={} kappa={}", self.eta, self.kappa)
            }
            Family::MixedPulse => write!(f, " eps={}", self.eps),
            _ => Ok(()),
        }
    }
}

impl FromStr for PotentialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut family = None;
        let mut v0 = None;
        let (mut eta, mut kappa, mut eps) = (0.0, 0.0, 0.0);
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::ParseSpec(format!("expected key=value, got `{token}`")))?;
            let real = || {
                value.parse::<f64>().map_err(|_| {
                    Error::ParseSpec(format!("`{key}` is not a real number: `{value}`"))
                })
            };
            match key {
                "family" => family = Some(value.parse::<Family>()?),
                "v0" => v0 = Some(real()?),
                "eta" => eta = real()?,
                "kappa" => kappa = real()?,
                "eps" => eps = real()?,
                _ => return Err(Error::ParseSpec(format!("unknown key `{key}`"))),
            }
        }
        let family = family.ok_or_else(|| Error::ParseSpec("missing `family`".into()))?;
        let v0 = v0.ok_or_else(|| Error::ParseSpec("missing `v0`".into()))?;
        Ok(PotentialSpec {
            family,
            v0,
            eta,
            kappa,
            eps,
        })
    }
}

/// Energies of the free (pre-interaction) single-system Hamiltonians, each
/// proportional to the identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FreeHamiltonianSpec {
    pub eps1: f64,
    pub eps2: f64,
    /// Third system, used only for three-qubit runs.
    pub eps3: f64,
}

impl FreeHamiltonianSpec {
    pub fn new(eps1: f64, eps2: f64) -> Self {
        FreeHamiltonianSpec {
            eps1,
            eps2,
            eps3: 0.0,
        }
    }

    pub fn total(&self, n_qubits: usize) -> f64 {
        match n_qubits {
            3 => self.eps1 + self.eps2 + self.eps3,
            _ => self.eps1 + self.eps2,
        }
    }
}

/// `(|φ1⟩ + |φ2⟩) ⊗ (|χ1⟩ - |χ2⟩) / 2`
pub fn initial_two_qubit_state() -> ComplexVector {
    ComplexVector::from_real(&[0.5, -0.5, 0.5, -0.5])
}

/// `(|φ1χ1⟩ + |φ2χ2⟩)/√2 ⊗ (|η1⟩ - |η2⟩)/√2`
pub fn initial_three_qubit_state() -> ComplexVector {
    ComplexVector::from_real(&[0.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.5, -0.5])
}

/// Initial state matching the dimension of a potential (4 or 8).
pub fn initial_state(dim: usize) -> Result<ComplexVector> {
    match dim {
        4 => Ok(initial_two_qubit_state()),
        8 => Ok(initial_three_qubit_state()),
        _ => Err(Error::DimensionMismatch {
            expected: 4,
            found: dim,
        }),
    }
}

/// `H0 = H1 ⊗ I + I ⊗ H2 (+ I ⊗ I ⊗ H3)`; every term is scalar, so this is
/// `(Σ εᵢ) I`.
pub fn build_h0(spec: &FreeHamiltonianSpec, n_qubits: usize) -> Result<ComplexMatrix> {
    let i2 = ComplexMatrix::identity(2);
    let h1 = i2.scale(c(spec.eps1, 0.0));
    let h2 = i2.scale(c(spec.eps2, 0.0));
    match n_qubits {
        2 => Ok(&kron(&h1, &i2)? + &kron(&i2, &h2)?),
        3 => {
            let h3 = i2.scale(c(spec.eps3, 0.0));
            let a = kron_all(&[&h1, &i2, &i2])?;
            let b = kron_all(&[&i2, &h2, &i2])?;
            let d = kron_all(&[&i2, &i2, &h3])?;
            Ok(&(&a + &b) + &d)
        }
        n => Err(Error::InvalidParameter(format!(
            "n_qubits must be 2 or 3, got {n}"
        ))),
    }
}

/// `|a⟩⟨b|` on a single qubit.
fn ket_bra(a: usize, b: usize, amp: C64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(a, b)] = amp;
    m
}

/// Concrete matrix of a potential in the fixed basis ordering.
pub fn build_potential(spec: &PotentialSpec) -> Result<ComplexMatrix> {
    spec.check_finite()?;
    let v0 = spec.v0;
    let m = match spec.family {
        Family::Case1Diag => ComplexMatrix::from_real_diag(&[v0, 0.0, 0.0, -v0]),
        Family::Case2Flip => {
            let a = &ket_bra(0, 1, I) + &ket_bra(1, 0, -I);
            kron(&a, &pauli_x())?.scale(c(v0, 0.0))
        }
        Family::GeneralDiag => {
            let (eta, kappa) = (spec.eta, spec.kappa);
            ComplexMatrix::from_real_diag(&[v0, v0 * kappa, v0 * eta, v0 * eta * kappa])
        }
        Family::GeneralFlip => {
            let a = &ket_bra(0, 1, C64::from_polar(1.0, spec.eta))
                + &ket_bra(1, 0, C64::from_polar(1.0, -spec.eta));
            let b = &ket_bra(0, 1, C64::from_polar(1.0, spec.kappa))
                + &ket_bra(1, 0, C64::from_polar(1.0, -spec.kappa));
            kron(&a, &b)?.scale(c(v0, 0.0))
        }
        Family::MixedPulse => {
            let eps = spec.eps;
            let mut m = ComplexMatrix::zeros(4);
            m[(1, 1)] = c(-eps, 0.0);
            m[(2, 2)] = c(-eps, 0.0);
            m[(0, 2)] = c(0.0, v0);
            m[(2, 0)] = c(0.0, -v0);
            m[(1, 3)] = c(0.0, -v0);
            m[(3, 1)] = c(0.0, v0);
            m
        }
        Family::NonlocalFlip => {
            let a = &ket_bra(0, 1, I) + &ket_bra(1, 0, -I);
            let inner = kron(&a, &pauli_x())?.scale(c(v0, 0.0));
            kron(&ComplexMatrix::identity(2), &inner)?
        }
    };
    debug_assert!(m.is_hermitian());
    Ok(m)
}

/// Recovers `(v0, η, κ)` if `v` is a member of the basis-preserving family
/// `v0·diag(1, κ, η, ηκ)`.
pub fn general_diag_params(v: &ComplexMatrix) -> Option<(f64, f64, f64)> {
    const TOL: f64 = 1e-12;
    if v.dim() != 4 {
        return None;
    }
    for i in 0..4 {
        for j in 0..4 {
            if i != j && v[(i, j)].norm() > TOL {
                return None;
            }
        }
        if v[(i, i)].im.abs() > TOL {
            return None;
        }
    }
    let d: Vec<f64> = (0..4).map(|i| v[(i, i)].re).collect();
    let scale = d.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    if d[0].abs() <= TOL {
        // v0 = 0 only admits the zero matrix
        return d.iter().all(|x| x.abs() <= TOL).then_some((0.0, 0.0, 0.0));
    }
    let v0 = d[0];
    let kappa = d[1] / v0;
    let eta = d[2] / v0;
    ((v0 * eta * kappa - d[3]).abs() <= TOL * scale).then_some((v0, eta, kappa))
}
