use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::dense::{apply_pauli, pauli_trace, sandwich, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::omega::PauliSum;
use crate::pauli::PauliWord;
use crate::resource::{ResourceState, StabilizerGroup};

pub const NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;

fn check_dense(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::cap("dense simulation", n, cap))
    } else {
        Ok(())
    }
}

/// Normalized amplitude vector on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: DVector<C64>,
}

impl PureState {
    pub fn new(n: usize, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: 1 << n,
                right: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes `amps` and fixes the global phase so that the first
    /// nonzero amplitude is real and positive.
    pub fn normalized(n: usize, mut amps: DVector<C64>) -> Result<Self> {
        let norm = amps.norm();
        if norm < NORM_TOL {
            return Err(Error::InvalidState("zero vector".into()));
        }
        amps /= C64::new(norm, 0.0);
        if let Some(first) = amps.iter().find(|a| a.norm() > 1e-9).copied() {
            let phase = first / first.norm();
            amps /= phase;
        }
        Self::new(n, amps)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = DVector::from_element(1 << n, ZERO);
        amps[index] = ONE;
        Self { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    pub fn expectation(&self, word: &PauliWord) -> C64 {
        let mut v = self.amps.as_slice().to_vec();
        apply_pauli(&mut v, word, None);
        self.amps.dotc(&DVector::from_vec(v))
    }

    pub fn to_density(&self) -> DensityState {
        DensityState {
            n: self.n,
            matrix: &self.amps * self.amps.adjoint(),
        }
    }
}

/// Density matrix on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    n: usize,
    matrix: DMatrix<C64>,
}

impl DensityState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n: usize, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != 1 << n || matrix.ncols() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: 1 << n,
                right: matrix.nrows(),
            });
        }
        let s = Self { n, matrix };
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn from_matrix_unchecked(n: usize, matrix: DMatrix<C64>) -> Self {
        Self { n, matrix }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        Self {
            n,
            matrix: DMatrix::identity(d, d) / C64::new(d as f64, 0.0),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (&self.matrix - self.matrix.adjoint()).norm();
        if herm > TRACE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -TRACE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    /// `(1 - w) self + w other`.
    pub fn mix(&self, other: &DensityState, w: f64) -> Result<DensityState> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(DensityState {
            n: self.n,
            matrix: &self.matrix * C64::new(1.0 - w, 0.0) + &other.matrix * C64::new(w, 0.0),
        })
    }

    /// `tr(ρ P)` for a Pauli word.
    pub fn pauli_expectation(&self, word: &PauliWord) -> Result<C64> {
        if word.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: word.n(),
            });
        }
        Ok(pauli_trace(&self.matrix, word))
    }

    pub fn sandwich(&self, v: &PureState) -> f64 {
        sandwich(&self.matrix, v.amplitudes()).re
    }
}

/// The unique joint +1 eigenvector of a complete stabilizer group.
pub fn group_vector(group: &StabilizerGroup, cap: usize) -> Result<PureState> {
    let n = group.n();
    check_dense(n, cap)?;
    if !group.is_complete() {
        return Err(Error::invalid(format!(
            "{} generators do not fix a unique state on {n} qubits",
            group.len()
        )));
    }
    for start in 0..1usize << n {
        let mut v = PureState::basis(n, start).into_amplitudes();
        for g in group.generators() {
            let mut gv = v.as_slice().to_vec();
            apply_pauli(&mut gv, g, None);
            v = (v + DVector::from_vec(gv)) * C64::new(0.5, 0.0);
        }
        if v.norm() > 1e-6 {
            return PureState::normalized(n, v);
        }
    }
    Err(Error::InvalidState("group fixes no state".into()))
}

/// The resource state vector.
pub fn ideal_vector(state: &ResourceState, cap: usize) -> Result<PureState> {
    group_vector(state.group(), cap)
}

/// `Σ c_P tr(ρ P)`.
pub fn expectation(rho: &DensityState, sum: &PauliSum) -> Result<f64> {
    if sum.n() != rho.n() {
        return Err(Error::DimensionMismatch {
            left: rho.n(),
            right: sum.n(),
        });
    }
    let mut total = C64::new(0.0, 0.0);
    for (w, c) in sum.terms() {
        total += pauli_trace(rho.matrix(), w) * c.to_f64();
    }
    if total.im.abs() > NORM_TOL {
        return Err(Error::CrossCheck(format!("expectation has imaginary part {}", total.im)));
    }
    Ok(total.re)
}

/// `⟨S|ρ|S⟩` from the stabilizer expansion `2^-n Σ_g tr(ρ g)`, checked
/// against the direct sandwich with the state vector.
pub fn state_fidelity(rho: &DensityState, state: &ResourceState, cap: usize) -> Result<f64> {
    let n = state.n();
    check_dense(n, cap)?;
    let mut total = C64::new(0.0, 0.0);
    for g in state.group().enumerate(cap.max(n))? {
        total += pauli_trace(rho.matrix(), &g);
    }
    let expanded = total.re / (1u64 << n) as f64;
    let direct = rho.sandwich(&ideal_vector(state, cap)?);
    if (expanded - direct).abs() > TRACE_TOL {
        return Err(Error::CrossCheck(format!(
            "stabilizer expansion {expanded} differs from sandwich {direct}"
        )));
    }
    Ok(expanded)
}

/// Serializable amplitude listing used by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmplitudeDump {
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&PureState> for AmplitudeDump {
    fn from(s: &PureState) -> Self {
        Self {
            n: s.n,
            re: s.amps.iter().map(|a| a.re).collect(),
            im: s.amps.iter().map(|a| a.im).collect(),
        }
    }
}
