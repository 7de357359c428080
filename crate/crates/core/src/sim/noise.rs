use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::dense::{apply_gate, apply_pauli, conjugate, z_rotation, C64};
use super::states::{group_vector, DensityState};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliWord};
use crate::resource::{excited_state, ResourceState};

/// Noise applied to the resource state before any measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// Independent depolarizing channel with probability `p` on every qubit.
    Depolarizing { p: f64 },
    /// Independent Z flip with probability `p` on every qubit.
    Dephasing { p: f64 },
    /// `exp(-i ε Z / 2)` on every qubit.
    CoherentZ { epsilon: f64 },
    /// `(1 - p) ρ + p I / 2^n`.
    GlobalMix { p: f64 },
    /// `(1 - Σ w) ρ + Σ w_k |S_k⟩⟨S_k|` over excited states labelled by
    /// output qubit `k`.
    ExcitedMix { weights: Vec<(usize, f64)> },
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("probability {p} outside [0, 1]")))
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::None => Ok(()),
            NoiseModel::Depolarizing { p } | NoiseModel::Dephasing { p } | NoiseModel::GlobalMix { p } => {
                check_prob(*p)
            }
            NoiseModel::CoherentZ { epsilon } => {
                if epsilon.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("coherent rotation angle must be finite"))
                }
            }
            NoiseModel::ExcitedMix { weights } => {
                weights.iter().try_for_each(|(_, w)| check_prob(*w))?;
                check_prob(weights.iter().map(|(_, w)| w).sum())
            }
        }
    }

    /// Applies the channel exactly.
    pub fn apply(&self, state: &ResourceState, rho: &DensityState, cap: usize) -> Result<DensityState> {
        self.validate()?;
        let n = rho.n();
        if n > cap {
            return Err(Error::cap("dense simulation", n, cap));
        }
        let mut out = rho.clone();
        match self {
            NoiseModel::None => {}
            NoiseModel::Depolarizing { p } => {
                for q in 0..n {
                    let m = out.matrix().clone();
                    let mut acc = &m * C64::new(1.0 - p, 0.0);
                    for letter in [Letter::X, Letter::Y, Letter::Z] {
                        acc += pauli_conj(&m, &PauliWord::single(n, q, letter)) * C64::new(p / 3.0, 0.0);
                    }
                    *out.matrix_mut() = acc;
                }
            }
            NoiseModel::Dephasing { p } => {
                for q in 0..n {
                    let m = out.matrix().clone();
                    let z = PauliWord::single(n, q, Letter::Z);
                    *out.matrix_mut() = &m * C64::new(1.0 - p, 0.0) + pauli_conj(&m, &z) * C64::new(*p, 0.0);
                }
            }
            NoiseModel::CoherentZ { epsilon } => {
                let u = z_rotation(*epsilon);
                for q in 0..n {
                    conjugate(out.matrix_mut(), |col| apply_gate(col, n, q, &u));
                }
            }
            NoiseModel::GlobalMix { p } => {
                out = out.mix(&DensityState::maximally_mixed(n), *p)?;
            }
            NoiseModel::ExcitedMix { weights } => {
                let total: f64 = weights.iter().map(|(_, w)| w).sum();
                let mut acc = out.matrix() * C64::new(1.0 - total, 0.0);
                for &(k, w) in weights {
                    let ex = group_vector(&excited_state(state, k)?.to_group(), cap)?;
                    acc += ex.to_density().matrix() * C64::new(w, 0.0);
                }
                *out.matrix_mut() = acc;
            }
        }
        Ok(out)
    }
}

fn pauli_conj(m: &DMatrix<C64>, word: &PauliWord) -> DMatrix<C64> {
    let mut out = m.clone();
    conjugate(&mut out, |col| apply_pauli(col, word, None));
    out
}

fn parse_f64(text: &str) -> Result<f64> {
    text.trim().parse::<f64>().map_err(|e| Error::Parse {
        text: text.to_string(),
        reason: e.to_string(),
    })
}

impl FromStr for NoiseModel {
    type Err = Error;

    /// `none`, `depolarizing:p`, `dephasing:p`, `coherent_z:eps`,
    /// `global_mix:p` or `excited_mix:k=w,k=w`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") || s.eq_ignore_ascii_case("ideal") {
            return Ok(NoiseModel::None);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(|| Error::Parse {
            text: s.to_string(),
            reason: "expected kind:parameter".into(),
        })?;
        let model = match kind.trim() {
            "depolarizing" => NoiseModel::Depolarizing { p: parse_f64(arg)? },
            "dephasing" => NoiseModel::Dephasing { p: parse_f64(arg)? },
            "coherent_z" => NoiseModel::CoherentZ {
                epsilon: parse_f64(arg)?,
            },
            "global_mix" => NoiseModel::GlobalMix { p: parse_f64(arg)? },
            "excited_mix" => {
                let weights = arg
                    .split(',')
                    .map(|pair| {
                        let (k, w) = pair.split_once('=').ok_or_else(|| Error::Parse {
                            text: pair.to_string(),
                            reason: "expected qubit=weight".into(),
                        })?;
                        let k = k.trim().parse::<usize>().map_err(|e| Error::Parse {
                            text: k.to_string(),
                            reason: e.to_string(),
                        })?;
                        Ok((k, parse_f64(w)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                NoiseModel::ExcitedMix { weights }
            }
            other => {
                return Err(Error::Parse {
                    text: other.to_string(),
                    reason: "unknown noise model".into(),
                })
            }
        };
        model.validate()?;
        Ok(model)
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::None => write!(f, "none"),
            NoiseModel::Depolarizing { p } => write!(f, "depolarizing:{p}"),
            NoiseModel::Dephasing { p } => write!(f, "dephasing:{p}"),
            NoiseModel::CoherentZ { epsilon } => write!(f, "coherent_z:{epsilon}"),
            NoiseModel::GlobalMix { p } => write!(f, "global_mix:{p}"),
            NoiseModel::ExcitedMix { weights } => {
                let parts: Vec<String> = weights.iter().map(|(k, w)| format!("{k}={w}")).collect();
                write!(f, "excited_mix:{}", parts.join(","))
            }
        }
    }
}
