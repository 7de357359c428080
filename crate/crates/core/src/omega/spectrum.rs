use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sum::PauliSum;
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliWord};
use crate::resource::{symplectic, symplectic_width, ResourceState, StabilizerGroup};

pub const DEFAULT_SPECTRAL_CAP: usize = 26;

const PAR_MIN_LEN: usize = 1 << 14;
const EIG_TOL: f64 = 1e-12;

/// In-place unnormalized Walsh–Hadamard transform. The result does not
/// depend on the number of worker threads.
pub fn fwht(data: &mut [f64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < len {
        let butterfly = |block: &mut [f64]| {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        };
        if len < PAR_MIN_LEN {
            data.chunks_mut(2 * h).for_each(butterfly);
        } else if 2 * h <= len / 64 {
            data.par_chunks_mut(2 * h).for_each(butterfly);
        } else {
            for block in data.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                lo.par_chunks_mut(4096)
                    .zip(hi.par_chunks_mut(4096))
                    .for_each(|(lo, hi)| {
                        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                            let (x, y) = (*a, *b);
                            *a = x + y;
                            *b = x - y;
                        }
                    });
            }
        }
        h *= 2;
    }
}

/// Eigenvalues of a sum of commuting Paulis, indexed by sign pattern: entry
/// `e` belongs to the joint eigenspace where generator `j` has eigenvalue
/// `(-1)^{e_j}`. Each entry has multiplicity `2^(n - rank)`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n: usize,
    rank: usize,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicity(&self) -> u64 {
        1u64 << (self.n - self.rank)
    }

    /// All 2^n eigenvalues, sorted descending.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .values
            .iter()
            .flat_map(|&x| std::iter::repeat_n(x, self.multiplicity() as usize))
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Sign pattern of some joint eigenspace with eigenvalue within `tol`.
    pub fn pattern_for(&self, value: f64, tol: f64) -> Option<u64> {
        self.values
            .iter()
            .position(|&x| (x - value).abs() <= tol)
            .map(|e| e as u64)
    }

    pub fn summary(&self) -> SpectralSummary {
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let top = self.values.iter().filter(|&&x| x >= max - EIG_TOL).count() as u64;
        let max_multiplicity = top * self.multiplicity();
        let second = if max_multiplicity > 1 {
            max
        } else {
            self.values
                .iter()
                .copied()
                .filter(|&x| x < max - EIG_TOL)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let second = if second.is_finite() { second } else { max };
        SpectralSummary {
            max_eig: max,
            second_eig: second,
            min_eig: min,
            nu: 1.0 - second,
            max_multiplicity,
        }
    }
}

/// Largest, second largest and smallest eigenvalue, and the gap `1 - β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub max_eig: f64,
    pub second_eig: f64,
    pub min_eig: f64,
    pub nu: f64,
    pub max_multiplicity: u64,
}

fn check_spectral_cap(n: usize, rank: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::cap("spectral qubit count", n, cap));
    }
    if rank > 62 {
        return Err(Error::cap("spectral rank", rank, 62));
    }
    Ok(())
}

fn to_mask(combo: &[u64]) -> u64 {
    combo.first().copied().unwrap_or(0)
}

/// Diagonalizes `sum` in the joint eigenbasis of `group`. Every term must
/// lie in the group up to sign.
pub fn diagonalize_commuting(sum: &PauliSum, group: &StabilizerGroup, cap: usize) -> Result<Spectrum> {
    if sum.n() != group.n() {
        return Err(Error::DimensionMismatch {
            left: sum.n(),
            right: group.n(),
        });
    }
    let rank = group.len();
    check_spectral_cap(sum.n(), rank, cap)?;
    let mut f = vec![0.0; 1usize << rank];
    for (word, c) in sum.terms() {
        let combo = group
            .decompose(word)
            .ok_or_else(|| Error::invalid(format!("term {word} is not in the span of the group")))?;
        let mask = to_mask(&combo);
        let element = group.element(&combo);
        let sign = if element.phase() == word.phase() { 1.0 } else { -1.0 };
        f[mask as usize] += sign * c.to_f64();
    }
    fwht(&mut f);
    Ok(Spectrum {
        n: sum.n(),
        rank,
        values: f,
    })
}

/// Diagonalizes a sum whose terms commute pairwise, using a basis chosen
/// from the terms themselves.
pub fn diagonalize_pauli_sum(sum: &PauliSum, cap: usize) -> Result<Spectrum> {
    let n = sum.n();
    let mut dec = crate::gf2::Decomposer::new(symplectic_width(n), sum.len().max(1));
    let mut basis = Vec::new();
    for (k, (w, _)) in sum.terms().enumerate() {
        if w.is_identity_letters() {
            continue;
        }
        if dec.insert(&symplectic(w), k) {
            basis.push(w.clone());
        }
    }
    let group = StabilizerGroup::new(n, basis)?;
    diagonalize_commuting(sum, &group, cap)
}

/// Spectrum of Ω computed straight from the group enumeration, without
/// materializing the Pauli sum.
pub fn omega_spectrum(state: &ResourceState, cap: usize) -> Result<Spectrum> {
    let n = state.n();
    let group = state.group();
    check_spectral_cap(n, group.len(), cap)?;
    let measured: Vec<usize> = state.measured().iter().collect();
    let o = state.outputs().len() as i32;
    let mut f = vec![0.0; 1usize << group.len()];
    for (combo, g) in group.enumerate_indexed(cap)? {
        let mut w = 0;
        let mut keep = true;
        for &q in &measured {
            match g.letter(q) {
                Letter::I => {}
                Letter::Z => {
                    keep = false;
                    break;
                }
                _ => w += 1,
            }
        }
        if keep {
            f[combo as usize] = 2f64.powi(-(o + w));
        }
    }
    fwht(&mut f);
    Ok(Spectrum {
        n,
        rank: group.len(),
        values: f,
    })
}

/// β, τ and ν for the Ω of `state`, with the structural checks that the top
/// eigenvalue is a simple 1 and the bottom one is 0.
pub fn spectral_summary(state: &ResourceState, cap: usize) -> Result<SpectralSummary> {
    let s = omega_spectrum(state, cap)?.summary();
    if (s.max_eig - 1.0).abs() > EIG_TOL || s.max_multiplicity != 1 {
        return Err(Error::CrossCheck(format!(
            "top eigenvalue {} with multiplicity {}",
            s.max_eig, s.max_multiplicity
        )));
    }
    if s.min_eig.abs() > EIG_TOL {
        return Err(Error::CrossCheck(format!("smallest eigenvalue {}", s.min_eig)));
    }
    Ok(s)
}

/// Generators of a joint eigenspace of Ω with eigenvalue β: the group with
/// signs flipped according to the returned sign pattern.
pub fn beta_eigenspace(state: &ResourceState, cap: usize) -> Result<(Vec<PauliWord>, f64)> {
    let spec = omega_spectrum(state, cap)?;
    let beta = spec.summary().second_eig;
    let e = spec
        .pattern_for(beta, EIG_TOL)
        .ok_or_else(|| Error::CrossCheck("second eigenvalue not found".into()))?;
    let gens = state
        .group()
        .generators()
        .iter()
        .enumerate()
        .map(|(j, g)| if (e >> j) & 1 == 1 { g.clone().negated() } else { g.clone() })
        .collect();
    Ok((gens, beta))
}
