//! Direct fidelity estimation from single-shot stabilizer measurements.
//!
//! Both protocols draw Pauli words from a probability distribution, measure
//! each once on a fresh copy of the state and average the ±1 outcomes. The
//! number of shots comes from Hoeffding's inequality for ±1 variables.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliWord;
use crate::resource::ResourceState;
use crate::sampler::{RngStream, Sampler};
use crate::sim::DensityState;

/// Tolerance used when comparing the two sides of the fidelity bounds.
pub const BOUND_TOL: f64 = 1e-9;

/// Outcome streams are keyed apart from the word-drawing streams.
const OUTCOME_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// `⌈(2/ε²) ln(2/δ)⌉`.
pub fn sample_count(epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta {delta} outside (0, 1)")));
    }
    Ok((2.0 / (epsilon * epsilon) * (2.0 / delta).ln()).ceil() as u64)
}

fn outcome_mean(rho: &DensityState, g: &PauliWord) -> Result<f64> {
    if !g.is_hermitian() {
        return Err(Error::invalid(format!("cannot measure non-Hermitian {g}")));
    }
    let mean = rho.pauli_expectation(g)?.re;
    if mean.abs() > 1.0 + 1e-9 {
        return Err(Error::CrossCheck(format!("|tr ρ{g}| = {} exceeds 1", mean.abs())));
    }
    Ok(mean.clamp(-1.0, 1.0))
}

fn draw_outcome<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> i8 {
    if rng.random::<f64>() < (1.0 + mean) / 2.0 {
        1
    } else {
        -1
    }
}

/// One projective measurement of `g` on `rho`.
pub fn measure_stabilizer<R: Rng + ?Sized>(rho: &DensityState, g: &PauliWord, rng: &mut R) -> Result<i8> {
    Ok(draw_outcome(outcome_mean(rho, g)?, rng))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    MbqcFidelity,
    StateFidelity,
}

/// Shots spent on one distinct word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub word: PauliWord,
    pub shots: u64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub target: Target,
    /// Mean of the ±1 outcomes; the confidence statement applies to this.
    pub estimate_raw: f64,
    /// `estimate_raw` clamped to `[0, 1]`.
    pub estimate: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub samples_used: u64,
    pub seed: u64,
    pub ledger: Vec<LedgerEntry>,
}

fn run_protocol(
    target: Target,
    rho: &DensityState,
    epsilon: f64,
    delta: f64,
    seed: u64,
    draw: impl Fn(RngStream) -> PauliWord + Sync,
) -> Result<EstimationReport> {
    let m = sample_count(epsilon, delta)?;
    let words: Vec<PauliWord> = (0..m).into_par_iter().map(|k| draw(RngStream::new(seed, k))).collect();

    let mut means: BTreeMap<PauliWord, f64> = BTreeMap::new();
    for w in &words {
        if !means.contains_key(w) {
            let mean = if w.is_identity_letters() && w.sign() == Some(1) {
                1.0
            } else {
                outcome_mean(rho, w)?
            };
            means.insert(w.clone(), mean);
        }
    }

    let outcomes: Vec<i8> = words
        .par_iter()
        .enumerate()
        .map(|(k, w)| {
            let mean = means[w];
            if mean == 1.0 {
                1
            } else {
                draw_outcome(mean, &mut RngStream::new(seed ^ OUTCOME_SALT, k as u64).rng())
            }
        })
        .collect();

    let mut ledger: BTreeMap<PauliWord, (u64, i64)> = BTreeMap::new();
    for (w, &o) in words.iter().zip(&outcomes) {
        let e = ledger.entry(w.clone()).or_default();
        e.0 += 1;
        e.1 += o as i64;
    }
    let total: i64 = outcomes.iter().map(|&o| o as i64).sum();
    let raw = total as f64 / m as f64;
    Ok(EstimationReport {
        target,
        estimate_raw: raw,
        estimate: raw.clamp(0.0, 1.0),
        epsilon,
        delta,
        samples_used: m,
        seed,
        ledger: ledger
            .into_iter()
            .map(|(word, (shots, sum))| LedgerEntry {
                word,
                shots,
                mean: sum as f64 / shots as f64,
            })
            .collect(),
    })
}

fn check_state(state: &ResourceState, rho: &DensityState) -> Result<()> {
    if state.n() != rho.n() {
        return Err(Error::DimensionMismatch {
            left: state.n(),
            right: rho.n(),
        });
    }
    Ok(())
}

/// Estimates the average MBQC fidelity `tr ρ Ω`.
pub fn estimate_mbqc_fidelity(
    state: &ResourceState,
    rho: &DensityState,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<EstimationReport> {
    check_state(state, rho)?;
    let sampler = Sampler::new(state)?;
    run_protocol(Target::MbqcFidelity, rho, epsilon, delta, seed, |s| {
        sampler.sample_stream(s).result
    })
}

/// Estimates the state fidelity from uniformly drawn group elements.
pub fn estimate_state_fidelity(
    state: &ResourceState,
    rho: &DensityState,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<EstimationReport> {
    check_state(state, rho)?;
    let gens = state.group().generators();
    run_protocol(Target::StateFidelity, rho, epsilon, delta, seed, |s| {
        let mut rng = s.rng();
        let mut g = PauliWord::identity(state.n());
        for gen in gens {
            if rng.random::<bool>() {
                g.mul_assign(gen);
            }
        }
        g
    })
}

/// Slack of `ν(1 − F_S) ≤ 1 − F̄ ≤ 1 − F_S`; each inequality holds when its
/// slack is at least `-BOUND_TOL`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsVerdict {
    pub f_state: f64,
    pub f_mbqc: f64,
    pub nu: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl BoundsVerdict {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

pub fn check_bounds(f_state: f64, f_mbqc: f64, nu: f64) -> BoundsVerdict {
    let infidelity = 1.0 - f_mbqc;
    let lower_slack = infidelity - nu * (1.0 - f_state);
    let upper_slack = (1.0 - f_state) - infidelity;
    BoundsVerdict {
        f_state,
        f_mbqc,
        nu,
        lower_slack,
        upper_slack,
        lower_holds: lower_slack >= -BOUND_TOL,
        upper_holds: upper_slack >= -BOUND_TOL,
    }
}
