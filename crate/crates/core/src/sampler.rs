//! Sampling stabilizers with probability proportional to their weight in Ω.
//!
//! A draw picks a uniformly random product of T-stabilizers, then walks the
//! measured qubits in temporal order. Whenever the current word acts as X or
//! Y on the qubit it is multiplied by that qubit's R-stabilizer with
//! probability one half. Later multiplications never touch qubits already
//! visited, so the result acts as I, X or Y on every measured qubit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::omega::{lambda_expand, Dyadic};
use crate::pauli::{PauliWord, QubitSet};
use crate::resource::{ResourceState, StabilizerGroup, DEFAULT_ENUM_CAP};

/// Largest state for which the full tree expansion is offered.
pub const EXACT_DISTRIBUTION_CAP: usize = 14;

/// Deterministic random stream keyed by a seed and a stream index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }
}

/// One fork on the path of a draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fork {
    pub qubit: usize,
    pub multiplied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTrace {
    /// Indices of the T-stabilizers in the starting product.
    pub t_subset: Vec<usize>,
    /// Forks in temporal order.
    pub decisions: Vec<Fork>,
    pub result: PauliWord,
    pub log2_prob: i32,
}

/// Precomputed R- and T-stabilizers of a resource state.
#[derive(Clone, Debug)]
pub struct Sampler {
    n: usize,
    measured: QubitSet,
    t_stabilizers: Vec<PauliWord>,
    forks: Vec<(usize, PauliWord)>,
}

impl Sampler {
    pub fn new(state: &ResourceState) -> Result<Self> {
        let t_stabilizers = state.derive_t_stabilizers()?;
        let forks = state
            .order()
            .iter()
            .map(|&q| (q, state.r_stabilizer(q)))
            .collect();
        Ok(Self {
            n: state.n(),
            measured: state.measured(),
            t_stabilizers,
            forks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_stabilizers(&self) -> &[PauliWord] {
        &self.t_stabilizers
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SampleTrace {
        let mut g = PauliWord::identity(self.n);
        let mut t_subset = Vec::new();
        for (k, t) in self.t_stabilizers.iter().enumerate() {
            if rng.random::<bool>() {
                g.mul_assign(t);
                t_subset.push(k);
            }
        }
        let mut decisions = Vec::new();
        for (q, zr) in &self.forks {
            if g.x_bit(*q) {
                let multiplied = rng.random::<bool>();
                if multiplied {
                    g.mul_assign(zr);
                }
                decisions.push(Fork {
                    qubit: *q,
                    multiplied,
                });
            }
        }
        let log2_prob = -((self.t_stabilizers.len() + decisions.len()) as i32);
        SampleTrace {
            t_subset,
            decisions,
            result: g,
            log2_prob,
        }
    }

    pub fn sample_stream(&self, stream: RngStream) -> SampleTrace {
        self.sample(&mut stream.rng())
    }

    /// Undoes the forks of `trace` in reverse order, recovering the starting
    /// T-product.
    pub fn replay_reverse(&self, trace: &SampleTrace) -> PauliWord {
        let mut g = trace.result.clone();
        for fork in trace.decisions.iter().rev().filter(|f| f.multiplied) {
            let (_, zr) = self
                .forks
                .iter()
                .find(|(q, _)| *q == fork.qubit)
                .expect("fork on a measured qubit");
            g.mul_assign(zr);
        }
        g
    }

    /// Weight of `word` on the measured qubits.
    pub fn measured_weight(&self, word: &PauliWord) -> usize {
        word.weight_on(&self.measured)
    }
}

pub fn sample_stabilizer(state: &ResourceState, stream: RngStream) -> Result<SampleTrace> {
    Ok(Sampler::new(state)?.sample_stream(stream))
}

/// Every reachable signed word with its exact probability.
pub fn exact_distribution(state: &ResourceState) -> Result<BTreeMap<PauliWord, Dyadic>> {
    if state.n() > EXACT_DISTRIBUTION_CAP {
        return Err(Error::cap("exact distribution", state.n(), EXACT_DISTRIBUTION_CAP));
    }
    let ts = state.derive_t_stabilizers()?;
    let o = ts.len() as u32;
    let t_group = StabilizerGroup::new(state.n(), ts)?;
    let mut dist = BTreeMap::new();
    for (_, t) in t_group.enumerate_indexed(DEFAULT_ENUM_CAP)? {
        for (leaf, depth) in lambda_expand(state, &t) {
            *dist.entry(leaf).or_insert(Dyadic::ZERO) += Dyadic::half_pow(o + depth);
        }
    }
    Ok(dist)
}

/// Largest absolute gap between empirical and exact probabilities over the
/// union of both supports. Draw `k` uses stream `(seed, k)`.
pub fn empirical_check(state: &ResourceState, samples: usize, seed: u64) -> Result<f64> {
    let exact = exact_distribution(state)?;
    let sampler = Sampler::new(state)?;
    let draws: Vec<PauliWord> = (0..samples as u64)
        .into_par_iter()
        .map(|k| sampler.sample_stream(RngStream::new(seed, k)).result)
        .collect();
    let mut counts: BTreeMap<PauliWord, usize> = BTreeMap::new();
    for w in draws {
        *counts.entry(w).or_default() += 1;
    }
    let denom = samples.max(1) as f64;
    let mut worst: f64 = 0.0;
    for (w, p) in &exact {
        let emp = counts.get(w).copied().unwrap_or(0) as f64 / denom;
        worst = worst.max((emp - p.to_f64()).abs());
    }
    for (w, c) in &counts {
        if !exact.contains_key(w) {
            worst = worst.max(*c as f64 / denom);
        }
    }
    Ok(worst)
}
