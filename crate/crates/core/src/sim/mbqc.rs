use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dense::{
    adjoint, apply_gate, apply_pauli, bit, conjugate, project_out, rotation, C64,
    ZERO,
};
use super::states::{ideal_vector, DensityState, PureState};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliWord};
use crate::resource::ResourceState;
use crate::sampler::RngStream;

/// Branches whose probability falls below this are dropped.
pub const BRANCH_TOL: f64 = 1e-14;
/// Agreement required between the adaptive path and `tr ρ Ω(θ)`.
pub const CROSS_CHECK_TOL: f64 = 1e-9;
/// The four angles whose rotations measure ±X and ±Y.
pub const CLIFFORD_ANGLES: [f64; 4] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
pub const EXHAUSTIVE_MAX_MEASURED: usize = 8;

fn check_dense(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::cap("dense simulation", n, cap))
    } else {
        Ok(())
    }
}

/// Angles indexed by qubit; entries for outputs are unused.
fn angle_table(state: &ResourceState, angles: &[f64]) -> Result<Vec<f64>> {
    let measured: Vec<usize> = state.measured().iter().collect();
    if angles.len() != measured.len() {
        return Err(Error::invalid(format!(
            "{} angles given for {} measured qubits",
            angles.len(),
            measured.len()
        )));
    }
    if let Some(a) = angles.iter().find(|a| !a.is_finite()) {
        return Err(Error::invalid(format!("angle {a} is not finite")));
    }
    let mut table = vec![0.0; state.n()];
    for (q, a) in measured.into_iter().zip(angles) {
        table[q] = *a;
    }
    Ok(table)
}

/// Γ(θ) on a vector: per measured qubit in temporal order, the rotation
/// `H exp(iθZ)` followed by the correction controlled on that qubit.
fn gamma_vec(state: &ResourceState, table: &[f64], v: &mut [C64]) {
    let n = state.n();
    for &q in state.order() {
        apply_gate(v, n, q, &rotation(table[q]));
        apply_pauli(v, state.r_op(q), Some(q));
    }
}

fn gamma_adjoint_vec(state: &ResourceState, table: &[f64], v: &mut [C64]) {
    let n = state.n();
    for &q in state.order().iter().rev() {
        apply_pauli(v, state.r_op(q), Some(q));
        apply_gate(v, n, q, &adjoint(&rotation(table[q])));
    }
}

pub fn apply_gamma(state: &ResourceState, angles: &[f64], target: &PureState, cap: usize) -> Result<PureState> {
    check_dense(state.n(), cap)?;
    check_size(state, target.n())?;
    let table = angle_table(state, angles)?;
    let mut v = target.amplitudes().as_slice().to_vec();
    gamma_vec(state, &table, &mut v);
    PureState::new(state.n(), DVector::from_vec(v))
}

pub fn apply_gamma_density(
    state: &ResourceState,
    angles: &[f64],
    target: &DensityState,
    cap: usize,
) -> Result<DensityState> {
    check_dense(state.n(), cap)?;
    check_size(state, target.n())?;
    let table = angle_table(state, angles)?;
    let mut m = target.matrix().clone();
    conjugate(&mut m, |col| gamma_vec(state, &table, col));
    Ok(DensityState::from_matrix_unchecked(state.n(), m))
}

fn check_size(state: &ResourceState, n: usize) -> Result<()> {
    if n != state.n() {
        Err(Error::DimensionMismatch {
            left: state.n(),
            right: n,
        })
    } else {
        Ok(())
    }
}

/// Full-register index of measured bits `s` (in ascending qubit order) and
/// output bits `a` (in ascending qubit order).
struct Layout {
    measured_offsets: Vec<usize>,
    output_offsets: Vec<usize>,
}

impl Layout {
    fn new(state: &ResourceState) -> Self {
        let n = state.n();
        let spread = |qubits: Vec<usize>| -> Vec<usize> {
            let k = qubits.len();
            (0..1usize << k)
                .map(|s| {
                    qubits
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| (s >> (k - 1 - j)) & 1 == 1)
                        .fold(0, |acc, (_, &q)| acc | bit(n, q))
                })
                .collect()
        };
        Self {
            measured_offsets: spread(state.measured().iter().collect()),
            output_offsets: spread(state.outputs().iter().collect()),
        }
    }
}

fn outcome_output(v: &[C64], layout: &Layout, s: usize) -> DVector<C64> {
    let base = layout.measured_offsets[s];
    DVector::from_iterator(
        layout.output_offsets.len(),
        layout.output_offsets.iter().map(|&a| v[base | a]),
    )
}

/// The ideal output state on the output qubits, checked to be the same for
/// several measurement records.
pub fn ideal_output(state: &ResourceState, angles: &[f64], cap: usize) -> Result<PureState> {
    check_dense(state.n(), cap)?;
    let table = angle_table(state, angles)?;
    let mut v = ideal_vector(state, cap)?.into_amplitudes().as_slice().to_vec();
    gamma_vec(state, &table, &mut v);
    let layout = Layout::new(state);
    let m = state.measured().len();
    let o = state.outputs().len();
    let psi = PureState::normalized(o, outcome_output(&v, &layout, 0))?;

    let count = layout.measured_offsets.len();
    let mut rng = RngStream::new(0x5eed, 0).rng();
    let mut records = vec![count - 1];
    records.extend((0..2).map(|_| rng.random_range(0..count)));
    let expected_norm = 0.5f64.powi(m as i32);
    for s in records {
        let out = outcome_output(&v, &layout, s);
        let norm = out.norm_squared();
        let overlap = psi.amplitudes().dotc(&out).norm_sqr() / norm.max(f64::MIN_POSITIVE);
        if (norm - expected_norm).abs() > 1e-10 || (overlap - 1.0).abs() > 1e-10 {
            return Err(Error::CrossCheck(format!(
                "output for record {s} differs from record 0 (probability {norm}, fidelity {overlap})"
            )));
        }
    }
    Ok(psi)
}

/// `tr ρ Ω(θ) = Σ_s ⟨s, ψ| Γ ρ Γ† |s, ψ⟩`.
pub fn omega_theta_expectation(
    state: &ResourceState,
    rho: &DensityState,
    angles: &[f64],
    cap: usize,
) -> Result<f64> {
    let psi = ideal_output(state, angles, cap)?;
    let sigma = apply_gamma_density(state, angles, rho, cap)?;
    let layout = Layout::new(state);
    let dim_o = layout.output_offsets.len();
    let mut reduced = DMatrix::from_element(dim_o, dim_o, ZERO);
    for &base in &layout.measured_offsets {
        for (r, &a) in layout.output_offsets.iter().enumerate() {
            for (c, &b) in layout.output_offsets.iter().enumerate() {
                reduced[(r, c)] += sigma.matrix()[(base | a, base | b)];
            }
        }
    }
    Ok(psi.amplitudes().dotc(&(reduced * psi.amplitudes())).re)
}

/// Dense `Ω(θ) = Σ_s Γ† |s, ψ⟩⟨s, ψ| Γ`.
pub fn build_omega_theta(state: &ResourceState, angles: &[f64], cap: usize) -> Result<DMatrix<C64>> {
    let psi = ideal_output(state, angles, cap)?;
    let table = angle_table(state, angles)?;
    let layout = Layout::new(state);
    let dim = 1usize << state.n();
    let mut omega = DMatrix::from_element(dim, dim, ZERO);
    for &base in &layout.measured_offsets {
        let mut u = vec![ZERO; dim];
        for (a, &off) in layout.output_offsets.iter().enumerate() {
            u[base | off] = psi.amplitudes()[a];
        }
        gamma_adjoint_vec(state, &table, &mut u);
        let u = DVector::from_vec(u);
        omega += &u * u.adjoint();
    }
    Ok(omega)
}

struct Adaptive<'a> {
    state: &'a ResourceState,
    table: Vec<f64>,
    psi: DVector<C64>,
}

impl Adaptive<'_> {
    fn run(&self, k: usize, rho: DMatrix<C64>, labels: Vec<usize>, flips: Vec<bool>) -> f64 {
        let order = self.state.order();
        if k == order.len() {
            return self.psi.dotc(&(&rho * &self.psi)).re;
        }
        let q = order[k];
        let nloc = labels.len();
        let pos = labels.iter().position(|&l| l == q).expect("qubit still present");
        let theta = if flips[q] { -self.table[q] } else { self.table[q] };
        let mut rho = rho;
        let u = rotation(theta);
        conjugate(&mut rho, |col| apply_gate(col, nloc, pos, &u));
        let mut rest = labels.clone();
        rest.remove(pos);
        let mut total = 0.0;
        for s in [false, true] {
            let mut branch = project_out(&rho, nloc, pos, s);
            if branch.trace().re < BRANCH_TOL {
                continue;
            }
            let mut next_flips = flips.clone();
            if s {
                let r = self.state.r_op(q);
                let measured = self.state.measured();
                let mut local = PauliWord::identity(rest.len());
                for (j, &l) in rest.iter().enumerate() {
                    let letter = r.letter(l);
                    if measured.contains(l) {
                        if letter == Letter::X {
                            next_flips[l] ^= true;
                        }
                    } else {
                        local.set_letter(j, letter);
                    }
                }
                conjugate(&mut branch, |col| apply_pauli(col, &local, None));
            }
            total += self.run(k + 1, branch, rest.clone(), next_flips);
        }
        total
    }
}

/// Average fidelity over measurement records of the adaptively corrected
/// output with the ideal output, for fixed angles. Checked against
/// `tr ρ Ω(θ)`.
pub fn mbqc_fidelity_at(state: &ResourceState, rho: &DensityState, angles: &[f64], cap: usize) -> Result<f64> {
    check_dense(state.n(), cap)?;
    check_size(state, rho.n())?;
    let psi = ideal_output(state, angles, cap)?;
    let adaptive = Adaptive {
        state,
        table: angle_table(state, angles)?,
        psi: psi.into_amplitudes(),
    };
    let value = adaptive.run(
        0,
        rho.matrix().clone(),
        (0..state.n()).collect(),
        vec![false; state.n()],
    );
    let reference = omega_theta_expectation(state, rho, angles, cap)?;
    if (value - reference).abs() > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "adaptive fidelity {value} differs from tr ρΩ(θ) = {reference}"
        )));
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum AngleMode {
    Explicit(Vec<f64>),
    McUniform(usize),
    McClifford(usize),
    ExhaustiveClifford,
}

/// How to average over measurement angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSpec {
    pub mode: AngleMode,
    pub seed: u64,
}

impl AngleSpec {
    pub fn new(mode: AngleMode, seed: u64) -> Result<Self> {
        if let AngleMode::Explicit(a) = &mode {
            if let Some(x) = a.iter().find(|x| !(0.0..2.0 * PI).contains(*x)) {
                return Err(Error::invalid(format!("angle {x} outside [0, 2π)")));
            }
        }
        if let AngleMode::McUniform(0) | AngleMode::McClifford(0) = mode {
            return Err(Error::invalid("Monte Carlo sample count must be positive"));
        }
        Ok(Self { mode, seed })
    }

    /// `mc:N`, `clifford_mc:N`, `clifford_exact` or `explicit:a,b,...`.
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        let text = text.trim();
        let bad = |reason: &str| Error::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let count = |arg: &str| arg.trim().parse::<usize>().map_err(|e| bad(&e.to_string()));
        let mode = match text.split_once(':') {
            None if text == "clifford_exact" => AngleMode::ExhaustiveClifford,
            Some(("mc", arg)) => AngleMode::McUniform(count(arg)?),
            Some(("clifford_mc", arg)) => AngleMode::McClifford(count(arg)?),
            Some(("explicit", arg)) => AngleMode::Explicit(if arg.trim().is_empty() {
                Vec::new()
            } else {
                arg.split(',')
                    .map(|a| a.trim().parse::<f64>().map_err(|e| bad(&e.to_string())))
                    .collect::<Result<_>>()?
            }),
            _ => return Err(bad("expected mc:N, clifford_mc:N, clifford_exact or explicit:angles")),
        };
        Self::new(mode, seed)
    }
}

impl fmt::Display for AngleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mode {
            AngleMode::Explicit(a) => {
                let parts: Vec<String> = a.iter().map(f64::to_string).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
            AngleMode::McUniform(n) => write!(f, "mc:{n}"),
            AngleMode::McClifford(n) => write!(f, "clifford_mc:{n}"),
            AngleMode::ExhaustiveClifford => write!(f, "clifford_exact"),
        }
    }
}

impl FromStr for AngleSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, crate::DEFAULT_SEED)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageFidelity {
    pub mean: f64,
    pub std_error: f64,
    pub evaluations: usize,
}

fn clifford_tuple(index: usize, m: usize) -> Vec<f64> {
    (0..m).map(|j| CLIFFORD_ANGLES[(index >> (2 * j)) & 3]).collect()
}

/// Fidelity averaged over measurement angles as prescribed by `spec`.
pub fn average_mbqc_fidelity(
    state: &ResourceState,
    rho: &DensityState,
    spec: &AngleSpec,
    cap: usize,
) -> Result<AverageFidelity> {
    check_dense(state.n(), cap)?;
    let m = state.measured().len();
    let eval = |angles: Vec<f64>| mbqc_fidelity_at(state, rho, &angles, cap);
    let values: Vec<f64> = match &spec.mode {
        AngleMode::Explicit(a) => vec![eval(a.clone())?],
        AngleMode::McUniform(count) | AngleMode::McClifford(count) => {
            let uniform = matches!(spec.mode, AngleMode::McUniform(_));
            (0..*count as u64)
                .into_par_iter()
                .map(|k| {
                    let mut rng = RngStream::new(spec.seed, k).rng();
                    let angles = (0..m)
                        .map(|_| {
                            if uniform {
                                rng.random_range(0.0..2.0 * PI)
                            } else {
                                CLIFFORD_ANGLES[rng.random_range(0..4)]
                            }
                        })
                        .collect();
                    eval(angles)
                })
                .collect::<Result<_>>()?
        }
        AngleMode::ExhaustiveClifford => {
            if m > EXHAUSTIVE_MAX_MEASURED {
                return Err(Error::cap("exhaustive Clifford angles", m, EXHAUSTIVE_MAX_MEASURED));
            }
            (0..1usize << (2 * m))
                .into_par_iter()
                .map(|k| eval(clifford_tuple(k, m)))
                .collect::<Result<_>>()?
        }
    };
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let std_error = match spec.mode {
        AngleMode::McUniform(_) | AngleMode::McClifford(_) if count > 1 => {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        }
        _ => 0.0,
    };
    Ok(AverageFidelity {
        mean,
        std_error,
        evaluations: count,
    })
}

/// Mean of `Ω(θ)` over all Clifford angle tuples.
pub fn clifford_average_omega(state: &ResourceState, cap: usize) -> Result<DMatrix<C64>> {
    let m = state.measured().len();
    if m > EXHAUSTIVE_MAX_MEASURED {
        return Err(Error::cap("exhaustive Clifford angles", m, EXHAUSTIVE_MAX_MEASURED));
    }
    let total = 1usize << (2 * m);
    let dim = 1usize << state.n();
    let mut acc = DMatrix::from_element(dim, dim, ZERO);
    for k in 0..total {
        acc += build_omega_theta(state, &clifford_tuple(k, m), cap)?;
    }
    Ok(acc / C64::new(total as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::dense::project_out_vec;
    use crate::omega::build_omega;
    use crate::resource::{cluster_1d, cluster_2d};
    use crate::sim::states::expectation;
    use crate::sim::NoiseModel;

    #[test]
    fn gamma_leaves_measured_qubits_unbiased() {
        let s = cluster_1d(4).unwrap();
        let v = apply_gamma(&s, &[0.3, 1.1, 2.0], &ideal_vector(&s, 12).unwrap(), 12).unwrap();
        for q in s.measured().iter() {
            let p1 = project_out_vec(v.amplitudes().as_slice(), 4, q, true)
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>();
            assert!((p1 - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_output_at_zero_angle() {
        let s = cluster_1d(2).unwrap();
        let psi = ideal_output(&s, &[0.0], 12).unwrap();
        assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_is_unitary() {
        let s = cluster_1d(4).unwrap();
        let table = angle_table(&s, &[0.4, 2.2, 5.0]).unwrap();
        let v: Vec<C64> = (0..16).map(|k| C64::new((k as f64).sin(), (k as f64).cos() * 0.5)).collect();
        let mut w = v.clone();
        gamma_vec(&s, &table, &mut w);
        gamma_adjoint_vec(&s, &table, &mut w);
        let diff: f64 = v.iter().zip(&w).map(|(a, b)| (a - b).norm()).sum();
        assert!(diff < 1e-12);
    }

    #[test]
    fn ideal_state_has_unit_fidelity() {
        for s in [cluster_1d(3), cluster_2d(2, 2)] {
            let s = s.unwrap();
            let rho = ideal_vector(&s, 12).unwrap().to_density();
            let m = s.measured().len();
            let angles: Vec<f64> = (0..m).map(|j| 0.3 + j as f64).collect();
            assert!((mbqc_fidelity_at(&s, &rho, &angles, 12).unwrap() - 1.0).abs() < 1e-10);
            let mixed = DensityState::maximally_mixed(s.n());
            let want = 0.5f64.powi(s.outputs().len() as i32);
            assert!((mbqc_fidelity_at(&s, &mixed, &angles, 12).unwrap() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn clifford_average_of_omega_theta_is_omega() {
        for s in [cluster_1d(2), cluster_1d(3), cluster_2d(2, 2)] {
            let s = s.unwrap();
            let avg = clifford_average_omega(&s, 12).unwrap();
            let omega = build_omega(&s, 24).unwrap().to_dense(12).unwrap();
            assert!((avg - omega).norm() < 1e-10);
        }
    }

    #[test]
    fn continuous_quadrature_matches_omega() {
        let s = cluster_1d(3).unwrap();
        let grid = 8;
        let mut acc = DMatrix::from_element(8, 8, ZERO);
        for a in 0..grid {
            for b in 0..grid {
                let angles = [2.0 * PI * a as f64 / grid as f64, 2.0 * PI * b as f64 / grid as f64];
                acc += build_omega_theta(&s, &angles, 12).unwrap();
            }
        }
        acc /= C64::new((grid * grid) as f64, 0.0);
        let omega = build_omega(&s, 24).unwrap().to_dense(12).unwrap();
        assert!((acc - omega).norm() < 1e-10);
    }

    #[test]
    fn exhaustive_average_matches_expectation() {
        let s = cluster_1d(3).unwrap();
        let ideal = ideal_vector(&s, 12).unwrap().to_density();
        let rho = NoiseModel::GlobalMix { p: 0.1 }.apply(&s, &ideal, 12).unwrap();
        let want = expectation(&rho, &build_omega(&s, 24).unwrap()).unwrap();
        let spec = AngleSpec::parse("clifford_exact", 1).unwrap();
        let got = average_mbqc_fidelity(&s, &rho, &spec, 12).unwrap();
        assert!((got.mean - want).abs() < 1e-10);
        let mc = average_mbqc_fidelity(&s, &rho, &AngleSpec::parse("mc:400", 5).unwrap(), 12).unwrap();
        assert!((mc.mean - want).abs() < 3.0 * mc.std_error + 1e-12);
    }

    #[test]
    fn angle_spec_parsing() {
        assert_eq!(AngleSpec::parse("mc:10", 1).unwrap().mode, AngleMode::McUniform(10));
        assert_eq!(AngleSpec::parse("clifford_mc:3", 1).unwrap().mode, AngleMode::McClifford(3));
        assert_eq!(
            AngleSpec::parse("explicit:0.1,0.3", 1).unwrap().mode,
            AngleMode::Explicit(vec![0.1, 0.3])
        );
        assert!(AngleSpec::parse("explicit:7.0", 1).is_err());
        assert!(AngleSpec::parse("mc:0", 1).is_err());
        assert!(AngleSpec::parse("grid:3", 1).is_err());
        assert!(mbqc_fidelity_at(
            &cluster_1d(3).unwrap(),
            &DensityState::maximally_mixed(3),
            &[0.1],
            12
        )
        .is_err());
    }
}
