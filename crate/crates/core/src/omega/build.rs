use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sum::{Dyadic, PauliSum};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliWord, QubitSet};
use crate::resource::{ResourceState, StabilizerGroup};

/// Measurement-basis restriction for one measured qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasBasis {
    X,
    Y,
    XY,
}

impl MeasBasis {
    /// Image of a single-qubit Pauli under the basis-restricted twirl, as a
    /// multiplicative factor (the letter itself is unchanged or killed).
    pub fn factor(self, letter: Letter) -> Dyadic {
        match (self, letter) {
            (_, Letter::I) => Dyadic::ONE,
            (MeasBasis::X, Letter::X) | (MeasBasis::Y, Letter::Y) => Dyadic::ONE,
            (MeasBasis::XY, Letter::X | Letter::Y) => Dyadic::half_pow(1),
            _ => Dyadic::ZERO,
        }
    }
}

impl FromStr for MeasBasis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X" => Ok(MeasBasis::X),
            "Y" => Ok(MeasBasis::Y),
            "XY" => Ok(MeasBasis::XY),
            other => Err(Error::Parse {
                text: other.to_string(),
                reason: "expected X, Y or XY".into(),
            }),
        }
    }
}

impl fmt::Display for MeasBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasBasis::X => "X",
            MeasBasis::Y => "Y",
            MeasBasis::XY => "XY",
        })
    }
}

/// A basis choice for every measured qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisMap {
    mu: BTreeMap<usize, MeasBasis>,
}

impl BasisMap {
    pub fn new(state: &ResourceState, mu: BTreeMap<usize, MeasBasis>) -> Result<Self> {
        let measured = state.measured();
        if let Some(&q) = mu.keys().find(|&&q| q >= state.n() || !measured.contains(q)) {
            return Err(Error::invalid(format!("basis given for non-measured qubit {q}")));
        }
        if let Some(q) = measured.iter().find(|q| !mu.contains_key(q)) {
            return Err(Error::invalid(format!("no basis given for measured qubit {q}")));
        }
        Ok(Self { mu })
    }

    pub fn uniform(state: &ResourceState, basis: MeasBasis) -> Self {
        Self {
            mu: state.measured().iter().map(|q| (q, basis)).collect(),
        }
    }

    /// Comma-separated bases for the measured qubits in ascending order.
    pub fn parse(state: &ResourceState, text: &str) -> Result<Self> {
        let bases = text
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<MeasBasis>>>()?;
        let measured: Vec<usize> = state.measured().iter().collect();
        if bases.len() != measured.len() {
            return Err(Error::invalid(format!(
                "{} bases given for {} measured qubits",
                bases.len(),
                measured.len()
            )));
        }
        Self::new(state, measured.into_iter().zip(bases).collect())
    }

    pub fn get(&self, q: usize) -> Option<MeasBasis> {
        self.mu.get(&q).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, MeasBasis)> + '_ {
        self.mu.iter().map(|(&q, &b)| (q, b))
    }
}

/// Action of the XY-plane twirl on a single-qubit Pauli.
pub fn exy_action(letter: Letter) -> (Letter, Dyadic) {
    (letter, MeasBasis::XY.factor(letter))
}

fn measured_weight(measured: &QubitSet, g: &PauliWord) -> Option<u32> {
    let mut w = 0;
    for q in measured.iter() {
        match g.letter(q) {
            Letter::I => {}
            Letter::X | Letter::Y => w += 1,
            Letter::Z => return None,
        }
    }
    Some(w)
}

/// Ω as the weighted sum over the group elements that act as I, X or Y on
/// every measured qubit.
pub fn build_omega(state: &ResourceState, cap: usize) -> Result<PauliSum> {
    let measured = state.measured();
    let o = state.outputs().len() as u32;
    let mut sum = PauliSum::new(state.n());
    for (_, g) in state.group().enumerate_indexed(cap)? {
        if let Some(w) = measured_weight(&measured, &g) {
            sum.add_term(&g, Dyadic::half_pow(o + w))?;
        }
    }
    Ok(sum)
}

/// Ω with each measured qubit restricted to the basis given by `basis`.
pub fn build_omega_fixed(state: &ResourceState, basis: &BasisMap, cap: usize) -> Result<PauliSum> {
    let o = state.outputs().len() as u32;
    let mut sum = PauliSum::new(state.n());
    for (_, g) in state.group().enumerate_indexed(cap)? {
        let mut c = Dyadic::half_pow(o);
        for (q, b) in basis.iter() {
            c = c * b.factor(g.letter(q));
            if c.is_zero() {
                break;
            }
        }
        if !c.is_zero() {
            sum.add_term(&g, c)?;
        }
    }
    Ok(sum)
}

/// Expands `seed` through the forks of every measured qubit in temporal
/// order. Each leaf carries its depth: the number of forks on its path.
pub fn lambda_expand(state: &ResourceState, seed: &PauliWord) -> Vec<(PauliWord, u32)> {
    let mut layer = vec![(seed.clone(), 0u32)];
    for &q in state.order() {
        let zr = state.r_stabilizer(q);
        let mut next = Vec::with_capacity(layer.len() * 2);
        for (p, d) in layer {
            if p.x_bit(q) {
                let mut forked = p.clone();
                forked.mul_assign(&zr);
                next.push((p, d + 1));
                next.push((forked, d + 1));
            } else {
                next.push((p, d));
            }
        }
        layer = next;
    }
    layer
}

/// Ω from the T-stabilizer products pushed through the fork tree.
pub fn build_omega_recursive(state: &ResourceState, cap: usize) -> Result<PauliSum> {
    if state.n() > cap {
        return Err(Error::cap("recursive omega", state.n(), cap));
    }
    let ts = state.derive_t_stabilizers()?;
    let o = ts.len() as u32;
    let t_group = StabilizerGroup::new(state.n(), ts)?;
    let mut sum = PauliSum::new(state.n());
    for (_, t) in t_group.enumerate_indexed(cap)? {
        for (leaf, depth) in lambda_expand(state, &t) {
            sum.add_term(&leaf, Dyadic::half_pow(o + depth))?;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resource::{cluster_1d, cluster_2d, Flow};

    fn sum(n: usize, terms: &[(&str, i64, u32)]) -> PauliSum {
        PauliSum::from_terms(n, terms.iter().map(|&(w, a, e)| (w, Dyadic::new(a, e)))).unwrap()
    }

    #[test]
    fn one_dimensional_examples() {
        let s2 = build_omega(&cluster_1d(2).unwrap(), 24).unwrap();
        assert_eq!(s2, sum(2, &[("II", 1, 1), ("XZ", 1, 2), ("YY", 1, 2)]));
        let s3 = build_omega(&cluster_1d(3).unwrap(), 24).unwrap();
        assert_eq!(
            s3,
            sum(3, &[("III", 1, 1), ("XIX", 1, 2), ("-YXY", 1, 3), ("YYZ", 1, 3)])
        );
    }

    #[test]
    fn no_measured_qubits_gives_projector() {
        let group = StabilizerGroup::check(vec!["X".parse().unwrap()]).unwrap();
        let state = ResourceState::new(
            group,
            QubitSet::full(1),
            Flow {
                order: vec![],
                r_ops: BTreeMap::new(),
            },
        )
        .unwrap();
        let expected = sum(1, &[("I", 1, 1), ("X", 1, 1)]);
        assert_eq!(build_omega(&state, 24).unwrap(), expected);
        assert_eq!(build_omega_recursive(&state, 24).unwrap(), expected);
    }

    #[test]
    fn fork_tree_from_t_stabilizer() {
        let state = cluster_1d(4).unwrap();
        let t = state.derive_t_stabilizers().unwrap();
        assert_eq!(t, vec!["XIXZ".parse().unwrap()]);
        let mut text: Vec<(String, u32)> = lambda_expand(&state, &t[0])
            .iter()
            .map(|(w, d)| (w.to_string(), *d))
            .collect();
        text.sort();
        assert_eq!(
            text,
            vec![
                ("+XIXZ".to_string(), 2),
                ("+XIYY".to_string(), 2),
                ("+YXXY".to_string(), 3),
                ("+YYIX".to_string(), 2),
                ("-YXYZ".to_string(), 3),
            ]
        );
        let omega = build_omega_recursive(&state, 24).unwrap();
        assert_eq!(omega.len(), 6);
        assert_eq!(omega, build_omega(&state, 24).unwrap());
    }

    #[test]
    fn recursive_matches_enumeration() {
        for n in 2..=10 {
            let s = cluster_1d(n).unwrap();
            assert_eq!(build_omega(&s, 24).unwrap(), build_omega_recursive(&s, 24).unwrap());
        }
        for (r, c) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 5)] {
            let s = cluster_2d(r, c).unwrap();
            let a = build_omega(&s, 24).unwrap();
            assert_eq!(a, build_omega_recursive(&s, 24).unwrap());
            assert_eq!(a.abs_coefficient_sum(), Dyadic::ONE);
        }
    }

    #[test]
    fn fixed_basis_examples() {
        let s3 = cluster_1d(3).unwrap();
        let fixed = build_omega_fixed(&s3, &BasisMap::uniform(&s3, MeasBasis::X), 24).unwrap();
        assert_eq!(fixed, sum(3, &[("III", 1, 1), ("XIX", 1, 1)]));

        let s9 = cluster_1d(9).unwrap();
        let mu = BasisMap::parse(&s9, "X,X,X,X,XY,X,X,X").unwrap();
        let fixed = build_omega_fixed(&s9, &mu, 24).unwrap();
        assert_eq!(
            fixed,
            sum(
                9,
                &[("IIIIIIIII", 1, 1), ("XIXIXIXIX", 1, 2), ("-XIXIYXXXY", 1, 2)]
            )
        );

        for n in 2..=6 {
            let s = cluster_1d(n).unwrap();
            let all_xy = BasisMap::uniform(&s, MeasBasis::XY);
            assert_eq!(build_omega_fixed(&s, &all_xy, 24).unwrap(), build_omega(&s, 24).unwrap());
        }
    }

    #[test]
    fn basis_map_validation() {
        let s = cluster_1d(3).unwrap();
        assert!(BasisMap::parse(&s, "X").is_err());
        assert!(BasisMap::parse(&s, "X,Q").is_err());
        let mut mu = BTreeMap::new();
        mu.insert(2, MeasBasis::X);
        assert!(BasisMap::new(&s, mu).is_err());
    }

    #[test]
    fn xy_twirl_table() {
        assert_eq!(exy_action(Letter::I), (Letter::I, Dyadic::ONE));
        assert_eq!(exy_action(Letter::Z), (Letter::Z, Dyadic::ZERO));
        assert_eq!(exy_action(Letter::X), (Letter::X, Dyadic::half_pow(1)));
        assert_eq!(exy_action(Letter::Y), (Letter::Y, Dyadic::half_pow(1)));
    }

    #[test]
    fn cap_is_enforced() {
        let s = cluster_1d(6).unwrap();
        assert!(matches!(build_omega(&s, 5), Err(Error::CapExceeded { .. })));
    }
}
