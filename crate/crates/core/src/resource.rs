//! Stabilizer resource states with flow.
//!
//! A [`ResourceState`] bundles a complete stabilizer group, the set of output
//! qubits and a flow on the measured qubits: a total temporal order plus one
//! correction operator `R_i` per measured qubit such that `Z_i R_i` is a
//! stabilizer, `R_i` acts as `I`/`X` on measured qubits, and `R_i` is
//! supported strictly after `i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, Decomposer};
use crate::pauli::{limb_count, Letter, PauliWord, QubitSet};

/// Default cap on the number of generators for group enumeration.
pub const DEFAULT_ENUM_CAP: usize = 24;

pub(crate) fn symplectic(word: &PauliWord) -> Vec<u64> {
    let mut v = word.x_limbs().to_vec();
    v.extend_from_slice(word.z_limbs());
    v
}

pub(crate) fn symplectic_width(n: usize) -> usize {
    2 * 64 * limb_count(n)
}

/// Abelian group generated by independent, commuting, Hermitian words.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliWord>,
    basis: Decomposer,
}

impl PartialEq for StabilizerGroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.generators == other.generators
    }
}

impl StabilizerGroup {
    /// Validates `generators` on `n` qubits.
    pub fn new(n: usize, generators: Vec<PauliWord>) -> Result<Self> {
        for g in &generators {
            if g.n() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: g.n(),
                });
            }
        }
        for (i, g) in generators.iter().enumerate() {
            if !g.is_hermitian() {
                return Err(Error::NonHermitian(i));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutes_unchecked(&generators[j]) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        let mut basis = Decomposer::new(symplectic_width(n), generators.len().max(1));
        for (i, g) in generators.iter().enumerate() {
            if !basis.insert(&symplectic(g), i) {
                return Err(Error::Dependent(i));
            }
        }
        Ok(Self {
            n,
            generators,
            basis,
        })
    }

    /// Validates a non-empty generator list, taking `n` from the first word.
    pub fn check(generators: Vec<PauliWord>) -> Result<Self> {
        let n = generators
            .first()
            .map(PauliWord::n)
            .ok_or_else(|| Error::invalid("empty generator list; use StabilizerGroup::new"))?;
        Self::new(n, generators)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliWord] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// A complete group fixes a unique state.
    pub fn is_complete(&self) -> bool {
        self.generators.len() == self.n
    }

    /// Product of the generators selected by `subset` (bit `k` = generator `k`).
    pub fn element(&self, subset: &[u64]) -> PauliWord {
        let mut out = PauliWord::identity(self.n);
        for (k, g) in self.generators.iter().enumerate() {
            if gf2::get(subset, k) {
                out.mul_assign(g);
            }
        }
        out
    }

    /// Generator subset whose product equals `word` up to sign, if any.
    pub fn decompose(&self, word: &PauliWord) -> Option<Vec<u64>> {
        if word.n() != self.n {
            return None;
        }
        if self.generators.is_empty() {
            return word.is_identity_letters().then(|| vec![0]);
        }
        self.basis.decompose(&symplectic(word))
    }

    /// Exact membership, sign included.
    pub fn contains(&self, word: &PauliWord) -> bool {
        self.decompose(word)
            .map(|s| self.element(&s) == *word)
            .unwrap_or(false)
    }

    /// All `2^len` elements with their generator subsets, in Gray-code order.
    pub fn enumerate_indexed(&self, cap: usize) -> Result<GroupElements<'_>> {
        if self.generators.len() > cap.min(63) {
            return Err(Error::cap("group enumeration", self.generators.len(), cap));
        }
        Ok(GroupElements {
            generators: &self.generators,
            current: PauliWord::identity(self.n),
            mask: 0,
            next: 0,
            total: 1u64 << self.generators.len(),
        })
    }

    /// All `2^len` signed elements, each exactly once.
    pub fn enumerate(&self, cap: usize) -> Result<impl Iterator<Item = PauliWord> + '_> {
        Ok(self.enumerate_indexed(cap)?.map(|(_, w)| w))
    }
}

/// Gray-code walk over a stabilizer group.
pub struct GroupElements<'a> {
    generators: &'a [PauliWord],
    current: PauliWord,
    mask: u64,
    next: u64,
    total: u64,
}

impl Iterator for GroupElements<'_> {
    type Item = (u64, PauliWord);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.total {
            return None;
        }
        if self.next > 0 {
            let bit = self.next.trailing_zeros() as usize;
            self.current.mul_assign(&self.generators[bit]);
            self.mask ^= 1 << bit;
        }
        self.next += 1;
        Some((self.mask, self.current.clone()))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

/// Temporal order on the measured qubits and their correction operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    pub order: Vec<usize>,
    pub r_ops: BTreeMap<usize, PauliWord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowCondition {
    /// `Z_i R_i` is an element of the group with sign `+1`.
    Stabilizer,
    /// `R_i` acts as `I` or `X` on every measured qubit.
    MeasuredLetters,
    /// Every qubit in the support of `R_i` comes after `i`.
    TemporalSupport,
    /// Some generator acts as `X` or `Y` on the qubit.
    Entangled,
}

impl FlowCondition {
    pub fn number(self) -> u8 {
        match self {
            FlowCondition::Stabilizer => 1,
            FlowCondition::MeasuredLetters => 2,
            FlowCondition::TemporalSupport => 3,
            FlowCondition::Entangled => 4,
        }
    }
}

impl fmt::Display for FlowCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FlowCondition::Stabilizer => "Z_i R_i is a stabilizer",
            FlowCondition::MeasuredLetters => "R_i acts as X or I on measured qubits",
            FlowCondition::TemporalSupport => "R_i is supported after i",
            FlowCondition::Entangled => "qubit is not disentangled",
        };
        write!(f, "condition {} ({s})", self.number())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowViolation {
    pub qubit: usize,
    pub condition: FlowCondition,
    pub detail: String,
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qubit {}: {} violated: {}", self.qubit, self.condition, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FlowVerdict {
    pub violations: Vec<FlowViolation>,
}

impl FlowVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&FlowViolation> {
        self.violations.first()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::Flow(v)),
        }
    }
}

/// Stabilizer state, output set and flow.
#[derive(Clone, Debug)]
pub struct ResourceState {
    group: StabilizerGroup,
    outputs: QubitSet,
    flow: Flow,
    /// Position of each qubit in the temporal order; `None` for outputs.
    position: Vec<Option<usize>>,
}

impl ResourceState {
    /// Structural assembly without checking the flow conditions.
    pub fn assemble(group: StabilizerGroup, outputs: QubitSet, flow: Flow) -> Result<Self> {
        let n = group.n();
        if !group.is_complete() {
            return Err(Error::InvalidState(format!(
                "{} generators for {n} qubits; a resource state needs a complete group",
                group.len()
            )));
        }
        if outputs.n() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: outputs.n(),
            });
        }
        let mut position = vec![None; n];
        for (p, &q) in flow.order.iter().enumerate() {
            if q >= n || outputs.contains(q) || position[q].is_some() {
                return Err(Error::InvalidState(format!(
                    "order entry {q} is out of range, an output, or repeated"
                )));
            }
            position[q] = Some(p);
        }
        let measured = outputs.complement();
        for q in measured.iter() {
            if position[q].is_none() {
                return Err(Error::InvalidState(format!("measured qubit {q} missing from the order")));
            }
            let r = flow
                .r_ops
                .get(&q)
                .ok_or_else(|| Error::InvalidState(format!("no correction operator for qubit {q}")))?;
            if r.n() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: r.n(),
                });
            }
            if !r.is_hermitian() {
                return Err(Error::InvalidState(format!("correction operator for qubit {q} is not Hermitian")));
            }
        }
        if let Some(q) = flow.r_ops.keys().find(|&&q| !measured.contains(q)) {
            return Err(Error::InvalidState(format!("correction operator given for non-measured qubit {q}")));
        }
        Ok(Self {
            group,
            outputs,
            flow,
            position,
        })
    }

    /// Assembles and verifies the flow.
    pub fn new(group: StabilizerGroup, outputs: QubitSet, flow: Flow) -> Result<Self> {
        let s = Self::assemble(group, outputs, flow)?;
        s.verify_flow().into_result()?;
        Ok(s)
    }

    /// Assembles with correction operators derived for `order`.
    pub fn with_order(group: StabilizerGroup, outputs: QubitSet, order: Vec<usize>) -> Result<Self> {
        let r_ops = derive_r_operators(&group, &outputs, &order)?;
        Self::new(group, outputs, Flow { order, r_ops })
    }

    pub fn n(&self) -> usize {
        self.group.n()
    }

    pub fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    pub fn outputs(&self) -> &QubitSet {
        &self.outputs
    }

    pub fn measured(&self) -> QubitSet {
        self.outputs.complement()
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }

    /// Measured qubits in temporal order.
    pub fn order(&self) -> &[usize] {
        &self.flow.order
    }

    pub fn r_op(&self, q: usize) -> &PauliWord {
        &self.flow.r_ops[&q]
    }

    /// `Z_q R_q` for measured qubit `q`.
    pub fn r_stabilizer(&self, q: usize) -> PauliWord {
        let mut z = PauliWord::single(self.n(), q, Letter::Z);
        z.mul_assign(self.r_op(q));
        z
    }

    /// R-stabilizers in temporal order.
    pub fn r_stabilizers(&self) -> Vec<PauliWord> {
        self.flow.order.iter().map(|&q| self.r_stabilizer(q)).collect()
    }

    pub fn position(&self, q: usize) -> Option<usize> {
        self.position[q]
    }

    /// Checks all flow conditions; violations are listed in temporal order.
    pub fn verify_flow(&self) -> FlowVerdict {
        let n = self.n();
        let mut violations = Vec::new();
        for &i in &self.flow.order {
            let r = self.r_op(i);
            let pi = self.position[i].expect("measured qubit has a position");
            if let Some(j) = (0..n).find(|&j| {
                self.position[j].is_some() && matches!(r.letter(j), Letter::Y | Letter::Z)
            }) {
                violations.push(FlowViolation {
                    qubit: i,
                    condition: FlowCondition::MeasuredLetters,
                    detail: format!("R_{i} = {r} acts as {} on measured qubit {j}", r.letter(j)),
                });
            }
            if let Some(j) = r
                .support()
                .iter()
                .find(|&j| matches!(self.position[j], Some(pj) if pj <= pi))
            {
                violations.push(FlowViolation {
                    qubit: i,
                    condition: FlowCondition::TemporalSupport,
                    detail: format!("R_{i} = {r} acts on qubit {j}, which is not later than {i}"),
                });
            }
            let zr = self.r_stabilizer(i);
            if !self.group.contains(&zr) {
                let detail = if self.group.contains(&zr.clone().negated()) {
                    format!("{zr} is in the group only with the opposite sign")
                } else {
                    format!("{zr} is not a stabilizer")
                };
                violations.push(FlowViolation {
                    qubit: i,
                    condition: FlowCondition::Stabilizer,
                    detail,
                });
            }
        }
        for q in 0..n {
            if !self.group.generators().iter().any(|g| g.x_bit(q)) {
                violations.push(FlowViolation {
                    qubit: q,
                    condition: FlowCondition::Entangled,
                    detail: format!("every stabilizer commutes with Z on qubit {q}"),
                });
            }
        }
        FlowVerdict { violations }
    }

    /// The `|O|` T-stabilizers: independent group elements acting as `I`/`X`
    /// on every measured qubit, independent of the R-stabilizers.
    pub fn derive_t_stabilizers(&self) -> Result<Vec<PauliWord>> {
        let n = self.n();
        let r_stabs = self.r_stabilizers();
        let mut basis = Decomposer::new(symplectic_width(n), n + r_stabs.len());
        for (k, r) in r_stabs.iter().enumerate() {
            if !basis.insert(&symplectic(r), k) {
                return Err(Error::CrossCheck(format!(
                    "R-stabilizer for qubit {} depends on earlier ones",
                    self.flow.order[k]
                )));
            }
        }
        let mut ts = Vec::new();
        for (k, g) in self.group.generators().iter().enumerate() {
            if basis.insert(&symplectic(g), r_stabs.len() + k) {
                ts.push(g.clone());
            }
        }
        if ts.len() != self.outputs.len() {
            return Err(Error::CrossCheck(format!(
                "found {} complementary generators for {} outputs",
                ts.len(),
                self.outputs.len()
            )));
        }
        for t in &mut ts {
            for (k, &q) in self.flow.order.iter().enumerate() {
                if t.z_bit(q) {
                    t.mul_assign(&r_stabs[k]);
                }
            }
            if let Some(q) = self.flow.order.iter().find(|&&q| t.z_bit(q)) {
                return Err(Error::CrossCheck(format!("T-stabilizer {t} still acts with Z on {q}")));
            }
        }
        Ok(ts)
    }

    pub fn to_file(&self) -> ResourceFile {
        ResourceFile {
            n: self.n(),
            generators: self.group.generators().to_vec(),
            outputs: self.outputs.iter().collect(),
            order: self.flow.order.clone(),
            r_ops: self.flow.r_ops.clone(),
            sign_flips: None,
        }
    }

    /// Loads and verifies a state. Sign flips are rejected here; see
    /// [`SignedGroup::from_file`].
    pub fn from_file(file: &ResourceFile) -> Result<Self> {
        if file.sign_flips.as_ref().is_some_and(|f| !f.is_empty()) {
            return Err(Error::InvalidState(
                "sign flips describe a signed group, not an ideal resource state".into(),
            ));
        }
        Self::new(file.group()?, file.outputs()?, file.flow())
    }

    /// Loads without verifying the flow, so the verdict can be inspected.
    pub fn assemble_from_file(file: &ResourceFile) -> Result<Self> {
        Self::assemble(file.group()?, file.outputs()?, file.flow())
    }
}

/// Solves, for each measured qubit `i`, for a group element acting as `Z` on
/// `i`, as `I` on measured qubits before `i`, as `I`/`X` on measured qubits
/// after `i` and arbitrarily on outputs. `R_i` is that element with `Z_i`
/// removed.
pub fn derive_r_operators(
    group: &StabilizerGroup,
    outputs: &QubitSet,
    order: &[usize],
) -> Result<BTreeMap<usize, PauliWord>> {
    let n = group.n();
    let gens = group.generators();
    let mut position = vec![None; n];
    for (p, &q) in order.iter().enumerate() {
        if q >= n || outputs.contains(q) || position[q].is_some() {
            return Err(Error::InvalidState(format!("bad order entry {q}")));
        }
        position[q] = Some(p);
    }
    if order.len() + outputs.len() != n {
        return Err(Error::InvalidState("order must list every measured qubit".into()));
    }

    let column = |f: &dyn Fn(&PauliWord) -> bool| {
        let mut row = vec![0u64; gf2::words_for(gens.len())];
        for (k, g) in gens.iter().enumerate() {
            if f(g) {
                gf2::set(&mut row, k);
            }
        }
        row
    };

    let mut r_ops = BTreeMap::new();
    for (pi, &i) in order.iter().enumerate() {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (q, &pq) in position.iter().enumerate().take(n) {
            let Some(pq) = pq else { continue };
            // z-component: 1 on i, 0 on every other measured qubit
            rows.push(column(&|g: &PauliWord| g.z_bit(q)));
            rhs.push(q == i);
            // x-component: 0 on i and on earlier measured qubits
            if pq <= pi {
                rows.push(column(&|g: &PauliWord| g.x_bit(q)));
                rhs.push(false);
            }
        }
        let sol = gf2::solve(&rows, &rhs, gens.len()).ok_or(Error::NoFlow { qubit: i })?;
        let g = group.element(&sol);
        let mut r = PauliWord::single(n, i, Letter::Z);
        r.mul_assign(&g);
        r_ops.insert(i, r);
    }
    Ok(r_ops)
}

/// A group whose listed generators carry flipped signs.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedGroup {
    pub base: StabilizerGroup,
    pub sign_flips: BTreeSet<usize>,
}

impl SignedGroup {
    pub fn new(base: StabilizerGroup, sign_flips: impl IntoIterator<Item = usize>) -> Result<Self> {
        let sign_flips: BTreeSet<usize> = sign_flips.into_iter().collect();
        if let Some(&k) = sign_flips.iter().find(|&&k| k >= base.len()) {
            return Err(Error::invalid(format!("sign flip index {k} out of range")));
        }
        Ok(Self { base, sign_flips })
    }

    /// Generators with the flips applied.
    pub fn generators(&self) -> Vec<PauliWord> {
        self.base
            .generators()
            .iter()
            .enumerate()
            .map(|(k, g)| {
                if self.sign_flips.contains(&k) {
                    g.clone().negated()
                } else {
                    g.clone()
                }
            })
            .collect()
    }

    /// The flipped group as an ordinary stabilizer group.
    pub fn to_group(&self) -> StabilizerGroup {
        StabilizerGroup::new(self.base.n(), self.generators()).expect("sign flips preserve validity")
    }

    pub fn from_file(file: &ResourceFile) -> Result<Self> {
        let base = file.group()?;
        Self::new(base, file.sign_flips.clone().unwrap_or_default())
    }
}

/// The excited state `S_k`: every R-stabilizer `+1`, the T-stabilizer
/// attached to output `k` flipped. T-stabilizers are attached to outputs in
/// ascending qubit order.
pub fn excited_state(state: &ResourceState, k: usize) -> Result<SignedGroup> {
    let idx = state
        .outputs()
        .iter()
        .position(|q| q == k)
        .ok_or_else(|| Error::invalid(format!("qubit {k} is not an output")))?;
    let mut gens = state.r_stabilizers();
    let m = gens.len();
    gens.extend(state.derive_t_stabilizers()?);
    let base = StabilizerGroup::new(state.n(), gens)?;
    SignedGroup::new(base, [m + idx])
}

/// On-disk resource-state schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceFile {
    pub n: usize,
    pub generators: Vec<PauliWord>,
    pub outputs: Vec<usize>,
    pub order: Vec<usize>,
    pub r_ops: BTreeMap<usize, PauliWord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_flips: Option<Vec<usize>>,
}

impl ResourceFile {
    fn group(&self) -> Result<StabilizerGroup> {
        StabilizerGroup::new(self.n, self.generators.clone())
    }

    fn outputs(&self) -> Result<QubitSet> {
        QubitSet::from_indices(self.n, self.outputs.iter().copied())
    }

    fn flow(&self) -> Flow {
        Flow {
            order: self.order.clone(),
            r_ops: self.r_ops.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("resource file serializes")
    }
}

/// Graph state `X_v ∏_{u~v} Z_u` with the given outputs, flow derived for `order`.
pub fn graph_state(
    n: usize,
    edges: &[(usize, usize)],
    outputs: &[usize],
    order: Vec<usize>,
) -> Result<ResourceState> {
    let mut gens: Vec<PauliWord> = (0..n).map(|v| PauliWord::single(n, v, Letter::X)).collect();
    for &(a, b) in edges {
        if a >= n || b >= n || a == b {
            return Err(Error::invalid(format!("bad edge ({a}, {b})")));
        }
        gens[a].mul_assign(&PauliWord::single(n, b, Letter::Z));
        gens[b].mul_assign(&PauliWord::single(n, a, Letter::Z));
    }
    let group = StabilizerGroup::new(n, gens)?;
    let outputs = QubitSet::from_indices(n, outputs.iter().copied())?;
    ResourceState::with_order(group, outputs, order)
}

/// Linear cluster on `n ≥ 2` qubits, output = last qubit.
pub fn cluster_1d(n: usize) -> Result<ResourceState> {
    if n < 2 {
        return Err(Error::invalid("a 1D cluster needs at least 2 qubits"));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    graph_state(n, &edges, &[n - 1], (0..n - 1).collect())
}

/// Open-boundary `rows × cols` cluster; qubit `(r, c)` is `r * cols + c`.
/// Outputs are the last column; measured qubits are ordered column by column,
/// top to bottom within a column.
pub fn cluster_2d(rows: usize, cols: usize) -> Result<ResourceState> {
    if rows < 2 || cols < 2 {
        return Err(Error::invalid("a 2D cluster needs at least 2 rows and 2 columns"));
    }
    let n = rows * cols;
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    let outputs: Vec<usize> = (0..rows).map(|r| idx(r, cols - 1)).collect();
    let order: Vec<usize> = (0..cols - 1)
        .flat_map(|c| (0..rows).map(move |r| idx(r, c)))
        .collect();
    graph_state(n, &edges, &outputs, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    fn words(list: &[&str]) -> Vec<PauliWord> {
        list.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn check_group_accepts_cluster() {
        let g = StabilizerGroup::check(words(&["+XZ", "+ZX"])).unwrap();
        assert_eq!(g.n(), 2);
        assert!(g.is_complete());
    }

    #[test]
    fn check_group_rejects_dependent_set() {
        // XX·YY = -ZZ
        assert_eq!(w("XX").mul(&w("YY")).unwrap(), w("-ZZ"));
        assert!(matches!(
            StabilizerGroup::check(words(&["+XX", "+YY", "+ZZ"])),
            Err(Error::Dependent(2))
        ));
    }

    #[test]
    fn check_group_rejects_noncommuting_and_phases() {
        assert!(matches!(
            StabilizerGroup::check(words(&["+X", "+Z"])),
            Err(Error::NonCommuting(0, 1))
        ));
        assert!(matches!(
            StabilizerGroup::check(words(&["+iX"])),
            Err(Error::NonHermitian(0))
        ));
    }

    fn cluster3_with(r0: &str, order: Vec<usize>) -> ResourceState {
        let group = StabilizerGroup::check(words(&["XZI", "ZXZ", "IZX"])).unwrap();
        let outputs = QubitSet::from_indices(3, [2]).unwrap();
        let r_ops = BTreeMap::from([(0, w(r0)), (1, w("IIX"))]);
        ResourceState::assemble(group, outputs, Flow { order, r_ops }).unwrap()
    }

    #[test]
    fn verify_flow_passes_for_cluster3() {
        let s = cluster3_with("IXZ", vec![0, 1]);
        assert!(s.verify_flow().passed());
        assert!(s.group().contains(&w("ZXZ")));
        assert!(s.group().contains(&w("IZX")));
    }

    #[test]
    fn verify_flow_flags_z_on_measured_qubit() {
        let s = cluster3_with("IZX", vec![0, 1]);
        let v = s.verify_flow();
        let first = v.first().unwrap();
        assert_eq!(first.qubit, 0);
        assert_eq!(first.condition, FlowCondition::MeasuredLetters);
        // ZZX is not a stabilizer either
        assert!(v
            .violations
            .iter()
            .any(|x| x.qubit == 0 && x.condition == FlowCondition::Stabilizer));
    }

    #[test]
    fn verify_flow_flags_order() {
        let s = cluster3_with("IXZ", vec![1, 0]);
        let v = s.verify_flow();
        let bad: Vec<_> = v
            .violations
            .iter()
            .filter(|x| x.condition == FlowCondition::TemporalSupport)
            .collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].qubit, 0);
    }

    #[test]
    fn verify_flow_flags_wrong_sign() {
        let s = cluster3_with("-IXZ", vec![0, 1]);
        let v = s.verify_flow();
        assert_eq!(v.first().unwrap().condition, FlowCondition::Stabilizer);
    }

    #[test]
    fn derive_r_for_small_clusters() {
        let s2 = cluster_1d(2).unwrap();
        assert_eq!(s2.r_op(0), &w("IX"));
        let s4 = cluster_1d(4).unwrap();
        // Z_0 R_0 must avoid Z on measured qubit 2: ZXZI·IIZX = ZXIX
        assert_eq!(s4.r_op(0), &w("IXIX"));
        assert_eq!(s4.r_op(1), &w("IIXZ"));
        assert_eq!(s4.r_op(2), &w("IIIX"));
    }

    #[test]
    fn ghz_like_group_has_a_flow() {
        // ZIZ = ZZI·IZZ is in the group, so qubit 0 can be corrected by Z_2
        let g = StabilizerGroup::check(words(&["XXX", "ZZI", "IZZ"])).unwrap();
        assert!(g.contains(&w("ZIZ")));
        let out = QubitSet::from_indices(3, [2]).unwrap();
        let r = derive_r_operators(&g, &out, &[0, 1]).unwrap();
        assert_eq!(r[&0], w("IIZ"));
        assert_eq!(r[&1], w("IIZ"));
    }

    #[test]
    fn reversed_cluster_has_no_flow() {
        // cluster 3 with output 0: restricted to qubits (1, 2) the generators
        // read (Z,I), (X,Z), (Z,X); no product gives (I,Z), so qubit 2 cannot
        // precede qubit 1
        let g = StabilizerGroup::check(words(&["XZI", "ZXZ", "IZX"])).unwrap();
        let none = g
            .enumerate(DEFAULT_ENUM_CAP)
            .unwrap()
            .any(|e| e.letter(1) == Letter::I && e.letter(2) == Letter::Z);
        assert!(!none);
        let out = QubitSet::from_indices(3, [0]).unwrap();
        assert!(matches!(
            derive_r_operators(&g, &out, &[1, 2]),
            Err(Error::NoFlow { qubit: 2 })
        ));
        assert!(derive_r_operators(&g, &out, &[2, 1]).is_ok());
    }

    #[test]
    fn row_major_order_fails_on_wide_grids() {
        let cols = 4;
        let n = 2 * cols;
        let mut edges = Vec::new();
        for r in 0..2 {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((r * cols + c, r * cols + c + 1));
                }
                if r == 0 {
                    edges.push((c, cols + c));
                }
            }
        }
        let order: Vec<usize> = (0..n).filter(|q| q % cols != cols - 1).collect();
        assert!(matches!(
            graph_state(n, &edges, &[cols - 1, n - 1], order),
            Err(Error::NoFlow { .. })
        ));
    }

    #[test]
    fn t_stabilizers() {
        assert_eq!(cluster_1d(4).unwrap().derive_t_stabilizers().unwrap(), words(&["+XIXZ"]));
        assert_eq!(cluster_1d(2).unwrap().derive_t_stabilizers().unwrap(), words(&["+XZ"]));
        assert_eq!(cluster_1d(3).unwrap().derive_t_stabilizers().unwrap(), words(&["+XIX"]));
    }

    #[test]
    fn builders() {
        let s = cluster_1d(2).unwrap();
        assert_eq!(s.group().generators(), &words(&["XZ", "ZX"])[..]);
        assert_eq!(s.outputs().iter().collect::<Vec<_>>(), vec![1]);
        let s = cluster_1d(3).unwrap();
        assert_eq!(s.group().generators(), &words(&["XZI", "ZXZ", "IZX"])[..]);
        let s = cluster_2d(2, 2).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.outputs().iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(s.group().generators(), &words(&["XZZI", "ZXIZ", "ZIXZ", "IZZX"])[..]);
        assert!(s.verify_flow().passed());
        assert!(cluster_1d(1).is_err());
        assert!(cluster_2d(1, 3).is_err());
    }

    #[test]
    fn builders_flow_for_many_sizes() {
        for n in 2..=12 {
            assert!(cluster_1d(n).unwrap().verify_flow().passed());
        }
        for r in 2..=4 {
            for c in 2..=5 {
                let s = cluster_2d(r, c).unwrap();
                assert!(s.verify_flow().passed(), "{r}x{c}");
                assert_eq!(s.derive_t_stabilizers().unwrap().len(), r);
            }
        }
    }

    #[test]
    fn excited_states() {
        let s = cluster_1d(3).unwrap();
        let e = excited_state(&s, 2).unwrap();
        assert_eq!(e.generators(), words(&["ZXZ", "IZX", "-XIX"]));
        let s = cluster_1d(2).unwrap();
        let e = excited_state(&s, 1).unwrap();
        assert_eq!(e.generators(), words(&["ZX", "-XZ"]));
        assert!(excited_state(&s, 0).is_err());
    }

    #[test]
    fn enumeration() {
        let g = cluster_1d(2).unwrap().group().clone();
        let mut all: Vec<_> = g.enumerate(24).unwrap().collect();
        all.sort();
        let mut expected = words(&["II", "XZ", "ZX", "YY"]);
        expected.sort();
        assert_eq!(all, expected);

        let g = cluster_1d(3).unwrap().group().clone();
        let all: Vec<_> = g.enumerate(24).unwrap().collect();
        assert_eq!(all.len(), 8);
        assert!(all.contains(&w("-YXY")));

        let empty = StabilizerGroup::new(3, vec![]).unwrap();
        assert_eq!(empty.enumerate(24).unwrap().collect::<Vec<_>>(), words(&["III"]));

        assert!(matches!(
            cluster_1d(5).unwrap().group().enumerate_indexed(4),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let s = cluster_2d(2, 3).unwrap();
        let text = s.to_file().to_json();
        let back = ResourceState::from_file(&ResourceFile::from_json(&text).unwrap()).unwrap();
        assert_eq!(back.group(), s.group());
        assert_eq!(back.flow(), s.flow());
    }
}
