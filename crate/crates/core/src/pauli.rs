//! Signed Pauli strings in binary-symplectic form.
//!
//! A word on `n` qubits is stored as two bit masks plus a phase exponent:
//! the operator is `i^phase · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}` where the letter at
//! qubit `q` is read off `(x[q], z[q])`:
//!
//! | (x, z) | letter |
//! |--------|--------|
//! | (0, 0) | I      |
//! | (1, 0) | X      |
//! | (1, 1) | Y      |
//! | (0, 1) | Z      |
//!
//! Qubit 0 is the leftmost character of the text form and the most significant
//! tensor factor of the dense form, so `"XZ"` is `X ⊗ Z`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Bit storage, 64 qubits per limb.
pub type Limbs = SmallVec<[u64; 1]>;

/// Default cap on the qubit count of dense conversions.
pub const DEFAULT_DENSE_CAP: usize = 12;

#[inline]
pub(crate) fn limb_count(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[inline]
fn popcount(limbs: impl Iterator<Item = u64>) -> u32 {
    limbs.map(u64::count_ones).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// 2×2 matrix of the letter.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Letter::I => [[l, o], [o, l]],
            Letter::X => [[o, l], [l, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[l, o], [o, -l]],
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A subset of the qubits `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitSet {
    n: usize,
    bits: Limbs,
}

impl QubitSet {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            bits: smallvec![0; limb_count(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for q in 0..n {
            s.insert(q);
        }
        s
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for q in indices {
            if q >= n {
                return Err(Error::invalid(format!("qubit {q} out of range for {n} qubits")));
            }
            s.insert(q);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, q: usize) {
        assert!(q < self.n, "qubit {q} out of range");
        self.bits[q / 64] |= 1 << (q % 64);
    }

    pub fn remove(&mut self, q: usize) {
        assert!(q < self.n, "qubit {q} out of range");
        self.bits[q / 64] &= !(1 << (q % 64));
    }

    pub fn contains(&self, q: usize) -> bool {
        q < self.n && (self.bits[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        popcount(self.bits.iter().copied()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&q| self.contains(q))
    }

    pub fn complement(&self) -> Self {
        let mut s = Self::full(self.n);
        for (a, b) in s.bits.iter_mut().zip(&self.bits) {
            *a &= !b;
        }
        s
    }

    pub fn limbs(&self) -> &[u64] {
        &self.bits
    }
}

impl Serialize for QubitSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Signed `n`-qubit Pauli string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    n: usize,
    x: Limbs,
    z: Limbs,
    /// Exponent of `i`, mod 4.
    phase: u8,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: smallvec![0; limb_count(n)],
            z: smallvec![0; limb_count(n)],
            phase: 0,
        }
    }

    /// Single-letter word `letter` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut w = Self::identity(n);
        w.set_letter(q, letter);
        w
    }

    pub fn from_letters(letters: &[Letter], phase: u8) -> Self {
        let mut w = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            w.set_letter(q, l);
        }
        w.phase = phase & 3;
        w
    }

    /// Builds a word directly from masks (bit `q` of limb `q / 64` is qubit `q`).
    pub fn from_masks(n: usize, x: &[u64], z: &[u64], phase: u8) -> Self {
        let mut w = Self::identity(n);
        for (dst, src) in w.x.iter_mut().zip(x) {
            *dst = *src;
        }
        for (dst, src) in w.z.iter_mut().zip(z) {
            *dst = *src;
        }
        w.clear_padding();
        w.phase = phase & 3;
        w
    }

    fn clear_padding(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            let last = self.x.len() - 1;
            let mask = (1u64 << rem) - 1;
            self.x[last] &= mask;
            self.z[last] &= mask;
        }
        if self.n == 0 {
            self.x[0] = 0;
            self.z[0] = 0;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_limbs(&self) -> &[u64] {
        &self.x
    }

    pub fn z_limbs(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n).map(|q| self.letter(q))
    }

    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (xb, zb) = letter.bits();
        let bit = 1u64 << (q % 64);
        let limb = q / 64;
        if xb {
            self.x[limb] |= bit;
        } else {
            self.x[limb] &= !bit;
        }
        if zb {
            self.z[limb] |= bit;
        } else {
            self.z[limb] &= !bit;
        }
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// `+1` or `-1` for Hermitian words.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// True if every letter is `I`, regardless of phase.
    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&b| b == 0)
    }

    /// Same letters, phase reset to `+1`.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(0)
    }

    /// The matrix product `self · rhs` with exact phase tracking.
    pub fn mul(&self, rhs: &PauliWord) -> Result<PauliWord> {
        self.check_dims(rhs)?;
        let mut out = self.clone();
        out.mul_assign_unchecked(rhs);
        Ok(out)
    }

    /// In-place `self ← self · rhs`. Panics on a qubit-count mismatch.
    pub fn mul_assign(&mut self, rhs: &PauliWord) {
        assert_eq!(self.n, rhs.n, "qubit count mismatch in Pauli product");
        self.mul_assign_unchecked(rhs);
    }

    fn mul_assign_unchecked(&mut self, rhs: &PauliWord) {
        // Write each factor as i^{x·z} X^x Z^z; moving Z^{z_a} past X^{x_b}
        // costs (-1)^{z_a·x_b}.
        let mut exp = self.phase as u32 + rhs.phase as u32;
        for k in 0..self.x.len() {
            let (xa, za, xb, zb) = (self.x[k], self.z[k], rhs.x[k], rhs.z[k]);
            let (xc, zc) = (xa ^ xb, za ^ zb);
            exp += (xa & za).count_ones() + (xb & zb).count_ones() + 2 * (za & xb).count_ones();
            exp += 4 * 64 - (xc & zc).count_ones();
            self.x[k] = xc;
            self.z[k] = zc;
        }
        self.phase = (exp & 3) as u8;
    }

    fn check_dims(&self, rhs: &PauliWord) -> Result<()> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        Ok(())
    }

    /// Symplectic form: true iff the two words commute.
    pub fn commutes(&self, rhs: &PauliWord) -> Result<bool> {
        self.check_dims(rhs)?;
        Ok(self.commutes_unchecked(rhs))
    }

    pub(crate) fn commutes_unchecked(&self, rhs: &PauliWord) -> bool {
        let s: u32 = (0..self.x.len())
            .map(|k| ((self.x[k] & rhs.z[k]) ^ (self.z[k] & rhs.x[k])).count_ones())
            .sum();
        s.is_multiple_of(2)
    }

    /// Number of qubits in `set` where the word is not `I`.
    pub fn weight_on(&self, set: &QubitSet) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .zip(set.limbs())
            .map(|((x, z), s)| ((x | z) & s).count_ones() as usize)
            .sum()
    }

    pub fn weight(&self) -> usize {
        popcount(self.x.iter().zip(&self.z).map(|(x, z)| x | z)) as usize
    }

    pub fn support(&self) -> QubitSet {
        let mut s = QubitSet::empty(self.n);
        for (k, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            s.bits[k] = x | z;
        }
        s
    }

    /// `self ⊗ rhs`, with `self` on the leading qubits.
    pub fn tensor(&self, rhs: &PauliWord) -> PauliWord {
        let mut out = PauliWord::identity(self.n + rhs.n);
        for q in 0..self.n {
            out.set_letter(q, self.letter(q));
        }
        for q in 0..rhs.n {
            out.set_letter(self.n + q, rhs.letter(q));
        }
        out.phase = (self.phase + rhs.phase) & 3;
        out
    }

    /// Masks in dense-index convention: qubit `q` maps to bit `n - 1 - q`.
    pub(crate) fn index_masks(&self) -> (usize, usize) {
        debug_assert!(self.n <= 63);
        let mut xm = 0usize;
        let mut zm = 0usize;
        for q in 0..self.n {
            let b = 1usize << (self.n - 1 - q);
            if self.x_bit(q) {
                xm |= b;
            }
            if self.z_bit(q) {
                zm |= b;
            }
        }
        (xm, zm)
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn to_dense(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n > cap {
            return Err(Error::cap("dense Pauli matrix", self.n, cap));
        }
        let dim = 1usize << self.n;
        let (xm, zm) = self.index_masks();
        let base = self.phase as u32 + (xm & zm).count_ones();
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for col in 0..dim {
            let exp = base + 2 * (zm & col).count_ones();
            m[(col ^ xm, col)] = i_pow(exp);
        }
        Ok(m)
    }
}

/// `i^k` as a complex number.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for l in self.letters() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let s = text.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(err("empty Pauli string"));
        }
        let letters = body
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| err(&format!("unexpected character {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliWord::from_letters(&letters, phase))
    }
}

impl Serialize for PauliWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
