use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliWord;

/// Exact rational `num / 2^log2den`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    log2den: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, log2den: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, log2den: 0 };

    pub fn new(num: i64, log2den: u32) -> Self {
        let mut d = Dyadic { num, log2den };
        d.normalize();
        d
    }

    /// `2^-k`.
    pub fn half_pow(k: u32) -> Self {
        Dyadic { num: 1, log2den: k }
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.log2den = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.log2den);
        self.num >>= tz;
        self.log2den -= tz;
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn log2den(self) -> u32 {
        self.log2den
    }

    pub fn abs(self) -> Self {
        Dyadic {
            num: self.num.abs(),
            log2den: self.log2den,
        }
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / 2f64.powi(self.log2den as i32)
    }

    /// `self · 2^-k`.
    pub fn halve(self, k: u32) -> Self {
        Dyadic::new(self.num, self.log2den + k)
    }

    fn align(self, e: u32) -> i64 {
        self.num
            .checked_shl(e - self.log2den)
            .filter(|v| v >> (e - self.log2den) == self.num)
            .expect("dyadic coefficient overflow")
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let e = self.log2den.max(rhs.log2den);
        let num = self
            .align(e)
            .checked_add(rhs.align(e))
            .expect("dyadic coefficient overflow");
        Dyadic::new(num, e)
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        *self = *self + rhs;
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            log2den: self.log2den,
        }
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    // denominators are powers of two, so their exponents add
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Dyadic) -> Dyadic {
        let num = self.num.checked_mul(rhs.num).expect("dyadic coefficient overflow");
        Dyadic::new(num, self.log2den + rhs.log2den)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.log2den.max(other.log2den);
        self.align(e).cmp(&other.align(e))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.log2den)
        }
    }
}

/// Real-weighted sum of Pauli words. Words are stored with phase `+1`; the
/// sign of a Hermitian word is folded into its coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliWord, Dyadic>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a sum from `(signed word, coefficient)` pairs.
    pub fn from_terms<'a>(
        n: usize,
        terms: impl IntoIterator<Item = (&'a str, Dyadic)>,
    ) -> Result<Self> {
        let mut s = Self::new(n);
        for (text, c) in terms {
            s.add_term(&text.parse()?, c)?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · word`; `word` must be Hermitian.
    pub fn add_term(&mut self, word: &PauliWord, c: Dyadic) -> Result<()> {
        if word.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: word.n(),
            });
        }
        let sign = word
            .sign()
            .ok_or_else(|| Error::invalid(format!("non-Hermitian term {word}")))?;
        let c = if sign < 0 { -c } else { c };
        if c.is_zero() {
            return Ok(());
        }
        let key = word.unsigned();
        let entry = self.terms.entry(key).or_insert(Dyadic::ZERO);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&word.unsigned());
        }
        Ok(())
    }

    /// Coefficient of the signed word `word` (so `coeff(-P) = -coeff(+P)`).
    pub fn coeff(&self, word: &PauliWord) -> Dyadic {
        let c = self.terms.get(&word.unsigned()).copied().unwrap_or(Dyadic::ZERO);
        match word.sign() {
            Some(-1) => -c,
            Some(_) => c,
            None => Dyadic::ZERO,
        }
    }

    /// `(unsigned word, coefficient)` in word order.
    pub fn terms(&self) -> impl Iterator<Item = (&PauliWord, Dyadic)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn coefficient_sum(&self) -> Dyadic {
        self.terms.values().fold(Dyadic::ZERO, |a, &c| a + c)
    }

    /// Sum of absolute coefficients; for Ω these are the weights on the
    /// signed group elements and add up to one.
    pub fn abs_coefficient_sum(&self) -> Dyadic {
        self.terms.values().fold(Dyadic::ZERO, |a, &c| a + c.abs())
    }

    pub fn scaled(&self, factor: Dyadic) -> PauliSum {
        let mut out = PauliSum::new(self.n);
        for (w, c) in self.terms() {
            out.add_term(w, c * factor).expect("same qubit count");
        }
        out
    }

    pub fn plus(&self, other: &PauliSum) -> Result<PauliSum> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w, c)?;
        }
        Ok(out)
    }

    /// `prefix ⊗ self` with the coefficient multiplied by `factor`.
    pub fn prefixed(&self, prefix: &PauliWord, factor: Dyadic) -> PauliSum {
        let mut out = PauliSum::new(self.n + prefix.n());
        for (w, c) in self.terms() {
            out.add_term(&prefix.tensor(w), c * factor)
                .expect("tensor of Hermitian words is Hermitian");
        }
        out
    }

    /// Applies a word map (e.g. a Clifford conjugation) term by term.
    pub fn map_words(&self, f: impl Fn(&PauliWord) -> PauliWord) -> Result<PauliSum> {
        let mut out = PauliSum::new(self.n);
        for (w, c) in self.terms() {
            out.add_term(&f(w), c)?;
        }
        Ok(out)
    }

    pub fn to_dense(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n > cap {
            return Err(Error::cap("dense Pauli sum", self.n, cap));
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (w, c) in self.terms() {
            m += w.to_dense(cap)? * Complex64::new(c.to_f64(), 0.0);
        }
        Ok(m)
    }

    pub fn to_file(&self) -> PauliSumFile {
        PauliSumFile {
            n: self.n,
            terms: self
                .terms()
                .map(|(w, c)| PauliTerm {
                    word: w.clone(),
                    coeff: c.to_f64(),
                    coeff_exact: (c.num(), c.log2den()),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &PauliSumFile) -> Result<PauliSum> {
        let mut s = PauliSum::new(file.n);
        for t in &file.terms {
            s.add_term(&t.word, Dyadic::new(t.coeff_exact.0, t.coeff_exact.1))?;
        }
        Ok(s)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let letters: String = w.letters().map(|l| l.as_char()).collect();
            write!(f, "({c}) {letters}")?;
        }
        Ok(())
    }
}

/// Serialized form of a [`PauliSum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSumFile {
    pub n: usize,
    pub terms: Vec<PauliTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub word: PauliWord,
    pub coeff: f64,
    /// `(numerator, log2 of denominator)`.
    pub coeff_exact: (i64, u32),
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dyadic_arithmetic() {
        let q = Dyadic::half_pow(2);
        assert_eq!(q + q, Dyadic::half_pow(1));
        assert_eq!(q - q, Dyadic::ZERO);
        assert_eq!(Dyadic::new(6, 3), Dyadic::new(3, 2));
        assert_eq!((-q).to_f64(), -0.25);
        assert_eq!(q * Dyadic::new(3, 1), Dyadic::new(3, 3));
        assert!(Dyadic::half_pow(3) < Dyadic::half_pow(2));
        assert_eq!(Dyadic::new(-3, 3).to_string(), "-3/8");
    }

    #[test]
    fn sums_fold_signs_and_cancel() {
        let mut s = PauliSum::new(2);
        s.add_term(&"-XZ".parse().unwrap(), Dyadic::half_pow(2)).unwrap();
        assert_eq!(s.coeff(&"+XZ".parse().unwrap()), -Dyadic::half_pow(2));
        assert_eq!(s.coeff(&"-XZ".parse().unwrap()), Dyadic::half_pow(2));
        s.add_term(&"+XZ".parse().unwrap(), Dyadic::half_pow(2)).unwrap();
        assert!(s.is_empty());
        assert!(s.add_term(&"+iXZ".parse().unwrap(), Dyadic::ONE).is_err());
        assert!(s.add_term(&"+X".parse().unwrap(), Dyadic::ONE).is_err());
    }

    #[test]
    fn file_round_trip() {
        let s = PauliSum::from_terms(
            3,
            [("III", Dyadic::half_pow(1)), ("-YXY", Dyadic::half_pow(3))],
        )
        .unwrap();
        let json = serde_json::to_string(&s.to_file()).unwrap();
        assert!(json.contains("\"coeff_exact\":[-1,3]"));
        let back: PauliSumFile = serde_json::from_str(&json).unwrap();
        assert_eq!(PauliSum::from_file(&back).unwrap(), s);
    }

    proptest! {
        #[test]
        fn dyadic_matches_f64(a in -1000i64..1000, ea in 0u32..20, b in -1000i64..1000, eb in 0u32..20) {
            let x = Dyadic::new(a, ea);
            let y = Dyadic::new(b, eb);
            prop_assert_eq!((x + y).to_f64(), x.to_f64() + y.to_f64());
            prop_assert_eq!((x * y).to_f64(), x.to_f64() * y.to_f64());
            prop_assert_eq!(x.cmp(&y), x.to_f64().partial_cmp(&y.to_f64()).unwrap());
        }
    }
}
