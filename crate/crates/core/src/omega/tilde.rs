use super::sum::{Dyadic, PauliSum};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliWord};

/// Conjugates `word` by the product of CZ gates on neighbouring qubits of a
/// chain. X on qubit q picks up Z on q-1 and q+1; Z is unchanged.
pub fn cz_chain_conjugate(word: &PauliWord) -> PauliWord {
    let n = word.n();
    let mut out = PauliWord::identity(n).with_phase(word.phase());
    for q in 0..n {
        let letter = word.letter(q);
        if letter == Letter::I {
            continue;
        }
        if letter.bits().0 {
            let mut image = PauliWord::single(n, q, Letter::X);
            if q > 0 {
                image.set_letter(q - 1, Letter::Z);
            }
            if q + 1 < n {
                image.set_letter(q + 1, Letter::Z);
            }
            out.mul_assign(&image);
        }
        if letter == Letter::Y {
            // Y = i X Z
            out.mul_assign(&PauliWord::single(n, q, Letter::Z).with_phase(1));
        } else if letter == Letter::Z {
            out.mul_assign(&PauliWord::single(n, q, Letter::Z));
        }
    }
    out
}

/// `CZ̄ (2Ω − I) CZ̄` for an Ω on a chain.
pub fn omega_tilde_from_omega(omega: &PauliSum) -> Result<PauliSum> {
    let shifted = omega.scaled(Dyadic::new(2, 0)).plus(&{
        let mut id = PauliSum::new(omega.n());
        id.add_term(&PauliWord::identity(omega.n()), -Dyadic::ONE)?;
        id
    })?;
    shifted.map_words(cz_chain_conjugate)
}

fn base_case(n: usize) -> PauliSum {
    let terms: &[(&str, Dyadic)] = match n {
        2 => &[("XI", Dyadic::half_pow(1)), ("XX", Dyadic::half_pow(1))],
        3 => &[
            ("XIX", Dyadic::half_pow(1)),
            ("XXX", Dyadic::half_pow(2)),
            ("XXI", Dyadic::half_pow(2)),
        ],
        _ => unreachable!(),
    };
    PauliSum::from_terms(n, terms.iter().copied()).expect("valid base case")
}

/// One step `Ω̃_N = ½ X ⊗ Ω̃_{N-1} + ½ XI ⊗ Ω̃_{N-2}`.
pub fn omega_tilde_recurrence_step(prev: &PauliSum, prev2: &PauliSum) -> Result<PauliSum> {
    if prev.n() != prev2.n() + 1 {
        return Err(Error::DimensionMismatch {
            left: prev.n(),
            right: prev2.n() + 1,
        });
    }
    let half = Dyadic::half_pow(1);
    let x: PauliWord = "X".parse()?;
    let xi: PauliWord = "XI".parse()?;
    prev.prefixed(&x, half).plus(&prev2.prefixed(&xi, half))
}

/// Ω̃ for the open chain of `n` qubits with the last qubit as output.
pub fn omega_tilde_1d(n: usize) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::invalid(format!("chain length {n} is below 2")));
    }
    let (mut prev2, mut prev) = (base_case(2), base_case(3));
    if n == 2 {
        return Ok(prev2);
    }
    for _ in 4..=n {
        let next = omega_tilde_recurrence_step(&prev, &prev2)?;
        prev2 = std::mem::replace(&mut prev, next);
    }
    Ok(prev)
}
