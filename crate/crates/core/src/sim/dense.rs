//! Kernels on dense amplitude vectors and column-major density matrices.
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of the index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::pauli::{i_pow, PauliWord};

pub type C64 = Complex64;
pub type Gate = [[C64; 2]; 2];

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub(crate) fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

pub(crate) fn apply_gate(v: &mut [C64], n: usize, q: usize, u: &Gate) {
    let m = bit(n, q);
    for b in 0..v.len() {
        if b & m == 0 {
            let (a0, a1) = (v[b], v[b | m]);
            v[b] = u[0][0] * a0 + u[0][1] * a1;
            v[b | m] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

/// Applies `word` to the amplitudes whose `control` bit is set (all of them
/// when `control` is `None`).
pub(crate) fn apply_pauli(v: &mut [C64], word: &PauliWord, control: Option<usize>) {
    let n = word.n();
    let (xm, zm) = word.index_masks();
    let base = word.phase() as u32 + (xm & zm).count_ones();
    let cm = control.map(|c| bit(n, c)).unwrap_or(0);
    let src = v.to_vec();
    for (b, &a) in src.iter().enumerate() {
        if b & cm == cm {
            v[b ^ xm] = a * i_pow(base + 2 * (zm & b).count_ones());
        }
    }
}

/// `ρ ↦ O ρ O†` given the action `op` of `O` on vectors.
pub(crate) fn conjugate(rho: &mut DMatrix<C64>, op: impl Fn(&mut [C64])) {
    let dim = rho.nrows();
    for col in rho.as_mut_slice().chunks_mut(dim) {
        op(col);
    }
    rho.adjoint_mut();
    for col in rho.as_mut_slice().chunks_mut(dim) {
        op(col);
    }
    rho.adjoint_mut();
}

/// `tr(ρ P)` for a Pauli word `P`.
pub(crate) fn pauli_trace(rho: &DMatrix<C64>, word: &PauliWord) -> C64 {
    let (xm, zm) = word.index_masks();
    let base = word.phase() as u32 + (xm & zm).count_ones();
    (0..rho.nrows())
        .map(|b| rho[(b, b ^ xm)] * i_pow(base + 2 * (zm & b).count_ones()))
        .sum()
}

/// `⟨v|ρ|v⟩`.
pub(crate) fn sandwich(rho: &DMatrix<C64>, v: &DVector<C64>) -> C64 {
    v.dotc(&(rho * v))
}

/// Keeps the block where qubit `q` equals `s` and drops the qubit.
#[cfg(test)]
pub(crate) fn project_out_vec(v: &[C64], n: usize, q: usize, s: bool) -> Vec<C64> {
    let m = bit(n, q);
    let low = m - 1;
    (0..v.len() / 2)
        .map(|r| {
            let b = ((r & !low) << 1) | (r & low) | if s { m } else { 0 };
            v[b]
        })
        .collect()
}

/// Density-matrix counterpart of `project_out_vec`.
pub(crate) fn project_out(rho: &DMatrix<C64>, n: usize, q: usize, s: bool) -> DMatrix<C64> {
    let m = bit(n, q);
    let low = m - 1;
    let dim = rho.nrows() / 2;
    let idx: Vec<usize> = (0..dim)
        .map(|r| ((r & !low) << 1) | (r & low) | if s { m } else { 0 })
        .collect();
    DMatrix::from_fn(dim, dim, |r, c| rho[(idx[r], idx[c])])
}

/// `H · exp(iθZ)`.
pub(crate) fn rotation(theta: f64) -> Gate {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let p = C64::from_polar(h, theta);
    let m = C64::from_polar(h, -theta);
    [[p, m], [p, -m]]
}

pub(crate) fn adjoint(u: &Gate) -> Gate {
    [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]]
}

pub(crate) fn z_rotation(eps: f64) -> Gate {
    [[C64::from_polar(1.0, -eps / 2.0), ZERO], [ZERO, C64::from_polar(1.0, eps / 2.0)]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kron_gate(n: usize, q: usize, u: &Gate) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(1, 1, ONE);
        for k in 0..n {
            let f = if k == q {
                DMatrix::from_fn(2, 2, |r, c| u[r][c])
            } else {
                DMatrix::identity(2, 2)
            };
            m = m.kronecker(&f);
        }
        m
    }

    fn sample_vec(len: usize) -> Vec<C64> {
        (0..len)
            .map(|k| C64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
            .collect()
    }

    #[test]
    fn gate_matches_kronecker() {
        let u = rotation(0.37);
        for q in 0..3 {
            let v = sample_vec(8);
            let mut got = v.clone();
            apply_gate(&mut got, 3, q, &u);
            let want = kron_gate(3, q, &u) * DVector::from_vec(v);
            assert!((DVector::from_vec(got) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn pauli_matches_dense() {
        for text in ["XYZ", "-iZIY", "+iYYX"] {
            let w: PauliWord = text.parse().unwrap();
            let v = sample_vec(8);
            let mut got = v.clone();
            apply_pauli(&mut got, &w, None);
            let want = w.to_dense(12).unwrap() * DVector::from_vec(v.clone());
            assert!((DVector::from_vec(got) - want).norm() < 1e-12);

            let rho = DVector::from_vec(v.clone()) * DVector::from_vec(v).adjoint();
            let tr = pauli_trace(&rho, &w);
            let want = (&rho * w.to_dense(12).unwrap()).trace();
            assert!((tr - want).norm() < 1e-12);
        }
    }

    #[test]
    fn controlled_pauli_and_conjugation() {
        let w: PauliWord = "IXZ".parse().unwrap();
        let mut cw = DMatrix::<C64>::identity(8, 8);
        let d = w.to_dense(12).unwrap();
        for r in 4..8 {
            for c in 4..8 {
                cw[(r, c)] = d[(r, c)];
            }
        }
        let v = sample_vec(8);
        let rho = DVector::from_vec(v.clone()) * DVector::from_vec(v).adjoint();
        let mut got = rho.clone();
        conjugate(&mut got, |col| apply_pauli(col, &w, Some(0)));
        let want = &cw * &rho * cw.adjoint();
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn projection_drops_the_qubit() {
        let v = sample_vec(8);
        let p = project_out_vec(&v, 3, 1, true);
        assert_eq!(p, vec![v[0b010], v[0b011], v[0b110], v[0b111]]);
        let rho = DVector::from_vec(v.clone()) * DVector::from_vec(v).adjoint();
        let r = project_out(&rho, 3, 1, true);
        let pv = DVector::from_vec(p);
        assert!((r - &pv * pv.adjoint()).norm() < 1e-12);
    }
}
