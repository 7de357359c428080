//! Dense GF(2) linear algebra on packed bit rows.

#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(64).max(1)
}

#[inline]
pub fn get(row: &[u64], i: usize) -> bool {
    (row[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
pub fn set(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

#[inline]
pub fn flip(row: &mut [u64], i: usize) {
    row[i / 64] ^= 1 << (i % 64);
}

#[inline]
pub fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
pub fn is_zero(row: &[u64]) -> bool {
    row.iter().all(|&w| w == 0)
}

pub fn lowest_set(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

/// Incremental row-echelon basis that remembers, for every pivot row, which
/// inserted vectors it is a combination of.
#[derive(Clone, Debug, Default)]
pub struct Decomposer {
    width: usize,
    capacity: usize,
    rows: Vec<Pivot>,
}

#[derive(Clone, Debug)]
struct Pivot {
    col: usize,
    row: Vec<u64>,
    combo: Vec<u64>,
}

impl Decomposer {
    /// `width` bits per vector, at most `capacity` inserted vectors.
    pub fn new(width: usize, capacity: usize) -> Self {
        Self {
            width,
            capacity,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [u64], combo: &mut [u64]) {
        for p in &self.rows {
            if get(v, p.col) {
                xor_into(v, &p.row);
                xor_into(combo, &p.combo);
            }
        }
    }

    /// Inserts vector number `label`; returns false if it was dependent.
    pub fn insert(&mut self, v: &[u64], label: usize) -> bool {
        assert!(label < self.capacity);
        let mut row = v.to_vec();
        row.resize(words_for(self.width), 0);
        let mut combo = vec![0u64; words_for(self.capacity)];
        set(&mut combo, label);
        self.reduce(&mut row, &mut combo);
        match lowest_set(&row) {
            Some(col) => {
                self.rows.push(Pivot { col, row, combo });
                true
            }
            None => false,
        }
    }

    /// Labels of inserted vectors summing to `v`, if `v` is in the span.
    pub fn decompose(&self, v: &[u64]) -> Option<Vec<u64>> {
        let mut row = v.to_vec();
        row.resize(words_for(self.width), 0);
        let mut combo = vec![0u64; words_for(self.capacity)];
        self.reduce(&mut row, &mut combo);
        is_zero(&row).then_some(combo)
    }
}

/// Solves `A·c = b` over GF(2), where `rows[e]` holds the coefficients of
/// equation `e` over `ncols` unknowns. Free variables are set to zero.
pub fn solve(rows: &[Vec<u64>], rhs: &[bool], ncols: usize) -> Option<Vec<u64>> {
    assert_eq!(rows.len(), rhs.len());
    let w = words_for(ncols + 1);
    let mut aug: Vec<Vec<u64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut a = r.clone();
            a.resize(w, 0);
            if b {
                set(&mut a, ncols);
            }
            a
        })
        .collect();

    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..aug.len()).find(|&r| get(&aug[r], col)) else {
            continue;
        };
        aug.swap(rank, p);
        let pivot = aug[rank].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != rank && get(row, col) {
                xor_into(row, &pivot);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if aug[rank..].iter().any(|r| get(r, ncols)) {
        return None;
    }
    let mut sol = vec![0u64; words_for(ncols)];
    for (r, &col) in pivots.iter().enumerate() {
        if get(&aug[r], ncols) {
            set(&mut sol, col);
        }
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposer_tracks_combinations() {
        let mut d = Decomposer::new(4, 3);
        assert!(d.insert(&[0b0011], 0));
        assert!(d.insert(&[0b0110], 1));
        assert!(!d.insert(&[0b0101], 2));
        assert_eq!(d.rank(), 2);
        assert_eq!(d.decompose(&[0b0101]).unwrap(), vec![0b011]);
        assert_eq!(d.decompose(&[0b0110]).unwrap(), vec![0b010]);
        assert!(d.decompose(&[0b1000]).is_none());
        assert_eq!(d.decompose(&[0]).unwrap(), vec![0]);
    }

    #[test]
    fn solve_small_systems() {
        // c0 + c1 = 1, c1 + c2 = 0, c2 = 1
        let rows = vec![vec![0b011], vec![0b110], vec![0b100]];
        let sol = solve(&rows, &[true, false, true], 3).unwrap();
        assert_eq!(sol, vec![0b110]);
        // inconsistent: c0 = 1 and c0 = 0
        assert!(solve(&[vec![1], vec![1]], &[true, false], 1).is_none());
        // underdetermined: free variables are zero
        assert_eq!(solve(&[vec![0b11]], &[true], 2).unwrap(), vec![0b01]);
    }

    #[test]
    fn brute_force_agrees_with_solver() {
        // every 3x3 system: the solver finds a solution iff brute force does
        for a in 0u32..512 {
            let rows: Vec<Vec<u64>> = (0..3).map(|r| vec![((a >> (3 * r)) & 7) as u64]).collect();
            for b in 0u32..8 {
                let rhs: Vec<bool> = (0..3).map(|r| (b >> r) & 1 == 1).collect();
                let brute = (0u64..8).find(|c| {
                    rows.iter()
                        .zip(&rhs)
                        .all(|(row, &t)| ((row[0] & c).count_ones() % 2 == 1) == t)
                });
                let got = solve(&rows, &rhs, 3);
                assert_eq!(brute.is_some(), got.is_some());
                if let Some(s) = got {
                    let c = s[0];
                    assert!(rows
                        .iter()
                        .zip(&rhs)
                        .all(|(row, &t)| ((row[0] & c).count_ones() % 2 == 1) == t));
                }
            }
        }
    }
}
