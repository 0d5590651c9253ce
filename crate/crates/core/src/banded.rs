//! Banded storage and LU factorisation with partial pivoting.
//!
//! Layout follows the LAPACK `gbtrf` convention: column `j` stores rows
//! `j - ku - kl ..= j + kl`, the top `kl` slots holding pivoting fill.

use crate::error::{MemsError, Result};

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry `(i, j)`. Panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band (kl = {}, ku = {})",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.data[self.idx(i, j)] * xj;
            }
        }
        y
    }

    /// Factorises in place.
    pub fn factor(self) -> Result<BandLu> {
        BandLu::new(self)
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    fn new(mut m: BandMatrix) -> Result<Self> {
        let n = m.n;
        let kl = m.kl;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0usize;
            let mut best = m.data[m.idx(j, j)].abs();
            for p in 1..=km {
                let v = m.data[m.idx(j + p, j)].abs();
                if v > best {
                    best = v;
                    jp = p;
                }
            }
            ipiv[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(MemsError::Numerical(format!(
                    "singular banded matrix: zero pivot in column {j}"
                )));
            }
            ju = ju.max((j + m.ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = m.idx(j, c);
                    let b = m.idx(j + jp, c);
                    m.data.swap(a, b);
                }
            }
            let piv = m.data[m.idx(j, j)];
            for p in 1..=km {
                let k = m.idx(j + p, j);
                m.data[k] /= piv;
            }
            for c in j + 1..=ju {
                let t = m.data[m.idx(j, c)];
                if t != 0.0 {
                    for p in 1..=km {
                        let l = m.data[m.idx(j + p, j)];
                        let k = m.idx(j + p, c);
                        m.data[k] -= l * t;
                    }
                }
            }
        }
        Ok(Self { m, ipiv })
    }

    pub fn n(&self) -> usize {
        self.m.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = &self.m;
        let n = m.n;
        assert_eq!(b.len(), n);
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != 0.0 {
                let km = m.kl.min(n - 1 - j);
                for q in 1..=km {
                    b[j + q] -= m.data[m.idx(j + q, j)] * bj;
                }
            }
        }
        let span = m.kl + m.ku;
        for j in (0..n).rev() {
            b[j] /= m.data[m.idx(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(span)..j {
                    b[i] -= m.data[m.idx(i, j)] * bj;
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, rng: &mut ChaCha8Rng) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a.add(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        a
    }

    #[test]
    fn matches_dense_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, kl, ku) in &[(12, 2, 2), (30, 5, 3), (17, 1, 6)] {
            let a = random_band(n, kl, ku, &mut rng);
            let dense = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x_ref = dense.clone().lu().solve(&DVector::from_vec(b.clone())).unwrap();
            let x = a.factor().unwrap().solve(&b);
            for i in 0..n {
                assert!((x[i] - x_ref[i]).abs() < 1e-9 * (1.0 + x_ref[i].abs()));
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] needs a row swap.
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        let x = a.factor().unwrap().solve(&[3.0, 4.0]);
        assert_eq!(x, vec![4.0, 3.0]);
    }

    #[test]
    fn singular_reported() {
        let a = BandMatrix::zeros(4, 1, 1);
        assert!(matches!(a.factor(), Err(MemsError::Numerical(_))));
    }
}
