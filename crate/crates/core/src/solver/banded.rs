//! Banded LU factorization with partial pivoting.
//!
//! Storage follows the general-band convention: entry (i, j) of an n x n
//! matrix with kl sub- and ku superdiagonals lives at
//! `ab[j * ldab + (kl + ku + i - j)]` with `ldab = 2 kl + ku + 1`; the extra
//! kl leading rows of each column absorb fill from row swaps. Factorization
//! is the unblocked right-looking algorithm; pivoting keeps it stable on the
//! nonsymmetric stencils produced by the mixed derivative term.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl Banded {
    pub fn new(n: usize, kl: usize, ku: usize) -> Banded {
        assert!(n > 0 && kl < n && ku < n, "band widths must be smaller than the order");
        let ldab = 2 * kl + ku + 1;
        Banded { n, kl, ku, ldab, ab: vec![0.0; ldab * n] }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(self.in_band(i, j), "({i}, {j}) outside band kl={}, ku={}", self.kl, self.ku);
        let s = self.slot(i, j);
        self.ab[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(self.in_band(i, j), "({i}, {j}) outside band kl={}, ku={}", self.kl, self.ku);
        let s = self.slot(i, j);
        self.ab[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// y = A x over the original band (call before factoring).
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.fill(0.0);
        for j in 0..self.n {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let i0 = j.saturating_sub(self.ku);
            let i1 = (j + self.kl).min(self.n - 1);
            let base = self.slot(i0, j);
            for (k, yi) in y[i0..=i1].iter_mut().enumerate() {
                *yi += self.ab[base + k] * xj;
            }
        }
    }

    /// Max row sum of absolute values (infinity norm), original band.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0f64; self.n];
        for j in 0..self.n {
            let i0 = j.saturating_sub(self.ku);
            let i1 = (j + self.kl).min(self.n - 1);
            for i in i0..=i1 {
                sums[i] += self.ab[self.slot(i, j)].abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// LU factorization with partial pivoting; consumes the band.
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut ipiv = vec![0usize; n];
        // last column touched by updates so far
        let mut ju = 0usize;
        for j in 0..n {
            let i_end = (j + kl).min(n - 1);
            // pivot search in column j
            let mut p = j;
            let mut best = self.ab[self.slot(j, j)].abs();
            for i in (j + 1)..=i_end {
                let v = self.ab[self.slot(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SolveFailed(format!(
                    "banded LU hit an exactly zero pivot at column {j}"
                )));
            }
            ipiv[j] = p;
            ju = ju.max((j + ku + (p - j)).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let (sp, sj) = (self.slot(p, c), self.slot(j, c));
                    self.ab.swap(sp, sj);
                }
            }
            let pivot = self.ab[self.slot(j, j)];
            for i in (j + 1)..=i_end {
                let s = self.slot(i, j);
                self.ab[s] /= pivot;
            }
            // empty when ju <= j (possible with ku = 0 and no pivot offset)
            for c in (j + 1)..=ju {
                let ajc = self.ab[self.slot(j, c)];
                if ajc == 0.0 {
                    continue;
                }
                for i in (j + 1)..=i_end {
                    let (sic, sij) = (self.slot(i, c), self.slot(i, j));
                    self.ab[sic] -= self.ab[sij] * ajc;
                }
            }
        }
        Ok(BandedLu { band: self, ipiv })
    }
}

#[derive(Clone, Debug)]
pub struct BandedLu {
    band: Banded,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Overwrite b with A^{-1} b.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.band.n;
        assert_eq!(b.len(), n);
        let (kl, ku) = (self.band.kl, self.band.ku);
        // forward: apply P and unit-lower L
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(p, j);
            }
            let bj = b[j];
            if bj == 0.0 {
                continue;
            }
            let i_end = (j + kl).min(n - 1);
            for i in (j + 1)..=i_end {
                b[i] -= self.band.ab[self.band.slot(i, j)] * bj;
            }
        }
        // back substitution: U has bandwidth ku + kl after fill
        let ub = ku + kl;
        for j in (0..n).rev() {
            b[j] /= self.band.ab[self.band.slot(j, j)];
            let bj = b[j];
            if bj == 0.0 {
                continue;
            }
            let i0 = j.saturating_sub(ub);
            for i in i0..j {
                b[i] -= self.band.ab[self.band.slot(i, j)] * bj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting, for reference.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for j in 0..n {
            let p = (j..n).max_by(|&x, &y| a[x][j].abs().total_cmp(&a[y][j].abs())).unwrap();
            a.swap(j, p);
            b.swap(j, p);
            assert!(a[j][j] != 0.0, "singular reference system");
            for i in (j + 1)..n {
                let m = a[i][j] / a[j][j];
                if m == 0.0 {
                    continue;
                }
                for c in j..n {
                    let v = a[j][c];
                    a[i][c] -= m * v;
                }
                b[i] -= m * b[j];
            }
        }
        for j in (0..n).rev() {
            b[j] /= a[j][j];
            for i in 0..j {
                b[i] -= a[i][j] * b[j];
            }
        }
        b
    }

    fn random_band(rng: &mut ChaCha8Rng, n: usize, kl: usize, ku: usize) -> (Banded, Vec<Vec<f64>>) {
        let mut band = Banded::new(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in j_range(i, n, kl, ku) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                band.set(i, j, v);
                dense[i][j] = v;
            }
            // diagonal dominance keeps the random systems well conditioned
            let boost = 2.0 + (kl + ku) as f64;
            band.add(i, i, boost);
            dense[i][i] += boost;
        }
        (band, dense)
    }

    fn j_range(i: usize, n: usize, kl: usize, ku: usize) -> std::ops::RangeInclusive<usize> {
        i.saturating_sub(kl)..=(i + ku).min(n - 1)
    }

    #[test]
    fn matches_dense_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &(n, kl, ku) in &[(40usize, 3usize, 2usize), (25, 1, 4), (60, 7, 7), (10, 0, 2), (12, 3, 0)] {
            let (band, dense) = random_band(&mut rng, n, kl, ku);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let expected = dense_solve(dense, b.clone());
            let lu = band.factor().unwrap();
            let mut x = b;
            lu.solve_in_place(&mut x);
            for (xi, ei) in x.iter().zip(&expected) {
                assert!((xi - ei).abs() < 1e-10, "banded {xi} vs dense {ei}");
            }
        }
    }

    #[test]
    fn tridiagonal_known_solution() {
        let n = 50;
        let mut a = Banded::new(n, 1, 1);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i > 0 {
                a.set(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
            }
        }
        // b = A * ones has a known exact solution
        let mut b = vec![0.0; n];
        a.matvec(&vec![1.0; n], &mut b);
        let lu = a.factor().unwrap();
        lu.solve_in_place(&mut b);
        for bi in b {
            assert!((bi - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matvec_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (band, dense) = random_band(&mut rng, 30, 4, 2);
        let x: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut y = vec![0.0; 30];
        band.matvec(&x, &mut y);
        for i in 0..30 {
            let expect: f64 = (0..30).map(|j| dense[i][j] * x[j]).sum();
            assert!((y[i] - expect).abs() < 1e-12);
        }
        assert!(band.norm_inf() > 0.0);
    }

    #[test]
    fn zero_pivot_is_reported() {
        // column 1 identically zero => singular
        let mut a = Banded::new(3, 1, 1);
        a.set(0, 0, 1.0);
        a.set(2, 2, 1.0);
        a.set(1, 0, 0.0);
        a.set(1, 2, 0.0);
        assert!(matches!(a.factor(), Err(Error::SolveFailed(_))));
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]]: needs the row swap
        let mut a = Banded::new(2, 1, 1);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        let lu = a.factor().unwrap();
        let mut b = vec![3.0, 5.0];
        lu.solve_in_place(&mut b);
        assert!((b[0] - 5.0).abs() < 1e-14);
        assert!((b[1] - 3.0).abs() < 1e-14);
    }
}
