//! Banded storage and LU factorization with partial pivoting inside the band.

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals. Rows carry
/// `kl` extra slots on the right for pivoting fill-in.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, data: vec![0.0; n * (2 * kl + ku + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn stride(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        (j + self.kl >= i && j <= i + self.kl + self.ku)
            .then(|| i * self.stride() + (j + self.kl - i))
    }

    /// Entry `(i, j)`; zero outside the stored band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.slot(i, j) {
            Some(s) if j <= i + self.ku => self.data[s],
            _ => 0.0,
        }
    }

    /// Adds `v` to entry `(i, j)`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let s = self.slot(i, j).unwrap();
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// LU factorization with row interchanges restricted to the band.
    pub fn factor(&self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut u = self.clone();
        let mut lower = vec![0.0; n * kl.max(1)];
        let mut pivots = vec![0; n];
        let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let p = (k..=last)
                .max_by(|&a, &b| u.at(a, k).abs().total_cmp(&u.at(b, k).abs()))
                .unwrap();
            pivots[k] = p;
            let far = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=far {
                    let (a, b) = (u.slot(k, j).unwrap(), u.slot(p, j).unwrap());
                    u.data.swap(a, b);
                }
            }
            let pivot = u.at(k, k);
            pmax = pmax.max(pivot.abs());
            pmin = pmin.min(pivot.abs());
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularMatrix { row: k, ratio: f64::INFINITY });
            }
            for i in k + 1..=last {
                let m = u.at(i, k) / pivot;
                lower[k * kl + (i - k - 1)] = m;
                if m != 0.0 {
                    for j in k..=far {
                        let s = u.slot(i, j).unwrap();
                        u.data[s] -= m * u.at(k, j);
                    }
                }
            }
        }
        let ratio = pmax / pmin;
        if ratio > 1e15 {
            return Err(Error::SingularMatrix { row: n, ratio });
        }
        Ok(BandLu { u, lower, pivots, pivot_ratio: ratio })
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.slot(i, j).unwrap()]
    }
}

/// Factors of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu {
    u: BandMatrix,
    lower: Vec<f64>,
    pivots: Vec<usize>,
    pivot_ratio: f64,
}

impl BandLu {
    /// Ratio of largest to smallest pivot magnitude, a cheap conditioning
    /// indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, kl, ku) = (self.u.n, self.u.kl, self.u.ku);
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.lower[k * kl + (i - k - 1)] * xk;
            }
        }
        for i in (0..n).rev() {
            let far = (i + kl + ku).min(n - 1);
            let s: f64 = (i + 1..=far).map(|j| self.u.at(i, j) * x[j]).sum();
            x[i] = (x[i] - s) / self.u.at(i, i);
        }
        x
    }
}
