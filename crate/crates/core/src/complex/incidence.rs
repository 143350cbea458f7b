use nalgebra::{DMatrix, DVector};

/// Sparse integer matrix stored by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    n_rows: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

// Large prime for exact rank computations; entries here are tiny integers.
const RANK_PRIME: u64 = (1 << 61) - 1;

impl Incidence {
    pub fn new(n_rows: usize, cols: Vec<Vec<(usize, i64)>>) -> Self {
        Incidence { n_rows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.n_rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, c: usize) -> &[(usize, i64)] {
        &self.cols[c]
    }

    pub fn to_dense(&self) -> DMatrix<i64> {
        let mut m = DMatrix::zeros(self.n_rows, self.cols.len());
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.to_dense().map(|v| v as f64)
    }

    /// Exact integer product `self * other`.
    pub fn product(&self, other: &Incidence) -> DMatrix<i64> {
        assert_eq!(self.ncols(), other.nrows(), "inner dimensions differ");
        let mut out = DMatrix::zeros(self.n_rows, other.ncols());
        for (c, col) in other.cols.iter().enumerate() {
            for &(k, b) in col {
                for &(r, a) in &self.cols[k] {
                    out[(r, c)] += a * b;
                }
            }
        }
        out
    }

    /// Exact `self * self^T`.
    pub fn gram_outer(&self) -> DMatrix<i64> {
        let mut out = DMatrix::zeros(self.n_rows, self.n_rows);
        for col in &self.cols {
            for &(r, a) in col {
                for &(s, b) in col {
                    out[(r, s)] += a * b;
                }
            }
        }
        out
    }

    /// Exact `self^T * self`.
    pub fn gram_inner(&self) -> DMatrix<i64> {
        let n = self.cols.len();
        let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.n_rows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                rows[r].push((c, v));
            }
        }
        let mut out = DMatrix::zeros(n, n);
        for row in &rows {
            for &(c, a) in row {
                for &(d, b) in row {
                    out[(c, d)] += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.ncols());
        let mut y = DVector::zeros(self.n_rows);
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                y[r] += v as f64 * x[c];
            }
        }
        y
    }

    pub fn tr_mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.n_rows);
        DVector::from_iterator(
            self.cols.len(),
            self.cols
                .iter()
                .map(|col| col.iter().map(|&(r, v)| v as f64 * x[r]).sum()),
        )
    }

    /// Rank over the rationals, computed by elimination modulo a large prime.
    pub fn rank(&self) -> usize {
        let p = RANK_PRIME as u128;
        let to_mod = |v: i64| -> u128 { (v as i128).rem_euclid(p as i128) as u128 };
        let mut m: Vec<Vec<u128>> = (0..self.n_rows)
            .map(|_| vec![0u128; self.cols.len()])
            .collect();
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                m[r][c] = (m[r][c] + to_mod(v)) % p;
            }
        }
        let inv = |a: u128| -> u128 {
            // Fermat inverse
            let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u128);
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = acc * base % p;
                }
                base = base * base % p;
                exp >>= 1;
            }
            acc
        };
        let (nr, nc) = (self.n_rows, self.cols.len());
        let mut rank = 0;
        for c in 0..nc {
            let Some(pivot) = (rank..nr).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            let pinv = inv(m[rank][c]);
            for r in 0..nr {
                if r != rank && m[r][c] != 0 {
                    let factor = m[r][c] * pinv % p;
                    for k in c..nc {
                        let sub = factor * m[rank][k] % p;
                        m[r][k] = (m[r][k] + p - sub) % p;
                    }
                }
            }
            rank += 1;
            if rank == nr {
                break;
            }
        }
        rank
    }
}
