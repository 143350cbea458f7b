//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicit QL iterations (the EISPACK tred2/tql2 pair).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// QL iterations allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 100;

// Column-major scratch matrix.
struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    #[inline]
    fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.n + r]
    }
    #[inline]
    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[c * self.n + r] = v;
    }
    #[inline]
    fn sub(&mut self, r: usize, c: usize, v: f64) {
        self.data[c * self.n + r] -= v;
    }
}

fn tridiagonalize(v: &mut Mat, d: &mut [f64], e: &mut [f64]) {
    let n = v.n;
    for j in 0..n {
        d[j] = v.get(n - 1, j);
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        } else {
            for x in d[..i].iter_mut() {
                *x /= scale;
                h += *x * *x;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);
            for j in 0..i {
                let f = d[j];
                v.set(j, i, f);
                let mut g = e[j] + v.get(j, j) * f;
                for k in j + 1..i {
                    let vkj = v.get(k, j);
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let (f, g) = (d[j], e[j]);
                for k in j..i {
                    v.sub(k, j, f * e[k] + g * d[k]);
                }
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n.saturating_sub(1) {
        let vii = v.get(i, i);
        v.set(n - 1, i, vii);
        v.set(i, i, 1.0);
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v.get(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v.get(k, i + 1) * v.get(k, j);
                }
                for k in 0..=i {
                    v.sub(k, j, g * d[k]);
                }
            }
        }
        for k in 0..=i {
            v.set(k, i + 1, 0.0);
        }
    }
    for j in 0..n {
        d[j] = v.get(n - 1, j);
        v.set(n - 1, j, 0.0);
    }
    v.set(n - 1, n - 1, 1.0);
    e[0] = 0.0;
}

fn ql_implicit(v: &mut Mat, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = v.n;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NonConvergence(MAX_QL_ITERATIONS));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for x in d[l + 2..n].iter_mut() {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = v.data.split_at_mut((i + 1) * n);
                    let col_i = &mut lo[i * n..];
                    let col_i1 = &mut hi[..n];
                    for (a, b) in col_i.iter_mut().zip(col_i1.iter_mut()) {
                        let h = *b;
                        *b = s * *a + c * h;
                        *a = c * *a - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// symmetric matrix. Only the lower triangle of `a` is trusted after the
/// caller's symmetry check; the matrix is symmetrized first.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let mut v = Mat { n, data: vec![0.0; n * n] };
    for c in 0..n {
        for r in 0..n {
            v.set(r, c, 0.5 * (a[(r, c)] + a[(c, r)]));
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| d[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = &v.data[src * n..(src + 1) * n];
        // largest-magnitude entry positive, near-ties resolved by lowest index
        let mut pivot = 0;
        for (k, x) in col.iter().enumerate() {
            if x.abs() > col[pivot].abs() * (1.0 + 1e-9) {
                pivot = k;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (k, x) in col.iter().enumerate() {
            vectors[(k, dst)] = sign * x;
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &b + b.transpose()
    }

    #[test]
    fn reconstructs_random_matrices() {
        for (n, seed) in [(1, 0), (2, 1), (5, 2), (17, 3), (64, 4)] {
            let a = random_symmetric(n, seed);
            let (w, v) = symmetric_eigen(&a).unwrap();
            let recon = &v * DMatrix::from_diagonal(&w) * v.transpose();
            assert!((recon - &a).norm() <= 1e-10 * a.norm().max(1.0));
            let gram = v.transpose() * &v - DMatrix::identity(n, n);
            assert!(gram.amax() <= 1e-10);
            assert!(w.as_slice().windows(2).all(|p| p[0] <= p[1]));
        }
    }

    #[test]
    fn matches_reference_solver() {
        let a = random_symmetric(30, 11);
        let (w, _) = symmetric_eigen(&a).unwrap();
        let mut reference: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (x, y) in w.iter().zip(&reference) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_and_diagonal_matrices() {
        let (w, v) = symmetric_eigen(&DMatrix::zeros(4, 4)).unwrap();
        assert!(w.iter().all(|&x| x == 0.0));
        assert!((v.transpose() * &v - DMatrix::identity(4, 4)).amax() < 1e-15);
        let (w, _) = symmetric_eigen(&DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]))).unwrap();
        assert_eq!(w.as_slice(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn sign_convention() {
        let a = nalgebra::dmatrix![2.0, 1.0; 1.0, 2.0];
        let (_, v) = symmetric_eigen(&a).unwrap();
        // eigenvector for 1 is (1, -1)/sqrt2: tie between entries, first wins
        assert!(v[(0, 0)] > 0.0 && v[(1, 0)] < 0.0);
        assert!(v[(0, 1)] > 0.0 && v[(1, 1)] > 0.0);
    }
}
