//! Gaussian elimination over fields (any `Ring` with `is_field`) and square
//! solves over local rings by unit pivoting.

use super::ring::Ring;
use crate::error::{Error, Result};

/// Reduced row echelon form of a list of rows; returns (rref rows, pivot columns).
pub fn rref<R: Ring>(r: &R, rows: &[Vec<R::Elem>], ncols: usize) -> (Vec<Vec<R::Elem>>, Vec<usize>) {
    let mut m: Vec<Vec<R::Elem>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        let Some(sel) = (row..m.len()).find(|&i| !r.is_zero(&m[i][col])) else {
            continue;
        };
        m.swap(row, sel);
        let inv = r.inv(&m[row][col]).expect("rref requires a field");
        m[row] = m[row].iter().map(|x| r.mul(x, &inv)).collect();
        for i in 0..m.len() {
            if i != row && !r.is_zero(&m[i][col]) {
                let factor = m[i][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x = r.sub(x, &r.mul(&factor, y));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    (m, pivots)
}

pub fn rank<R: Ring>(r: &R, rows: &[Vec<R::Elem>], ncols: usize) -> usize {
    rref(r, rows, ncols).1.len()
}

/// Basis of the right kernel {x : M x = 0} of the matrix with the given rows.
pub fn kernel_over_field<R: Ring>(r: &R, rows: &[Vec<R::Elem>], ncols: usize) -> Vec<Vec<R::Elem>> {
    let (m, pivots) = rref(r, rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![r.zero(); ncols];
            v[fc] = r.one();
            for (row, &pc) in m.iter().zip(pivots.iter()) {
                v[pc] = r.neg(&row[fc]);
            }
            v
        })
        .collect()
}

pub fn mat_vec<R: Ring>(r: &R, rows: &[Vec<R::Elem>], v: &[R::Elem]) -> Vec<R::Elem> {
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(r.zero(), |acc, (a, b)| r.add(&acc, &r.mul(a, b)))
        })
        .collect()
}

/// Incrementally maintained row-reduced basis of a subspace of R^n (R a field).
#[derive(Clone, Debug)]
pub struct EchelonBasis<R: Ring> {
    ring: R,
    dim: usize,
    rows: Vec<(usize, Vec<R::Elem>)>,
}

impl<R: Ring> EchelonBasis<R> {
    pub fn new(ring: R, dim: usize) -> Self {
        Self {
            ring,
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    fn reduce(&self, v: &[R::Elem]) -> Vec<R::Elem> {
        let r = &self.ring;
        let mut w = v.to_vec();
        for (pc, row) in &self.rows {
            if !r.is_zero(&w[*pc]) {
                let f = w[*pc].clone();
                for (x, y) in w.iter_mut().zip(row) {
                    *x = r.sub(x, &r.mul(&f, y));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[R::Elem]) -> bool {
        self.reduce(v).iter().all(|x| self.ring.is_zero(x))
    }

    /// Adds v; returns true when it enlarged the span.
    pub fn insert(&mut self, v: &[R::Elem]) -> bool {
        let r = self.ring.clone();
        let w = self.reduce(v);
        let Some(pc) = w.iter().position(|x| !r.is_zero(x)) else {
            return false;
        };
        let inv = r.inv(&w[pc]).expect("echelon basis requires a field");
        let w: Vec<R::Elem> = w.iter().map(|x| r.mul(x, &inv)).collect();
        for (_, row) in self.rows.iter_mut() {
            if !r.is_zero(&row[pc]) {
                let f = row[pc].clone();
                for (x, y) in row.iter_mut().zip(&w) {
                    *x = r.sub(x, &r.mul(&f, y));
                }
            }
        }
        self.rows.push((pc, w));
        true
    }

    pub fn basis(&self) -> Vec<Vec<R::Elem>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }
}

/// Solves A x = b for square A over a local ring, pivoting on units. Fails
/// with `NotAUnit` when some column offers no unit pivot (A not invertible).
pub fn solve_square<R: Ring>(r: &R, a: &[Vec<R::Elem>], b: &[R::Elem]) -> Result<Vec<R::Elem>> {
    let n = a.len();
    let mut m: Vec<Vec<R::Elem>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    for col in 0..n {
        let sel = (col..n)
            .find(|&i| r.is_unit(&m[i][col]))
            .ok_or_else(|| Error::NotAUnit(format!("no unit pivot in column {col}")))?;
        m.swap(col, sel);
        let inv = r.inv(&m[col][col]).expect("unit pivot");
        m[col] = m[col].iter().map(|x| r.mul(x, &inv)).collect();
        for i in 0..n {
            if i != col && !r.is_zero(&m[i][col]) {
                let factor = m[i][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x = r.sub(x, &r.mul(&factor, y));
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::galois::GaloisRing;
    use rand::{Rng, SeedableRng};

    /// Independent rank oracle: plain forward elimination without back-substitution.
    fn oracle_rank(p: u64, mut m: Vec<Vec<u64>>, ncols: usize) -> usize {
        let mut rank = 0;
        for col in 0..ncols {
            let Some(sel) = (rank..m.len()).find(|&i| m[i][col] % p != 0) else {
                continue;
            };
            m.swap(rank, sel);
            let inv = (1..p).find(|x| (x * m[rank][col]) % p == 1).unwrap();
            for i in rank + 1..m.len() {
                let f = (m[i][col] * inv) % p;
                for j in 0..ncols {
                    m[i][j] = (m[i][j] + p * p - (f * m[rank][j]) % p) % p;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn zero_and_identity_kernels() {
        let f2 = GaloisRing::field(2, 1).unwrap();
        let zero = vec![vec![0, 0], vec![0, 0]];
        assert_eq!(kernel_over_field(&f2, &zero, 2).len(), 2);
        let id = vec![vec![1, 0], vec![0, 1]];
        assert!(kernel_over_field(&f2, &id, 2).is_empty());
    }

    #[test]
    fn random_kernels_over_f3_match_rank_oracle() {
        let f3 = GaloisRing::field(3, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m: Vec<Vec<u32>> = (0..6)
                .map(|_| (0..4).map(|_| rng.gen_range(0..3)).collect())
                .collect();
            let ker = kernel_over_field(&f3, &m, 4);
            let rank = oracle_rank(3, m.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect(), 4);
            assert_eq!(ker.len(), 4 - rank);
            for v in &ker {
                assert!(mat_vec(&f3, &m, v).iter().all(|x| *x == 0));
            }
            assert_eq!(super::rank(&f3, &ker, 4), ker.len());
        }
    }

    #[test]
    fn echelon_basis_tracks_span() {
        let f5 = GaloisRing::field(5, 1).unwrap();
        let mut e = EchelonBasis::new(f5, 3);
        assert!(e.insert(&[1, 2, 3]));
        assert!(!e.insert(&[2, 4, 1]));
        assert!(e.contains(&[3, 1, 4]));
        assert!(e.insert(&[0, 1, 0]));
        assert!(!e.contains(&[0, 0, 1]));
        assert!(e.insert(&[0, 0, 1]));
        assert!(e.is_full());
    }

    #[test]
    fn solve_over_galois_ring() {
        let r = GaloisRing::galois(2, 3, 1).unwrap();
        let a = vec![vec![2, 1], vec![1, 4]];
        let b = vec![3, 5];
        let x = solve_square(&r, &a, &b).unwrap();
        assert_eq!(mat_vec(&r, &a, &x), b);
        let singular = vec![vec![2, 4], vec![6, 2]];
        assert!(solve_square(&r, &singular, &b).is_err());
    }
}
