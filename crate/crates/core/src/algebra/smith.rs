//! Smith normal form over Z. Used to compare integral cocycle lattices with
//! their reductions mod p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntegerMatrix = Vec<Vec<BigInt>>;

/// U · M · V = D with U, V unimodular and D diagonal, d_i | d_{i+1}, d_i ≥ 0.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..n)
            .map(|i| self.d[i][i].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn identity(n: usize) -> IntegerMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntegerMatrix, b: &IntegerMatrix) -> IntegerMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn row_op(m: &mut IntegerMatrix, i: usize, j: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
    // (row_i, row_j) <- (a row_i + b row_j, c row_i + d row_j)
    for k in 0..m[i].len() {
        let x = m[i][k].clone();
        let y = m[j][k].clone();
        m[i][k] = a * &x + b * &y;
        m[j][k] = c * &x + d * &y;
    }
}

fn col_op(m: &mut IntegerMatrix, i: usize, j: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
    for row in m.iter_mut() {
        let x = row[i].clone();
        let y = row[j].clone();
        row[i] = a * &x + b * &y;
        row[j] = c * &x + d * &y;
    }
}

/// Unimodular (x y; c d) sending (a, b) to (gcd, 0); exact division is
/// handled directly so that already-cleared lines stay cleared.
fn combination(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if (b % a).is_zero() {
        return (BigInt::one(), BigInt::zero(), -(b / a), BigInt::one());
    }
    let eg = a.extended_gcd(b);
    let g = eg.gcd;
    (eg.x, eg.y, -(b / &g), a / &g)
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut d = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let one = BigInt::one();
    let zero = BigInt::zero();

    for t in 0..rows.min(cols) {
        // Pick the entry of least nonzero absolute value in the remaining block.
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !d[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(u, d, v);
            };
            d.swap(t, bi);
            u.swap(t, bi);
            for row in d.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }

            // Clear column t and row t with extended-gcd combinations.
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let (a, b) = (d[t][t].clone(), d[i][t].clone());
                let (x, y, ca, cb) = combination(&a, &b);
                row_op(&mut d, t, i, &x, &y, &ca, &cb);
                row_op(&mut u, t, i, &x, &y, &ca, &cb);
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let (a, b) = (d[t][t].clone(), d[t][j].clone());
                let (x, y, ca, cb) = combination(&a, &b);
                col_op(&mut d, t, j, &x, &y, &ca, &cb);
                col_op(&mut v, t, j, &x, &y, &ca, &cb);
            }
            let column_clear = (t + 1..rows).all(|i| d[i][t].is_zero());
            if !column_clear {
                continue;
            }
            // Enforce divisibility: fold an offending row into row t.
            let pivot = d[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[i][j] % &pivot).is_zero()));
            match bad {
                Some(i) => {
                    row_op(&mut d, t, i, &one, &one, &zero, &one);
                    row_op(&mut u, t, i, &one, &one, &zero, &one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for k in 0..cols {
                d[t][k] = -&d[t][k];
            }
            for k in 0..rows {
                u[t][k] = -&u[t][k];
            }
        }
    }
    finish(u, d, v)
}

fn finish(u: IntegerMatrix, d: IntegerMatrix, v: IntegerMatrix) -> SmithForm {
    SmithForm { u, d, v }
}

pub fn determinant(m: &IntegerMatrix) -> BigInt {
    // Fraction-free Bareiss elimination.
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(rows: &[&[i64]]) -> IntegerMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn check(m: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(mat_mul(&mat_mul(&s.u, m), &s.v), s.d);
        assert!(determinant(&s.u).abs().is_one());
        assert!(determinant(&s.v).abs().is_one());
        for (i, row) in s.d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    assert!(x.is_zero());
                }
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        s
    }

    #[test]
    fn small_examples() {
        let s = check(&int(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
        let s = check(&int(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
        let s = check(&int(&[&[0, 0, 0], &[0, 0, 0]]));
        assert_eq!(s.rank(), 0);
    }

    proptest! {
        #[test]
        fn random_square(entries in proptest::collection::vec(-9i64..10, 64)) {
            let m: IntegerMatrix = entries.chunks(8).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let s = check(&m);
            let prod = s.invariant_factors().iter().fold(BigInt::one(), |a, b| a * b);
            if s.rank() == 8 {
                prop_assert_eq!(prod, determinant(&m).abs());
            } else {
                prop_assert!(determinant(&m).is_zero());
            }
        }

        #[test]
        fn random_rectangular(entries in proptest::collection::vec(-5i64..6, 15)) {
            let m: IntegerMatrix = entries.chunks(5).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            check(&m);
        }
    }
}
