//! Exact determinants and ranks: dense elimination modulo 62-bit primes
//! with Montgomery multiplication, and fraction-free Bareiss elimination
//! over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{for_each_mut, Execution};
use crate::young::SparseMatrix;

/// Square integer matrix with sparse rows of `(column, value)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    rows: Vec<Vec<(u32, BigInt)>>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<(u32, BigInt)>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().flatten().any(|(j, _)| *j as usize >= dim) {
            return Err(Error::InvalidArgument("column index out of range".into()));
        }
        Ok(IntMatrix { dim, rows })
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Result<Self> {
        let dim = dense.len();
        if dense.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(j, v)| (j as u32, BigInt::from(*v)))
                    .collect()
            })
            .collect();
        Ok(IntMatrix { dim, rows })
    }

    pub fn from_sparse(m: &SparseMatrix) -> Self {
        let rows = (0..m.dim())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|&(j, v)| (j, BigInt::from(v)))
                    .collect()
            })
            .collect();
        IntMatrix { dim: m.dim(), rows }
    }

    /// Clears denominators row by row. Returns the integer matrix and the
    /// positive factor each row was multiplied by.
    pub fn from_rational_rows(rows: &[Vec<(u32, Rational64)>]) -> Result<(Self, Vec<i64>)> {
        let mut scales = Vec::with_capacity(rows.len());
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let l = row.iter().fold(1i64, |acc, (_, v)| acc.lcm(v.denom()));
            scales.push(l);
            out.push(
                row.iter()
                    .map(|(j, v)| (*j, BigInt::from(v.numer() * (l / v.denom()))))
                    .collect(),
            );
        }
        Ok((IntMatrix::from_rows(out)?, scales))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[(u32, BigInt)] {
        &self.rows[i]
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.dim]; self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                d[i][*j as usize] = v.clone();
            }
        }
        d
    }
}

/// Arithmetic modulo an odd prime `q < 2⁶²` in Montgomery form, `R = 2⁶⁴`.
#[derive(Debug, Clone, Copy)]
pub struct Montgomery {
    q: u64,
    /// `−q⁻¹ mod 2⁶⁴`
    q_neg_inv: u64,
    /// `R² mod q`
    r2: u64,
}

impl Montgomery {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || q % 2 == 0 || q >= 1 << 62 {
            return Err(Error::InvalidArgument(format!(
                "modulus {q} must be odd and below 2^62"
            )));
        }
        // Newton iteration for q⁻¹ mod 2⁶⁴
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        let r2 = ((r as u128 * r as u128) % q as u128) as u64;
        Ok(Montgomery {
            q,
            q_neg_inv: inv.wrapping_neg(),
            r2,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.q_neg_inv);
        let u = ((t + m as u128 * self.q as u128) >> 64) as u64;
        if u >= self.q {
            u - self.q
        } else {
            u
        }
    }

    /// `a·b mod q` when `b_mont = b·R mod q`.
    #[inline]
    fn mul_mont(&self, a: u64, b_mont: u64) -> u64 {
        self.redc(a as u128 * b_mont as u128)
    }

    fn to_mont(&self, a: u64) -> u64 {
        self.redc(a as u128 * self.r2 as u128)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.mul_mont(a, self.to_mont(b))
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.q - 2)
    }

    pub fn reduce(&self, v: &BigInt) -> u64 {
        residue(v, self.q)
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniformly drawn prime in `[2⁶¹, 2⁶²)`.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let c = rng.random_range(1u64 << 61..1u64 << 62) | 1;
        if is_prime_u64(c) {
            return c;
        }
    }
}

/// `det(m) mod q` by dense Gaussian elimination. Row updates below each
/// pivot run in parallel when `exec` allows.
pub fn det_mod(m: &IntMatrix, q: u64, exec: Execution) -> Result<u64> {
    let mg = Montgomery::new(q)?;
    let n = m.dim();
    let mut a: Vec<Vec<u64>> = m
        .rows
        .iter()
        .map(|row| {
            let mut dense = vec![0u64; n];
            for (j, v) in row {
                dense[*j as usize] = mg.reduce(v);
            }
            dense
        })
        .collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
            return Ok(0);
        };
        if p != k {
            a.swap(p, k);
            det = (q - det) % q;
        }
        let (done, rest) = a.split_at_mut(k + 1);
        let pivot_row = &done[k];
        det = mg.mul(det, pivot_row[k]);
        let inv = mg.inv(pivot_row[k]);
        let support: Vec<usize> = (k + 1..n).filter(|&j| pivot_row[j] != 0).collect();
        for_each_mut(rest, exec, |_, row| {
            let f = row[k];
            if f == 0 {
                return;
            }
            // row ← row − (f/pivot)·pivot_row
            let factor_mont = mg.to_mont(q - mg.mul(f, inv));
            for &j in &support {
                let s = row[j] + mg.mul_mont(pivot_row[j], factor_mont);
                row[j] = if s >= q { s - q } else { s };
            }
            row[k] = 0;
        });
    }
    Ok(det)
}

/// Rank and determinant over the integers by fraction-free elimination.
/// The determinant is zero whenever the rank is deficient.
pub fn exact_rank_det(m: &IntMatrix) -> (usize, BigInt) {
    let n = m.dim();
    let mut a = m.to_dense();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut negate = false;
    for col in 0..n {
        let Some(p) = (rank..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            negate = !negate;
        }
        let (done, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &done[rank];
        for row in rest.iter_mut() {
            for j in col + 1..n {
                let v = (&row[j] * &pivot_row[col] - &row[col] * &pivot_row[j]) / &prev;
                row[j] = v;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot_row[col].clone();
        rank += 1;
    }
    let det = if rank == n {
        if negate {
            -prev
        } else {
            prev
        }
    } else {
        BigInt::zero()
    };
    (rank, det)
}

/// A prime `q` in `[2⁶¹, 2⁶²)` with `v mod q ≠ 0`, found by walking up from
/// a random start. `v` must be nonzero.
pub fn prime_not_dividing<R: Rng + ?Sized>(v: &BigInt, rng: &mut R) -> u64 {
    debug_assert!(!v.is_zero());
    loop {
        let q = random_prime(rng);
        if !(v % BigInt::from(q)).is_zero() {
            return q;
        }
    }
}

/// `Π scales⁻¹ mod q`, the factor turning the determinant of a
/// row-scaled matrix into that of the original rational matrix.
pub fn unscale_mod(scales: &[i64], q: u64) -> Result<u64> {
    let mg = Montgomery::new(q)?;
    let mut prod = 1u64;
    for s in scales {
        let s = mg.reduce(&BigInt::from(*s));
        if s == 0 {
            return Err(Error::InvalidArgument(format!(
                "row scale divisible by {q}"
            )));
        }
        prod = mg.mul(prod, s);
    }
    Ok(mg.inv(prod))
}

/// Residue of an exact integer modulo `q`.
pub fn residue(v: &BigInt, q: u64) -> u64 {
    v.mod_floor(&BigInt::from(q))
        .to_u64()
        .expect("residue fits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn int(dense: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_dense(dense).unwrap()
    }

    /// Leibniz expansion over all permutations.
    fn leibniz(a: &[Vec<i64>]) -> BigInt {
        let n = a.len();
        let mut idx: Vec<usize> = (0..n).collect();
        let mut total = BigInt::zero();
        loop {
            let inv = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| idx[i] > idx[j])
                .count();
            let mut term = BigInt::from(if inv % 2 == 0 { 1 } else { -1 });
            for (i, &j) in idx.iter().enumerate() {
                term *= a[i][j];
            }
            total += term;
            // next permutation
            let Some(i) = (1..n).rev().find(|&i| idx[i - 1] < idx[i]) else {
                return total;
            };
            let j = (i..n).rev().find(|&j| idx[j] > idx[i - 1]).unwrap();
            idx.swap(i - 1, j);
            idx[i..].reverse();
        }
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0u64..5000 {
            let slow = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), slow, "{n}");
        }
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(3_215_031_751));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = random_prime(&mut rng);
        assert!(q >= 1 << 61 && q < 1 << 62 && is_prime_u64(q));
    }

    #[test]
    fn montgomery_products_match_u128() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = random_prime(&mut rng);
        let mg = Montgomery::new(q).unwrap();
        for _ in 0..1000 {
            let a = rng.random_range(0..q);
            let b = rng.random_range(0..q);
            assert_eq!(mg.mul(a, b) as u128, a as u128 * b as u128 % q as u128);
            if a != 0 {
                assert_eq!(mg.mul(a, mg.inv(a)), 1);
            }
        }
    }

    #[test]
    fn small_determinants() {
        let q = (1u64 << 61) - 1;
        assert_eq!(
            det_mod(&int(&[vec![1, 0], vec![0, 1]]), q, Execution::Sequential).unwrap(),
            1
        );
        assert_eq!(
            det_mod(&int(&[vec![1, 1], vec![1, 1]]), q, Execution::Sequential).unwrap(),
            0
        );
        assert_eq!(
            det_mod(&int(&[vec![0, 1], vec![1, 0]]), q, Execution::Sequential).unwrap(),
            q - 1
        );
        assert_eq!(
            exact_rank_det(&int(&[vec![1, 1], vec![1, 1]])),
            (1, BigInt::zero())
        );
        assert_eq!(
            exact_rank_det(&int(&[vec![0, 2], vec![3, 0]])),
            (2, BigInt::from(-6))
        );
    }

    #[test]
    fn eliminations_match_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_prime(&mut rng);
        for trial in 0..200 {
            let n = 1 + trial % 6;
            let a: Vec<Vec<i64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.random_bool(0.4) {
                                0
                            } else {
                                rng.random_range(-5..=5)
                            }
                        })
                        .collect()
                })
                .collect();
            let want = leibniz(&a);
            let m = int(&a);
            assert_eq!(exact_rank_det(&m).1, want, "{a:?}");
            for exec in [Execution::Sequential, Execution::Parallel] {
                assert_eq!(det_mod(&m, q, exec).unwrap(), residue(&want, q), "{a:?}");
            }
        }
    }

    #[test]
    fn rank_of_low_rank_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in 0..=5 {
            let u: Vec<Vec<i64>> = (0..7)
                .map(|_| (0..k).map(|_| rng.random_range(-3..=3)).collect())
                .collect();
            let v: Vec<Vec<i64>> = (0..k)
                .map(|_| (0..7).map(|_| rng.random_range(-3..=3)).collect())
                .collect();
            let a: Vec<Vec<i64>> = (0..7)
                .map(|i| {
                    (0..7)
                        .map(|j| (0..k).map(|t| u[i][t] * v[t][j]).sum())
                        .collect()
                })
                .collect();
            // rank of U·V is at most k; the float rank of the product is the oracle
            let f = nalgebra::DMatrix::from_fn(7, 7, |i, j| a[i][j] as f64);
            let float_rank = f.rank(1e-9);
            assert_eq!(exact_rank_det(&int(&a)).0, float_rank);
        }
    }

    #[test]
    fn rational_rows_are_cleared() {
        let rows = vec![
            vec![(0, Rational64::new(1, 2)), (1, Rational64::new(1, 3))],
            vec![(1, Rational64::new(3, 4))],
        ];
        let (m, scales) = IntMatrix::from_rational_rows(&rows).unwrap();
        assert_eq!(scales, vec![6, 4]);
        assert_eq!(
            m.to_dense(),
            vec![
                vec![BigInt::from(3), BigInt::from(2)],
                vec![BigInt::zero(), BigInt::from(3)]
            ]
        );
        // det = 3/8
        let q = (1u64 << 61) - 1;
        let mg = Montgomery::new(q).unwrap();
        let d = mg.mul(
            det_mod(&m, q, Execution::Sequential).unwrap(),
            unscale_mod(&scales, q).unwrap(),
        );
        assert_eq!(mg.mul(d, 8), 3);
    }
}
