use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Square matrix of arbitrary-precision integers, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers.
    ///
    /// Panics if the rows do not form a square matrix.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), n, "IntMatrix::from_rows needs a square matrix");
            data.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        IntMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        IntMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// `self^r` by repeated squaring; `r = 0` gives the identity.
    pub fn pow(&self, mut r: u32) -> IntMatrix {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while r > 0 {
            if r & 1 == 1 {
                result = result.mul(&base);
            }
            r >>= 1;
            if r > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Principal submatrix on the given (sorted) index list.
    pub fn submatrix(&self, indices: &[usize]) -> IntMatrix {
        Self::from_fn(indices.len(), |i, j| self.get(indices[i], indices[j]).clone())
    }

    /// The `S`-mask: every entry whose row or column lies outside `set` is zeroed.
    pub fn mask(&self, set: &BTreeSet<usize>) -> IntMatrix {
        Self::from_fn(self.n, |i, j| {
            if set.contains(&i) && set.contains(&j) {
                self.get(i, j).clone()
            } else {
                BigInt::zero()
            }
        })
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            Complex64::new(self.get(i, j).to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_matches_repeated_multiplication() {
        let a = IntMatrix::from_rows(&[[1, 2, 0], [0, 1, 3], [4, 0, 2]]);
        let mut expected = IntMatrix::identity(3);
        for r in 0..7u32 {
            assert_eq!(a.pow(r), expected);
            expected = expected.mul(&a);
        }
    }

    #[test]
    fn bareiss_determinants() {
        assert_eq!(IntMatrix::from_rows(&[[1, 2], [3, 4]]).determinant(), BigInt::from(-2));
        assert_eq!(IntMatrix::from_rows(&[[0, 1], [1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(
            IntMatrix::from_rows(&[[2, 0, 1], [1, 3, 2], [1, 1, 2]]).determinant(),
            BigInt::from(6)
        );
        assert!(IntMatrix::from_rows(&[[1, 2], [2, 4]]).determinant().is_zero());
        assert_eq!(IntMatrix::identity(4).determinant(), BigInt::one());
    }

    #[test]
    fn mask_zeroes_outside_rows_and_columns() {
        let a = IntMatrix::from_rows(&[[1, 2], [3, 4]]);
        let s: BTreeSet<usize> = [1].into_iter().collect();
        assert_eq!(a.mask(&s), IntMatrix::from_rows(&[[0, 0], [0, 4]]));
        assert!(a.mask(&BTreeSet::new()).is_zero());
    }
}
