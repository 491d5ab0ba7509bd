use std::fmt;

use super::scalar::RepScalar;

/// Dense square matrix, row-major.
#[derive(Clone)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: RepScalar> Matrix<T> {
    pub fn zero(n: usize) -> Self {
        Matrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let cols: Vec<Vec<T>> = (0..n).map(|j| other.column(j)).collect();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let row = self.row(i);
            for col in &cols {
                data.push(T::dot(row.iter().zip(col.iter())));
            }
        }
        Matrix { n, data }
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|i| T::dot(self.row(i).iter().zip(v))).collect()
    }

    pub fn transpose(&self) -> Matrix<T> {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { n, data }
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub_ref(b)).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero_value)
    }

    pub fn is_identity(&self) -> bool {
        let n = self.n;
        self.data.iter().enumerate().all(|(k, v)| {
            if k / n == k % n {
                v.sub_ref(&T::one()).is_zero_value()
            } else {
                v.is_zero_value()
            }
        })
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc.add_ref(self.get(i, i)))
    }

    pub fn pow(&self, mut k: u64) -> Matrix<T> {
        let mut result = Matrix::identity(self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// True when the matrix has rank exactly one.
    pub fn has_rank_one(&self) -> bool {
        let n = self.n;
        let Some(p) = self.data.iter().position(|v| !v.is_zero_value()) else {
            return false;
        };
        let (pi, pj) = (p / n, p % n);
        let pivot = self.get(pi, pj);
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.get(i, j)
                    .mul_ref(pivot)
                    .values_equal(&self.get(i, pj).mul_ref(self.get(pi, j)))
            })
        })
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Option<Matrix<T>> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::<T>::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero_value())?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let f = a.get(col, col).inverse()?;
            for j in 0..n {
                a.data[col * n + j] = a.data[col * n + j].mul_ref(&f);
                inv.data[col * n + j] = inv.data[col * n + j].mul_ref(&f);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero_value() {
                    continue;
                }
                let c = a.get(r, col).clone();
                for j in 0..n {
                    let x = a.data[col * n + j].mul_ref(&c);
                    a.data[r * n + j] = a.data[r * n + j].sub_ref(&x);
                    let y = inv.data[col * n + j].mul_ref(&c);
                    inv.data[r * n + j] = inv.data[r * n + j].sub_ref(&y);
                }
            }
        }
        Some(inv)
    }

    pub fn key(&self) -> Vec<T::Key> {
        self.data.iter().map(T::key).collect()
    }

    pub fn approx(&self) -> Vec<f64> {
        self.data.iter().map(T::approx).collect()
    }

    pub(crate) fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }
}

impl<T: RepScalar> PartialEq for Matrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data.iter().zip(&other.data).all(|(a, b)| a.values_equal(b))
    }
}

impl<T: RepScalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = (0..self.n).map(|i| self.row(i)).collect();
        f.debug_list().entries(rows).finish()
    }
}
