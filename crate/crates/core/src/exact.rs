//! Exact rational linear algebra.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Gaussian rational `a + b·i` with `a, b ∈ ℚ`.
pub type QComplex = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qc(re: BigRational, im: BigRational) -> QComplex {
    Complex::new(re, im)
}

pub fn qc_int(re: i64, im: i64) -> QComplex {
    Complex::new(rational(re, 1), rational(im, 1))
}

/// `2^-r` as an exact rational.
pub fn dyadic(r: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << r)
}

/// `p/q` text form, always with an explicit denominator.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Dense square matrix with exact Gaussian-rational entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    dim: usize,
    data: Vec<QComplex>,
}

impl ExactMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![QComplex::zero(); dim * dim] }
    }

    pub fn from_rows(rows: Vec<Vec<QComplex>>) -> Option<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Self { dim, data: rows.into_iter().flatten().collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &QComplex {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: QComplex) {
        self.data[r * self.dim + c] = v;
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.dim).all(|r| (r..self.dim).all(|c| *self.get(r, c) == self.get(c, r).conj()))
    }

    pub fn trace(&self) -> QComplex {
        (0..self.dim).fold(QComplex::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn scaled(&self, k: &BigRational) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|v| v * k).collect() }
    }

    pub fn add_scaled(&mut self, other: &ExactMatrix, k: &BigRational) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * k;
        }
    }

    /// Entries as `f64` pairs, for comparison against floating oracles.
    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        use num_traits::ToPrimitive;
        self.data.iter().map(|v| (v.re.to_f64().unwrap_or(f64::NAN), v.im.to_f64().unwrap_or(f64::NAN))).collect()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let v = self.get(r, c);
                    if v.im.is_zero() {
                        v.re.to_string()
                    } else {
                        format!("{}{}{}i", v.re, if v.im.is_negative() { "-" } else { "+" }, v.im.abs())
                    }
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn integer_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                // exact by Sylvester's identity
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Solves `a · x = b` over ℚ for square nonsingular `a` by Gauss-Jordan
/// elimination. Returns `None` if `a` is singular.
#[allow(clippy::needless_range_loop)]
pub fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                let v = &a[col][c] * &f;
                a[r][c] -= v;
            }
            let v = &b[col] * &f;
            b[r] -= v;
        }
    }
    Some(b)
}
