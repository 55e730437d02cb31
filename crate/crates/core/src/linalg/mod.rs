//! Exact rational linear algebra.
//!
//! Every geometric decision downstream (ranks, hulls, hyperplane coincidence)
//! is an equality test, so everything here runs over arbitrary-precision
//! rationals with no tolerances anywhere.

mod feasibility;

pub use feasibility::feasible_nonnegative;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;
pub type RationalVector = Vec<Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_vector_to_rational(v: &[BigInt]) -> RationalVector {
    v.iter().cloned().map(Rational::from_integer).collect()
}

pub fn i64_vector_to_rational(v: &[i64]) -> RationalVector {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// A dense rectangular matrix of rationals stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: Vec<RationalVector>,
    cols: usize,
}

impl RationalMatrix {
    pub fn empty(cols: usize) -> Self {
        Self { rows: Vec::new(), cols }
    }

    pub fn from_rows(cols: usize, rows: Vec<RationalVector>) -> Result<Self> {
        for row in &rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
        }
        Ok(Self { rows, cols })
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(cols: usize, rows: &[R]) -> Result<Self> {
        Self::from_rows(cols, rows.iter().map(|r| i64_vector_to_rational(r.as_ref())).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[RationalVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<RationalVector> {
        self.rows
    }

    pub fn push_row(&mut self, row: RationalVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let rows = (0..self.cols).map(|j| self.rows.iter().map(|r| r[j].clone()).collect()).collect();
        Self { rows, cols: self.rows.len() }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> RationalVector {
        self.rows.iter().map(|r| dot(r, v)).collect()
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..self.cols {
            if lead == rows.len() {
                break;
            }
            let Some(p) = (lead..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(lead, p);
            let inv = rows[lead][col].recip();
            for x in rows[lead].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = rows[lead].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == lead || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= &factor * p;
                    }
                }
            }
            pivots.push(col);
            lead += 1;
        }
        rows.truncate(pivots.len());
        (Self { rows, cols: self.cols }, pivots)
    }

    /// Basis of `{x : M x = 0}`, one basis vector per row.
    pub fn nullspace(&self) -> Self {
        let (reduced, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &p) in reduced.rows.iter().zip(&pivots) {
                v[p] = -row[free].clone();
            }
            basis.push(v);
        }
        Self { rows: basis, cols: self.cols }
    }
}

/// Rank via exact Gaussian elimination; zero for a matrix without rows.
pub fn rank(m: &RationalMatrix) -> usize {
    m.rref().1.len()
}

/// Rank of a list of vectors sharing a dimension.
pub fn rank_of(vectors: &[RationalVector], dim: usize) -> usize {
    RationalMatrix::from_rows(dim, vectors.to_vec()).map(|m| rank(&m)).unwrap_or(0)
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve_square(a: &RationalMatrix, b: &[Rational]) -> Option<RationalVector> {
    let n = a.ncols();
    if a.nrows() != n || b.len() != n {
        return None;
    }
    let augmented = RationalMatrix {
        rows: a
            .rows
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                let mut r = r.clone();
                r.push(bi.clone());
                r
            })
            .collect(),
        cols: n + 1,
    };
    let (reduced, pivots) = augmented.rref();
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(reduced.rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// The equality description `A x = b` of an affine hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineHull {
    pub eq_lhs: RationalMatrix,
    pub eq_rhs: RationalVector,
    pub ambient_dim: usize,
}

impl AffineHull {
    pub fn dim(&self) -> usize {
        self.ambient_dim - self.eq_lhs.nrows()
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.eq_lhs.rows().iter().zip(&self.eq_rhs).all(|(a, b)| &dot(a, p) == b)
    }
}

/// Independent equations cutting out the affine hull of `points`.
///
/// Each equation is scaled to a primitive integer row with its first nonzero
/// coefficient positive, so the output is deterministic.
pub fn affine_hull(points: &[RationalVector]) -> Result<AffineHull> {
    let first = points.first().ok_or(Error::EmptyPointSet)?;
    let dim = first.len();
    let diffs = points[1..]
        .iter()
        .map(|p| {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            Ok(p.iter().zip(first).map(|(a, b)| a - b).collect())
        })
        .collect::<Result<Vec<RationalVector>>>()?;
    let normals = RationalMatrix::from_rows(dim, diffs)?.nullspace();
    let mut lhs = RationalMatrix::empty(dim);
    let mut rhs = Vec::new();
    for n in normals.into_rows() {
        let scaled = int_vector_to_rational(&primitive_canonical(&n)?);
        rhs.push(dot(&scaled, first));
        lhs.push_row(scaled)?;
    }
    Ok(AffineHull { eq_lhs: lhs, eq_rhs: rhs, ambient_dim: dim })
}

/// A nonzero `b` in the row space of `space_basis` orthogonal to every row of
/// `subset`, where `subset` spans a hyperplane of that space.
pub fn orthogonal_in_subspace(space_basis: &RationalMatrix, subset: &RationalMatrix) -> Result<RationalVector> {
    let dim = space_basis.ncols();
    if subset.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: subset.ncols() });
    }
    // Reduce the space to an independent basis first.
    let (basis, _) = space_basis.rref();
    let m = basis.nrows();
    let subset_rank = rank(subset);
    let mut stacked = basis.clone();
    for s in subset.rows() {
        stacked.push_row(s.clone())?;
    }
    if m == 0 || subset_rank + 1 != m || rank(&stacked) != m {
        return Err(Error::NotAHyperplane { space_rank: m, subset_rank });
    }
    // b = basisᵀ α with (subset · basisᵀ) α = 0.
    let gram = RationalMatrix { rows: subset.rows().iter().map(|s| basis.mul_vec(s)).collect(), cols: m };
    let alpha = gram.nullspace();
    debug_assert_eq!(alpha.nrows(), 1);
    let alpha = &alpha.rows[0];
    let mut b = vec![Rational::zero(); dim];
    for (coef, row) in alpha.iter().zip(basis.rows()) {
        for (bj, rj) in b.iter_mut().zip(row) {
            *bj += coef * rj;
        }
    }
    Ok(b)
}

fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Integer vector parallel to `v` with entry gcd 1 and first nonzero entry positive.
pub fn primitive_canonical(v: &[Rational]) -> Result<Vec<BigInt>> {
    let first = v.iter().find(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
    let scale = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|q| (q * &scale).to_integer()).collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if first.is_negative() {
        g = -g;
    }
    Ok(ints.into_iter().map(|x| x / &g).collect())
}

/// Multiplies both sides of a row by the (positive) least common multiple of
/// every denominator involved.
pub fn scale_row_to_integers(coeffs: &[Rational], rhs_coeffs: &[Rational]) -> (Vec<BigInt>, Vec<BigInt>) {
    let scale = lcm_of_denominators(coeffs.iter().chain(rhs_coeffs));
    let apply = |xs: &[Rational]| xs.iter().map(|q| (q * &scale).to_integer()).collect();
    (apply(coeffs), apply(rhs_coeffs))
}
