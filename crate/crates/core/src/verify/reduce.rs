use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::formulation::Formulation;
use crate::linalg::{dot, Rational, RationalMatrix};

/// The LP relaxation of a formulation restricted to its equality-defined
/// affine subspace: `x = offset + Σ_j y_j · direction_j` and `G y <= c`
/// with integer `G`, `c`.
#[derive(Debug, Clone)]
pub(crate) struct ReducedSystem {
    pub full_dim: usize,
    /// Coordinates of `x` that are free (one per `y_j`).
    pub free: Vec<usize>,
    /// For every pivot coordinate: `x_p = constant − Σ_j coef_j y_j`.
    pub pivots: Vec<(usize, Rational, Vec<Rational>)>,
    pub rows: Vec<(Vec<BigInt>, BigInt)>,
    /// False when the equalities or constant rows already rule out every point.
    pub feasible: bool,
}

impl ReducedSystem {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn lift(&self, y: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.full_dim];
        for (j, &f) in self.free.iter().enumerate() {
            x[f] = y[j].clone();
        }
        for (p, constant, coefs) in &self.pivots {
            x[*p] = constant - dot(coefs, y);
        }
        x
    }
}

/// Inequalities of the relaxation in the original `(λ, z)` space, each as
/// `(a, c)` meaning `a · x <= c`: `λ >= 0`, both sides of every general row
/// and the box on `z`.
pub(crate) fn relaxation_inequalities(f: &Formulation) -> Vec<(Vec<Rational>, Rational)> {
    let n = f.num_variables();
    let mut out = Vec::new();
    for v in 0..f.n_lambda {
        let mut a = vec![Rational::zero(); n];
        a[v] = -Rational::one();
        out.push((a, Rational::zero()));
    }
    for a in f.inequality_rows() {
        out.push((a, Rational::zero()));
    }
    for (k, &(lo, hi)) in f.z_bounds.iter().enumerate() {
        let mut a = vec![Rational::zero(); n];
        a[f.n_lambda + k] = Rational::one();
        out.push((a.clone(), Rational::from_integer(hi.into())));
        a[f.n_lambda + k] = -Rational::one();
        out.push((a, Rational::from_integer((-lo).into())));
    }
    out
}

pub(crate) fn reduce(f: &Formulation) -> ReducedSystem {
    let n = f.num_variables();
    let aug_rows: Vec<Vec<Rational>> = f
        .equalities
        .iter()
        .map(|e| {
            let mut r = e.coeffs.clone();
            r.push(e.rhs.clone());
            r
        })
        .collect();
    let aug = RationalMatrix::from_rows(n + 1, aug_rows).expect("equalities span all variables");
    let (red, pivot_cols) = aug.rref();
    let mut system =
        ReducedSystem { full_dim: n, free: Vec::new(), pivots: Vec::new(), rows: Vec::new(), feasible: true };
    if pivot_cols.last() == Some(&n) {
        system.feasible = false;
        return system;
    }
    let mut is_pivot = vec![false; n];
    for &p in &pivot_cols {
        is_pivot[p] = true;
    }
    system.free = (0..n).filter(|&c| !is_pivot[c]).collect();
    for (row, &p) in red.rows().iter().zip(&pivot_cols) {
        let coefs = system.free.iter().map(|&j| row[j].clone()).collect();
        system.pivots.push((p, row[n].clone(), coefs));
    }

    for (a, c) in relaxation_inequalities(f) {
        let mut g: Vec<Rational> = system.free.iter().map(|&j| a[j].clone()).collect();
        let mut rhs = c;
        for (p, constant, coefs) in &system.pivots {
            if a[*p].is_zero() {
                continue;
            }
            rhs -= &a[*p] * constant;
            for (gj, cj) in g.iter_mut().zip(coefs) {
                *gj -= &a[*p] * cj;
            }
        }
        if g.iter().all(|x| x.is_zero()) {
            if rhs.is_negative() {
                system.feasible = false;
            }
            continue;
        }
        let scale = g.iter().chain(std::iter::once(&rhs)).fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let gi: Vec<BigInt> = g.iter().map(|q| (q * &scale).to_integer()).collect();
        let ci = (rhs * &scale).to_integer();
        let gcd = gi.iter().fold(ci.clone(), |acc, x| acc.gcd(x));
        let (gi, ci) = if gcd.is_zero() || gcd.is_one() {
            (gi, ci)
        } else {
            (gi.into_iter().map(|x| x / &gcd).collect(), ci / &gcd)
        };
        system.rows.push((gi, ci));
    }
    system.rows.sort();
    system.rows.dedup();
    system
}
