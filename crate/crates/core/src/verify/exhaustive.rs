//! Vertex enumeration by brute force over tight constraint subsets.
//!
//! Every `dim`-subset of the inequality rows is made tight and solved
//! exactly; nonsingular solutions satisfying every row are vertices.
//! Exponential; apart from equality elimination it shares no code with the
//! double description method and serves as its reference on small systems.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;

use super::reduce::ReducedSystem;
use crate::error::{Error, Result};
use crate::linalg::{solve_square, Rational, RationalMatrix};

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

pub(crate) fn vertices(sys: &ReducedSystem, budget: u128) -> Result<Vec<Vec<Rational>>> {
    let dim = sys.dim();
    if dim == 0 {
        return Ok(vec![Vec::new()]);
    }
    let subsets = binomial(sys.rows.len(), dim);
    if subsets > budget {
        return Err(Error::TooLargeToEnumerate { budget });
    }
    let to_rat = |v: &[BigInt]| v.iter().cloned().map(Rational::from_integer).collect::<Vec<_>>();
    let feasible = |y: &[Rational]| {
        sys.rows.iter().all(|(g, c)| {
            let lhs = g.iter().zip(y).fold(Rational::zero(), |acc, (a, b)| acc + Rational::from_integer(a.clone()) * b);
            lhs <= Rational::from_integer(c.clone())
        })
    };
    let mut found = BTreeSet::new();
    for subset in (0..sys.rows.len()).combinations(dim) {
        let a = RationalMatrix::from_rows(dim, subset.iter().map(|&i| to_rat(&sys.rows[i].0)).collect())?;
        let b: Vec<Rational> = subset.iter().map(|&i| Rational::from_integer(sys.rows[i].1.clone())).collect();
        if let Some(y) = solve_square(&a, &b) {
            if feasible(&y) {
                found.insert(y);
            }
        }
    }
    Ok(found.into_iter().collect())
}
