//! Double description vertex enumeration over the integers.
//!
//! The polytope `{y : G y <= c}` is homogenized into the cone
//! `{(y, t) : c t − G y >= 0, t >= 0}` and its extreme rays are built one
//! constraint at a time. Rays stay primitive integer vectors; two rays are
//! combined only when they are adjacent, decided by the combinatorial test
//! (no third ray is tight on every constraint both are tight on).

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::reduce::ReducedSystem;
use crate::error::{Error, Result};
use crate::linalg::{Rational, RationalMatrix};

struct Ray {
    coords: Vec<BigInt>,
    tight: FixedBitSet,
}

fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

/// Vertices of the reduced polytope in `y` coordinates.
pub(crate) fn vertices(sys: &ReducedSystem, budget: u128) -> Result<Vec<Vec<Rational>>> {
    let dim = sys.dim() + 1;
    // Homogenized constraint rows a with a · (y, t) >= 0.
    let mut rows: Vec<Vec<BigInt>> = sys
        .rows
        .iter()
        .map(|(g, c)| {
            let mut a: Vec<BigInt> = g.iter().map(|x| -x).collect();
            a.push(c.clone());
            a
        })
        .collect();
    let mut t_row = vec![BigInt::zero(); dim];
    t_row[dim - 1] = BigInt::one();
    rows.push(t_row);
    let m = rows.len();

    // Pick `dim` independent rows, starting with t >= 0.
    let order: Vec<usize> = std::iter::once(m - 1).chain(0..m - 1).collect();
    let mut basis_rows: Vec<usize> = Vec::new();
    let mut echelon = RationalMatrix::empty(dim);
    for &i in &order {
        if basis_rows.len() == dim {
            break;
        }
        let mut trial = echelon.clone();
        trial.push_row(rows[i].iter().cloned().map(Rational::from_integer).collect())?;
        let (reduced, pivots) = trial.rref();
        if pivots.len() > basis_rows.len() {
            basis_rows.push(i);
            echelon = reduced;
        }
    }
    if basis_rows.len() < dim {
        return Err(Error::Unbounded);
    }

    // Initial simplicial cone: rays are the columns of B⁻¹.
    let b = RationalMatrix::from_rows(
        2 * dim,
        basis_rows
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let mut r: Vec<Rational> = rows[i].iter().cloned().map(Rational::from_integer).collect();
                r.extend((0..dim).map(|j| if j == k { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect(),
    )?;
    let (inv, _) = b.rref();
    let mut processed = FixedBitSet::with_capacity(m);
    for &i in &basis_rows {
        processed.insert(i);
    }
    let mut rays: Vec<Ray> = Vec::with_capacity(dim);
    for k in 0..dim {
        let col: Vec<Rational> = inv.rows().iter().map(|r| r[dim + k].clone()).collect();
        let scale = col.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let coords = primitive(col.iter().map(|q| (q * &scale).to_integer()).collect());
        let mut tight = FixedBitSet::with_capacity(m);
        for (kk, &i) in basis_rows.iter().enumerate() {
            if kk != k {
                tight.insert(i);
            }
        }
        rays.push(Ray { coords, tight });
    }

    for (i, row) in rows.iter().enumerate() {
        if processed.contains(i) {
            continue;
        }
        processed.insert(i);
        let values: Vec<BigInt> = rays.iter().map(|r| dot_int(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if values[k].is_zero() {
                    r.tight.insert(i);
                }
            }
            continue;
        }
        let mut created = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let mut common = rays[p].tight.clone();
                common.intersect_with(&rays[q].tight);
                if common.count_ones(..) + 2 < dim {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| k == p || k == q || !common.is_subset(&r.tight));
                if !adjacent {
                    continue;
                }
                let coords: Vec<BigInt> = rays[q]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(rq, rp)| &values[p] * rq - &values[q] * rp)
                    .collect();
                let mut tight = common;
                tight.insert(i);
                created.push(Ray { coords: primitive(coords), tight });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() - neg.len() + created.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                r.tight.insert(i);
            }
            next.push(r);
        }
        next.extend(created);
        if next.len() as u128 > budget {
            return Err(Error::TooLargeToEnumerate { budget });
        }
        rays = next;
    }

    let mut out = Vec::with_capacity(rays.len());
    for r in rays {
        let t = &r.coords[dim - 1];
        if t.is_zero() {
            return Err(Error::Unbounded);
        }
        let t = Rational::from_integer(t.clone());
        out.push(r.coords[..dim - 1].iter().map(|x| Rational::from_integer(x.clone()) / &t).collect());
    }
    Ok(out)
}
